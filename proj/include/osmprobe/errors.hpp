#pragma once

#include <stdexcept>
#include <string>

namespace osmprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, dimensions or configuration values.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Mesh mapping produced a cell with non-positive area, or the geometry cannot be meshed.
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Structurally or numerically singular matrix.
class SingularMatrix : public Error {
public:
  using Error::Error;
};

/// The Neumann subdomain operator could not be factorized (kernel not removed by Dirichlet data).
class SingularNeumannOperator : public SingularMatrix {
public:
  using SingularMatrix::SingularMatrix;
};

/// Generic numerical failure (breakdown, optimizer failure, divergence).
class NumericalFailure : public Error {
public:
  using Error::Error;
};

} // namespace osmprobe
