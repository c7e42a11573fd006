#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <random>

#include "sparse.hpp"

namespace osmprobe {

/// Linear operator on interface vectors, given as a callable y = op(x).
using LinearOperator = std::function<Vector(const Vector&)>;

struct SpectralEstimate {
  double rho = 0.0;
  /// Relative change of the windowed estimate over the last iteration.
  double variation = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power-iteration estimate of the spectral radius of a (generally nonsymmetric)
/// operator. The estimate is the geometric mean of the last `window` norm-growth
/// ratios, which damps the oscillation a complex-conjugate or +/- pair produces.
/// The start vector is a fixed pseudo-random vector so the result is reproducible.
inline SpectralEstimate spectral_radius(const LinearOperator& apply, int dim, double tol = 1e-8,
                                        int max_it = 2000, int window = 10) {
  if (dim < 1) {
    throw InvalidArgument("spectral_radius: dim must be >= 1");
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector x(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = dist(rng);
  }
  x.normalize();

  SpectralEstimate est;
  std::deque<double> logs;
  double prev = -1.0;
  int stable = 0;
  for (int it = 1; it <= max_it; ++it) {
    Vector y = apply(x);
    const double growth = y.norm();
    est.iterations = it;
    if (growth == 0.0) {
      est.rho = 0.0;
      est.variation = 0.0;
      est.converged = true;
      return est;
    }
    logs.push_back(std::log(growth));
    if (static_cast<int>(logs.size()) > window) {
      logs.pop_front();
    }
    x = y / growth;
    if (static_cast<int>(logs.size()) < window) {
      continue;
    }
    double sum = 0.0;
    for (double l : logs) {
      sum += l;
    }
    const double current = std::exp(sum / window);
    est.rho = current;
    if (prev > 0.0) {
      est.variation = std::abs(current - prev) / current;
      stable = est.variation < tol ? stable + 1 : 0;
      // Two consecutive quiet windows guard against a lucky single step.
      if (stable >= 2) {
        est.converged = true;
        return est;
      }
    }
    prev = current;
  }
  return est;
}

/// Spectral radius of a small dense matrix by a full eigen-decomposition.
inline double spectral_radius_dense(const DenseMatrix& a) {
  if (a.rows() == 0) {
    return 0.0;
  }
  Eigen::EigenSolver<DenseMatrix> es(a, false);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("spectral_radius_dense: eigenvalue iteration failed");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace osmprobe
