#pragma once

#include <random>

#include <osmprobe/osmprobe.hpp>

namespace osmprobe::testing {

/// Laplace on (-1,1)x(0,1) with square cells and N_h interface nodes.
inline StructuredMesh laplace_mesh(int n_h) {
  return build_strip_mesh(-1.0, 1.0, InterfaceGeometry::straight(n_h), n_h + 1, n_h + 1);
}

struct LaplaceSetup {
  StructuredMesh mesh;
  BlockSystem system;
  InterfaceProblem problem;
};

inline LaplaceSetup laplace_setup(int n_h, PdeCoefficients coeffs = PdeCoefficients::laplace()) {
  auto mesh = laplace_mesh(n_h);
  auto sys = assemble_blocks(mesh, coeffs);
  auto prob = neumann_data(sys);
  return {std::move(mesh), std::move(sys), std::move(prob)};
}

inline PdeCoefficients with_forcing(PdeCoefficients c, ScalarField f) {
  c.side[0].f = f;
  c.side[1].f = f;
  return c;
}

inline Vector random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = d(rng);
  }
  return v;
}

/// Orthonormal discrete sines v_k, k = 1..n_h, as matrix columns.
inline DenseMatrix sine_basis(int n_h) {
  std::vector<double> ks;
  for (int k = 1; k <= n_h; ++k) {
    ks.push_back(k);
  }
  const auto probes = sine_probes(n_h, ks);
  DenseMatrix v(n_h, n_h);
  for (int k = 0; k < n_h; ++k) {
    v.col(k) = probes[static_cast<std::size_t>(k)].x;
  }
  return v;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace osmprobe::testing
