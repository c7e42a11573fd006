#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nelder_mead.hpp"
#include "sparse.hpp"

namespace osmprobe {

enum class FamilyKind {
  /// s I on both sides.
  ScalarIdentitySingle,
  /// s1 I on side 1, s2 I on side 2.
  ScalarIdentityDouble,
  /// p I + q H on both sides.
  SecondOrder,
  /// p1 I + q1 H on side 1, p2 I + q2 H on side 2.
  SecondOrderDouble,
  /// f_2(s) I on side 1 and f_1(s) I on side 2, f_j built from side j's constant coefficients.
  PhysicsRescaled,
};

/// Constant coefficients of one side used by the physics rescaling.
struct SideConstants {
  double nu = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double eta = 0.0;

  /// f(s) = nu (s^2 + a1^2/(4 nu^2) + a2^2/(4 nu^2) + eta/nu)^(1/2) - a1/2.
  double rescale(double s) const {
    return nu * std::sqrt(s * s + a1 * a1 / (4.0 * nu * nu) + a2 * a2 / (4.0 * nu * nu) + eta / nu) - a1 / 2.0;
  }

  /// Inverse of rescale() on its increasing branch s >= 0 (clamped at 0).
  double rescale_inverse(double value) const {
    const double c = a1 * a1 / (4.0 * nu * nu) + a2 * a2 / (4.0 * nu * nu) + eta / nu;
    const double w = (value + a1 / 2.0) / nu;
    return std::sqrt(std::max(w * w - c, 0.0));
  }
};

struct TransmissionFamily {
  FamilyKind kind = FamilyKind::ScalarIdentityDouble;
  /// Only used by PhysicsRescaled.
  std::array<SideConstants, 2> constants{};

  int param_count() const {
    switch (kind) {
    case FamilyKind::ScalarIdentitySingle:
    case FamilyKind::PhysicsRescaled:
      return 1;
    case FamilyKind::ScalarIdentityDouble:
    case FamilyKind::SecondOrder:
      return 2;
    case FamilyKind::SecondOrderDouble:
      return 4;
    }
    return 0;
  }

  std::vector<std::string> param_names() const {
    switch (kind) {
    case FamilyKind::ScalarIdentitySingle:
    case FamilyKind::PhysicsRescaled:
      return {"s"};
    case FamilyKind::ScalarIdentityDouble:
      return {"s1", "s2"};
    case FamilyKind::SecondOrder:
      return {"p", "q"};
    case FamilyKind::SecondOrderDouble:
      return {"p1", "q1", "p2", "q2"};
    }
    return {};
  }

  bool second_order() const {
    return kind == FamilyKind::SecondOrder || kind == FamilyKind::SecondOrderDouble;
  }

  static TransmissionFamily robin_single() { return {FamilyKind::ScalarIdentitySingle, {}}; }
  static TransmissionFamily robin_double() { return {FamilyKind::ScalarIdentityDouble, {}}; }
  static TransmissionFamily second_order_shared() { return {FamilyKind::SecondOrder, {}}; }
  static TransmissionFamily second_order_double() { return {FamilyKind::SecondOrderDouble, {}}; }
  static TransmissionFamily physics_rescaled(SideConstants side1, SideConstants side2) {
    return {FamilyKind::PhysicsRescaled, {side1, side2}};
  }
};

inline const char* to_string(FamilyKind k) {
  switch (k) {
  case FamilyKind::ScalarIdentitySingle:
    return "robin_single";
  case FamilyKind::ScalarIdentityDouble:
    return "robin_double";
  case FamilyKind::SecondOrder:
    return "second_order";
  case FamilyKind::SecondOrderDouble:
    return "second_order_double";
  case FamilyKind::PhysicsRescaled:
    return "physics_rescaled";
  }
  return "?";
}

inline std::optional<FamilyKind> family_from_string(const std::string& s) {
  for (auto k : {FamilyKind::ScalarIdentitySingle, FamilyKind::ScalarIdentityDouble, FamilyKind::SecondOrder,
                 FamilyKind::SecondOrderDouble, FamilyKind::PhysicsRescaled}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  return std::nullopt;
}

/// H = tridiag(-1, 2, -1) / h^2 on the interface nodes.
inline DenseMatrix tridiagonal_h(int n_h, double h) {
  DenseMatrix m = DenseMatrix::Zero(n_h, n_h);
  const double w = 1.0 / (h * h);
  for (int i = 0; i < n_h; ++i) {
    m(i, i) = 2.0 * w;
    if (i > 0) {
      m(i, i - 1) = -w;
    }
    if (i + 1 < n_h) {
      m(i, i + 1) = -w;
    }
  }
  return m;
}

namespace detail {

inline void check_params(const TransmissionFamily& family, const Vector& params) {
  if (params.size() != family.param_count()) {
    throw InvalidArgument(std::string("transmission: ") + to_string(family.kind) + " takes " +
                          std::to_string(family.param_count()) + " parameters, got " +
                          std::to_string(params.size()));
  }
  if (!family.second_order()) {
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      if (!(params[i] > 0.0)) {
        throw InvalidArgument(std::string("transmission: ") + to_string(family.kind) +
                              " needs positive parameters, got " + std::to_string(params[i]));
      }
    }
  }
}

inline void check_side(int side) {
  if (side != 1 && side != 2) {
    throw InvalidArgument("transmission: side must be 1 or 2");
  }
}

/// (p, q) of a second-order family on one side.
inline std::array<double, 2> second_order_pq(const TransmissionFamily& family, const Vector& params, int side) {
  if (family.kind == FamilyKind::SecondOrder) {
    return {params[0], params[1]};
  }
  const int o = 2 * (side - 1);
  return {params[o], params[o + 1]};
}

} // namespace detail

/// Scalar multiple of the identity a scalar-type family realizes on `side`.
inline double scalar_value(const TransmissionFamily& family, const Vector& params, int side) {
  detail::check_params(family, params);
  detail::check_side(side);
  switch (family.kind) {
  case FamilyKind::ScalarIdentitySingle:
    return params[0];
  case FamilyKind::ScalarIdentityDouble:
    return params[side - 1];
  case FamilyKind::PhysicsRescaled:
    // f_j approximates Sigma_j, so it is the transmission operator of the other side.
    return family.constants[static_cast<std::size_t>(2 - side)].rescale(params[0]);
  default:
    throw InvalidArgument("scalar_value: family is not of scalar type");
  }
}

/// Transmission matrix of `family` on `side` for an interface with n_h nodes and spacing h.
inline DenseMatrix realize(const TransmissionFamily& family, const Vector& params, int side, int n_h, double h) {
  detail::check_params(family, params);
  detail::check_side(side);
  if (family.second_order()) {
    const auto [p, q] = detail::second_order_pq(family, params, side);
    DenseMatrix m = q * tridiagonal_h(n_h, h);
    m.diagonal().array() += p;
    return m;
  }
  return scalar_value(family, params, side) * DenseMatrix::Identity(n_h, n_h);
}

/// Fourier symbol g_i(k) of the family: s_i, p_i + q_i k^2, or f_i(s).
inline double family_symbol(const TransmissionFamily& family, const Vector& params, int side, double k) {
  if (family.second_order()) {
    detail::check_side(side);
    const auto [p, q] = detail::second_order_pq(family, params, side);
    return p + q * k * k;
  }
  return scalar_value(family, params, side);
}

/// Heuristic start point from lower/upper spectral estimates of Sigma_i per side.
/// `h_max` is the largest eigenvalue of H (or k_max^2 in Fourier units).
inline Vector start_params(const TransmissionFamily& family, const std::array<double, 2>& lo,
                           const std::array<double, 2>& hi, double h_max) {
  Vector x(family.param_count());
  auto mid = [&](int s) { return std::sqrt(lo[s] * hi[s]); };
  switch (family.kind) {
  case FamilyKind::ScalarIdentitySingle:
    x[0] = std::sqrt(mid(0) * mid(1));
    break;
  case FamilyKind::ScalarIdentityDouble:
    x << mid(0), mid(1);
    break;
  case FamilyKind::PhysicsRescaled: {
    // side i approximates Sigma_(3-i); lo/hi of Sigma_j map back through f_j
    const double s1 = family.constants[0].rescale_inverse(mid(0));
    const double s2 = family.constants[1].rescale_inverse(mid(1));
    x[0] = std::sqrt(std::max(s1, 1e-12) * std::max(s2, 1e-12));
    break;
  }
  case FamilyKind::SecondOrder:
  case FamilyKind::SecondOrderDouble: {
    // g(k_min) ~ lo^(3/4) hi^(1/4), g(k_max) ~ lo^(1/4) hi^(3/4)
    auto pq = [&](int s) {
      const double p = std::pow(lo[s], 0.75) * std::pow(hi[s], 0.25);
      const double q = std::pow(lo[s], 0.25) * std::pow(hi[s], 0.75) / h_max;
      return std::array<double, 2>{p, q};
    };
    if (family.kind == FamilyKind::SecondOrder) {
      const auto a = pq(0), b = pq(1);
      x << std::sqrt(a[0] * b[0]), std::sqrt(a[1] * b[1]);
    } else {
      const auto a = pq(0), b = pq(1);
      x << a[0], a[1], b[0], b[1];
    }
    break;
  }
  }
  return x;
}

/// Per-side Fourier symbol sigma_i(k) of the Steklov-Poincare operator.
using Symbol = std::function<double(double k)>;

struct FourierResult {
  Vector params;
  double value = 0.0;
};

/// Sampled Fourier convergence factor
///   max_k |(g1 - sigma2)(g2 - sigma1) / ((g1 + sigma1)(g2 + sigma2))|
/// over n_samples log-uniform frequencies in [k_min, k_max].
inline double fourier_factor(const std::array<Symbol, 2>& symbols, const TransmissionFamily& family,
                             const Vector& params, double k_min, double k_max, int n_samples) {
  double worst = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double t = n_samples == 1 ? 0.0 : static_cast<double>(j) / (n_samples - 1);
    const double k = k_min * std::pow(k_max / k_min, t);
    const double s1 = symbols[0](k);
    const double s2 = symbols[1](k);
    const double g1 = family_symbol(family, params, 1, k);
    const double g2 = family_symbol(family, params, 2, k);
    const double v = std::abs((g1 - s2) * (g2 - s1) / ((g1 + s1) * (g2 + s2)));
    worst = std::max(worst, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
  }
  return worst;
}

/// Minimizes the sampled Fourier convergence factor over the family (log-parameterized).
inline FourierResult fourier_estimate(const std::array<Symbol, 2>& symbols, const TransmissionFamily& family,
                                      double k_min, double k_max, int n_samples = 200,
                                      std::optional<Vector> start = std::nullopt,
                                      const NelderMeadOptions& nm = {}) {
  if (!(0.0 < k_min && k_min < k_max) || n_samples < 2) {
    throw InvalidArgument("fourier_estimate: need 0 < k_min < k_max and n_samples >= 2");
  }
  if (!family.second_order()) {
    for (int s = 0; s < 2; ++s) {
      if (!(symbols[s](k_min) > 0.0 && symbols[s](k_max) > 0.0)) {
        throw InvalidArgument("fourier_estimate: symbols must be positive on [k_min, k_max]");
      }
    }
  }
  Vector x0;
  if (start) {
    x0 = *start;
  } else if (family.kind == FamilyKind::PhysicsRescaled) {
    x0 = Vector::Constant(1, std::sqrt(k_min * k_max));
  } else {
    x0 = start_params(family, {symbols[0](k_min), symbols[1](k_min)}, {symbols[0](k_max), symbols[1](k_max)},
                      k_max * k_max);
  }
  auto objective = [&](const Vector& theta) {
    return fourier_factor(symbols, family, theta.array().exp().matrix(), k_min, k_max, n_samples);
  };
  const auto r = nelder_mead(objective, x0.array().log().matrix(), nm);
  return {r.point.array().exp().matrix(), r.value};
}

} // namespace osmprobe
