#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nelder_mead.hpp"
#include "schur.hpp"
#include "transmission.hpp"

namespace osmprobe {

/// Which end of the spectrum a seed targets during enrichment.
enum class ProbeTag { None, Low, High };

struct Probe {
  Vector x;
  ProbeTag tag = ProbeTag::None;
  double frequency = 0.0;
};

/// Interface spacing for an interface with n_h nodes on the unit parameter interval.
inline double interface_spacing(int n_h) { return 1.0 / (n_h + 1); }

/// Unit-norm discretizations of sin(k pi t_j), t_j = j / (n_h + 1), bottom to top.
/// The lowest frequency is tagged Low and the highest High (a single frequency is Low).
inline std::vector<Probe> sine_probes(int n_h, const std::vector<double>& frequencies) {
  if (frequencies.empty()) {
    throw InvalidArgument("sine_probes: empty frequency list");
  }
  for (double k : frequencies) {
    if (!(k > 0.0 && k <= n_h)) {
      throw InvalidArgument("sine_probes: frequency " + std::to_string(k) + " outside (0, " + std::to_string(n_h) +
                            "]");
    }
  }
  const auto [lo, hi] = std::minmax_element(frequencies.begin(), frequencies.end());
  std::vector<Probe> out;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double k = frequencies[i];
    Vector x(n_h);
    for (int j = 0; j < n_h; ++j) {
      x[j] = std::sin(k * std::numbers::pi * (j + 1) * interface_spacing(n_h));
    }
    x.normalize();
    ProbeTag tag = ProbeTag::None;
    if (frequencies.begin() + static_cast<std::ptrdiff_t>(i) == lo) {
      tag = ProbeTag::Low;
    } else if (frequencies.begin() + static_cast<std::ptrdiff_t>(i) == hi) {
      tag = ProbeTag::High;
    }
    out.push_back({x, tag, k});
  }
  return out;
}

/// Frequencies {1, sqrt(n_h), n_h}.
inline std::vector<double> default_frequencies(int n_h) { return {1.0, std::sqrt(static_cast<double>(n_h)), 1.0 * n_h}; }

/// Frequencies {1, 2, sqrt(n_h), n_h}: adds the first even mode.
inline std::vector<double> even_mode_frequencies(int n_h) {
  return {1.0, 2.0, std::sqrt(static_cast<double>(n_h)), 1.0 * n_h};
}

inline std::vector<Vector> probe_vectors(const std::vector<Probe>& probes) {
  std::vector<Vector> v;
  v.reserve(probes.size());
  for (const auto& p : probes) {
    v.push_back(p.x);
  }
  return v;
}

/// Drops every vector whose |dot| with an earlier kept vector exceeds `threshold`.
inline std::vector<Vector> deduplicate(const std::vector<Vector>& vectors, double threshold = 0.999) {
  std::vector<Vector> kept;
  for (const auto& v : vectors) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Vector& k) {
      return std::abs(k.dot(v)) > threshold;
    });
    if (!dup) {
      kept.push_back(v);
    }
  }
  return kept;
}

/// Power-method enrichment of the probe set. For each side and each tagged seed, N
/// inverse iterations (Low) or N power iterations (High) on Sigma_i; one solve per
/// iteration. Side-1 vectors come first, then side-2 vectors, then untagged seeds.
inline std::vector<Vector> power_enrich(const SchurOperator& sigma1, const SchurOperator& sigma2,
                                        const std::vector<Probe>& seeds, int iterations, bool dedupe = true) {
  if (iterations < 1) {
    throw InvalidArgument("power_enrich: need at least one iteration");
  }
  std::vector<Vector> out;
  for (const SchurOperator* sigma : {&sigma1, &sigma2}) {
    for (const auto& seed : seeds) {
      if (seed.tag == ProbeTag::None) {
        continue;
      }
      Vector x = seed.x.normalized();
      for (int it = 0; it < iterations; ++it) {
        Vector y = seed.tag == ProbeTag::Low ? sigma->apply_inverse(x) : sigma->apply(x);
        const double n = y.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
          throw NumericalFailure("power_enrich: breakdown, |Sigma x| = " + std::to_string(n) + " on side " +
                                 std::to_string(sigma->side()));
        }
        x = y / n;
      }
      out.push_back(x);
    }
  }
  for (const auto& seed : seeds) {
    if (seed.tag == ProbeTag::None) {
      out.push_back(seed.x.normalized());
    }
  }
  return dedupe ? deduplicate(out) : out;
}

namespace detail {

inline void check_probe_sets(const std::vector<Vector>& x, const std::vector<Vector>& y1,
                             const std::vector<Vector>& y2) {
  if (x.empty()) {
    throw InvalidArgument("probing: empty probe set");
  }
  if (y1.size() != x.size() || y2.size() != x.size()) {
    throw InvalidArgument("probing: responses and probes differ in count");
  }
}

} // namespace detail

/// Fits the family to the pairs (x_k, y_k) by minimizing max_k |y_k - S x_k|_2, with S
/// the family's side-1 matrix. The start point is the geometric mean of the extreme
/// Rayleigh quotients.
inline Vector naive_probe(const std::vector<Vector>& vectors, const std::vector<Vector>& targets,
                          const TransmissionFamily& family, const NelderMeadOptions& nm = {}) {
  if (vectors.empty() || targets.size() != vectors.size()) {
    throw InvalidArgument("naive_probe: need matching, non-empty probe and target sets");
  }
  const int n_h = static_cast<int>(vectors.front().size());
  const double h = interface_spacing(n_h);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const double rq = vectors[k].dot(targets[k]) / vectors[k].squaredNorm();
    lo = std::min(lo, std::abs(rq));
    hi = std::max(hi, std::abs(rq));
  }
  lo = std::max(lo, 1e-12 * std::max(hi, 1.0));
  hi = std::max(hi, lo);
  const Vector x0 = start_params(family, {lo, lo}, {hi, hi}, 4.0 / (h * h));
  auto objective = [&](const Vector& theta) {
    const DenseMatrix s = realize(family, theta.array().exp().matrix(), 1, n_h, h);
    double worst = 0.0;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      worst = std::max(worst, (targets[k] - s * vectors[k]).norm());
    }
    return worst;
  };
  return nelder_mead(objective, x0.array().log().matrix(), nm).point.array().exp().matrix();
}

/// max_k (|S2 x - T1 x| / |S1 x + T1 x|) (|S1 x - T2 x| / |S2 x + T2 x|) with the
/// responses y^i_k = S_i x_k precomputed; performs no subdomain solves. A vanishing
/// denominator makes the value +inf.
inline double objective_opt1(const std::vector<Vector>& vectors, const std::vector<Vector>& responses1,
                             const std::vector<Vector>& responses2, const DenseMatrix& tm1,
                             const DenseMatrix& tm2) {
  detail::check_probe_sets(vectors, responses1, responses2);
  double worst = 0.0;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const Vector t1 = tm1 * vectors[k];
    const Vector t2 = tm2 * vectors[k];
    const double d1 = (responses1[k] + t1).norm();
    const double d2 = (responses2[k] + t2).norm();
    if (d1 == 0.0 || d2 == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, (responses2[k] - t1).norm() / d1 * ((responses1[k] - t2).norm() / d2));
  }
  return worst;
}

inline double objective_opt1(const std::vector<Vector>& vectors, const std::vector<Vector>& responses1,
                             const std::vector<Vector>& responses2, const TransmissionFamily& family,
                             const Vector& params) {
  detail::check_probe_sets(vectors, responses1, responses2);
  const int n_h = static_cast<int>(vectors.front().size());
  const double h = interface_spacing(n_h);
  return objective_opt1(vectors, responses1, responses2, realize(family, params, 1, n_h, h),
                        realize(family, params, 2, n_h, h));
}

struct TraceEntry {
  Vector params;
  double objective = 0.0;
  bool zero_denominator = false;
};

struct ProbeConfig {
  std::vector<Probe> seeds;
  /// Power-method iterations N of the optional enrichment step (0 disables it).
  int power_iterations = 0;
  TransmissionFamily family;
  bool dedupe = true;
  /// Optimizer start in natural parameters; Rayleigh-quotient heuristic when absent.
  std::optional<Vector> start;
  NelderMeadOptions optimizer{0.5, 1e-7, 4000, true};
};

struct ProbeSession {
  std::vector<Vector> vectors;
  std::vector<Vector> responses1;
  std::vector<Vector> responses2;
  TransmissionFamily family;
  Vector start;
  Vector params;
  double objective = 0.0;
  long solves_step1 = 0;
  long solves_step2 = 0;
  long solves_step3 = 0;
  std::vector<TraceEntry> trace;
  DenseMatrix tm1;
  DenseMatrix tm2;

  long solve_count() const { return solves_step1 + solves_step2 + solves_step3; }
};

/// Probing algorithm: optional enrichment, responses y^i_k = Sigma_i x_k,
/// min-max optimization of objective_opt1 over the family, realized matrices.
inline ProbeSession run_algorithm1(const InterfaceProblem& problem, const ProbeConfig& config) {
  if (config.seeds.empty()) {
    throw InvalidArgument("run_algorithm1: empty probe set");
  }
  if (config.power_iterations < 0) {
    throw InvalidArgument("run_algorithm1: power_iterations must be >= 0");
  }
  ProbeSession session;
  session.family = config.family;
  SolveCounter& counter = problem.counter();
  const int n_h = problem.dim();
  const double h = interface_spacing(n_h);

  long mark = counter.value();
  if (config.power_iterations >= 1) {
    session.vectors =
        power_enrich(problem.sigma(1), problem.sigma(2), config.seeds, config.power_iterations, config.dedupe);
  } else {
    session.vectors = config.dedupe ? deduplicate(probe_vectors(config.seeds)) : probe_vectors(config.seeds);
    for (auto& v : session.vectors) {
      v.normalize();
    }
  }
  session.solves_step1 = counter.value() - mark;

  mark = counter.value();
  for (const auto& x : session.vectors) {
    session.responses1.push_back(problem.sigma(1).apply(x));
    session.responses2.push_back(problem.sigma(2).apply(x));
  }
  session.solves_step2 = counter.value() - mark;

  if (config.start) {
    session.start = *config.start;
  } else {
    std::array<double, 2> lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    std::array<double, 2> hi{0.0, 0.0};
    for (std::size_t k = 0; k < session.vectors.size(); ++k) {
      const double rq[2] = {session.vectors[k].dot(session.responses1[k]),
                            session.vectors[k].dot(session.responses2[k])};
      for (int s = 0; s < 2; ++s) {
        lo[s] = std::min(lo[s], std::abs(rq[s]));
        hi[s] = std::max(hi[s], std::abs(rq[s]));
      }
    }
    session.start = start_params(config.family, lo, hi, 4.0 / (h * h));
  }

  mark = counter.value();
  auto objective = [&](const Vector& theta) {
    const Vector p = theta.array().exp().matrix();
    const double v = objective_opt1(session.vectors, session.responses1, session.responses2, config.family, p);
    session.trace.push_back({p, v, std::isinf(v)});
    return v;
  };
  const auto result = nelder_mead(objective, session.start.array().log().matrix(), config.optimizer);
  session.solves_step3 = counter.value() - mark;

  session.params = result.point.array().exp().matrix();
  session.objective = result.value;
  session.tm1 = realize(config.family, session.params, 1, n_h, h);
  session.tm2 = realize(config.family, session.params, 2, n_h, h);
  return session;
}

} // namespace osmprobe
