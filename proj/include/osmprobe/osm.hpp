#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "schur.hpp"
#include "spectral.hpp"

namespace osmprobe {

/// Dense iteration matrix (T2 + S2)^-1 (T2 - S1) (T1 + S1)^-1 (T1 - S2).
inline DenseMatrix iteration_matrix(const DenseMatrix& sigma1, const DenseMatrix& sigma2, const DenseMatrix& tm1,
                                    const DenseMatrix& tm2) {
  const Eigen::PartialPivLU<DenseMatrix> lu1(tm1 + sigma1);
  const Eigen::PartialPivLU<DenseMatrix> lu2(tm2 + sigma2);
  return lu2.solve((tm2 - sigma1) * lu1.solve(tm1 - sigma2));
}

/// Spectral radius of the iteration matrix built from materialized Sigma_i.
inline double iteration_spectral_radius(const InterfaceProblem& problem, const DenseMatrix& tm1,
                                        const DenseMatrix& tm2) {
  return spectral_radius_dense(iteration_matrix(problem.dense(1), problem.dense(2), tm1, tm2));
}

/// One ADI double sweep
///   (T1 + S1) l_half = (T1 - S2) l + mu,   (T2 + S2) l_next = (T2 - S1) l_half + mu.
///
/// Up to `dense_guard` interface nodes the half-step operators are materialized and
/// LU-factorized. Above it each half step is a Robin subdomain solve with the block
/// [A_II A_IG; A_GI A_GG^i + T_i], plus one Schur application for the right-hand side.
class AdiSweep {
public:
  AdiSweep(const InterfaceProblem& problem, const DenseMatrix& tm1, const DenseMatrix& tm2,
           int dense_guard = 400)
      : problem_(problem), tm_{tm1, tm2}, dense_(problem.dim() <= dense_guard) {
    const int n = problem.dim();
    for (const auto* t : {&tm1, &tm2}) {
      if (t->rows() != n || t->cols() != n) {
        throw InvalidArgument("adi_step: transmission matrix must be " + std::to_string(n) + "x" +
                              std::to_string(n));
      }
    }
    if (dense_) {
      for (int s = 0; s < 2; ++s) {
        lu_[s] = Eigen::PartialPivLU<DenseMatrix>(tm_[s] + problem.dense(s + 1));
        if (!(lu_[s].rcond() > 1e-14)) {
          throw SingularMatrix("adi_step: half-step operator T" + std::to_string(s + 1) + " + Sigma" +
                               std::to_string(s + 1) + " is singular");
        }
        rhs_[s] = tm_[s] - problem.dense(2 - s);
      }
    } else {
      for (int s = 0; s < 2; ++s) {
        const auto& sub = problem.sigma(s + 1).subdomain();
        const SparseMatrix t = tm_[s].sparseView(0.0, 0.0).cast<double>();
        SparseMatrix block = sub.blocks().a_gg + SparseMatrix(t);
        try {
          robin_[s] = std::make_shared<Factorization>(sub.neumann_matrix(block));
        } catch (const SingularMatrix&) {
          throw SingularMatrix("adi_step: Robin subdomain operator " + std::to_string(s + 1) + " is singular");
        }
      }
    }
  }

  bool dense() const { return dense_; }

  /// Half step on `side` (1 or 2): solves (T_s + S_s) out = (T_s - S_other) in + mu.
  Vector half_step(int side, const Vector& in, const Vector& mu) const {
    const int s = side - 1;
    if (dense_) {
      return lu_[s].solve(rhs_[s] * in + mu);
    }
    const SchurOperator& other = problem_.sigma(2 - s);
    const Vector g = tm_[s] * in - other.apply(in) + mu;
    const auto& sub = problem_.sigma(side).subdomain();
    Vector rhs = Vector::Zero(sub.interior_size() + problem_.dim());
    rhs.tail(problem_.dim()) = g;
    const Vector u = robin_[s]->solve(rhs);
    problem_.counter().add();
    return u.tail(problem_.dim());
  }

  Vector step(const Vector& lam, const Vector& mu) const { return half_step(2, half_step(1, lam, mu), mu); }

private:
  const InterfaceProblem& problem_;
  std::array<DenseMatrix, 2> tm_;
  bool dense_;
  std::array<Eigen::PartialPivLU<DenseMatrix>, 2> lu_;
  std::array<DenseMatrix, 2> rhs_;
  std::array<std::shared_ptr<const Factorization>, 2> robin_;
};

inline Vector adi_step(const InterfaceProblem& problem, const DenseMatrix& tm1, const DenseMatrix& tm2,
                       const Vector& lam) {
  return AdiSweep(problem, tm1, tm2).step(lam, problem.mu());
}

/// T(T1, T2) v: one double sweep with mu = 0.
inline Vector iteration_operator_apply(const InterfaceProblem& problem, const DenseMatrix& tm1,
                                       const DenseMatrix& tm2, const Vector& v) {
  return AdiSweep(problem, tm1, tm2).step(v, Vector::Zero(problem.dim()));
}

enum class StopMode { Error, Residual };

struct OsmOptions {
  double tol = 1e-8;
  int max_it = 200;
  StopMode mode = StopMode::Error;
  /// Exact interface solution for error mode; computed from the materialized
  /// interface operator when absent.
  std::optional<Vector> reference;
  int dense_guard = 400;
};

struct IterationReport {
  int iterations = 0;
  /// Relative error (or residual) norms; entry 0 is the initial guess.
  std::vector<double> error_history;
  bool converged = false;
  bool diverged = false;
  /// Geometric mean of the last five error-reduction ratios.
  double rho_estimate = 0.0;
  long solve_count_delta = 0;
};

struct OsmResult {
  IterationReport report;
  Vector lambda;
};

inline OsmResult run_osm(const InterfaceProblem& problem, const DenseMatrix& tm1, const DenseMatrix& tm2,
                         const Vector& lam0, const OsmOptions& options = {}) {
  if (!(options.tol > 0.0)) {
    throw InvalidArgument("run_osm: tol must be positive");
  }
  if (lam0.size() != problem.dim()) {
    throw InvalidArgument("run_osm: initial guess has wrong length");
  }
  const long mark = problem.counter().value();
  const AdiSweep sweep(problem, tm1, tm2, options.dense_guard);
  const Vector mu = problem.mu();

  Vector reference;
  if (options.mode == StopMode::Error) {
    if (options.reference) {
      reference = *options.reference;
    } else {
      reference = (problem.dense(1) + problem.dense(2)).partialPivLu().solve(mu);
    }
  }
  const double ref_norm = options.mode == StopMode::Error ? reference.norm() : mu.norm();
  auto measure = [&](const Vector& lam) {
    double e;
    if (options.mode == StopMode::Error) {
      e = (lam - reference).norm();
    } else {
      e = (problem.sigma(1).apply(lam) + problem.sigma(2).apply(lam) - mu).norm();
    }
    return ref_norm > 0.0 ? e / ref_norm : e;
  };

  OsmResult out;
  IterationReport& rep = out.report;
  out.lambda = lam0;
  double err = measure(out.lambda);
  rep.error_history.push_back(err);
  double best = err;
  while (err > options.tol && rep.iterations < options.max_it) {
    out.lambda = sweep.step(out.lambda, mu);
    ++rep.iterations;
    err = measure(out.lambda);
    if (!std::isfinite(err)) {
      rep.diverged = true;
      break;
    }
    rep.error_history.push_back(err);
    best = std::min(best, err);
    if (err > 10.0 * best) {
      rep.diverged = true;
      break;
    }
  }
  rep.converged = !rep.diverged && err <= options.tol;

  const auto& h = rep.error_history;
  const int ratios = std::min<int>(5, static_cast<int>(h.size()) - 1);
  if (ratios > 0) {
    double sum = 0.0;
    bool zero = false;
    for (std::size_t i = h.size() - static_cast<std::size_t>(ratios); i < h.size(); ++i) {
      if (h[i] == 0.0 || h[i - 1] == 0.0) {
        zero = true;
        break;
      }
      sum += std::log(h[i] / h[i - 1]);
    }
    rep.rho_estimate = zero ? 0.0 : std::exp(sum / ratios);
  }
  rep.solve_count_delta = problem.counter().value() - mark;
  return out;
}

/// Interior values u_i = (A_II^i)^-1 (f_i - A_IG^i lambda), returned as a nodal field.
inline Vector recover_interior(const BlockSystem& sys, const InterfaceProblem& problem, const Vector& lambda) {
  if (lambda.size() != sys.interface_size()) {
    throw InvalidArgument("recover_interior: interface vector has wrong length");
  }
  Vector field = Vector::Zero(static_cast<Eigen::Index>(sys.node_count));
  for (int s = 1; s <= 2; ++s) {
    const auto& sub = problem.sigma(s).subdomain();
    const auto& b = sys.on(s);
    const Vector u = sub.interior().solve(b.f_i - b.a_ig * lambda);
    problem.counter().add();
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      field[b.interior_nodes[static_cast<std::size_t>(k)]] = u[k];
    }
  }
  for (int k = 0; k < sys.interface_size(); ++k) {
    field[sys.interface_nodes[static_cast<std::size_t>(k)]] = lambda[k];
  }
  return field;
}

inline Vector recover_interior(const BlockSystem& sys, const Vector& lambda) {
  return recover_interior(sys, neumann_data(sys), lambda);
}

} // namespace osmprobe
