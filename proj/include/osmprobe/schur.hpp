#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "assembly.hpp"

namespace osmprobe {

/// Counts subdomain solves. Shared by the operators of one problem; atomic so
/// concurrent applications stay exact.
class SolveCounter {
public:
  void add(long n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }
  long value() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

private:
  std::atomic<long> count_{0};
};

/// Largest interface size for which dense materialization is allowed.
inline constexpr int kMaterializeGuard = 2000;

/// Matrix-free discrete Steklov-Poincare operator of one subdomain,
/// Sigma_i = A_GG^i - A_GI^i (A_II^i)^-1 A_IG^i.
class SchurOperator {
public:
  SchurOperator(std::shared_ptr<const SubdomainOperator> sub, std::shared_ptr<SolveCounter> counter)
      : sub_(std::move(sub)), counter_(std::move(counter)) {}

  int side() const { return sub_->side(); }
  int dim() const { return sub_->interface_size(); }
  const SubdomainOperator& subdomain() const { return *sub_; }
  SolveCounter& counter() const { return *counter_; }

  /// Sigma_i x; one interior (Dirichlet) solve.
  Vector apply(const Vector& x) const {
    check_dim(x, "schur_apply");
    const auto& b = sub_->blocks();
    const Vector w = sub_->interior().solve(b.a_ig * x);
    counter_->add();
    return b.a_gg * x - b.a_gi * w;
  }

  /// Sigma_i^-1 y through one Neumann solve with data (0, y).
  Vector apply_inverse(const Vector& y) const {
    check_dim(y, "schur_apply_inverse");
    const int ni = sub_->interior_size();
    Vector rhs = Vector::Zero(ni + dim());
    rhs.tail(dim()) = y;
    const Vector u = sub_->neumann().solve(rhs);
    counter_->add();
    return u.tail(dim());
  }

  /// Dense Sigma_i, column j = apply(e_j). Costs dim() solves.
  DenseMatrix materialize() const {
    if (dim() > kMaterializeGuard) {
      throw InvalidArgument("materialize: interface size " + std::to_string(dim()) + " exceeds guard " +
                            std::to_string(kMaterializeGuard));
    }
    DenseMatrix m(dim(), dim());
    for (int j = 0; j < dim(); ++j) {
      m.col(j) = apply(Vector::Unit(dim(), j));
    }
    return m;
  }

private:
  void check_dim(const Vector& x, const char* what) const {
    if (x.size() != dim()) {
      throw InvalidArgument(std::string(what) + ": vector has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(dim()));
    }
  }

  std::shared_ptr<const SubdomainOperator> sub_;
  std::shared_ptr<SolveCounter> counter_;
};

inline Vector schur_apply(const SchurOperator& op, const Vector& x) { return op.apply(x); }
inline Vector schur_apply_inverse(const SchurOperator& op, const Vector& y) { return op.apply_inverse(y); }
inline DenseMatrix materialize(const SchurOperator& op) { return op.materialize(); }

/// Sigma_1 + Sigma_2 and the Neumann data mu = mu_1 + mu_2 of the interface equation
/// (Sigma_1 + Sigma_2) u_G = mu.
class InterfaceProblem {
public:
  InterfaceProblem(SchurOperator s1, SchurOperator s2, Vector mu1, Vector mu2)
      : sigma_{std::move(s1), std::move(s2)}, mu_side_{std::move(mu1), std::move(mu2)},
        dense_(std::make_shared<DenseCache>()) {}

  const SchurOperator& sigma(int side) const { return sigma_.at(static_cast<std::size_t>(side - 1)); }
  const Vector& mu_side(int side) const { return mu_side_.at(static_cast<std::size_t>(side - 1)); }
  Vector mu() const { return mu_side_[0] + mu_side_[1]; }
  int dim() const { return sigma_[0].dim(); }
  SolveCounter& counter() const { return sigma_[0].counter(); }

  /// Materialized Sigma_side, computed once and shared by copies of this problem.
  const DenseMatrix& dense(int side) const {
    std::call_once(dense_->once, [this] {
      dense_->m[0] = sigma_[0].materialize();
      dense_->m[1] = sigma_[1].materialize();
    });
    return dense_->m.at(static_cast<std::size_t>(side - 1));
  }

private:
  struct DenseCache {
    std::once_flag once;
    std::array<DenseMatrix, 2> m;
  };
  std::array<SchurOperator, 2> sigma_;
  std::array<Vector, 2> mu_side_;
  std::shared_ptr<DenseCache> dense_;
};

/// Builds Sigma_1, Sigma_2 and mu_i = f_G^i - A_GI^i (A_II^i)^-1 f_i (two counted solves).
inline InterfaceProblem neumann_data(const BlockSystem& sys, std::shared_ptr<SolveCounter> counter = nullptr) {
  if (!counter) {
    counter = std::make_shared<SolveCounter>();
  }
  auto sub1 = std::make_shared<const SubdomainOperator>(sys, 1);
  auto sub2 = std::make_shared<const SubdomainOperator>(sys, 2);
  std::array<Vector, 2> mu;
  for (const auto& sub : {sub1, sub2}) {
    const auto& b = sub->blocks();
    const Vector w = sub->interior().solve(b.f_i);
    counter->add();
    mu[static_cast<std::size_t>(sub->side() - 1)] = b.f_g - b.a_gi * w;
  }
  return InterfaceProblem(SchurOperator(sub1, counter), SchurOperator(sub2, counter), mu[0], mu[1]);
}

} // namespace osmprobe
