#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace osmprobe {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Compressed row storage: row offsets, strictly increasing column indices per row, values.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Builds a compressed matrix from (row, col, value) triplets; duplicates are summed.
inline SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& entries) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

inline SparseMatrix sparse_identity(int n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  m.makeCompressed();
  return m;
}

/// Writes a matrix as coordinate triplets, one "row col value" line per stored entry.
inline void write_triplets(std::ostream& os, const SparseMatrix& a) {
  char buf[96];
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value());
      os << buf;
    }
  }
}

/// Reusable sparse LU factorization of a square matrix.
///
/// The factorization is immutable after construction; solve() is const and
/// may be called with any number of right-hand sides.
class Factorization {
public:
  explicit Factorization(const SparseMatrix& a) : n_(static_cast<int>(a.rows())) {
    if (a.rows() != a.cols()) {
      throw InvalidArgument("factorize: matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
    }
    if (n_ == 0) {
      return;
    }
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> col = a;
    col.makeCompressed();
    lu_ = std::make_shared<Solver>();
    lu_->analyzePattern(col);
    lu_->factorize(col);
    if (lu_->info() != Eigen::Success) {
      throw SingularMatrix("factorize: matrix is singular (" + lu_->lastErrorMessage() + ")");
    }
    // Exactly zero pivots are caught above; a probe solve catches near-singular input.
    double scale = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
        scale = std::max(scale, std::abs(it.value()));
      }
    }
    const Vector probe = Vector::LinSpaced(n_, 1.0, 2.0);
    const Vector x = lu_->solve(probe);
    const double growth = x.cwiseAbs().maxCoeff() * scale / probe.cwiseAbs().maxCoeff();
    if (!x.allFinite() || !(growth < 1e14)) {
      throw SingularMatrix("factorize: matrix is numerically singular (growth " +
                           std::to_string(growth) + ")");
    }
  }

  int size() const { return n_; }

  Vector solve(const Vector& b) const {
    if (b.size() != n_) {
      throw InvalidArgument("solve: right-hand side has length " + std::to_string(b.size()) +
                            ", expected " + std::to_string(n_));
    }
    if (n_ == 0) {
      return Vector();
    }
    return lu_->solve(b);
  }

private:
  using Solver = Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>,
                                 Eigen::COLAMDOrdering<int>>;
  int n_ = 0;
  std::shared_ptr<Solver> lu_;
};

inline Factorization factorize(const SparseMatrix& a) { return Factorization(a); }

} // namespace osmprobe
