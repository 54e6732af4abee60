#pragma once

// Up-looking sparse LDL^T for symmetric positive-definite matrices given in
// their final elimination order. Each row of L is computed by a sparse
// triangular solve over its elimination-tree reach; the reach, its visiting
// order and the storage slot of every entry are fixed at analysis time, so
// recomputing a subset of rows replays exactly the same operations as a
// full factorization.
//
// After values change in a set of rows/columns, only those rows and their
// elimination-tree ancestors differ; refactorize() recomputes just those and
// the result is bit-identical to factorize().

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nhpd {

class SparseLdlt {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  /// Symbolic analysis of a compressed matrix holding the full symmetric
  /// pattern (both triangles).
  void analyze(const Matrix& a);

  /// Numeric factorization. Returns the first row whose pivot is not
  /// positive (relative to `pivot_tolerance` times its diagonal entry).
  std::optional<int> factorize(const Matrix& a);

  /// Recomputes the rows reachable from `changed` in the elimination tree.
  std::optional<int> refactorize(const Matrix& a, std::span<const int> changed);

  /// Solves L D L^T x = b in place.
  void solve(Eigen::Ref<Eigen::VectorXd> x) const;

  int size() const noexcept { return n_; }
  std::size_t factor_nonzeros() const noexcept { return li_.size(); }
  std::size_t last_rows_recomputed() const noexcept { return last_rows_; }
  const std::vector<double>& pivots() const noexcept { return d_; }

  double pivot_tolerance = 1e-10;

 private:
  bool factor_row(const Matrix& a, int k);

  int n_ = 0;
  std::vector<int> parent_;
  std::vector<std::int64_t> lp_;     // column starts of L
  std::vector<int> li_;              // row indices of L, increasing within a column
  std::vector<double> lx_;
  std::vector<double> d_;
  std::vector<std::int64_t> rp_;     // row starts into row_col_/row_slot_
  std::vector<int> row_col_;         // columns of row k in visiting order
  std::vector<std::int64_t> row_slot_;
  std::vector<double> y_;            // dense workspace, all zero between rows
  std::vector<int> mark_;
  std::size_t last_rows_ = 0;
};

}  // namespace nhpd
