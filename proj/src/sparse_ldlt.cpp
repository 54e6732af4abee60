#include "nhpd/sparse_ldlt.hpp"

#include <algorithm>

#include "nhpd/errors.hpp"

namespace nhpd {

void SparseLdlt::analyze(const Matrix& a) {
  if (a.rows() != a.cols() || !a.isCompressed()) throw SolverError("LDL analysis needs a square compressed matrix");
  n_ = static_cast<int>(a.rows());
  const int* ap = a.outerIndexPtr();
  const int* ai = a.innerIndexPtr();
  parent_.assign(n_, -1);
  std::vector<int> flag(n_, -1);
  std::vector<std::int64_t> count(n_, 0);
  // Elimination tree and column counts.
  for (int k = 0; k < n_; ++k) {
    flag[k] = k;
    for (int p = ap[k]; p < ap[k + 1]; ++p) {
      for (int i = ai[p]; i < k && flag[i] != k; i = parent_[i]) {
        if (parent_[i] == -1) parent_[i] = k;
        ++count[i];
        flag[i] = k;
      }
    }
  }
  lp_.assign(n_ + 1, 0);
  for (int k = 0; k < n_; ++k) lp_[k + 1] = lp_[k] + count[k];
  li_.assign(static_cast<std::size_t>(lp_[n_]), 0);
  lx_.assign(li_.size(), 0.0);
  // Row reaches in topological order with their storage slots.
  rp_.assign(n_ + 1, 0);
  row_col_.resize(li_.size());
  row_slot_.resize(li_.size());
  std::vector<std::int64_t> fill(lp_.begin(), lp_.end() - 1);
  std::vector<int> stack(n_);
  std::fill(flag.begin(), flag.end(), -1);
  std::int64_t e = 0;
  for (int k = 0; k < n_; ++k) {
    flag[k] = k;
    int top = n_;
    for (int p = ap[k]; p < ap[k + 1]; ++p) {
      int len = 0;
      for (int i = ai[p]; i < k && flag[i] != k; i = parent_[i]) {
        stack[len++] = i;
        flag[i] = k;
      }
      while (len > 0) stack[--top] = stack[--len];
    }
    for (int t = top; t < n_; ++t) {
      const int j = stack[t];
      const std::int64_t slot = fill[j]++;
      li_[static_cast<std::size_t>(slot)] = k;
      row_col_[static_cast<std::size_t>(e)] = j;
      row_slot_[static_cast<std::size_t>(e)] = slot;
      ++e;
    }
    rp_[k + 1] = e;
  }
  d_.assign(n_, 0.0);
  y_.assign(n_, 0.0);
  mark_.assign(n_, 0);
}

bool SparseLdlt::factor_row(const Matrix& a, int k) {
  const int* ap = a.outerIndexPtr();
  const int* ai = a.innerIndexPtr();
  const double* ax = a.valuePtr();
  double diag = 0.0;
  for (int p = ap[k]; p < ap[k + 1]; ++p) {
    const int i = ai[p];
    if (i < k) y_[i] += ax[p];
    else if (i == k) diag += ax[p];
  }
  double d = diag;
  for (std::int64_t e = rp_[k]; e < rp_[k + 1]; ++e) {
    const int j = row_col_[static_cast<std::size_t>(e)];
    const std::int64_t slot = row_slot_[static_cast<std::size_t>(e)];
    const double yj = y_[j];
    y_[j] = 0.0;
    for (std::int64_t p = lp_[j]; p < slot; ++p) y_[li_[static_cast<std::size_t>(p)]] -= lx_[static_cast<std::size_t>(p)] * yj;
    const double lkj = yj / d_[j];
    d -= lkj * yj;
    lx_[static_cast<std::size_t>(slot)] = lkj;
  }
  d_[k] = d;
  return d > pivot_tolerance * std::abs(diag) && d > 0.0;
}

std::optional<int> SparseLdlt::factorize(const Matrix& a) {
  if (a.rows() != n_) throw SolverError("LDL factorization called with a matrix of a different size");
  std::optional<int> bad;
  for (int k = 0; k < n_; ++k)
    if (!factor_row(a, k) && !bad) bad = k;
  last_rows_ = static_cast<std::size_t>(n_);
  return bad;
}

std::optional<int> SparseLdlt::refactorize(const Matrix& a, std::span<const int> changed) {
  if (a.rows() != n_) throw SolverError("LDL factorization called with a matrix of a different size");
  std::vector<int> rows;
  for (int s : changed) {
    for (int i = s; i != -1 && !mark_[i]; i = parent_[i]) {
      mark_[i] = 1;
      rows.push_back(i);
    }
  }
  std::sort(rows.begin(), rows.end());
  std::optional<int> bad;
  for (int k : rows) {
    mark_[k] = 0;
    if (!factor_row(a, k) && !bad) bad = k;
  }
  last_rows_ = rows.size();
  if (bad) return bad;
  // Rows outside the reach keep their pivots; report any earlier failure.
  return std::nullopt;
}

void SparseLdlt::solve(Eigen::Ref<Eigen::VectorXd> x) const {
  for (int j = 0; j < n_; ++j) {
    const double xj = x[j];
    for (std::int64_t p = lp_[j]; p < lp_[j + 1]; ++p) x[li_[static_cast<std::size_t>(p)]] -= lx_[static_cast<std::size_t>(p)] * xj;
  }
  for (int j = 0; j < n_; ++j) x[j] /= d_[j];
  for (int j = n_ - 1; j >= 0; --j) {
    double xj = x[j];
    for (std::int64_t p = lp_[j]; p < lp_[j + 1]; ++p) xj -= lx_[static_cast<std::size_t>(p)] * x[li_[static_cast<std::size_t>(p)]];
    x[j] = xj;
  }
}

}  // namespace nhpd
