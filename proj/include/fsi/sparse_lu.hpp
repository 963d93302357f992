// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fsi/sparse.hpp"

namespace fsi {

// Reverse Cuthill-McKee ordering on the symmetrized pattern of a;
// returns perm with perm[new] = old.
std::vector<int> rcm_ordering(const SparseMatrix& a);

// Sparse LU with partial pivoting (left-looking, Gilbert-Peierls), with a
// symmetric RCM pre-ordering to limit fill and row/column equilibration to
// tame the wide entry scales of the monolithic systems. Serves as the
// coarse multigrid solver and as the direct baseline solver.
class SparseLu {
 public:
  explicit SparseLu(const SparseMatrix& a, bool use_rcm = true, std::string label = "direct");

  int size() const { return n_; }
  long long fill() const;

  void solve(const double* b, double* x) const;
  std::vector<double> solve(const std::vector<double>& b) const;

 private:
  int n_ = 0;
  std::string label_;
  std::vector<double> row_scale_, col_scale_;  // equilibration factors
  std::vector<int> fill_perm_;     // fill_perm_[new] = old (RCM, identity if disabled)
  std::vector<int> pivot_of_row_;  // rcm-space row -> pivot position
  // L strictly lower (unit diagonal implicit), U upper with diagonal; both
  // CSC in pivot-order coordinates.
  std::vector<int> l_offsets_, l_rows_;
  std::vector<double> l_values_;
  std::vector<int> u_offsets_, u_rows_;
  std::vector<double> u_values_;
};

// One-shot direct solve.
std::vector<double> direct_solve(const SparseMatrix& a, const std::vector<double>& b);

}  // namespace fsi
