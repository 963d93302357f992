// SPDX-License-Identifier: Apache-2.0
//
// CSR sparse matrices and named index sets. All assembled operators and
// their permutations live in this format; submatrix extraction realizes
// the block selections the preconditioners are built from.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsi {

struct IndexSet {
  std::vector<int> indices;  // sorted, unique
  std::string label;

  int size() const { return static_cast<int>(indices.size()); }
  bool contains(int i) const;
  // Throws std::invalid_argument on unsorted/duplicate/out-of-range entries.
  void validate(int parent_dim) const;
};

IndexSet make_index_set(std::vector<int> indices, std::string label);

struct Triplet {
  int row, col;
  double value;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(n_rows + 1, 0) {}

  static SparseMatrix identity(int n);
  // Duplicate entries are summed; columns are sorted within each row.
  static SparseMatrix from_triplets(int n_rows, int n_cols, const std::vector<Triplet>& entries);

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(col_indices_.size()); }

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // y = A x; deterministic sequential accumulation per row.
  void multiply(const double* x, double* y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;

  // y += A[:, j] * s for one column (used by the multiplicative sweeps via
  // the CSC mirror, see SparseCsc).
  double entry(int row, int col) const;  // 0 when not stored

  SparseMatrix transposed() const;

  // B[i][j] = A[row_perm[i]][col_at[j]] where col_at is the inverse of the
  // given column placement: new_col_of[old] gives the new position.
  SparseMatrix permuted(const std::vector<int>& row_from_new, const std::vector<int>& new_col_of_old) const;

  void check_invariants() const;  // throws std::logic_error on violation

 private:
  int n_rows_ = 0, n_cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;

  friend SparseMatrix extract_submatrix(const SparseMatrix&, const IndexSet&, const IndexSet&);
  friend class CsrBuilder;
};

// Column-major mirror used for incremental residual updates.
struct SparseCsc {
  int n_rows = 0, n_cols = 0;
  std::vector<int> col_offsets;
  std::vector<int> row_indices;
  std::vector<double> values;

  static SparseCsc from_csr(const SparseMatrix& a);
};

std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x);

SparseMatrix extract_submatrix(const SparseMatrix& a, const IndexSet& rows, const IndexSet& cols);

// Fixed-pattern CSR assembly: the sparsity is frozen once, then values are
// accumulated by direct slot lookup across repeated assemblies.
class CsrBuilder {
 public:
  CsrBuilder() = default;
  // rows_cols[i] must be the sorted unique column list of row i.
  void set_pattern(int n_rows, int n_cols, const std::vector<std::vector<int>>& rows_cols);
  void zero_values();
  void add(int row, int col, double v);
  int slot(int row, int col) const;  // -1 if not in pattern
  void add_slot(int s, double v) { matrix_.values_[s] += v; }
  const SparseMatrix& matrix() const { return matrix_; }
  SparseMatrix& matrix() { return matrix_; }

 private:
  SparseMatrix matrix_;
};

// Matrix Market coordinate format (real general, 1-based).
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
void write_matrix_market_file(const std::string& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market_file(const std::string& path);

}  // namespace fsi
