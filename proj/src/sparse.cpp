// SPDX-License-Identifier: Apache-2.0

#include "fsi/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsi {

bool IndexSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

void IndexSet::validate(int parent_dim) const {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= parent_dim)
      throw std::invalid_argument("index set '" + label + "': index out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw std::invalid_argument("index set '" + label + "': not sorted/unique");
  }
}

IndexSet make_index_set(std::vector<int> indices, std::string label) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return IndexSet{std::move(indices), std::move(label)};
}

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix a(n, n);
  a.col_indices_.resize(n);
  a.values_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    a.row_offsets_[i + 1] = i + 1;
    a.col_indices_[i] = i;
  }
  return a;
}

SparseMatrix SparseMatrix::from_triplets(int n_rows, int n_cols, const std::vector<Triplet>& entries) {
  std::vector<std::vector<std::pair<int, double>>> rows(n_rows);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::invalid_argument("triplet out of range");
    rows[t.row].emplace_back(t.col, t.value);
  }
  SparseMatrix a(n_rows, n_cols);
  for (int i = 0; i < n_rows; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    int last = -1;
    for (const auto& [c, v] : r) {
      if (c == last) {
        a.values_.back() += v;
      } else {
        a.col_indices_.push_back(c);
        a.values_.push_back(v);
        last = c;
      }
    }
    a.row_offsets_[i + 1] = static_cast<int>(a.col_indices_.size());
  }
  return a;
}

void SparseMatrix::multiply(const double* x, double* y) const {
  for (int i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[col_indices_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_cols_) throw std::invalid_argument("spmv: dimension mismatch");
  std::vector<double> y(n_rows_);
  multiply(x.data(), y.data());
  return y;
}

double SparseMatrix::entry(int row, int col) const {
  const int b = row_offsets_[row], e = row_offsets_[row + 1];
  auto it = std::lower_bound(col_indices_.begin() + b, col_indices_.begin() + e, col);
  if (it != col_indices_.begin() + e && *it == col) return values_[it - col_indices_.begin()];
  return 0.0;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t(n_cols_, n_rows_);
  std::vector<int> count(n_cols_, 0);
  for (int c : col_indices_) ++count[c];
  t.row_offsets_.assign(n_cols_ + 1, 0);
  for (int i = 0; i < n_cols_; ++i) t.row_offsets_[i + 1] = t.row_offsets_[i] + count[i];
  t.col_indices_.resize(col_indices_.size());
  t.values_.resize(values_.size());
  std::vector<int> next(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
  for (int i = 0; i < n_rows_; ++i) {
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const int pos = next[col_indices_[k]]++;
      t.col_indices_[pos] = i;
      t.values_[pos] = values_[k];
    }
  }
  return t;  // columns sorted: source rows visited in ascending order
}

SparseMatrix SparseMatrix::permuted(const std::vector<int>& row_from_new,
                                    const std::vector<int>& new_col_of_old) const {
  SparseMatrix b(n_rows_, n_cols_);
  b.col_indices_.reserve(col_indices_.size());
  b.values_.reserve(values_.size());
  std::vector<std::pair<int, double>> tmp;
  for (int i = 0; i < n_rows_; ++i) {
    const int src = row_from_new[i];
    tmp.clear();
    for (int k = row_offsets_[src]; k < row_offsets_[src + 1]; ++k)
      tmp.emplace_back(new_col_of_old[col_indices_[k]], values_[k]);
    std::sort(tmp.begin(), tmp.end());
    for (const auto& [c, v] : tmp) {
      b.col_indices_.push_back(c);
      b.values_.push_back(v);
    }
    b.row_offsets_[i + 1] = static_cast<int>(b.col_indices_.size());
  }
  return b;
}

void SparseMatrix::check_invariants() const {
  if (static_cast<int>(row_offsets_.size()) != n_rows_ + 1)
    throw std::logic_error("csr: row_offsets size");
  for (int i = 0; i < n_rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) throw std::logic_error("csr: offsets not nondecreasing");
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] < 0 || col_indices_[k] >= n_cols_) throw std::logic_error("csr: column range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw std::logic_error("csr: columns not strictly increasing");
      if (!std::isfinite(values_[k])) throw std::logic_error("csr: non-finite value");
    }
  }
}

SparseCsc SparseCsc::from_csr(const SparseMatrix& a) {
  SparseCsc c;
  c.n_rows = a.rows();
  c.n_cols = a.cols();
  std::vector<int> count(c.n_cols, 0);
  for (int k : a.col_indices()) ++count[k];
  c.col_offsets.assign(c.n_cols + 1, 0);
  for (int j = 0; j < c.n_cols; ++j) c.col_offsets[j + 1] = c.col_offsets[j] + count[j];
  c.row_indices.resize(a.nnz());
  c.values.resize(a.nnz());
  std::vector<int> next(c.col_offsets.begin(), c.col_offsets.end() - 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const int pos = next[a.col_indices()[k]]++;
      c.row_indices[pos] = i;
      c.values[pos] = a.values()[k];
    }
  }
  return c;
}

std::vector<double> spmv(const SparseMatrix& a, const std::vector<double>& x) {
  return a.multiply(x);
}

SparseMatrix extract_submatrix(const SparseMatrix& a, const IndexSet& rows, const IndexSet& cols) {
  rows.validate(a.rows());
  cols.validate(a.cols());
  std::vector<int> col_pos(a.cols(), -1);
  for (int j = 0; j < cols.size(); ++j) col_pos[cols.indices[j]] = j;
  SparseMatrix b(rows.size(), cols.size());
  for (int i = 0; i < rows.size(); ++i) {
    const int src = rows.indices[i];
    for (int k = a.row_offsets_[src]; k < a.row_offsets_[src + 1]; ++k) {
      const int p = col_pos[a.col_indices_[k]];
      if (p >= 0) {
        b.col_indices_.push_back(p);
        b.values_.push_back(a.values_[k]);
      }
    }
    b.row_offsets_[i + 1] = static_cast<int>(b.col_indices_.size());
  }
  return b;  // source columns ascending and col_pos monotone on the set
}

void CsrBuilder::set_pattern(int n_rows, int n_cols, const std::vector<std::vector<int>>& rows_cols) {
  matrix_ = SparseMatrix(n_rows, n_cols);
  auto& off = matrix_.row_offsets_;
  for (int i = 0; i < n_rows; ++i) {
    const auto& r = rows_cols[i];
    matrix_.col_indices_.insert(matrix_.col_indices_.end(), r.begin(), r.end());
    off[i + 1] = static_cast<int>(matrix_.col_indices_.size());
  }
  matrix_.values_.assign(matrix_.col_indices_.size(), 0.0);
}

void CsrBuilder::zero_values() {
  std::fill(matrix_.values_.begin(), matrix_.values_.end(), 0.0);
}

int CsrBuilder::slot(int row, int col) const {
  const auto& off = matrix_.row_offsets_;
  const auto& ci = matrix_.col_indices_;
  auto it = std::lower_bound(ci.begin() + off[row], ci.begin() + off[row + 1], col);
  if (it == ci.begin() + off[row + 1] || *it != col) return -1;
  return static_cast<int>(it - ci.begin());
}

void CsrBuilder::add(int row, int col, double v) {
  const int s = slot(row, col);
  if (s < 0) throw std::logic_error("csr builder: entry outside frozen pattern");
  matrix_.values_[s] += v;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  os.precision(17);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      os << i + 1 << " " << a.col_indices()[k] + 1 << " " << a.values()[k] << "\n";
}

void write_matrix_market_file(const std::string& path, const SparseMatrix& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix_market(os, a);
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("matrix market: missing header");
  if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos ||
      line.find("general") == std::string::npos)
    throw std::runtime_error("matrix market: only 'coordinate real general' supported");
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream hdr(line);
  int n_rows, n_cols;
  std::int64_t nnz;
  if (!(hdr >> n_rows >> n_cols >> nnz)) throw std::runtime_error("matrix market: bad size line");
  std::vector<Triplet> ts;
  ts.reserve(nnz);
  for (std::int64_t k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    if (!(is >> i >> j >> v)) throw std::runtime_error("matrix market: truncated entries");
    ts.push_back({i - 1, j - 1, v});
  }
  return SparseMatrix::from_triplets(n_rows, n_cols, ts);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(is);
}

}  // namespace fsi
