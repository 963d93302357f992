// SPDX-License-Identifier: Apache-2.0

#include "fsi/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

// Adjacency of the symmetrized pattern, diagonal excluded.
std::vector<std::vector<int>> symmetric_adjacency(const SparseMatrix& a) {
  const int n = a.rows();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const int j = a.col_indices()[k];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

// BFS returning (visit order, eccentricity); used for the pseudo-peripheral
// start and for the CM ordering itself.
int bfs_order(const std::vector<std::vector<int>>& adj, int start, std::vector<int>& order,
              std::vector<int>& mark, int stamp) {
  order.clear();
  order.push_back(start);
  mark[start] = stamp;
  int depth = 0;
  std::size_t level_begin = 0;
  while (level_begin < order.size()) {
    const std::size_t level_end = order.size();
    std::vector<int> next;
    for (std::size_t q = level_begin; q < level_end; ++q) {
      for (int nb : adj[order[q]]) {
        if (mark[nb] != stamp) {
          mark[nb] = stamp;
          next.push_back(nb);
        }
      }
    }
    // visit lower-degree nodes first within a level
    std::sort(next.begin(), next.end(), [&](int x, int y) {
      const auto dx = adj[x].size(), dy = adj[y].size();
      return dx != dy ? dx < dy : x < y;
    });
    order.insert(order.end(), next.begin(), next.end());
    if (!next.empty()) ++depth;
    level_begin = level_end;
  }
  return depth;
}

}  // namespace

std::vector<int> rcm_ordering(const SparseMatrix& a) {
  const int n = a.rows();
  const auto adj = symmetric_adjacency(a);
  std::vector<int> perm;
  perm.reserve(n);
  std::vector<int> mark(n, -1), order;
  int stamp = 0;

  std::vector<char> placed(n, 0);
  for (int seed = 0; seed < n; ++seed) {
    if (placed[seed]) continue;
    // pseudo-peripheral node: start at the component seed, walk to the far end
    int start = seed;
    int depth = bfs_order(adj, start, order, mark, ++stamp);
    for (int pass = 0; pass < 3; ++pass) {
      const int far = order.back();
      const int d2 = bfs_order(adj, far, order, mark, ++stamp);
      if (d2 <= depth) break;
      depth = d2;
      start = far;
    }
    bfs_order(adj, start, order, mark, ++stamp);
    for (int v : order) {
      placed[v] = 1;
      perm.push_back(v);
    }
  }
  std::reverse(perm.begin(), perm.end());
  return perm;
}

SparseLu::SparseLu(const SparseMatrix& a, bool use_rcm, std::string label)
    : n_(a.rows()), label_(std::move(label)) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sparse lu: matrix not square");
  const int n = n_;

  // Equilibrate: rows to unit max magnitude, then columns likewise.
  row_scale_.assign(n, 1.0);
  col_scale_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    double mx = 0.0;
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      mx = std::max(mx, std::abs(a.values()[k]));
    if (mx > 0.0) row_scale_[i] = 1.0 / mx;
  }
  std::vector<double> col_max(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      col_max[a.col_indices()[k]] =
          std::max(col_max[a.col_indices()[k]], std::abs(a.values()[k]) * row_scale_[i]);
  for (int j = 0; j < n; ++j)
    if (col_max[j] > 0.0) col_scale_[j] = 1.0 / col_max[j];

  fill_perm_.resize(n);
  if (use_rcm) {
    fill_perm_ = rcm_ordering(a);
  } else {
    for (int i = 0; i < n; ++i) fill_perm_[i] = i;
  }
  std::vector<int> inv_fill(n);
  for (int i = 0; i < n; ++i) inv_fill[fill_perm_[i]] = i;

  // scaled A in rcm coordinates, CSC.
  std::vector<std::vector<std::pair<int, double>>> acols(n);
  for (int i = 0; i < n; ++i) {
    const int pi = inv_fill[i];
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const int j = a.col_indices()[k];
      acols[inv_fill[j]].push_back({pi, a.values()[k] * row_scale_[i] * col_scale_[j]});
    }
  }

  pivot_of_row_.assign(n, -1);
  l_offsets_.assign(1, 0);
  u_offsets_.assign(1, 0);

  // Working column in rcm-row coordinates + DFS scratch.
  std::vector<double> x(n, 0.0);
  std::vector<int> mark(n, -1);
  std::vector<int> stack, order, child_pos(n, 0);
  // Temporary per-column L storage in rcm-row indices; remapped to pivot
  // coordinates at the end.
  std::vector<std::vector<std::pair<int, double>>> lcols(n);

  for (int k = 0; k < n; ++k) {
    // Reach of A(:,k) through the strictly-lower part of L.
    order.clear();
    for (const auto& [r, v] : acols[k]) {
      if (mark[r] == k) continue;
      // iterative DFS from r
      stack.clear();
      stack.push_back(r);
      mark[r] = k;
      child_pos[r] = 0;
      while (!stack.empty()) {
        const int node = stack.back();
        const int jcol = pivot_of_row_[node];
        bool descended = false;
        if (jcol >= 0) {
          auto& lc = lcols[jcol];
          int& cp = child_pos[node];
          while (cp < static_cast<int>(lc.size())) {
            const int child = lc[cp].first;
            ++cp;
            if (mark[child] != k) {
              mark[child] = k;
              child_pos[child] = 0;
              stack.push_back(child);
              descended = true;
              break;
            }
          }
        }
        if (!descended && (jcol < 0 || child_pos[node] >= static_cast<int>(lcols[jcol].size()))) {
          stack.pop_back();
          order.push_back(node);  // reverse topological
        }
      }
    }

    for (const auto& [r, v] : acols[k]) x[r] += v;  // duplicates summed

    // Eliminate in topological order (reverse of 'order').
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int node = *it;
      const int jcol = pivot_of_row_[node];
      if (jcol < 0) continue;
      const double xj = x[node];
      if (xj == 0.0) continue;
      for (const auto& [r, lv] : lcols[jcol]) x[r] -= lv * xj;
    }

    // Partial pivoting over not-yet-pivotal rows.
    int piv_row = -1;
    double piv_abs = -1.0, row_scale = 0.0;
    for (int node : order) {
      const double av = std::abs(x[node]);
      if (pivot_of_row_[node] < 0) {
        if (av > piv_abs) {
          piv_abs = av;
          piv_row = node;
        }
      }
      row_scale = std::max(row_scale, av);
    }
    if (piv_row < 0 || piv_abs <= 1e-14 * std::max(row_scale, 1e-300))
      throw SingularBlockError(label_ + " (column " + std::to_string(k) + ")");
    const double pivot = x[piv_row];
    pivot_of_row_[piv_row] = k;

    // Split the worked column into U (pivotal rows) and L (the rest).
    for (int node : order) {
      const double v = x[node];
      x[node] = 0.0;
      if (node == piv_row) continue;
      const int p = pivot_of_row_[node];
      if (p >= 0 && p < k) {
        if (v != 0.0) {
          u_rows_.push_back(p);
          u_values_.push_back(v);
        }
      } else if (v != 0.0) {
        lcols[k].push_back({node, v / pivot});
      }
    }
    u_rows_.push_back(k);
    u_values_.push_back(pivot);
    u_offsets_.push_back(static_cast<int>(u_rows_.size()));
    l_offsets_.push_back(l_offsets_.back() + static_cast<int>(lcols[k].size()));
  }

  // Flatten L with rows remapped to pivot coordinates.
  l_rows_.reserve(l_offsets_.back());
  l_values_.reserve(l_offsets_.back());
  for (int k = 0; k < n; ++k) {
    for (const auto& [r, v] : lcols[k]) {
      l_rows_.push_back(pivot_of_row_[r]);
      l_values_.push_back(v);
    }
  }
}

long long SparseLu::fill() const {
  return static_cast<long long>(l_rows_.size()) + static_cast<long long>(u_rows_.size());
}

void SparseLu::solve(const double* b, double* x) const {
  const int n = n_;
  std::vector<double> y(n);
  // y[pivot position] = scaled b[original row]
  for (int i = 0; i < n; ++i)
    y[pivot_of_row_[i]] = b[fill_perm_[i]] * row_scale_[fill_perm_[i]];
  // forward solve: (I + L) y = y, columns in order
  for (int k = 0; k < n; ++k) {
    const double yk = y[k];
    if (yk == 0.0) continue;
    for (int p = l_offsets_[k]; p < l_offsets_[k + 1]; ++p) y[l_rows_[p]] -= l_values_[p] * yk;
  }
  // back solve U z = y; diagonal entry is the last one pushed per column
  for (int k = n - 1; k >= 0; --k) {
    const int diag = u_offsets_[k + 1] - 1;
    const double zk = y[k] / u_values_[diag];
    y[k] = zk;
    if (zk == 0.0) continue;
    for (int p = u_offsets_[k]; p < diag; ++p) y[u_rows_[p]] -= u_values_[p] * zk;
  }
  // scatter back through the fill ordering (columns permuted symmetrically)
  for (int j = 0; j < n; ++j) x[fill_perm_[j]] = y[j] * col_scale_[fill_perm_[j]];
}

std::vector<double> SparseLu::solve(const std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("sparse lu: rhs size mismatch");
  std::vector<double> x(n_);
  solve(b.data(), x.data());
  return x;
}

std::vector<double> direct_solve(const SparseMatrix& a, const std::vector<double>& b) {
  SparseLu lu(a);
  return lu.solve(b);
}

}  // namespace fsi
