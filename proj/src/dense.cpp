// SPDX-License-Identifier: Apache-2.0

#include "fsi/dense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fsi/errors.hpp"

namespace fsi {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != m) throw std::invalid_argument("dense multiply: size mismatch");
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += a[static_cast<std::size_t>(i) * m + j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseFactorization::DenseFactorization(const DenseMatrix& block, std::string label)
    : n_(block.n), lu_(block.a), piv_(block.n), label_(std::move(label)) {
  if (block.n != block.m) throw std::invalid_argument("lu: matrix not square");
  const int n = n_;
  // Row-max magnitudes of the original block set the pivot tolerance scale.
  std::vector<double> row_max(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) row_max[i] = std::max(row_max[i], std::abs(block(i, j)));

  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu_[static_cast<std::size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_[static_cast<std::size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j)
        std::swap(lu_[static_cast<std::size_t>(k) * n + j], lu_[static_cast<std::size_t>(p) * n + j]);
      std::swap(row_max[k], row_max[p]);
    }
    const double pivot = lu_[static_cast<std::size_t>(k) * n + k];
    if (std::abs(pivot) <= 1e-14 * std::max(row_max[k], 1e-300)) throw SingularBlockError(label_);
    const double inv = 1.0 / pivot;
    for (int i = k + 1; i < n; ++i) {
      double& l = lu_[static_cast<std::size_t>(i) * n + k];
      l *= inv;
      const double lik = l;
      for (int j = k + 1; j < n; ++j)
        lu_[static_cast<std::size_t>(i) * n + j] -= lik * lu_[static_cast<std::size_t>(k) * n + j];
    }
  }
}

void DenseFactorization::solve(const double* b, double* x) const {
  const int n = n_;
  std::copy(b, b + n, x);
  // The stored L rows carry every interchange, so all swaps must hit the
  // right-hand side before the forward substitution starts.
  for (int k = 0; k < n; ++k)
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
  for (int k = 0; k < n; ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    for (int i = k + 1; i < n; ++i) x[i] -= lu_[static_cast<std::size_t>(i) * n + k] * xk;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= lu_[static_cast<std::size_t>(i) * n + j] * x[j];
    x[i] = s / lu_[static_cast<std::size_t>(i) * n + i];
  }
}

std::vector<double> DenseFactorization::solve(const std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("lu solve: size mismatch");
  std::vector<double> x(n_);
  solve(b.data(), x.data());
  return x;
}

namespace {

double b_inner(const DenseMatrix& b, const std::vector<double>& x, const std::vector<double>& y) {
  const auto by = b.multiply(y);
  double s = 0.0;
  for (int i = 0; i < b.n; ++i) s += x[i] * by[i];
  return s;
}

}  // namespace

GeneralizedEigenResult power_method_generalized(const DenseMatrix& a, const DenseMatrix& b,
                                                double tol, int max_it) {
  if (a.n != a.m || b.n != b.m || a.n != b.n) throw std::invalid_argument("pencil: size mismatch");
  const int n = a.n;
  GeneralizedEigenResult res;
  if (n == 0) return res;

  DenseFactorization bf(b, "pencil-B");
  // Deterministic start vector with all modes excited.
  std::vector<double> w(n);
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> unif(0.25, 1.0);
  for (int i = 0; i < n; ++i) w[i] = unif(rng);

  double norm = std::sqrt(b_inner(b, w, w));
  for (int i = 0; i < n; ++i) w[i] /= norm;

  double lambda = 0.0;
  for (int it = 1; it <= max_it; ++it) {
    const auto aw = a.multiply(w);
    const auto bw = b.multiply(w);
    double rayleigh = 0.0;  // w^T A w with w B-normalized
    for (int i = 0; i < n; ++i) rayleigh += w[i] * aw[i];

    // Residual of the pencil at the current iterate; the convergence
    // criterion requires a settled Rayleigh quotient and a small residual,
    // so the returned pair (lambda, w) satisfies
    // ||A w - lambda B w|| <= tol * lambda * ||B w||.
    double res2 = 0.0, bwn2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = aw[i] - rayleigh * bw[i];
      res2 += r * r;
      bwn2 += bw[i] * bw[i];
    }
    const double change = std::abs(rayleigh - lambda);
    lambda = rayleigh;
    res.lambda = lambda;
    res.eigenvector = w;
    res.iterations = it;

    const double scale = std::max(std::abs(lambda) * std::sqrt(bwn2), 1e-300);
    if ((it > 1 && change <= tol * std::max(std::abs(lambda), 1e-300) &&
         std::sqrt(res2) <= tol * scale) ||
        std::sqrt(res2) == 0.0) {
      res.converged = true;
      return res;
    }

    std::vector<double> z(n);
    bf.solve(aw.data(), z.data());  // z = B^{-1} A w
    const double zn = std::sqrt(b_inner(b, z, z));
    if (zn == 0.0) {  // A w = 0 exactly
      res.lambda = 0.0;
      res.converged = true;
      return res;
    }
    for (int i = 0; i < n; ++i) z[i] = z[i] / zn;
    w = std::move(z);
  }
  return res;  // converged stays false: caller sees the last estimate
}

GeneralizedEigenResult dense_generalized_eigensolve(const DenseMatrix& a, const DenseMatrix& b) {
  const int n = a.n;
  // Cholesky B = L L^T.
  DenseMatrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = b(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw SingularBlockError("pencil-B (not SPD)");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  // C = L^{-1} A L^{-T}, computed column by column.
  DenseMatrix c(n, n);
  std::vector<double> col(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[i] = a(i, j);
    // forward solve L y = col
    for (int i = 0; i < n; ++i) {
      double s = col[i];
      for (int k = 0; k < i; ++k) s -= l(i, k) * col[k];
      col[i] = s / l(i, i);
    }
    for (int i = 0; i < n; ++i) c(i, j) = col[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) col[j] = c(i, j);
    for (int j = 0; j < n; ++j) {
      double s = col[j];
      for (int k = 0; k < j; ++k) s -= l(j, k) * col[k];
      col[j] = s / l(j, j);
    }
    for (int j = 0; j < n; ++j) c(i, j) = col[j];
  }
  // Cyclic Jacobi on the symmetric C.
  DenseMatrix v = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += c(p, q) * c(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(c(p, q)) < 1e-300) continue;
        const double theta = 0.5 * std::atan2(2.0 * c(p, q), c(q, q) - c(p, p));
        const double cs = std::cos(theta), sn = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          const double cpk = c(p, k), cqk = c(q, k);
          c(p, k) = cs * cpk - sn * cqk;
          c(q, k) = sn * cpk + cs * cqk;
        }
        for (int k = 0; k < n; ++k) {
          const double ckp = c(k, p), ckq = c(k, q);
          c(k, p) = cs * ckp - sn * ckq;
          c(k, q) = sn * ckp + cs * ckq;
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (c(i, i) > c(best, best)) best = i;

  GeneralizedEigenResult res;
  res.lambda = c(best, best);
  res.converged = true;
  // w = L^{-T} v[:, best]
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = v(i, best);
  for (int i = n - 1; i >= 0; --i) {
    double s = w[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * w[k];
    w[i] = s / l(i, i);
  }
  double bn = std::sqrt(b_inner(b, w, w));
  for (int i = 0; i < n; ++i) w[i] /= bn;
  res.eigenvector = std::move(w);
  return res;
}

}  // namespace fsi
