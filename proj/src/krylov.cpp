// SPDX-License-Identifier: Apache-2.0

#include "fsi/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsi/kernels.hpp"
#include "fsi/sparse.hpp"

namespace fsi {

int CsrOperator::size() const { return a->rows(); }

void CsrOperator::apply(const double* x, double* y) const { a->multiply(x, y); }

void IdentityOperator::apply(const double* x, double* y) const { std::copy(x, x + n, y); }

GmresResult gmres(const LinearOperator& a, const LinearOperator& m, const std::vector<double>& b,
                  const KrylovConfig& cfg, const std::vector<double>* x0) {
  const int n = a.size();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("gmres: rhs size mismatch");
  if (cfg.restart < 1 || cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0)
    throw std::invalid_argument("gmres: invalid config");
  const int mr = cfg.restart;

  GmresResult out;
  out.x.assign(n, 0.0);
  if (x0) out.x = *x0;

  std::vector<double> r(n), w(n), tmp(n);
  // r = b - A x
  a.apply(out.x.data(), r.data());
  kernels::axpby(n, 1.0, b.data(), -1.0, r.data());

  const double r0 = kernels::norm2(n, r.data());
  out.history.push_back(r0);
  const double target = std::max(cfg.rel_tol * r0, cfg.abs_tol);
  if (r0 <= target) {
    out.converged = true;
    return out;
  }

  // Krylov basis (mr+1 vectors) and Hessenberg factors.
  std::vector<std::vector<double>> v(mr + 1, std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>(mr + 1) * mr, 0.0);
  std::vector<double> cs(mr), sn(mr), g(mr + 1);
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i) * mr + j]; };

  double beta = r0;
  while (out.iterations < cfg.max_iters) {
    std::fill(h.begin(), h.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    for (int i = 0; i < n; ++i) v[0][i] = r[i] / beta;

    int j = 0;
    bool lucky = false;
    for (; j < mr && out.iterations < cfg.max_iters; ++j) {
      // w = A M v_j
      m.apply(v[j].data(), tmp.data());
      a.apply(tmp.data(), w.data());
      // modified Gram-Schmidt
      for (int i = 0; i <= j; ++i) {
        const double hij = kernels::dot(n, w.data(), v[i].data());
        H(i, j) = hij;
        kernels::axpy(n, -hij, v[i].data(), w.data());
      }
      const double hjj = kernels::norm2(n, w.data());
      H(j + 1, j) = hjj;
      ++out.iterations;

      if (hjj < 1e-14) {
        out.breakdown = true;
        lucky = true;
      } else {
        for (int i = 0; i < n; ++i) v[j + 1][i] = w[i] / hjj;
      }

      // apply accumulated Givens rotations to the new column
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = H(j, j) / denom;
      sn[j] = H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      const double rho = std::abs(g[j + 1]);
      out.history.push_back(rho);
      if (rho <= target || lucky) {
        ++j;
        break;
      }
    }

    // y = H^{-1} g by back substitution, then x += M (V y)
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = s / H(i, i);
    }
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int i = 0; i < j; ++i) kernels::axpy(n, y[i], v[i].data(), tmp.data());
    m.apply(tmp.data(), w.data());
    kernels::axpy(n, 1.0, w.data(), out.x.data());

    // true residual for the next cycle / final report
    a.apply(out.x.data(), r.data());
    kernels::axpby(n, 1.0, b.data(), -1.0, r.data());
    beta = kernels::norm2(n, r.data());
    if (beta <= target) {
      out.converged = true;
      return out;
    }
    if (out.breakdown) return out;  // stalled basis: report the current iterate
  }
  return out;
}

}  // namespace fsi
