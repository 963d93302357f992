// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

namespace fsi {

class SparseMatrix;

// Abstract square operator; matrices, preconditioners and multigrid
// cycles all present this interface to the Krylov solver.
struct LinearOperator {
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(const double* x, double* y) const = 0;
};

struct CsrOperator final : LinearOperator {
  const SparseMatrix* a;
  explicit CsrOperator(const SparseMatrix& m) : a(&m) {}
  int size() const override;
  void apply(const double* x, double* y) const override;
};

struct IdentityOperator final : LinearOperator {
  int n;
  explicit IdentityOperator(int n) : n(n) {}
  int size() const override { return n; }
  void apply(const double* x, double* y) const override;
};

struct FunctionOperator final : LinearOperator {
  int n;
  std::function<void(const double*, double*)> fn;
  FunctionOperator(int n, std::function<void(const double*, double*)> f) : n(n), fn(std::move(f)) {}
  int size() const override { return n; }
  void apply(const double* x, double* y) const override { fn(x, y); }
};

struct KrylovConfig {
  int restart = 60;
  int max_iters = 500;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
};

struct GmresResult {
  std::vector<double> x;
  std::vector<double> history;  // residual norms, history[0] = ||r0||
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
};

// Restarted GMRES, right preconditioned: solves A M z = b, x = M z, so the
// recurrence residual is the true residual of A x = b. Stops when
// ||r|| <= max(rel_tol*||r0||, abs_tol). A Hessenberg subdiagonal below
// 1e-14 flags a breakdown and returns the current iterate.
GmresResult gmres(const LinearOperator& a, const LinearOperator& m, const std::vector<double>& b,
                  const KrylovConfig& cfg, const std::vector<double>* x0 = nullptr);

}  // namespace fsi
