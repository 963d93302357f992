// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace fsi {

// Row-major dense matrix, used for Schwarz block solves and the small
// stabilization eigenproblems.
struct DenseMatrix {
  int n = 0, m = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }

  static DenseMatrix identity(int n);
  std::vector<double> multiply(const std::vector<double>& x) const;
};

// LU factorization with partial pivoting. A pivot below 1e-14 of its row's
// max magnitude raises SingularBlockError carrying the block label.
class DenseFactorization {
 public:
  DenseFactorization() = default;
  DenseFactorization(const DenseMatrix& block, std::string label);

  int dimension() const { return n_; }
  const std::string& label() const { return label_; }

  void solve(const double* b, double* x) const;
  std::vector<double> solve(const std::vector<double>& b) const;

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> piv_;
  std::string label_;
};

struct GeneralizedEigenResult {
  double lambda = 0.0;
  std::vector<double> eigenvector;  // B-normalized
  bool converged = false;
  int iterations = 0;
};

// Largest eigenvalue of A w = lambda B w for symmetric A (psd) and SPD B,
// by the power method on B^{-1} A with B-norm normalization. On
// non-convergence the last estimate is returned with converged=false.
GeneralizedEigenResult power_method_generalized(const DenseMatrix& a, const DenseMatrix& b,
                                                double tol, int max_it);

// Dense generalized eigensolve fallback (Cholesky reduction + cyclic
// Jacobi); returns the largest eigenvalue and its eigenvector.
GeneralizedEigenResult dense_generalized_eigensolve(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace fsi
