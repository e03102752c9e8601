#pragma once

#include <utility>
#include <vector>

namespace mixedcurv::linalg {

// Square dense matrices are stored row-major in std::vector<double>.

// LU with partial pivoting. Returns det; solves in place when rhs given.
double det(std::vector<double> a, int n);

// inv = a^{-1}; throws DegenerateMetric when |det| < tol.
std::vector<double> inverse(const std::vector<double>& a, int n, double tol = 1e-12);

// Symmetric Jacobi eigendecomposition: a (n x n, symmetric) -> eigenvalues
// ascending + column eigenvectors (v[i*n+j] = component i of eigenvector j).
void sym_eigen(const std::vector<double>& a, int n, std::vector<double>& eigenvalues,
               std::vector<double>& eigenvectors);

// Least squares min ||A x - b|| for A (m x n, row-major) via normal equations
// with eigen-based pseudo-inverse. rank_tol is relative to the largest
// eigenvalue of A^T A. Returns x and (optionally) the residual norm.
std::vector<double> lstsq(const std::vector<double>& a, const std::vector<double>& b, int m, int n,
                          double rank_tol = 1e-12, double* residual_norm = nullptr);

// Orthonormal basis of the null space of A (m x n): columns returned as
// vectors of length n. rank_tol relative to largest singular value.
std::vector<std::vector<double>> nullspace(const std::vector<double>& a, int m, int n,
                                           double rank_tol = 1e-9);

}  // namespace mixedcurv::linalg
