#pragma once

#include <utility>

#include <Eigen/Dense>

#include "ectl/encoding.hpp"

namespace ectl {

Mat kron(const Mat& a, const Mat& b);

// Solves A' P A - P + Q = 0 for symmetric positive definite P by vectorizing
// to (I - A' (x) A') vec(P) = vec(Q) and running a partial-pivot LU solve.
// Intended for state dimensions up to 8. Throws NotSchur when the system is
// singular, the residual exceeds 1e-9 * ||P||_F, or P is not positive
// definite (all of which certify that A is not Schur for the given Q).
Mat solve_discrete_lyapunov(const Mat& a, const Mat& q);

// All eigenvalues of a symmetric matrix via cyclic Jacobi rotations, sorted
// ascending. Sweeps until the off-diagonal Frobenius norm falls below
// 1e-12 * max(1, ||S||_F); throws NoConvergence after 100 sweeps.
Vec symmetric_eigenvalues(const Mat& s);

// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> eig_extremes_sym(const Mat& s);

// Largest singular value, computed as sqrt(lambda_max(M' M)).
double spectral_norm(const Mat& m);

bool is_controllable(const Mat& a, const Mat& b);

// Convenience pole placement for tests and scenario generation: returns K
// with the eigenvalues of A - B K at the given (real, distinct) poles.
// Multi-input B is reduced through a fixed input direction. Throws
// NotControllable when the reduction is not controllable.
Mat place_poles(const Mat& a, const Mat& b, const Vec& poles);

}  // namespace ectl
