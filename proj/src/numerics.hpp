#pragma once

#include <vector>

#include <Eigen/Dense>

namespace atomnc::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Symmetric eigendecomposition with eigenvalues sorted in descending order;
// column k of `eigenvectors` pairs with eigenvalues(k).
struct SymEig {
  Vector eigenvalues;
  Matrix eigenvectors;
};

inline constexpr Eigen::Index kMaxEigenDimension = 4096;

/// Decomposes a symmetric matrix. Throws kInvalidArgument when `a` is not
/// square, exceeds kMaxEigenDimension, or is asymmetric beyond
/// 1e-10 * ||a||_F; throws kNumerical when the iteration does not converge.
SymEig sym_eig(const Matrix& a);

/// Solves R y = x for symmetric positive-definite R.
/// Throws kNumerical when R has an eigenvalue below 1e-12.
Vector spd_solve(const Matrix& r, const Vector& x);

// Linear minimization oracle over the spectral box
// { R = R^T : rho_minus <= eig(R) <= rho_plus }. Eigen-directions with a
// positive gradient eigenvalue get rho_minus, the rest (including exact
// zeros) get rho_plus.
Matrix project_spectral_box(const Matrix& gradient, double rho_minus, double rho_plus);

// One-hot vector at the lowest index attaining min(g). Rejects NaN entries.
Vector simplex_vertex_argmin(const Vector& g);

// Index form of simplex_vertex_argmin, shared by the row-wise LMOs.
Eigen::Index argmin_lowest(const Vector& g);

}  // namespace atomnc::numerics

namespace atomnc::numerics {

// Maximum-weight perfect matching on a square score matrix (Hungarian
// method, O(k^3)). Returns, for each row, the matched column.
std::vector<int> max_weight_assignment(const Matrix& score);

}  // namespace atomnc::numerics
