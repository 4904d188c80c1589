#include "numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace atomnc::numerics {

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw_invalid("A", "matrix must be square, got " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()));
  }
  if (a.rows() > kMaxEigenDimension) {
    throw_invalid("A", "dimension " + std::to_string(a.rows()) + " exceeds " +
                           std::to_string(kMaxEigenDimension));
  }
  const double norm = a.norm();
  if (!std::isfinite(norm)) throw_invalid("A", "matrix has non-finite entries");
  if ((a - a.transpose()).norm() > 1e-10 * norm) throw_invalid("A", "matrix is not symmetric");

  SymEig out;
  const Eigen::Index m = a.rows();
  if (m == 0) return out;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw_numerical("symmetric eigensolver did not converge (ill-conditioned input)");
  }
  // Eigen sorts ascending; reverse into descending order.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Vector spd_solve(const Matrix& r, const Vector& x) {
  if (r.rows() != r.cols() || r.rows() != x.size()) {
    throw_invalid("R", "dimension mismatch in SPD solve");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> spectrum(r, Eigen::EigenvaluesOnly);
  if (spectrum.info() != Eigen::Success || spectrum.eigenvalues().minCoeff() < 1e-12) {
    throw_numerical("SPD solve: matrix is numerically singular");
  }
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) throw_numerical("SPD solve: matrix is not positive definite");
  return llt.solve(x);
}

Matrix project_spectral_box(const Matrix& gradient, double rho_minus, double rho_plus) {
  if (!(rho_minus > 0.0)) throw_invalid("rho_minus", "must be > 0");
  if (!(rho_plus > rho_minus)) throw_invalid("rho_plus", "must exceed rho_minus");
  const SymEig eig = sym_eig(gradient);
  Vector r(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    r(k) = eig.eigenvalues(k) > 0.0 ? rho_minus : rho_plus;
  }
  Matrix out = eig.eigenvectors * r.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::Index argmin_lowest(const Vector& g) {
  if (g.size() == 0) throw_invalid("g", "empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (std::isnan(g(k))) throw_invalid("g", "NaN entry at index " + std::to_string(k));
    if (g(k) < g(best)) best = k;
  }
  return best;
}

Vector simplex_vertex_argmin(const Vector& g) {
  Vector out = Vector::Zero(g.size());
  out(argmin_lowest(g)) = 1.0;
  return out;
}

}  // namespace atomnc::numerics

namespace atomnc::numerics {

std::vector<int> max_weight_assignment(const Matrix& score) {
  if (score.rows() != score.cols()) throw_invalid("score", "assignment matrix must be square");
  const std::size_t k = static_cast<std::size_t>(score.rows());
  if (k == 0) return {};
  if (!score.allFinite()) throw_invalid("score", "assignment matrix has non-finite entries");

  // Shortest augmenting paths on cost = -score. Rows and columns are
  // 1-based; column 0 is a virtual root.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> match(k + 1, 0), way(k + 1, 0);
  auto cost = [&](std::size_t row, std::size_t col) {
    return -score(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(col - 1));
  };

  for (std::size_t row = 1; row <= k; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= k; ++col) {
        if (used[col]) continue;
        const double cur = cost(row0, col) - u[row0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= k; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<int> out(k, -1);
  for (std::size_t col = 1; col <= k; ++col) out[match[col] - 1] = static_cast<int>(col - 1);
  return out;
}

}  // namespace atomnc::numerics
