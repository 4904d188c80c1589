#include "baseline.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "error.hpp"
#include "numerics.hpp"

namespace atomnc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Run {
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
};

MatrixXd plus_plus_seeds(const MatrixXd& points, int K, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  MatrixXd centers(K, points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  VectorXd dist = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < K; ++c) {
    const double total = dist.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, total);
      double target = unit(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        target -= dist(pick);
        if (target <= 0.0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = points.row(pick);
    dist = dist.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

Run lloyd(const MatrixXd& points, int K, int iters, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  MatrixXd centers = plus_plus_seeds(points, K, rng);
  Run run;
  run.assignment.assign(static_cast<std::size_t>(n), -1);
  VectorXd best_dist(n);

  for (int it = 0; it < std::max(iters, 1); ++it) {
    bool changed = false;
    for (Eigen::Index v = 0; v < n; ++v) {
      Eigen::Index best = 0;
      best_dist(v) = (centers.rowwise() - points.row(v)).rowwise().squaredNorm().minCoeff(&best);
      if (run.assignment[static_cast<std::size_t>(v)] != static_cast<int>(best)) {
        run.assignment[static_cast<std::size_t>(v)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    MatrixXd sums = MatrixXd::Zero(K, points.cols());
    VectorXd counts = VectorXd::Zero(K);
    for (Eigen::Index v = 0; v < n; ++v) {
      sums.row(run.assignment[static_cast<std::size_t>(v)]) += points.row(v);
      counts(run.assignment[static_cast<std::size_t>(v)]) += 1.0;
    }
    for (int c = 0; c < K; ++c) {
      if (counts(c) > 0.0) {
        centers.row(c) = sums.row(c) / counts(c);
        continue;
      }
      // Empty cluster: move it onto the worst-fit point.
      Eigen::Index far = 0;
      best_dist.maxCoeff(&far);
      centers.row(c) = points.row(far);
      best_dist(far) = 0.0;
      run.assignment[static_cast<std::size_t>(far)] = c;
    }
  }
  run.inertia = kmeans_inertia(points, run.assignment, K);
  return run;
}

}  // namespace

void validate(const SpectralConfig& config) {
  if (config.K < 2) throw_invalid("K", "spectral clustering needs K >= 2");
  if (config.kmeans_restarts < 1) throw_invalid("kmeans_restarts", "must be >= 1");
  if (config.kmeans_iters < 1) throw_invalid("kmeans_iters", "must be >= 1");
}

double kmeans_inertia(const Eigen::MatrixXd& points, const std::vector<int>& assignment, int K) {
  MatrixXd sums = MatrixXd::Zero(K, points.cols());
  VectorXd counts = VectorXd::Zero(K);
  for (Eigen::Index v = 0; v < points.rows(); ++v) {
    sums.row(assignment[static_cast<std::size_t>(v)]) += points.row(v);
    counts(assignment[static_cast<std::size_t>(v)]) += 1.0;
  }
  double inertia = 0.0;
  for (Eigen::Index v = 0; v < points.rows(); ++v) {
    const int c = assignment[static_cast<std::size_t>(v)];
    inertia += (points.row(v) - sums.row(c) / counts(c)).squaredNorm();
  }
  return inertia;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int K, int restarts, int iters, std::uint64_t seed) {
  if (K < 1) throw_invalid("K", "must be >= 1");
  if (points.rows() < K) {
    throw_invalid("points", "need at least K=" + std::to_string(K) + " points, got " +
                                std::to_string(points.rows()));
  }
  if (restarts < 1) throw_invalid("restarts", "must be >= 1");
  if (K == 1) return {std::vector<int>(static_cast<std::size_t>(points.rows()), 0),
                      kmeans_inertia(points, std::vector<int>(static_cast<std::size_t>(points.rows()), 0), 1)};

  std::mt19937_64 rng(seed);
  Run best;
  for (int restart = 0; restart < restarts; ++restart) {
    Run run = lloyd(points, K, iters, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return {std::move(best.assignment), best.inertia};
}

std::vector<int> spectral_cluster(const AdjacencyMatrix& adjacency, const SpectralConfig& config) {
  validate(config);
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) throw_invalid("adjacency", "must be square");
  if (n < config.K) throw_invalid("adjacency", "fewer nodes than clusters");

  const MatrixXd a = adjacency.cast<double>();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0) throw_invalid("adjacency", "must be symmetric");
  if (a.diagonal().cwiseAbs().maxCoeff() > 0.0) throw_invalid("adjacency", "must have a zero diagonal");

  const VectorXd degree = a.rowwise().sum();
  MatrixXd laplacian;
  if (config.laplacian == LaplacianKind::kUnnormalized) {
    laplacian = MatrixXd(degree.asDiagonal()) - a;
  } else {
    // Isolated nodes get a zero scaling and contribute an identity row.
    const VectorXd inv_sqrt = degree.unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
    laplacian = MatrixXd::Identity(n, n) - inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  }

  // sym_eig is descending, so the smallest K eigenpairs are the last columns.
  const numerics::SymEig eig = numerics::sym_eig(laplacian);
  MatrixXd embedding = eig.eigenvectors.rightCols(config.K).rowwise().reverse();
  if (config.laplacian == LaplacianKind::kSymmetricNormalized) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const double norm = embedding.row(v).norm();
      if (norm > 0.0) embedding.row(v) /= norm;
    }
  }
  return kmeans(embedding, config.K, config.kmeans_restarts, config.kmeans_iters, config.seed).assignment;
}

std::vector<int> best_relabeling(const std::vector<int>& predicted, const std::vector<int>& truth, int K,
                                 const std::vector<std::uint8_t>& mask) {
  if (predicted.size() != truth.size()) throw_invalid("predicted", "length must match truth");
  if (!mask.empty() && mask.size() != truth.size()) throw_invalid("mask", "length must match truth");
  Eigen::MatrixXd agreement = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t v = 0; v < truth.size(); ++v) {
    if (!mask.empty() && mask[v] == 0) continue;
    if (predicted[v] < 0 || predicted[v] >= K || truth[v] < 0 || truth[v] >= K) {
      throw_invalid("predicted", "label out of range [0, K)");
    }
    agreement(predicted[v], truth[v]) += 1.0;
  }
  return numerics::max_weight_assignment(agreement);
}

double best_permutation_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, int K,
                                 const std::vector<std::uint8_t>& mask) {
  const std::vector<int> relabel = best_relabeling(predicted, truth, K, mask);
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t v = 0; v < truth.size(); ++v) {
    if (!mask.empty() && mask[v] == 0) continue;
    ++total;
    if (relabel[static_cast<std::size_t>(predicted[v])] == truth[v]) ++correct;
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(correct) / total;
}

}  // namespace atomnc
