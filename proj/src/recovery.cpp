#include "recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "numerics.hpp"

namespace atomnc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::vector<int>> clusters_of(const PlantedInstance& instance) {
  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(instance.cluster_count()));
  for (int v = 0; v < instance.n; ++v) {
    const int c = instance.true_labels[static_cast<std::size_t>(v)];
    if (c < 0 || c >= instance.cluster_count()) throw_invalid("true_labels", "label out of range [0, K)");
    clusters[static_cast<std::size_t>(c)].push_back(v);
  }
  return clusters;
}

// counts(v, j) = number of neighbours of v in cluster j.
MatrixXd neighbour_counts(const PlantedInstance& instance) {
  const int k = instance.cluster_count();
  MatrixXd counts = MatrixXd::Zero(instance.n, k);
  for (int v = 0; v < instance.n; ++v) {
    for (int u = 0; u < instance.n; ++u) {
      if (instance.adjacency(u, v) != 0) counts(v, instance.true_labels[static_cast<std::size_t>(u)]) += 1.0;
    }
  }
  return counts;
}

MisconnectionStats stats_for(const PlantedInstance& instance, const MatrixXd& counts,
                             const std::vector<std::vector<int>>& clusters, bool exclude_self) {
  const int k = instance.cluster_count();
  // rate(v, j) = n+_{v,j} / (denominator), the per-node misconnection rate.
  MatrixXd rate = MatrixXd::Zero(instance.n, k);
  MatrixXd total = MatrixXd::Zero(k, k);
  for (int v = 0; v < instance.n; ++v) {
    const int own = instance.true_labels[static_cast<std::size_t>(v)];
    for (int j = 0; j < k; ++j) {
      const double nj = static_cast<double>(clusters[static_cast<std::size_t>(j)].size());
      double misses = counts(v, j);
      double denom = nj;
      if (j == own) {
        denom = exclude_self ? nj - 1.0 : nj;
        misses = denom - counts(v, j);
      }
      total(own, j) += misses;
      rate(v, j) = denom > 0.0 ? misses / denom : 0.0;
    }
  }

  MisconnectionStats stats;
  stats.rho_plus = MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double ni = static_cast<double>(clusters[static_cast<std::size_t>(i)].size());
      const double nj = static_cast<double>(clusters[static_cast<std::size_t>(j)].size());
      const double pairs = (i == j && exclude_self) ? ni * (nj - 1.0) : ni * nj;
      stats.rho_plus(i, j) = pairs > 0.0 ? total(i, j) / pairs : 0.0;
    }
  }
  stats.homogeneity_margin = 0.0;
  for (int v = 0; v < instance.n; ++v) {
    const int own = instance.true_labels[static_cast<std::size_t>(v)];
    for (int j = 0; j < k; ++j) {
      stats.homogeneity_margin = std::max(stats.homogeneity_margin, std::abs(rate(v, j) - stats.rho_plus(own, j)));
    }
  }
  stats.visibility_margin = 0.5 - stats.rho_plus.maxCoeff();
  return stats;
}

MatrixXd submatrix(const MatrixXd& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = a(rows[r], cols[c]);
  }
  return out;
}

double symmetric_op_norm(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return numerics::sym_eig(a).eigenvalues.cwiseAbs().maxCoeff();
}

double rectangular_op_norm(const MatrixXd& b) {
  if (b.size() == 0) return 0.0;
  const MatrixXd gram = b.rows() <= b.cols() ? MatrixXd(b * b.transpose()) : MatrixXd(b.transpose() * b);
  return std::sqrt(std::max(0.0, numerics::sym_eig(gram).eigenvalues(0)));
}

// Stacked per-node gradient at an atom model: the R block flattened, then
// the pi block.
VectorXd node_gradient(const PlantedInstance& instance, int v, const MatrixXd& r, const VectorXd& pi,
                       double label_weight) {
  const Eigen::Index m = r.rows();
  const VectorXd y = numerics::spd_solve(r, instance.features.row(v).transpose());
  const MatrixXd grad_r = (MatrixXd::Identity(m, m) - y * y.transpose()) / static_cast<double>(m);
  VectorXd out = VectorXd::Zero(m * m + pi.size());
  out.head(m * m) = grad_r.reshaped();
  if (instance.is_train(v)) out(m * m + instance.noisy_labels[static_cast<std::size_t>(v)]) = -label_weight;
  return out;
}

}  // namespace

MisconnectionReport misconnection_stats(const PlantedInstance& instance) {
  const auto clusters = clusters_of(instance);
  const MatrixXd counts = neighbour_counts(instance);
  return {stats_for(instance, counts, clusters, false), stats_for(instance, counts, clusters, true)};
}

std::vector<BlockNorms> centered_block_norms(const PlantedInstance& instance) {
  const auto clusters = clusters_of(instance);
  const int k = instance.cluster_count();
  const MatrixXd a = instance.adjacency.cast<double>();

  MatrixXd edges = MatrixXd::Zero(k, k);
  for (int u = 0; u < instance.n; ++u) {
    for (int v = 0; v < instance.n; ++v) {
      edges(instance.true_labels[static_cast<std::size_t>(u)], instance.true_labels[static_cast<std::size_t>(v)]) +=
          a(u, v);
    }
  }
  MatrixXd centered = a;
  for (int u = 0; u < instance.n; ++u) {
    const int i = instance.true_labels[static_cast<std::size_t>(u)];
    const double ni = static_cast<double>(clusters[static_cast<std::size_t>(i)].size());
    for (int v = 0; v < instance.n; ++v) {
      const int j = instance.true_labels[static_cast<std::size_t>(v)];
      const double nj = static_cast<double>(clusters[static_cast<std::size_t>(j)].size());
      centered(u, v) -= edges(i, j) / (ni * nj);
    }
  }

  std::vector<BlockNorms> norms;
  for (int i = 0; i < k; ++i) {
    const auto& inside = clusters[static_cast<std::size_t>(i)];
    std::vector<int> outside;
    for (int v = 0; v < instance.n; ++v) {
      if (instance.true_labels[static_cast<std::size_t>(v)] != i) outside.push_back(v);
    }
    BlockNorms block;
    block.intra = symmetric_op_norm(submatrix(centered, inside, inside));
    block.extra = symmetric_op_norm(submatrix(centered, outside, outside));
    block.inter = rectangular_op_norm(submatrix(centered, inside, outside));
    block.intra_scale = std::sqrt(static_cast<double>(inside.size()));
    block.extra_scale = std::sqrt(static_cast<double>(instance.n));
    block.inter_scale = block.extra_scale;
    norms.push_back(block);
  }
  return norms;
}

std::vector<NodeOnlyBound> node_only_certificate_margin(const PlantedInstance& instance, double gamma,
                                                        const AtomModels& centroids, double label_weight) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw_invalid("gamma", "must be finite and >= 0");
  if (centroids.atom_count() != instance.cluster_count()) {
    throw_invalid("centroids", "need one centroid per cluster (" + std::to_string(instance.cluster_count()) + ")");
  }
  const auto clusters = clusters_of(instance);
  std::vector<NodeOnlyBound> out;
  for (int i = 0; i < instance.cluster_count(); ++i) {
    const auto& members = clusters[static_cast<std::size_t>(i)];
    if (members.empty()) throw_invalid("instance", "cluster " + std::to_string(i) + " is empty");
    const MatrixXd& r = centroids.covariances[static_cast<std::size_t>(i)];
    const VectorXd& pi = centroids.label_dists[static_cast<std::size_t>(i)];
    if (r.rows() != instance.feature_dim()) throw_invalid("centroids", "covariance dimension must match m");

    MatrixXd grads(members.size(), r.size() + pi.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
      grads.row(static_cast<Eigen::Index>(a)) = node_gradient(instance, members[a], r, pi, label_weight);
    }
    double rho = 0.0;
    for (Eigen::Index a = 0; a < grads.rows(); ++a) {
      for (Eigen::Index b = a + 1; b < grads.rows(); ++b) {
        rho = std::max(rho, (grads.row(a) - grads.row(b)).squaredNorm());
      }
    }
    NodeOnlyBound entry;
    entry.rho = std::sqrt(rho);
    entry.bound = gamma * static_cast<double>(members.size()) / static_cast<double>(instance.n);
    entry.satisfied = entry.rho <= entry.bound;
    out.push_back(entry);
  }
  return out;
}

AtomModels empirical_centroids(const PlantedInstance& instance, double rho_minus, double rho_plus) {
  if (!(rho_minus > 0.0) || !(rho_plus >= rho_minus)) throw_invalid("rho_minus", "need 0 < rho_minus <= rho_plus");
  const auto clusters = clusters_of(instance);
  const int k = instance.cluster_count();
  const Eigen::Index m = instance.feature_dim();
  AtomModels models;
  for (int i = 0; i < k; ++i) {
    const auto& members = clusters[static_cast<std::size_t>(i)];
    MatrixXd second = MatrixXd::Zero(m, m);
    VectorXd freq = VectorXd::Zero(k);
    for (int v : members) {
      const VectorXd x = instance.features.row(v).transpose();
      second += x * x.transpose();
      if (instance.is_train(v)) freq(instance.noisy_labels[static_cast<std::size_t>(v)]) += 1.0;
    }
    if (!members.empty()) second /= static_cast<double>(members.size());
    const numerics::SymEig eig = numerics::sym_eig(0.5 * (second + second.transpose()));
    const VectorXd clamped = eig.eigenvalues.cwiseMax(rho_minus).cwiseMin(rho_plus);
    MatrixXd cov = eig.eigenvectors * clamped.asDiagonal() * eig.eigenvectors.transpose();
    models.covariances.push_back(0.5 * (cov + cov.transpose()));
    models.label_dists.push_back(freq.sum() > 0.0 ? VectorXd(freq / freq.sum())
                                                  : VectorXd(VectorXd::Constant(k, 1.0 / k)));
  }
  return models;
}

RecoveryReport recovery_report(const PlantedInstance& instance, double gamma, const AtomModels& centroids,
                               double label_weight) {
  RecoveryReport report;
  report.misconnection = misconnection_stats(instance);
  report.block_norms = centered_block_norms(instance);
  report.node_only = node_only_certificate_margin(instance, gamma, centroids, label_weight);
  report.gamma = gamma;
  return report;
}

}  // namespace atomnc
