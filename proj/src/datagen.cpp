#include "datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "error.hpp"

namespace atomnc {

namespace {

void require_probability(const char* field, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw_invalid(field, "must lie in [0, 1]");
}

}  // namespace

int GenParams::train_per_cluster() const {
  return static_cast<int>(std::lround(train_ratio * static_cast<double>(n0)));
}

void validate(const GenParams& params) {
  if (params.K < 1) throw_invalid("K", "must be >= 1");
  if (params.n0 < 1) throw_invalid("n0", "must be >= 1");
  require_probability("p", params.p);
  require_probability("q", params.q);
  if (params.m < 1) throw_invalid("m", "must be >= 1");
  if (params.m_omega < 0 || params.m_omega > params.m) {
    throw_invalid("m_omega", "must lie in [0, m]");
  }
  if (!(params.omega >= 0.0) || !std::isfinite(params.omega)) throw_invalid("omega", "must be >= 0");
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) throw_invalid("sigma", "must be > 0");
  require_probability("train_ratio", params.train_ratio);
  require_probability("pi_correct", params.pi_correct);
}

std::vector<int> PlantedInstance::training_nodes() const {
  std::vector<int> out;
  for (int v = 0; v < n; ++v) {
    if (is_train(v)) out.push_back(v);
  }
  return out;
}

AdjacencyMatrix polarize(const AdjacencyMatrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  AdjacencyMatrix out(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    for (Eigen::Index u = 0; u < n; ++u) {
      out(u, v) = u == v ? 0 : (adjacency(u, v) != 0 ? 1 : -1);
    }
  }
  return out;
}

PlantedInstance generate(const GenParams& params) {
  validate(params);

  PlantedInstance inst;
  inst.params = params;
  inst.n = params.node_count();
  const int n = inst.n;
  const int m = params.m;

  // Stream order is fixed: labels, graph, subspace bases, features, training
  // split, label noise.
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  inst.true_labels.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) inst.true_labels[static_cast<std::size_t>(v)] = v / params.n0;

  inst.adjacency = AdjacencyMatrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool same = inst.true_labels[static_cast<std::size_t>(u)] ==
                        inst.true_labels[static_cast<std::size_t>(v)];
      if (unit(rng) < (same ? params.p : params.q)) {
        inst.adjacency(u, v) = 1;
        inst.adjacency(v, u) = 1;
      }
    }
  }
  inst.polarized = polarize(inst.adjacency);

  std::vector<Eigen::MatrixXd> bases;
  bases.reserve(static_cast<std::size_t>(params.K));
  for (int i = 0; i < params.K; ++i) {
    Eigen::MatrixXd g(m, m);
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < m; ++r) g(r, c) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    bases.push_back(qr.householderQ() * Eigen::MatrixXd::Identity(m, m));
  }

  Eigen::VectorXd scale(m);
  for (int k = 0; k < m; ++k) scale(k) = k < params.m_omega ? params.omega : params.sigma;

  inst.features.resize(n, m);
  Eigen::VectorXd z(m);
  for (int v = 0; v < n; ++v) {
    for (int k = 0; k < m; ++k) z(k) = gauss(rng);
    const auto& basis = bases[static_cast<std::size_t>(inst.true_labels[static_cast<std::size_t>(v)])];
    inst.features.row(v) = (basis * scale.asDiagonal() * z).transpose();
  }

  inst.train_mask.assign(static_cast<std::size_t>(n), 0);
  inst.noisy_labels.assign(static_cast<std::size_t>(n), -1);
  const int quota = params.train_per_cluster();
  for (int i = 0; i < params.K; ++i) {
    std::vector<int> members(static_cast<std::size_t>(params.n0));
    std::iota(members.begin(), members.end(), i * params.n0);
    std::shuffle(members.begin(), members.end(), rng);
    for (int k = 0; k < quota; ++k) inst.train_mask[static_cast<std::size_t>(members[static_cast<std::size_t>(k)])] = 1;
  }
  for (int v = 0; v < n; ++v) {
    if (!inst.is_train(v)) continue;
    const int truth = inst.true_labels[static_cast<std::size_t>(v)];
    int label = truth;
    if (params.K > 1 && unit(rng) >= params.pi_correct) {
      std::uniform_int_distribution<int> other(0, params.K - 2);
      label = other(rng);
      if (label >= truth) ++label;
    }
    inst.noisy_labels[static_cast<std::size_t>(v)] = label;
  }
  return inst;
}

std::vector<int> cluster_indices(const PlantedInstance& instance, int cluster) {
  if (cluster < 0 || cluster >= instance.cluster_count()) {
    throw_invalid("cluster", "index " + std::to_string(cluster) + " out of range [0, " +
                                 std::to_string(instance.cluster_count()) + ")");
  }
  std::vector<int> out;
  for (int v = 0; v < instance.n; ++v) {
    if (instance.true_labels[static_cast<std::size_t>(v)] == cluster) out.push_back(v);
  }
  return out;
}

}  // namespace atomnc
