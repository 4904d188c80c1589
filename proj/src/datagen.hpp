#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace atomnc {

// Planted-partition generator parameters. Field names match the CLI flags
// and the keys of the params file.
struct GenParams {
  int K = 3;
  int n0 = 300;
  double p = 0.1;
  double q = 0.05;
  int m = 6;
  int m_omega = 4;
  double omega = 0.04;
  double sigma = 1.0;
  double train_ratio = 0.2;
  double pi_correct = 1.0;
  std::uint64_t seed = 0;

  int node_count() const { return K * n0; }
  int train_per_cluster() const;
};

// Throws kInvalidArgument naming the first offending field.
void validate(const GenParams& params);

using AdjacencyMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct PlantedInstance {
  int n = 0;
  AdjacencyMatrix adjacency;  // 0/1, symmetric, zero diagonal
  AdjacencyMatrix polarized;  // +1 edge, -1 non-edge, 0 on the diagonal
  Eigen::MatrixXd features;   // row v is x_v
  std::vector<int> true_labels;
  std::vector<std::uint8_t> train_mask;
  std::vector<int> noisy_labels;  // -1 where train_mask is 0
  GenParams params;

  int cluster_count() const { return params.K; }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  bool is_train(int v) const { return train_mask[static_cast<std::size_t>(v)] != 0; }
  std::vector<int> training_nodes() const;
};

PlantedInstance generate(const GenParams& params);

// Nodes whose true label is `cluster`, ascending.
std::vector<int> cluster_indices(const PlantedInstance& instance, int cluster);

// Recomputes `polarized` from `adjacency`.
AdjacencyMatrix polarize(const AdjacencyMatrix& adjacency);

}  // namespace atomnc
