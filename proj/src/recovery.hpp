#pragma once

#include <vector>

#include <Eigen/Dense>

#include "datagen.hpp"
#include "objective.hpp"

namespace atomnc {

// Misconnection rates between true clusters and the two margins derived
// from them.
struct MisconnectionStats {
  Eigen::MatrixXd rho_plus;   // K x K, symmetric
  double homogeneity_margin;  // smallest delta satisfying homogeneity
  double visibility_margin;   // min over (i, j) of 1/2 - rho_plus(i, j)
};

// Two conventions for a node's own cluster. The literal one counts the
// missing self-loop as a misconnection (rho_plus(i, i) >= 1/n_i); the
// self-excluded one drops v from its own cluster (denominator n_j - 1).
struct MisconnectionReport {
  MisconnectionStats literal;
  MisconnectionStats self_excluded;
};

MisconnectionReport misconnection_stats(const PlantedInstance& instance);

struct BlockNorms {
  double intra = 0.0;  // ||A~_i||_op, both ends in C_i
  double extra = 0.0;  // ||A~^i||_op, no end in C_i
  double inter = 0.0;  // ||B~_i||_op, exactly one end in C_i
  double intra_scale = 0.0;  // sqrt(n_i)
  double extra_scale = 0.0;  // sqrt(n)
  double inter_scale = 0.0;  // sqrt(n)
};

// Operator norms of the blocks of A~ = A - N_ij / (n_i n_j), per cluster.
std::vector<BlockNorms> centered_block_norms(const PlantedInstance& instance);

struct NodeOnlyBound {
  double rho = 0.0;    // max over u, v in C_i of ||grad f_v - grad f_u|| at the centroid
  double bound = 0.0;  // gamma * n_i / n
  bool satisfied = false;
};

/// Per-cluster node-only certificate check with `centroids` (atom i for
/// cluster i) standing in for the biased centroids. The per-node gradient
/// stacks d f_feature / dR and, for training nodes, label_weight times
/// d f_label / dpi. Throws kInvalidArgument on an empty cluster or when the
/// centroid count differs from K.
std::vector<NodeOnlyBound> node_only_certificate_margin(const PlantedInstance& instance, double gamma,
                                                        const AtomModels& centroids, double label_weight = 1.0);

// Per-cluster second-moment covariances with eigenvalues clamped into
// [rho_minus, rho_plus], and label distributions from the training-label
// frequencies of each cluster (uniform when a cluster has none).
AtomModels empirical_centroids(const PlantedInstance& instance, double rho_minus, double rho_plus);

struct RecoveryReport {
  MisconnectionReport misconnection;
  std::vector<BlockNorms> block_norms;
  std::vector<NodeOnlyBound> node_only;
  double gamma = 0.0;
};

RecoveryReport recovery_report(const PlantedInstance& instance, double gamma, const AtomModels& centroids,
                               double label_weight = 1.0);

}  // namespace atomnc
