#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "datagen.hpp"

namespace atomnc {

enum class LaplacianKind { kUnnormalized, kSymmetricNormalized };

struct SpectralConfig {
  int K = 3;
  LaplacianKind laplacian = LaplacianKind::kSymmetricNormalized;
  int kmeans_restarts = 10;
  int kmeans_iters = 100;
  std::uint64_t seed = 0;
};

void validate(const SpectralConfig& config);

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
};

/// Lloyd's algorithm from k-means++ seeding; the restart with the lowest
/// inertia wins (earliest restart on ties). An emptied cluster is reseeded
/// at the point farthest from its centroid. Throws kInvalidArgument when
/// there are fewer points than clusters.
KMeansResult kmeans(const Eigen::MatrixXd& points, int K, int restarts, int iters, std::uint64_t seed);

// Sum of squared distances from each point to the mean of its cluster.
double kmeans_inertia(const Eigen::MatrixXd& points, const std::vector<int>& assignment, int K);

/// Spectral clustering of a simple graph: K eigenvectors of smallest
/// eigenvalue of the chosen Laplacian (rows normalized for the symmetric
/// variant), then k-means.
std::vector<int> spectral_cluster(const AdjacencyMatrix& adjacency, const SpectralConfig& config);

// Best agreement between `predicted` and `truth` over relabelings of the
// predicted clusters, counted on nodes where `mask` is 1 (all when empty).
double best_permutation_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, int K,
                                 const std::vector<std::uint8_t>& mask = {});

// Relabeling of predicted clusters that maximizes agreement with `truth` on
// the masked nodes; result[c] is the class assigned to cluster c.
std::vector<int> best_relabeling(const std::vector<int>& predicted, const std::vector<int>& truth, int K,
                                 const std::vector<std::uint8_t>& mask = {});

}  // namespace atomnc
