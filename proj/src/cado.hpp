#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "datagen.hpp"
#include "objective.hpp"

namespace atomnc {

struct Ablation {
  bool use_graph = true;
  bool use_feature = true;
  bool use_label = true;
};

struct SolverConfig {
  int r = 3;
  TermWeights weights;
  double rho_minus = 0.01;
  double rho_plus = 1.0;
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  Ablation ablation;
  // Graph-term direction used by the embedding LMO.
  StructuralGradient structural = StructuralGradient::kEmbeddingSpace;
  // Scales beta_g by r/n so the graph term is measured per average atom.
  bool normalize_graph = true;
};

void validate(const SolverConfig& config);

// Weights the solver actually optimizes: ablated terms zeroed and, when
// enabled, the graph weight scaled by r/n.
TermWeights effective_weights(const SolverConfig& config, int node_count);

struct SolverState {
  int t = 0;
  WeightMatrix w;
  AtomModels models;
  // Entry 0 is the objective at initialization; entry k follows step k.
  std::vector<double> objective_trace;
};

struct Prediction {
  std::vector<int> atom_assignment;
  std::vector<int> class_assignment;
  std::vector<int> atom_to_class;
};

inline constexpr int kStoppingWindow = 10;
inline constexpr double kInitSpread = 0.05;

SolverState init_state(const PlantedInstance& instance, const SolverConfig& config);

// One-hot rows at the per-row argmin of `gradient` (lowest index on ties).
WeightMatrix one_hot_argmin_rows(const Matrix& gradient);
// Exact ties go to the largest `preference` entry, then the lowest index.
// The embedding LMO passes the current W so that identical atom models do
// not pull every node onto atom 0.
WeightMatrix one_hot_argmin_rows(const Matrix& gradient, const Matrix& preference);

WeightMatrix embedding_lmo(const PlantedInstance& instance, const SolverState& state,
                           const SolverConfig& config);
AtomModels model_lmo(const PlantedInstance& instance, const SolverState& state, const SolverConfig& config);

SolverState step(const PlantedInstance& instance, const SolverState& state, const SolverConfig& config);

using IterationObserver = std::function<void(const SolverState&)>;

struct SolveResult {
  SolverState state;
  Prediction prediction;
  bool converged = false;
};

// Runs step() until the relative objective change over kStoppingWindow
// iterations drops below tol or max_iters is reached. The observer, when
// set, sees the initial state and every iterate.
SolveResult solve(const PlantedInstance& instance, const SolverConfig& config,
                  const IterationObserver& observer = {});

Prediction decode_prediction(const PlantedInstance& instance, const SolverState& state,
                             const SolverConfig& config);

// Fraction of test nodes whose predicted class is the true one; NaN when the
// instance has no test nodes.
double test_accuracy(const PlantedInstance& instance, const Prediction& prediction);

}  // namespace atomnc
