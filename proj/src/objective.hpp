#pragma once

#include <vector>

#include <Eigen/Dense>

#include "datagen.hpp"

namespace atomnc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Per-atom models: covariance R_i in the spectral box and label
// distribution pi_i in the simplex.
struct AtomModels {
  std::vector<Matrix> covariances;
  std::vector<Vector> label_dists;

  int atom_count() const { return static_cast<int>(covariances.size()); }
};

// n x r, W(v, i) is the squared embedding entry of node v on atom i.
using WeightMatrix = Matrix;

struct TermWeights {
  double beta_g = 1.0;
  double beta_f = 2.5;
  double beta_l = 13.0;
};

// How the graph part of dphi/dW is formed.
enum class StructuralGradient {
  // d(-<A, L>)/dW_vi = -sum_u A_uv sqrt(W_ui) / sqrt(max(W_vi, floor)).
  kWeightSpace,
  // Same sum without the 1/sqrt(W_vi) factor: the gradient with respect to
  // the embedding entry sqrt(W_vi), halved. Finite on the simplex boundary.
  kEmbeddingSpace,
};

inline constexpr double kStructuralFloor = 1e-12;

struct MixedModel {
  Matrix covariance;
  Vector label_dist;
};

// (1/m) (x' R^-1 x + tr R).
double f_feature(const Vector& x, const Matrix& r);

// -pi[label].
double f_label(int label, const Vector& pi);

MixedModel mixed_models(const WeightMatrix& w, const AtomModels& models, int v);

void validate(const TermWeights& weights);

// Pre-computed, solve-invariant view of an instance. Building one is O(n^2);
// the solver keeps a single context for the whole run.
class ObjectiveContext {
 public:
  explicit ObjectiveContext(const PlantedInstance& instance);

  const PlantedInstance& instance() const { return *instance_; }
  const Matrix& polarized() const { return polarized_; }
  const std::vector<int>& training() const { return training_; }

  // Row v holds R_v^-1 x_v for the current mixture.
  Matrix whitened_features(const WeightMatrix& w, const AtomModels& models) const;

  double objective(const WeightMatrix& w, const AtomModels& models, const TermWeights& weights) const;
  Matrix grad_w(const WeightMatrix& w, const AtomModels& models, const TermWeights& weights,
                StructuralGradient form = StructuralGradient::kWeightSpace) const;
  // Gradient blocks for every atom at once; whitened features are shared.
  std::vector<Matrix> grad_r_all(const WeightMatrix& w, const AtomModels& models,
                                 const TermWeights& weights) const;
  std::vector<Vector> grad_pi_all(const WeightMatrix& w, const AtomModels& models,
                                  const TermWeights& weights) const;

 private:
  const PlantedInstance* instance_;
  Matrix polarized_;
  std::vector<int> training_;
};

double objective_phi(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
                     const TermWeights& weights);

// Sum over node pairs of ||theta_u - theta_v||, theta_v = (vec R_v, pi_v).
double son_penalty(const WeightMatrix& w, const AtomModels& models);

Matrix grad_W(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
              const TermWeights& weights, StructuralGradient form = StructuralGradient::kWeightSpace);
Matrix grad_R(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
              const TermWeights& weights, int atom);
Vector grad_pi(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
               const TermWeights& weights, int atom);

}  // namespace atomnc
