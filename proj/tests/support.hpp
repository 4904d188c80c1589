#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "datagen.hpp"
#include "objective.hpp"

namespace testsupport {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_symmetric(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = normal(rng);
  }
  return 0.5 * (a + a.transpose());
}

inline MatrixXd random_orthogonal(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  MatrixXd a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(m, m);
}

// Uniform eigenvalues in [lo, hi] under a random rotation.
inline MatrixXd random_box_matrix(int m, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(lo, hi);
  VectorXd eig(m);
  for (int i = 0; i < m; ++i) eig(i) = unit(rng);
  const MatrixXd q = random_orthogonal(m, rng);
  MatrixXd out = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

inline VectorXd random_simplex(int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = expo(rng);
  return v / v.sum();
}

inline MatrixXd random_row_simplex(int n, int r, std::mt19937_64& rng) {
  MatrixXd w(n, r);
  for (int v = 0; v < n; ++v) w.row(v) = random_simplex(r, rng).transpose();
  return w;
}

inline atomnc::AtomModels random_models(int r, int m, int k, double lo, double hi, std::mt19937_64& rng) {
  atomnc::AtomModels models;
  for (int i = 0; i < r; ++i) {
    models.covariances.push_back(random_box_matrix(m, lo, hi, rng));
    models.label_dists.push_back(random_simplex(k, rng));
  }
  return models;
}

inline atomnc::PlantedInstance small_instance(int K, int n0, int m, std::uint64_t seed, double train_ratio = 0.5) {
  atomnc::GenParams g;
  g.K = K;
  g.n0 = n0;
  g.m = m;
  g.m_omega = m / 2;
  g.p = 0.6;
  g.q = 0.2;
  g.omega = 0.3;
  g.train_ratio = train_ratio;
  g.seed = seed;
  return atomnc::generate(g);
}

// Dense objective evaluation with an explicit L and explicit inverses.
inline double dense_objective(const atomnc::PlantedInstance& inst, const MatrixXd& w, const atomnc::AtomModels& models,
                              const atomnc::TermWeights& weights) {
  const MatrixXd s = w.cwiseMax(0.0).cwiseSqrt();
  const MatrixXd l = s * s.transpose();
  const MatrixXd abar = inst.polarized.cast<double>();
  double value = -weights.beta_g * abar.cwiseProduct(l).sum();
  const int m = inst.feature_dim();
  for (int v = 0; v < inst.n; ++v) {
    MatrixXd rv = MatrixXd::Zero(m, m);
    VectorXd pv = VectorXd::Zero(models.label_dists[0].size());
    for (int i = 0; i < w.cols(); ++i) {
      rv += w(v, i) * models.covariances[i];
      pv += w(v, i) * models.label_dists[i];
    }
    const VectorXd x = inst.features.row(v).transpose();
    value += weights.beta_f * (x.dot(rv.inverse() * x) + rv.trace()) / m;
    if (inst.is_train(v)) value -= weights.beta_l * pv(inst.noisy_labels[v]);
  }
  return value;
}

}  // namespace testsupport
