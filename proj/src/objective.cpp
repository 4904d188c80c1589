#include "objective.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "numerics.hpp"

namespace atomnc {

namespace {

Eigen::LLT<Matrix> factor(const Matrix& r) {
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) throw_numerical("mixed covariance is not positive definite");
  return llt;
}

Matrix sqrt_weights(const WeightMatrix& w) { return w.cwiseMax(0.0).cwiseSqrt(); }

void check_shapes(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models) {
  if (w.rows() != instance.n) throw_invalid("W", "row count must equal node count");
  if (w.cols() != models.atom_count() ||
      models.label_dists.size() != models.covariances.size()) {
    throw_invalid("W", "column count must equal atom count");
  }
  for (int i = 0; i < models.atom_count(); ++i) {
    const auto& r = models.covariances[static_cast<std::size_t>(i)];
    if (r.rows() != instance.feature_dim() || r.cols() != instance.feature_dim()) {
      throw_invalid("covariances", "atom " + std::to_string(i) + " has wrong dimension");
    }
    if (models.label_dists[static_cast<std::size_t>(i)].size() != instance.cluster_count()) {
      throw_invalid("label_dists", "atom " + std::to_string(i) + " has wrong length");
    }
  }
}

}  // namespace

double f_feature(const Vector& x, const Matrix& r) {
  if (r.rows() != x.size() || r.cols() != x.size()) throw_invalid("R", "dimension mismatch");
  const Vector y = numerics::spd_solve(r, x);
  return (x.dot(y) + r.trace()) / static_cast<double>(x.size());
}

double f_label(int label, const Vector& pi) {
  if (label < 0 || label >= pi.size()) {
    throw_invalid("y_tilde", "class index " + std::to_string(label) + " out of range");
  }
  return -pi(label);
}

MixedModel mixed_models(const WeightMatrix& w, const AtomModels& models, int v) {
  if (v < 0 || v >= w.rows()) throw_invalid("v", "node index out of range");
  if (models.atom_count() == 0 || w.cols() != models.atom_count()) {
    throw_invalid("models", "atom count must match W columns");
  }
  MixedModel out{Matrix::Zero(models.covariances[0].rows(), models.covariances[0].cols()),
                 Vector::Zero(models.label_dists[0].size())};
  for (int i = 0; i < models.atom_count(); ++i) {
    out.covariance += w(v, i) * models.covariances[static_cast<std::size_t>(i)];
    out.label_dist += w(v, i) * models.label_dists[static_cast<std::size_t>(i)];
  }
  return out;
}

void validate(const TermWeights& weights) {
  auto check = [](const char* field, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw_invalid(field, "must be finite and >= 0");
  };
  check("beta_g", weights.beta_g);
  check("beta_f", weights.beta_f);
  check("beta_l", weights.beta_l);
}

ObjectiveContext::ObjectiveContext(const PlantedInstance& instance)
    : instance_(&instance),
      polarized_(instance.polarized.cast<double>()),
      training_(instance.training_nodes()) {}

Matrix ObjectiveContext::whitened_features(const WeightMatrix& w, const AtomModels& models) const {
  const auto& x = instance_->features;
  const Eigen::Index m = x.cols();
  Matrix y(x.rows(), m);
  Matrix rv(m, m);
  for (Eigen::Index v = 0; v < x.rows(); ++v) {
    rv.setZero();
    for (int i = 0; i < models.atom_count(); ++i) rv += w(v, i) * models.covariances[static_cast<std::size_t>(i)];
    y.row(v) = factor(rv).solve(x.row(v).transpose()).transpose();
  }
  return y;
}

double ObjectiveContext::objective(const WeightMatrix& w, const AtomModels& models,
                                   const TermWeights& weights) const {
  check_shapes(*instance_, w, models);
  const auto& x = instance_->features;
  const double m = static_cast<double>(x.cols());
  double value = 0.0;

  if (weights.beta_g != 0.0) {
    const Matrix s = sqrt_weights(w);
    // <A, S S'> = tr(S' A S)
    value -= weights.beta_g * (s.transpose() * (polarized_ * s)).trace();
  }
  if (weights.beta_f != 0.0) {
    double feature = 0.0;
    Matrix rv(x.cols(), x.cols());
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
      rv.setZero();
      for (int i = 0; i < models.atom_count(); ++i) rv += w(v, i) * models.covariances[static_cast<std::size_t>(i)];
      const Vector xv = x.row(v).transpose();
      feature += (xv.dot(factor(rv).solve(xv)) + rv.trace()) / m;
    }
    value += weights.beta_f * feature;
  }
  if (weights.beta_l != 0.0) {
    double label = 0.0;
    for (int v : training_) {
      const int y = instance_->noisy_labels[static_cast<std::size_t>(v)];
      for (int i = 0; i < models.atom_count(); ++i) {
        label -= w(v, i) * models.label_dists[static_cast<std::size_t>(i)](y);
      }
    }
    value += weights.beta_l * label;
  }
  return value;
}

Matrix ObjectiveContext::grad_w(const WeightMatrix& w, const AtomModels& models, const TermWeights& weights,
                                StructuralGradient form) const {
  check_shapes(*instance_, w, models);
  const Eigen::Index n = w.rows();
  const int r = models.atom_count();
  Matrix g = Matrix::Zero(n, r);

  if (weights.beta_g != 0.0) {
    const Matrix as = polarized_ * sqrt_weights(w);
    if (form == StructuralGradient::kWeightSpace) {
      g -= weights.beta_g * as.cwiseQuotient(w.cwiseMax(kStructuralFloor).cwiseSqrt());
    } else {
      g -= weights.beta_g * as;
    }
  }
  if (weights.beta_f != 0.0) {
    const Matrix y = whitened_features(w, models);
    const double m = static_cast<double>(y.cols());
    for (int i = 0; i < r; ++i) {
      const Matrix& ri = models.covariances[static_cast<std::size_t>(i)];
      const double tr = ri.trace();
      const Vector quad = ((y * ri).cwiseProduct(y)).rowwise().sum();
      g.col(i).array() += weights.beta_f * (tr - quad.array()) / m;
    }
  }
  if (weights.beta_l != 0.0) {
    for (int v : training_) {
      const int y = instance_->noisy_labels[static_cast<std::size_t>(v)];
      for (int i = 0; i < r; ++i) g(v, i) -= weights.beta_l * models.label_dists[static_cast<std::size_t>(i)](y);
    }
  }
  return g;
}

std::vector<Matrix> ObjectiveContext::grad_r_all(const WeightMatrix& w, const AtomModels& models,
                                                 const TermWeights& weights) const {
  check_shapes(*instance_, w, models);
  const Eigen::Index m = instance_->features.cols();
  const int r = models.atom_count();
  std::vector<Matrix> out(static_cast<std::size_t>(r), Matrix::Zero(m, m));
  if (weights.beta_f == 0.0) return out;

  const Matrix y = whitened_features(w, models);
  const double scale = weights.beta_f / static_cast<double>(m);
  for (int i = 0; i < r; ++i) {
    const Vector col = w.col(i);
    // sum_v W_vi (I - y_v y_v')
    Matrix gi = col.sum() * Matrix::Identity(m, m) - y.transpose() * col.asDiagonal() * y;
    gi = scale * gi;
    out[static_cast<std::size_t>(i)] = 0.5 * (gi + gi.transpose());
  }
  return out;
}

std::vector<Vector> ObjectiveContext::grad_pi_all(const WeightMatrix& w, const AtomModels& models,
                                                  const TermWeights& weights) const {
  check_shapes(*instance_, w, models);
  const int r = models.atom_count();
  const int k = instance_->cluster_count();
  std::vector<Vector> out(static_cast<std::size_t>(r), Vector::Zero(k));
  if (weights.beta_l == 0.0) return out;
  for (int v : training_) {
    const int y = instance_->noisy_labels[static_cast<std::size_t>(v)];
    for (int i = 0; i < r; ++i) out[static_cast<std::size_t>(i)](y) -= weights.beta_l * w(v, i);
  }
  return out;
}

double objective_phi(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
                     const TermWeights& weights) {
  return ObjectiveContext(instance).objective(w, models, weights);
}

double son_penalty(const WeightMatrix& w, const AtomModels& models) {
  const Eigen::Index n = w.rows();
  if (n == 0) return 0.0;
  const Eigen::Index m = models.covariances.at(0).rows();
  const Eigen::Index k = models.label_dists.at(0).size();
  Matrix theta(n, m * m + k);
  for (Eigen::Index v = 0; v < n; ++v) {
    const MixedModel mix = mixed_models(w, models, static_cast<int>(v));
    theta.row(v).head(m * m) = Eigen::Map<const Vector>(mix.covariance.data(), m * m).transpose();
    theta.row(v).tail(k) = mix.label_dist.transpose();
  }
  double total = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) total += (theta.row(u) - theta.row(v)).norm();
  }
  return total;
}

Matrix grad_W(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
              const TermWeights& weights, StructuralGradient form) {
  return ObjectiveContext(instance).grad_w(w, models, weights, form);
}

Matrix grad_R(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
              const TermWeights& weights, int atom) {
  if (atom < 0 || atom >= models.atom_count()) throw_invalid("atom", "index out of range");
  return ObjectiveContext(instance).grad_r_all(w, models, weights)[static_cast<std::size_t>(atom)];
}

Vector grad_pi(const PlantedInstance& instance, const WeightMatrix& w, const AtomModels& models,
               const TermWeights& weights, int atom) {
  if (atom < 0 || atom >= models.atom_count()) throw_invalid("atom", "index out of range");
  return ObjectiveContext(instance).grad_pi_all(w, models, weights)[static_cast<std::size_t>(atom)];
}

}  // namespace atomnc
