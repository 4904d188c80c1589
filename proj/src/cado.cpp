#include "cado.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "error.hpp"
#include "numerics.hpp"

namespace atomnc {

namespace {

bool labels_drive_decoding(const PlantedInstance& instance, const SolverConfig& config) {
  return config.ablation.use_label && config.weights.beta_l > 0.0 && !instance.training_nodes().empty();
}

WeightMatrix embedding_lmo_in(const ObjectiveContext& ctx, const SolverState& state, const SolverConfig& config) {
  const TermWeights weights = effective_weights(config, ctx.instance().n);
  return one_hot_argmin_rows(ctx.grad_w(state.w, state.models, weights, config.structural), state.w);
}

AtomModels model_lmo_in(const ObjectiveContext& ctx, const WeightMatrix& w, const AtomModels& models,
                        const SolverConfig& config) {
  const TermWeights weights = effective_weights(config, ctx.instance().n);
  const auto grad_r = ctx.grad_r_all(w, models, weights);
  const auto grad_pi = ctx.grad_pi_all(w, models, weights);
  AtomModels out;
  for (std::size_t i = 0; i < grad_r.size(); ++i) {
    out.covariances.push_back(numerics::project_spectral_box(grad_r[i], config.rho_minus, config.rho_plus));
    out.label_dists.push_back(numerics::simplex_vertex_argmin(grad_pi[i]));
  }
  return out;
}

double checked_objective(const ObjectiveContext& ctx, const SolverState& state, const SolverConfig& config) {
  const double value = ctx.objective(state.w, state.models, effective_weights(config, ctx.instance().n));
  if (!std::isfinite(value)) {
    throw_numerical("objective became non-finite at iteration " + std::to_string(state.t));
  }
  return value;
}

SolverState step_in(const ObjectiveContext& ctx, const SolverState& state, const SolverConfig& config) {
  const double gamma = 2.0 / (static_cast<double>(state.t) + 2.0);
  SolverState next = state;

  const WeightMatrix target = embedding_lmo_in(ctx, state, config);
  next.w = (1.0 - gamma) * state.w + gamma * target;

  const AtomModels lmo = model_lmo_in(ctx, next.w, state.models, config);
  for (std::size_t i = 0; i < lmo.covariances.size(); ++i) {
    next.models.covariances[i] = (1.0 - gamma) * state.models.covariances[i] + gamma * lmo.covariances[i];
    next.models.label_dists[i] = (1.0 - gamma) * state.models.label_dists[i] + gamma * lmo.label_dists[i];
  }

  next.t = state.t + 1;
  next.objective_trace.push_back(checked_objective(ctx, next, config));
  return next;
}

}  // namespace

void validate(const SolverConfig& config) {
  if (config.r < 1) throw_invalid("r", "must be >= 1");
  validate(config.weights);
  if (!(config.rho_minus > 0.0) || !std::isfinite(config.rho_minus)) throw_invalid("rho_minus", "must be > 0");
  if (!(config.rho_plus > config.rho_minus) || !std::isfinite(config.rho_plus)) {
    throw_invalid("rho_plus", "must exceed rho_minus");
  }
  // max_iters = 0 is accepted and returns the initial state.
  if (config.max_iters < 0) throw_invalid("max_iters", "must be >= 0");
  if (!(config.tol >= 0.0)) throw_invalid("tol", "must be >= 0");
}

TermWeights effective_weights(const SolverConfig& config, int node_count) {
  TermWeights w = config.weights;
  if (!config.ablation.use_graph) w.beta_g = 0.0;
  if (!config.ablation.use_feature) w.beta_f = 0.0;
  if (!config.ablation.use_label) w.beta_l = 0.0;
  if (config.normalize_graph && node_count > 0) {
    w.beta_g *= static_cast<double>(config.r) / static_cast<double>(node_count);
  }
  return w;
}

SolverState init_state(const PlantedInstance& instance, const SolverConfig& config) {
  validate(config);
  if (config.r > instance.n) {
    throw_invalid("r", "atom count " + std::to_string(config.r) + " exceeds node count " +
                           std::to_string(instance.n));
  }
  const int r = config.r;
  const int m = instance.feature_dim();
  const int k = instance.cluster_count();

  SolverState state;
  state.w.resize(instance.n, r);
  std::mt19937_64 rng(config.seed);
  // Zero-mean perturbations of half-width a stay within +-2a of 1/r.
  const double half_width = 0.5 * std::min(kInitSpread, 1.0 / r);
  std::uniform_real_distribution<double> jitter(-half_width, half_width);
  Vector row(r);
  for (int v = 0; v < instance.n; ++v) {
    for (int i = 0; i < r; ++i) row(i) = jitter(rng);
    row.array() += 1.0 / r - row.mean();
    row = row.cwiseMax(0.0);
    state.w.row(v) = (row / row.sum()).transpose();
  }

  const double mid = 0.5 * (config.rho_minus + config.rho_plus);
  for (int i = 0; i < r; ++i) {
    state.models.covariances.push_back(mid * Matrix::Identity(m, m));
    state.models.label_dists.push_back(Vector::Constant(k, 1.0 / k));
  }

  ObjectiveContext ctx(instance);
  state.objective_trace.push_back(checked_objective(ctx, state, config));
  return state;
}

WeightMatrix one_hot_argmin_rows(const Matrix& gradient) {
  WeightMatrix out = WeightMatrix::Zero(gradient.rows(), gradient.cols());
  for (Eigen::Index v = 0; v < gradient.rows(); ++v) {
    out(v, numerics::argmin_lowest(gradient.row(v).transpose())) = 1.0;
  }
  return out;
}

WeightMatrix one_hot_argmin_rows(const Matrix& gradient, const Matrix& preference) {
  if (preference.rows() != gradient.rows() || preference.cols() != gradient.cols()) {
    throw_invalid("preference", "shape must match the gradient");
  }
  WeightMatrix out = WeightMatrix::Zero(gradient.rows(), gradient.cols());
  for (Eigen::Index v = 0; v < gradient.rows(); ++v) {
    Eigen::Index best = numerics::argmin_lowest(gradient.row(v).transpose());
    for (Eigen::Index i = best + 1; i < gradient.cols(); ++i) {
      if (gradient(v, i) == gradient(v, best) && preference(v, i) > preference(v, best)) best = i;
    }
    out(v, best) = 1.0;
  }
  return out;
}

WeightMatrix embedding_lmo(const PlantedInstance& instance, const SolverState& state,
                           const SolverConfig& config) {
  return embedding_lmo_in(ObjectiveContext(instance), state, config);
}

AtomModels model_lmo(const PlantedInstance& instance, const SolverState& state, const SolverConfig& config) {
  return model_lmo_in(ObjectiveContext(instance), state.w, state.models, config);
}

SolverState step(const PlantedInstance& instance, const SolverState& state, const SolverConfig& config) {
  validate(config);
  return step_in(ObjectiveContext(instance), state, config);
}

SolveResult solve(const PlantedInstance& instance, const SolverConfig& config, const IterationObserver& observer) {
  SolveResult result;
  result.state = init_state(instance, config);
  if (observer) observer(result.state);

  const ObjectiveContext ctx(instance);
  const auto& trace = result.state.objective_trace;
  while (result.state.t < config.max_iters) {
    result.state = step_in(ctx, result.state, config);
    if (observer) observer(result.state);
    if (trace.size() > static_cast<std::size_t>(kStoppingWindow)) {
      const double now = trace.back();
      const double before = trace[trace.size() - 1 - kStoppingWindow];
      if (std::abs(now - before) / std::max(1.0, std::abs(now)) < config.tol) {
        result.converged = true;
        break;
      }
    }
  }
  result.prediction = decode_prediction(instance, result.state, config);
  return result;
}

Prediction decode_prediction(const PlantedInstance& instance, const SolverState& state,
                             const SolverConfig& config) {
  const int r = static_cast<int>(state.w.cols());
  const int k = instance.cluster_count();
  Prediction out;
  out.atom_assignment.resize(static_cast<std::size_t>(instance.n));
  for (int v = 0; v < instance.n; ++v) {
    Eigen::Index best = 0;
    state.w.row(v).maxCoeff(&best);
    out.atom_assignment[static_cast<std::size_t>(v)] = static_cast<int>(best);
  }

  if (labels_drive_decoding(instance, config)) {
    for (int i = 0; i < r; ++i) {
      Eigen::Index best = 0;
      state.models.label_dists[static_cast<std::size_t>(i)].maxCoeff(&best);
      out.atom_to_class.push_back(static_cast<int>(best));
    }
  } else {
    if (r != k) {
      throw Error(ErrorKind::kUnsupported,
                  "label-free decoding needs r == K (r=" + std::to_string(r) + ", K=" + std::to_string(k) + ")");
    }
    // Align atoms to classes on the training split only.
    Matrix agreement = Matrix::Zero(r, k);
    for (int v : instance.training_nodes()) {
      agreement(out.atom_assignment[static_cast<std::size_t>(v)], instance.true_labels[static_cast<std::size_t>(v)]) += 1.0;
    }
    out.atom_to_class = numerics::max_weight_assignment(agreement);
  }

  out.class_assignment.resize(out.atom_assignment.size());
  for (std::size_t v = 0; v < out.atom_assignment.size(); ++v) {
    out.class_assignment[v] = out.atom_to_class[static_cast<std::size_t>(out.atom_assignment[v])];
  }
  return out;
}

double test_accuracy(const PlantedInstance& instance, const Prediction& prediction) {
  int total = 0;
  int correct = 0;
  for (int v = 0; v < instance.n; ++v) {
    if (instance.is_train(v)) continue;
    ++total;
    if (prediction.class_assignment[static_cast<std::size_t>(v)] == instance.true_labels[static_cast<std::size_t>(v)]) {
      ++correct;
    }
  }
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(correct) / total;
}

}  // namespace atomnc
