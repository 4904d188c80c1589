#include "atomnc/atomnc.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>

#include "baseline.hpp"
#include "cado.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "recovery.hpp"

struct atomnc_instance {
  std::shared_ptr<const atomnc::PlantedInstance> data;
};

struct atomnc_solution {
  std::shared_ptr<const atomnc::PlantedInstance> instance;
  atomnc::SolveResult result;
  double accuracy = 0.0;
};

struct atomnc_report {
  atomnc::RecoveryReport data;
};

namespace {

thread_local std::string g_last_error;

atomnc_status status_of(atomnc::ErrorKind kind) {
  switch (kind) {
    case atomnc::ErrorKind::kInvalidArgument: return ATOMNC_INVALID_ARGUMENT;
    case atomnc::ErrorKind::kNumerical: return ATOMNC_NUMERICAL;
    case atomnc::ErrorKind::kUnsupported: return ATOMNC_UNSUPPORTED;
    case atomnc::ErrorKind::kIo: return ATOMNC_IO;
  }
  return ATOMNC_INTERNAL;
}

template <class Fn>
atomnc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return ATOMNC_OK;
  } catch (const atomnc::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ATOMNC_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ATOMNC_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ATOMNC_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) atomnc::throw_invalid(name, "must not be NULL");
}

atomnc::GenParams to_core(const atomnc_gen_params& p) {
  atomnc::GenParams g;
  g.K = p.K;
  g.n0 = p.n0;
  g.p = p.p;
  g.q = p.q;
  g.m = p.m;
  g.m_omega = p.m_omega;
  g.omega = p.omega;
  g.sigma = p.sigma;
  g.train_ratio = p.train_ratio;
  g.pi_correct = p.pi_correct;
  g.seed = p.seed;
  return g;
}

atomnc_gen_params from_core(const atomnc::GenParams& g) {
  return {g.K, g.n0, g.p, g.q, g.m, g.m_omega, g.omega, g.sigma, g.train_ratio, g.pi_correct, g.seed};
}

atomnc::SolverConfig to_core(const atomnc_solver_config& c) {
  atomnc::SolverConfig s;
  s.r = c.r;
  s.weights = {c.beta_g, c.beta_f, c.beta_l};
  s.rho_minus = c.rho_minus;
  s.rho_plus = c.rho_plus;
  s.max_iters = c.max_iters;
  s.tol = c.tol;
  s.seed = c.seed;
  s.ablation = {c.use_graph != 0, c.use_feature != 0, c.use_label != 0};
  s.normalize_graph = c.normalize_graph != 0;
  return s;
}

}  // namespace

extern "C" {

const char* atomnc_last_error(void) { return g_last_error.c_str(); }

const char* atomnc_status_string(atomnc_status status) {
  switch (status) {
    case ATOMNC_OK: return "ok";
    case ATOMNC_INVALID_ARGUMENT: return "invalid argument";
    case ATOMNC_NUMERICAL: return "numerical failure";
    case ATOMNC_UNSUPPORTED: return "unsupported configuration";
    case ATOMNC_IO: return "i/o error";
    case ATOMNC_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void atomnc_gen_params_default(atomnc_gen_params* params) {
  if (params != nullptr) *params = from_core(atomnc::GenParams{});
}

void atomnc_solver_config_default(atomnc_solver_config* config) {
  if (config == nullptr) return;
  const atomnc::SolverConfig s;
  *config = {s.r, s.weights.beta_g, s.weights.beta_f, s.weights.beta_l, s.rho_minus, s.rho_plus, s.max_iters,
             s.tol, s.seed, 1, 1, 1, s.normalize_graph ? 1 : 0};
}

atomnc_status atomnc_instance_generate(const atomnc_gen_params* params, atomnc_instance** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = nullptr;
    auto data = std::make_shared<const atomnc::PlantedInstance>(atomnc::generate(to_core(*params)));
    *out = new atomnc_instance{std::move(data)};
  });
}

atomnc_status atomnc_instance_load(const char* dir, atomnc_instance** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto data = std::make_shared<const atomnc::PlantedInstance>(atomnc::io::load_instance(dir));
    *out = new atomnc_instance{std::move(data)};
  });
}

atomnc_status atomnc_instance_save(const atomnc_instance* instance, const char* dir) {
  return guarded([&] {
    require(instance, "instance");
    require(dir, "dir");
    atomnc::io::save_instance(*instance->data, dir);
  });
}

void atomnc_instance_free(atomnc_instance* instance) { delete instance; }

atomnc_status atomnc_instance_counts(const atomnc_instance* instance, int* n, int* K, int* m, int* edges,
                                     int* train) {
  return guarded([&] {
    require(instance, "instance");
    const auto& d = *instance->data;
    if (n != nullptr) *n = d.n;
    if (K != nullptr) *K = d.cluster_count();
    if (m != nullptr) *m = d.feature_dim();
    if (edges != nullptr) *edges = static_cast<int>(d.adjacency.cast<int>().sum() / 2);
    if (train != nullptr) *train = static_cast<int>(d.training_nodes().size());
  });
}

atomnc_status atomnc_instance_params(const atomnc_instance* instance, atomnc_gen_params* params) {
  return guarded([&] {
    require(instance, "instance");
    require(params, "params");
    *params = from_core(instance->data->params);
  });
}

atomnc_status atomnc_solve(const atomnc_instance* instance, const atomnc_solver_config* config,
                           atomnc_solution** out) {
  return guarded([&] {
    require(instance, "instance");
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    auto solution = std::make_unique<atomnc_solution>();
    solution->instance = instance->data;
    solution->result = atomnc::solve(*instance->data, to_core(*config));
    solution->accuracy = atomnc::test_accuracy(*instance->data, solution->result.prediction);
    *out = solution.release();
  });
}

void atomnc_solution_free(atomnc_solution* solution) { delete solution; }

atomnc_status atomnc_solution_accuracy(const atomnc_solution* solution, double* accuracy) {
  return guarded([&] {
    require(solution, "solution");
    require(accuracy, "accuracy");
    *accuracy = solution->accuracy;
  });
}

atomnc_status atomnc_solution_iterations(const atomnc_solution* solution, int* iterations, int* converged) {
  return guarded([&] {
    require(solution, "solution");
    if (iterations != nullptr) *iterations = solution->result.state.t;
    if (converged != nullptr) *converged = solution->result.converged ? 1 : 0;
  });
}

atomnc_status atomnc_solution_final_objective(const atomnc_solution* solution, double* objective) {
  return guarded([&] {
    require(solution, "solution");
    require(objective, "objective");
    *objective = solution->result.state.objective_trace.back();
  });
}

atomnc_status atomnc_solution_classes(const atomnc_solution* solution, int* classes, size_t capacity) {
  return guarded([&] {
    require(solution, "solution");
    require(classes, "classes");
    const auto& cls = solution->result.prediction.class_assignment;
    for (size_t v = 0; v < cls.size() && v < capacity; ++v) classes[v] = cls[v];
  });
}

atomnc_status atomnc_solution_write_trace(const atomnc_solution* solution, const char* path) {
  return guarded([&] {
    require(solution, "solution");
    require(path, "path");
    atomnc::io::write_trace_csv(solution->result.state.objective_trace, path);
  });
}

atomnc_status atomnc_solution_write_prediction(const atomnc_solution* solution, const char* path) {
  return guarded([&] {
    require(solution, "solution");
    require(path, "path");
    atomnc::io::write_prediction_csv(*solution->instance, solution->result.prediction, path);
  });
}

atomnc_status atomnc_spectral_cluster(const atomnc_instance* instance, int laplacian, uint64_t seed, int* clusters,
                                      size_t capacity, double* accuracy) {
  return guarded([&] {
    require(instance, "instance");
    require(clusters, "clusters");
    const auto& d = *instance->data;
    if (capacity < static_cast<size_t>(d.n)) atomnc::throw_invalid("capacity", "must hold one entry per node");
    if (laplacian != 0 && laplacian != 1) atomnc::throw_invalid("laplacian", "expected 0 or 1");
    atomnc::SpectralConfig config;
    config.K = d.cluster_count();
    config.laplacian =
        laplacian == 0 ? atomnc::LaplacianKind::kUnnormalized : atomnc::LaplacianKind::kSymmetricNormalized;
    config.seed = seed;
    const auto assignment = atomnc::spectral_cluster(d.adjacency, config);
    for (size_t v = 0; v < assignment.size(); ++v) clusters[v] = assignment[v];
    if (accuracy != nullptr) {
      *accuracy = atomnc::test_accuracy(d, atomnc::prediction_from_clusters(d, assignment));
    }
  });
}

atomnc_status atomnc_write_assignment(const int* clusters, size_t count, const char* path) {
  return guarded([&] {
    require(clusters, "clusters");
    require(path, "path");
    atomnc::io::write_assignment_csv(std::vector<int>(clusters, clusters + count), path);
  });
}

atomnc_status atomnc_recovery_check(const atomnc_instance* instance, const atomnc_solution* solution, double gamma,
                                    double rho_minus, double rho_plus, atomnc_report** out) {
  return guarded([&] {
    require(instance, "instance");
    require(out, "out");
    *out = nullptr;
    const auto& d = *instance->data;
    const atomnc::AtomModels centroids = solution != nullptr
                                             ? solution->result.state.models
                                             : atomnc::empirical_centroids(d, rho_minus, rho_plus);
    auto report = std::make_unique<atomnc_report>();
    report->data = atomnc::recovery_report(d, gamma, centroids);
    *out = report.release();
  });
}

void atomnc_report_free(atomnc_report* report) { delete report; }

atomnc_status atomnc_report_margins(const atomnc_report* report, int self_excluded, double* homogeneity_margin,
                                    double* visibility_margin) {
  return guarded([&] {
    require(report, "report");
    const auto& s = self_excluded ? report->data.misconnection.self_excluded : report->data.misconnection.literal;
    if (homogeneity_margin != nullptr) *homogeneity_margin = s.homogeneity_margin;
    if (visibility_margin != nullptr) *visibility_margin = s.visibility_margin;
  });
}

atomnc_status atomnc_report_rho_plus(const atomnc_report* report, int self_excluded, double* out, size_t capacity) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    const auto& rho = self_excluded ? report->data.misconnection.self_excluded.rho_plus
                                    : report->data.misconnection.literal.rho_plus;
    if (capacity < static_cast<size_t>(rho.size())) atomnc::throw_invalid("capacity", "must hold K*K entries");
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      for (Eigen::Index j = 0; j < rho.cols(); ++j) out[i * rho.cols() + j] = rho(i, j);
    }
  });
}

atomnc_status atomnc_report_write(const atomnc_report* report, const char* path, const char* cluster_csv_path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    require(cluster_csv_path, "cluster_csv_path");
    atomnc::io::write_report(report->data, path, cluster_csv_path);
  });
}

atomnc_status atomnc_sweep_run(const char* config_path, const char* output_override, int threads_override,
                               int* failed_runs) {
  return guarded([&] {
    require(config_path, "config_path");
    atomnc::SweepSpec spec = atomnc::load_sweep_config(config_path);
    if (output_override != nullptr) spec.output_path = output_override;
    if (threads_override > 0) spec.threads = threads_override;
    if (spec.output_path.empty()) atomnc::throw_invalid("sweep.output", "is required");
    const atomnc::SweepResult result = atomnc::run_sweep(spec);
    if (failed_runs != nullptr) {
      int failed = 0;
      for (const auto& row : result.rows) failed += row.failed() ? 1 : 0;
      *failed_runs = failed;
    }
  });
}

}  // extern "C"
