#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atomnc/atomnc.h"

namespace {

struct Failure {
  std::string stage;
  atomnc_status status;
};

void check(atomnc_status status, const char* stage) {
  if (status != ATOMNC_OK) throw Failure{stage, status};
}

struct InstanceOptions {
  atomnc_gen_params gen{};
  std::string dir;
};

void add_instance_options(CLI::App* cmd, InstanceOptions& o) {
  atomnc_gen_params_default(&o.gen);
  cmd->add_option("--instance", o.dir, "Load a saved instance directory instead of generating");
  cmd->add_option("--K", o.gen.K, "Number of clusters")->capture_default_str();
  cmd->add_option("--n0", o.gen.n0, "Nodes per cluster")->capture_default_str();
  cmd->add_option("--p", o.gen.p, "Intra-cluster edge probability")->capture_default_str();
  cmd->add_option("--q", o.gen.q, "Inter-cluster edge probability")->capture_default_str();
  cmd->add_option("--m", o.gen.m, "Feature dimension")->capture_default_str();
  cmd->add_option("--m_omega", o.gen.m_omega, "Noise directions per cluster")->capture_default_str();
  cmd->add_option("--omega", o.gen.omega, "Scale of the noise directions")->capture_default_str();
  cmd->add_option("--sigma", o.gen.sigma, "Scale of the signal directions")->capture_default_str();
  cmd->add_option("--train_ratio", o.gen.train_ratio, "Labelled fraction per cluster")->capture_default_str();
  cmd->add_option("--pi_correct", o.gen.pi_correct, "Probability a training label is correct")
      ->capture_default_str();
  cmd->add_option("--seed", o.gen.seed, "Seed for generation and solving")->capture_default_str();
}

atomnc_instance* obtain_instance(const InstanceOptions& o) {
  atomnc_instance* instance = nullptr;
  if (!o.dir.empty()) {
    check(atomnc_instance_load(o.dir.c_str(), &instance), "load");
  } else {
    check(atomnc_instance_generate(&o.gen, &instance), "generate");
  }
  return instance;
}

uint64_t instance_seed(const atomnc_instance* instance) {
  atomnc_gen_params params{};
  check(atomnc_instance_params(instance, &params), "load");
  return params.seed;
}

struct SolverOptions {
  atomnc_solver_config config{};
  std::string configuration = "GFL";
  bool seed_set = false;
};

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
  atomnc_solver_config_default(&o.config);
  cmd->add_option("--r", o.config.r, "Number of atoms")->capture_default_str();
  cmd->add_option("--beta_g", o.config.beta_g, "Graph term weight")->capture_default_str();
  cmd->add_option("--beta_f", o.config.beta_f, "Feature term weight")->capture_default_str();
  cmd->add_option("--beta_l", o.config.beta_l, "Label term weight")->capture_default_str();
  cmd->add_option("--rho_minus", o.config.rho_minus, "Lower covariance eigenvalue bound")->capture_default_str();
  cmd->add_option("--rho_plus", o.config.rho_plus, "Upper covariance eigenvalue bound")->capture_default_str();
  cmd->add_option("--max_iters", o.config.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--tol", o.config.tol, "Relative objective-change tolerance")->capture_default_str();
  cmd->add_option("--normalize_graph", o.config.normalize_graph, "Scale beta_g by r/n (0 or 1)")
      ->capture_default_str();
  cmd->add_option("--configuration", o.configuration, "Term subset: G, F, GF, GL, FL or GFL")
      ->check(CLI::IsMember({"G", "F", "GF", "GL", "FL", "GFL"}))
      ->capture_default_str();
}

void apply_configuration(SolverOptions& o, uint64_t seed) {
  const std::string& c = o.configuration;
  o.config.use_graph = c.find('G') != std::string::npos;
  o.config.use_feature = c.find('F') != std::string::npos;
  o.config.use_label = c.find('L') != std::string::npos;
  o.config.seed = seed;
}

void print_accuracy(double accuracy) {
  if (std::isnan(accuracy)) std::printf("test_accuracy=nan\n");
  else std::printf("test_accuracy=%.6f\n", accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atomic-decomposition node classification: generate, solve, baseline, check, sweep"};
  app.require_subcommand(1);

  InstanceOptions gen_opts;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a planted-partition instance and write its files");
  add_instance_options(gen_cmd, gen_opts);
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  InstanceOptions solve_inst;
  SolverOptions solve_opts;
  std::string trace_path;
  std::string prediction_path;
  auto* solve_cmd = app.add_subcommand("solve", "Run the solver and report test accuracy");
  add_instance_options(solve_cmd, solve_inst);
  add_solver_options(solve_cmd, solve_opts);
  solve_cmd->add_option("--trace", trace_path, "Write the objective trace CSV");
  solve_cmd->add_option("--prediction", prediction_path, "Write the prediction CSV");

  InstanceOptions base_inst;
  std::string laplacian = "symmetric";
  std::string assignment_path;
  auto* base_cmd = app.add_subcommand("baseline", "Spectral clustering on the graph alone");
  add_instance_options(base_cmd, base_inst);
  base_cmd->add_option("--laplacian", laplacian, "unnormalized or symmetric")
      ->check(CLI::IsMember({"unnormalized", "symmetric"}))
      ->capture_default_str();
  base_cmd->add_option("--out", assignment_path, "Write the assignment CSV");

  InstanceOptions check_inst;
  SolverOptions check_solver;
  double gamma = 1.0;
  std::string centroids = "empirical";
  std::string report_path;
  std::string cluster_csv;
  auto* check_cmd = app.add_subcommand("check", "Recovery-condition diagnostics");
  add_instance_options(check_cmd, check_inst);
  add_solver_options(check_cmd, check_solver);
  check_cmd->add_option("--gamma", gamma, "Graph weight in the node-only bound")->capture_default_str();
  check_cmd->add_option("--centroids", centroids, "empirical or solver")
      ->check(CLI::IsMember({"empirical", "solver"}))
      ->capture_default_str();
  check_cmd->add_option("--report", report_path, "Write the key=value report");
  check_cmd->add_option("--cluster_csv", cluster_csv, "Write the per-cluster CSV (default: <report>.clusters.csv)");

  std::string config_path;
  std::string sweep_output;
  int threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep from a key=value config file");
  sweep_cmd->add_option("--config", config_path, "Config file")->required();
  sweep_cmd->add_option("--output", sweep_output, "Override sweep.output");
  sweep_cmd->add_option("--threads", threads, "Override sweep.threads");

  CLI11_PARSE(app, argc, argv);

  atomnc_instance* instance = nullptr;
  atomnc_solution* solution = nullptr;
  atomnc_report* report = nullptr;
  int code = 0;
  try {
    if (*gen_cmd) {
      instance = obtain_instance(gen_opts);
      check(atomnc_instance_save(instance, gen_out.c_str()), "save");
      int n = 0, k = 0, m = 0, edges = 0, train = 0;
      check(atomnc_instance_counts(instance, &n, &k, &m, &edges, &train), "generate");
      std::printf("n=%d K=%d m=%d edges=%d train=%d\n", n, k, m, edges, train);
    } else if (*solve_cmd) {
      instance = obtain_instance(solve_inst);
      apply_configuration(solve_opts, instance_seed(instance));
      check(atomnc_solve(instance, &solve_opts.config, &solution), "solve");
      double accuracy = 0.0, objective = 0.0;
      int iterations = 0, converged = 0;
      check(atomnc_solution_accuracy(solution, &accuracy), "solve");
      check(atomnc_solution_iterations(solution, &iterations, &converged), "solve");
      check(atomnc_solution_final_objective(solution, &objective), "solve");
      print_accuracy(accuracy);
      std::printf("iterations=%d\nconverged=%d\nfinal_objective=%.17g\n", iterations, converged, objective);
      if (!trace_path.empty()) check(atomnc_solution_write_trace(solution, trace_path.c_str()), "write");
      if (!prediction_path.empty()) {
        check(atomnc_solution_write_prediction(solution, prediction_path.c_str()), "write");
      }
    } else if (*base_cmd) {
      instance = obtain_instance(base_inst);
      int n = 0;
      check(atomnc_instance_counts(instance, &n, nullptr, nullptr, nullptr, nullptr), "baseline");
      std::vector<int> clusters(static_cast<size_t>(n));
      double accuracy = 0.0;
      check(atomnc_spectral_cluster(instance, laplacian == "unnormalized" ? 0 : 1, instance_seed(instance),
                                    clusters.data(), clusters.size(), &accuracy),
            "baseline");
      print_accuracy(accuracy);
      if (!assignment_path.empty()) {
        check(atomnc_write_assignment(clusters.data(), clusters.size(), assignment_path.c_str()), "write");
      }
    } else if (*check_cmd) {
      instance = obtain_instance(check_inst);
      if (centroids == "solver") {
        apply_configuration(check_solver, instance_seed(instance));
        check(atomnc_solve(instance, &check_solver.config, &solution), "solve");
      }
      check(atomnc_recovery_check(instance, solution, gamma, check_solver.config.rho_minus,
                                  check_solver.config.rho_plus, &report),
            "check");
      for (int excluded = 0; excluded < 2; ++excluded) {
        double homogeneity = 0.0, visibility = 0.0;
        check(atomnc_report_margins(report, excluded, &homogeneity, &visibility), "check");
        const char* name = excluded ? "self_excluded" : "literal";
        std::printf("%s.homogeneity_margin=%.17g\n%s.visibility_margin=%.17g\n", name, homogeneity, name, visibility);
      }
      if (!report_path.empty()) {
        const std::string csv = cluster_csv.empty() ? report_path + ".clusters.csv" : cluster_csv;
        check(atomnc_report_write(report, report_path.c_str(), csv.c_str()), "write");
      }
    } else if (*sweep_cmd) {
      int failed = 0;
      check(atomnc_sweep_run(config_path.c_str(), sweep_output.empty() ? nullptr : sweep_output.c_str(), threads,
                             &failed),
            "sweep");
      if (failed > 0) {
        std::fprintf(stderr, "[sweep] %d run(s) failed; see the status column\n", failed);
        code = 1;
      }
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "[%s] %s: %s\n", f.stage.c_str(), atomnc_status_string(f.status), atomnc_last_error());
    code = 2;
  }
  atomnc_report_free(report);
  atomnc_solution_free(solution);
  atomnc_instance_free(instance);
  return code;
}
