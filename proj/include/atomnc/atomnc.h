#ifndef ATOMNC_ATOMNC_H
#define ATOMNC_ATOMNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(ATOMNC_BUILDING_LIBRARY)
#define ATOMNC_API __attribute__((visibility("default")))
#else
#define ATOMNC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum atomnc_status {
  ATOMNC_OK = 0,
  ATOMNC_INVALID_ARGUMENT = 1,
  ATOMNC_NUMERICAL = 2,
  ATOMNC_UNSUPPORTED = 3,
  ATOMNC_IO = 4,
  ATOMNC_INTERNAL = 5
} atomnc_status;

typedef struct atomnc_instance atomnc_instance;
typedef struct atomnc_solution atomnc_solution;
typedef struct atomnc_report atomnc_report;

typedef struct atomnc_gen_params {
  int K;
  int n0;
  double p;
  double q;
  int m;
  int m_omega;
  double omega;
  double sigma;
  double train_ratio;
  double pi_correct;
  uint64_t seed;
} atomnc_gen_params;

typedef struct atomnc_solver_config {
  int r;
  double beta_g;
  double beta_f;
  double beta_l;
  double rho_minus;
  double rho_plus;
  int max_iters;
  double tol;
  uint64_t seed;
  int use_graph;
  int use_feature;
  int use_label;
  /* Nonzero scales beta_g by r/n. */
  int normalize_graph;
} atomnc_solver_config;

/* Message of the last failure on the calling thread; "" after success. */
ATOMNC_API const char* atomnc_last_error(void);
ATOMNC_API const char* atomnc_status_string(atomnc_status status);

ATOMNC_API void atomnc_gen_params_default(atomnc_gen_params* params);
ATOMNC_API void atomnc_solver_config_default(atomnc_solver_config* config);

ATOMNC_API atomnc_status atomnc_instance_generate(const atomnc_gen_params* params, atomnc_instance** out);
ATOMNC_API atomnc_status atomnc_instance_load(const char* dir, atomnc_instance** out);
ATOMNC_API atomnc_status atomnc_instance_save(const atomnc_instance* instance, const char* dir);
ATOMNC_API void atomnc_instance_free(atomnc_instance* instance);
ATOMNC_API atomnc_status atomnc_instance_counts(const atomnc_instance* instance, int* n, int* K, int* m,
                                                int* edges, int* train);
/* Copies the generator parameters the instance was built (or loaded) with. */
ATOMNC_API atomnc_status atomnc_instance_params(const atomnc_instance* instance, atomnc_gen_params* params);

/* Runs the solver. Ablation flags in the config select the terms. */
ATOMNC_API atomnc_status atomnc_solve(const atomnc_instance* instance, const atomnc_solver_config* config,
                                      atomnc_solution** out);
ATOMNC_API void atomnc_solution_free(atomnc_solution* solution);
/* Test-node accuracy; NaN when the instance has no test nodes. */
ATOMNC_API atomnc_status atomnc_solution_accuracy(const atomnc_solution* solution, double* accuracy);
ATOMNC_API atomnc_status atomnc_solution_iterations(const atomnc_solution* solution, int* iterations,
                                                    int* converged);
ATOMNC_API atomnc_status atomnc_solution_final_objective(const atomnc_solution* solution, double* objective);
/* Copies up to `capacity` class predictions (one per node). */
ATOMNC_API atomnc_status atomnc_solution_classes(const atomnc_solution* solution, int* classes, size_t capacity);
ATOMNC_API atomnc_status atomnc_solution_write_trace(const atomnc_solution* solution, const char* path);
ATOMNC_API atomnc_status atomnc_solution_write_prediction(const atomnc_solution* solution, const char* path);

/* Spectral baseline with default k-means settings (10 restarts, 100 iterations).
   laplacian: 0 unnormalized, 1 symmetric-normalized. `clusters` needs room for n entries;
   `accuracy` (may be NULL) receives test accuracy after training-split matching. */
ATOMNC_API atomnc_status atomnc_spectral_cluster(const atomnc_instance* instance, int laplacian, uint64_t seed,
                                                 int* clusters, size_t capacity, double* accuracy);
ATOMNC_API atomnc_status atomnc_write_assignment(const int* clusters, size_t count, const char* path);

/* Recovery diagnostics. Centroids come from `solution` when given, otherwise
   from per-cluster empirical models clamped to [rho_minus, rho_plus]. */
ATOMNC_API atomnc_status atomnc_recovery_check(const atomnc_instance* instance, const atomnc_solution* solution,
                                               double gamma, double rho_minus, double rho_plus,
                                               atomnc_report** out);
ATOMNC_API void atomnc_report_free(atomnc_report* report);
ATOMNC_API atomnc_status atomnc_report_margins(const atomnc_report* report, int self_excluded,
                                               double* homogeneity_margin, double* visibility_margin);
/* Row-major K x K matrix; `capacity` counts doubles. */
ATOMNC_API atomnc_status atomnc_report_rho_plus(const atomnc_report* report, int self_excluded, double* out,
                                                size_t capacity);
ATOMNC_API atomnc_status atomnc_report_write(const atomnc_report* report, const char* path,
                                             const char* cluster_csv_path);

/* Runs a sweep described by a key=value config file. `output_override`
   (may be NULL) replaces sweep.output, `threads_override` > 0 replaces
   sweep.threads. `failed_runs` (may be NULL) receives the failure-row count. */
ATOMNC_API atomnc_status atomnc_sweep_run(const char* config_path, const char* output_override,
                                          int threads_override, int* failed_runs);

#ifdef __cplusplus
}
#endif

#endif
