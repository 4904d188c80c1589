#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cado.hpp"
#include "datagen.hpp"

namespace atomnc {

enum class SweepAxis { kP, kOmega, kTrainRatio, kBetaG, kBetaF, kBetaL, kN, kM, kK };

enum class Configuration { kG, kF, kGF, kGL, kFL, kGFL, kGSpectral };

const char* to_string(SweepAxis axis);
const char* to_string(Configuration configuration);
SweepAxis parse_axis(const std::string& name);
// Accepts G, F, GF, GL, FL, GFL and G-spectral.
Configuration parse_configuration(const std::string& name);

// True when the configuration runs the spectral baseline instead of the solver.
bool is_spectral(Configuration configuration);
Ablation ablation_for(Configuration configuration);

struct SweepSpec {
  GenParams gen;
  SolverConfig solver;
  SweepAxis axis = SweepAxis::kP;
  std::vector<double> values;
  std::vector<Configuration> configurations;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string output_path;
  int threads = 1;
};

void validate(const SweepSpec& spec);

// Copies of the base configs with the axis value applied. Axis n is the
// total node count (n0 = n / K); axis m keeps the number of signal
// dimensions m - m_omega fixed; axis K also sets r.
void apply_axis(SweepAxis axis, double value, GenParams& gen, SolverConfig& solver);

struct RunOutcome {
  double test_accuracy = 0.0;
  double final_objective = 0.0;  // NaN for the spectral baseline
  int iterations = 0;
  std::optional<SolverState> state;  // empty for the spectral baseline
  Prediction prediction;
};

// generate -> solve (or spectral baseline) -> decode -> accuracy. Errors
// are re-thrown tagged with the failing stage.
RunOutcome run_single(const GenParams& gen, const SolverConfig& solver, Configuration configuration);
RunOutcome run_single_on(const PlantedInstance& instance, const SolverConfig& solver, Configuration configuration);

// Spectral assignment turned into class predictions by matching clusters to
// the true labels of training nodes.
Prediction prediction_from_clusters(const PlantedInstance& instance, const std::vector<int>& clusters);

struct SweepRow {
  double axis_value = 0.0;
  Configuration configuration = Configuration::kGFL;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string status = "ok";  // "ok" or "error: <message>"

  bool failed() const { return status != "ok"; }
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kP;
  std::vector<SweepRow> rows;
  bool any_failed() const;
};

/// Runs every (value, configuration, seed) combination, in that nesting
/// order, on `spec.threads` workers. A failing run leaves a marker row with
/// its status. Writes the CSV (plus timing and summary sidecars) when
/// output_path is set.
SweepResult run_sweep(const SweepSpec& spec);

struct SummaryRow {
  double axis_value = 0.0;
  Configuration configuration = Configuration::kGFL;
  int count = 0;  // successful runs
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double prob);

// Median and quartiles of test accuracy per (axis value, configuration), in
// order of first appearance. Failed rows are skipped.
std::vector<SummaryRow> summarize(const SweepResult& result);

// Byte-stable CSV without timings.
std::string serialize_csv(const SweepResult& result);
SweepResult parse_csv(const std::string& text);
std::string timing_csv(const SweepResult& result);
std::string summary_csv(const SweepAxis axis, const std::vector<SummaryRow>& summary);

// Flat key=value config: gen.<field>, solver.<field>, sweep.axis,
// sweep.values, sweep.configurations, sweep.seeds (comma lists),
// sweep.output, sweep.threads.
SweepSpec parse_sweep_config(const std::string& text);
SweepSpec load_sweep_config(const std::string& path);

}  // namespace atomnc
