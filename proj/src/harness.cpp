#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "baseline.hpp"
#include "error.hpp"
#include "io.hpp"
#include "numerics.hpp"

namespace atomnc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kCsvHeader = "axis,axis_value,configuration,seed,test_accuracy,final_objective,iterations,status";

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

// Keeps a status message on one CSV field.
std::string csv_safe(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    rethrow_in_stage(stage, e);
  } catch (const std::exception& e) {
    rethrow_in_stage(stage, Error(ErrorKind::kNumerical, e.what()));
  }
}

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kP: return "p";
    case SweepAxis::kOmega: return "omega";
    case SweepAxis::kTrainRatio: return "train_ratio";
    case SweepAxis::kBetaG: return "beta_g";
    case SweepAxis::kBetaF: return "beta_f";
    case SweepAxis::kBetaL: return "beta_l";
    case SweepAxis::kN: return "n";
    case SweepAxis::kM: return "m";
    case SweepAxis::kK: return "K";
  }
  return "?";
}

const char* to_string(Configuration configuration) {
  switch (configuration) {
    case Configuration::kG: return "G";
    case Configuration::kF: return "F";
    case Configuration::kGF: return "GF";
    case Configuration::kGL: return "GL";
    case Configuration::kFL: return "FL";
    case Configuration::kGFL: return "GFL";
    case Configuration::kGSpectral: return "G-spectral";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis axis : {SweepAxis::kP, SweepAxis::kOmega, SweepAxis::kTrainRatio, SweepAxis::kBetaG,
                         SweepAxis::kBetaF, SweepAxis::kBetaL, SweepAxis::kN, SweepAxis::kM, SweepAxis::kK}) {
    if (name == to_string(axis)) return axis;
  }
  throw_invalid("axis", "unknown axis '" + name + "'");
}

Configuration parse_configuration(const std::string& name) {
  for (Configuration c : {Configuration::kG, Configuration::kF, Configuration::kGF, Configuration::kGL,
                          Configuration::kFL, Configuration::kGFL, Configuration::kGSpectral}) {
    if (name == to_string(c)) return c;
  }
  throw_invalid("configurations", "unknown configuration '" + name + "'");
}

bool is_spectral(Configuration configuration) {
  return configuration == Configuration::kG || configuration == Configuration::kGSpectral;
}

Ablation ablation_for(Configuration configuration) {
  switch (configuration) {
    case Configuration::kF: return {false, true, false};
    case Configuration::kGF: return {true, true, false};
    case Configuration::kGL: return {true, false, true};
    case Configuration::kFL: return {false, true, true};
    case Configuration::kGFL: return {true, true, true};
    case Configuration::kG:
    case Configuration::kGSpectral: return {true, false, false};
  }
  return {};
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw_invalid("values", "must not be empty");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1])) throw_invalid("values", "must be strictly increasing");
  }
  for (double value : spec.values) {
    if (!std::isfinite(value)) throw_invalid("values", "must be finite");
  }
  if (spec.configurations.empty()) throw_invalid("configurations", "must not be empty");
  if (spec.seeds.empty()) throw_invalid("seeds", "must not be empty");
  if (spec.threads < 1) throw_invalid("threads", "must be >= 1");
  // Every sweep point must describe a valid run.
  for (double value : spec.values) {
    GenParams gen = spec.gen;
    SolverConfig solver = spec.solver;
    apply_axis(spec.axis, value, gen, solver);
    validate(gen);
    validate(solver);
  }
}

void apply_axis(SweepAxis axis, double value, GenParams& gen, SolverConfig& solver) {
  const auto as_count = [&](const char* field) {
    if (value != std::round(value) || value < 1.0) throw_invalid(field, "axis value must be a positive integer");
    return static_cast<int>(value);
  };
  switch (axis) {
    case SweepAxis::kP: gen.p = value; break;
    case SweepAxis::kOmega: gen.omega = value; break;
    case SweepAxis::kTrainRatio: gen.train_ratio = value; break;
    case SweepAxis::kBetaG: solver.weights.beta_g = value; break;
    case SweepAxis::kBetaF: solver.weights.beta_f = value; break;
    case SweepAxis::kBetaL: solver.weights.beta_l = value; break;
    case SweepAxis::kN: {
      const int n = as_count("n");
      if (n % gen.K != 0) throw_invalid("n", "axis value must be a multiple of K");
      gen.n0 = n / gen.K;
      break;
    }
    case SweepAxis::kM: {
      const int signal = gen.m - gen.m_omega;
      gen.m = as_count("m");
      gen.m_omega = std::max(0, gen.m - signal);
      break;
    }
    case SweepAxis::kK: {
      gen.K = as_count("K");
      solver.r = gen.K;
      break;
    }
  }
}

Prediction prediction_from_clusters(const PlantedInstance& instance, const std::vector<int>& clusters) {
  Prediction out;
  out.atom_assignment = clusters;
  out.atom_to_class = best_relabeling(clusters, instance.true_labels, instance.cluster_count(), instance.train_mask);
  out.class_assignment.resize(clusters.size());
  for (std::size_t v = 0; v < clusters.size(); ++v) {
    out.class_assignment[v] = out.atom_to_class[static_cast<std::size_t>(clusters[v])];
  }
  return out;
}

RunOutcome run_single_on(const PlantedInstance& instance, const SolverConfig& solver, Configuration configuration) {
  RunOutcome out;
  if (is_spectral(configuration)) {
    SpectralConfig spectral;
    spectral.K = instance.cluster_count();
    spectral.seed = solver.seed;
    const auto clusters = staged("baseline", [&] { return spectral_cluster(instance.adjacency, spectral); });
    out.prediction = staged("decode", [&] { return prediction_from_clusters(instance, clusters); });
    out.final_objective = kNaN;
    out.iterations = 0;
  } else {
    SolverConfig config = solver;
    config.ablation = ablation_for(configuration);
    auto result = staged("solve", [&] { return solve(instance, config); });
    out.prediction = std::move(result.prediction);
    out.final_objective = result.state.objective_trace.back();
    out.iterations = result.state.t;
    out.state = std::move(result.state);
  }
  out.test_accuracy = test_accuracy(instance, out.prediction);
  return out;
}

RunOutcome run_single(const GenParams& gen, const SolverConfig& solver, Configuration configuration) {
  const PlantedInstance instance = staged("generate", [&] { return generate(gen); });
  return run_single_on(instance, solver, configuration);
}

bool SweepResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed(); });
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  SweepResult result;
  result.axis = spec.axis;
  for (double value : spec.values) {
    for (Configuration c : spec.configurations) {
      for (std::uint64_t seed : spec.seeds) {
        SweepRow row;
        row.axis_value = value;
        row.configuration = c;
        row.seed = seed;
        result.rows.push_back(row);
      }
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      SweepRow& row = result.rows[i];
      GenParams gen = spec.gen;
      SolverConfig solver = spec.solver;
      apply_axis(spec.axis, row.axis_value, gen, solver);
      gen.seed = row.seed;
      solver.seed = row.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const RunOutcome outcome = run_single(gen, solver, row.configuration);
        row.test_accuracy = outcome.test_accuracy;
        row.final_objective = outcome.final_objective;
        row.iterations = outcome.iterations;
      } catch (const std::exception& e) {
        row.test_accuracy = kNaN;
        row.final_objective = kNaN;
        row.status = csv_safe(std::string("error: ") + e.what());
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int threads = std::min<int>(spec.threads, static_cast<int>(result.rows.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (!spec.output_path.empty()) {
    io::write_text_file(spec.output_path, serialize_csv(result));
    io::write_text_file(spec.output_path + ".timing.csv", timing_csv(result));
    io::write_text_file(spec.output_path + ".summary.csv", summary_csv(result.axis, summarize(result)));
  }
  return result;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const SweepResult& result) {
  std::vector<std::pair<std::pair<double, Configuration>, std::vector<double>>> groups;
  for (const auto& row : result.rows) {
    const auto key = std::make_pair(row.axis_value, row.configuration);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}});
      it = std::prev(groups.end());
    }
    if (!row.failed() && !std::isnan(row.test_accuracy)) it->second.push_back(row.test_accuracy);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, accs] : groups) {
    SummaryRow s;
    s.axis_value = key.first;
    s.configuration = key.second;
    s.count = static_cast<int>(accs.size());
    s.median = quantile(accs, 0.5);
    s.q1 = quantile(accs, 0.25);
    s.q3 = quantile(accs, 0.75);
    out.push_back(s);
  }
  return out;
}

std::string serialize_csv(const SweepResult& result) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : result.rows) {
    out += std::string(to_string(result.axis)) + "," + io::format_double(row.axis_value) + "," +
           to_string(row.configuration) + "," + std::to_string(row.seed) + "," + io::format_double(row.test_accuracy) +
           "," + io::format_double(row.final_objective) + "," + std::to_string(row.iterations) + "," + row.status + "\n";
  }
  return out;
}

SweepResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw_invalid("csv", "missing or unexpected header");
  SweepResult result;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::string field;
    std::istringstream fields(line);
    while (std::getline(fields, field, ',')) cols.push_back(field);
    if (cols.size() != 8) throw_invalid("csv", "expected 8 columns in '" + line + "'");
    const SweepAxis axis = parse_axis(cols[0]);
    if (first) result.axis = axis;
    else if (axis != result.axis) throw_invalid("csv", "mixed axes");
    first = false;
    SweepRow row;
    row.axis_value = io::parse_double(cols[1], "axis_value");
    row.configuration = parse_configuration(cols[2]);
    row.seed = static_cast<std::uint64_t>(io::parse_int(cols[3], "seed"));
    row.test_accuracy = io::parse_double(cols[4], "test_accuracy");
    row.final_objective = io::parse_double(cols[5], "final_objective");
    row.iterations = static_cast<int>(io::parse_int(cols[6], "iterations"));
    row.status = cols[7];
    result.rows.push_back(row);
  }
  return result;
}

std::string timing_csv(const SweepResult& result) {
  std::string out = "axis_value,configuration,seed,wall_ms\n";
  for (const auto& row : result.rows) {
    out += io::format_double(row.axis_value) + "," + to_string(row.configuration) + "," + std::to_string(row.seed) +
           "," + io::format_double(row.wall_ms) + "\n";
  }
  return out;
}

std::string summary_csv(const SweepAxis axis, const std::vector<SummaryRow>& summary) {
  std::string out = "axis,axis_value,configuration,runs,median,q1,q3,iqr\n";
  for (const auto& s : summary) {
    out += std::string(to_string(axis)) + "," + io::format_double(s.axis_value) + "," + to_string(s.configuration) +
           "," + std::to_string(s.count) + "," + io::format_double(s.median) + "," + io::format_double(s.q1) + "," +
           io::format_double(s.q3) + "," + io::format_double(s.iqr()) + "\n";
  }
  return out;
}

SweepSpec parse_sweep_config(const std::string& text) {
  SweepSpec spec;
  bool have_axis = false;
  for (const auto& kv : io::parse_key_values(text)) {
    const auto dot = kv.key.find('.');
    const std::string section = dot == std::string::npos ? "" : kv.key.substr(0, dot);
    const std::string field = dot == std::string::npos ? kv.key : kv.key.substr(dot + 1);
    bool known = false;
    if (section == "gen") {
      known = io::set_gen_field(spec.gen, field, kv.value);
    } else if (section == "solver") {
      known = io::set_solver_field(spec.solver, field, kv.value);
    } else if (section == "sweep") {
      known = true;
      if (field == "axis") {
        spec.axis = parse_axis(kv.value);
        have_axis = true;
      } else if (field == "values") {
        spec.values.clear();
        for (const auto& v : split_list(kv.value)) spec.values.push_back(io::parse_double(v, "sweep.values"));
      } else if (field == "configurations") {
        spec.configurations.clear();
        for (const auto& c : split_list(kv.value)) spec.configurations.push_back(parse_configuration(c));
      } else if (field == "seeds") {
        spec.seeds.clear();
        for (const auto& s : split_list(kv.value)) {
          const long long seed = io::parse_int(s, "sweep.seeds");
          if (seed < 0) throw_invalid("sweep.seeds", "must be non-negative");
          spec.seeds.push_back(static_cast<std::uint64_t>(seed));
        }
      } else if (field == "output") {
        spec.output_path = kv.value;
      } else if (field == "threads") {
        spec.threads = static_cast<int>(io::parse_int(kv.value, "sweep.threads"));
      } else {
        known = false;
      }
    }
    if (!known) throw_invalid(kv.key, "unknown config key (line " + std::to_string(kv.line) + ")");
  }
  if (!have_axis) throw_invalid("sweep.axis", "is required");
  validate(spec);
  return spec;
}

SweepSpec load_sweep_config(const std::string& path) {
  return parse_sweep_config(io::read_text_file(path));
}

}  // namespace atomnc
