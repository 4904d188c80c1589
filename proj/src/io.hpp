#pragma once

#include <string>
#include <utility>
#include <vector>

#include "baseline.hpp"
#include "cado.hpp"
#include "datagen.hpp"
#include "recovery.hpp"

namespace atomnc::io {

// Round-trippable decimal form of a double.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& field);
long long parse_int(const std::string& text, const std::string& field);
bool parse_bool(const std::string& text, const std::string& field);

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// Flat "key=value" text; blank lines and lines starting with '#' are
// skipped, whitespace around keys and values is trimmed.
std::vector<KeyValue> parse_key_values(const std::string& text);
std::vector<KeyValue> read_key_value_file(const std::string& path);

// Field setters keyed by struct field names. Return false for unknown keys,
// throw kInvalidArgument for malformed values.
bool set_gen_field(GenParams& params, const std::string& key, const std::string& value);
bool set_solver_field(SolverConfig& config, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> gen_fields(const GenParams& params);
std::vector<std::pair<std::string, std::string>> solver_fields(const SolverConfig& config);

// Instance directory: params.txt, edges.txt, features.csv, labels.csv.
void save_instance(const PlantedInstance& instance, const std::string& dir);
PlantedInstance load_instance(const std::string& dir);

void write_trace_csv(const std::vector<double>& trace, const std::string& path);
void write_prediction_csv(const PlantedInstance& instance, const Prediction& prediction, const std::string& path);
void write_assignment_csv(const std::vector<int>& assignment, const std::string& path);

// Flat key=value report; the per-cluster rows go to a CSV next to it.
std::string report_text(const RecoveryReport& report);
std::string report_cluster_csv(const RecoveryReport& report);
void write_report(const RecoveryReport& report, const std::string& path, const std::string& cluster_csv_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace atomnc::io
