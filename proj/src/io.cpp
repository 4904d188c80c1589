#include "io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace atomnc::io {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void throw_io(const std::string& what) { throw Error(ErrorKind::kIo, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

int to_int(const std::string& text, const std::string& field) {
  return static_cast<int>(parse_int(text, field));
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw_invalid(field, "expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw_invalid(field, "expected an integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw_invalid(field, "expected a boolean, got '" + text + "'");
}

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw_invalid("line " + std::to_string(number), "expected key=value, got '" + line + "'");
    }
    out.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), number});
  }
  return out;
}

std::vector<KeyValue> read_key_value_file(const std::string& path) {
  return parse_key_values(read_text_file(path));
}

bool set_gen_field(GenParams& params, const std::string& key, const std::string& value) {
  if (key == "K") params.K = to_int(value, key);
  else if (key == "n0") params.n0 = to_int(value, key);
  else if (key == "p") params.p = parse_double(value, key);
  else if (key == "q") params.q = parse_double(value, key);
  else if (key == "m") params.m = to_int(value, key);
  else if (key == "m_omega") params.m_omega = to_int(value, key);
  else if (key == "omega") params.omega = parse_double(value, key);
  else if (key == "sigma") params.sigma = parse_double(value, key);
  else if (key == "train_ratio") params.train_ratio = parse_double(value, key);
  else if (key == "pi_correct") params.pi_correct = parse_double(value, key);
  else if (key == "seed") params.seed = static_cast<std::uint64_t>(parse_int(value, key));
  else return false;
  return true;
}

bool set_solver_field(SolverConfig& config, const std::string& key, const std::string& value) {
  if (key == "r") config.r = to_int(value, key);
  else if (key == "beta_g") config.weights.beta_g = parse_double(value, key);
  else if (key == "beta_f") config.weights.beta_f = parse_double(value, key);
  else if (key == "beta_l") config.weights.beta_l = parse_double(value, key);
  else if (key == "rho_minus") config.rho_minus = parse_double(value, key);
  else if (key == "rho_plus") config.rho_plus = parse_double(value, key);
  else if (key == "max_iters") config.max_iters = to_int(value, key);
  else if (key == "tol") config.tol = parse_double(value, key);
  else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value, key));
  else if (key == "use_graph") config.ablation.use_graph = parse_bool(value, key);
  else if (key == "use_feature") config.ablation.use_feature = parse_bool(value, key);
  else if (key == "use_label") config.ablation.use_label = parse_bool(value, key);
  else if (key == "normalize_graph") config.normalize_graph = parse_bool(value, key);
  else if (key == "structural") {
    if (value == "embedding") config.structural = StructuralGradient::kEmbeddingSpace;
    else if (value == "weight") config.structural = StructuralGradient::kWeightSpace;
    else throw_invalid(key, "expected 'embedding' or 'weight'");
  } else return false;
  return true;
}

std::vector<std::pair<std::string, std::string>> gen_fields(const GenParams& params) {
  return {{"K", std::to_string(params.K)},
          {"n0", std::to_string(params.n0)},
          {"p", format_double(params.p)},
          {"q", format_double(params.q)},
          {"m", std::to_string(params.m)},
          {"m_omega", std::to_string(params.m_omega)},
          {"omega", format_double(params.omega)},
          {"sigma", format_double(params.sigma)},
          {"train_ratio", format_double(params.train_ratio)},
          {"pi_correct", format_double(params.pi_correct)},
          {"seed", std::to_string(params.seed)}};
}

std::vector<std::pair<std::string, std::string>> solver_fields(const SolverConfig& config) {
  return {{"r", std::to_string(config.r)},
          {"beta_g", format_double(config.weights.beta_g)},
          {"beta_f", format_double(config.weights.beta_f)},
          {"beta_l", format_double(config.weights.beta_l)},
          {"rho_minus", format_double(config.rho_minus)},
          {"rho_plus", format_double(config.rho_plus)},
          {"max_iters", std::to_string(config.max_iters)},
          {"tol", format_double(config.tol)},
          {"seed", std::to_string(config.seed)},
          {"use_graph", bool_text(config.ablation.use_graph)},
          {"use_feature", bool_text(config.ablation.use_feature)},
          {"use_label", bool_text(config.ablation.use_label)},
          {"normalize_graph", bool_text(config.normalize_graph)},
          {"structural", config.structural == StructuralGradient::kEmbeddingSpace ? "embedding" : "weight"}};
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw_io("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_instance(const PlantedInstance& instance, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory '" + dir + "': " + ec.message());
  const fs::path base(dir);

  std::string params;
  for (const auto& [key, value] : gen_fields(instance.params)) params += key + "=" + value + "\n";
  write_text_file((base / "params.txt").string(), params);

  std::string edges;
  for (int u = 0; u < instance.n; ++u) {
    for (int v = u + 1; v < instance.n; ++v) {
      if (instance.adjacency(u, v) != 0) edges += std::to_string(u) + " " + std::to_string(v) + "\n";
    }
  }
  write_text_file((base / "edges.txt").string(), edges);

  std::string features = "node";
  for (int k = 0; k < instance.feature_dim(); ++k) features += ",x" + std::to_string(k);
  features += "\n";
  for (int v = 0; v < instance.n; ++v) {
    features += std::to_string(v);
    for (int k = 0; k < instance.feature_dim(); ++k) features += "," + format_double(instance.features(v, k));
    features += "\n";
  }
  write_text_file((base / "features.csv").string(), features);

  std::string labels = "node,true_label,is_train,noisy_label\n";
  for (int v = 0; v < instance.n; ++v) {
    const auto sv = static_cast<std::size_t>(v);
    labels += std::to_string(v) + "," + std::to_string(instance.true_labels[sv]) + "," +
              (instance.is_train(v) ? "1," + std::to_string(instance.noisy_labels[sv]) : std::string("0,")) + "\n";
  }
  write_text_file((base / "labels.csv").string(), labels);
}

PlantedInstance load_instance(const std::string& dir) {
  const fs::path base(dir);
  PlantedInstance instance;
  for (const auto& kv : read_key_value_file((base / "params.txt").string())) {
    if (!set_gen_field(instance.params, kv.key, kv.value)) throw_invalid(kv.key, "unknown key in params.txt");
  }
  validate(instance.params);
  const int k = instance.params.K;

  const auto label_lines = data_lines(read_text_file((base / "labels.csv").string()));
  if (label_lines.empty()) throw_io("labels.csv is empty");
  const int n = static_cast<int>(label_lines.size()) - 1;
  instance.n = n;
  instance.true_labels.assign(static_cast<std::size_t>(n), 0);
  instance.train_mask.assign(static_cast<std::size_t>(n), 0);
  instance.noisy_labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (std::size_t row = 1; row < label_lines.size(); ++row) {
    const auto cols = split(label_lines[row], ',');
    if (cols.size() != 4) throw_io("labels.csv line " + std::to_string(row + 1) + ": expected 4 columns");
    const int v = to_int(cols[0], "labels.csv node");
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) throw_invalid("labels.csv node", "bad node index");
    const auto sv = static_cast<std::size_t>(v);
    seen[sv] = true;
    instance.true_labels[sv] = to_int(cols[1], "labels.csv true_label");
    if (instance.true_labels[sv] < 0 || instance.true_labels[sv] >= k) {
      throw_invalid("labels.csv true_label", "out of range [0, K)");
    }
    instance.train_mask[sv] = parse_bool(cols[2], "labels.csv is_train") ? 1 : 0;
    if (instance.train_mask[sv] != 0) {
      instance.noisy_labels[sv] = to_int(cols[3], "labels.csv noisy_label");
      if (instance.noisy_labels[sv] < 0 || instance.noisy_labels[sv] >= k) {
        throw_invalid("labels.csv noisy_label", "out of range [0, K)");
      }
    }
  }

  instance.adjacency = AdjacencyMatrix::Zero(n, n);
  for (const auto& line : data_lines(read_text_file((base / "edges.txt").string()))) {
    std::istringstream in(line);
    long long u = -1;
    long long v = -1;
    if (!(in >> u >> v) || u < 0 || v < 0 || u >= n || v >= n || u == v) {
      throw_invalid("edges.txt", "bad edge '" + line + "'");
    }
    instance.adjacency(u, v) = 1;
    instance.adjacency(v, u) = 1;
  }
  instance.polarized = polarize(instance.adjacency);

  const auto feature_lines = data_lines(read_text_file((base / "features.csv").string()));
  if (static_cast<int>(feature_lines.size()) != n + 1) throw_io("features.csv must have one row per node");
  const int m = static_cast<int>(split(feature_lines[0], ',').size()) - 1;
  if (m < 1) throw_io("features.csv has no feature columns");
  instance.features = Eigen::MatrixXd::Zero(n, m);
  for (std::size_t row = 1; row < feature_lines.size(); ++row) {
    const auto cols = split(feature_lines[row], ',');
    if (static_cast<int>(cols.size()) != m + 1) {
      throw_io("features.csv line " + std::to_string(row + 1) + ": expected " + std::to_string(m + 1) + " columns");
    }
    const int v = to_int(cols[0], "features.csv node");
    if (v < 0 || v >= n) throw_invalid("features.csv node", "out of range");
    for (int c = 0; c < m; ++c) instance.features(v, c) = parse_double(cols[static_cast<std::size_t>(c) + 1], "features.csv");
  }
  return instance;
}

void write_trace_csv(const std::vector<double>& trace, const std::string& path) {
  std::string out = "iteration,objective\n";
  for (std::size_t t = 0; t < trace.size(); ++t) out += std::to_string(t) + "," + format_double(trace[t]) + "\n";
  write_text_file(path, out);
}

void write_prediction_csv(const PlantedInstance& instance, const Prediction& prediction, const std::string& path) {
  std::string out = "node,atom,class,is_train,correct\n";
  for (int v = 0; v < instance.n; ++v) {
    const auto sv = static_cast<std::size_t>(v);
    out += std::to_string(v) + "," + std::to_string(prediction.atom_assignment[sv]) + "," +
           std::to_string(prediction.class_assignment[sv]) + "," + (instance.is_train(v) ? "1" : "0") + "," +
           (prediction.class_assignment[sv] == instance.true_labels[sv] ? "1" : "0") + "\n";
  }
  write_text_file(path, out);
}

void write_assignment_csv(const std::vector<int>& assignment, const std::string& path) {
  std::string out = "node,cluster\n";
  for (std::size_t v = 0; v < assignment.size(); ++v) out += std::to_string(v) + "," + std::to_string(assignment[v]) + "\n";
  write_text_file(path, out);
}

std::string report_text(const RecoveryReport& report) {
  std::string out;
  auto put = [&out](const std::string& key, double value) { out += key + "=" + format_double(value) + "\n"; };
  const auto matrix = [&](const std::string& prefix, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) put(prefix + "." + std::to_string(i) + "." + std::to_string(j), m(i, j));
    }
  };
  const auto& lit = report.misconnection.literal;
  const auto& excl = report.misconnection.self_excluded;
  out += "K=" + std::to_string(lit.rho_plus.rows()) + "\n";
  put("gamma", report.gamma);
  put("literal.homogeneity_margin", lit.homogeneity_margin);
  put("literal.visibility_margin", lit.visibility_margin);
  matrix("literal.rho_plus", lit.rho_plus);
  put("self_excluded.homogeneity_margin", excl.homogeneity_margin);
  put("self_excluded.visibility_margin", excl.visibility_margin);
  matrix("self_excluded.rho_plus", excl.rho_plus);
  bool all = true;
  for (const auto& b : report.node_only) all = all && b.satisfied;
  out += std::string("node_only.all_satisfied=") + (all ? "true" : "false") + "\n";
  return out;
}

std::string report_cluster_csv(const RecoveryReport& report) {
  std::string out =
      "cluster,intra_norm,intra_scale,extra_norm,extra_scale,inter_norm,inter_scale,node_only_rho,node_only_bound,"
      "node_only_satisfied\n";
  for (std::size_t i = 0; i < report.block_norms.size(); ++i) {
    const auto& b = report.block_norms[i];
    out += std::to_string(i) + "," + format_double(b.intra) + "," + format_double(b.intra_scale) + "," +
           format_double(b.extra) + "," + format_double(b.extra_scale) + "," + format_double(b.inter) + "," +
           format_double(b.inter_scale);
    if (i < report.node_only.size()) {
      const auto& c = report.node_only[i];
      out += "," + format_double(c.rho) + "," + format_double(c.bound) + "," + (c.satisfied ? "1" : "0");
    } else {
      out += ",,,";
    }
    out += "\n";
  }
  return out;
}

void write_report(const RecoveryReport& report, const std::string& path, const std::string& cluster_csv_path) {
  write_text_file(path, report_text(report));
  write_text_file(cluster_csv_path, report_cluster_csv(report));
}

}  // namespace atomnc::io
