// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "cado.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "numerics.hpp"
#include "recovery.hpp"
#include "support.hpp"

using namespace atomnc;
using testsupport::MatrixXd;
using testsupport::VectorXd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

using Medians = std::map<std::pair<double, Configuration>, double>;

Medians sweep_medians(SweepAxis axis, std::vector<double> values, std::vector<Configuration> cfgs,
                      bool& any_failed) {
  SweepSpec spec;
  spec.axis = axis;
  spec.values = std::move(values);
  spec.configurations = std::move(cfgs);
  const SweepResult r = run_sweep(spec);
  any_failed = r.any_failed();
  Medians out;
  for (const auto& s : summarize(r)) out[{s.axis_value, s.configuration}] = s.median;
  return out;
}

Outcome full_model_defaults() {
  std::vector<double> acc;
  double slowest = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenParams g;
    g.seed = seed;
    SolverConfig s;
    s.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    acc.push_back(run_single(g, s, Configuration::kGFL).test_accuracy);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  const double med = quantile(acc, 0.5);
  return {med >= 0.95 && slowest <= 60.0, "median=" + fmt("%.4f", med) + " slowest_run_s=" + fmt("%.2f", slowest)};
}

Outcome accuracy_vs_p() {
  using C = Configuration;
  const std::vector<double> ps{0.05, 0.075, 0.1, 0.125, 0.15};
  bool failed = false;
  const Medians m = sweep_medians(SweepAxis::kP, ps, {C::kGFL, C::kGSpectral}, failed);
  bool failed_gf = false;
  const Medians gf = sweep_medians(SweepAxis::kP, {0.15}, {C::kGF}, failed_gf);
  bool ok = !failed && !failed_gf;
  ok = ok && m.at({0.15, C::kGFL}) >= 0.95 && gf.at({0.15, C::kGF}) >= 0.95;
  const double chance = m.at({0.05, C::kGSpectral});
  ok = ok && chance >= 0.18 && chance <= 0.52 && m.at({0.05, C::kGFL}) >= 0.85;
  std::string detail;
  for (double p : ps) {
    ok = ok && m.at({p, C::kGFL}) >= m.at({p, C::kGSpectral});
    detail += "p=" + fmt("%g", p) + " GFL=" + fmt("%.4f", m.at({p, C::kGFL})) + " Gspec=" +
              fmt("%.4f", m.at({p, C::kGSpectral})) + "; ";
  }
  detail += "GF@0.15=" + fmt("%.4f", gf.at({0.15, C::kGF}));
  return {ok, detail};
}

Outcome accuracy_vs_omega() {
  using C = Configuration;
  bool failed = false;
  const Medians m = sweep_medians(SweepAxis::kOmega, {0.04, 5}, {C::kGFL, C::kF}, failed);
  const double lo = m.at({0.04, C::kGFL});
  const double hi = m.at({5, C::kGFL});
  const double f_hi = m.at({5, C::kF});
  return {!failed && lo - hi >= 0.0 && hi >= f_hi,
          "GFL@0.04=" + fmt("%.4f", lo) + " GFL@5=" + fmt("%.4f", hi) + " F@5=" + fmt("%.4f", f_hi)};
}

Outcome accuracy_vs_train_ratio() {
  using C = Configuration;
  bool failed = false;
  const Medians m = sweep_medians(SweepAxis::kTrainRatio, {0.2}, {C::kGFL, C::kFL, C::kGL}, failed);
  const double gfl = m.at({0.2, C::kGFL});
  const double fl = m.at({0.2, C::kFL});
  const double gl = m.at({0.2, C::kGL});
  return {!failed && gfl >= fl && gfl >= gl,
          "GFL=" + fmt("%.4f", gfl) + " FL=" + fmt("%.4f", fl) + " GL=" + fmt("%.4f", gl)};
}

// Summed row by row, in the same order as the enumeration.
double one_hot_value(const MatrixXd& g, const MatrixXd& one_hot) {
  double value = 0;
  for (Eigen::Index v = 0; v < g.rows(); ++v) {
    Eigen::Index col = 0;
    one_hot.row(v).maxCoeff(&col);
    value += g(v, col);
  }
  return value;
}

double enumerate_min(const MatrixXd& g) {
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(g.rows());
  for (int code = 0; code < (1 << n); ++code) {
    double value = 0;
    for (int v = 0; v < n; ++v) value += g(v, (code >> v) & 1);
    best = std::min(best, value);
  }
  return best;
}

Outcome lmo_enumeration() {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  // The verbatim weight-space gradient and the solver's default direction.
  SolverConfig verbatim;
  verbatim.r = 2;
  verbatim.structural = StructuralGradient::kWeightSpace;
  verbatim.normalize_graph = false;
  SolverConfig solver_default;
  solver_default.r = 2;
  for (int trial = 0; trial < 100; ++trial) {
    GenParams g;
    g.K = 2;
    g.n0 = 4;
    g.m = 3;
    g.m_omega = 1;
    g.p = 0.5;
    g.q = 0.3;
    g.omega = 0.3;
    g.train_ratio = 0.5;
    g.seed = static_cast<std::uint64_t>(trial);
    const PlantedInstance inst = generate(g);
    for (const SolverConfig& c : {verbatim, solver_default}) {
      SolverState s = init_state(inst, c);
      s.w = testsupport::random_row_simplex(inst.n, 2, rng);
      s.models = testsupport::random_models(2, 3, 2, c.rho_minus, c.rho_plus, rng);
      const MatrixXd grad = grad_W(inst, s.w, s.models, effective_weights(c, inst.n), c.structural);
      const MatrixXd lmo = embedding_lmo(inst, s, c);
      if (one_hot_value(grad, lmo) != enumerate_min(grad)) ++mismatches;
    }
  }
  return {mismatches == 0, "mismatches=" + std::to_string(mismatches) + " of 200"};
}

Outcome spectral_box_optimality() {
  std::mt19937_64 rng(77);
  const double lo = 0.01;
  const double hi = 1.0;
  long violations = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd g = testsupport::random_symmetric(5, rng);
    const double best = g.cwiseProduct(numerics::project_spectral_box(g, lo, hi)).sum();
    for (int s = 0; s < 10000; ++s) {
      const double gap = best - g.cwiseProduct(testsupport::random_box_matrix(5, lo, hi, rng)).sum();
      worst = std::max(worst, gap);
      if (gap > 1e-10) ++violations;
    }
  }
  return {violations == 0, "violations=" + std::to_string(violations) + " worst_gap=" + fmt("%.3g", worst)};
}

double rel_err(const MatrixXd& approx, const MatrixXd& exact) {
  return (approx - exact).norm() / std::max(exact.norm(), 1e-12);
}

Outcome gradient_fd() {
  std::mt19937_64 rng(99);
  double worst = 0;
  const TermWeights weights{1.0, 2.5, 13.0};
  for (int trial = 0; trial < 20; ++trial) {
    GenParams g;
    g.K = 2 + trial % 2;
    g.n0 = 4;
    g.m = 2 + trial % 3;
    g.m_omega = 1;
    g.p = 0.5;
    g.q = 0.2;
    g.omega = 0.4;
    g.train_ratio = 0.5;
    g.seed = static_cast<std::uint64_t>(trial);
    const PlantedInstance inst = generate(g);
    const int r = 2;
    const int m = g.m;
    const MatrixXd w = testsupport::random_row_simplex(inst.n, r, rng);
    const AtomModels models = testsupport::random_models(r, m, g.K, 0.1, 1.0, rng);
    const double h = 1e-6;
    for (int i = 0; i < r; ++i) {
      const MatrixXd exact = grad_R(inst, w, models, weights, i);
      MatrixXd fd(m, m);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          AtomModels plus = models;
          AtomModels minus = models;
          plus.covariances[i](a, b) += h;
          minus.covariances[i](a, b) -= h;
          if (a != b) {
            plus.covariances[i](b, a) += h;
            minus.covariances[i](b, a) -= h;
          }
          const double slope =
              (objective_phi(inst, w, plus, weights) - objective_phi(inst, w, minus, weights)) / (2 * h);
          fd(a, b) = a == b ? slope : slope / 2;
        }
      }
      worst = std::max(worst, rel_err(fd, exact));

      const VectorXd gp = grad_pi(inst, w, models, weights, i);
      VectorXd fdp(g.K);
      for (int k = 0; k < g.K; ++k) {
        AtomModels plus = models;
        AtomModels minus = models;
        plus.label_dists[i](k) += h;
        minus.label_dists[i](k) -= h;
        fdp(k) = (objective_phi(inst, w, plus, weights) - objective_phi(inst, w, minus, weights)) / (2 * h);
      }
      worst = std::max(worst, rel_err(fdp, gp));
    }
  }
  return {worst <= 1e-4, "worst_relative_error=" + fmt("%.3g", worst)};
}

Outcome feasibility() {
  const PlantedInstance inst = generate(GenParams{});
  SolverConfig c;
  c.tol = 0;  // run the full budget
  long violations = 0;
  int iterates = 0;
  const auto result = solve(inst, c, [&](const SolverState& s) {
    ++iterates;
    for (Eigen::Index v = 0; v < s.w.rows(); ++v) {
      if (std::abs(s.w.row(v).sum() - 1) > 1e-8 || s.w.row(v).minCoeff() < -1e-12) ++violations;
    }
    for (int i = 0; i < s.models.atom_count(); ++i) {
      const auto eig = numerics::sym_eig(s.models.covariances[i]);
      if (eig.eigenvalues.minCoeff() < c.rho_minus - 1e-8 || eig.eigenvalues.maxCoeff() > c.rho_plus + 1e-8) {
        ++violations;
      }
      const VectorXd& pi = s.models.label_dists[i];
      if (std::abs(pi.sum() - 1) > 1e-8 || pi.minCoeff() < -1e-8) ++violations;
    }
  });
  const bool full = result.state.t == 500;
  return {violations == 0 && full, "violations=" + std::to_string(violations) + " iterations=" +
                                       std::to_string(result.state.t) + " iterates_checked=" +
                                       std::to_string(iterates)};
}

Outcome recovery_sanity() {
  GenParams ideal;
  ideal.p = 1;
  ideal.q = 0;
  const MisconnectionReport rep = misconnection_stats(generate(ideal));
  bool ok = rep.self_excluded.rho_plus.cwiseAbs().maxCoeff() == 0.0 && rep.self_excluded.visibility_margin == 0.5;
  std::string detail = "ideal: max_rho=" + fmt("%g", rep.self_excluded.rho_plus.cwiseAbs().maxCoeff()) +
                       " visibility=" + fmt("%g", rep.self_excluded.visibility_margin) + "; ";

  std::vector<MatrixXd> literal;
  std::vector<MatrixXd> excluded;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenParams g;
    g.seed = seed;
    const MisconnectionReport r = misconnection_stats(generate(g));
    literal.push_back(r.literal.rho_plus);
    excluded.push_back(r.self_excluded.rho_plus);
  }
  const double n_i = 300;
  double worst_z = 0;
  const auto check = [&](const std::vector<MatrixXd>& mats, int i, int j, double expected) {
    double mean = 0;
    for (const auto& m : mats) mean += m(i, j);
    mean /= mats.size();
    double var = 0;
    for (const auto& m : mats) var += (m(i, j) - mean) * (m(i, j) - mean);
    const double se = std::sqrt(var / (mats.size() - 1) / mats.size());
    const double z = std::abs(mean - expected) / se;
    worst_z = std::max(worst_z, z);
    return z <= 3.0;
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        ok = check(literal, i, j, 1 - 0.1 + 0.1 / n_i) && ok;
        ok = check(excluded, i, j, 1 - 0.1) && ok;
      } else {
        ok = check(literal, i, j, 0.05) && ok;
      }
    }
  }
  detail += "sbm: worst |z|=" + fmt("%.2f", worst_z);
  return {ok, detail};
}

Outcome sweep_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "atomnc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SweepSpec spec;
  spec.gen.n0 = 100;
  spec.axis = SweepAxis::kP;
  spec.values = {0.1, 0.15};
  spec.configurations = {Configuration::kGFL, Configuration::kF, Configuration::kGSpectral};
  spec.seeds = {0, 1};
  spec.output_path = (dir / "a.csv").string();
  run_sweep(spec);
  spec.output_path = (dir / "b.csv").string();
  spec.threads = 2;
  run_sweep(spec);
  const std::string a = io::read_text_file((dir / "a.csv").string());
  const std::string b = io::read_text_file((dir / "b.csv").string());
  return {!a.empty() && a == b, "bytes=" + std::to_string(a.size()) + (a == b ? " identical" : " differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 full-model accuracy at defaults", full_model_defaults},
      {"2 accuracy vs p shape", accuracy_vs_p},
      {"3 accuracy vs omega shape", accuracy_vs_omega},
      {"4 accuracy vs train ratio shape", accuracy_vs_train_ratio},
      {"5 embedding LMO exhaustive oracle", lmo_enumeration},
      {"6 spectral-box LMO optimality", spectral_box_optimality},
      {"7 gradient finite differences", gradient_fd},
      {"8 feasibility over a full solve", feasibility},
      {"9 recovery diagnostics sanity", recovery_sanity},
      {"10 sweep determinism", sweep_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
