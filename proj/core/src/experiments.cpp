#include "latcb/experiments.hpp"

#include "latcb/csv.hpp"
#include "latcb/stability.hpp"
#include "latcb/statics.hpp"
#include "latcb/stress.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

namespace latcb {

using nlohmann::json;

#ifndef LATCB_VERSION
#define LATCB_VERSION "0.0.0"
#endif

std::string version() { return LATCB_VERSION; }

bool ExperimentOutcome::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Check check(const std::string& name, double value, double lo, double hi) {
  return {name, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi};
}

json bound(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json rate_json(const RateReport& r) {
  json used = json::array();
  for (bool u : r.used) used.push_back(u);
  return {{"eps", r.eps}, {"errors", r.errors}, {"used", used}, {"slope", r.slope}, {"intercept", r.intercept},
          {"residual", r.residual}, {"band", {r.band_lo, r.band_hi}}, {"pass", r.pass}};
}

std::vector<std::string> indexed(const std::string& stem, int d) {
  std::vector<std::string> out;
  for (int a = 0; a < d; ++a) out.push_back(stem + std::to_string(a));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class Writer {
 public:
  Writer(const ExperimentConfig& c, const std::string& dir) : config_(c), dir_(dir) {}

  CsvTable table(std::vector<std::string> columns) const {
    CsvTable t(std::move(columns));
    t.add_comment("latcb " + version() + " kind=" + to_string(config_.kind) + " name=" + config_.name);
    t.add_comment("config_hash=" + config_.hash + " seed=" + std::to_string(config_.seed));
    if (config_.potential) t.add_comment("potential=" + config_.potential_label);
    return t;
  }

  std::string write(const CsvTable& t, const std::string& suffix) {
    const std::string path = (std::filesystem::path(dir_) / (config_.name + suffix)).string();
    t.write_file(path);
    files.push_back(path);
    return path;
  }

  void report(const ExperimentOutcome& out, json results) {
    json checks = json::array();
    for (const auto& c : out.checks)
      checks.push_back({{"name", c.name}, {"value", bound(c.value)}, {"lo", bound(c.lo)}, {"hi", bound(c.hi)},
                        {"pass", c.pass}});
    json artifacts = json::array();
    for (const auto& f : files) artifacts.push_back(std::filesystem::path(f).filename().string());
    json doc = {{"name", config_.name},
                {"kind", to_string(config_.kind)},
                {"version", version()},
                {"config_hash", config_.hash},
                {"seed", config_.seed},
                {"potential", config_.potential ? config_.potential_label : std::string("harmonic-chain")},
                {"pass", out.pass()},
                {"checks", checks},
                {"results", std::move(results)},
                {"artifacts", artifacts},
                {"config", json::parse(config_.canonical)}};
    const std::string path = (std::filesystem::path(dir_) / (config_.name + ".report.json")).string();
    write_text_file(path, doc.dump(2) + "\n");
    files.push_back(path);
  }

  std::vector<std::string> files;

 private:
  const ExperimentConfig& config_;
  std::string dir_;
};

json run_stability(const ExperimentConfig& c, Writer& w, ExperimentOutcome& out) {
  const auto& p = c.stability;
  const Potential& pot = *c.potential;
  const int d = pot.dim();
  const StabilityEstimate est = stability_constant(pot, p.points, c.workers);
  const double lh = legendre_hadamard_min(CBModel(pot), Mat::Zero(d, d));
  json res = {{"gamma", est.gamma}, {"k_min", std::vector<double>(est.k_min.begin(), est.k_min.end())},
              {"stable", est.stable()}, {"legendre_hadamard_min", lh}, {"points_per_axis", p.points}};
  auto t = w.table(concat(concat({"gamma"}, indexed("k_min", d)), {"legendre_hadamard_min", "rayleigh", "l2_eigenvalue"}));
  std::vector<double> row{est.gamma};
  for (int a = 0; a < d; ++a) row.push_back(est.k_min[a]);
  row.push_back(lh);
  if (p.expect_gamma)
    out.checks.push_back(check("gamma", est.gamma, *p.expect_gamma - p.gamma_tolerance, *p.expect_gamma + p.gamma_tolerance));
  if (p.eigenprobe) {
    const EigenProbe probe = instability_eigenprobe(pot, p.probe_cells);
    res["eigenprobe"] = {{"rayleigh_quotient", probe.rayleigh_quotient},
                         {"l2_eigenvalue", probe.l2_eigenvalue},
                         {"eigen_residual", probe.eigen_residual},
                         {"cells", p.probe_cells}};
    row.push_back(probe.rayleigh_quotient);
    row.push_back(probe.l2_eigenvalue);
    if (p.expect_rayleigh)
      out.checks.push_back(check("rayleigh_quotient", probe.rayleigh_quotient, *p.expect_rayleigh - p.rayleigh_tolerance,
                                 *p.expect_rayleigh + p.rayleigh_tolerance));
  } else {
    row.push_back(std::nan(""));
    row.push_back(std::nan(""));
  }
  t.add_row(row);
  w.write(t, ".csv");
  return res;
}

json run_dispersion(const ExperimentConfig& c, Writer& w, ExperimentOutcome&) {
  const Potential& pot = *c.potential;
  const int d = pot.dim();
  const DispersionSpectrum s = dispersion(pot, c.dispersion.points, c.workers);
  auto t = w.table(concat(concat(concat(indexed("k", d), indexed("lambda", d)), indexed("omega", d)), {"normalizer", "ratio"}));
  double lam_min = kInf, lam_max = -kInf;
  for (std::size_t i = 0; i < s.k.size(); ++i) {
    std::vector<double> row(s.k[i].begin(), s.k[i].end());
    for (int a = 0; a < d; ++a) row.push_back(s.eigenvalues[i][a]);
    // imaginary frequencies are reported with a negative sign
    for (int a = 0; a < d; ++a) {
      const double l = s.eigenvalues[i][a];
      row.push_back(l >= 0.0 ? std::sqrt(l) : -std::sqrt(-l));
    }
    row.push_back(s.normalizer[i]);
    row.push_back(s.ratio[i]);
    t.add_row(row);
    lam_min = std::min(lam_min, s.eigenvalues[i].minCoeff());
    lam_max = std::max(lam_max, s.eigenvalues[i].maxCoeff());
  }
  w.write(t, ".csv");
  const double ratio_min = *std::min_element(s.ratio.begin(), s.ratio.end());
  return {{"points", s.k.size()}, {"lambda_min", lam_min}, {"lambda_max", lam_max}, {"ratio_min", ratio_min}};
}

json run_stress(const ExperimentConfig& c, Writer& w, ExperimentOutcome& out) {
  const auto& p = c.stress;
  const Potential& pot = *c.potential;
  const CBModel model(pot);
  auto t = w.table({"eps", "stress_error", "divergence_error", "divergence_error_macro", "points"});
  std::vector<double> se, de;
  for (double eps : p.eps) {
    const auto r = stress_consistency_field(pot, model, p.U, eps, p.per_cell, c.workers);
    t.add_row({eps, r.stress_error, r.divergence_error, r.divergence_error_macro, static_cast<double>(r.points)});
    se.push_back(r.stress_error);
    de.push_back(r.divergence_error_macro);
  }
  w.write(t, ".csv");
  const RateReport rs = fit_rate(p.eps, se, std::nullopt, p.band_lo, p.band_hi);
  const RateReport rd = fit_rate(p.eps, de, std::nullopt, p.band_lo, p.band_hi);
  out.checks.push_back(check("stress_rate", rs.slope, p.band_lo, p.band_hi));
  out.checks.push_back(check("divergence_rate", rd.slope, p.band_lo, p.band_hi));
  return {{"stress", rate_json(rs)}, {"divergence", rate_json(rd)}};
}

json run_static(const ExperimentConfig& c, Writer& w, ExperimentOutcome& out) {
  const auto& p = c.statics;
  const Potential& pot = *c.potential;
  StaticSweepConfig sc;
  sc.eps = p.eps;
  sc.cb = p.cb;
  sc.atomistic = p.atomistic;
  sc.quad_points = p.quad_points;
  sc.workers = c.workers;
  sc.band_lo = p.band_lo;
  sc.band_hi = p.band_hi;
  const auto sweep = static_converge_sweep(pot, make_macro_force(p.force_shape, p.delta), sc);
  std::optional<StaticSweepResult> half;
  if (p.delta_halving) half = static_converge_sweep(pot, make_macro_force(p.force_shape, 0.5 * p.delta), sc);

  auto t = w.table({"eps", "error", "residual_a", "newton_steps", "min_rayleigh", "used", "error_half_delta", "ratio"});
  double rmin = kInf, rmax = -kInf;
  json rows = json::array();
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    const double eh = half ? half->rows[i].error : std::nan("");
    const double ratio = half ? eh / r.error : std::nan("");
    if (half) {
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
    }
    t.add_row({r.eps, r.error, r.residual_a, static_cast<double>(r.newton_steps), r.min_rayleigh,
               sweep.rate.used[i] ? 1.0 : 0.0, eh, ratio});
    rows.push_back({{"eps", r.eps}, {"error", r.error}, {"residual_a", r.residual_a},
                    {"newton_steps", r.newton_steps}, {"min_rayleigh", r.min_rayleigh}});
  }
  w.write(t, ".csv");
  out.checks.push_back(check("static_rate", sweep.rate.slope, p.band_lo, p.band_hi));
  json res = {{"rate", rate_json(sweep.rate)},
              {"rows", rows},
              {"cb", {{"residual", sweep.cb.residual},
                      {"newton_steps", sweep.cb.newton_steps},
                      {"max_strain", sweep.cb.max_strain},
                      {"residual_history", sweep.cb.residual_history}}}};
  if (half) {
    out.checks.push_back(check("delta_halving_ratio_min", rmin, p.halving_lo, p.halving_hi));
    out.checks.push_back(check("delta_halving_ratio_max", rmax, p.halving_lo, p.halving_hi));
    res["delta_halving"] = {{"ratio_min", rmin}, {"ratio_max", rmax}, {"rate", rate_json(half->rate)}};
  }
  return res;
}

json run_dynamic(const ExperimentConfig& c, Writer& w, ExperimentOutcome& out) {
  const auto& p = c.dynamics;
  const Potential& pot = *c.potential;
  DynamicSweepConfig dc;
  dc.eps = p.eps;
  dc.T_macro = p.T_macro;
  dc.atomistic = p.atomistic;
  dc.cb = p.cb;
  dc.control_run = p.control_run;
  dc.quad_points = p.quad_points;
  dc.workers = c.workers;
  dc.band_lo = p.band_lo;
  dc.band_hi = p.band_hi;
  const auto sweep = dynamic_error_sweep(pot, p.data, dc);

  auto t = w.table({"eps", "error", "error_half_dt", "control_change", "energy_drift", "steps", "used"});
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    t.add_row({r.eps, r.error, p.control_run ? r.error_half_dt : std::nan(""),
               p.control_run ? r.control_change : std::nan(""), r.energy_drift, static_cast<double>(r.steps),
               sweep.rate.used[i] ? 1.0 : 0.0});
  }
  w.write(t, ".csv");
  std::vector<std::string> cols{"T"};
  for (const auto& r : sweep.rows) cols.push_back("error_N" + std::to_string(cells_for_scale(r.eps)));
  auto h = w.table(cols);
  for (std::size_t j = 0; j < sweep.cb.time.size(); ++j) {
    std::vector<double> row{sweep.cb.time[j]};
    for (const auto& r : sweep.rows) row.push_back(r.error_history[j]);
    h.add_row(row);
  }
  w.write(h, ".history.csv");
  out.checks.push_back(check("dynamic_rate", sweep.rate.slope, p.band_lo, p.band_hi));
  if (p.control_run) out.checks.push_back(check("half_dt_control", sweep.max_control_change, 0.0, p.control_max));
  return {{"rate", rate_json(sweep.rate)},
          {"max_control_change", sweep.max_control_change},
          {"cb", {{"dt", sweep.cb.dt}, {"steps", sweep.cb.steps}, {"energy_drift", sweep.cb.energy_drift()},
                  {"max_strain", sweep.cb.max_strain}}}};
}

json run_instability(const ExperimentConfig& c, Writer& w, ExperimentOutcome& out) {
  const auto& p = c.instability;
  const GrowthReport g = instability_demo(p.a1, p.a2, p.eps, p.options);
  std::optional<GrowthReport> s;
  if (p.stable) s = instability_demo(p.stable->first, p.stable->second, p.eps, p.options);
  auto t = w.table({"t", "speed", "ratio", "stable_speed", "stable_bound"});
  for (std::size_t j = 0; j < g.time.size(); ++j)
    t.add_row({g.time[j], g.speed[j], g.ratio[j], s ? s->speed[j] : std::nan(""), g.stable_bound});
  w.write(t, ".csv");
  out.checks.push_back(check("growth_ratio_min", g.min_ratio, 1.0, kInf));
  out.checks.push_back(check("cb_zero_solution", g.cb_max, 0.0, 0.0));
  json res = {{"eps", g.eps},        {"window", {g.window_lo, g.window_hi}},
              {"min_ratio", g.min_ratio}, {"max_speed", g.max_speed},
              {"cb_max", g.cb_max},  {"probe", p.probe == ProbeShape::alternating ? "alternating" : "long-wave"}};
  if (s) {
    out.checks.push_back(check("stable_speed_over_bound", s->max_speed / s->stable_bound, 0.0, 1.0));
    res["stable"] = {{"a1", p.stable->first}, {"a2", p.stable->second}, {"max_speed", s->max_speed},
                     {"bound", s->stable_bound}};
  }
  return res;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentOutcome out;
  Writer w(config, out_dir);
  json results;
  switch (config.kind) {
    case ExperimentKind::stability: results = run_stability(config, w, out); break;
    case ExperimentKind::dispersion: results = run_dispersion(config, w, out); break;
    case ExperimentKind::stress_consistency: results = run_stress(config, w, out); break;
    case ExperimentKind::static_converge: results = run_static(config, w, out); break;
    case ExperimentKind::dynamic_converge: results = run_dynamic(config, w, out); break;
    case ExperimentKind::instability_demo: results = run_instability(config, w, out); break;
  }
  w.report(out, std::move(results));
  out.files = w.files;
  return out;
}

}  // namespace latcb
