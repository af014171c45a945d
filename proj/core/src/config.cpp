#include "latcb/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>

namespace latcb {

using nlohmann::json;

namespace {

struct Kinds {
  ExperimentKind kind;
  const char* name;
};
constexpr Kinds kKinds[] = {
    {ExperimentKind::stability, "stability"},
    {ExperimentKind::dispersion, "dispersion"},
    {ExperimentKind::stress_consistency, "stress-consistency"},
    {ExperimentKind::static_converge, "static-converge"},
    {ExperimentKind::dynamic_converge, "dynamic-converge"},
    {ExperimentKind::instability_demo, "instability-demo"},
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.contains(k)) fail(join(path, k), "unknown field");
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const std::string& path, const char* key, std::optional<double> def = std::nullopt) {
  const json* v = find(obj, key);
  if (!v) {
    if (def) return *def;
    fail(join(path, key), "required number is missing");
  }
  if (!v->is_number()) fail(join(path, key), "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "expected a finite number");
  return x;
}

std::optional<double> opt_number(const json& obj, const std::string& path, const char* key) {
  if (!find(obj, key)) return std::nullopt;
  return number(obj, path, key);
}

int integer(const json& obj, const std::string& path, const char* key, std::optional<int> def = std::nullopt,
            int min = std::numeric_limits<int>::min()) {
  const json* v = find(obj, key);
  if (!v) {
    if (def) return *def;
    fail(join(path, key), "required integer is missing");
  }
  if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
  const auto x = v->get<long long>();
  if (x < min || x > std::numeric_limits<int>::max()) fail(join(path, key), "integer out of range (min " + std::to_string(min) + ")");
  return static_cast<int>(x);
}

bool boolean(const json& obj, const std::string& path, const char* key, bool def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_boolean()) fail(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string string(const json& obj, const std::string& path, const char* key, std::optional<std::string> def = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (def) return *def;
    fail(join(path, key), "required string is missing");
  }
  if (!v->is_string()) fail(join(path, key), "expected a string");
  return v->get<std::string>();
}

const json& object(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) fail(join(path, key), "required object is missing");
  if (!v->is_object()) fail(join(path, key), "expected an object");
  return *v;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// "eps": [0.125, "1/16", ...] or "cells": [8, 16, ...]
std::vector<double> eps_list(const json& obj, const std::string& path) {
  const json* e = find(obj, "eps");
  const json* c = find(obj, "cells");
  if (e && c) fail(join(path, "eps"), "give either 'eps' or 'cells', not both");
  std::vector<double> out;
  if (c) {
    if (!c->is_array()) fail(join(path, "cells"), "expected an array of integers");
    for (std::size_t i = 0; i < c->size(); ++i) {
      const auto& x = (*c)[i];
      if (!x.is_number_integer() || x.get<long long>() < 4)
        fail(join(path, "cells") + "[" + std::to_string(i) + "]", "expected an integer >= 4");
      out.push_back(1.0 / static_cast<double>(x.get<long long>()));
    }
    return out;
  }
  if (!e) fail(join(path, "eps"), "required list is missing (or give 'cells')");
  if (!e->is_array()) fail(join(path, "eps"), "expected an array");
  for (std::size_t i = 0; i < e->size(); ++i) {
    const auto& x = (*e)[i];
    const std::string p = join(path, "eps") + "[" + std::to_string(i) + "]";
    if (x.is_number()) {
      out.push_back(x.get<double>());
    } else if (x.is_string()) {
      const std::string s = x.get<std::string>();
      long long n = 0;
      char tail = 0;
      if (std::sscanf(s.c_str(), "1/%lld%c", &n, &tail) != 1 || n < 1) fail(p, "expected a number or \"1/N\"");
      out.push_back(1.0 / static_cast<double>(n));
    } else {
      fail(p, "expected a number or \"1/N\"");
    }
    if (!(out.back() > 0.0)) fail(p, "eps must be positive");
  }
  return out;
}

Mat matrix(const json& v, const std::string& path, int dim) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "cubic" || s == "square" || s == "chain") return Mat::Identity(dim, dim);
    if (s == "triangular" && dim == 2) {
      Mat a(2, 2);
      a << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
      return a;
    }
    fail(path, "unknown lattice name '" + s + "'");
  }
  if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(path, "expected " + std::to_string(dim) + " rows");
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto row = number_list(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    if (static_cast<int>(row.size()) != dim) fail(path + "[" + std::to_string(i) + "]", "wrong row length");
    for (int j = 0; j < dim; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  if (std::abs(a.determinant()) < 1e-12) fail(path, "orientation matrix is singular");
  return a;
}

RadialFunction radial(const json& obj, const std::string& path) {
  const std::string form = string(obj, path, "form");
  if (form == "lennard-jones") {
    allow_keys(obj, path, {"form", "depth", "r0"});
    return RadialFunction(LennardJones{number(obj, path, "depth", 1.0), number(obj, path, "r0", 1.0)});
  }
  if (form == "morse") {
    allow_keys(obj, path, {"form", "depth", "stiffness", "r0"});
    return RadialFunction(Morse{number(obj, path, "depth", 1.0), number(obj, path, "stiffness", 1.0), number(obj, path, "r0", 1.0)});
  }
  if (form == "power") {
    allow_keys(obj, path, {"form", "scale", "exponent"});
    return RadialFunction(PowerLaw{number(obj, path, "scale", 1.0), number(obj, path, "exponent", 6.0)});
  }
  if (form == "exponential") {
    allow_keys(obj, path, {"form", "scale", "rate", "r0"});
    return RadialFunction(Exponential{number(obj, path, "scale", 1.0), number(obj, path, "rate", 1.0), number(obj, path, "r0", 1.0)});
  }
  fail(join(path, "form"), "unknown radial form '" + form + "'");
}

Potential potential(const json& obj, const std::string& path, std::string& label) {
  const std::string type = string(obj, path, "type");
  std::optional<double> kappa = opt_number(obj, path, "kappa");
  if (kappa && !(*kappa > 0.0)) fail(join(path, "kappa"), "must be positive");
  try {
    if (type == "harmonic-chain") {
      allow_keys(obj, path, {"type", "a1", "a2", "kappa"});
      const double a1 = number(obj, path, "a1"), a2 = number(obj, path, "a2");
      label = "harmonic-chain(a1=" + std::to_string(a1) + ",a2=" + std::to_string(a2) + ")";
      return make_harmonic_chain(a1, a2, kappa);
    }
    const int dim = integer(obj, path, "dim", std::nullopt, 1);
    if (dim > kMaxDim) fail(join(path, "dim"), "dimension must be 1, 2 or 3");
    const Mat a = find(obj, "orientation") ? matrix(obj["orientation"], join(path, "orientation"), dim)
                                           : Mat(Mat::Identity(dim, dim));
    const double cutoff = number(obj, path, "cutoff");
    if (!(cutoff >= 1.0)) fail(join(path, "cutoff"), "must be at least 1");
    if (type == "pair") {
      allow_keys(obj, path, {"type", "dim", "orientation", "cutoff", "kappa", "phi"});
      RadialFunction phi = radial(object(obj, path, "phi"), join(path, "phi"));
      label = "pair(" + phi.name() + ")";
      return make_pair_potential(dim, a, cutoff, phi, kappa);
    }
    if (type == "eam") {
      allow_keys(obj, path, {"type", "dim", "orientation", "cutoff", "kappa", "phi", "psi", "embedding"});
      RadialFunction phi = radial(object(obj, path, "phi"), join(path, "phi"));
      RadialFunction psi = radial(object(obj, path, "psi"), join(path, "psi"));
      const json* emb = find(obj, "embedding");
      if (!emb) fail(join(path, "embedding"), "required coefficient list is missing");
      Polynomial g(number_list(*emb, join(path, "embedding")));
      label = "eam(" + phi.name() + "," + psi.name() + ")";
      return make_eam_potential(dim, a, cutoff, phi, psi, g, kappa);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(join(path, "type"), "unknown potential type '" + type + "' (pair, eam, harmonic-chain)");
}

TrigField trig_field(const json& obj, const std::string& path, int dim) {
  allow_keys(obj, path, {"modes"});
  const json* modes = find(obj, "modes");
  if (!modes || !modes->is_array()) fail(join(path, "modes"), "expected an array of modes");
  std::vector<TrigMode> out;
  for (std::size_t i = 0; i < modes->size(); ++i) {
    const std::string p = join(path, "modes") + "[" + std::to_string(i) + "]";
    const json& mode = (*modes)[i];
    allow_keys(mode, p, {"m", "cos", "sin"});
    TrigMode t{IVec::Zero(dim), Vec::Zero(dim), Vec::Zero(dim)};
    const json* m = find(mode, "m");
    if (!m || !m->is_array() || static_cast<int>(m->size()) != dim) fail(join(p, "m"), "expected " + std::to_string(dim) + " integers");
    for (int a = 0; a < dim; ++a) {
      const auto& x = (*m)[static_cast<std::size_t>(a)];
      if (!x.is_number_integer()) fail(join(p, "m"), "expected integers");
      t.m[a] = x.get<int>();
    }
    for (const char* key : {"cos", "sin"}) {
      const json* c = find(mode, key);
      if (!c) continue;
      const auto v = number_list(*c, join(p, key));
      if (static_cast<int>(v.size()) != dim) fail(join(p, key), "expected " + std::to_string(dim) + " components");
      Vec& dst = std::string(key) == "cos" ? t.cos_coef : t.sin_coef;
      for (int a = 0; a < dim; ++a) dst[a] = v[static_cast<std::size_t>(a)];
    }
    out.push_back(std::move(t));
  }
  return {dim, std::move(out)};
}

void band(const json& obj, const std::string& path, double& lo, double& hi) {
  const json* b = find(obj, "band");
  if (!b) return;
  const auto v = number_list(*b, join(path, "band"));
  if (v.size() != 2 || !(v[0] < v[1])) fail(join(path, "band"), "expected [lo, hi] with lo < hi");
  lo = v[0];
  hi = v[1];
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

int dim_of(const ExperimentConfig& c) { return c.potential ? c.potential->dim() : 1; }

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config syntax error at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  allow_keys(root, "", {"name", "kind", "seed", "workers", "potential", "stability", "dispersion",
                        "stress-consistency", "static-converge", "dynamic-converge", "instability-demo"});
  if (overrides.seed) root["seed"] = *overrides.seed;
  if (overrides.workers) root["workers"] = *overrides.workers;

  ExperimentConfig c;
  c.name = string(root, "", "name");
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) fail("name", "must be a plain file stem");
  try {
    c.kind = parse_kind(string(root, "", "kind"));
  } catch (const ConfigError& e) {
    fail("kind", e.what());
  }
  if (const json* s = find(root, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
      fail("seed", "expected a nonnegative integer");
    c.seed = s->get<std::uint64_t>();
  }
  c.workers = integer(root, "", "workers", 1, 1);

  if (const json* p = find(root, "potential")) {
    if (!p->is_object()) fail("potential", "expected an object");
    c.potential = potential(*p, "potential", c.potential_label);
  } else if (c.kind != ExperimentKind::instability_demo) {
    fail("potential", "required object is missing");
  }

  const std::string section = to_string(c.kind);
  const json empty = json::object();
  for (const auto& k : kKinds)
    if (k.kind != c.kind && find(root, k.name)) fail(k.name, "section does not match kind '" + section + "'");
  const json& s = find(root, section.c_str()) ? object(root, "", section.c_str()) : empty;
  const std::string& path = section;
  const int dim = dim_of(c);

  switch (c.kind) {
    case ExperimentKind::stability: {
      allow_keys(s, path, {"points", "expect_gamma", "gamma_tolerance", "eigenprobe", "probe_cells",
                           "expect_rayleigh", "rayleigh_tolerance"});
      auto& p = c.stability;
      p.points = integer(s, path, "points", p.points, 1);
      p.expect_gamma = opt_number(s, path, "expect_gamma");
      p.gamma_tolerance = number(s, path, "gamma_tolerance", p.gamma_tolerance);
      p.eigenprobe = boolean(s, path, "eigenprobe", false);
      p.probe_cells = integer(s, path, "probe_cells", p.probe_cells, 2);
      p.expect_rayleigh = opt_number(s, path, "expect_rayleigh");
      p.rayleigh_tolerance = number(s, path, "rayleigh_tolerance", p.rayleigh_tolerance);
      if (p.eigenprobe && !std::holds_alternative<HarmonicChainPayload>(c.potential->payload()))
        fail(join(path, "eigenprobe"), "only available for harmonic chains");
      if (p.eigenprobe && p.probe_cells % 2 != 0) fail(join(path, "probe_cells"), "must be even");
      break;
    }
    case ExperimentKind::dispersion: {
      allow_keys(s, path, {"points"});
      c.dispersion.points = integer(s, path, "points", c.dispersion.points, 1);
      break;
    }
    case ExperimentKind::stress_consistency: {
      allow_keys(s, path, {"field", "eps", "cells", "per_cell", "band"});
      auto& p = c.stress;
      p.U = trig_field(object(s, path, "field"), join(path, "field"), dim);
      p.eps = eps_list(s, path);
      p.per_cell = integer(s, path, "per_cell", p.per_cell, 1);
      band(s, path, p.band_lo, p.band_hi);
      break;
    }
    case ExperimentKind::static_converge: {
      allow_keys(s, path, {"force", "delta", "eps", "cells", "grid_points", "tol_cb", "tol_a", "max_newton",
                           "random_probes", "quad_points", "band", "delta_halving", "halving_band"});
      auto& p = c.statics;
      p.force_shape = trig_field(object(s, path, "force"), join(path, "force"), dim);
      p.delta = number(s, path, "delta", p.delta);
      if (!(p.delta > 0.0)) fail(join(path, "delta"), "must be positive");
      p.eps = eps_list(s, path);
      p.cb.grid_points = integer(s, path, "grid_points", p.cb.grid_points, 4);
      p.cb.tol = number(s, path, "tol_cb", p.cb.tol);
      p.atomistic.tol = number(s, path, "tol_a", p.atomistic.tol);
      p.atomistic.max_newton = integer(s, path, "max_newton", p.atomistic.max_newton, 1);
      p.cb.max_newton = p.atomistic.max_newton;
      p.atomistic.random_probes = integer(s, path, "random_probes", p.atomistic.random_probes, 0);
      p.atomistic.seed = c.seed;
      p.quad_points = integer(s, path, "quad_points", p.quad_points, 1);
      band(s, path, p.band_lo, p.band_hi);
      p.delta_halving = boolean(s, path, "delta_halving", false);
      if (const json* hb = find(s, "halving_band")) {
        const auto v = number_list(*hb, join(path, "halving_band"));
        if (v.size() != 2 || !(v[0] < v[1])) fail(join(path, "halving_band"), "expected [lo, hi] with lo < hi");
        p.halving_lo = v[0];
        p.halving_hi = v[1];
      }
      break;
    }
    case ExperimentKind::dynamic_converge: {
      allow_keys(s, path, {"U0", "U1", "grad_sup", "T", "eps", "cells", "grid_points", "dt_a", "dt_cb", "samples",
                           "tail_tolerance", "control_run", "control_max", "quad_points", "band"});
      auto& p = c.dynamics;
      p.data.U0 = trig_field(object(s, path, "U0"), join(path, "U0"), dim);
      p.data.U1 = find(s, "U1") ? trig_field(object(s, path, "U1"), join(path, "U1"), dim) : TrigField::zero(dim);
      p.grad_sup = opt_number(s, path, "grad_sup");
      if (p.grad_sup && !(*p.grad_sup > 0.0)) fail(join(path, "grad_sup"), "must be positive");
      p.T_macro = number(s, path, "T", p.T_macro);
      if (!(p.T_macro >= 0.0)) fail(join(path, "T"), "must be nonnegative");
      p.eps = eps_list(s, path);
      p.cb.grid_points = integer(s, path, "grid_points", p.cb.grid_points, 4);
      p.atomistic.dt = number(s, path, "dt_a", 0.0);
      p.cb.dt = number(s, path, "dt_cb", 0.0);
      p.atomistic.samples = p.cb.samples = integer(s, path, "samples", p.cb.samples, 2);
      p.cb.tail_tolerance = number(s, path, "tail_tolerance", p.cb.tail_tolerance);
      p.control_run = boolean(s, path, "control_run", true);
      p.control_max = number(s, path, "control_max", p.control_max);
      p.quad_points = integer(s, path, "quad_points", p.quad_points, 1);
      band(s, path, p.band_lo, p.band_hi);
      break;
    }
    case ExperimentKind::instability_demo: {
      allow_keys(s, path, {"a1", "a2", "eps", "cells", "probe", "stable", "dt", "samples_per_unit"});
      auto& p = c.instability;
      p.a1 = number(s, path, "a1", p.a1);
      p.a2 = number(s, path, "a2", p.a2);
      if (find(s, "eps") && find(s, "cells")) fail(join(path, "eps"), "give either 'eps' or 'cells', not both");
      if (find(s, "cells")) p.eps = 1.0 / integer(s, path, "cells", std::nullopt, 4);
      else p.eps = number(s, path, "eps", p.eps);
      const std::string probe = string(s, path, "probe", std::string("alternating"));
      if (probe == "alternating") p.probe = ProbeShape::alternating;
      else if (probe == "long-wave") p.probe = ProbeShape::long_wave;
      else fail(join(path, "probe"), "expected 'alternating' or 'long-wave'");
      p.options.probe = p.probe;
      if (const json* st = find(s, "stable")) {
        allow_keys(*st, join(path, "stable"), {"a1", "a2"});
        p.stable = std::pair{number(*st, join(path, "stable"), "a1"), number(*st, join(path, "stable"), "a2")};
      }
      p.options.dt = number(s, path, "dt", 0.0);
      p.options.samples_per_unit = integer(s, path, "samples_per_unit", p.options.samples_per_unit, 1);
      try {
        cells_for_scale(p.eps);
      } catch (const ConfigError& e) {
        fail(join(path, "eps"), e.what());
      }
      break;
    }
  }

  if (c.kind == ExperimentKind::dynamic_converge && c.dynamics.grad_sup) {
    const double g = c.dynamics.data.U0.grad_sup_norm();
    if (!(g > 0.0)) fail("dynamic-converge.grad_sup", "U0 has zero gradient");
    c.dynamics.data.U0 = c.dynamics.data.U0.scaled(*c.dynamics.grad_sup / g);
  }

  json hashed = root;
  hashed.erase("workers");
  c.canonical = hashed.dump();
  c.hash = fnv1a_hex(c.canonical);
  return c;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace latcb
