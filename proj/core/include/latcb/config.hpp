#pragma once

#include "latcb/dynamics.hpp"
#include "latcb/potential.hpp"
#include "latcb/statics.hpp"
#include "latcb/trig_field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace latcb {

enum class ExperimentKind {
  stability,
  dispersion,
  stress_consistency,
  static_converge,
  dynamic_converge,
  instability_demo,
};

std::string to_string(ExperimentKind kind);
/// ConfigError for unknown names.
ExperimentKind parse_kind(const std::string& name);

struct StabilityParams {
  int points = 256;
  std::optional<double> expect_gamma;
  double gamma_tolerance = 1e-6;
  /// Alternating-strain probe, harmonic chains only.
  bool eigenprobe = false;
  int probe_cells = 64;
  std::optional<double> expect_rayleigh;
  double rayleigh_tolerance = 1e-10;
};

struct DispersionParams {
  int points = 256;
};

struct StressParams {
  TrigField U = TrigField::zero(1);
  std::vector<double> eps;
  int per_cell = 4;
  double band_lo = 1.8;
  double band_hi = 2.2;
};

struct StaticParams {
  TrigField force_shape = TrigField::zero(1);
  double delta = 0.01;
  std::vector<double> eps;
  CBStaticOptions cb;
  AtomisticStaticOptions atomistic;
  int quad_points = 6;
  double band_lo = 1.8;
  double band_hi = 2.2;
  /// Repeat the sweep at delta / 2 and require error ratios in [lo, hi].
  bool delta_halving = false;
  double halving_lo = 0.4;
  double halving_hi = 0.6;
};

struct DynamicParams {
  InitialData data{TrigField::zero(1), TrigField::zero(1)};
  /// If set, U0 is rescaled so that sup |grad U0| equals this value.
  std::optional<double> grad_sup;
  double T_macro = 0.5;
  std::vector<double> eps;
  AtomisticDynamicsOptions atomistic;
  CBDynamicsOptions cb;
  bool control_run = true;
  double control_max = 0.1;
  int quad_points = 6;
  double band_lo = 1.8;
  double band_hi = 2.2;
};

struct InstabilityParams {
  double a1 = -1.0;
  double a2 = 0.5;
  double eps = 1.0 / 64;
  ProbeShape probe = ProbeShape::alternating;
  /// Comparison chain expected to stay below 2 eps^2 with the same probe.
  std::optional<std::pair<double, double>> stable;
  InstabilityOptions options;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::stability;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<Potential> potential;  // absent only for instability-demo
  std::string potential_label;

  StabilityParams stability;
  DispersionParams dispersion;
  StressParams stress;
  StaticParams statics;
  DynamicParams dynamics;
  InstabilityParams instability;

  std::string canonical;  // canonical JSON text of the parsed config (after overrides)
  std::string hash;       // FNV-1a 64 of `canonical`, hex
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

/// Parses a JSON config. ConfigError messages carry line/column for syntax
/// errors and the dotted field path for schema errors.
ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace latcb
