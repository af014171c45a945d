#pragma once

#include <optional>
#include <vector>

namespace latcb {

/// Least-squares fit of log(error) = slope * log(eps) + intercept.
struct RateReport {
  std::vector<double> eps;
  std::vector<double> errors;
  std::vector<bool> used;  // false for points dropped by the noise-floor rule
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square log residual of the used points
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool pass = false;
};

/// Fits the rate over all points, except those whose error lies within
/// 10x of `noise_floor` (e.g. a solver tolerance). Requires >= 3 positive
/// pairs before and after exclusion; pass iff band_lo <= slope <= band_hi.
RateReport fit_rate(const std::vector<double>& eps, const std::vector<double>& errors,
                    std::optional<double> noise_floor = std::nullopt, double band_lo = 1.8, double band_hi = 2.2);

}  // namespace latcb
