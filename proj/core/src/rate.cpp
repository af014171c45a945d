#include "latcb/rate.hpp"

#include "latcb/types.hpp"

#include <algorithm>
#include <cmath>

namespace latcb {

RateReport fit_rate(const std::vector<double>& eps, const std::vector<double>& errors,
                    std::optional<double> noise_floor, double band_lo, double band_hi) {
  if (eps.size() != errors.size()) throw ConfigError("eps and error lists differ in length");
  if (eps.size() < 3) throw ConfigError("at least three points are needed to fit a rate");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw ConfigError("rate fit needs positive finite eps and error values");

  RateReport r;
  r.eps = eps;
  r.errors = errors;
  r.band_lo = band_lo;
  r.band_hi = band_hi;
  r.used.assign(eps.size(), true);
  if (noise_floor)
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (errors[i] <= 10.0 * *noise_floor) r.used[i] = false;

  double lo = std::log(eps.front()), hi = lo;
  for (double e : eps) {
    lo = std::min(lo, std::log(e));
    hi = std::max(hi, std::log(e));
  }
  if (!(hi - lo > 1e-12)) throw ConfigError("eps values must be distinct");

  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!r.used[i]) continue;
    const double x = std::log(eps[i]), y = std::log(errors[i]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n < 3) throw ConfigError("fewer than three points remain above the noise floor");
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw ConfigError("eps values must be distinct");
  r.slope = (n * sxy - sx * sy) / det;
  r.intercept = (sy - r.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!r.used[i]) continue;
    const double e = std::log(errors[i]) - (r.slope * std::log(eps[i]) + r.intercept);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  r.pass = std::isfinite(r.slope) && r.slope >= band_lo && r.slope <= band_hi;
  return r;
}

}  // namespace latcb
