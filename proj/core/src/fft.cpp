#include "fft.hpp"

#include "latcb/types.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

namespace latcb::detail {

namespace {

struct Buffer {
  explicit Buffer(std::size_t n) : size(n), data(fftw_alloc_complex(n)) {
    if (!data) throw Error("fftw allocation failed");
  }
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  std::size_t size;
  fftw_complex* data;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the lifetime of the process; FFTW_ESTIMATE keeps the
// chosen algorithm independent of timing, so results are reproducible.
fftw_plan plan_for(int dim, int n, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard lock(plan_mutex());
  const auto key = std::make_tuple(dim, n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::size_t total = 1;
  int dims[3];
  for (int a = 0; a < dim; ++a) {
    dims[a] = n;
    total *= static_cast<std::size_t>(n);
  }
  Buffer in(total), out(total);
  fftw_plan p = fftw_plan_dft(dim, dims, in.data, out.data, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!p) throw Error("fftw planning failed");
  plans.emplace(key, p);
  return p;
}

}  // namespace

void dft(int dim, int n, int sign, std::span<const Complex> in, std::span<Complex> out) {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  if (in.size() != total || out.size() != total) throw Error("dft size mismatch");
  fftw_plan p = plan_for(dim, n, sign);
  Buffer a(total), b(total);
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(a.data));
  fftw_execute_dft(p, a.data, b.data);
  std::copy(reinterpret_cast<Complex*>(b.data), reinterpret_cast<Complex*>(b.data) + total, out.begin());
}

std::vector<Complex> forward_real(int dim, int n, std::span<const double> values) {
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out(in.size());
  dft(dim, n, -1, in, out);
  return out;
}

std::vector<double> inverse_real(int dim, int n, std::span<const Complex> coefficients) {
  std::vector<Complex> out(coefficients.size());
  dft(dim, n, +1, coefficients, out);
  std::vector<double> values(out.size());
  const double scale = 1.0 / static_cast<double>(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real() * scale;
  return values;
}

}  // namespace latcb::detail
