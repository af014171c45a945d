#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace latcb::detail {

using Complex = std::complex<double>;

/// Signed frequency of FFT bin m on an n-point axis, in (-n/2, n/2].
inline int signed_frequency(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Unnormalised d-dimensional complex DFT on an n^d row-major grid.
/// sign = -1 forward, +1 backward. Plans are shared and thread safe.
void dft(int dim, int n, int sign, std::span<const Complex> in, std::span<Complex> out);

std::vector<Complex> forward_real(int dim, int n, std::span<const double> values);
/// Normalised inverse transform, real part.
std::vector<double> inverse_real(int dim, int n, std::span<const Complex> coefficients);

}  // namespace latcb::detail
