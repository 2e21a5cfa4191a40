#pragma once

#include <complex>
#include <vector>

#include "onb/common.hpp"

namespace onb {

using Complex = std::complex<double>;

/// Discrete Fourier transform, any length (radix-2 in place for powers of
/// two, Bluestein otherwise). Forward is unscaled; inverse carries the 1/n.
std::vector<Complex> fft(const std::vector<Complex>& v);
std::vector<Complex> ifft(const std::vector<Complex>& v);

}  // namespace onb
