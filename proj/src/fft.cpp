#include "onb/solvers/fft.hpp"

#include <cmath>
#include <numbers>

namespace onb {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse (unscaled).
void fft_pow2(std::vector<Complex>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein's algorithm: arbitrary-length DFT via a power-of-two convolution.
std::vector<Complex> bluestein(const std::vector<Complex>& v, int sign) {
    const std::size_t n = v.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    std::vector<Complex> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small for large k.
        const double ang = sign * std::numbers::pi *
                           static_cast<double>((k * k) % (2 * n)) /
                           static_cast<double>(n);
        chirp[k] = Complex(std::cos(ang), std::sin(ang));
    }

    std::vector<Complex> a(m, Complex(0, 0)), b(m, Complex(0, 0));
    for (std::size_t k = 0; k < n; ++k) a[k] = v[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k)
        b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a, -1);
    fft_pow2(b, -1);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, +1);
    const double inv_m = 1.0 / static_cast<double>(m);

    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
    return out;
}

std::vector<Complex> transform(const std::vector<Complex>& v, int sign) {
    if (v.empty()) return {};
    if (is_pow2(v.size())) {
        std::vector<Complex> a = v;
        fft_pow2(a, sign);
        return a;
    }
    return bluestein(v, sign);
}

}  // namespace

std::vector<Complex> fft(const std::vector<Complex>& v) {
    return transform(v, -1);
}

std::vector<Complex> ifft(const std::vector<Complex>& v) {
    std::vector<Complex> out = transform(v, +1);
    const double inv = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& c : out) c *= inv;
    return out;
}

}  // namespace onb
