#include <doctest.h>

#include "onb/rng.hpp"
#include "onb/solvers/fft.hpp"
#include "support/test_helpers.hpp"

using namespace onb;

namespace {
std::vector<Complex> random_vec(std::size_t n, Rng& rng) {
    std::vector<Complex> v(n);
    for (auto& c : v) c = Complex(rng.normal(), rng.normal());
    return v;
}
double max_err(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

TEST_CASE("fft: impulse transforms to the all-ones spectrum") {
    std::vector<Complex> delta(8, Complex(0, 0));
    delta[0] = Complex(1, 0);
    const auto spec = fft(delta);
    for (const auto& c : spec) CHECK(std::abs(c - Complex(1, 0)) <= 1e-15);
}

TEST_CASE("fft: inverse of forward is the identity") {
    Rng rng(3);
    for (std::size_t n : {std::size_t{128}, std::size_t{12}, std::size_t{1}}) {
        const auto v = random_vec(n, rng);
        CHECK(max_err(ifft(fft(v)), v) <= 1e-12);
    }
}

TEST_CASE("fft matches the O(n^2) reference DFT") {
    Rng rng(5);
    for (std::size_t n : {std::size_t{8}, std::size_t{12}, std::size_t{17}}) {
        const auto v = random_vec(n, rng);
        CHECK(max_err(fft(v), testing::naive_dft(v)) <= 1e-11);
    }
}

TEST_CASE("fft: empty input") {
    CHECK(fft({}).empty());
    CHECK(ifft({}).empty());
}
