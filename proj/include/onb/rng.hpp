#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace onb {

/// Deterministic random stream. Built on mt19937_64 (whose output sequence
/// the standard pins down) with hand-rolled distributions, so the same seed
/// yields the same doubles on every platform and compiler.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : words_{seed} { reseed(); }

    /// Child stream derived from the parent's seed words plus the given ids.
    /// Independent of how much the parent has already been consumed.
    Rng derive(std::uint64_t stream, std::uint64_t substream = 0) const {
        Rng child(*this);
        child.words_.push_back(stream);
        child.words_.push_back(substream);
        child.reseed();
        return child;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller (cosine branch only; stateless).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_int(i)]);
    }

    /// k distinct values from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                        std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + uniform_int(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

  private:
    void reseed() {
        // seed_seq consumes 32-bit values; split each word to keep all bits.
        std::vector<std::uint32_t> halves;
        halves.reserve(words_.size() * 2);
        for (std::uint64_t w : words_) {
            halves.push_back(static_cast<std::uint32_t>(w));
            halves.push_back(static_cast<std::uint32_t>(w >> 32));
        }
        std::seed_seq seq(halves.begin(), halves.end());
        engine_.seed(seq);
    }

    std::vector<std::uint64_t> words_;
    std::mt19937_64 engine_;
};

}  // namespace onb
