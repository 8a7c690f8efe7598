#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rarsched {

// Seeded random draws with reproducible results. mt19937_64 output is fixed
// by the standard; the distribution helpers here avoid <random> distributions,
// whose output is implementation defined, so a given seed draws the same
// stream everywhere the floating-point environment matches.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Independent stream derived from the original seed, not engine state.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t s = seed_;
        s ^= salt + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        return Rng(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n), rejection sampled to stay unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    long long uniform_int(long long lo, long long hi) {  // inclusive
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double uniform_real(double lo, double hi) {
        const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

    // First k entries of a uniform random permutation, in place.
    template <typename T>
    void partial_shuffle(std::vector<T>& v, std::size_t k) {
        for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace rarsched
