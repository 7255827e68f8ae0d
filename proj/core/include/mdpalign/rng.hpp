#pragma once

#include <cstdint>
#include <random>

namespace mdpalign {

/// Deterministic random stream keyed by (seed, stream index). Different stream
/// indices under the same seed give independent sequences, so restarts, seeds
/// and rollouts can be drawn in any order or in parallel with the same result.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x6d6470u};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound < 2^31.
    int below(int bound) {
        return static_cast<int>(((engine_() >> 32) * static_cast<std::uint64_t>(bound)) >> 32);
    }

    /// Index drawn from a probability row (entries sum to 1).
    template <typename Range>
    int categorical(const Range& probs) {
        const double u = uniform();
        double acc = 0.0;
        int last = -1;
        int i = 0;
        for (double p : probs) {
            if (p > 0.0) {
                acc += p;
                last = i;
                if (u < acc) return i;
            }
            ++i;
        }
        return last;
    }

    /// Fisher-Yates shuffle.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            const int j = below(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace mdpalign
