#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace polarmin {

// Deterministic generator used for every random choice in the toolkit.
//
// One master seed fans out into independent named streams ("permutation",
// "batching", "init", "synth", ...). Two runs with the same master seed and
// the same stream names consume identical sequences regardless of what other
// streams do, which is what makes experiment comparisons bit-reproducible.
//
// The core is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter passed
// through a fixed finalizer. Stream separation mixes the stream name into the
// starting counter via FNV-1a.
class Rng {
public:
    Rng(std::uint64_t masterSeed, std::string_view streamName);

    std::uint64_t nextU64();

    // Uniform in [0, 1), 53-bit resolution.
    double nextDouble();

    // Uniform in [0, bound); bound must be > 0. Rejection sampling, unbiased.
    std::uint64_t uniformInt(std::uint64_t bound);

    double uniformReal(double lo, double hi);

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(uniformInt(i + 1));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace polarmin
