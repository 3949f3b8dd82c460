#include "polarmin/rng.hpp"

#include "polarmin/hash.hpp"

#include <cassert>

namespace polarmin {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t masterSeed, std::string_view streamName)
    : state_(masterSeed ^ fnv1a64(streamName)) {
    // Warm up so that nearby seeds and stream names diverge immediately.
    (void)splitmix64(state_);
}

std::uint64_t Rng::nextU64() {
    return splitmix64(state_);
}

double Rng::nextDouble() {
    return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniformInt(std::uint64_t bound) {
    assert(bound > 0);
    if (bound == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = nextU64();
    } while (x >= limit);
    return x % bound;
}

double Rng::uniformReal(double lo, double hi) {
    return lo + (hi - lo) * nextDouble();
}

} // namespace polarmin
