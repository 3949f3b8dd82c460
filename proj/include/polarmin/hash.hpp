#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace polarmin {

// FNV-1a, 64 bit. Used for dataset split bucketing and artifact digests.
// Not cryptographic; stable across platforms and runs by construction.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hexDigest(std::uint64_t h);

// Digest of a whole file's bytes, formatted "fnv1a64:<16 hex chars>".
std::string fileDigest(const std::string& path);

// Digest of an in-memory string, same format.
std::string stringDigest(std::string_view bytes);

} // namespace polarmin
