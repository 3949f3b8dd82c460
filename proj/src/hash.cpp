#include "polarmin/hash.hpp"

#include "polarmin/errors.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace polarmin {

std::string hexDigest(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string fileDigest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file for digest: " + path);
    }
    std::uint64_t h = 1469598103934665603ULL;
    std::array<char, 65536> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(got)), h);
    }
    return "fnv1a64:" + hexDigest(h);
}

std::string stringDigest(std::string_view bytes) {
    return "fnv1a64:" + hexDigest(fnv1a64(bytes));
}

} // namespace polarmin
