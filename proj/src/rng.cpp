#include "igo/rng.hpp"

#include <cmath>
#include <numbers>

namespace igo {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t lanes64(const std::array<std::uint32_t, 4>& b, int pair) {
    return (static_cast<std::uint64_t>(b[2 * pair + 1]) << 32) | b[2 * pair];
}

// 53-bit mantissa uniform in (0, 1]; strictly positive so log() is safe.
inline double to_unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

namespace philox {

std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t counter) {
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>(counter >> 32), 0u, 0u};
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        philox_round(c, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return c;
}

}  // namespace philox

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t instance) {
    std::uint64_t x = splitmix64(seed ^ fnv1a64(label));
    return splitmix64(x + instance * 0x9E3779B97F4A7C15ull);
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view label,
                           std::uint64_t instance)
    : key_(derive_seed(seed, label, instance)) {}

double RandomStream::uniform(std::uint64_t index) const {
    const auto b = philox::block(key_, index);
    return (static_cast<double>(lanes64(b, 0) >> 11)) * 0x1.0p-53;
}

double RandomStream::normal(std::uint64_t index) const {
    // One block yields a Box-Muller pair; the index selects the lane.
    const auto b = philox::block(key_, index >> 1);
    const double u1 = to_unit_open(lanes64(b, 0));
    const double u2 = to_unit_open(lanes64(b, 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return (index & 1) ? r * std::sin(theta) : r * std::cos(theta);
}

std::vector<double> RandomStream::normal_vec(std::uint64_t first_index,
                                             std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = normal(first_index + i);
    return out;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t index,
                                          std::uint64_t bound) const {
    const auto b = philox::block(key_, index);
    // Multiply-shift rejection-free mapping; bias is < 2^-64 per draw.
    const std::uint64_t r = lanes64(b, 0);
    unsigned __int128 wide = static_cast<unsigned __int128>(r) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace igo
