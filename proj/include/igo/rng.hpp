#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace igo {

// Philox4x32-10 counter-based generator. Every draw is addressed by an
// explicit 64-bit index, so results do not depend on evaluation order and
// ensembles can be produced serially or in parallel with identical output.
namespace philox {

std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t counter);

}  // namespace philox

// Derives a child key from (seed, label, instance). Used both for stream
// construction and for handing sub-seeds to independent components.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t instance = 0);

// A stateless stream of i.i.d. draws addressed by index. Two streams with the
// same (seed, label, instance) are identical; any difference in label or
// instance decorrelates them.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string_view label,
                 std::uint64_t instance = 0);

    // Uniform on [0, 1).
    double uniform(std::uint64_t index) const;

    // Standard normal draw at the given index (Box-Muller on Philox output).
    double normal(std::uint64_t index) const;

    std::vector<double> normal_vec(std::uint64_t first_index, std::size_t n) const;

    // Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t uniform_index(std::uint64_t index, std::uint64_t bound) const;

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

// Sequential cursor over a RandomStream for call sites that consume draws in
// order. The cursor is the only state; the draws themselves stay addressable.
class StreamCursor {
public:
    explicit StreamCursor(RandomStream stream) : stream_(stream) {}

    double uniform() { return stream_.uniform(next_++); }
    double normal() { return stream_.normal(next_++); }
    std::uint64_t uniform_index(std::uint64_t bound) {
        return stream_.uniform_index(next_++, bound);
    }
    std::vector<double> normal_vec(std::size_t n) {
        std::vector<double> out = stream_.normal_vec(next_, n);
        next_ += n;
        return out;
    }

private:
    RandomStream stream_;
    std::uint64_t next_ = 0;
};

}  // namespace igo
