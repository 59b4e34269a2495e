#pragma once

#include <cstdint>
#include <random>

namespace hierperc {

// Stream purposes keep independent uses of the same master seed decorrelated.
enum class StreamPurpose : std::uint64_t {
    bonds = 1,
    sites = 2,
    sprinkle = 3,
    generic = 4,
};

namespace detail {
// splitmix64 finalizer; standard 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49d35aceae7d5ULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based seed derivation: the engine for (master, purpose, trial,
// stream) is a pure function of those labels, so results do not depend on
// thread count or scheduling.
struct SeedSpec {
    std::uint64_t master = 0;
    StreamPurpose purpose = StreamPurpose::generic;
    std::uint64_t trial = 0;
    std::uint64_t stream = 0;  // e.g. distance class

    std::uint64_t derive() const {
        std::uint64_t h = detail::mix64(master);
        h = detail::mix64(h ^ static_cast<std::uint64_t>(purpose));
        h = detail::mix64(h ^ trial);
        h = detail::mix64(h ^ stream);
        return h;
    }

    std::mt19937_64 engine() const { return std::mt19937_64(derive()); }

    SeedSpec with(StreamPurpose pu, std::uint64_t tr, std::uint64_t st = 0) const {
        return {master, pu, tr, st};
    }
};

}  // namespace hierperc
