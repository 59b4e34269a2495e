#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hierperc/lattice.hpp"
#include "hierperc/sampler.hpp"

namespace hierperc {

// Union-find output for one mixed configuration. Vertices outside the
// restriction set (or unoccupied) carry label NONE. The representative of a
// component is its minimal vertex index, which is the tie-breaking order used
// everywhere.
class ClusterLabeling {
public:
    static constexpr std::uint64_t NONE = ~std::uint64_t{0};

    // Labels (eta,omega)-connectivity restricted to `restrict` (all of
    // Lambda_n when absent). If `max_class` is set, edges at distance class
    // above it are skipped (used for blockwise labelings).
    ClusterLabeling(const Lattice& lat, const MixedConfig& config,
                    const std::vector<std::uint8_t>* restrict = nullptr,
                    std::optional<int> max_class = std::nullopt);

    // Minimal vertex index of the component of x; NONE if x is not in play.
    std::uint64_t representative(std::uint64_t x) const { return rep_[x]; }

    std::uint64_t component_size(std::uint64_t x) const {
        return rep_[x] == NONE ? 0 : size_[rep_[x]];
    }

    bool same_component(std::uint64_t x, std::uint64_t y) const {
        return rep_[x] != NONE && rep_[x] == rep_[y];
    }

    std::uint64_t volume() const { return rep_.size(); }

private:
    std::vector<std::uint64_t> rep_;   // minimal-index representative or NONE
    std::vector<std::uint64_t> size_;  // valid at representatives
};

struct KmaxRecord {
    BlockId block;
    std::uint64_t size = 0;            // 0 when the block has no occupied vertex
    std::uint64_t representative = ClusterLabeling::NONE;
    std::vector<std::uint64_t> members;  // ascending vertex indices
};

// Maximal internal cluster of every k-block at once (edges crossing block
// boundaries are skipped). Ties go to the cluster containing the smallest
// vertex index. Records are indexed by block index.
std::vector<KmaxRecord> kmax_all(const Lattice& lat, const MixedConfig& config,
                                 int k);

KmaxRecord kmax(const Lattice& lat, const MixedConfig& config, BlockId block);

// |K_0| within S; 0 if the origin is unoccupied or outside S.
std::uint64_t cluster_of_origin_size(
    const Lattice& lat, const MixedConfig& config,
    const std::vector<std::uint8_t>* restrict = nullptr);

}  // namespace hierperc
