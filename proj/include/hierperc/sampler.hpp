#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "hierperc/lattice.hpp"
#include "hierperc/params.hpp"
#include "hierperc/rng.hpp"

namespace hierperc {

using Edge = std::pair<std::uint64_t, std::uint64_t>;  // canonical: first < second

// Sparse open-edge set of one sampled configuration, grouped by distance
// class (class k holds pairs at distance exactly L^k). Immutable after
// construction; per-class lists are sorted lexicographically.
struct BondConfig {
    int scale = 0;
    std::vector<std::vector<Edge>> by_class;  // index 0 unused; classes 1..n

    std::size_t open_count() const {
        std::size_t c = 0;
        for (const auto& v : by_class) c += v.size();
        return c;
    }

    void for_each_edge(const std::function<void(Edge, int)>& fn) const {
        for (int k = 1; k < static_cast<int>(by_class.size()); ++k)
            for (const Edge& e : by_class[k]) fn(e, k);
    }

    std::vector<Edge> all_edges() const {
        std::vector<Edge> out;
        out.reserve(open_count());
        for (const auto& v : by_class) out.insert(out.end(), v.begin(), v.end());
        return out;
    }

    // Adjacency lists over Lambda_n (effective edges only if combined with a
    // site field by the caller).
    std::vector<std::vector<std::uint64_t>> adjacency(std::uint64_t volume) const;

    bool contains(const BondConfig& sub) const;
};

// State of the mixed site-bond model: site occupancy eta plus bonds omega.
// An effective edge xy is open iff omega has it and eta_x = eta_y = 1; this
// is enforced at query time, omega itself is never filtered.
struct MixedConfig {
    std::vector<std::uint8_t> eta;
    BondConfig omega;

    bool occupied(std::uint64_t x) const { return eta[x] != 0; }
};

// p_k = 1 - exp(-beta L^{-k(d+alpha)}), accurate for tiny exponents.
double edge_prob(const Params& params, int k);

struct SamplerOptions {
    // Refuse to sample when the expected number of open edges exceeds this.
    double max_expected_edges = 5e7;
};

double expected_open_edges(const Params& params, int n);

BondConfig sample_bonds(const Params& params, int n, const SeedSpec& seed,
                        const SamplerOptions& opts = {});

MixedConfig sample_mixed(const Params& params, int n, const SeedSpec& seed,
                         const SamplerOptions& opts = {});

// Monotone coupling: superposes an independent sample at parameter
// beta2 - beta1 on top of `base` (sampled at beta1). The union is distributed
// as a direct sample at beta2.
BondConfig sprinkle(const BondConfig& base, const Params& params_at_increment,
                    const SeedSpec& seed, const SamplerOptions& opts = {});

// Enumerates all unordered pairs of Lambda_n at distance exactly L^k in
// ascending lexicographic order.
void enumerate_class_pairs(const Lattice& lat, int k,
                           const std::function<void(Edge)>& fn);

}  // namespace hierperc
