#include "hierperc/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <unordered_set>

namespace hierperc {

namespace {

struct EdgeHash {
    std::size_t operator()(const Edge& e) const {
        return std::hash<std::uint64_t>{}(e.first * 0x9e3779b97f4a7c15ULL ^ e.second);
    }
};

Edge canonical(std::uint64_t a, std::uint64_t b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// `count` distinct uniform class-k pairs. Rejection of duplicates when the
// class is large relative to count, explicit enumeration + partial
// Fisher-Yates otherwise.
std::vector<Edge> place_pairs(const Lattice& lat, int k, std::uint64_t count,
                              std::mt19937_64& rng) {
    const std::uint64_t m = lat.pair_count(k);
    std::vector<Edge> out;
    if (count == 0) return out;
    if (m <= 2 * count) {
        std::vector<Edge> all;
        all.reserve(m);
        enumerate_class_pairs(lat, k, [&](Edge e) { all.push_back(e); });
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::uint64_t> pick(i, all.size() - 1);
            std::swap(all[i], all[pick(rng)]);
        }
        all.resize(count);
        out = std::move(all);
    } else {
        std::unordered_set<Edge, EdgeHash> seen;
        seen.reserve(2 * count);
        std::uniform_int_distribution<std::uint64_t> vert(0, lat.volume() - 1);
        while (seen.size() < count) {
            VertexId x{vert(rng), lat.scale()};
            VertexId y = lat.kth_class_partner(x, k, rng);
            seen.insert(canonical(x.index, y.index));
        }
        out.assign(seen.begin(), seen.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Edge> sample_class(const Lattice& lat, int k, double pk,
                               std::mt19937_64& rng) {
    const std::uint64_t m = lat.pair_count(k);
    if (pk <= 0.5) {
        std::binomial_distribution<std::uint64_t> bin(m, pk);
        return place_pairs(lat, k, bin(rng), rng);
    }
    // Large-probability class: sample the closed set and take its complement,
    // so randomness cost tracks (1-p_k) M_k.
    std::binomial_distribution<std::uint64_t> bin(m, 1.0 - pk);
    std::vector<Edge> closed = place_pairs(lat, k, bin(rng), rng);
    std::vector<Edge> open;
    open.reserve(m - closed.size());
    std::size_t ci = 0;
    enumerate_class_pairs(lat, k, [&](Edge e) {
        if (ci < closed.size() && closed[ci] == e) {
            ++ci;
        } else {
            open.push_back(e);
        }
    });
    return open;
}

}  // namespace

void enumerate_class_pairs(const Lattice& lat, int k,
                           const std::function<void(Edge)>& fn) {
    const std::uint64_t base = lat.digit_base();
    const std::uint64_t lowpow = Lattice::pow_u64(base, k - 1);
    const std::uint64_t blockpow = lowpow * base;
    for (std::uint64_t x = 0; x < lat.volume(); ++x) {
        const std::uint64_t prefix = x / blockpow;
        const std::uint64_t oldtop = (x / lowpow) % base;
        // Partners above x only: larger top digit, any low digits.
        for (std::uint64_t top = oldtop + 1; top < base; ++top) {
            const std::uint64_t ybase = prefix * blockpow + top * lowpow;
            for (std::uint64_t low = 0; low < lowpow; ++low)
                fn({x, ybase + low});
        }
    }
}

std::vector<std::vector<std::uint64_t>> BondConfig::adjacency(
    std::uint64_t volume) const {
    std::vector<std::vector<std::uint64_t>> adj(volume);
    for_each_edge([&](Edge e, int) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    });
    return adj;
}

bool BondConfig::contains(const BondConfig& sub) const {
    if (sub.by_class.size() > by_class.size()) return false;
    for (std::size_t k = 1; k < sub.by_class.size(); ++k)
        if (!std::includes(by_class[k].begin(), by_class[k].end(),
                           sub.by_class[k].begin(), sub.by_class[k].end()))
            return false;
    return true;
}

double edge_prob(const Params& params, int k) {
    if (k < 1) throw usage_error("edge_prob: k must be >= 1");
    const double logw = -static_cast<double>(k) * (params.d + params.alpha) *
                        std::log(static_cast<double>(params.L));
    return -std::expm1(-params.beta * std::exp(logw));
}

double expected_open_edges(const Params& params, int n) {
    const Lattice lat(params, n);
    double total = 0.0;
    for (int k = 1; k <= n; ++k)
        total += static_cast<double>(lat.pair_count(k)) * edge_prob(params, k);
    return total;
}

BondConfig sample_bonds(const Params& params, int n, const SeedSpec& seed,
                        const SamplerOptions& opts) {
    params.validate();
    const Lattice lat(params, n);
    if (expected_open_edges(params, n) > opts.max_expected_edges)
        throw resource_error("sample_bonds: expected open edge count exceeds cap");
    BondConfig cfg;
    cfg.scale = n;
    cfg.by_class.resize(n + 1);
    for (int k = 1; k <= n; ++k) {
        auto rng = SeedSpec{seed.master, seed.purpose, seed.trial,
                            static_cast<std::uint64_t>(k)}
                       .engine();
        const double pk = edge_prob(params, k);
        if (pk == 0.0) continue;
        cfg.by_class[k] = sample_class(lat, k, pk, rng);
    }
    return cfg;
}

MixedConfig sample_mixed(const Params& params, int n, const SeedSpec& seed,
                         const SamplerOptions& opts) {
    MixedConfig mc;
    mc.omega = sample_bonds(params, n, seed.with(StreamPurpose::bonds, seed.trial), opts);
    const std::uint64_t v = params.volume(n);
    mc.eta.assign(v, 1);
    if (params.p < 1.0) {
        auto rng = seed.with(StreamPurpose::sites, seed.trial).engine();
        std::bernoulli_distribution occ(params.p);
        for (std::uint64_t x = 0; x < v; ++x) mc.eta[x] = occ(rng) ? 1 : 0;
    }
    return mc;
}

BondConfig sprinkle(const BondConfig& base, const Params& params_at_increment,
                    const SeedSpec& seed, const SamplerOptions& opts) {
    if (params_at_increment.beta < 0.0)
        throw usage_error("sprinkle: target beta below base beta");
    if (params_at_increment.beta == 0.0) return base;
    BondConfig inc = sample_bonds(params_at_increment, base.scale, seed, opts);
    BondConfig out;
    out.scale = base.scale;
    out.by_class.resize(base.by_class.size());
    for (std::size_t k = 1; k < out.by_class.size(); ++k) {
        std::set_union(base.by_class[k].begin(), base.by_class[k].end(),
                       inc.by_class[k].begin(), inc.by_class[k].end(),
                       std::back_inserter(out.by_class[k]));
    }
    assert(out.contains(base));
    return out;
}

}  // namespace hierperc
