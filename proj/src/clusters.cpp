#include "hierperc/clusters.hpp"

#include <algorithm>

namespace hierperc {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::uint64_t n) : parent_(n), size_(n, 1) {
        for (std::uint64_t i = 0; i < n; ++i) parent_[i] = i;
    }

    std::uint64_t find(std::uint64_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];  // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint64_t a, std::uint64_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::uint64_t> parent_;
    std::vector<std::uint64_t> size_;
};

}  // namespace

ClusterLabeling::ClusterLabeling(const Lattice& lat, const MixedConfig& config,
                                 const std::vector<std::uint8_t>* restrict,
                                 std::optional<int> max_class) {
    const std::uint64_t v = lat.volume();
    auto in_play = [&](std::uint64_t x) {
        if (!config.eta[x]) return false;
        return restrict == nullptr || (*restrict)[x] != 0;
    };
    UnionFind uf(v);
    config.omega.for_each_edge([&](Edge e, int k) {
        if (max_class && k > *max_class) return;
        if (in_play(e.first) && in_play(e.second)) uf.unite(e.first, e.second);
    });
    rep_.assign(v, NONE);
    size_.assign(v, 0);
    std::vector<std::uint64_t> min_of_root(v, NONE);
    for (std::uint64_t x = 0; x < v; ++x) {
        if (!in_play(x)) continue;
        const std::uint64_t r = uf.find(x);
        if (min_of_root[r] == NONE) min_of_root[r] = x;
        rep_[x] = min_of_root[r];
        ++size_[rep_[x]];
    }
}

std::vector<KmaxRecord> kmax_all(const Lattice& lat, const MixedConfig& config,
                                 int k) {
    if (k < 0 || k > lat.scale()) throw usage_error("kmax_all: bad block level");
    const std::uint64_t block_vol = Lattice::pow_u64(lat.digit_base(), k);
    const std::uint64_t nblocks = lat.volume() / block_vol;
    // Block-internal connectivity only: edges at class <= k never cross a
    // k-block boundary, edges above always do.
    ClusterLabeling lab(lat, config, nullptr, k);
    std::vector<KmaxRecord> out(nblocks);
    for (std::uint64_t b = 0; b < nblocks; ++b)
        out[b].block = {k, b};
    for (std::uint64_t x = 0; x < lat.volume(); ++x) {
        const std::uint64_t r = lab.representative(x);
        if (r != x) continue;  // one visit per component, at its minimal vertex
        KmaxRecord& rec = out[x / block_vol];
        const std::uint64_t sz = lab.component_size(x);
        // Ascending scan means the first maximal component seen has the
        // minimal representative, which is exactly the tie-break rule.
        if (sz > rec.size) {
            rec.size = sz;
            rec.representative = r;
        }
    }
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        KmaxRecord& rec = out[b];
        if (rec.size == 0) continue;
        rec.members.reserve(rec.size);
        const std::uint64_t lo = b * block_vol;
        for (std::uint64_t x = lo; x < lo + block_vol; ++x)
            if (lab.representative(x) == rec.representative) rec.members.push_back(x);
    }
    return out;
}

KmaxRecord kmax(const Lattice& lat, const MixedConfig& config, BlockId block) {
    auto all = kmax_all(lat, config, block.level);
    if (block.index >= all.size()) throw usage_error("kmax: block outside Lambda_n");
    return all[block.index];
}

std::uint64_t cluster_of_origin_size(const Lattice& lat, const MixedConfig& config,
                                     const std::vector<std::uint8_t>* restrict) {
    ClusterLabeling lab(lat, config, restrict);
    return lab.component_size(0);
}

}  // namespace hierperc
