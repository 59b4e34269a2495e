#include <doctest.h>

#include <algorithm>
#include <queue>
#include <random>

#include "hierperc/clusters.hpp"

using namespace hierperc;

namespace {

MixedConfig make_config(int n, std::vector<std::vector<Edge>> by_class,
                        std::vector<std::uint8_t> eta) {
    MixedConfig mc;
    mc.omega.scale = n;
    mc.omega.by_class = std::move(by_class);
    for (auto& v : mc.omega.by_class) std::sort(v.begin(), v.end());
    mc.eta = std::move(eta);
    return mc;
}

// Reference labeling by breadth-first search, structured nothing like the
// union-find under test.
std::vector<std::uint64_t> bfs_labels(const Lattice& lat,
                                      const MixedConfig& config,
                                      const std::vector<std::uint8_t>* restrict,
                                      std::optional<int> max_class) {
    const std::uint64_t vol = lat.volume();
    auto active = [&](std::uint64_t x) {
        return config.occupied(x) && (!restrict || (*restrict)[x]);
    };
    std::vector<std::vector<std::uint64_t>> adj(vol);
    config.omega.for_each_edge([&](Edge e, int k) {
        if (max_class && k > *max_class) return;
        if (!active(e.first) || !active(e.second)) return;
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    });
    std::vector<std::uint64_t> label(vol, ClusterLabeling::NONE);
    for (std::uint64_t s = 0; s < vol; ++s) {
        if (!active(s) || label[s] != ClusterLabeling::NONE) continue;
        std::queue<std::uint64_t> q;
        q.push(s);
        label[s] = s;
        while (!q.empty()) {
            const std::uint64_t x = q.front();
            q.pop();
            for (std::uint64_t y : adj[x])
                if (label[y] == ClusterLabeling::NONE) {
                    label[y] = s;
                    q.push(y);
                }
        }
    }
    return label;
}

}  // namespace

TEST_CASE("labeling, hand instances on Lambda_2") {
    const Params params(1, 2, 1.0, 1.0);
    const Lattice lat(params, 2);
    {
        // No edges: singletons.
        const MixedConfig mc = make_config(2, {{}, {}, {}}, {1, 1, 1, 1});
        const ClusterLabeling cl(lat, mc);
        for (std::uint64_t x = 0; x < 4; ++x) {
            CHECK(cl.representative(x) == x);
            CHECK(cl.component_size(x) == 1);
        }
    }
    {
        // omega = {01, 23}: two pair clusters.
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}, {2, 3}}, {}}, {1, 1, 1, 1});
        const ClusterLabeling cl(lat, mc);
        CHECK(cl.representative(0) == 0);
        CHECK(cl.representative(1) == 0);
        CHECK(cl.representative(2) == 2);
        CHECK(cl.representative(3) == 2);
        CHECK(cl.component_size(3) == 2);
        CHECK(cl.same_component(0, 1));
        CHECK_FALSE(cl.same_component(1, 2));
    }
    {
        // Unoccupied vertex 1 cuts the chain 0-1-2.
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}}, {{1, 2}}}, {1, 0, 1, 1});
        const ClusterLabeling cl(lat, mc);
        CHECK(cl.representative(1) == ClusterLabeling::NONE);
        CHECK(cl.component_size(1) == 0);
        CHECK_FALSE(cl.same_component(0, 2));
        CHECK(cl.component_size(0) == 1);
    }
    {
        // Restriction S = {0,1,2} severs the class-2 edge {2,3}.
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}}, {{2, 3}}}, {1, 1, 1, 1});
        const std::vector<std::uint8_t> s{1, 1, 1, 0};
        const ClusterLabeling cl(lat, mc, &s);
        CHECK(cl.component_size(0) == 2);
        CHECK(cl.component_size(2) == 1);
        CHECK(cl.representative(3) == ClusterLabeling::NONE);
    }
}

TEST_CASE("labeling agrees with BFS reference on random configurations") {
    std::mt19937_64 meta(404);
    for (int rep = 0; rep < 1000; ++rep) {
        const bool big = rep % 4 == 0;
        const Params params(big ? 2 : 1, 2, 1.0, 0.3 + 2.0 * (rep % 7),
                            rep % 3 == 0 ? 0.6 : 1.0);
        const int n = big ? 3 : 4 + rep % 3;
        const Lattice lat(params, n);
        const MixedConfig mc =
            sample_mixed(params, n, SeedSpec{900, StreamPurpose::generic,
                                             static_cast<std::uint64_t>(rep)});
        std::optional<int> max_class;
        std::vector<std::uint8_t> restrict_set;
        const std::vector<std::uint8_t>* restrict = nullptr;
        if (rep % 5 == 1) max_class = 1 + rep % n;
        if (rep % 5 == 2) {
            restrict_set.resize(lat.volume());
            for (auto& b : restrict_set) b = meta() % 2;
            restrict = &restrict_set;
        }
        const ClusterLabeling cl(lat, mc, restrict, max_class);
        const auto ref = bfs_labels(lat, mc, restrict, max_class);
        for (std::uint64_t x = 0; x < lat.volume(); ++x)
            for (std::uint64_t y = x; y < lat.volume(); ++y) {
                const bool a = cl.representative(x) != ClusterLabeling::NONE &&
                               cl.representative(x) == cl.representative(y);
                const bool b = ref[x] != ClusterLabeling::NONE && ref[x] == ref[y];
                REQUIRE(a == b);
            }
        // Representatives are componentwise minimal.
        for (std::uint64_t x = 0; x < lat.volume(); ++x) {
            if (cl.representative(x) == ClusterLabeling::NONE) continue;
            CHECK(cl.representative(x) <= x);
            CHECK(cl.representative(cl.representative(x)) == cl.representative(x));
        }
    }
}

TEST_CASE("restriction is monotone: S-clusters sit inside S'-clusters") {
    const Params params(1, 2, 1.0, 2.0);
    const int n = 5;
    const Lattice lat(params, n);
    std::mt19937_64 meta(71);
    for (int rep = 0; rep < 200; ++rep) {
        const MixedConfig mc =
            sample_mixed(params, n, SeedSpec{31, StreamPurpose::generic,
                                             static_cast<std::uint64_t>(rep)});
        std::vector<std::uint8_t> small(lat.volume()), large(lat.volume());
        for (std::uint64_t x = 0; x < lat.volume(); ++x) {
            small[x] = meta() % 4 == 0;
            large[x] = small[x] || meta() % 2;
        }
        const ClusterLabeling cs(lat, mc, &small);
        const ClusterLabeling cg(lat, mc, &large);
        for (std::uint64_t x = 0; x < lat.volume(); ++x)
            for (std::uint64_t y = x + 1; y < lat.volume(); ++y)
                if (cs.same_component(x, y)) CHECK(cg.same_component(x, y));
    }
}

TEST_CASE("kmax hand instances and tie-breaking") {
    const Params params(1, 2, 1.0, 1.0);
    const Lattice lat(params, 2);
    {
        // Two clusters of size 2 in the 2-block: tie goes to the one holding 0.
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}, {2, 3}}, {}}, {1, 1, 1, 1});
        const KmaxRecord r = kmax(lat, mc, BlockId{2, 0});
        CHECK(r.size == 2);
        CHECK(r.representative == 0);
        CHECK(r.members == std::vector<std::uint64_t>{0, 1});
    }
    {
        // {2,3} strictly larger once 1 is unoccupied.
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}, {2, 3}}, {}}, {1, 0, 1, 1});
        const KmaxRecord r = kmax(lat, mc, BlockId{2, 0});
        CHECK(r.size == 2);
        CHECK(r.representative == 2);
    }
    {
        // Empty block.
        const MixedConfig mc = make_config(2, {{}, {}, {}}, {0, 0, 0, 0});
        const KmaxRecord r = kmax(lat, mc, BlockId{2, 0});
        CHECK(r.size == 0);
        CHECK(r.representative == ClusterLabeling::NONE);
        CHECK(r.members.empty());
    }
    {
        // Class-2 edges must not leak into 1-block internals.
        const MixedConfig mc = make_config(2, {{}, {}, {{0, 2}}}, {1, 1, 1, 1});
        const KmaxRecord r = kmax(lat, mc, BlockId{1, 0});
        CHECK(r.size == 1);
        CHECK(r.representative == 0);
    }
}

TEST_CASE("kmax_all covers every block and matches single-block queries") {
    const Params params(2, 2, 1.5, 1.5, 0.7);
    const int n = 3;
    const Lattice lat(params, n);
    for (int rep = 0; rep < 20; ++rep) {
        const MixedConfig mc =
            sample_mixed(params, n, SeedSpec{55, StreamPurpose::generic,
                                             static_cast<std::uint64_t>(rep)});
        for (int k = 0; k <= n; ++k) {
            const auto all = kmax_all(lat, mc, k);
            const std::uint64_t blocks = lat.volume() / params.volume(k);
            REQUIRE(all.size() == blocks);
            for (std::uint64_t b = 0; b < blocks; ++b) {
                const KmaxRecord one = kmax(lat, mc, BlockId{k, b});
                CHECK(all[b].size == one.size);
                CHECK(all[b].representative == one.representative);
                CHECK(all[b].members == one.members);
                // Members stay inside the block and are occupied.
                for (std::uint64_t x : all[b].members) {
                    CHECK(x / params.volume(k) == b);
                    CHECK(mc.occupied(x));
                }
                CHECK(all[b].size <= params.volume(k));
            }
        }
    }
}

TEST_CASE("scale-0 blocks reduce to site occupancy") {
    const Params params(1, 2, 1.0, 3.0);
    const Lattice lat(params, 2);
    const MixedConfig mc =
        make_config(2, {{}, {{0, 1}}, {}}, {1, 0, 1, 1});
    const auto all = kmax_all(lat, mc, 0);
    REQUIRE(all.size() == 4);
    CHECK(all[0].size == 1);
    CHECK(all[1].size == 0);
    CHECK(all[2].size == 1);
    CHECK(all[2].representative == 2);
}

TEST_CASE("cluster_of_origin_size") {
    const Params params(1, 2, 1.0, 1.0);
    const Lattice lat(params, 2);
    {
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}}, {{1, 2}}}, {1, 1, 1, 1});
        CHECK(cluster_of_origin_size(lat, mc) == 3);
    }
    {
        const MixedConfig mc = make_config(2, {{}, {{0, 1}}, {}}, {0, 1, 1, 1});
        CHECK(cluster_of_origin_size(lat, mc) == 0);
    }
    {
        const MixedConfig mc =
            make_config(2, {{}, {{0, 1}}, {{1, 2}}}, {1, 1, 1, 1});
        const std::vector<std::uint8_t> s{1, 1, 0, 1};
        CHECK(cluster_of_origin_size(lat, mc, &s) == 2);
    }
}
