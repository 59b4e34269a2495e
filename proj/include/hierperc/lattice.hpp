#pragma once

#include <cstdint>
#include <random>

#include "hierperc/params.hpp"

namespace hierperc {

// A point of Lambda_n encoded as n base-L^d digits packed into an integer.
// Digit i (0-indexed) is the coordinate at level i+1; the k-block of a vertex
// is its index divided by (L^d)^k.
struct VertexId {
    std::uint64_t index = 0;
    int scale = 0;  // n: vertex lives in Lambda_n, index in [0, L^{dn})

    friend bool operator==(const VertexId&, const VertexId&) = default;
};

struct BlockId {
    int level = 0;            // k
    std::uint64_t index = 0;  // in [0, L^{d(n-k)})

    friend bool operator==(const BlockId&, const BlockId&) = default;
};

// Ultrametric distance on Lambda_n: L^{j+1} with j the highest differing
// base-L^d digit, 0 for equal vertices.
class Lattice {
public:
    Lattice(const Params& params, int n)
        : d_(params.d), L_(params.L), n_(n),
          base_(params.digit_base()), volume_(params.volume(n)) {}

    int scale() const { return n_; }
    std::uint64_t volume() const { return volume_; }
    std::uint64_t digit_base() const { return base_; }
    int side() const { return L_; }
    int dim() const { return d_; }

    std::uint64_t distance(VertexId x, VertexId y) const {
        if (x.scale != y.scale)
            throw usage_error("distance: vertices at different scales");
        if (x.index == y.index) return 0;
        std::uint64_t a = x.index, b = y.index;
        int top = -1;
        for (int i = 0; a != 0 || b != 0; ++i) {
            if (a % base_ != b % base_) top = i;
            a /= base_;
            b /= base_;
        }
        return pow_u64(static_cast<std::uint64_t>(L_), top + 1);
    }

    // Index of the highest differing digit plus one, i.e. the distance class k
    // with distance(x,y) = L^k; 0 for equal vertices.
    int distance_class(std::uint64_t x, std::uint64_t y) const {
        int top = -1;
        for (int i = 0; x != 0 || y != 0; ++i) {
            if (x % base_ != y % base_) top = i;
            x /= base_;
            y /= base_;
        }
        return top + 1;
    }

    // pi^k: drops the k lowest digits, landing in Lambda_{n-k}.
    VertexId left_shift(VertexId x, int k) const {
        if (k < 0 || k > x.scale) throw usage_error("left_shift: need 0 <= k <= n");
        std::uint64_t idx = x.index;
        for (int i = 0; i < k; ++i) idx /= base_;
        return {idx, x.scale - k};
    }

    BlockId block_of(VertexId x, int k) const {
        if (k < 0 || k > x.scale) throw usage_error("block_of: need 0 <= k <= n");
        std::uint64_t idx = x.index;
        for (int i = 0; i < k; ++i) idx /= base_;
        return {k, idx};
    }

    // Number of unordered pairs in Lambda_n at distance exactly L^k:
    // M_k = L^{dn} (L^{dk} - L^{d(k-1)}) / 2.
    std::uint64_t pair_count(int k) const {
        if (k < 1 || k > n_) throw usage_error("pair_count: need 1 <= k <= n");
        const std::uint64_t cls = class_size(k);  // partners per vertex
        // volume * cls / 2 without intermediate overflow: one factor is even.
        if (volume_ % 2 == 0) return (volume_ / 2) * cls;
        return volume_ * (cls / 2);
    }

    // Number of vertices at distance exactly L^k from any fixed vertex.
    std::uint64_t class_size(int k) const {
        if (k < 1 || k > n_) throw usage_error("class_size: need 1 <= k <= n");
        return pow_u64(base_, k) - pow_u64(base_, k - 1);
    }

    // Uniform vertex at distance exactly L^k from x: digit k-1 resampled to a
    // different value, digits 0..k-2 resampled uniformly, digits >= k kept.
    template <class Urbg>
    VertexId kth_class_partner(VertexId x, int k, Urbg& rng) const {
        if (k < 1 || k > x.scale) throw usage_error("kth_class_partner: need 1 <= k <= n");
        const std::uint64_t lowpow = pow_u64(base_, k - 1);
        const std::uint64_t oldtop = (x.index / lowpow) % base_;
        std::uniform_int_distribution<std::uint64_t> top_dist(0, base_ - 2);
        std::uint64_t newtop = top_dist(rng);
        if (newtop >= oldtop) ++newtop;
        std::uint64_t low = 0;
        if (lowpow > 1) {
            std::uniform_int_distribution<std::uint64_t> low_dist(0, lowpow - 1);
            low = low_dist(rng);
        }
        const std::uint64_t prefix = x.index / (lowpow * base_);
        return {prefix * lowpow * base_ + newtop * lowpow + low, x.scale};
    }

    static std::uint64_t pow_u64(std::uint64_t b, int e) {
        std::uint64_t r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

private:
    int d_;
    int L_;
    int n_;
    std::uint64_t base_;
    std::uint64_t volume_;
};

}  // namespace hierperc
