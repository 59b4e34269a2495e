#include "hierperc/oracle.hpp"

#include <cmath>

namespace hierperc {

namespace {

// Neumaier compensated summation, fixed accumulation order.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

double exterior_weight(const Params& params, int m) {
    if (params.beta == 0.0) return 0.0;
    const double L = params.L;
    const double shell_factor = std::pow(L, params.d) - 1.0;  // per L^{d(l-1)}
    KahanSum acc;
    for (int l = m + 1; l <= m + 10000; ++l) {
        acc.add(shell_factor * std::pow(L, params.d * (l - 1.0)) *
                edge_prob(params, l));
        // Remaining tail is at most beta L^{-alpha l} (1-L^{-d})/(1-L^{-alpha})
        // by 1 - e^{-x} <= x and the geometric sum.
        const double tail = params.beta * std::pow(L, -params.alpha * l) *
                            (1.0 - std::pow(L, -params.d)) /
                            (1.0 - std::pow(L, -params.alpha));
        if (tail <= 1e-12 * acc.value()) break;
    }
    return acc.value();
}

Oracle::Oracle(const Params& params, int n, bool bernoulli_sites)
    : params_(params), n_(n), lat_(params, n), bernoulli_sites_(bernoulli_sites) {
    const std::uint64_t v = lat_.volume();
    if (v > 64) throw resource_error("Oracle: volume too large to enumerate");
    for (std::uint64_t x = 0; x < v; ++x)
        for (std::uint64_t y = x + 1; y < v; ++y) {
            edges_.push_back({x, y});
            const int k = lat_.distance_class(x, y);
            edge_class_.push_back(k);
            edge_prob_.push_back(edge_prob(params, k));
        }
    const std::uint64_t site_bits = bernoulli_sites_ ? v : 0;
    if (edges_.size() + site_bits > 24)
        throw resource_error("Oracle: more than 2^24 configurations");
}

void Oracle::for_each_config(
    const std::function<void(const MixedConfig&, double)>& fn) const {
    const std::uint64_t v = lat_.volume();
    const std::uint64_t nstates_omega = std::uint64_t{1} << edges_.size();
    const std::uint64_t nstates_eta =
        bernoulli_sites_ ? (std::uint64_t{1} << v) : 1;
    MixedConfig mc;
    for (std::uint64_t smask = 0; smask < nstates_eta; ++smask) {
        mc.eta.assign(v, 1);
        double wsites = 1.0;
        if (bernoulli_sites_) {
            for (std::uint64_t x = 0; x < v; ++x) {
                const bool occ = (smask >> x) & 1;
                mc.eta[x] = occ ? 1 : 0;
                wsites *= occ ? params_.p : (1.0 - params_.p);
            }
        }
        if (wsites == 0.0) continue;
        for (std::uint64_t wmask = 0; wmask < nstates_omega; ++wmask) {
            double w = wsites;
            mc.omega.scale = n_;
            mc.omega.by_class.assign(n_ + 1, {});
            for (std::size_t e = 0; e < edges_.size(); ++e) {
                if ((wmask >> e) & 1) {
                    w *= edge_prob_[e];
                    mc.omega.by_class[edge_class_[e]].push_back(edges_[e]);
                } else {
                    w *= 1.0 - edge_prob_[e];
                }
            }
            if (w == 0.0) continue;
            fn(mc, w);
        }
    }
}

double Oracle::expect(const std::function<double(const MixedConfig&)>& f) const {
    KahanSum acc;
    for_each_config([&](const MixedConfig& mc, double w) { acc.add(w * f(mc)); });
    return acc.value();
}

double Oracle::total_weight() const {
    return expect([](const MixedConfig&) { return 1.0; });
}

std::vector<double> Oracle::connection_probs() const {
    const std::uint64_t v = lat_.volume();
    std::vector<KahanSum> acc(v);
    for_each_config([&](const MixedConfig& mc, double w) {
        ClusterLabeling lab(lat_, mc);
        for (std::uint64_t x = 0; x < v; ++x)
            if (lab.same_component(0, x)) acc[x].add(w);
    });
    std::vector<double> out(v);
    for (std::uint64_t x = 0; x < v; ++x) out[x] = acc[x].value();
    return out;
}

double Oracle::chi_exact() const {
    return expect([&](const MixedConfig& mc) {
        ClusterLabeling lab(lat_, mc);
        return static_cast<double>(lab.component_size(0));
    });
}

double Oracle::second_moment_kmax() const {
    return expect([&](const MixedConfig& mc) {
        std::uint64_t best = 0;
        ClusterLabeling lab(lat_, mc);
        for (std::uint64_t x = 0; x < lat_.volume(); ++x)
            best = std::max(best, lab.component_size(x));
        return static_cast<double>(best) * static_cast<double>(best);
    });
}

std::map<std::uint64_t, double> Oracle::kmax_law() const {
    std::map<std::uint64_t, KahanSum> law;
    for_each_config([&](const MixedConfig& mc, double w) {
        std::uint64_t best = 0;
        ClusterLabeling lab(lat_, mc);
        for (std::uint64_t x = 0; x < lat_.volume(); ++x)
            best = std::max(best, lab.component_size(x));
        law[best].add(w);
    });
    std::map<std::uint64_t, double> out;
    for (const auto& [size, acc] : law) out[size] = acc.value();
    return out;
}

double exact_phi(const Params& params, int m) {
    if (params.beta == 0.0) return 0.0;
    const Oracle oracle(params, m, false);
    return exterior_weight(params, m) * oracle.chi_exact();
}

DctChainReport check_dct_chain(const Params& params, int m, int n) {
    if (!(0 <= m && m < n)) throw usage_error("check_dct_chain: need 0 <= m < n");
    DctChainReport rep;
    const Oracle big(params, n, false);
    const Oracle small(params, m, false);
    rep.lhs = big.chi_exact();
    rep.inner = small.chi_exact();
    // Finite adaptation of the middle term: the exterior sum runs over
    // y in Lambda_n \ Lambda_m. The pair probability depends on y only
    // through its distance class l, and each x in Lambda_m sees exactly
    // L^{dl} - L^{d(l-1)} such y, independent of x.
    const Lattice lat(params, n);
    KahanSum wfin;
    for (int l = m + 1; l <= n; ++l) {
        const double shell =
            static_cast<double>(Lattice::pow_u64(lat.digit_base(), l) -
                                Lattice::pow_u64(lat.digit_base(), l - 1));
        wfin.add(shell * edge_prob(params, l));
    }
    rep.phi_finite = wfin.value() * rep.inner;
    rep.sup_term = rep.lhs;  // vertex-transitive: the sup is attained everywhere
    rep.slack = rep.inner + rep.phi_finite * rep.sup_term - rep.lhs;
    return rep;
}

}  // namespace hierperc
