#include "hierperc/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hierperc {

namespace {

void dedupe(std::vector<Edge>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool passes_threshold(std::uint64_t size, double lambda, std::uint64_t block_vol) {
    return static_cast<double>(size) + 1e-9 >= lambda * static_cast<double>(block_vol);
}

}  // namespace

BondConfig phi(const Lattice& lat, const BondConfig& config, int k) {
    if (k < 1 || config.scale < k + 1) throw usage_error("phi: need 1 <= k <= n-1");
    const std::uint64_t shift = Lattice::pow_u64(lat.digit_base(), k);
    BondConfig out;
    out.scale = config.scale - k;
    out.by_class.resize(out.scale + 1);
    config.for_each_edge([&](Edge e, int cls) {
        if (cls <= k) return;  // projects to a loop
        out.by_class[cls - k].push_back({e.first / shift, e.second / shift});
    });
    for (auto& v : out.by_class) dedupe(v);
    return out;
}

double phi_marginal_identity(const Params& params, int k) {
    if (k < 1) throw usage_error("phi_marginal_identity: k must be >= 1");
    const double m = std::pow(static_cast<double>(params.L), 2.0 * params.d);
    const double closed_up = 1.0 - edge_prob(params, k + 1);
    const double lhs = 1.0 - std::pow(closed_up, m);
    Params down = params;
    down.beta = std::pow(static_cast<double>(params.L), params.d - params.alpha) *
                params.beta;
    const double rhs = edge_prob(down, k);
    return std::abs(lhs - rhs);
}

MixedConfig psi(const Lattice& lat, const MixedConfig& config, double lambda,
                int k) {
    if (k < 1 || lat.scale() < k + 1) throw usage_error("psi: need 1 <= k <= n-1");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw usage_error("psi: lambda in (0,1]");
    const std::uint64_t block_vol = Lattice::pow_u64(lat.digit_base(), k);
    const auto records = kmax_all(lat, config, k);

    std::vector<std::uint8_t> in_kmax(lat.volume(), 0);
    MixedConfig out;
    out.eta.assign(records.size(), 0);
    for (std::size_t b = 0; b < records.size(); ++b) {
        if (passes_threshold(records[b].size, lambda, block_vol)) out.eta[b] = 1;
        for (std::uint64_t x : records[b].members) in_kmax[x] = 1;
    }
    out.omega.scale = lat.scale() - k;
    out.omega.by_class.resize(out.omega.scale + 1);
    config.omega.for_each_edge([&](Edge e, int cls) {
        if (cls <= k) return;
        if (!in_kmax[e.first] || !in_kmax[e.second]) return;
        out.omega.by_class[cls - k].push_back(
            {e.first / block_vol, e.second / block_vol});
    });
    for (auto& v : out.omega.by_class) dedupe(v);
    return out;
}

PsiConnectivityReport check_psi_connectivity(const Params& params,
                                             const MixedConfig& config,
                                             double lambda, int k, int n) {
    const Lattice up(params, n + k);
    if (config.omega.scale != n + k)
        throw usage_error("check_psi_connectivity: config must be at scale n+k");
    const Lattice down(params, n);
    const std::uint64_t block_vol = Lattice::pow_u64(up.digit_base(), k);

    const auto records = kmax_all(up, config, k);
    std::vector<std::uint8_t> in_kmax(up.volume(), 0);
    for (const auto& rec : records)
        for (std::uint64_t x : rec.members) in_kmax[x] = 1;

    const MixedConfig coarse = psi(up, config, lambda, k);
    const ClusterLabeling coarse_lab(down, coarse);
    const ClusterLabeling fine_lab(up, config);

    PsiConnectivityReport report;
    for (std::uint64_t x = 0; x < up.volume(); ++x) {
        if (!in_kmax[x]) continue;
        for (std::uint64_t y = x + 1; y < up.volume(); ++y) {
            if (!in_kmax[y]) continue;
            if (!coarse_lab.same_component(x / block_vol, y / block_vol)) continue;
            ++report.pairs_checked;
            if (!fine_lab.same_component(x, y)) {
                std::ostringstream msg;
                msg << "projections of " << x << " and " << y
                    << " are Psi-connected but the vertices are not connected";
                report.violations.push_back(msg.str());
            }
        }
    }

    std::uint64_t fine_max = 0;
    for (std::uint64_t x = 0; x < up.volume(); ++x)
        fine_max = std::max(fine_max, fine_lab.component_size(x));
    std::uint64_t coarse_max = 0;
    for (std::uint64_t x = 0; x < down.volume(); ++x)
        coarse_max = std::max(coarse_max, coarse_lab.component_size(x));
    report.volume_inequality_ok =
        static_cast<double>(fine_max) + 1e-9 >=
        lambda * static_cast<double>(block_vol) * static_cast<double>(coarse_max);
    return report;
}

bool DominationReport::ok() const {
    if (!eta_ok) return false;
    for (const auto& c : classes)
        if (!c.inconclusive && !c.ok) return false;
    return true;
}

DominationReport check_domination(const Params& params, double lambda, int k,
                                  int n, std::uint64_t trials,
                                  const SeedSpec& seed) {
    if (trials < 1000) throw usage_error("check_domination: trials must be >= 1000");
    const Lattice up(params, n);
    const Lattice down(params, n - k);
    const std::uint64_t block_vol = Lattice::pow_u64(up.digit_base(), k);

    Params down_params = params;
    down_params.beta = lambda * lambda *
                       std::pow(static_cast<double>(params.L),
                                k * (params.d - params.alpha)) *
                       params.beta;

    const int ncls = n - k;
    std::vector<std::uint64_t> test_partner(ncls + 1, 0);
    for (int c = 1; c <= ncls; ++c)
        test_partner[c] = Lattice::pow_u64(down.digit_base(), c - 1);

    std::uint64_t eta_hits = 0;
    std::vector<std::uint64_t> cond(ncls + 1, 0), open(ncls + 1, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const MixedConfig mc = sample_mixed(params, n, seed.with(StreamPurpose::generic, t));
        const MixedConfig coarse = psi(up, mc, lambda, k);
        if (coarse.eta[0]) ++eta_hits;
        for (int c = 1; c <= ncls; ++c) {
            const std::uint64_t y = test_partner[c];
            if (coarse.eta[0] && coarse.eta[y]) {
                ++cond[c];
                const auto& cls_edges = coarse.omega.by_class[c];
                if (std::binary_search(cls_edges.begin(), cls_edges.end(),
                                       Edge{0, y}))
                    ++open[c];
            }
        }
    }

    // Independent estimate of p' from direct samples of Lambda_k.
    std::uint64_t pprime_hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Lattice small(params, k);
        const MixedConfig mc =
            sample_mixed(params, k, seed.with(StreamPurpose::sprinkle, t));
        const auto rec = kmax(small, mc, {k, 0});
        if (static_cast<double>(rec.size) + 1e-9 >=
            lambda * static_cast<double>(block_vol))
            ++pprime_hits;
    }

    DominationReport rep;
    rep.eta_marginal = static_cast<double>(eta_hits) / trials;
    rep.p_prime = static_cast<double>(pprime_hits) / trials;
    const double v1 = rep.eta_marginal * (1 - rep.eta_marginal) / trials;
    const double v2 = rep.p_prime * (1 - rep.p_prime) / trials;
    rep.eta_sigma = std::sqrt(v1 + v2);
    rep.eta_ok = std::abs(rep.eta_marginal - rep.p_prime) <= 4.0 * rep.eta_sigma + 1e-12;
    for (int c = 1; c <= ncls; ++c) {
        DominationReport::ClassCheck cc;
        cc.cls = c;
        cc.conditioning_events = cond[c];
        cc.target = edge_prob(down_params, c);
        if (cond[c] < 100) {
            cc.inconclusive = true;
        } else {
            cc.omega_freq = static_cast<double>(open[c]) / cond[c];
            cc.sigma = std::sqrt(std::max(cc.omega_freq * (1 - cc.omega_freq),
                                          cc.target * (1 - cc.target)) /
                                 cond[c]);
            cc.ok = cc.omega_freq >= cc.target - 4.0 * cc.sigma - 1e-12;
        }
        rep.classes.push_back(cc);
    }
    return rep;
}

}  // namespace hierperc
