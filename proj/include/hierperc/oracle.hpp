#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hierperc/clusters.hpp"
#include "hierperc/sampler.hpp"

namespace hierperc {

// Analytic exterior weight W_m(beta) = sum_{l>m} (L^{dl} - L^{d(l-1)}) p_l,
// truncated once the tail bound beta L^{-alpha l} (1-L^{-d})/(1-L^{-alpha})
// drops below 1e-12 relative (term bound from 1 - e^{-x} <= x).
double exterior_weight(const Params& params, int m);

// Exact enumeration over all (eta, omega) states of Lambda_n with exact
// product weights. Ground truth for the estimators; refuses instances with
// more than 2^24 configurations.
class Oracle {
public:
    // site_mode: with bernoulli_sites, eta ranges over all occupancy states
    // weighted by p; otherwise eta is fixed all-ones.
    Oracle(const Params& params, int n, bool bernoulli_sites);

    const Params& params() const { return params_; }
    int scale() const { return n_; }
    std::uint64_t volume() const { return lat_.volume(); }

    // Visits every configuration with its exact weight, in a fixed order.
    void for_each_config(
        const std::function<void(const MixedConfig&, double)>& fn) const;

    // Sums f over all configurations with their weights, in a fixed order
    // with compensated summation.
    double expect(const std::function<double(const MixedConfig&)>& f) const;

    // Total weight; equals 1 up to accumulated rounding.
    double total_weight() const;

    // P(0 <-(S)-> x) for every x, within S = Lambda_n (the whole instance).
    std::vector<double> connection_probs() const;

    // E|K_0 within Lambda_n| = sum_x P(0 <-> x).
    double chi_exact() const;

    // E|K^max_n|^2 (not volume-normalized).
    double second_moment_kmax() const;

    // Exact law of |K^max_n| as size -> probability.
    std::map<std::uint64_t, double> kmax_law() const;

private:
    Params params_;
    int n_;
    Lattice lat_;
    std::vector<Edge> edges_;
    std::vector<int> edge_class_;
    std::vector<double> edge_prob_;
    bool bernoulli_sites_;
};

// phi_beta(Lambda_m) = W_m(beta) * sum_{x in Lambda_m} P(0 <-(Lambda_m)-> x),
// evaluated exactly by enumeration.
double exact_phi(const Params& params, int m);

struct DctChainReport {
    double lhs = 0.0;        // sum_{x in Lambda_n} P(0 <-> x in Lambda_n)
    double inner = 0.0;      // sum_{x in Lambda_m} P(0 <-> x in Lambda_m)
    double phi_finite = 0.0; // middle term, exterior restricted to Lambda_n \ Lambda_m
    double sup_term = 0.0;   // sup_u sum_x P(u <-> x in Lambda_n); = lhs by transitivity
    double slack = 0.0;      // rhs - lhs; contract: >= -1e-10
    bool ok() const { return slack >= -1e-10; }
};

// Exact finite-volume form of the chain inequality with S = Lambda_m inside
// S' = Lambda_n. The middle term uses the finite adaptation: the exterior sum
// runs over y in Lambda_n \ Lambda_m rather than the full lattice.
DctChainReport check_dct_chain(const Params& params, int m, int n);

}  // namespace hierperc
