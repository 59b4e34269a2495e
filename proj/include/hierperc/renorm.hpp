#pragma once

#include <string>
#include <vector>

#include "hierperc/clusters.hpp"
#include "hierperc/sampler.hpp"

namespace hierperc {

// Block contraction: an edge is open downstairs iff some open edge projects
// onto it under pi^k. Edges within a k-block project to loops and vanish.
BondConfig phi(const Lattice& lat, const BondConfig& config, int k);

// Residual of |(1 - (1 - p_{k+1}(beta))^{L^{2d}}) - p_k(L^{d-alpha} beta)|,
// the two routes to the pushforward marginal. Analytically zero.
double phi_marginal_identity(const Params& params, int k);

// Coarse-graining keeping only edges between maximal block clusters:
// eta'_b = 1 iff the maximal internal cluster of k-block b has size
// >= lambda L^{dk}; omega'_{xy} = 1 iff an open edge joins the two blocks'
// maximal clusters.
MixedConfig psi(const Lattice& lat, const MixedConfig& config, double lambda,
                int k);

struct PsiConnectivityReport {
    std::vector<std::string> violations;
    std::uint64_t pairs_checked = 0;
    bool volume_inequality_ok = true;
    bool ok() const { return violations.empty() && volume_inequality_ok; }
};

// For a configuration at scale n+k: every pair x,y with x,y in their blocks'
// maximal clusters whose projections are Psi-connected in Lambda_n must be
// (eta,omega)-connected in Lambda_{n+k}; also
// |K_max(Lambda_{n+k})| >= lambda L^{dk} |K_max(Lambda_n; Psi)|.
PsiConnectivityReport check_psi_connectivity(const Params& params,
                                             const MixedConfig& config,
                                             double lambda, int k, int n);

struct DominationReport {
    double eta_marginal = 0.0;       // estimated P(eta'_x = 1)
    double p_prime = 0.0;            // estimated P(|K^max_k| >= lambda L^{dk})
    double eta_sigma = 0.0;          // joint std error of the difference
    bool eta_ok = false;
    struct ClassCheck {
        int cls = 0;
        std::uint64_t conditioning_events = 0;
        double omega_freq = 0.0;     // P(omega'_{xy}=1 | eta'_x=eta'_y=1)
        double target = 0.0;         // p-class at beta' = lambda^2 L^{k(d-alpha)} beta
        double sigma = 0.0;
        bool inconclusive = false;   // too few conditioning events
        bool ok = false;             // omega_freq >= target - 4 sigma
    };
    std::vector<ClassCheck> classes;
    bool ok() const;
};

// Statistical check that the coarse-grained marginals dominate the product
// model at the mapped parameters.
DominationReport check_domination(const Params& params, double lambda, int k,
                                  int n, std::uint64_t trials,
                                  const SeedSpec& seed);

}  // namespace hierperc
