#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hierperc/params.hpp"
#include "hierperc/rng.hpp"
#include "hierperc/sampler.hpp"

namespace hierperc {

struct EstimateReport {
    double estimate = 0.0;
    double se = 0.0;  // sample standard deviation / sqrt(trials)
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Params params;
    int n = 0;
    double wall_seconds = 0.0;
};

struct EstimatorOptions {
    std::uint64_t min_trials = 100;
    std::uint64_t max_trials = 100000;   // hard cap
    double target_rel_se = 0.01;         // stop early once reached
    int threads = 1;
    SamplerOptions sampler;
};

// Monte Carlo mean of |K_0| within Lambda_n.
EstimateReport chi_hat(const Params& params, int n, const SeedSpec& seed,
                       const EstimatorOptions& opts = {});

// Monte Carlo estimate of L^{-dn} E|K^max_n|^2, a lower bound on chi by
// transitivity.
EstimateReport second_moment_lb(const Params& params, int n, const SeedSpec& seed,
                                const EstimatorOptions& opts = {});

// W_m(beta) times the Monte Carlo estimate of E|K_0 within Lambda_m|.
EstimateReport phi_hat(const Params& params, int m, const SeedSpec& seed,
                       const EstimatorOptions& opts = {});

enum class XiStatus { ok, indeterminate, exceeds_cap };

struct CorrelationLengthResult {
    XiStatus status = XiStatus::ok;
    int n_of_beta = 0;    // smallest m with phi <= 1/2 (when status == ok)
    double xi = 1.0;      // L^{n_of_beta}; a lower bound when the cap is hit
    std::vector<EstimateReport> phi_by_scale;  // phi_hat at m = 0,1,...
};

// Smallest m <= n_cap with phi_beta(Lambda_m) <= 1/2, decided at 3 SE.
// Boundary values count as "<= 1/2" (closed condition).
CorrelationLengthResult correlation_length(const Params& params, int n_cap,
                                           const SeedSpec& seed,
                                           const EstimatorOptions& opts = {});

struct ExplorationTailReport {
    EstimateReport estimate;  // frequency of an open edge from 0 to Lambda_n \ Lambda_k
    double analytic = 0.0;    // 1 - exp(-beta sum_{l=k+1}^n (L^{dl}-L^{d(l-1)}) L^{-l(d+alpha)})
    double sigma = 0.0;       // binomial sigma at the analytic value
    bool within_4_sigma = false;
};

ExplorationTailReport exploration_tail(const Params& params, int k, int n,
                                       const SeedSpec& seed,
                                       const EstimatorOptions& opts = {});

// Parameter schedules for the two regimes of the induction arguments.
struct RGSchedule {
    bool marginal = false;  // alpha == d

    // alpha > d regime
    int k0 = 0;       // smallest k with the majority-occupation bound (configurable)
    int k = 0;        // max(k0, floor(sqrt(log beta)))
    int ell = 0;      // largest l satisfying the zoom-out condition; 0 if none

    // alpha == d regime
    double delta = 0.0;        // exp(-L^{-9d} beta)
    std::uint64_t n0 = 0;      // ceil(2 beta / (L^{9d} d log L))
    int ell_marginal = 0;      // ceil(-log2(100 delta)); may be negative
    std::vector<double> delta_r;  // 2^r delta, r = 0..max(ell_marginal, 0)
    std::vector<std::uint64_t> n_r;
    std::vector<double> beta_r;   // exp(12 delta_r) beta / 2
};

// Smallest k such that P(Bin(L^{dk}, 1/2) >= L^{dk}/3) >= 3/4, verified to
// keep holding on the next several levels (exact binomial tails).
int default_k0(const Params& params);

// Left side of the alpha > d zoom-out condition at (k, l):
// L^{2dk} exp(-beta 9^{-l} L^{-(alpha-d) l k} L^{-(d+alpha) k}).
double l_condition_lhs(const Params& params, int k, int l);

RGSchedule schedule(const Params& params, std::optional<int> k0_override = {});

struct FitPoint {
    double beta = 0.0;
    double chi = 0.0;
    double se = 0.0;
};

struct PowerLawFit {
    double slope = 0.0;      // of log chi vs log beta
    double intercept = 0.0;
    double slope_ci = 0.0;   // 1.96 sigma half-width
    double r_squared = 0.0;
};

PowerLawFit fit_power_law(const std::vector<FitPoint>& points);

struct DoubleExpFit {
    double slope = 0.0;      // of log log chi vs beta
    double intercept = 0.0;
    double slope_ci = 0.0;
    struct SecondDifference {
        double value = 0.0;  // second divided difference of log chi in beta
        double sigma = 0.0;
    };
    std::vector<SecondDifference> second_differences;
    bool convexity_consistent = false;  // all second differences >= -2 sigma
    bool slope_positive = false;        // CI excludes 0 from below
    // True when the data is consistent with double-exponential growth; a
    // power law fails the convexity check and is flagged here.
    bool double_exponential() const {
        return convexity_consistent && slope_positive;
    }
};

DoubleExpFit fit_double_exp(const std::vector<FitPoint>& points);

// Empirical check of the scale-doubling induction implication: if
// P_{beta,p}(|K^max_n| >= (1-eps) L^{dn}) >= p then
// P_{(1+6 eps) beta, p}(|K^max_{2n}| >= (1-2 eps) L^{2dn}) >= p.
struct InductionReport {
    double premise_prob = 0.0;
    double premise_se = 0.0;
    double conclusion_prob = 0.0;
    double conclusion_se = 0.0;
    bool premise_holds = false;    // premise_prob >= p - 3 SE
    bool implication_ok = false;   // premise fails, or conclusion >= p - 3 SE
};

InductionReport check_induction(const Params& params, int n, double eps,
                                const SeedSpec& seed,
                                const EstimatorOptions& opts = {});

// Empirical probabilities of the four base-case events at the schedule's
// (delta, n0), measured under parameters (beta/2, 1-delta).
struct BaseCaseReport {
    double delta = 0.0;
    std::uint64_t n0 = 0;
    double prob_a1 = 0.0;  // occupied density >= 1 - 2 delta
    double prob_a2 = 0.0;  // all short occupied pairs open
    double prob_a3 = 0.0;  // every 2-block is nonempty after coarse-graining
    double prob_a4 = 0.0;  // all distance-L pairs open at every projected scale
    double prob_all = 0.0;
    double prob_kmax = 0.0;  // |K^max_{n0}| >= (1 - 2 delta) L^{d n0}
    bool a3_a4_applicable = false;  // requires n0 >= 3
    std::uint64_t trials = 0;
};

BaseCaseReport base_case_events(const Params& params, const SeedSpec& seed,
                                const EstimatorOptions& opts = {});

}  // namespace hierperc
