#include "hierperc/estimators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "hierperc/clusters.hpp"
#include "hierperc/oracle.hpp"
#include "hierperc/renorm.hpp"

namespace hierperc {

namespace {

using Clock = std::chrono::steady_clock;

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) /
                     static_cast<double>(v.size()));
}

// Runs trials in doubling batches until the stop predicate is satisfied or
// the cap is reached. Trial t always uses the same derived seed, so the
// result is independent of the thread count.
template <class TrialFn>
EstimateReport run_mc(const Params& params, int n, const SeedSpec& seed,
                      const EstimatorOptions& opts, TrialFn&& trial,
                      const std::function<bool(double, double, std::uint64_t)>&
                          stop = nullptr) {
    const auto t0 = Clock::now();
    std::vector<double> values;
    std::uint64_t next = std::min(opts.min_trials, opts.max_trials);
    if (next < 2) next = 2;
    while (true) {
        const std::uint64_t begin = values.size();
        values.resize(next);
        const int nthreads = std::max(1, opts.threads);
        if (nthreads == 1 || next - begin < 64) {
            for (std::uint64_t t = begin; t < next; ++t) values[t] = trial(t);
        } else {
            std::vector<std::thread> workers;
            const std::uint64_t chunk = (next - begin + nthreads - 1) / nthreads;
            for (int w = 0; w < nthreads; ++w) {
                const std::uint64_t lo = begin + w * chunk;
                const std::uint64_t hi = std::min(next, lo + chunk);
                if (lo >= hi) break;
                workers.emplace_back([&, lo, hi] {
                    for (std::uint64_t t = lo; t < hi; ++t) values[t] = trial(t);
                });
            }
            for (auto& w : workers) w.join();
        }
        const double mean = mean_of(values);
        const double se = se_of(values, mean);
        const bool capped = values.size() >= opts.max_trials;
        bool done;
        if (stop) {
            done = capped || stop(mean, se, values.size());
        } else {
            const double rel = se / std::max(std::abs(mean), 1e-300);
            done = capped || rel <= opts.target_rel_se;
        }
        if (done) {
            EstimateReport rep;
            rep.estimate = mean;
            rep.se = se;
            rep.trials = values.size();
            rep.seed = seed.master;
            rep.params = params;
            rep.n = n;
            rep.wall_seconds =
                std::chrono::duration<double>(Clock::now() - t0).count();
            return rep;
        }
        next = std::min(opts.max_trials, next * 2);
    }
}

double max_component(const Lattice& lat, const ClusterLabeling& lab) {
    std::uint64_t best = 0;
    for (std::uint64_t x = 0; x < lat.volume(); ++x)
        best = std::max(best, lab.component_size(x));
    return static_cast<double>(best);
}

// Exact upper tail P(Bin(n, 1/2) >= t) via log-space summation.
double binomial_half_upper_tail(std::uint64_t n, std::uint64_t t) {
    if (t == 0) return 1.0;
    if (t > n) return 0.0;
    double sum = 0.0;
    const double loghalf = -std::log(2.0) * static_cast<double>(n);
    for (std::uint64_t j = t; j <= n; ++j) {
        const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                            std::lgamma(n - j + 1.0);
        sum += std::exp(logc + loghalf);
    }
    return sum;
}

}  // namespace

EstimateReport chi_hat(const Params& params, int n, const SeedSpec& seed,
                       const EstimatorOptions& opts) {
    if (n < 0) throw usage_error("chi_hat: n must be >= 0");
    const Lattice lat(params, n);
    return run_mc(params, n, seed, opts, [&](std::uint64_t t) {
        const MixedConfig mc =
            sample_mixed(params, n, seed.with(StreamPurpose::generic, t),
                         opts.sampler);
        return static_cast<double>(cluster_of_origin_size(lat, mc));
    });
}

EstimateReport second_moment_lb(const Params& params, int n, const SeedSpec& seed,
                                const EstimatorOptions& opts) {
    const Lattice lat(params, n);
    const double vol = static_cast<double>(lat.volume());
    return run_mc(params, n, seed, opts, [&](std::uint64_t t) {
        const MixedConfig mc =
            sample_mixed(params, n, seed.with(StreamPurpose::generic, t),
                         opts.sampler);
        const ClusterLabeling lab(lat, mc);
        const double m = max_component(lat, lab);
        return m * m / vol;
    });
}

EstimateReport phi_hat(const Params& params, int m, const SeedSpec& seed,
                       const EstimatorOptions& opts) {
    const double w = exterior_weight(params, m);
    EstimateReport rep;
    if (m == 0) {
        // phi(Lambda_0) = W_0: the only interior term is P(0 <-> 0) = 1.
        rep.estimate = w;
        rep.se = 0.0;
        rep.trials = 0;
        rep.params = params;
        rep.seed = seed.master;
        return rep;
    }
    rep = chi_hat(params, m, seed, opts);
    rep.estimate *= w;
    rep.se *= w;
    return rep;
}

CorrelationLengthResult correlation_length(const Params& params, int n_cap,
                                           const SeedSpec& seed,
                                           const EstimatorOptions& opts) {
    CorrelationLengthResult res;
    for (int m = 0; m <= n_cap; ++m) {
        EstimateReport rep;
        if (m == 0) {
            rep = phi_hat(params, 0, seed, opts);
        } else {
            const double w = exterior_weight(params, m);
            EstimatorOptions phi_opts = opts;
            rep = run_mc(
                params, m, seed, phi_opts,
                [&, m](std::uint64_t t) {
                    const Lattice lat(params, m);
                    const MixedConfig mc = sample_mixed(
                        params, m, seed.with(StreamPurpose::generic, t),
                        opts.sampler);
                    return w * static_cast<double>(cluster_of_origin_size(lat, mc));
                },
                [](double mean, double se, std::uint64_t) {
                    return std::abs(mean - 0.5) > 3.0 * se;
                });
        }
        res.phi_by_scale.push_back(rep);
        const bool below = rep.estimate <= 0.5 + 1e-15 &&
                           rep.estimate + 3.0 * rep.se <= 0.5 + 1e-15;
        const bool above = rep.estimate - 3.0 * rep.se > 0.5;
        if (below) {
            res.status = XiStatus::ok;
            res.n_of_beta = m;
            res.xi = std::pow(static_cast<double>(params.L), m);
            return res;
        }
        if (!above) {
            res.status = XiStatus::indeterminate;
            res.n_of_beta = m;
            res.xi = std::pow(static_cast<double>(params.L), m);
            return res;
        }
    }
    res.status = XiStatus::exceeds_cap;
    res.n_of_beta = n_cap;
    res.xi = std::pow(static_cast<double>(params.L), n_cap);
    return res;
}

ExplorationTailReport exploration_tail(const Params& params, int k, int n,
                                       const SeedSpec& seed,
                                       const EstimatorOptions& opts) {
    if (params.alpha != static_cast<double>(params.d))
        throw usage_error("exploration_tail: requires alpha = d");
    if (!(0 <= k && k < n)) throw usage_error("exploration_tail: need 0 <= k < n");
    const Lattice lat(params, n);
    // Finite-volume analytic value: only classes k+1..n exist inside Lambda_n.
    double exponent = 0.0;
    for (int l = k + 1; l <= n; ++l) {
        const double shell =
            static_cast<double>(Lattice::pow_u64(lat.digit_base(), l) -
                                Lattice::pow_u64(lat.digit_base(), l - 1));
        exponent += shell * std::pow(static_cast<double>(params.L),
                                     -static_cast<double>(l) * (params.d + params.alpha));
    }
    ExplorationTailReport rep;
    rep.analytic = -std::expm1(-params.beta * exponent);
    EstimatorOptions fixed = opts;
    fixed.min_trials = fixed.max_trials;  // plain frequency estimate
    rep.estimate = run_mc(params, n, seed, fixed, [&](std::uint64_t t) {
        const BondConfig cfg = sample_bonds(
            params, n, seed.with(StreamPurpose::bonds, t), opts.sampler);
        for (int l = k + 1; l <= n; ++l) {
            const auto& cls = cfg.by_class[l];
            // Canonical pairs are sorted, so any edge at vertex 0 is first.
            if (!cls.empty() && cls.front().first == 0) return 1.0;
        }
        return 0.0;
    });
    rep.sigma = std::sqrt(rep.analytic * (1.0 - rep.analytic) /
                          static_cast<double>(rep.estimate.trials));
    rep.within_4_sigma =
        std::abs(rep.estimate.estimate - rep.analytic) <= 4.0 * rep.sigma + 1e-12;
    return rep;
}

int default_k0(const Params& params) {
    for (int k = 1; k <= 40; ++k) {
        bool ok = true;
        // The bound must keep holding at larger k; check this and the next
        // few levels exactly while feasible, then rely on the Hoeffding
        // bound exp(-N/18) <= 1/4, valid for N >= 26.
        for (int kk = k; kk <= k + 6 && ok; ++kk) {
            const std::uint64_t nvert = Lattice::pow_u64(params.digit_base(), kk);
            const std::uint64_t t = (nvert + 2) / 3;  // smallest integer >= N/3
            if (nvert > 100000) {
                ok = nvert >= 26;
                break;
            }
            ok = binomial_half_upper_tail(nvert, t) >= 0.75;
        }
        if (ok) return k;
    }
    throw resource_error("default_k0: not found below k = 40");
}

double l_condition_lhs(const Params& params, int k, int l) {
    const double logL = std::log(static_cast<double>(params.L));
    const double arg = params.beta * std::pow(9.0, -static_cast<double>(l)) *
                       std::exp(-(params.alpha - params.d) * l * k * logL) *
                       std::exp(-(params.d + params.alpha) * k * logL);
    return std::exp(2.0 * params.d * k * logL - arg);
}

RGSchedule schedule(const Params& params, std::optional<int> k0_override) {
    if (params.beta < 1.0) throw usage_error("schedule: beta must be >= 1");
    RGSchedule sch;
    const double logL = std::log(static_cast<double>(params.L));
    if (params.alpha == static_cast<double>(params.d)) {
        sch.marginal = true;
        const double l9d = std::pow(static_cast<double>(params.L), -9.0 * params.d);
        sch.delta = std::exp(-l9d * params.beta);
        sch.n0 = static_cast<std::uint64_t>(std::ceil(
            2.0 * params.beta /
            (std::pow(static_cast<double>(params.L), 9.0 * params.d) * params.d * logL)));
        sch.ell_marginal =
            static_cast<int>(std::ceil(-std::log2(100.0 * sch.delta)));
        const int top = std::max(sch.ell_marginal, 0);
        for (int r = 0; r <= top; ++r) {
            const double dr = std::ldexp(sch.delta, r);  // 2^r delta
            sch.delta_r.push_back(dr);
            sch.n_r.push_back(sch.n0 << r);
            sch.beta_r.push_back(std::exp(12.0 * dr) * params.beta / 2.0);
        }
        // Defining inequalities, re-verified.
        const double scaled = std::ldexp(sch.delta, sch.ell_marginal);
        if (scaled < 1.0 / 100.0 - 1e-12 || scaled > 1.0 / 50.0 + 1e-12)
            throw std::logic_error("schedule: 2^l delta outside [1/100, 1/50]");
        for (int r = 0; r <= std::min(sch.ell_marginal, top); ++r)
            if (sch.beta_r[r] > params.beta + 1e-9)
                throw std::logic_error("schedule: beta_r exceeds beta");
    } else if (params.alpha > params.d) {
        sch.marginal = false;
        sch.k0 = k0_override.value_or(default_k0(params));
        sch.k = std::max(sch.k0,
                         static_cast<int>(std::floor(std::sqrt(std::log(params.beta)))));
        int l = 0;
        while (l_condition_lhs(params, sch.k, l + 1) <= 0.25) ++l;
        sch.ell = l;
        if (sch.ell >= 1 && l_condition_lhs(params, sch.k, sch.ell) > 0.25)
            throw std::logic_error("schedule: l fails its own condition");
        if (l_condition_lhs(params, sch.k, sch.ell + 1) <= 0.25)
            throw std::logic_error("schedule: l is not maximal");
    } else {
        throw usage_error("schedule: requires alpha >= d");
    }
    return sch;
}

namespace {

struct WeightedFit {
    double slope, intercept, slope_sigma, r_squared;
};

WeightedFit weighted_least_squares(const std::vector<double>& x,
                                   const std::vector<double>& y,
                                   const std::vector<double>& var) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / std::max(var[i], 1e-18);
        a(0, 0) += w;
        a(0, 1) += w * x[i];
        a(1, 1) += w * x[i] * x[i];
        b(0) += w * y[i];
        b(1) += w * x[i] * y[i];
    }
    a(1, 0) = a(0, 1);
    const Eigen::Matrix2d cov = a.inverse();
    const Eigen::Vector2d coef = cov * b;
    double ybar_num = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / std::max(var[i], 1e-18);
        ybar_num += w * y[i];
        wsum += w;
    }
    const double ybar = ybar_num / wsum;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / std::max(var[i], 1e-18);
        const double fit = coef(0) + coef(1) * x[i];
        ss_res += w * (y[i] - fit) * (y[i] - fit);
        ss_tot += w * (y[i] - ybar) * (y[i] - ybar);
    }
    return {coef(1), coef(0), std::sqrt(cov(1, 1)),
            ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<FitPoint>& points) {
    if (points.size() < 5) throw usage_error("fit_power_law: need >= 5 points");
    double bmin = points.front().beta, bmax = points.front().beta;
    for (const auto& p : points) {
        bmin = std::min(bmin, p.beta);
        bmax = std::max(bmax, p.beta);
    }
    if (bmax < 10.0 * bmin)
        throw usage_error("fit_power_law: beta must span at least one decade");
    std::vector<double> x, y, var;
    for (const auto& p : points) {
        if (!(p.beta > 0.0 && p.chi > 0.0))
            throw usage_error("fit_power_law: beta and chi must be positive");
        x.push_back(std::log(p.beta));
        y.push_back(std::log(p.chi));
        const double rel = p.se / p.chi;
        var.push_back(rel * rel);
    }
    const WeightedFit f = weighted_least_squares(x, y, var);
    return {f.slope, f.intercept, 1.96 * f.slope_sigma, f.r_squared};
}

DoubleExpFit fit_double_exp(const std::vector<FitPoint>& points) {
    if (points.size() < 3) throw usage_error("fit_double_exp: need >= 3 points");
    std::vector<double> x, y, var, logchi, logchi_var;
    for (const auto& p : points) {
        if (!(p.chi > std::exp(1.0)))
            throw usage_error("fit_double_exp: chi must exceed e at every point");
        const double lc = std::log(p.chi);
        const double rel = p.se / p.chi;
        x.push_back(p.beta);
        y.push_back(std::log(lc));
        var.push_back(rel * rel / (lc * lc));
        logchi.push_back(lc);
        logchi_var.push_back(rel * rel);
    }
    const WeightedFit f = weighted_least_squares(x, y, var);
    DoubleExpFit out;
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.slope_ci = 1.96 * f.slope_sigma;
    out.convexity_consistent = true;
    for (std::size_t i = 0; i + 2 < x.size(); ++i) {
        const double h01 = x[i + 1] - x[i];
        const double h12 = x[i + 2] - x[i + 1];
        const double h02 = x[i + 2] - x[i];
        const double a = 2.0 / (h01 * h02);
        const double c = 2.0 / (h12 * h02);
        const double b = -a - c;
        DoubleExpFit::SecondDifference d2;
        d2.value = a * logchi[i] + b * logchi[i + 1] + c * logchi[i + 2];
        d2.sigma = std::sqrt(a * a * logchi_var[i] + b * b * logchi_var[i + 1] +
                             c * c * logchi_var[i + 2]);
        if (d2.value < -2.0 * d2.sigma - 1e-12) out.convexity_consistent = false;
        out.second_differences.push_back(d2);
    }
    out.slope_positive = out.slope - out.slope_ci > 0.0;
    return out;
}

InductionReport check_induction(const Params& params, int n, double eps,
                                const SeedSpec& seed,
                                const EstimatorOptions& opts) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw usage_error("check_induction: eps in (0, 1/2]");
    const Lattice small(params, n);
    const Lattice big(params, 2 * n);
    const double thresh_small =
        (1.0 - eps) * static_cast<double>(small.volume());
    // The conclusion threshold is measured against |Lambda_{2n}|.
    const double thresh_big = (1.0 - 2.0 * eps) * static_cast<double>(big.volume());
    EstimatorOptions fixed = opts;
    fixed.min_trials = fixed.max_trials;
    const EstimateReport premise =
        run_mc(params, n, seed, fixed, [&](std::uint64_t t) {
            const MixedConfig mc = sample_mixed(
                params, n, seed.with(StreamPurpose::generic, t), opts.sampler);
            const ClusterLabeling lab(small, mc);
            return max_component(small, lab) >= thresh_small ? 1.0 : 0.0;
        });
    Params boosted = params;
    boosted.beta = (1.0 + 6.0 * eps) * params.beta;
    const EstimateReport conclusion =
        run_mc(boosted, 2 * n, seed, fixed, [&](std::uint64_t t) {
            const MixedConfig mc = sample_mixed(
                boosted, 2 * n, seed.with(StreamPurpose::sprinkle, t),
                opts.sampler);
            const ClusterLabeling lab(big, mc);
            return max_component(big, lab) >= thresh_big ? 1.0 : 0.0;
        });
    InductionReport rep;
    rep.premise_prob = premise.estimate;
    rep.premise_se = premise.se;
    rep.conclusion_prob = conclusion.estimate;
    rep.conclusion_se = conclusion.se;
    rep.premise_holds = premise.estimate >= params.p - 3.0 * premise.se;
    rep.implication_ok =
        !rep.premise_holds ||
        conclusion.estimate >= params.p - 3.0 * conclusion.se;
    return rep;
}

BaseCaseReport base_case_events(const Params& params, const SeedSpec& seed,
                                const EstimatorOptions& opts) {
    const RGSchedule sch = schedule(params);
    if (!sch.marginal)
        throw usage_error("base_case_events: requires alpha = d");
    BaseCaseReport rep;
    rep.delta = sch.delta;
    rep.n0 = sch.n0;
    const int n0 = static_cast<int>(sch.n0);
    rep.a3_a4_applicable = n0 >= 3;
    Params run = params;
    run.beta = params.beta / 2.0;
    run.p = 1.0 - sch.delta;
    const Lattice lat(run, n0);
    const double vol = static_cast<double>(lat.volume());
    const double occ_thresh = (1.0 - 2.0 * sch.delta) * vol;
    const double lambda = std::pow(static_cast<double>(params.L), -2.0 * params.d);
    const std::uint64_t trials = opts.max_trials;
    std::uint64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, all = 0, kmax_ok = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const MixedConfig mc =
            sample_mixed(run, n0, seed.with(StreamPurpose::generic, t),
                         opts.sampler);
        std::uint64_t occ = 0;
        for (auto e : mc.eta) occ += e;
        const bool e1 = static_cast<double>(occ) >= occ_thresh;

        bool e2 = true;
        const int shortcap = std::min(2, n0);
        for (int c = 1; c <= shortcap && e2; ++c) {
            const auto& open = mc.omega.by_class[c];
            std::size_t oi = 0;
            enumerate_class_pairs(lat, c, [&](Edge e) {
                while (oi < open.size() && open[oi] < e) ++oi;
                const bool is_open = oi < open.size() && open[oi] == e;
                if (!is_open && mc.eta[e.first] && mc.eta[e.second]) e2 = false;
            });
        }

        bool e3 = true, e4 = true;
        if (rep.a3_a4_applicable) {
            const MixedConfig coarse = psi(lat, mc, lambda, 2);
            for (auto v : coarse.eta)
                if (!v) e3 = false;
            BondConfig proj = coarse.omega;
            Params pparams = run;
            for (int s = n0 - 2; s >= 1; --s) {
                const Lattice ls(pparams, s);
                if (proj.by_class[1].size() != ls.pair_count(1)) {
                    e4 = false;
                    break;
                }
                if (s >= 2) proj = phi(ls, proj, 1);
            }
        }

        const ClusterLabeling lab(lat, mc);
        std::uint64_t best = 0;
        for (std::uint64_t x = 0; x < lat.volume(); ++x)
            best = std::max(best, lab.component_size(x));
        const bool ek = static_cast<double>(best) >= occ_thresh;

        a1 += e1;
        a2 += e2;
        a3 += e3;
        a4 += e4;
        all += e1 && e2 && e3 && e4;
        kmax_ok += ek;
    }
    const double tr = static_cast<double>(trials);
    rep.prob_a1 = a1 / tr;
    rep.prob_a2 = a2 / tr;
    rep.prob_a3 = a3 / tr;
    rep.prob_a4 = a4 / tr;
    rep.prob_all = all / tr;
    rep.prob_kmax = kmax_ok / tr;
    rep.trials = trials;
    return rep;
}

}  // namespace hierperc
