#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Shared statistical helpers for the test suites. Independent of the library
// implementation paths they are used to check.
namespace test_support {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 1.0;
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // Series for P(a,x), return 1 - P.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction for Q(a,x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

// Pearson chi-square p-value for observed counts against expected
// probabilities; bins with expectation below 5 are merged into a tail bin.
inline double chi_square_pvalue(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& expected_probs,
                                std::uint64_t total) {
    double stat = 0.0;
    int df = -1;
    double merged_obs = 0.0, merged_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_probs[i] * static_cast<double>(total);
        if (e < 5.0) {
            merged_obs += static_cast<double>(observed[i]);
            merged_exp += e;
            continue;
        }
        const double o = static_cast<double>(observed[i]);
        stat += (o - e) * (o - e) / e;
        ++df;
    }
    if (merged_exp >= 5.0) {
        stat += (merged_obs - merged_exp) * (merged_obs - merged_exp) / merged_exp;
        ++df;
    }
    if (df < 1) return 1.0;
    return gamma_q(df / 2.0, stat / 2.0);
}

// Exact binomial pmf via log-space evaluation.
inline double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(n - k + 1.0);
    return std::exp(logc + k * std::log(p) + (n - k) * std::log1p(-p));
}

}  // namespace test_support
