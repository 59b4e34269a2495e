#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hierperc {

// Thrown on precondition violations (CLI maps this to exit code 2).
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation would exceed its size/cost guard (exit code 3).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model parameters. All validation lives here; everything downstream may
// assume a Params instance is well-formed.
struct Params {
    int d = 1;            // dimension, >= 1
    int L = 2;            // side length, >= 2
    double alpha = 1.0;   // decay exponent, > 0
    double beta = 1.0;    // inverse-temperature-like strength, >= 0
    double p = 1.0;       // site density, in [0,1]

    Params() = default;
    Params(int d_, int L_, double alpha_, double beta_, double p_ = 1.0)
        : d(d_), L(L_), alpha(alpha_), beta(beta_), p(p_) {
        validate();
    }

    void validate() const {
        if (d < 1) throw usage_error("Params: d must be >= 1");
        if (L < 2) throw usage_error("Params: L must be >= 2");
        if (!(alpha > 0.0)) throw usage_error("Params: alpha must be > 0");
        if (!(beta >= 0.0)) throw usage_error("Params: beta must be >= 0");
        if (!(p >= 0.0 && p <= 1.0)) throw usage_error("Params: p must be in [0,1]");
    }

    // Vertices per 1-block: L^d. Guarded against overflow at construction use sites.
    std::uint64_t digit_base() const {
        std::uint64_t b = 1;
        for (int i = 0; i < d; ++i) b *= static_cast<std::uint64_t>(L);
        return b;
    }

    // |Lambda_n| = L^{dn}; rejects n with L^{dn} > 2^48.
    std::uint64_t volume(int n) const {
        if (n < 0) throw usage_error("volume: n must be >= 0");
        const std::uint64_t cap = std::uint64_t{1} << 48;
        const std::uint64_t b = digit_base();
        std::uint64_t v = 1;
        for (int i = 0; i < n; ++i) {
            if (v > cap / b) throw usage_error("volume: L^{dn} exceeds 2^48");
            v *= b;
        }
        return v;
    }
};

}  // namespace hierperc
