#include <doctest.h>

#include <cmath>

#include "hierperc/oracle.hpp"

using namespace hierperc;

TEST_CASE("total weight is one") {
    CHECK(Oracle(Params(1, 2, 1.0, 1.0), 2, false).total_weight() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Oracle(Params(1, 2, 1.0, 5.0, 0.5), 2, true).total_weight() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Oracle(Params(1, 3, 2.0, 0.7, 0.3), 1, true).total_weight() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Oracle(Params(2, 2, 1.5, 2.0), 1, false).total_weight() ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-bond instance is exact") {
    // Lambda_1 at d=1, L=2 has one edge with probability p_1.
    const Params params(1, 2, 1.0, 3.0);
    const Oracle oracle(params, 1, false);
    const double p1 = edge_prob(params, 1);
    const auto conn = oracle.connection_probs();
    REQUIRE(conn.size() == 2);
    CHECK(conn[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(conn[1] == doctest::Approx(p1).epsilon(1e-14));
    CHECK(oracle.chi_exact() == doctest::Approx(1.0 + p1).epsilon(1e-14));
    // |K^max| is 2 with probability p_1, else 1.
    CHECK(oracle.second_moment_kmax() ==
          doctest::Approx(4.0 * p1 + (1.0 - p1)).epsilon(1e-14));
    const auto law = oracle.kmax_law();
    CHECK(law.at(1) == doctest::Approx(1.0 - p1).epsilon(1e-14));
    CHECK(law.at(2) == doctest::Approx(p1).epsilon(1e-14));
}

TEST_CASE("single-bond instance with Bernoulli sites") {
    const Params params(1, 2, 1.0, 3.0, 0.5);
    const Oracle oracle(params, 1, true);
    const double p1 = edge_prob(params, 1);
    const auto conn = oracle.connection_probs();
    // 0 <-> 0 requires eta_0; 0 <-> 1 requires both sites and the bond.
    CHECK(conn[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(conn[1] == doctest::Approx(0.25 * p1).epsilon(1e-14));
    const auto law = oracle.kmax_law();
    CHECK(law.at(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(law.at(2) == doctest::Approx(0.25 * p1).epsilon(1e-14));
    CHECK(law.at(1) == doctest::Approx(0.75 - 0.25 * p1).epsilon(1e-14));
}

TEST_CASE("connection probability depends only on the distance class") {
    const Params params(1, 2, 1.0, 2.0);
    const Oracle oracle(params, 2, false);
    const Lattice lat(params, 2);
    const auto conn = oracle.connection_probs();
    std::map<int, double> by_class;
    for (std::uint64_t x = 1; x < lat.volume(); ++x) {
        const int k = lat.distance_class(0, x);
        if (by_class.count(k))
            CHECK(conn[x] == doctest::Approx(by_class[k]).epsilon(1e-12));
        else
            by_class[k] = conn[x];
    }
    // The farther class connects no more readily.
    CHECK(by_class[1] >= by_class[2]);
}

TEST_CASE("chi_exact is monotone in beta and pinned at beta = 0") {
    CHECK(Oracle(Params(1, 2, 1.0, 0.0), 2, false).chi_exact() ==
          doctest::Approx(1.0).epsilon(1e-14));
    double prev = 0.0;
    for (double beta = 0.0; beta <= 8.0; beta += 0.5) {
        const double chi = Oracle(Params(1, 2, 1.0, beta), 2, false).chi_exact();
        CHECK(chi >= prev);
        CHECK(chi <= 4.0 + 1e-12);
        prev = chi;
    }
}

TEST_CASE("kmax_law is a probability law consistent with the moments") {
    const Params params(1, 2, 1.0, 1.5, 0.8);
    const Oracle oracle(params, 2, true);
    const auto law = oracle.kmax_law();
    double mass = 0.0, second = 0.0;
    for (const auto& [size, prob] : law) {
        CHECK(prob >= 0.0);
        mass += prob;
        second += static_cast<double>(size * size) * prob;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(second == doctest::Approx(oracle.second_moment_kmax()).epsilon(1e-12));
}

TEST_CASE("exterior weight against direct summation") {
    for (double alpha : {1.0, 2.0}) {
        for (double beta : {0.5, 2.0, 50.0}) {
            const Params params(1, 2, alpha, beta);
            for (int m = 0; m <= 4; ++m) {
                // Blunt reference: sum the series far past the point where
                // terms vanish at double precision.
                double ref = 0.0;
                for (int l = m + 1; l <= 200; ++l) {
                    const double cls =
                        std::pow(2.0, l) - std::pow(2.0, l - 1.0);
                    ref += cls * (-std::expm1(-beta * std::pow(2.0, -l * (1.0 + alpha))));
                }
                CHECK(exterior_weight(params, m) ==
                      doctest::Approx(ref).epsilon(1e-10));
            }
            CHECK(exterior_weight(params, 1) < exterior_weight(params, 0));
        }
    }
    CHECK(exterior_weight(Params(1, 2, 1.0, 0.0), 0) == 0.0);
}

TEST_CASE("exact_phi factorizes") {
    CHECK(exact_phi(Params(1, 2, 1.0, 0.0), 1) == 0.0);
    {
        // m = 0: the inner sum is the single term P(0 <-> 0) = 1.
        const Params params(1, 2, 1.0, 1.0);
        CHECK(exact_phi(params, 0) ==
              doctest::Approx(exterior_weight(params, 0)).epsilon(1e-12));
    }
    {
        const Params params(1, 2, 1.0, 1.0);
        const double expected =
            exterior_weight(params, 1) * (1.0 + edge_prob(params, 1));
        CHECK(exact_phi(params, 1) == doctest::Approx(expected).epsilon(1e-12));
    }
    // phi decreases as the inner box grows, in the subcritical regime where
    // the exterior weight decay beats the connectivity gain.
    const Params params(1, 2, 2.0, 0.5);
    CHECK(exact_phi(params, 2) < exact_phi(params, 1));
    CHECK(exact_phi(params, 1) < exact_phi(params, 0));
}

TEST_CASE("dct chain inequality holds exactly") {
    for (double beta : {0.0, 0.3, 1.0, 4.0, 50.0}) {
        for (double alpha : {1.0, 2.0}) {
            const Params params(1, 2, alpha, beta);
            const DctChainReport rep = check_dct_chain(params, 1, 2);
            CHECK(rep.ok());
            CHECK(rep.lhs == doctest::Approx(rep.sup_term).epsilon(1e-12));
            CHECK(rep.inner <= rep.lhs + 1e-12);
        }
    }
    const DctChainReport rep = check_dct_chain(Params(1, 2, 1.0, 0.0), 1, 2);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.inner == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("oracle refuses oversized instances") {
    CHECK_THROWS_AS(Oracle(Params(1, 2, 1.0, 1.0), 7, false), resource_error);
    // 28 bond bits at n = 3 already exceed the 2^24 configuration cap.
    CHECK_THROWS_AS(Oracle(Params(1, 2, 1.0, 1.0), 3, false), resource_error);
    CHECK_NOTHROW(Oracle(Params(1, 2, 1.0, 1.0), 2, true));
}
