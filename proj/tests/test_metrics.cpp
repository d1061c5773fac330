#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ordelay/ordelay.hpp"
#include "test_util.hpp"

using namespace ordelay;

namespace {

RationalTransfer delay_policy(int k) {
    std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = 1.0;
    return RationalTransfer(Polynomial(std::move(c)), Polynomial::one(), std::nullopt, false);
}

RationalTransfer half_half() {
    return RationalTransfer(Polynomial({0.5, 0.5}), Polynomial::one(), true, false);
}

/// z^k * tf in expanded form (delays the whole filter by k periods).
RationalTransfer delayed(const RationalTransfer& tf, int k) {
    std::vector<double> num(static_cast<std::size_t>(k), 0.0);
    for (double c : tf.numerator().coeffs()) num.push_back(c);
    return RationalTransfer(Polynomial(std::move(num)), tf.denominator(), std::nullopt, false);
}

}  // namespace

TEST_CASE("inventory variance closed forms") {
    CHECK(inventory_variance(RationalTransfer::identity()) == doctest::Approx(1.0).epsilon(1e-10));
    for (int k : {1, 2, 5})
        CHECK(inventory_variance(delay_policy(k)) == doctest::Approx(1.0 + k).epsilon(1e-9));
    CHECK(inventory_variance(half_half()) == doctest::Approx(1.25).epsilon(1e-9));
}

TEST_CASE("inventory variance of the limiting policy") {
    for (double kappa : {1.0, 0.1}) {
        const double g = solve_gamma(kappa).gamma;
        const double v = inventory_variance(limit_policy(kappa));
        CHECK(v == doctest::Approx(1.25 + 0.5 * g).epsilon(1e-8));
    }
}

TEST_CASE("inventory variance agrees with the partial-sum series oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        const auto tf = testutil::random_outer(rng);
        const double quad = inventory_variance(tf);
        const double series = testutil::inventory_variance_series(tf);
        CHECK(quad == doctest::Approx(series).epsilon(1e-8));
    }
}

TEST_CASE("supplier one-step forecast error") {
    for (int k : {0, 1, 4}) CHECK(supplier_msfe(delay_policy(k)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(supplier_msfe(half_half()) == doctest::Approx(0.25).epsilon(1e-10));
    for (double kappa : {0.01, 1.0}) {
        const double g = solve_gamma(kappa).gamma;
        for (int m : {1, 10, 100}) {
            const double expect = 0.25 * std::pow(1.0 + g / m, -2 * m);
            CHECK(supplier_msfe(arma_approx(kappa, m)) == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("log-spectral quadrature route agrees with the invertible shortcut") {
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 12; ++trial) {
        const auto tf = testutil::random_outer(rng);
        const double direct = supplier_msfe(tf);
        const double quad = supplier_msfe_quadrature(tf);
        CHECK(std::abs(std::log(quad) - std::log(direct)) < 1e-8);
    }
}

TEST_CASE("all-pass factors are invisible to the infinite-past forecast") {
    const BlaschkeFactor b({complex_t(0.5, 0.0)});
    const auto prod = testutil::product(half_half(), blaschke_to_rational(b));
    CHECK_FALSE(prod.is_invertible());
    CHECK(supplier_msfe(prod) == doctest::Approx(0.25).epsilon(1e-8));
    // The limiting policy's singular factor is equally invisible.
    CHECK(supplier_msfe(limit_policy(1.0)) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("cost constants") {
    const auto sym = cost_constants(1.0, 1.0, 1.0, 1.0);
    CHECK(sym.zeta_r == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sym.K_r == doctest::Approx(2.0 * normal_pdf(0.0)).epsilon(1e-12));
    CHECK(sym.K_r == doctest::Approx(0.7978845608).epsilon(1e-9));
    CHECK(sym.kappa == doctest::Approx(1.0).epsilon(1e-12));

    const auto skew = cost_constants(1.0, 9.0, 1.0, 1.0);
    CHECK(skew.zeta_r == doctest::Approx(1.2815515655).epsilon(1e-9));
    CHECK(skew.K_r > 0.0);

    // K grows monotonically as the backlog rate blows up.
    double prev = 0.0;
    for (double b : {1.0, 10.0, 100.0, 1000.0}) {
        const double K = cost_constants(1.0, b, 1.0, 1.0).K_r;
        CHECK(K > prev);
        prev = K;
    }
    CHECK_THROWS_AS(cost_constants(0.0, 1.0, 1.0, 1.0), NonPositiveRate);
    CHECK_THROWS_AS(cost_constants(1.0, -2.0, 1.0, 1.0), NonPositiveRate);
}

TEST_CASE("normal quantile round trip") {
    for (double p : {1e-9, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.9, 0.999, 1.0 - 1e-7}) {
        CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-13);
    }
}

TEST_CASE("optimal cost") {
    // Both regime formulas meet at kappa = sqrt(5) with value 3.
    const double ma1_branch = 1.0 + std::sqrt(5.0 - 1.0);
    const double g = solve_gamma(kSqrt5).gamma;
    const double low_branch = std::exp(-g) * (3.0 + g);
    CHECK(std::abs(ma1_branch - 3.0) < 1e-10);
    CHECK(std::abs(low_branch - 3.0) < 1e-10);
    CHECK(optimal_cost(kSqrt5) == doctest::Approx(3.0).epsilon(1e-10));

    const double g1 = solve_gamma(1.0).gamma;
    CHECK(optimal_cost(1.0) == doctest::Approx(std::exp(-g1) * (3.0 + g1)).epsilon(1e-12));
    CHECK(optimal_cost(1.0) == doctest::Approx(1.50674).epsilon(1e-4));
    // Equivalent form kappa sqrt(5/4 + g/2) + e^{-g}/2 via the defining equation.
    CHECK(optimal_cost(1.0) ==
          doctest::Approx(std::sqrt(1.25 + 0.5 * g1) + 0.5 * std::exp(-g1)).epsilon(1e-12));
    CHECK(optimal_cost(1e-6) < 2e-5);
    CHECK_THROWS_AS(optimal_cost(0.0), NonPositiveKappa);
}

TEST_CASE("policy metrics assembly and lower bound") {
    for (double kappa : {0.01, 0.5, 1.0, kSqrt5, 3.0}) {
        for (int m : {0, 1, 5, 20}) {
            const auto pm = policy_metrics(arma_approx(kappa, m), kappa);
            CHECK(pm.total_cost ==
                  doctest::Approx(kappa * std::sqrt(pm.sigma_I_sq) + std::sqrt(pm.sigma_S_sq))
                      .epsilon(1e-12));
            CHECK(pm.relative_cost >= 1.0 - 1e-9);
        }
    }
    // At the regime boundary every order is exactly optimal.
    for (int m : {0, 1, 50})
        CHECK(policy_metrics(arma_approx(kSqrt5, m), kSqrt5).relative_cost ==
              doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pure delay is always counterproductive") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 6; ++trial) {
        const auto tf = testutil::random_outer(rng);
        const auto base = policy_metrics(tf, 1.0);
        for (int k : {1, 3}) {
            const auto shifted = policy_metrics(delayed(tf, k), 1.0);
            CHECK(shifted.sigma_I_sq == doctest::Approx(base.sigma_I_sq + k).epsilon(1e-7));
            CHECK(shifted.sigma_S_sq == doctest::Approx(base.sigma_S_sq).epsilon(1e-7));
            CHECK(shifted.total_cost > base.total_cost);
        }
    }
}

TEST_CASE("delay constant closed forms") {
    CHECK(std::abs(delay_constant(RationalTransfer::identity()).c) < 1e-9);
    CHECK(delay_constant(half_half()).c == doctest::Approx(0.5 - std::log(2.0)).epsilon(1e-9));
    const RationalTransfer q07(Polynomial({0.7, 0.3}), Polynomial::one(), true, false);
    CHECK(delay_constant(q07).c == doctest::Approx(0.3 + std::log(0.7)).epsilon(1e-9));
    // Requires an outer (invertible) filter.
    const BlaschkeFactor b({complex_t(0.4, 0.0)});
    CHECK_THROWS_AS(delay_constant(blaschke_to_rational(b)), NotOuter);
}

TEST_CASE("delay constant identity on randomized outer filters") {
    std::mt19937_64 rng(90210);
    for (int trial = 0; trial < 50; ++trial) {
        const auto tf = testutil::random_outer(rng);
        const auto dc = delay_constant(tf);
        CHECK(std::abs(dc.identity_residual) < 1e-7);
        // Exponential form of the same identity.
        CHECK(std::abs(supplier_msfe(tf) - std::exp(2.0 * (dc.c - group_delay(tf)))) <
              1e-6 * supplier_msfe(tf));
    }
}

TEST_CASE("additive delay law for all-pass factors") {
    std::mt19937_64 rng(60601);
    for (int trial = 0; trial < 12; ++trial) {
        const auto q = testutil::random_outer(rng);
        const BlaschkeFactor b(testutil::random_blaschke_zeros(rng, 2));
        const auto qb = testutil::product(q, blaschke_to_rational(b));
        const double lhs = inventory_variance(qb);
        const double rhs = inventory_variance(q) + group_delay(b);
        CHECK(std::abs(lhs - rhs) < 1e-7);
    }
}

TEST_CASE("five-term inventory decomposition") {
    // Hand-checked base case.
    const auto plain = inventory_decomposition(half_half(), std::nullopt, std::nullopt);
    CHECK(plain.sigma_I_sq_total == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(plain.gd_outer == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(plain.radial_term == doctest::Approx(0.5).epsilon(1e-10));

    // With an all-pass zero at a = 0.5 the variance gains exactly its delay, 3.
    const auto with_b =
        inventory_decomposition(half_half(), BlaschkeFactor({complex_t(0.5, 0.0)}), std::nullopt);
    CHECK(with_b.gd_blaschke == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(with_b.sigma_I_sq_total == doctest::Approx(1.25 + 3.0).epsilon(1e-8));

    // With the singular factor exp(g(z-1)/(1+z)): delay g/2.
    const double g = solve_gamma(1.0).gamma;
    const auto with_s = inventory_decomposition(
        half_half(), std::nullopt, std::make_pair(Polynomial({-g, g}), Polynomial({1.0, 1.0})));
    CHECK(with_s.gd_singular == doctest::Approx(0.5 * g).epsilon(1e-12));
    CHECK(with_s.sigma_I_sq_total == doctest::Approx(1.25 + 0.5 * g).epsilon(1e-8));

    // Closure of the identity on randomized rational outers with all-pass parts.
    std::mt19937_64 rng(11211);
    for (int trial = 0; trial < 10; ++trial) {
        const auto q = testutil::random_outer(rng);
        const BlaschkeFactor b(testutil::random_blaschke_zeros(rng, 1));
        const auto d = inventory_decomposition(q, b, std::nullopt);
        const double reassembled =
            1.0 + d.gd_outer + d.gd_blaschke + d.gd_singular - 0.5 * d.radial_term;
        CHECK(std::abs(d.sigma_I_sq_total - reassembled) < 1e-7);
    }
}

TEST_CASE("first-order convergence of the ARMA family metrics") {
    const double kappa = 0.1;
    const double g = solve_gamma(kappa).gamma;
    std::vector<double> ms{25, 50, 100, 200};
    std::vector<double> ei, es;
    for (double m : ms) {
        const auto tf = arma_approx(kappa, static_cast<int>(m));
        ei.push_back(inventory_variance(tf) - (1.25 + 0.5 * g));
        es.push_back(supplier_msfe(tf) - 0.25 * std::exp(-2.0 * g));
    }
    const double slope_i = testutil::loglog_slope(ms, ei);
    const double slope_s = testutil::loglog_slope(ms, es);
    CHECK(slope_i > -1.35);
    CHECK(slope_i < -0.75);
    CHECK(slope_s > -1.35);
    CHECK(slope_s < -0.75);
}
