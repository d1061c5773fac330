#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ordelay/ordelay.hpp"

using namespace ordelay;

namespace {

RationalTransfer half_half() {
    return RationalTransfer(Polynomial({0.5, 0.5}), Polynomial::one(), true, false);
}

void check_within_se(double emp, double analytic, double se, double n_se = 4.0) {
    CHECK(std::abs(emp - analytic) <= n_se * se);
}

}  // namespace

TEST_CASE("identical seeds reproduce identical results") {
    SimulationConfig cfg;
    cfg.policy = arma_approx(1.0, 1);
    cfg.periods = 50'000;
    cfg.seed = 11;
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(a.sigma_I_sq_emp == b.sigma_I_sq_emp);
    CHECK(a.msfe_emp == b.msfe_emp);
    CHECK(a.cost_retailer_emp == b.cost_retailer_emp);
    CHECK(a.cost_supplier_emp == b.cost_supplier_emp);
    CHECK(a.innovation_recovery_error == b.innovation_recovery_error);
}

TEST_CASE("white-noise policy reproduces its closed forms") {
    SimulationConfig cfg;
    cfg.policy = RationalTransfer::identity();
    cfg.mean_demand = 10.0;
    cfg.periods = 200'000;
    cfg.seed = 7;
    const auto r = simulate(cfg);
    CHECK(r.sigma_I_sq_analytic == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.msfe_analytic == doctest::Approx(1.0).epsilon(1e-9));
    check_within_se(r.sigma_I_sq_emp, 1.0, r.se_sigma_I_sq);
    check_within_se(r.msfe_emp, 1.0, r.se_msfe);
    // Symmetric unit rates: per-period cost 2 phi(0) on both tiers.
    const double k_sym = 2.0 * normal_pdf(0.0);
    check_within_se(r.cost_retailer_emp, k_sym, r.se_cost_retailer);
    check_within_se(r.cost_supplier_emp, k_sym, r.se_cost_supplier);
    CHECK(r.innovation_recovery_error < 1e-10);
    CHECK_FALSE(r.negative_orders_seen);  // mean demand 10 keeps orders positive
}

TEST_CASE("averaging filter with full history") {
    SimulationConfig cfg;
    cfg.policy = half_half();
    cfg.periods = 200'000;
    cfg.seed = 3;
    const auto r = simulate(cfg);
    CHECK(r.sigma_I_sq_analytic == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(r.msfe_analytic == doctest::Approx(0.25).epsilon(1e-9));
    check_within_se(r.sigma_I_sq_emp, 1.25, r.se_sigma_I_sq);
    check_within_se(r.msfe_emp, 0.25, r.se_msfe);
    CHECK(r.innovation_recovery_error < 1e-8);
    CHECK(r.negative_orders_seen);  // zero-mean demand goes negative constantly
}

TEST_CASE("averaging filter with one-point memory hits the finite-window value") {
    SimulationConfig cfg;
    cfg.policy = half_half();
    cfg.forecaster = FiniteMemory{0};
    cfg.periods = 200'000;
    cfg.seed = 5;
    const auto r = simulate(cfg);
    CHECK(r.msfe_analytic == doctest::Approx(0.375).epsilon(1e-9));
    check_within_se(r.msfe_emp, 0.375, r.se_msfe);
}

TEST_CASE("first-order ARMA policy with full history") {
    SimulationConfig cfg;
    cfg.policy = arma_approx(1.0, 1);
    cfg.periods = 200'000;
    cfg.seed = 1;
    const auto r = simulate(cfg);
    const double g = solve_gamma(1.0).gamma;
    CHECK(r.msfe_analytic == doctest::Approx(0.25 * std::pow(1.0 + g, -2.0)).epsilon(1e-9));
    CHECK(r.msfe_analytic == doctest::Approx(0.0646).epsilon(1e-3));
    check_within_se(r.sigma_I_sq_emp, r.sigma_I_sq_analytic, r.se_sigma_I_sq);
    check_within_se(r.msfe_emp, r.msfe_analytic, r.se_msfe);
    check_within_se(r.cost_retailer_emp, r.cost_retailer_analytic, r.se_cost_retailer);
    check_within_se(r.cost_supplier_emp, r.cost_supplier_analytic, r.se_cost_supplier);
    CHECK(r.innovation_recovery_error < 1e-8);
}

TEST_CASE("shock scaling is exactly homogeneous at fixed seed") {
    SimulationConfig cfg;
    cfg.policy = half_half();
    cfg.periods = 50'000;
    cfg.seed = 19;
    const auto base = simulate(cfg);
    cfg.shock_std = 2.0;
    const auto scaled = simulate(cfg);
    CHECK(scaled.sigma_I_sq_emp == doctest::Approx(4.0 * base.sigma_I_sq_emp).epsilon(1e-12));
    CHECK(scaled.msfe_emp == doctest::Approx(4.0 * base.msfe_emp).epsilon(1e-12));
    CHECK(scaled.cost_retailer_emp == doctest::Approx(2.0 * base.cost_retailer_emp).epsilon(1e-12));
    CHECK(scaled.cost_supplier_emp == doctest::Approx(2.0 * base.cost_supplier_emp).epsilon(1e-12));
}

TEST_CASE("full-history forecasting rejects non-invertible policies") {
    SimulationConfig cfg;
    // Numerator root at z = 1/2, inside the circle: innovations unrecoverable.
    cfg.policy = RationalTransfer(Polynomial({-1.0, 2.0}), Polynomial::one(), std::nullopt, false);
    cfg.periods = 1'000;
    CHECK_THROWS_AS(simulate(cfg), NonInvertiblePolicyWithFullHistory);
    // A finite-memory supplier has no such restriction.
    cfg.forecaster = FiniteMemory{5};
    const auto r = simulate(cfg);
    CHECK(r.msfe_emp > 0.0);
}

TEST_CASE("ill-conditioned inverse filters are detected rather than returned") {
    SimulationConfig cfg;
    // Multiplicity-6 boundary zero: the inverse filter integrates rounding
    // noise explosively over long horizons.
    cfg.policy = arma_approx(1.0, 5);
    cfg.periods = 200'000;
    CHECK_THROWS_AS(simulate(cfg), NumericalError);
    // The same policy remains simulable with a finite-memory supplier.
    cfg.forecaster = FiniteMemory{10};
    cfg.periods = 50'000;
    const auto r = simulate(cfg);
    check_within_se(r.msfe_emp, r.msfe_analytic, r.se_msfe, 5.0);
}

TEST_CASE("cost identity report") {
    SimulationConfig cfg;
    cfg.policy = RationalTransfer::identity();
    cfg.periods = 200'000;
    cfg.seed = 23;
    const auto rep = validate_cost_identity(cfg);
    CHECK(std::abs(rep.retailer_relative_deviation) < 0.02);
    CHECK(std::abs(rep.supplier_relative_deviation) < 0.02);
}

TEST_CASE("result serialization carries the fixed field names") {
    SimulationConfig cfg;
    cfg.periods = 2'000;
    const auto j = to_json(simulate(cfg));
    for (const char* key :
         {"sigma_I_sq_emp", "se_sigma_I_sq", "msfe_emp", "se_msfe", "cost_retailer_emp",
          "se_cost_retailer", "cost_supplier_emp", "se_cost_supplier", "sigma_I_sq_analytic",
          "msfe_analytic", "cost_retailer_analytic", "cost_supplier_analytic",
          "innovation_recovery_error", "negative_orders_seen", "periods", "seed"}) {
        CHECK(j.contains(key));
    }
}
