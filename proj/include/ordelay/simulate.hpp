#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ordelay/errors.hpp"
#include "ordelay/finite_memory.hpp"
#include "ordelay/metrics.hpp"
#include "ordelay/normal.hpp"
#include "ordelay/transfer.hpp"

namespace ordelay {

struct FullHistory {};
struct FiniteMemory {
    int n = 0;
};
using Forecaster = std::variant<FullHistory, FiniteMemory>;

struct SimulationConfig {
    RationalTransfer policy = RationalTransfer::identity();
    double mean_demand = 0.0;
    double shock_std = 1.0;
    std::size_t periods = 1'000'000;
    std::size_t burn_in = 0;  // 0 picks max(1000, 50 * AR decay length)
    std::uint64_t seed = 0;
    Forecaster forecaster = FullHistory{};
    CostParameters cost_params = cost_constants(1.0, 1.0, 1.0, 1.0);
};

struct SimulationResult {
    double sigma_I_sq_emp = 0.0, se_sigma_I_sq = 0.0;
    double msfe_emp = 0.0, se_msfe = 0.0;
    double cost_retailer_emp = 0.0, se_cost_retailer = 0.0;
    double cost_supplier_emp = 0.0, se_cost_supplier = 0.0;
    double sigma_I_sq_analytic = 0.0;
    double msfe_analytic = 0.0;
    double cost_retailer_analytic = 0.0;
    double cost_supplier_analytic = 0.0;
    double innovation_recovery_error = 0.0;  // max |recovered - true| after burn-in
    bool negative_orders_seen = false;
    std::size_t periods = 0;
    std::uint64_t seed = 0;
};

namespace detail {

/// Deterministic standard normal stream: inverse CDF applied to uniform
/// 64-bit draws, so runs are reproducible bit-for-bit for a given seed.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double operator()() {
        const double u =
            (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        return normal_quantile(u);
    }

private:
    std::mt19937_64 engine_;
};

struct BatchStats {
    double mean = 0.0;
    double se = 0.0;
};

/// Batch-means standard error over >= 30 batches.
inline BatchStats batch_means(const std::vector<double>& xs, std::size_t n_batches = 32) {
    BatchStats st;
    const std::size_t batch = xs.size() / n_batches;
    std::vector<double> means(n_batches, 0.0);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) s += xs[i];
        means[b] = s / static_cast<double>(batch);
    }
    for (double m : means) st.mean += m;
    st.mean /= static_cast<double>(n_batches);
    double var = 0.0;
    for (double m : means) var += (m - st.mean) * (m - st.mean);
    var /= static_cast<double>(n_batches - 1);
    st.se = std::sqrt(var / static_cast<double>(n_batches));
    return st;
}

}  // namespace detail

/// Seeded Monte Carlo run of the two-tier chain: i.i.d. Gaussian demand, the
/// ARMA ordering recursion, retailer inventory accounting, and a supplier
/// base-stock policy driven by either the exact full-history one-step
/// predictor (innovations recovered by the inverse filter) or the
/// finite-memory Levinson predictor.
inline SimulationResult simulate(const SimulationConfig& config) {
    const auto& tf = config.policy;
    const bool full_history = std::holds_alternative<FullHistory>(config.forecaster);
    if (full_history && !tf.is_invertible())
        throw NonInvertiblePolicyWithFullHistory(
            "full-history forecasting needs an invertible policy");

    const auto& num = tf.numerator().coeffs();
    const auto& den = tf.denominator().coeffs();
    const std::size_t p = den.size() - 1;  // AR order
    const std::size_t q = num.size() - 1;  // MA order

    std::size_t burn_in = config.burn_in;
    if (burn_in == 0) {
        double decay = 1.0;
        if (p > 0) {
            const double rho = tf.ar_spectral_radius();
            if (rho > 0.0 && rho < 1.0) decay = -1.0 / std::log(rho);
        }
        burn_in = std::max<std::size_t>(1000, static_cast<std::size_t>(50.0 * decay));
    }

    const double sigma_eps = config.shock_std;
    const double d = config.mean_demand;
    const auto& cp = config.cost_params;

    const double sigma_I = std::sqrt(inventory_variance(tf)) * sigma_eps;
    double msfe_analytic = supplier_msfe(tf) * sigma_eps * sigma_eps;
    std::vector<double> fm_coeffs;
    if (!full_history) {
        const int n = std::get<FiniteMemory>(config.forecaster).n;
        const auto sol = finite_past_msfe(tf, n);
        fm_coeffs = sol.coefficients;
        msfe_analytic = sol.msfe * sigma_eps * sigma_eps;
    }
    const double sigma_S_hat = std::sqrt(msfe_analytic);

    detail::NormalStream normals(config.seed);
    const std::size_t total = burn_in + config.periods;

    // Ring-free histories; total is at most a few million entries. Orders are
    // kept in extended precision so innovation recovery is not limited by the
    // quantization of its own input.
    std::vector<double> eps(total + 1);
    std::vector<long double> orders(total + 1);
    for (std::size_t t = 0; t <= total; ++t) eps[t] = sigma_eps * normals();

    // Centered ARMA recursion den * o = num * eps.
    for (std::size_t t = 0; t <= total; ++t) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j <= q && j <= t; ++j)
            acc += static_cast<long double>(num[j]) * eps[t - j];
        for (std::size_t j = 1; j <= p && j <= t; ++j)
            acc -= static_cast<long double>(den[j]) * orders[t - j];
        orders[t] = acc / den[0];
    }
    // Inverse filter num * eps_hat = den * o (innovation recovery). The
    // recursion integrates rounding noise at any unit-circle numerator zero,
    // so the feedback runs in extended precision; high-multiplicity boundary
    // zeros remain intrinsically ill-conditioned over long horizons.
    std::vector<long double> recovered(full_history ? total + 1 : 0, 0.0L);
    if (full_history) {
        for (std::size_t t = 0; t <= total; ++t) {
            long double acc = 0.0L;
            for (std::size_t j = 0; j <= p && j <= t; ++j)
                acc += static_cast<long double>(den[j]) * orders[t - j];
            for (std::size_t j = 1; j <= q && j <= t; ++j)
                acc -= static_cast<long double>(num[j]) * recovered[t - j];
            recovered[t] = acc / num[0];
        }
        long double max_o = 1.0L, max_r = 0.0L;
        for (std::size_t t = 0; t <= total; ++t) {
            max_o = std::max(max_o, std::abs(orders[t]));
            max_r = std::max(max_r, std::abs(recovered[t]));
        }
        if (!(max_r < 1e6L * max_o))
            throw NumericalError(
                "innovation recovery diverged; the policy's boundary zeros are too "
                "ill-conditioned for full-history forecasting at this horizon");
    }

    SimulationResult result;
    result.periods = config.periods;
    result.seed = config.seed;
    result.sigma_I_sq_analytic = sigma_I * sigma_I;
    result.msfe_analytic = msfe_analytic;
    result.cost_retailer_analytic = cp.K_r * sigma_I;
    result.cost_supplier_analytic = cp.K_s * sigma_S_hat;

    std::vector<double> inv_sq(config.periods), sq_err(config.periods);
    std::vector<double> cost_r(config.periods), cost_s(config.periods);

    // Opening balance -eps[0]: the first order already responds to the
    // period-0 demand, so its shock must be on the demand side of the ledger
    // or it would sit in the inventory forever.
    double inventory_centered = -eps[0];
    const double inventory_offset = cp.zeta_r * sigma_I;
    // Warm the inventory recursion through the burn-in; the centered
    // cumulative sum is itself stationary once the order filter has settled.
    for (std::size_t t = 1; t <= burn_in; ++t)
        inventory_centered += orders[t - 1] - eps[t];

    for (std::size_t t = burn_in + 1; t <= total; ++t) {
        const std::size_t i = t - burn_in - 1;
        inventory_centered += orders[t - 1] - eps[t];
        const double inv = inventory_offset + inventory_centered;
        inv_sq[i] = (inv - inventory_offset) * (inv - inventory_offset);
        cost_r[i] = cp.h_r * std::max(inv, 0.0) + cp.b_r * std::max(-inv, 0.0);

        // Supplier: base stock set at t-1 covers the order arriving at t.
        double forecast_c;  // centered one-step forecast made at time t-1
        if (full_history) {
            long double acc = 0.0L;
            for (std::size_t j = 1; j <= q && j <= t; ++j)
                acc += static_cast<long double>(num[j]) * recovered[t - j];
            for (std::size_t j = 1; j <= p && j <= t; ++j)
                acc -= static_cast<long double>(den[j]) * orders[t - j];
            forecast_c = static_cast<double>(acc / den[0]);
        } else {
            forecast_c = 0.0;
            for (std::size_t k = 0; k < fm_coeffs.size() && k + 1 <= t; ++k)
                forecast_c += fm_coeffs[k] * orders[t - 1 - k];
        }
        const double base_stock = d + forecast_c + cp.zeta_s * sigma_S_hat;
        const double order_t = d + static_cast<double>(orders[t]);
        if (order_t < 0.0) result.negative_orders_seen = true;
        const double err = order_t - (d + forecast_c);
        sq_err[i] = err * err;
        cost_s[i] = cp.h_s * std::max(base_stock - order_t, 0.0) +
                    cp.b_s * std::max(order_t - base_stock, 0.0);
    }

    if (full_history) {
        double max_err = 0.0;
        for (std::size_t t = burn_in; t <= total; ++t)
            max_err = std::max(max_err, std::abs(static_cast<double>(recovered[t]) - eps[t]));
        result.innovation_recovery_error = max_err;
    }

    const auto si = detail::batch_means(inv_sq);
    const auto ms = detail::batch_means(sq_err);
    const auto cr = detail::batch_means(cost_r);
    const auto cs = detail::batch_means(cost_s);
    result.sigma_I_sq_emp = si.mean;
    result.se_sigma_I_sq = si.se;
    result.msfe_emp = ms.mean;
    result.se_msfe = ms.se;
    result.cost_retailer_emp = cr.mean;
    result.se_cost_retailer = cr.se;
    result.cost_supplier_emp = cs.mean;
    result.se_cost_supplier = cs.se;
    return result;
}

struct CostIdentityReport {
    SimulationResult result;
    double retailer_relative_deviation = 0.0;
    double supplier_relative_deviation = 0.0;
};

/// Compares empirical per-period costs against K_r sigma_I and K_s sigma_S.
inline CostIdentityReport validate_cost_identity(const SimulationConfig& config) {
    CostIdentityReport report;
    report.result = simulate(config);
    const auto& r = report.result;
    report.retailer_relative_deviation =
        (r.cost_retailer_emp - r.cost_retailer_analytic) / r.cost_retailer_analytic;
    report.supplier_relative_deviation =
        (r.cost_supplier_emp - r.cost_supplier_analytic) / r.cost_supplier_analytic;
    return report;
}

inline nlohmann::json to_json(const SimulationResult& r) {
    return nlohmann::json{{"sigma_I_sq_emp", r.sigma_I_sq_emp},
                          {"se_sigma_I_sq", r.se_sigma_I_sq},
                          {"msfe_emp", r.msfe_emp},
                          {"se_msfe", r.se_msfe},
                          {"cost_retailer_emp", r.cost_retailer_emp},
                          {"se_cost_retailer", r.se_cost_retailer},
                          {"cost_supplier_emp", r.cost_supplier_emp},
                          {"se_cost_supplier", r.se_cost_supplier},
                          {"sigma_I_sq_analytic", r.sigma_I_sq_analytic},
                          {"msfe_analytic", r.msfe_analytic},
                          {"cost_retailer_analytic", r.cost_retailer_analytic},
                          {"cost_supplier_analytic", r.cost_supplier_analytic},
                          {"innovation_recovery_error", r.innovation_recovery_error},
                          {"negative_orders_seen", r.negative_orders_seen},
                          {"periods", r.periods},
                          {"seed", r.seed}};
}

}  // namespace ordelay
