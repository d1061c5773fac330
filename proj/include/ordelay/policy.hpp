#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ordelay/errors.hpp"
#include "ordelay/transfer.hpp"

namespace ordelay {

inline constexpr double kSqrt5 = 2.23606797749978969;

struct GammaSolution {
    double kappa = 0.0;
    double gamma = 0.0;
    double residual = 0.0;  // kappa^2 - (5 + 2 gamma) exp(-2 gamma)
};

enum class PolicyFamily { MA1Optimal, EpsilonSequence, LimitPolicy, ArmaApprox, OuterApproxOfInner };

struct PolicySpec {
    double kappa = 1.0;
    PolicyFamily family = PolicyFamily::ArmaApprox;
    int order = 0;  // k for EpsilonSequence, m for ArmaApprox / OuterApproxOfInner
};

/// Solves kappa^2 = (5 + 2 gamma) exp(-2 gamma) for gamma >= 0, clamping to
/// gamma = 0 when kappa >= sqrt(5). The equation is handled in log form,
/// h(gamma) = log(5 + 2 gamma) - 2 gamma - 2 log kappa, so that kappa as
/// small as 1e-8 stays well scaled; bisection brackets the root and Newton
/// steps polish it.
inline GammaSolution solve_gamma(double kappa) {
    if (!(kappa > 0.0)) throw NonPositiveKappa("kappa must be positive");
    GammaSolution sol;
    sol.kappa = kappa;
    if (kappa >= kSqrt5) {
        sol.gamma = 0.0;
        sol.residual = kappa * kappa - 5.0;
        return sol;
    }
    const double target = 2.0 * std::log(kappa);
    const auto h = [target](double g) { return std::log(5.0 + 2.0 * g) - 2.0 * g - target; };
    double lo = 0.0, hi = 1.0;
    while (h(hi) > 0.0) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    double g = 0.5 * (lo + hi);
    for (int iter = 0; iter < 3; ++iter) {
        const double hp = 2.0 / (5.0 + 2.0 * g) - 2.0;
        g -= h(g) / hp;
        if (g < 0.0) g = 0.0;
    }
    sol.gamma = g;
    sol.residual = kappa * kappa - (5.0 + 2.0 * g) * std::exp(-2.0 * g);
    return sol;
}

/// MA(1) optimum psi(z) = psi0 + (1 - psi0) z with psi0 = 1 - 1/sqrt(kappa^2 - 1);
/// the optimal policy in the kappa >= sqrt(5) regime.
inline RationalTransfer ma1_optimal(double kappa) {
    if (kappa <= 1.0) throw KappaTooSmall("ma1_optimal requires kappa > 1");
    const double psi0 = 1.0 - 1.0 / std::sqrt(kappa * kappa - 1.0);
    return RationalTransfer(Polynomial({psi0, 1.0 - psi0}), Polynomial({1.0}),
                            /*known_invertible=*/psi0 >= 0.5, /*check_stability=*/false);
}

namespace detail {

/// Coefficients of (a + b z)^m via the binomial recurrence; stable for the
/// scaled factors used below, where a^m stays within double range.
inline Polynomial binomial_power(double a, double b, int m) {
    std::vector<double> c(static_cast<std::size_t>(m) + 1);
    c[0] = std::pow(a, m);
    for (int j = 0; j < m; ++j)
        c[static_cast<std::size_t>(j) + 1] =
            c[static_cast<std::size_t>(j)] * (b / a) * static_cast<double>(m - j) /
            static_cast<double>(j + 1);
    return Polynomial(std::move(c));
}

}  // namespace detail

/// ARMA approximant psi_hat^m(z) = (1+z)/2 * (1 + gamma (1-z) / (m (1+z)))^{-m},
/// assembled from the scaled factors
///   numerator   = ((1+z)/2)^{m+1}
///   denominator = ((m+gamma)/(2m) + (m-gamma)/(2m) z)^m
/// so that coefficients never overflow for m up to 1000; the numerator is
/// rescaled at the end so psi(1) = 1 holds exactly in floating point.
/// m = 0 returns the pure outer factor (1+z)/2.
inline RationalTransfer arma_approx(double kappa, int m) {
    const double gamma = solve_gamma(kappa).gamma;
    // gamma = 0 collapses every order to the plain outer factor; returning it
    // directly avoids carrying a removable (1+z)^m/(1+z)^m cancellation.
    if (m == 0 || gamma == 0.0)
        return RationalTransfer(Polynomial({0.5, 0.5}), Polynomial({1.0}),
                                /*known_invertible=*/true, /*check_stability=*/false);
    std::vector<TransferFactor> num_factors{{Polynomial({0.5, 0.5}), m + 1}};
    std::vector<TransferFactor> den_factors;
    if (m >= 1) {
        const double md = static_cast<double>(m);
        den_factors.push_back(
            {Polynomial({(md + gamma) / (2.0 * md), (md - gamma) / (2.0 * md)}), m});
    }
    // Numerator roots sit at z = -1, AR root at -(m+gamma)/(m-gamma), |root| > 1.
    return RationalTransfer(std::move(num_factors), std::move(den_factors),
                            /*known_invertible=*/true, /*check_stability=*/false);
}

/// Epsilon-optimal policy psi^(k)(z) = (1+z)/2 * exp(gamma (z-1)/(1+z+1/k)),
/// analytic on the closed disk for every finite k.
inline ExponentialTransfer epsilon_policy(double kappa, int k) {
    if (k < 1) throw std::invalid_argument("epsilon_policy requires k >= 1");
    const double gamma = solve_gamma(kappa).gamma;
    RationalTransfer prefactor(Polynomial({0.5, 0.5}), Polynomial({1.0}), true, false);
    return ExponentialTransfer(std::move(prefactor), Polynomial({-gamma, gamma}),
                               Polynomial({1.0 + 1.0 / static_cast<double>(k), 1.0}));
}

/// Limiting policy (1+z)/2 * exp(gamma (z-1)/(1+z)); carries a singular
/// boundary point at z = -1, so no coefficient extraction is possible.
inline ExponentialTransfer limit_policy(double kappa) {
    if (kappa >= kSqrt5) throw KappaOutOfRegime("limit policy only defined for kappa < sqrt(5)");
    const double gamma = solve_gamma(kappa).gamma;
    RationalTransfer prefactor(Polynomial({0.5, 0.5}), Polynomial({1.0}), true, false);
    return ExponentialTransfer(std::move(prefactor), Polynomial({-gamma, gamma}),
                               Polynomial({1.0, 1.0}));
}

/// Outer approximation (1 - R(z)/m)^{-m} of the singular inner function
/// exp(R(z)), for a rational exponent R with R(1) = 0 and Re R <= 0 on the
/// disk (checked on a sampled grid). Matches the group delay of the inner
/// target: GD = R'(1).
inline RationalTransfer outer_approx_of_inner(const Polynomial& exponent_num,
                                              const Polynomial& exponent_den, int m) {
    const double ed1 = exponent_den(1.0);
    if (std::abs(ed1) < 1e-300) throw std::invalid_argument("exponent pole at z=1");
    if (std::abs(exponent_num(1.0) / ed1) > 1e-10)
        throw std::invalid_argument("exponent must vanish at z=1");
    for (double r : {0.2, 0.5, 0.8, 0.95, 0.999}) {
        for (int j = 0; j < 256; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / 256.0;
            const complex_t z = r * std::exp(complex_t(0.0, theta));
            const complex_t ed = exponent_den(z);
            if (std::abs(ed) < 1e-12) continue;
            if ((exponent_num(z) / ed).real() > 1e-9)
                throw NotNegativeRealPart("exponent has positive real part on the disk");
        }
    }
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    // (1 - R/m)^{-m} = (ed/ed(1))^m / ((ed - en/m)/ed(1))^m, both factors 1 at z=1.
    std::vector<double> p = exponent_den.coeffs();
    for (double& c : p) c /= ed1;
    std::vector<double> q = p;
    const auto& en = exponent_num.coeffs();
    for (std::size_t j = 0; j < q.size() || j < en.size(); ++j) {
        if (j >= q.size()) q.resize(j + 1, 0.0);
        if (j < en.size()) q[j] -= en[j] / (static_cast<double>(m) * ed1);
    }
    Polynomial pbase(std::move(p));
    Polynomial qbase(std::move(q));
    // Root checks run on the low-degree base factors; companion eigenvalues of
    // the expanded m-fold power would scatter around the repeated root.
    bool invertible = true;
    for (const auto& r : qbase.roots())
        if (classify_modulus(std::abs(r)) != CircleClass::Outside)
            throw NumericalError("outer approximation has an unstable AR factor");
    for (const auto& r : pbase.roots())
        if (classify_modulus(std::abs(r)) == CircleClass::Inside) invertible = false;
    return RationalTransfer(std::vector<TransferFactor>{{std::move(pbase), m}},
                            std::vector<TransferFactor>{{std::move(qbase), m}}, invertible,
                            /*check_stability=*/false);
}

}  // namespace ordelay
