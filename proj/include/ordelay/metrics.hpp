#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "ordelay/errors.hpp"
#include "ordelay/normal.hpp"
#include "ordelay/policy.hpp"
#include "ordelay/quadrature.hpp"
#include "ordelay/transfer.hpp"

namespace ordelay {

/// Per-firm holding/backlog rates with the derived safety factors and cost
/// constants K^j = h zeta + (h + b) L(zeta).
struct CostParameters {
    double h_r = 1.0, b_r = 1.0;
    double h_s = 1.0, b_s = 1.0;
    double zeta_r = 0.0, zeta_s = 0.0;
    double K_r = 0.0, K_s = 0.0;
    double kappa = 1.0;
};

inline CostParameters cost_constants(double h_r, double b_r, double h_s, double b_s) {
    if (!(h_r > 0.0 && b_r > 0.0 && h_s > 0.0 && b_s > 0.0))
        throw NonPositiveRate("all holding/backlog rates must be positive");
    CostParameters p;
    p.h_r = h_r;
    p.b_r = b_r;
    p.h_s = h_s;
    p.b_s = b_s;
    p.zeta_r = normal_quantile(b_r / (h_r + b_r));
    p.zeta_s = normal_quantile(b_s / (h_s + b_s));
    p.K_r = h_r * p.zeta_r + (h_r + b_r) * normal_loss(p.zeta_r);
    p.K_s = h_s * p.zeta_s + (h_s + b_s) * normal_loss(p.zeta_s);
    p.kappa = p.K_r / p.K_s;
    return p;
}

struct PolicyMetrics {
    double sigma_I_sq = 0.0;
    double sigma_S_sq = 0.0;
    double group_delay = 0.0;
    double total_cost = 0.0;     // kappa sigma_I + sigma_S, normalized units
    double relative_cost = 0.0;  // total_cost / C*(kappa)
};

struct InventoryDecomposition {
    double sigma_I_sq_total = 0.0;
    double gd_outer = 0.0;
    double gd_blaschke = 0.0;
    double gd_singular = 0.0;
    double radial_term = 0.0;  // dr f_Q(1) = 2 sum k b_k
};

namespace detail {

/// (1/pi) * integral over [0, pi] of |z psi(z) - 1|^2 / |1 - z|^2, for
/// boundary values free of essential singularities.
template <typename F>
double sigma_I_sq_smooth(const F& psi) {
    const auto integrand = [&psi](double lambda) {
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        const double s = 2.0 * std::sin(0.5 * lambda);
        const complex_t top = z * psi(z) - 1.0;
        return std::norm(top) / (s * s);
    };
    const double rough = quad::gk15(integrand, 0.0, std::numbers::pi).value;
    const double tol = std::max(1e-12, 1e-11 * std::abs(rough));
    return quad::adaptive(integrand, 0.0, std::numbers::pi, tol) / std::numbers::pi;
}

/// Same energy integral when psi(z) = pref(z) * exp(R(z)) with R a singular
/// inner exponent carrying a simple pole at z = -1 (purely imaginary boundary
/// values). The oscillation near lambda = pi is tamed by the substitution
/// t = tan(lambda/2), under which the phase becomes asymptotically linear;
/// fixed oscillation-resolving panels then integrate the tail.
template <typename Pref>
double sigma_I_sq_singular(const Pref& pref, const Polynomial& en, const Polynomial& ed) {
    if (std::abs(ed(-1.0)) > 1e-9 * std::abs(ed(1.0)))
        throw NotSupported("singular exponent pole must sit at z = -1");
    // Deflate the (1+z) factor; a repeated pole would leave a root behind.
    std::vector<double> e2(ed.coeffs().size() - 1);
    double carry = ed.coeffs().back();
    for (std::size_t j = e2.size(); j-- > 0;) {
        e2[j] = carry;
        carry = ed.coeffs()[j] - carry;
    }
    const Polynomial ed_deflated{std::vector<double>(e2)};
    if (std::abs(ed_deflated(-1.0)) < 1e-9)
        throw NotSupported("only simple singular poles at z = -1 are handled");
    const auto exponent = [&en, &ed](complex_t z) { return en(z) / ed(z); };
    // Purely imaginary boundary values, sampled away from the pole.
    for (double lambda : {0.3, 1.0, 2.0, 2.8}) {
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        if (std::abs(exponent(z).real()) > 1e-8)
            throw NotSupported("singular exponent must be imaginary on the circle");
    }
    const auto psi = [&](complex_t z) { return pref(z) * std::exp(exponent(z)); };
    const auto integrand = [&psi](double lambda) {
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        const double s = 2.0 * std::sin(0.5 * lambda);
        return std::norm(z * psi(z) - 1.0) / (s * s);
    };
    const double cut = 0.75 * std::numbers::pi;
    double total = quad::adaptive(integrand, 0.0, cut, 1e-11);

    // Non-oscillatory part on [cut, pi]: |psi| = |pref| there.
    const auto smooth_part = [&pref](double lambda) {
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        const double s = 2.0 * std::sin(0.5 * lambda);
        return (1.0 + std::norm(pref(z))) / (s * s);
    };
    total += quad::adaptive(smooth_part, cut, std::numbers::pi, 1e-11);

    // Oscillatory cross term, mapped by t = tan(lambda/2):
    //   -2 Re(z psi) / (4 sin^2) dlambda  ->  -Re(z pref e^{i Im R}) / t^2 dt.
    const double slope = en(-1.0) / (2.0 * ed_deflated(-1.0));  // asymptotic phase slope in t
    const auto cross = [&](double t) {
        const double lambda = 2.0 * std::atan(t);
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        const complex_t phase = std::exp(complex_t(0.0, exponent(z).imag()));
        return -(z * pref(z) * phase).real() / (t * t);
    };
    const double t0 = std::tan(0.5 * cut);
    const double panel = std::min(0.5, std::numbers::pi / (4.0 * (1.0 + std::abs(slope))));
    double t_lo = t0, span = 64.0, cross_total = 0.0;
    int quiet = 0;
    while (quiet < 2) {
        const double inc = quad::composite(cross, t_lo, t_lo + span, panel);
        cross_total += inc;
        t_lo += span;
        span *= 2.0;
        quiet = std::abs(inc) < 1e-12 * std::max(1.0, std::abs(total)) ? quiet + 1 : 0;
        if (t_lo > 1e8) throw QuadratureNotConverged("singular cross term did not settle");
    }
    return (total + cross_total) / std::numbers::pi;
}

/// Mean over the circle of log|p(e^{-i lambda})|. On-circle roots are
/// deflated first; by Jensen's formula each contributes zero to the mean, so
/// the quadrature only ever sees a smooth integrand.
inline double mean_log_modulus(const Polynomial& p) {
    std::vector<complex_t> c(p.coeffs().begin(), p.coeffs().end());
    if (p.degree() >= 1) {
        for (const auto& r : p.roots()) {
            if (classify_modulus(std::abs(r)) != CircleClass::OnCircle) continue;
            std::vector<complex_t> q(c.size() - 1);
            q.back() = c.back();
            for (std::size_t j = q.size() - 1; j-- > 0;) q[j] = c[j + 1] + r * q[j + 1];
            c = std::move(q);
        }
    }
    const auto integrand = [&c](double lambda) {
        const complex_t z = std::exp(complex_t(0.0, -lambda));
        complex_t acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
        return std::log(std::abs(acc));
    };
    return quad::adaptive(integrand, 0.0, std::numbers::pi, 1e-12) / std::numbers::pi;
}

}  // namespace detail

/// Stationary inventory variance sigma_I^2 as the energy of (z psi - 1)/(1 - z).
inline double inventory_variance(const RationalTransfer& tf) {
    return detail::sigma_I_sq_smooth(tf);
}

inline double inventory_variance(const ExponentialTransfer& tf) {
    if (!tf.has_boundary_pole()) return detail::sigma_I_sq_smooth(tf);
    return detail::sigma_I_sq_singular(tf.prefactor(), tf.exponent_num(), tf.exponent_den());
}

/// Kolmogorov MSFE by direct log-spectral quadrature (route independent of the
/// outer shortcut); circle zeros are deflated and handled by Jensen's formula.
inline double supplier_msfe_quadrature(const RationalTransfer& tf) {
    const double mean_log =
        detail::mean_log_modulus(tf.numerator()) - detail::mean_log_modulus(tf.denominator());
    return std::exp(2.0 * mean_log);
}

/// Kolmogorov MSFE sigma_S^2 (unit shock variance). Invertible filters take
/// the outer shortcut psi(0)^2; otherwise the log integral is used.
inline double supplier_msfe(const RationalTransfer& tf) {
    if (tf.is_invertible()) {
        const double at0 = (tf(complex_t(0.0, 0.0))).real();
        return at0 * at0;
    }
    return supplier_msfe_quadrature(tf);
}

inline double supplier_msfe(const ExponentialTransfer& tf) {
    if (tf.has_boundary_pole()) {
        // The singular inner factor is all-pass: only the prefactor's spectrum
        // survives in the log integral.
        return supplier_msfe_quadrature(tf.prefactor());
    }
    // Exponent analytic across the circle: exp(R) is outer, and the whole
    // filter is outer whenever the prefactor is.
    if (tf.prefactor().is_invertible()) {
        const double at0 = tf(complex_t(0.0, 0.0)).real();
        return at0 * at0;
    }
    const auto mean_re = [&tf](double lambda) {
        return tf.exponent(std::exp(complex_t(0.0, -lambda))).real();
    };
    const double re_part = quad::adaptive(mean_re, 0.0, std::numbers::pi, 1e-12) / std::numbers::pi;
    return supplier_msfe_quadrature(tf.prefactor()) * std::exp(2.0 * re_part);
}

/// Optimal total cost C*(kappa): 1 + sqrt(kappa^2 - 1) in the MA(1) regime,
/// e^{-gamma}(3 + gamma) below it.
inline double optimal_cost(double kappa) {
    if (!(kappa > 0.0)) throw NonPositiveKappa("kappa must be positive");
    if (kappa >= kSqrt5) return 1.0 + std::sqrt(kappa * kappa - 1.0);
    const double gamma = solve_gamma(kappa).gamma;
    return std::exp(-gamma) * (3.0 + gamma);
}

template <typename Transfer>
PolicyMetrics policy_metrics(const Transfer& tf, double kappa) {
    PolicyMetrics m;
    m.sigma_I_sq = inventory_variance(tf);
    m.sigma_S_sq = supplier_msfe(tf);
    m.group_delay = group_delay(tf);
    m.total_cost = kappa * std::sqrt(m.sigma_I_sq) + std::sqrt(m.sigma_S_sq);
    m.relative_cost = m.total_cost / optimal_cost(kappa);
    return m;
}

struct DelayConstant {
    double c = 0.0;
    double identity_residual = 0.0;  // c - GD(Q) - 0.5 log sigma_S^2(Q)
};

/// The spectral constant c = (1/2pi) int cos/(1-cos) log|Q| dlambda for an
/// outer Q. The weight behaves like 2/lambda^2 at the origin where log|Q|
/// vanishes quadratically; a Taylor patch replaces the numerically hollow
/// region [0, lambda_min].
inline DelayConstant delay_constant(const RationalTransfer& outer_tf) {
    if (!outer_tf.is_invertible()) throw NotOuter("delay_constant requires an outer filter");
    // Quadratic coefficient of log|Q(e^{i lambda})| from the autocovariances:
    // G(lambda) = b0 + 2 sum b_k cos(k lambda), G(0) = 1, log|Q| = log(G)/2.
    std::size_t max_lag = 64;
    double c2 = 0.0, c4 = 0.0;
    for (;; max_lag *= 2) {
        const auto acvs = autocovariances(outer_tf, max_lag);
        double head2 = 0.0, tail2 = 0.0, head4 = 0.0, tail4 = 0.0;
        for (std::size_t k = 1; k <= max_lag; ++k) {
            const double k2 = static_cast<double>(k) * static_cast<double>(k);
            (k <= 3 * max_lag / 4 ? head2 : tail2) += k2 * acvs.b[k];
            (k <= 3 * max_lag / 4 ? head4 : tail4) += k2 * k2 * acvs.b[k];
        }
        const bool ok2 = std::abs(tail2) < 1e-12 * std::max(1.0, std::abs(head2));
        const bool ok4 = std::abs(tail4) < 1e-12 * std::max(1.0, std::abs(head4));
        if ((ok2 && ok4) || max_lag >= (1u << 15)) {
            // G = 1 + g2 lambda^2 + g4 lambda^4 + ..., log|Q| = log(G)/2.
            const double g2 = -(head2 + tail2);
            const double g4 = (head4 + tail4) / 12.0;
            c2 = 0.5 * g2;
            c4 = 0.5 * (g4 - 0.5 * g2 * g2);
            break;
        }
    }
    const double lambda_min = 1e-3;
    const auto integrand = [&outer_tf](double lambda) {
        const double w = std::cos(lambda) / (1.0 - std::cos(lambda));
        const complex_t v = outer_tf(std::exp(complex_t(0.0, lambda)));
        return w * std::log(std::abs(v));
    };
    // Outer filters may carry zeros at z = -1, making log|Q| log-singular at
    // lambda = pi; geometric panels toward the endpoint resolve it (the
    // integrand changes by about log 2 per panel), and the dropped final
    // sliver contributes only O(width * log width).
    const double cut = 2.8;
    double body = quad::adaptive(integrand, lambda_min, cut, 1e-11);
    for (double width = std::numbers::pi - cut; width > 1e-13; width *= 0.5)
        body += quad::adaptive(integrand, std::numbers::pi - width,
                               std::numbers::pi - 0.5 * width, 1e-12);
    // Hollow region [0, lambda_min]: substitute the matched model
    // log|Q| ~ A (1-cos) + B (1-cos)^2 (A = 2 c2, B = 4 c4 + c2/3), whose
    // weighted integrals are elementary: w (1-cos) = cos and
    // w (1-cos)^2 = cos (1-cos). The dropped remainder is O(lambda_min^5).
    const double A = 2.0 * c2;
    const double B = 4.0 * c4 + c2 / 3.0;
    const double s1 = std::sin(lambda_min);
    const double patch =
        A * s1 + B * (s1 - 0.5 * lambda_min - 0.25 * std::sin(2.0 * lambda_min));
    DelayConstant out;
    // The kernel is oriented so that c = GD(Q) + log(msfe)/2 exactly: the raw
    // integral of w log|Q| equals the negative of that combination.
    out.c = -(body + patch) / std::numbers::pi;
    out.identity_residual =
        out.c - group_delay(outer_tf) - 0.5 * std::log(supplier_msfe(outer_tf));
    return out;
}

/// Five-term inventory breakdown for psi = Q * B * S: total variance by an
/// independent quadrature plus the group delays of each factor and the radial
/// derivative dr f_Q(1) = 2 sum k b_k of the outer spectrum.
inline InventoryDecomposition inventory_decomposition(
    const RationalTransfer& outer, const std::optional<BlaschkeFactor>& blaschke,
    const std::optional<std::pair<Polynomial, Polynomial>>& singular_exponent) {
    InventoryDecomposition d;
    d.gd_outer = group_delay(outer);
    if (blaschke) d.gd_blaschke = group_delay(*blaschke);
    if (singular_exponent) {
        const auto& [en, ed] = *singular_exponent;
        const double ed1 = ed(1.0);
        d.gd_singular =
            (en.derivative()(1.0) * ed1 - en(1.0) * ed.derivative()(1.0)) / (ed1 * ed1);
    }

    std::size_t max_lag = 128;
    for (;; max_lag *= 2) {
        const auto acvs = autocovariances(outer, max_lag);
        double sum = 0.0, tail = 0.0;
        for (std::size_t k = 1; k <= max_lag; ++k) {
            const double term = static_cast<double>(k) * acvs.b[k];
            sum += term;
            if (k > 3 * max_lag / 4) tail += std::abs(term);
        }
        if (tail < 1e-10 || max_lag >= (1u << 16)) {
            if (tail >= 1e-10) throw TailNotConverged("radial derivative series tail too large");
            d.radial_term = 2.0 * sum;
            break;
        }
    }

    const auto pref = [&](complex_t z) {
        complex_t v = outer(z);
        if (blaschke) v *= (*blaschke)(z);
        return v;
    };
    if (singular_exponent) {
        d.sigma_I_sq_total = detail::sigma_I_sq_singular(pref, singular_exponent->first,
                                                         singular_exponent->second);
    } else {
        d.sigma_I_sq_total = detail::sigma_I_sq_smooth(pref);
    }
    return d;
}

}  // namespace ordelay
