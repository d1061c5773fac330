#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ordelay/ordelay.hpp"

namespace testutil {

using ordelay::complex_t;
using ordelay::Polynomial;
using ordelay::RationalTransfer;

/// Real-coefficient polynomial with the given roots; complex roots are taken
/// to stand for a conjugate pair and expanded as one real quadratic.
inline Polynomial poly_from_roots(const std::vector<complex_t>& roots) {
    Polynomial p = Polynomial::one();
    for (const auto& r : roots) {
        if (std::abs(r.imag()) < 1e-14) {
            p = p * Polynomial({-r.real(), 1.0});
        } else {
            p = p * Polynomial({std::norm(r), -2.0 * r.real(), 1.0});
        }
    }
    return p;
}

/// Random roots of modulus in [1.1, 5]; roughly half are conjugate pairs.
inline std::vector<complex_t> random_outside_roots(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> mod(1.1, 5.0);
    std::uniform_real_distribution<double> ang(0.15, 3.0);
    std::bernoulli_distribution is_pair(0.5);
    std::bernoulli_distribution neg(0.5);
    std::vector<complex_t> roots;
    for (int i = 0; i < count; ++i) {
        const double r = mod(rng);
        if (is_pair(rng)) {
            roots.push_back(r * std::exp(complex_t(0.0, ang(rng))));
        } else {
            roots.push_back(complex_t(neg(rng) ? -r : r, 0.0));
        }
    }
    return roots;
}

/// Random invertible (outer) rational transfer: all numerator and denominator
/// roots strictly outside the unit circle, normalized to value 1 at z = 1.
inline RationalTransfer random_outer(std::mt19937_64& rng, int max_ma_deg = 4,
                                     int max_ar_deg = 2) {
    std::uniform_int_distribution<int> ma_deg(0, max_ma_deg);
    std::uniform_int_distribution<int> ar_deg(0, max_ar_deg);
    Polynomial num = poly_from_roots(random_outside_roots(rng, ma_deg(rng)));
    Polynomial den = poly_from_roots(random_outside_roots(rng, ar_deg(rng)));
    num *= den(1.0) / num(1.0);
    return RationalTransfer(std::move(num), std::move(den));
}

/// Random Blaschke zeros strictly inside the disk (conjugate pairs allowed).
inline std::vector<complex_t> random_blaschke_zeros(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> mod(0.05, 0.7);
    std::uniform_real_distribution<double> ang(0.15, 3.0);
    std::bernoulli_distribution is_pair(0.5);
    std::bernoulli_distribution neg(0.5);
    std::vector<complex_t> zeros;
    for (int i = 0; i < count; ++i) {
        const double r = mod(rng);
        if (is_pair(rng)) {
            const complex_t a = r * std::exp(complex_t(0.0, ang(rng)));
            zeros.push_back(a);
            zeros.push_back(std::conj(a));
        } else {
            zeros.push_back(complex_t(neg(rng) ? -r : r, 0.0));
        }
    }
    return zeros;
}

/// Product of two rational transfers in expanded form (invertibility unknown).
inline RationalTransfer product(const RationalTransfer& a, const RationalTransfer& b) {
    return RationalTransfer(a.numerator() * b.numerator(),
                            a.denominator() * b.denominator(), std::nullopt,
                            /*check_stability=*/false);
}

/// One-sided finite-difference derivative at z = 1 along the real axis with
/// one Richardson extrapolation step; error O(h^2).
template <typename Transfer>
double fd_group_delay(const Transfer& tf, double h = 1e-4) {
    const auto d = [&tf](double step) {
        return (1.0 - tf(complex_t(1.0 - step, 0.0)).real()) / step;
    };
    return 2.0 * d(0.5 * h) - d(h);
}

/// Independent series route to the inventory variance for filters with an
/// absolutely summable impulse response: 1 + sum_k (1 - Psi_k)^2 with Psi_k
/// the partial sums of the impulse response.
inline double inventory_variance_series(const RationalTransfer& tf, std::size_t n_terms = 8192) {
    const auto psi = ordelay::impulse_response(tf, n_terms);
    double partial = 0.0, acc = 1.0;
    for (double c : psi) {
        partial += c;
        acc += (1.0 - partial) * (1.0 - partial);
    }
    return acc;
}

/// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(std::abs(ys[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testutil
