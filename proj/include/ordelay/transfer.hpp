#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "ordelay/errors.hpp"
#include "ordelay/polynomial.hpp"

namespace ordelay {

inline constexpr double kUnitEvalTol = 1e-12;
inline constexpr double kCircleBand = 1e-9;

/// One repeated low-degree factor base(z)^power of a transfer function.
struct TransferFactor {
    Polynomial base;
    int power = 1;
};

/// Causal, stable rational transfer function num(z)/den(z) normalized to
/// value 1 at z = 1 (bounded-inventory condition).
///
/// A transfer may optionally carry a factored representation (products of
/// low-degree bases raised to powers). High-order policies built from
/// repeated factors are numerically intractable in expanded coefficient form
/// — evaluating the expanded polynomial near a high-multiplicity root loses
/// all significant digits, and the leading AR coefficient underflows — so
/// evaluation, impulse responses, delay, and root classification all prefer
/// the factored form when it is available. The expanded coefficients remain
/// exposed for reporting and for low-order recursions.
class RationalTransfer {
public:
    RationalTransfer(Polynomial numerator, Polynomial denominator,
                     std::optional<bool> known_invertible = std::nullopt,
                     bool check_stability = true)
        : num_(std::move(numerator)),
          den_(std::move(denominator)),
          known_invertible_(known_invertible) {
        const double at_one = num_(1.0) / den_(1.0);
        if (std::abs(at_one - 1.0) > kUnitEvalTol)
            throw std::invalid_argument("transfer function must equal 1 at z=1");
        if (check_stability) {
            for (const auto& r : den_.roots())
                if (classify_modulus(std::abs(r), kCircleBand) != CircleClass::Outside)
                    throw std::invalid_argument("denominator root inside or on the unit circle");
        }
    }

    /// Factored constructor: keeps the factor lists and also expands them;
    /// the expanded numerator is renormalized so num(1)/den(1) = 1 exactly.
    RationalTransfer(std::vector<TransferFactor> num_factors,
                     std::vector<TransferFactor> den_factors,
                     std::optional<bool> known_invertible = std::nullopt,
                     bool check_stability = true)
        : num_(Polynomial::one()),
          den_(Polynomial::one()),
          num_factors_(std::move(num_factors)),
          den_factors_(std::move(den_factors)),
          known_invertible_(known_invertible) {
        for (const auto& f : num_factors_) num_ = num_ * f.base.pow(f.power);
        for (const auto& f : den_factors_) den_ = den_ * f.base.pow(f.power);
        double log_at_one = 0.0;
        for (const auto& f : num_factors_) log_at_one += f.power * std::log(f.base(1.0));
        for (const auto& f : den_factors_) log_at_one -= f.power * std::log(f.base(1.0));
        if (std::abs(log_at_one) > 1e-9)
            throw std::invalid_argument("transfer function must equal 1 at z=1");
        num_ *= den_(1.0) / num_(1.0);
        if (check_stability) {
            for (const auto& f : den_factors_)
                for (const auto& r : f.base.roots())
                    if (classify_modulus(std::abs(r), kCircleBand) != CircleClass::Outside)
                        throw std::invalid_argument("denominator root inside or on the unit circle");
        }
    }

    static RationalTransfer identity() {
        return RationalTransfer(Polynomial({1.0}), Polynomial({1.0}), true, false);
    }

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    bool is_factored() const { return !num_factors_.empty() || !den_factors_.empty(); }
    const std::vector<TransferFactor>& num_factors() const { return num_factors_; }
    const std::vector<TransferFactor>& den_factors() const { return den_factors_; }

    complex_t operator()(complex_t z) const {
        if (is_factored()) {
            // log-sum-exp over factors: immune to under/overflow of the
            // individual powers; branch choices cancel inside exp.
            complex_t acc = 0.0;
            for (const auto& f : num_factors_) {
                const complex_t v = f.base(z);
                if (v == complex_t(0.0, 0.0)) return complex_t(0.0, 0.0);
                acc += static_cast<double>(f.power) * std::log(v);
            }
            for (const auto& f : den_factors_) {
                const complex_t v = f.base(z);
                if (std::abs(v) < 1e-300)
                    throw PoleOnEvaluationPoint("denominator vanishes at evaluation point");
                acc -= static_cast<double>(f.power) * std::log(v);
            }
            return std::exp(acc);
        }
        const complex_t d = den_(z);
        if (std::abs(d) < 1e-300) throw PoleOnEvaluationPoint("denominator vanishes at evaluation point");
        return num_(z) / d;
    }

    /// True iff all numerator roots lie outside the open unit disk, with
    /// on-circle roots allowed only at z = -1.
    bool is_invertible() const {
        if (!known_invertible_) known_invertible_ = compute_invertible();
        return *known_invertible_;
    }

    /// Spectral radius of the AR recursion (max 1/|root| over denominator roots).
    double ar_spectral_radius() const {
        double rho = 0.0;
        if (is_factored()) {
            for (const auto& f : den_factors_)
                for (const auto& r : f.base.roots()) rho = std::max(rho, 1.0 / std::abs(r));
            return rho;
        }
        for (const auto& r : den_.roots()) rho = std::max(rho, 1.0 / std::abs(r));
        return rho;
    }

private:
    bool roots_ok_for_inversion(const Polynomial& p) const {
        for (const auto& r : p.roots()) {
            switch (classify_modulus(std::abs(r), kCircleBand)) {
                case CircleClass::Inside:
                    return false;
                case CircleClass::OnCircle:
                    if (std::abs(r - complex_t(-1.0, 0.0)) > 1e-6) return false;
                    break;
                case CircleClass::Outside:
                    break;
            }
        }
        return true;
    }

    bool compute_invertible() const {
        if (is_factored()) {
            for (const auto& f : num_factors_)
                if (!roots_ok_for_inversion(f.base)) return false;
            return true;
        }
        return roots_ok_for_inversion(num_);
    }

    Polynomial num_;
    Polynomial den_;
    std::vector<TransferFactor> num_factors_;
    std::vector<TransferFactor> den_factors_;
    mutable std::optional<bool> known_invertible_;
};

/// psi(z) = prefactor(z) * exp(exponent_num(z)/exponent_den(z)), with
/// exponent(1) = 0 so psi(1) = prefactor(1) = 1. Poles of the exponent on
/// the unit circle mark singular boundary points.
class ExponentialTransfer {
public:
    ExponentialTransfer(RationalTransfer prefactor, Polynomial exponent_num,
                        Polynomial exponent_den)
        : prefactor_(std::move(prefactor)),
          exp_num_(std::move(exponent_num)),
          exp_den_(std::move(exponent_den)) {
        const double ed1 = exp_den_(1.0);
        if (std::abs(ed1) < 1e-300)
            throw std::invalid_argument("exponent has a pole at z=1");
        if (std::abs(exp_num_(1.0) / ed1) > kUnitEvalTol)
            throw std::invalid_argument("exponent must vanish at z=1");
        for (const auto& r : exp_den_.roots()) {
            switch (classify_modulus(std::abs(r), kCircleBand)) {
                case CircleClass::Inside:
                    throw std::invalid_argument("exponent pole inside the unit circle");
                case CircleClass::OnCircle:
                    boundary_poles_.push_back(r);
                    break;
                case CircleClass::Outside:
                    break;
            }
        }
    }

    const RationalTransfer& prefactor() const { return prefactor_; }
    const Polynomial& exponent_num() const { return exp_num_; }
    const Polynomial& exponent_den() const { return exp_den_; }
    bool has_boundary_pole() const { return !boundary_poles_.empty(); }
    const std::vector<complex_t>& boundary_poles() const { return boundary_poles_; }

    complex_t exponent(complex_t z) const {
        const complex_t d = exp_den_(z);
        if (std::abs(d) < 1e-300) throw PoleOnEvaluationPoint("exponent pole at evaluation point");
        return exp_num_(z) / d;
    }

    complex_t operator()(complex_t z) const { return prefactor_(z) * std::exp(exponent(z)); }

private:
    RationalTransfer prefactor_;
    Polynomial exp_num_;
    Polynomial exp_den_;
    std::vector<complex_t> boundary_poles_;
};

/// Finite Blaschke product, normalized so the product equals 1 at z = 1.
/// Complex zeros must come in conjugate pairs so coefficients stay real.
class BlaschkeFactor {
public:
    explicit BlaschkeFactor(std::vector<complex_t> zeros) : zeros_(std::move(zeros)) {
        for (const auto& a : zeros_)
            if (std::abs(a) >= 1.0) throw ZeroOnOrOutsideCircle("Blaschke zero must satisfy |a| < 1");
        check_conjugate_pairs();
    }

    const std::vector<complex_t>& zeros() const { return zeros_; }

    complex_t operator()(complex_t z) const {
        complex_t acc = 1.0;
        for (const auto& a : zeros_) acc *= (z - a) / (1.0 - std::conj(a) * z);
        return acc;
    }

private:
    void check_conjugate_pairs() const {
        std::vector<bool> used(zeros_.size(), false);
        for (std::size_t i = 0; i < zeros_.size(); ++i) {
            if (used[i] || std::abs(zeros_[i].imag()) < 1e-14) continue;
            bool matched = false;
            for (std::size_t j = i + 1; j < zeros_.size(); ++j) {
                if (!used[j] && std::abs(zeros_[j] - std::conj(zeros_[i])) < 1e-12) {
                    used[i] = used[j] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched)
                throw std::invalid_argument("complex Blaschke zeros must come in conjugate pairs");
        }
    }

    std::vector<complex_t> zeros_;
};

/// Uniform grid of boundary values psi(e^{-i lambda}) on [-pi, pi).
struct SpectralGrid {
    std::size_t n_points = 0;
    std::vector<double> lambdas;
    std::vector<complex_t> values;

    template <typename Transfer>
    static SpectralGrid sample(const Transfer& tf, std::size_t n_points) {
        SpectralGrid g;
        g.n_points = n_points;
        g.lambdas.resize(n_points);
        g.values.resize(n_points);
        for (std::size_t k = 0; k < n_points; ++k) {
            const double lambda =
                -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(n_points);
            g.lambdas[k] = lambda;
            g.values[k] = tf(std::exp(complex_t(0.0, -lambda)));
        }
        return g;
    }
};

namespace detail {

/// In-place iterative radix-2 FFT; inverse when sign = +1 (unnormalized).
inline void fft_radix2(std::vector<complex_t>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const complex_t wl = std::exp(complex_t(0.0, ang));
        for (std::size_t i = 0; i < n; i += len) {
            complex_t w = 1.0;
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complex_t u = a[i + j];
                const complex_t v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Taylor coefficients 0..n_terms-1 from unit-circle samples.
template <typename Transfer>
std::vector<double> taylor_by_circle_fft(const Transfer& tf, std::size_t n_terms,
                                         std::size_t n_grid) {
    std::vector<complex_t> samples(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        const double theta =
            2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_grid);
        samples[k] = tf(std::exp(complex_t(0.0, theta)));
    }
    fft_radix2(samples, -1);
    std::vector<double> coeffs(n_terms);
    for (std::size_t j = 0; j < n_terms; ++j)
        coeffs[j] = samples[j].real() / static_cast<double>(n_grid);
    return coeffs;
}

}  // namespace detail

template <typename Transfer>
complex_t evaluate(const Transfer& tf, complex_t z) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw std::invalid_argument("evaluation point outside the closed unit disk");
    return tf(z);
}

namespace detail {

inline void apply_ma_factor(std::vector<double>& psi, const std::vector<double>& c) {
    std::vector<double> out(psi.size(), 0.0);
    for (std::size_t n = 0; n < psi.size(); ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c.size() && j <= n; ++j) acc += c[j] * psi[n - j];
        out[n] = acc;
    }
    psi = std::move(out);
}

inline void apply_ar_factor(std::vector<double>& psi, const std::vector<double>& c) {
    for (std::size_t n = 0; n < psi.size(); ++n) {
        double acc = psi[n];
        for (std::size_t j = 1; j < c.size() && j <= n; ++j) acc -= c[j] * psi[n - j];
        psi[n] = acc / c[0];
    }
}

}  // namespace detail

/// First n_terms MA coefficients by long division through the AR recursion.
/// Factored transfers are processed as a cascade of low-degree stages, which
/// stays stable where the expanded recursion would divide by an underflowing
/// leading coefficient.
inline std::vector<double> impulse_response(const RationalTransfer& tf, std::size_t n_terms) {
    if (tf.is_factored()) {
        // Deconvolving through a high-multiplicity AR root amplifies roundoff
        // through the k^(p-1) rho^k transient (the true coefficients stay
        // bounded only by massive cancellation between the partial-fraction
        // modes). Past a modest total multiplicity, extract coefficients from
        // unit-circle samples instead, where evaluation is done in log space
        // and stays accurate pointwise.
        int ar_multiplicity = 0;
        for (const auto& f : tf.den_factors())
            if (f.base.degree() >= 1) ar_multiplicity += f.power;
        if (ar_multiplicity > 12) {
            std::size_t n_grid = 1 << 10;
            while (n_grid < 4 * n_terms) n_grid <<= 1;
            std::vector<double> coeffs = detail::taylor_by_circle_fft(tf, n_terms, n_grid);
            for (; n_grid < (1u << 22);) {
                n_grid <<= 1;
                const auto refined = detail::taylor_by_circle_fft(tf, n_terms, n_grid);
                double change = 0.0;
                for (std::size_t j = 0; j < n_terms; ++j)
                    change = std::max(change, std::abs(refined[j] - coeffs[j]));
                coeffs = refined;
                if (change < 1e-12) break;
            }
            return coeffs;
        }
        std::vector<double> psi(n_terms, 0.0);
        if (n_terms > 0) psi[0] = 1.0;
        for (const auto& f : tf.num_factors())
            for (int r = 0; r < f.power; ++r) detail::apply_ma_factor(psi, f.base.coeffs());
        for (const auto& f : tf.den_factors())
            for (int r = 0; r < f.power; ++r) detail::apply_ar_factor(psi, f.base.coeffs());
        return psi;
    }
    const auto& num = tf.numerator().coeffs();
    const auto& den = tf.denominator().coeffs();
    std::vector<double> psi(n_terms, 0.0);
    for (std::size_t n = 0; n < n_terms; ++n) {
        double acc = n < num.size() ? num[n] : 0.0;
        const std::size_t jmax = std::min(n, den.size() - 1);
        for (std::size_t j = 1; j <= jmax; ++j) acc -= den[j] * psi[n - j];
        psi[n] = acc / den[0];
    }
    return psi;
}

/// MA coefficients of an exponential transfer by FFT on the unit circle.
/// Valid only when the exponent has no circle pole, i.e. the function is
/// analytic on the closed disk; the grid is doubled until the coefficients
/// settle below 1e-10.
inline std::vector<double> impulse_response(const ExponentialTransfer& tf, std::size_t n_terms) {
    if (tf.has_boundary_pole())
        throw BoundaryPole("coefficients not extractable by circle FFT; exponent has a circle pole");
    std::size_t n_grid = 1 << 14;
    while (n_grid < 4 * n_terms) n_grid <<= 1;
    std::vector<double> coeffs = detail::taylor_by_circle_fft(tf, n_terms, n_grid);
    for (; n_grid < (1u << 20);) {
        n_grid <<= 1;
        const auto refined = detail::taylor_by_circle_fft(tf, n_terms, n_grid);
        double change = 0.0;
        for (std::size_t j = 0; j < n_terms; ++j)
            change = std::max(change, std::abs(refined[j] - coeffs[j]));
        coeffs = refined;
        if (change < 1e-10) break;
    }
    return coeffs;
}

/// Group delay GD(psi) = psi'(1), evaluated as the logarithmic derivative
/// at z = 1 (psi(1) = 1).
inline double group_delay(const RationalTransfer& tf) {
    if (tf.is_factored()) {
        double acc = 0.0;
        for (const auto& f : tf.num_factors())
            acc += f.power * f.base.derivative()(1.0) / f.base(1.0);
        for (const auto& f : tf.den_factors())
            acc -= f.power * f.base.derivative()(1.0) / f.base(1.0);
        return acc;
    }
    const auto& num = tf.numerator();
    const auto& den = tf.denominator();
    return num.derivative()(1.0) / num(1.0) - den.derivative()(1.0) / den(1.0);
}

inline double group_delay(const ExponentialTransfer& tf) {
    const auto& en = tf.exponent_num();
    const auto& ed = tf.exponent_den();
    const double ed1 = ed(1.0);
    const double exponent_deriv = (en.derivative()(1.0) * ed1 - en(1.0) * ed.derivative()(1.0)) / (ed1 * ed1);
    return group_delay(tf.prefactor()) + exponent_deriv;
}

inline double group_delay(const BlaschkeFactor& b) {
    // d/dz log[(z-a)/(1-conj(a)z)] at z=1: 1/(1-a) + conj(a)/(1-conj(a)).
    complex_t acc = 0.0;
    for (const auto& a : b.zeros()) acc += 1.0 / (1.0 - a) + std::conj(a) / (1.0 - std::conj(a));
    return acc.real();
}

struct AutocovarianceSequence {
    std::vector<double> b;  // b[k] = lag-k autocovariance, unit shock variance
};

namespace detail {

inline AutocovarianceSequence acvs_from_coeffs(const std::vector<double>& psi,
                                               std::size_t max_lag) {
    AutocovarianceSequence acvs;
    acvs.b.assign(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0, comp = 0.0;
        for (std::size_t j = 0; j + k < psi.size(); ++j) {
            const double term = psi[j] * psi[j + k] - comp;
            const double t = s + term;
            comp = (t - s) - term;
            s = t;
        }
        acvs.b[k] = s;
    }
    return acvs;
}

}  // namespace detail

/// Autocovariances b_k = sum_j psi_j psi_{j+k} of the order process, with the
/// impulse-response truncation doubled until the squared tail mass is below
/// 1e-12.
template <typename Transfer>
AutocovarianceSequence autocovariances(const Transfer& tf, std::size_t max_lag,
                                       std::size_t n_terms = 256) {
    constexpr std::size_t kMaxTerms = 1 << 22;
    for (;; n_terms *= 2) {
        const auto psi = impulse_response(tf, n_terms);
        double tail = 0.0;
        for (std::size_t j = n_terms / 2; j < n_terms; ++j) tail += psi[j] * psi[j];
        if (tail < 1e-12) return detail::acvs_from_coeffs(psi, max_lag);
        if (n_terms >= kMaxTerms)
            throw TailNotConverged("impulse-response tail mass did not fall below tolerance");
    }
}

/// Rational form of a finite Blaschke product, unit modulus on the circle.
/// A single real zero a maps to (z-a)/(1-az).
inline RationalTransfer blaschke_to_rational(const BlaschkeFactor& b) {
    Polynomial num = Polynomial::one();
    Polynomial den = Polynomial::one();
    std::vector<bool> used(b.zeros().size(), false);
    const auto& zeros = b.zeros();
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (used[i]) continue;
        const complex_t a = zeros[i];
        if (std::abs(a.imag()) < 1e-14) {
            num = num * Polynomial({-a.real(), 1.0});
            den = den * Polynomial({1.0, -a.real()});
        } else {
            for (std::size_t j = i + 1; j < zeros.size(); ++j) {
                if (!used[j] && std::abs(zeros[j] - std::conj(a)) < 1e-12) {
                    used[j] = true;
                    break;
                }
            }
            const double re2 = 2.0 * a.real();
            const double m2 = std::norm(a);
            num = num * Polynomial({m2, -re2, 1.0});
            den = den * Polynomial({1.0, -re2, m2});
        }
        used[i] = true;
    }
    return RationalTransfer(std::move(num), std::move(den), false, false);
}

}  // namespace ordelay
