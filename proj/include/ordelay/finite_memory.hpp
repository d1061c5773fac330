#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ordelay/errors.hpp"
#include "ordelay/metrics.hpp"
#include "ordelay/policy.hpp"
#include "ordelay/transfer.hpp"

namespace ordelay {

/// Best linear predictor of the next order from the last n+1 orders.
/// coefficients[k] multiplies O_{t-k}; the intercept absorbs the mean demand
/// (zero in the normalized units used here).
struct PredictorSolution {
    int n = 0;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double msfe = 0.0;
};

namespace detail {

/// Cholesky factorization of the symmetric Toeplitz matrix T_ij = b_|i-j|,
/// exploiting the geometric decay of b (lags below 1e-17 * b_0 are dropped,
/// giving a banded matrix). The diagonal pivots d_i = L_ii^2 are the
/// prediction-error sequence v_i = D_{i+1}/D_i of leading-minor ratios.
///
/// Plain elimination in natural order is used deliberately instead of the
/// Levinson or Schur fast recursions: their error grows with the product of
/// 1/(1 - k_j^2) over the reflection coefficients, which blows up for order
/// processes whose spectral density carries a high-order zero at z = -1.
/// Cholesky pivots are bounded below by the Kolmogorov one-step error, never
/// by the (astronomically small) minimum eigenvalue, so the factorization
/// stays accurate in double precision where the fast recursions lose
/// positivity.
struct BandCholesky {
    std::size_t rows = 0;
    std::size_t w = 0;                // bandwidth: L(i, j) stored for i-w <= j <= i
    std::vector<double> lower;        // row-major band, entry (i, j) at i*(w+1) + w-i+j
    std::vector<double> pivots;       // d_i = L_ii^2

    double at(std::size_t i, std::size_t j) const { return lower[i * (w + 1) + w - i + j]; }
};

inline BandCholesky band_cholesky(const std::vector<double>& b, std::size_t nrows) {
    if (b.empty() || b[0] <= 0.0) throw SingularToeplitz("nonpositive zero-lag autocovariance");
    if (b.size() < nrows) throw std::invalid_argument("not enough autocovariances");
    BandCholesky f;
    f.rows = nrows;
    std::size_t w = nrows - 1;
    while (w > 0 && std::abs(b[w]) < 1e-17 * b[0]) --w;
    f.w = w;
    f.lower.assign(nrows * (w + 1), 0.0);
    f.pivots.reserve(nrows);
    for (std::size_t i = 0; i < nrows; ++i) {
        const std::size_t jlo = i > w ? i - w : 0;
        for (std::size_t j = jlo; j <= i; ++j) {
            double acc = b[i - j];
            const std::size_t klo = std::max(jlo, j > w ? j - w : std::size_t{0});
            for (std::size_t k = klo; k < j; ++k) acc -= f.at(i, k) * f.at(j, k);
            if (j < i) {
                f.lower[i * (w + 1) + w - i + j] = acc / f.lower[j * (w + 1) + w];
            } else {
                if (!(acc > 0.0)) throw SingularToeplitz("Toeplitz pivot became nonpositive");
                f.pivots.push_back(acc);
                f.lower[i * (w + 1) + w] = std::sqrt(acc);
            }
        }
    }
    return f;
}

/// Prediction as least squares on the spectral factor: with f = |psi|^2 the
/// n-past error is min over monic A of ||A psi||^2 in l2, a banded
/// least-squares problem in the shifted copies of psi. Solving it by Givens
/// QR on the convolution matrix is backward stable *in psi*, i.e. the
/// computed error corresponds to a tiny relative perturbation of the
/// spectral density. That conditioning is decisive: the same quantity
/// computed from the autocovariances is destroyed by absolute perturbations
/// of size eps * b_0 whenever the predictor norm is large (spectral density
/// with a high-order zero at z = -1), which is exactly the regime the
/// complexity scans probe.
struct FactorLS {
    double msfe = 0.0;
    std::vector<double> coefficients;  // c_j multiplies the order lagged j+1
};

inline FactorLS factor_least_squares(const std::vector<double>& psi_in, std::size_t taps) {
    const std::size_t L = psi_in.size();
    if (L == 0 || taps == 0) throw std::invalid_argument("empty prediction design");
    // Extended precision keeps the rotation roundoff, which accumulates over
    // taps * L updates, below the answer even for the 10^4-tap scans.
    const std::vector<long double> psi(psi_in.begin(), psi_in.end());
    const std::size_t ncol = taps;
    const std::size_t w = L;  // R row j stores columns j .. j+w-1
    std::vector<long double> R(ncol * w, 0.0L);
    std::vector<long double> rhs(ncol, 0.0L);
    long double res2 = 0.0L;
    std::vector<long double> row(w, 0.0L);
    for (std::size_t t = 0; t < L + ncol; ++t) {
        // Design row t: column j holds psi_{t-1-j}; the target is psi_t.
        long double row_rhs = t < L ? psi[t] : 0.0L;
        if (t == 0) {
            res2 += row_rhs * row_rhs;  // no regressors reach the first sample
            continue;
        }
        const std::size_t jlo = t > L ? t - L : 0;
        const std::size_t jhi = std::min(ncol - 1, t - 1);
        if (jlo > jhi) {
            res2 += row_rhs * row_rhs;
            continue;
        }
        std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(jhi - jlo + 1), 0.0L);
        for (std::size_t j = jlo; j <= jhi; ++j) row[j - jlo] = psi[t - 1 - j];
        // Rotations against R rows jlo..jhi; the working row's support never
        // extends past column jhi (every R row populated so far ends there or
        // earlier), so a window of width L covers all fill-in.
        for (std::size_t j = jlo; j <= jhi; ++j) {
            const long double b = row[j - jlo];
            if (b == 0.0L) continue;
            long double& a = R[j * w];
            const long double r = std::sqrt(a * a + b * b);
            const long double c = a / r, s = b / r;
            a = r;
            row[j - jlo] = 0.0L;
            for (std::size_t k = j + 1; k <= jhi; ++k) {
                long double& u = R[j * w + (k - j)];
                long double& v = row[k - jlo];
                const long double nu = c * u + s * v;
                v = -s * u + c * v;
                u = nu;
            }
            const long double u = rhs[j];
            rhs[j] = c * u + s * row_rhs;
            row_rhs = -s * u + c * row_rhs;
        }
        res2 += row_rhs * row_rhs;
    }
    FactorLS out;
    out.msfe = static_cast<double>(res2);
    out.coefficients.assign(ncol, 0.0);
    std::vector<long double> coef(ncol, 0.0L);
    for (std::size_t jp = ncol; jp > 0; --jp) {
        const std::size_t j = jp - 1;
        const long double diag = R[j * w];
        if (diag == 0.0L) throw SingularToeplitz("rank-deficient prediction design");
        long double acc = rhs[j];
        const std::size_t khi = std::min(w - 1, ncol - 1 - j);
        for (std::size_t k = 1; k <= khi; ++k) acc -= R[j * w + k] * coef[j + k];
        coef[j] = acc / diag;
        out.coefficients[j] = static_cast<double>(coef[j]);
    }
    return out;
}

}  // namespace detail

inline PredictorSolution finite_past_msfe(const AutocovarianceSequence& acvs, int n) {
    if (n < 0) throw std::invalid_argument("memory length must be nonnegative");
    const std::size_t nn = static_cast<std::size_t>(n);
    // Factor the (n+2)-row Toeplitz: pivot n+1 is the prediction error from
    // n+1 past values, and the leading (n+1)-block solves the normal
    // equations T c = r with r = (b_1 .. b_{n+1}).
    const auto f = detail::band_cholesky(acvs.b, nn + 2);
    PredictorSolution sol;
    sol.n = n;
    sol.msfe = f.pivots[nn + 1];
    std::vector<double> y(nn + 1);
    for (std::size_t i = 0; i <= nn; ++i) {
        double acc = acvs.b[i + 1];
        const std::size_t klo = i > f.w ? i - f.w : 0;
        for (std::size_t k = klo; k < i; ++k) acc -= f.at(i, k) * y[k];
        y[i] = acc / f.at(i, i);
    }
    sol.coefficients.assign(nn + 1, 0.0);
    for (std::size_t jp = nn + 1; jp > 0; --jp) {
        const std::size_t j = jp - 1;
        double acc = y[j];
        const std::size_t ihi = std::min(nn, j + f.w);
        for (std::size_t i = j + 1; i <= ihi; ++i) acc -= f.at(i, j) * sol.coefficients[i];
        sol.coefficients[j] = acc / f.at(j, j);
    }
    return sol;
}

/// n-past prediction error of the order process induced by tf. Computed as
/// least squares on the impulse response (see factor_least_squares) so that
/// the result stays accurate for policies whose spectral density nearly
/// vanishes on the circle; agrees with the autocovariance route wherever the
/// latter is well conditioned. The truncation is doubled until the impulse
/// tail is negligible at the level of the least-squares residual.
template <typename Transfer>
PredictorSolution finite_past_msfe(const Transfer& tf, int n) {
    if (n < 0) throw std::invalid_argument("memory length must be nonnegative");
    constexpr std::size_t kMaxTerms = 1 << 22;
    std::vector<double> psi;
    for (std::size_t n_terms = 256;; n_terms *= 2) {
        psi = impulse_response(tf, n_terms);
        double tail = 0.0;
        for (std::size_t j = n_terms / 2; j < n_terms; ++j) tail += psi[j] * psi[j];
        if (tail < 1e-28) break;
        if (n_terms >= kMaxTerms)
            throw TailNotConverged("impulse-response tail mass did not fall below tolerance");
    }
    const auto ls = detail::factor_least_squares(psi, static_cast<std::size_t>(n) + 1);
    PredictorSolution sol;
    sol.n = n;
    sol.coefficients = ls.coefficients;
    sol.msfe = ls.msfe;
    return sol;
}

/// Ratio of consecutive Toeplitz determinants, computed stably as a Cholesky
/// pivot rather than via raw determinants; equals the prediction error with
/// memory n-1 (indexing aligned so n=1 returns the one-past error).
inline double toeplitz_determinant_ratio(const AutocovarianceSequence& acvs, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    return detail::band_cholesky(acvs.b, static_cast<std::size_t>(n) + 1).pivots.back();
}

/// Total supply-chain cost with the finite-memory MSFE in place of the
/// Kolmogorov MSFE, still measured against the infinite-memory optimum.
inline PolicyMetrics finite_memory_cost(double kappa, int m, int n) {
    const auto tf = arma_approx(kappa, m);
    PolicyMetrics metrics;
    metrics.sigma_I_sq = inventory_variance(tf);
    metrics.sigma_S_sq = finite_past_msfe(tf, n).msfe;
    metrics.group_delay = group_delay(tf);
    metrics.total_cost = kappa * std::sqrt(metrics.sigma_I_sq) + std::sqrt(metrics.sigma_S_sq);
    metrics.relative_cost = metrics.total_cost / optimal_cost(kappa);
    return metrics;
}

struct ComplexityScan {
    int m_star = 0;
    std::vector<double> cost_curve;  // total cost for m = 0..m_max
};

/// Sweeps policy complexity m at fixed supplier memory n. The curve exposes
/// the interior minimum where extra complexity starts to overfit the
/// supplier's finite window.
inline ComplexityScan optimal_complexity_scan(double kappa, int n, int m_max) {
    if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");
    ComplexityScan scan;
    scan.cost_curve.reserve(static_cast<std::size_t>(m_max) + 1);
    double best = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        const double cost = finite_memory_cost(kappa, m, n).total_cost;
        scan.cost_curve.push_back(cost);
        if (m == 0 || cost < best) {
            best = cost;
            scan.m_star = m;
        }
    }
    return scan;
}

}  // namespace ordelay
