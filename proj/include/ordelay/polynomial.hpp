#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ordelay/errors.hpp"

namespace ordelay {

using complex_t = std::complex<double>;

/// Real-coefficient polynomial, coeffs[j] multiplies z^j.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
        trim();
    }
    Polynomial(std::initializer_list<double> coeffs)
        : Polynomial(std::vector<double>(coeffs)) {}

    static Polynomial one() { return Polynomial({1.0}); }

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    complex_t operator()(complex_t z) const {
        complex_t acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }
    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t j = 1; j < coeffs_.size(); ++j)
            d[j - 1] = static_cast<double>(j) * coeffs_[j];
        return Polynomial(std::move(d));
    }

    Polynomial operator*(const Polynomial& rhs) const {
        std::vector<double> p(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j)
                p[i + j] += coeffs_[i] * rhs.coeffs_[j];
        return Polynomial(std::move(p));
    }

    Polynomial& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }

    /// (this)^n by repeated squaring on coefficient vectors.
    Polynomial pow(int n) const {
        Polynomial result = one();
        Polynomial base = *this;
        for (; n > 0; n >>= 1) {
            if (n & 1) result = result * base;
            if (n > 1) base = base * base;
        }
        return result;
    }

    /// Roots via the companion-matrix eigenvalue method.
    std::vector<complex_t> roots() const {
        const int n = degree();
        if (n <= 0) return {};
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
        const double lead = coeffs_[n];
        for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs_[i] / lead;
        for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
        std::vector<complex_t> rs(n);
        for (int i = 0; i < n; ++i) rs[i] = solver.eigenvalues()(i);
        return rs;
    }

private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    }
    std::vector<double> coeffs_;
};

/// Classification of a root modulus against the unit circle, with the
/// tolerance band treated as "on circle".
enum class CircleClass { Inside, OnCircle, Outside };

inline CircleClass classify_modulus(double modulus, double band = 1e-9) {
    if (modulus < 1.0 - band) return CircleClass::Inside;
    if (modulus > 1.0 + band) return CircleClass::Outside;
    return CircleClass::OnCircle;
}

}  // namespace ordelay
