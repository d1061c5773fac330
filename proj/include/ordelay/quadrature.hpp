#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ordelay/errors.hpp"

namespace ordelay {
namespace quad {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1]; all nodes are interior,
// so integrands with removable or integrable endpoint behavior are never
// evaluated at the endpoints.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

struct PanelResult {
    double value;
    double error;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double x = kXgk[j] * h;
        double fsum;
        if (j == 7) {
            fsum = f(c);
        } else {
            fsum = f(c - x) + f(c + x);
        }
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    const double value = resk * h;
    const double err = std::abs((resk - resg) * h);
    return {value, err};
}

/// Adaptive Gauss-Kronrod integration of f on [a, b] to a *global* absolute
/// tolerance: the panel with the largest error estimate is bisected until the
/// summed estimate drops below abs_tol (the usual globally adaptive strategy).
/// A per-panel local criterion is deliberately avoided -- it demands a fixed
/// error density everywhere, which integrands evaluated near their roundoff
/// floor can never meet on any subdivision.
template <typename F>
double adaptive(const F& f, double a, double b, double abs_tol = 1e-11,
                std::size_t max_panels = 20000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    const auto make = [&f](double x0, double x1) {
        const auto r = gk15(f, x0, x1);
        return Panel{x0, x1, r.value, r.error};
    };
    std::vector<Panel> heap{make(a, b)};
    double total_error = heap.front().error;
    while (total_error > abs_tol && heap.size() < max_panels) {
        std::pop_heap(heap.begin(), heap.end());
        const Panel p = heap.back();
        const double m = 0.5 * (p.a + p.b);
        if (!(p.a < m && m < p.b)) {  // width at the resolution limit
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        heap.pop_back();
        total_error -= p.error;
        for (const Panel& half : {make(p.a, m), make(m, p.b)}) {
            total_error += half.error;
            heap.push_back(half);
            std::push_heap(heap.begin(), heap.end());
        }
    }
    double value = 0.0, comp = 0.0;
    for (const Panel& p : heap) {  // compensated sum over panels
        const double term = p.value - comp;
        const double t = value + term;
        comp = (t - value) - term;
        value = t;
    }
    if (total_error > 64.0 * std::max(abs_tol, 1e-15 * std::abs(value)))
        throw QuadratureNotConverged("adaptive quadrature did not reach tolerance");
    return value;
}

/// Composite fixed-panel GK15 with panel width h; used for uniformly
/// oscillatory integrands where bisection-style adaptivity is wasteful.
template <typename F>
double composite(const F& f, double a, double b, double h) {
    double s = 0.0, comp = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / h));
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        const double x1 = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(n);
        const double term = gk15(f, x0, x1).value - comp;
        const double t = s + term;
        comp = (t - s) - term;
        s = t;
    }
    return s;
}

}  // namespace quad
}  // namespace ordelay
