#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace aerocov {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  ///< estimated absolute error
};

namespace detail {

// Gauss-Kronrod 7-15 nodes on [0,1]: {abscissa, gauss weight, kronrod weight}.
inline constexpr double kG7K15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0,               0.204432940075298},
    {0.586087235467691, 0.0,               0.169004726639267},
    {0.864864423359769, 0.0,               0.104790010322250},
    {0.991455371120813, 0.0,               0.022935322010529},
};

template <class F>
QuadratureResult g7k15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double lo_vals[8], hi_vals[8];
    lo_vals[0] = f(mid);
    hi_vals[0] = 0.0;  // center point has no mirror
    double g7 = kG7K15[0][1] * lo_vals[0];
    double k15 = kG7K15[0][2] * lo_vals[0];
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kG7K15[i][0];
        hi_vals[i] = f(mid + dx);
        lo_vals[i] = f(mid - dx);
        g7 += kG7K15[i][1] * (hi_vals[i] + lo_vals[i]);
        k15 += kG7K15[i][2] * (hi_vals[i] + lo_vals[i]);
    }
    g7 *= half;
    k15 *= half;

    // QUADPACK error model: the raw |G7-K15| difference is sharpened by a
    // 3/2 power, but only relative to the integrand's variation resasc --
    // otherwise large-magnitude integrals get absurdly inflated errors.
    const double mean = k15 / (b - a);
    double resasc = kG7K15[0][2] * std::abs(lo_vals[0] - mean);
    for (int i = 1; i < 8; ++i)
        resasc += kG7K15[i][2] *
                  (std::abs(hi_vals[i] - mean) + std::abs(lo_vals[i] - mean));
    resasc *= half;

    const double diff = std::abs(g7 - k15);
    double err = diff;
    if (resasc > 0.0 && diff > 0.0) {
        const double rel = 200.0 * diff / resasc;
        err = resasc * std::min(1.0, rel * std::sqrt(rel));
    }
    return {k15, err};
}

struct Interval {
    double a, b, value, error;
};

}  // namespace detail

/// Knot sequence lo = k_0 < ... < k_n = hi with interior knots at the multiples
/// of `spacing` below `cutoff`. Used to seed adaptive integration at known
/// integrand discontinuities; spacing <= 0 yields just {lo, hi}.
inline std::vector<double> uniform_knots(double lo, double hi, double spacing,
                                         double cutoff) {
    std::vector<double> knots{lo};
    if (spacing > 0.0) {
        const double stop = std::min(hi, cutoff);
        for (double r = (std::floor(lo / spacing) + 1.0) * spacing; r < stop;
             r += spacing)
            if (r > lo)
                knots.push_back(r);
    }
    knots.push_back(hi);
    return knots;
}

/// Adaptive Gauss-Kronrod integration over [knots.front(), knots.back()], with
/// the interval heap seeded at the given knots. Bisects the worst interval
/// until the summed error estimate meets max(abs_tol, rel_tol*|integral|);
/// throws IntegrationError past the subdivision budget.
template <class F>
QuadratureResult integrate_knots(const F& f, const std::vector<double>& knots,
                                 double rel_tol = 1e-6, double abs_tol = 1e-9,
                                 int max_intervals = 4000) {
    std::vector<detail::Interval> heap;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i + 1] > knots[i]))
            continue;
        const auto seg = detail::g7k15(f, knots[i], knots[i + 1]);
        heap.push_back({knots[i], knots[i + 1], seg.value, seg.error});
        total += seg.value;
        total_err += seg.error;
    }
    if (heap.empty())
        return {0.0, 0.0};

    auto worse = [](const detail::Interval& x, const detail::Interval& y) {
        return x.error < y.error;
    };
    std::make_heap(heap.begin(), heap.end(), worse);
    const int budget = std::max<int>(max_intervals, 2 * static_cast<int>(heap.size()));

    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= budget)
            throw IntegrationError("adaptive quadrature: interval budget exhausted");

        std::pop_heap(heap.begin(), heap.end(), worse);
        detail::Interval cur = heap.back();
        heap.pop_back();

        const double mid = 0.5 * (cur.a + cur.b);
        if (mid <= cur.a || mid >= cur.b)
            throw IntegrationError("adaptive quadrature: interval underflow");

        auto left = detail::g7k15(f, cur.a, mid);
        auto right = detail::g7k15(f, mid, cur.b);

        total += left.value + right.value - cur.value;
        total_err += left.error + right.error - cur.error;

        heap.push_back({cur.a, mid, left.value, left.error});
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back({mid, cur.b, right.value, right.error});
        std::push_heap(heap.begin(), heap.end(), worse);
    }
    return {total, total_err};
}

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double rel_tol = 1e-6,
                           double abs_tol = 1e-9, int max_intervals = 4000) {
    if (!(b > a))
        return {0.0, 0.0};
    return integrate_knots(f, {a, b}, rel_tol, abs_tol, max_intervals);
}

/// Integral of f over [a, +inf): octave segments [a+2^k*u, a+2^(k+1)*u] are
/// accumulated until a segment contributes below tolerance. The last-segment
/// bound is reported inside the error estimate. Known discontinuities at the
/// multiples of knot_spacing (below knot_cutoff) seed each segment's heap.
template <class F>
QuadratureResult integrate_semi_infinite(const F& f, double a, double rel_tol = 1e-6,
                                         double abs_tol = 1e-9, double unit = 100.0,
                                         int max_octaves = 64, double knot_spacing = 0.0,
                                         double knot_cutoff = 0.0) {
    QuadratureResult total{0.0, 0.0};
    double lo = a;
    double hi = a + unit;
    for (int k = 0; k < max_octaves; ++k) {
        auto seg = integrate_knots(f, uniform_knots(lo, hi, knot_spacing, knot_cutoff),
                                   rel_tol, abs_tol);
        total.value += seg.value;
        total.error += seg.error;
        const double tol = std::max(abs_tol, rel_tol * std::abs(total.value));
        if (std::abs(seg.value) < tol / 8.0 && k > 0) {
            total.error += std::abs(seg.value);  // tail bound proxy
            return total;
        }
        lo = hi;
        hi = a + (hi - a) * 2.0;
    }
    throw IntegrationError("semi-infinite quadrature: tail did not converge");
}

}  // namespace aerocov
