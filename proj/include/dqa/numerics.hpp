#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "dqa/errors.hpp"

namespace dqa {

namespace detail {

template <class F>
double simpson_step(F& f, std::size_t& evals, std::size_t max_evals, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    evals += 2;
    if (evals > max_evals)
        throw QuadratureFailure("adaptive Simpson exceeded evaluation budget");
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, evals, max_evals, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, evals, max_evals, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol = 1e-10,
                        std::size_t max_evals = 1000000) {
    if (a == b) return 0.0;
    std::size_t evals = 3;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, evals, max_evals, a, fa, b, fb, m, fm, whole, abs_tol, 52);
}

// Bisection for a monotone sign change on [lo, hi]. The bracket is trusted:
// sign(f) at lo and hi may be supplied by the caller through lo_negative when
// endpoint evaluation is undesirable (e.g. densities vanishing at 0).
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-12, int lo_sign = 0) {
    if (lo_sign == 0) {
        const double flo = f(lo);
        if (flo == 0.0) return lo;
        lo_sign = flo < 0.0 ? -1 : 1;
    }
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // ran out of precision
        const double fmid = f(mid);
        const int s = fmid < 0.0 ? -1 : (fmid > 0.0 ? 1 : 0);
        if (s == 0) return mid;
        if (s == lo_sign)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Finite geometric sum 1 + r + ... + r^(n-1), exact at r = 1.
inline double geom_sum(double r, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s = 1.0 + r * s;
    return s;
}

}  // namespace dqa
