#include "dqa/valuedist.hpp"

#include <cmath>
#include <limits>

#include "dqa/numerics.hpp"

namespace dqa {

double ValueDistribution::virtual_value(double v, double w) const {
    if (w >= 1.0) return v;
    return v - (1.0 - w) * (1.0 - cdf(v)) / pdf(v);
}

double ValueDistribution::virtual_value_deriv(double v, double w) const {
    if (w >= 1.0) return 1.0;
    const double f = pdf(v);
    const double fp = pdf_deriv(v);
    const double tail = 1.0 - cdf(v);
    return 1.0 + (1.0 - w) * (f * f + tail * fp) / (f * f);
}

double ValueDistribution::inverse_virtual(double x, double w) const {
    if (x >= 1.0) return 1.0;
    // J_w(0) <= 0 <= x is not required: for x < J_w(0) the bisection collapses
    // to 0, which is the correct clipped preimage on [0,1].
    return bisect([&](double v) { return virtual_value(v, w) - x; }, 0.0, 1.0, 1e-12, -1);
}

double ValueDistribution::quantile(double u) const {
    if (inv_cdf) return inv_cdf(u);
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return bisect([&](double v) { return cdf(v) - u; }, 0.0, 1.0, 1e-12, -1);
}

ValueDistribution uniform_distribution() {
    ValueDistribution d;
    d.cdf = [](double v) { return v; };
    d.pdf = [](double) { return 1.0; };
    d.pdf_deriv = [](double) { return 0.0; };
    d.inv_cdf = [](double u) { return u; };
    d.name = "uniform";
    return d;
}

ValueDistribution power_distribution_unchecked(double a) {
    ValueDistribution d;
    d.cdf = [a](double v) { return std::pow(v, a); };
    d.pdf = [a](double v) { return a * std::pow(v, a - 1.0); };
    d.pdf_deriv = [a](double v) { return a * (a - 1.0) * std::pow(v, a - 2.0); };
    d.inv_cdf = [a](double u) { return std::pow(u, 1.0 / a); };
    d.name = "power(" + std::to_string(a) + ")";
    return d;
}

ValueDistribution power_distribution(double a) {
    if (!(a > 0.0)) throw RegularityViolation("power family needs a > 0");
    ValueDistribution d = power_distribution_unchecked(a);
    RegularityReport rep = validate_regularity(d, 1001);
    if (!rep.regular())
        throw RegularityViolation("power(" + std::to_string(a) + ") fails regularity");
    return d;
}

RegularityReport validate_regularity(const ValueDistribution& dist, int grid_n) {
    if (grid_n < 3) throw InsufficientGrid("validation grid needs at least 3 points");
    RegularityReport rep;
    rep.j_monotone = true;
    rep.pdf_positive = true;
    rep.hazard_monotone = true;

    const double h = 1.0 / (grid_n - 1);
    double prev_j = -std::numeric_limits<double>::infinity();
    double prev_hazard = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        const double v = i * h;
        const double f = dist.pdf(v);
        if (v > 0.0 && v < 1.0 && !(f > 0.0)) rep.pdf_positive = false;
        const double j = dist.virtual_value(v);
        if (i > 0 && !(j > prev_j)) rep.j_monotone = false;
        const double hazard = (1.0 - dist.cdf(v)) / f;
        if (i > 0 && hazard > prev_hazard + 1e-12) rep.hazard_monotone = false;
        prev_j = j;
        prev_hazard = hazard;
        if (i == 0) rep.j0_negative = (j < 0.0);
    }
    return rep;
}

}  // namespace dqa
