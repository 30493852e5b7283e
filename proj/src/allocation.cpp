#include "dqa/allocation.hpp"

#include <algorithm>
#include <cmath>

#include "dqa/numerics.hpp"

namespace dqa {

double conditional_win_prob(double rho, int k, int i) {
    if (k <= 0) return 1.0;
    if (k >= i + 1) return 0.0;
    if (std::abs(rho - 1.0) <= 1e-6) return static_cast<double>(i + 1 - k) / (i + 1);
    return (std::pow(rho, i - k + 1) - 1.0) / (std::pow(rho, i + 1) - 1.0);
}

double interim_allocation(const StationaryDistribution& sd, const ValueDistribution& dist,
                          const MarketParams& params, double v) {
    const Thresholds& thr = sd.thr;
    const int i = thr.regime_index(v);
    if (i >= 1) {
        const double rho = params.rho(dist, v);
        double factor;
        if (std::abs(rho - 1.0) <= 1e-6) {
            factor = static_cast<double>(i) / (2.0 * (i + 1));
        } else {
            const double ri = std::pow(rho, i);
            factor = (i * (rho * ri - ri) + 1.0 - ri) / ((1.0 - rho * ri) * (1.0 - rho * ri));
        }
        return sd.q1() + (sd.p_k0(i + 1) - sd.q1()) * factor;
    }
    // below the first buyer cutoff: posted inventory regimes
    for (int l = 1; l <= thr.l_star; ++l) {
        if (v >= thr.v_hat_minus[l - 1]) return sd.q_l(l);
    }
    return 0.0;
}

namespace {

std::vector<double> regime_breakpoints(const Thresholds& thr) {
    std::vector<double> pts;
    pts.push_back(0.0);
    for (int l = thr.l_star; l >= 1; --l) pts.push_back(thr.v_hat_minus[l - 1]);
    for (int k = 1; k <= thr.k_star; ++k) pts.push_back(thr.v_hat[k - 1]);
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

InterimMechanism make_mechanism(const StationaryDistribution& sd, const ValueDistribution& dist,
                                const MarketParams& params, int grid_n) {
    InterimMechanism mech{sd, dist, params, {}, {}, {}};
    auto& grid = mech.grid;
    grid.reserve(grid_n + 4 * (sd.thr.k_star + sd.thr.l_star));
    for (int i = 0; i < grid_n; ++i) grid.push_back(static_cast<double>(i) / (grid_n - 1));
    for (double v : regime_breakpoints(sd.thr)) {
        grid.push_back(v);
        // X* jumps at inventory cutoffs; straddle them so the trapezoid stays exact
        if (v > 1e-12) grid.push_back(v - 1e-12);
        if (v < 1.0 - 1e-12) grid.push_back(v + 1e-12);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    mech.xval.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        mech.xval[j] = interim_allocation(sd, dist, params, grid[j]);

    mech.cum.assign(grid.size(), 0.0);
    for (std::size_t j = 1; j < grid.size(); ++j)
        mech.cum[j] =
            mech.cum[j - 1] + 0.5 * (mech.xval[j] + mech.xval[j - 1]) * (grid[j] - grid[j - 1]);
    return mech;
}

double InterimMechanism::allocation(double v) const {
    return interim_allocation(sd, dist, params, v);
}

double InterimMechanism::transfer(double v) const {
    const double x = allocation(v);
    if (v <= 0.0) return 0.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), v);
    const std::size_t j = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double partial = cum[j] + 0.5 * (xval[j] + x) * (v - grid[j]);
    return v * x - partial;
}

double objective_value(const ValueDistribution& dist, const MarketParams& params,
                       const StationaryDistribution& sd) {
    const std::vector<double> pts = regime_breakpoints(sd.thr);
    double surplus = 0.0;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        surplus += adaptive_simpson(
            [&](double v) {
                return dist.virtual_value(v, params.w) *
                       interim_allocation(sd, dist, params, v) * dist.pdf(v);
            },
            pts[s], pts[s + 1], 1e-10);
    }
    double obj = params.lambda * surplus - params.c * mean_queue_length(sd);
    if (!params.service_model()) obj -= params.d * mean_inventory(sd);
    return obj;
}

RfReport verify_rf_binding(const ValueDistribution& dist, const MarketParams& params,
                           const StationaryDistribution& sd, const std::vector<double>& probes) {
    RfReport rep;
    constexpr double tol = 1e-8;
    const Thresholds& thr = sd.thr;

    // suffix integrals of X* f over the regime segments
    const std::vector<double> pts = regime_breakpoints(thr);
    std::vector<double> seg(pts.size() - 1, 0.0);
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        seg[s] = adaptive_simpson(
            [&](double v) {
                return interim_allocation(sd, dist, params, v) * dist.pdf(v);
            },
            pts[s], pts[s + 1], 1e-11);
    }
    std::vector<double> suffix(pts.size(), 0.0);
    for (std::size_t s = pts.size() - 1; s-- > 0;) suffix[s] = suffix[s + 1] + seg[s];

    for (double v : probes) {
        const std::size_t s =
            static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), v) - pts.begin()) -
            1;
        const std::size_t seg_idx = std::min(s, pts.size() - 2);
        const double partial = adaptive_simpson(
            [&](double x) {
                return interim_allocation(sd, dist, params, x) * dist.pdf(x);
            },
            v, pts[seg_idx + 1], 1e-11);
        const double lhs = params.lambda * (partial + suffix[seg_idx + 1]);

        const double p1v = sd.thr.k_star >= 1
                               ? marginal_cdf(sd, dist, params, 1, v)
                               : 1.0;
        double rhs = params.mu * (1.0 - p1v);
        for (int l = 1; l <= thr.l_star; ++l) {
            const double ql = sd.q_l(l) - sd.q_l(l + 1);
            rhs += params.lambda * ql * (1.0 - dist.cdf(std::max(v, thr.v_hat_minus[l - 1])));
        }

        if (v >= thr.v_hat_zero) {
            rep.max_binding_violation = std::max(rep.max_binding_violation, std::abs(lhs - rhs));
        } else {
            rep.max_slack_violation = std::max(rep.max_slack_violation, lhs - rhs);
        }
    }
    rep.pass = rep.max_binding_violation <= tol && rep.max_slack_violation <= tol;
    return rep;
}

OracleBenchmark oracle_benchmark(const ValueDistribution& dist, const MarketParams& params) {
    const double rho = params.lambda / params.mu;
    double v_tilde = 0.0;
    if (rho * (1.0 - dist.cdf(0.0)) > 1.0) {
        v_tilde = bisect([&](double v) { return 1.0 - rho * (1.0 - dist.cdf(v)); }, 0.0, 1.0,
                         1e-12, -1);
    }
    OracleBenchmark ob;
    ob.v_tilde0 = std::max(v_tilde, dist.inverse_virtual(0.0, params.w));
    ob.r_star = rho * (1.0 - dist.cdf(ob.v_tilde0)) * ob.v_tilde0;
    return ob;
}

}  // namespace dqa
