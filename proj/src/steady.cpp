#include "dqa/steady.hpp"

#include <algorithm>
#include <cmath>

#include "dqa/numerics.hpp"

namespace dqa {

StationaryDistribution solve_stationary(const ValueDistribution& dist, const MarketParams& params,
                                        const Thresholds& thr) {
    StationaryDistribution sd;
    sd.thr = thr;

    // Delta_{K*}: product of geometric-sum ratios at the buyer cutoffs
    double delta = 1.0;
    for (int k = 1; k <= thr.k_star; ++k) {
        const double rho = params.rho(dist, thr.v_hat[k - 1]);
        delta *= geom_sum(rho, k) / geom_sum(rho, k + 1);
    }
    sd.delta_kstar = delta;

    // W_l: nested sigma products at the inventory cutoffs
    sd.w_factors.assign(thr.l_star + 1, 1.0);
    double prod = 1.0;
    for (int l = 1; l <= thr.l_star; ++l) {
        prod *= 1.0 / params.rho(dist, thr.v_hat_minus[l - 1]);  // sigma = 1/rho
        sd.w_factors[l] = sd.w_factors[l - 1] + prod;
    }
    const double W = sd.w_factors.back();

    // 2x2 system of the boundary identities:
    //   P_1(0) - Q_1 = (1 - Q_1) Delta,   (W - 1) P_1(0) = W Q_1
    const double denom = 1.0 + delta * (W - 1.0);
    const double p1 = delta * W / denom;
    const double q1 = delta * (W - 1.0) / denom;

    // Q_l = P_1(0) - W_{l-1} (P_1(0) - Q_1), l = 1..l_star+1; the last entry
    // vanishes by construction of W_{L*}
    sd.q_tail.assign(thr.l_star + 1, 0.0);
    for (int l = 1; l <= thr.l_star; ++l)
        sd.q_tail[l - 1] = std::max(0.0, p1 - sd.w_factors[l - 1] * (p1 - q1));

    // Boundary masses downward from P_{K*+1}(0) = 1 via the no-atom recursion
    sd.p0.assign(thr.k_star + 1, 1.0);
    for (int i = thr.k_star; i >= 1; --i) {
        const double rho = params.rho(dist, thr.v_hat[i - 1]);
        sd.p0[i - 1] = q1 + (sd.p0[i] - q1) * geom_sum(rho, i) / geom_sum(rho, i + 1);
    }
    return sd;
}

namespace {

// P_k(v) with the convention P_k = 1 beyond k_star+1; no rank checking.
double eval_marginal(const StationaryDistribution& sd, const ValueDistribution& dist,
                     const MarketParams& params, int k, double v) {
    const Thresholds& thr = sd.thr;
    if (k > thr.k_star) return 1.0;
    if (v < thr.v_hat[k - 1]) return sd.p0[k - 1];
    const int i = thr.regime_index(v);
    const double rho = params.rho(dist, v);
    const double q1 = sd.q1();
    const double p1v = q1 + (sd.p0[i] - q1) / geom_sum(rho, i + 1);
    return q1 + geom_sum(rho, k) * (p1v - q1);
}

}  // namespace

double marginal_cdf(const StationaryDistribution& sd, const ValueDistribution& dist,
                    const MarketParams& params, int k, double v) {
    if (k < 1 || k > sd.thr.k_star + 1)
        throw RankOutOfRange("marginal_cdf rank " + std::to_string(k));
    return eval_marginal(sd, dist, params, k, v);
}

BalanceReport verify_balance(const StationaryDistribution& sd, const ValueDistribution& dist,
                             const MarketParams& params, const std::vector<double>& probes) {
    BalanceReport rep;
    const Thresholds& thr = sd.thr;
    constexpr double tol = 1e-9;

    for (int k = 1; k <= thr.k_star + 2; ++k) {
        for (double v : probes) {
            const double pk = eval_marginal(sd, dist, params, k, v);
            const double pkm1 = k >= 2 ? eval_marginal(sd, dist, params, k - 1, v) : sd.q1();
            const double pkp1 = eval_marginal(sd, dist, params, k + 1, v);
            const double lhs = params.lambda * (1.0 - dist.cdf(v)) * (pk - pkm1);
            const double rhs = params.mu * (pkp1 - pk);
            const bool binding = k <= thr.k_star && v >= thr.v_hat[k - 1];
            const double viol = binding ? std::abs(lhs - rhs) : std::max(0.0, rhs - lhs);
            rep.rows.push_back({k, v, lhs, rhs, binding, viol});
            rep.max_violation = std::max(rep.max_violation, viol);
        }
    }
    for (int l = 1; l <= thr.l_star; ++l) {
        const double vl = thr.v_hat_minus[l - 1];
        const double lhs = params.lambda * (1.0 - dist.cdf(vl)) * (sd.q_l(l) - sd.q_l(l + 1));
        const double rhs = params.mu * (sd.q_l(l - 1) - sd.q_l(l));
        const double viol = std::abs(lhs - rhs);
        rep.rows.push_back({-l, vl, lhs, rhs, true, viol});
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

double mean_queue_length(const StationaryDistribution& sd) {
    double total = 0.0;
    for (int k = 1; k <= sd.thr.k_star; ++k) total += k * (sd.p_k0(k + 1) - sd.p_k0(k));
    return total;
}

double mean_inventory(const StationaryDistribution& sd) {
    double total = 0.0;
    for (int l = 1; l <= sd.thr.l_star; ++l) total += l * (sd.q_l(l) - sd.q_l(l + 1));
    return total;
}

std::vector<double> default_probe_grid(const Thresholds& thr, int n) {
    std::vector<double> grid;
    grid.reserve(n + 4 * (thr.k_star + thr.l_star));
    for (int i = 0; i < n; ++i) grid.push_back(static_cast<double>(i) / (n - 1));
    auto add = [&grid](double v) {
        if (v > 1e-9) grid.push_back(v - 1e-9);
        grid.push_back(v);
        if (v < 1.0 - 1e-9) grid.push_back(v + 1e-9);
    };
    for (double v : thr.v_hat) add(v);
    for (double v : thr.v_hat_minus) add(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace dqa
