#pragma once

#include <vector>

#include "dqa/solver.hpp"

namespace dqa {

// Stationary marginals of the queue order statistics and the inventory tail
// distribution, in closed form from the cutoffs and boundary masses.
struct StationaryDistribution {
    Thresholds thr;
    std::vector<double> p0;      // P_k(0), k = 1..k_star+1; last entry is 1
    std::vector<double> q_tail;  // Q_l, l = 1..l_star+1; last entry is 0
    double delta_kstar = 1.0;    // telescoping product of the continuity recursion
    std::vector<double> w_factors;  // W_0..W_{l_star}

    double p1_0() const { return p0.front(); }
    double q1() const { return q_tail.front(); }
    // P_k(0) with P_k = 1 beyond k_star; k >= 1
    double p_k0(int k) const {
        return k <= thr.k_star ? p0[k - 1] : 1.0;
    }
    // Q_l with Q_0 := P_1(0) and Q_l = 0 beyond l_star
    double q_l(int l) const {
        if (l <= 0) return p1_0();
        return l <= thr.l_star ? q_tail[l - 1] : 0.0;
    }
};

StationaryDistribution solve_stationary(const ValueDistribution& dist, const MarketParams& params,
                                        const Thresholds& thr);

// P_k(v) for 1 <= k <= k_star+1; throws RankOutOfRange otherwise.
double marginal_cdf(const StationaryDistribution& sd, const ValueDistribution& dist,
                    const MarketParams& params, int k, double v);

struct BalanceRow {
    int rank;        // k > 0 buyer side, k = -l inventory side
    double v;        // probe (cutoff value for inventory rows)
    double lhs;      // arrival-side flow
    double rhs;      // service-side flow
    bool binding;
    double violation;
};

struct BalanceReport {
    std::vector<BalanceRow> rows;
    double max_violation = 0.0;
    bool pass = true;
};

// Flow balance of the closed-form marginals: equalities on the binding
// ranges, one-sided slack elsewhere, tolerance 1e-9.
BalanceReport verify_balance(const StationaryDistribution& sd, const ValueDistribution& dist,
                             const MarketParams& params, const std::vector<double>& probes);

double mean_queue_length(const StationaryDistribution& sd);
double mean_inventory(const StationaryDistribution& sd);

// 512 uniform points plus every cutoff nudged 1e-9 to both sides.
std::vector<double> default_probe_grid(const Thresholds& thr, int n = 512);

}  // namespace dqa
