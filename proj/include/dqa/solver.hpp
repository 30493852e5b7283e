#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dqa/valuedist.hpp"

namespace dqa {

struct MarketParams {
    double lambda = 1.0;  // buyer arrival rate
    double mu = 1.0;      // item arrival rate
    double c = 0.1;       // waiting cost flow per queued buyer
    double d = std::numeric_limits<double>::infinity();  // holding cost flow per stored item
    double w = 0.0;       // Pareto weight on buyer surplus, in [0,1]

    bool service_model() const { return std::isinf(d); }
    // rho(v) = lambda [1-F(v)] / mu
    double rho(const ValueDistribution& dist, double v) const {
        return lambda * (1.0 - dist.cdf(v)) / mu;
    }
    void validate() const;
};

// Ordered cutoffs of the optimal policy. Buyer side: v_hat[k-1] = cutoff for
// queue rank k, k = 1..k_star. Inventory side: v_hat_minus[l-1] = posted price
// with l units stored, l = 1..l_star, with gamma[l-1] = J_w(v_hat_minus[l-1]).
struct Thresholds {
    int k_star = 0;
    int l_star = 0;
    std::vector<double> v_hat;
    std::vector<double> v_hat_minus;
    std::vector<double> gamma;
    double v_hat_zero = 0.0;  // J_w^{-1}(0)
    double w = 0.0;           // weight the cutoffs were solved under

    // v_hat_k with the convention v_hat_k = 1 for k > k_star
    double buyer_cutoff(int k) const {
        if (k <= 0) return v_hat_zero;
        return k <= k_star ? v_hat[k - 1] : 1.0;
    }
    // signed rank: j >= 1 buyer cutoff, j <= -1 inventory cutoff
    double cutoff(int j) const {
        if (j > 0) return buyer_cutoff(j);
        if (j < 0) return -j <= l_star ? v_hat_minus[-j - 1] : v_hat_zero;
        return v_hat_zero;
    }
    // largest i with v >= v_hat_i (0 if v < v_hat_1); the interval index of
    // the piecewise multipliers and stationary formulas
    int regime_index(double v) const {
        int i = 0;
        while (i < k_star && v >= v_hat[i]) ++i;
        return i;
    }
    double gamma_l(int l) const { return l >= 1 && l <= l_star ? gamma[l - 1] : 0.0; }
};

struct SolveReport {
    int brackets_scanned = 0;
    int certified_solutions = 1;
    bool multiple_certified = false;
    double terminal_residual = 0.0;
    std::string note;
};

// c - mu * int_a^b J_w'(v) / (1 + rho(v) + ... + rho(v)^{k-1}) dv.
// The coefficient of P_k(0) in the Lagrangian once a = v_hat_{k-1}, b = v_hat_k.
double h_k(const ValueDistribution& dist, const MarketParams& params, int k, double a, double b);

// beta_k(v): multiplier on the queue balance constraint at rank k; piecewise
// between buyer cutoffs, 0 below v_hat_k.
double beta_multiplier(const ValueDistribution& dist, const MarketParams& params,
                       const Thresholds& thr, int k, double v);

// Coefficient of Q_1 in the Lagrangian given gamma_1 and gamma_2 (buyer
// thresholds are re-solved for this gamma_1).
double coefficient_A(const ValueDistribution& dist, const MarketParams& params, double gamma1,
                     double gamma2);

// Coefficient of Q_l (l >= 2) given the neighbouring multipliers.
double coefficient_B(const ValueDistribution& dist, const MarketParams& params, double g_prev,
                     double g_cur, double g_next);

// d = infinity: iterative buyer thresholds from v_hat_1 = J_w^{-1}(c/mu).
Thresholds solve_service_thresholds(const ValueDistribution& dist, const MarketParams& params);

// Buyer thresholds for a given inventory multiplier gamma_1 (gamma_1 = 0
// reproduces the service scenario).
Thresholds solve_buyer_thresholds(const ValueDistribution& dist, const MarketParams& params,
                                  double gamma1);

// d < infinity: shooting method on gamma_1 with the inner chain
// A(g1,g2)=0, B(g_{l-1},g_l,g_{l+1})=0; certified against the dual signs.
Thresholds solve_platform_thresholds(const ValueDistribution& dist, const MarketParams& params,
                                     SolveReport* report = nullptr);

// solve_platform_thresholds when d < infinity, solve_service_thresholds else.
Thresholds solve_thresholds(const ValueDistribution& dist, const MarketParams& params,
                            SolveReport* report = nullptr);

struct DualCertificate {
    std::vector<double> grid;
    std::vector<double> p0_coeff;               // H_k, k = 1..k_star+3
    std::vector<std::vector<double>> pk_coeff;  // coefficient of P_k(v)-P_k(0), k = 1..k_star
    std::vector<double> q_coeff;                // A/B chain values, l = 1..l_star+3
    std::vector<double> x_coeff;                // coefficient of X(v) on the grid
    double max_violation = 0.0;
};

// Evaluates the Appendix-style sign pattern on a grid; throws
// CertificateViolation if the worst residual exceeds 1e-6.
DualCertificate build_dual_certificate(const ValueDistribution& dist, const MarketParams& params,
                                       const Thresholds& thr, int grid_n = 257);

inline constexpr int kMaxQueueCap = 500;
inline constexpr int kMaxInventoryCap = 200;

}  // namespace dqa
