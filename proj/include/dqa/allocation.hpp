#pragma once

#include <vector>

#include "dqa/steady.hpp"

namespace dqa {

// Gambler's-ruin service probability for a buyer whose rank is k with top
// admitted index i (absorbing win at 0, removal at i+1).
double conditional_win_prob(double rho, int k, int i);

// X*(v): probability a type-v arrival is eventually served.
double interim_allocation(const StationaryDistribution& sd, const ValueDistribution& dist,
                          const MarketParams& params, double v);

// Interim mechanism (X*, T) with a cached integral table for the envelope
// transfer T(v) = v X*(v) - int_0^v X*.
struct InterimMechanism {
    StationaryDistribution sd;
    ValueDistribution dist;
    MarketParams params;
    std::vector<double> grid;  // knots, cutoffs forced in
    std::vector<double> xval;  // X* at knots
    std::vector<double> cum;   // int_0^knot X*

    double allocation(double v) const;
    double transfer(double v) const;
};

InterimMechanism make_mechanism(const StationaryDistribution& sd, const ValueDistribution& dist,
                                const MarketParams& params, int grid_n = 4096);

// lambda int J_w X* f - c E[queue] - d E[inventory] (d term dropped in the
// service model).
double objective_value(const ValueDistribution& dist, const MarketParams& params,
                       const StationaryDistribution& sd);

struct RfReport {
    double max_binding_violation = 0.0;
    double max_slack_violation = 0.0;
    bool pass = true;
};

// Reduced-form feasibility: binding (tol 1e-8) above J_w^{-1}(0), one-sided
// below.
RfReport verify_rf_binding(const ValueDistribution& dist, const MarketParams& params,
                           const StationaryDistribution& sd, const std::vector<double>& probes);

struct OracleBenchmark {
    double v_tilde0 = 0.0;
    double r_star = 0.0;
};

// Large-market benchmark: selling price v~_0 and per-unit revenue R*.
OracleBenchmark oracle_benchmark(const ValueDistribution& dist, const MarketParams& params);

}  // namespace dqa
