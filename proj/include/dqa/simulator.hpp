#pragma once

#include <cstdint>
#include <vector>

#include "dqa/allocation.hpp"
#include "dqa/rng.hpp"

namespace dqa {

struct SimConfig {
    std::uint64_t seed = 1;
    double horizon = 1e5;
    double warmup = 0.0;
    std::vector<double> probe_values;  // empirical CDF probes
    int value_bins = 50;               // empirical allocation frequency bins
};

// Time-weighted empirical statistics. Counters cover the whole run; monetary
// and time-integral quantities only the post-warmup window.
struct SimStats {
    double elapsed = 0.0;  // post-warmup simulated time
    std::vector<double> probes;
    std::vector<std::vector<double>> p_hat;  // [rank k-1][probe]: share of time v_k <= probe
    std::vector<double> q_hat;               // inventory occupancy shares, level 0..L*

    double revenue = 0.0;             // lump sums / posted receipts collected
    double waiting_reimbursed = 0.0;  // c * queue-time
    double holding_cost = 0.0;        // d * inventory-time (ledger line)

    std::uint64_t arrivals = 0, admitted = 0, served = 0, removed = 0, turned_away = 0,
                  still_present = 0, stored_items = 0, discarded_items = 0, item_arrivals = 0;

    double queue_time_integral = 0.0;
    double inventory_time_integral = 0.0;
    double completed_sojourn_time = 0.0;
    std::uint64_t completed_sojourns = 0;

    std::vector<std::uint64_t> bin_arrivals, bin_served;  // resolved buyers only

    std::vector<double> batch_net;  // per-batch net rate, for the stderr

    int max_queue_delta = 0;
    bool nad_violated = false;
    bool rank_violated = false;

    double mean_queue_length() const { return queue_time_integral / elapsed; }
    double mean_waiting_time() const {
        return completed_sojourns ? completed_sojourn_time / completed_sojourns : 0.0;
    }
    double net_rate() const {
        return (revenue - waiting_reimbursed - holding_cost) / elapsed;
    }
    double net_rate_stderr() const;

    // weighted union of two independent replications
    void merge(const SimStats& other);
};

// Discrete-event simulation of the optimal Markov policy with direct-mechanism
// payments: every arrival is charged T(v), queued buyers are reimbursed c per
// unit time, holding cost accrues as a ledger line.
SimStats run_optimal_policy(const ValueDistribution& dist, const MarketParams& params,
                            const Thresholds& thr, const InterimMechanism* mech,
                            const SimConfig& cfg);

enum class FixedPolicyStyle {
    queue_posted,     // admit iff v > cutoff, serve a random queued buyer at the posted cutoff
    inventory_posted  // no queue: store up to cap, sell at the posted cutoff
};

SimStats run_fixed_threshold_policy(const ValueDistribution& dist, const MarketParams& params,
                                    double cutoff, int inventory_cap, FixedPolicyStyle style,
                                    const SimConfig& cfg);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t reps = 0;
};

// Absorbing random walk behind the conditional win probability: down with
// probability 1/(1+rho) (service), up with rho/(1+rho) (displacement); win at
// 0, removal at i+1. OpenMP over walks; per-walk streams keep the result
// identical for any thread count.
McEstimate mc_gamblers_ruin(double rho, int i, int k, std::uint64_t reps, std::uint64_t seed);
McEstimate mc_gamblers_ruin_serial(double rho, int i, int k, std::uint64_t reps,
                                   std::uint64_t seed);

}  // namespace dqa
