#include "dqa/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dqa/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqa {

double SimStats::net_rate_stderr() const {
    if (batch_net.size() < 2) return 0.0;
    double mean = 0.0;
    for (double b : batch_net) mean += b;
    mean /= batch_net.size();
    double var = 0.0;
    for (double b : batch_net) var += (b - mean) * (b - mean);
    var /= (batch_net.size() - 1);
    return std::sqrt(var / batch_net.size());
}

void SimStats::merge(const SimStats& other) {
    const double total = elapsed + other.elapsed;
    if (total <= 0.0) return;
    const double wa = elapsed / total, wb = other.elapsed / total;
    for (std::size_t k = 0; k < p_hat.size() && k < other.p_hat.size(); ++k)
        for (std::size_t j = 0; j < p_hat[k].size(); ++j)
            p_hat[k][j] = wa * p_hat[k][j] + wb * other.p_hat[k][j];
    for (std::size_t l = 0; l < q_hat.size() && l < other.q_hat.size(); ++l)
        q_hat[l] = wa * q_hat[l] + wb * other.q_hat[l];
    elapsed = total;
    revenue += other.revenue;
    waiting_reimbursed += other.waiting_reimbursed;
    holding_cost += other.holding_cost;
    arrivals += other.arrivals;
    admitted += other.admitted;
    served += other.served;
    removed += other.removed;
    turned_away += other.turned_away;
    still_present += other.still_present;
    stored_items += other.stored_items;
    discarded_items += other.discarded_items;
    item_arrivals += other.item_arrivals;
    queue_time_integral += other.queue_time_integral;
    inventory_time_integral += other.inventory_time_integral;
    completed_sojourn_time += other.completed_sojourn_time;
    completed_sojourns += other.completed_sojourns;
    for (std::size_t b = 0; b < bin_arrivals.size() && b < other.bin_arrivals.size(); ++b) {
        bin_arrivals[b] += other.bin_arrivals[b];
        bin_served[b] += other.bin_served[b];
    }
    batch_net.insert(batch_net.end(), other.batch_net.begin(), other.batch_net.end());
    max_queue_delta = std::max(max_queue_delta, other.max_queue_delta);
    nad_violated = nad_violated || other.nad_violated;
    rank_violated = rank_violated || other.rank_violated;
}

namespace {

struct QueuedBuyer {
    double value;
    double entry_time;
    int bin;  // -1 when the buyer arrived before warmup
};

struct ProbeAccumulator {
    std::vector<double> probes;      // sorted
    std::vector<std::vector<double>> diff;  // [rank][probe-slot] time mass at first probe >= v_k

    void init(const std::vector<double>& p, int ranks) {
        probes = p;
        std::sort(probes.begin(), probes.end());
        diff.assign(ranks, std::vector<double>(probes.size() + 1, 0.0));
    }
    // v_k = value at rank k (0 when the rank is empty)
    void add(int rank_idx, double vk, double dt) {
        const std::size_t idx =
            std::lower_bound(probes.begin(), probes.end(), vk) - probes.begin();
        diff[rank_idx][idx] += dt;
    }
    std::vector<std::vector<double>> finalize(double elapsed) const {
        std::vector<std::vector<double>> out(diff.size(),
                                             std::vector<double>(probes.size(), 0.0));
        for (std::size_t k = 0; k < diff.size(); ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < probes.size(); ++j) {
                acc += diff[k][j];
                out[k][j] = elapsed > 0 ? acc / elapsed : 0.0;
            }
        }
        return out;
    }
};

struct BatchTracker {
    double start = 0.0, len = 0.0;
    int batches = 0;
    std::vector<double> net;
    double cur_net = 0.0;
    int cur = 0;

    void init(double warmup, double horizon, int n) {
        start = warmup;
        batches = n;
        len = (horizon - warmup) / n;
        net.clear();
        cur_net = 0.0;
        cur = 0;
    }
    void add(double t, double amount) {
        if (len <= 0.0 || t < start) return;
        int b = std::min(batches - 1, static_cast<int>((t - start) / len));
        while (cur < b) {
            net.push_back(cur_net / len);
            cur_net = 0.0;
            ++cur;
        }
        cur_net += amount;
    }
    std::vector<double> finalize() {
        while (cur < batches) {
            net.push_back(cur_net / len);
            cur_net = 0.0;
            ++cur;
        }
        return net;
    }
};

int value_bin(double v, int bins) {
    int b = static_cast<int>(v * bins);
    return std::min(std::max(b, 0), bins - 1);
}

}  // namespace

SimStats run_optimal_policy(const ValueDistribution& dist, const MarketParams& params,
                            const Thresholds& thr, const InterimMechanism* mech,
                            const SimConfig& cfg) {
    if (cfg.horizon <= cfg.warmup) throw ConfigError("horizon must exceed warmup");

    SimStats st;
    st.probes = cfg.probe_values;
    std::sort(st.probes.begin(), st.probes.end());
    const int ranks = thr.k_star + 1;
    ProbeAccumulator probes;
    probes.init(st.probes, ranks);
    st.q_hat.assign(thr.l_star + 1, 0.0);
    st.bin_arrivals.assign(cfg.value_bins, 0);
    st.bin_served.assign(cfg.value_bins, 0);
    BatchTracker batches;
    batches.init(cfg.warmup, cfg.horizon, 64);

    RngStreams rng(cfg.seed);
    double t = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    double next_buyer = params.lambda > 0 ? rng.buyer_time.exponential(params.lambda) : inf;
    double next_item = params.mu > 0 ? rng.item_time.exponential(params.mu) : inf;

    std::vector<QueuedBuyer> queue;  // descending by value
    int inventory = 0;

    auto resolve_bin = [&](const QueuedBuyer& b, bool won) {
        if (b.bin < 0) return;
        ++st.bin_arrivals[b.bin];
        if (won) ++st.bin_served[b.bin];
    };

    while (true) {
        const double t_next = std::min({next_buyer, next_item, cfg.horizon});
        // time-weighted accumulation over [t, t_next), clipped to post-warmup
        const double lo = std::max(t, cfg.warmup);
        if (t_next > lo) {
            const double dt = t_next - lo;
            for (int k = 1; k <= ranks; ++k) {
                const double vk = k <= static_cast<int>(queue.size()) ? queue[k - 1].value : 0.0;
                probes.add(k - 1, vk, dt);
            }
            if (inventory <= thr.l_star) st.q_hat[inventory] += dt;
            st.queue_time_integral += dt * queue.size();
            st.inventory_time_integral += dt * inventory;
            batches.add(lo, -params.c * dt * queue.size());
            if (!params.service_model()) batches.add(lo, -params.d * dt * inventory);
        }
        if (t_next >= cfg.horizon) break;
        t = t_next;
        const std::size_t before = queue.size();

        if (next_buyer <= next_item) {
            // buyer arrival
            const double v = dist.quantile(rng.value.uniform01());
            next_buyer = t + rng.buyer_time.exponential(params.lambda);
            ++st.arrivals;
            const bool tracked = t >= cfg.warmup;
            if (mech && tracked) {
                const double pay = mech->transfer(v);
                st.revenue += pay;
                batches.add(t, pay);
            }
            if (inventory >= 1) {
                if (!queue.empty()) st.nad_violated = true;
                if (v >= thr.cutoff(-inventory)) {
                    --inventory;
                    ++st.served;
                    if (tracked) {
                        const int b = value_bin(v, cfg.value_bins);
                        ++st.bin_arrivals[b];
                        ++st.bin_served[b];
                    }
                } else {
                    ++st.turned_away;
                    if (tracked) ++st.bin_arrivals[value_bin(v, cfg.value_bins)];
                }
            } else {
                QueuedBuyer nb{v, t, tracked ? value_bin(v, cfg.value_bins) : -1};
                auto pos = std::upper_bound(
                    queue.begin(), queue.end(), v,
                    [](double val, const QueuedBuyer& q) { return val > q.value; });
                queue.insert(pos, nb);
                const int n = static_cast<int>(queue.size());
                if (queue.back().value < thr.buyer_cutoff(n)) {
                    const QueuedBuyer dropped = queue.back();
                    queue.pop_back();
                    if (dropped.entry_time == t) {
                        ++st.turned_away;
                        resolve_bin(dropped, false);
                    } else {
                        ++st.removed;
                        ++st.admitted;  // the newcomer stays
                        st.completed_sojourn_time += t - dropped.entry_time;
                        ++st.completed_sojourns;
                        resolve_bin(dropped, false);
                    }
                } else {
                    ++st.admitted;
                }
            }
        } else {
            // item arrival
            next_item = t + rng.item_time.exponential(params.mu);
            ++st.item_arrivals;
            if (!queue.empty()) {
                const QueuedBuyer front = queue.front();
                queue.erase(queue.begin());
                ++st.served;
                st.completed_sojourn_time += t - front.entry_time;
                ++st.completed_sojourns;
                resolve_bin(front, true);
            } else if (inventory < thr.l_star) {
                ++inventory;
                ++st.stored_items;
            } else {
                ++st.discarded_items;
            }
        }

        const int delta = static_cast<int>(queue.size()) - static_cast<int>(before);
        st.max_queue_delta = std::max(st.max_queue_delta, std::abs(delta));
        for (int k = 1; k <= static_cast<int>(queue.size()); ++k)
            if (queue[k - 1].value < thr.buyer_cutoff(k)) st.rank_violated = true;
        if (!queue.empty() && inventory > 0) st.nad_violated = true;
    }

    st.elapsed = cfg.horizon - cfg.warmup;
    st.p_hat = probes.finalize(st.elapsed);
    for (double& q : st.q_hat) q /= st.elapsed;
    st.still_present = queue.size();
    st.waiting_reimbursed = params.c * st.queue_time_integral;
    st.holding_cost = params.service_model() ? 0.0 : params.d * st.inventory_time_integral;
    st.batch_net = batches.finalize();
    return st;
}

SimStats run_fixed_threshold_policy(const ValueDistribution& dist, const MarketParams& params,
                                    double cutoff, int inventory_cap, FixedPolicyStyle style,
                                    const SimConfig& cfg) {
    if (cfg.horizon <= cfg.warmup) throw ConfigError("horizon must exceed warmup");

    SimStats st;
    st.probes = cfg.probe_values;
    st.q_hat.assign(inventory_cap + 1, 0.0);
    st.bin_arrivals.assign(cfg.value_bins, 0);
    st.bin_served.assign(cfg.value_bins, 0);
    BatchTracker batches;
    batches.init(cfg.warmup, cfg.horizon, 64);

    RngStreams rng(cfg.seed);
    Xoshiro256pp pick = stream_rng(cfg.seed, 3);  // random service order in the queue style
    double t = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    double next_buyer = params.lambda > 0 ? rng.buyer_time.exponential(params.lambda) : inf;
    double next_item = params.mu > 0 ? rng.item_time.exponential(params.mu) : inf;

    std::vector<QueuedBuyer> queue;
    int inventory = 0;

    while (true) {
        const double t_next = std::min({next_buyer, next_item, cfg.horizon});
        const double lo = std::max(t, cfg.warmup);
        if (t_next > lo) {
            const double dt = t_next - lo;
            st.queue_time_integral += dt * queue.size();
            st.inventory_time_integral += dt * inventory;
            if (inventory <= inventory_cap) st.q_hat[inventory] += dt;
            batches.add(lo, -params.c * dt * queue.size());
            if (!params.service_model()) batches.add(lo, -params.d * dt * inventory);
        }
        if (t_next >= cfg.horizon) break;
        t = t_next;

        if (next_buyer <= next_item) {
            const double v = dist.quantile(rng.value.uniform01());
            next_buyer = t + rng.buyer_time.exponential(params.lambda);
            ++st.arrivals;
            const bool tracked = t >= cfg.warmup;
            if (style == FixedPolicyStyle::queue_posted) {
                if (v > cutoff) {
                    queue.push_back({v, t, tracked ? value_bin(v, cfg.value_bins) : -1});
                    ++st.admitted;
                } else {
                    ++st.turned_away;
                }
            } else {
                if (inventory > 0 && v > cutoff) {
                    --inventory;
                    ++st.served;
                    if (tracked) {
                        st.revenue += cutoff;
                        batches.add(t, cutoff);
                    }
                } else {
                    ++st.turned_away;
                }
            }
        } else {
            next_item = t + rng.item_time.exponential(params.mu);
            ++st.item_arrivals;
            if (style == FixedPolicyStyle::queue_posted) {
                if (!queue.empty()) {
                    const std::size_t idx = pick.next() % queue.size();
                    const QueuedBuyer b = queue[idx];
                    queue.erase(queue.begin() + idx);
                    ++st.served;
                    st.completed_sojourn_time += t - b.entry_time;
                    ++st.completed_sojourns;
                    if (t >= cfg.warmup) {
                        st.revenue += cutoff;
                        batches.add(t, cutoff);
                    }
                } else {
                    ++st.discarded_items;
                }
            } else {
                if (inventory < inventory_cap) {
                    ++inventory;
                    ++st.stored_items;
                } else {
                    ++st.discarded_items;
                }
            }
        }
    }

    st.elapsed = cfg.horizon - cfg.warmup;
    st.still_present = queue.size();
    st.waiting_reimbursed = params.c * st.queue_time_integral;
    st.holding_cost = params.service_model() ? 0.0 : params.d * st.inventory_time_integral;
    st.batch_net = batches.finalize();
    return st;
}

namespace {

inline bool ruin_walk_wins(double rho, int i, int start, Xoshiro256pp& rng) {
    int k = start;
    const double p_up = rho / (1.0 + rho);  // displacement by a higher-value buyer
    while (k > 0 && k < i + 1) {
        if (rng.uniform01() < p_up)
            ++k;
        else
            --k;
    }
    return k == 0;
}

}  // namespace

McEstimate mc_gamblers_ruin_serial(double rho, int i, int k, std::uint64_t reps,
                                   std::uint64_t seed) {
    std::uint64_t wins = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        Xoshiro256pp rng = stream_rng(seed, r);
        if (ruin_walk_wins(rho, i, k, rng)) ++wins;
    }
    const double p = static_cast<double>(wins) / reps;
    return {p, std::sqrt(p * (1.0 - p) / reps), reps};
}

McEstimate mc_gamblers_ruin(double rho, int i, int k, std::uint64_t reps, std::uint64_t seed) {
    std::int64_t wins = 0;
    const std::int64_t n = static_cast<std::int64_t>(reps);
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : wins) schedule(static)
#endif
    for (std::int64_t r = 0; r < n; ++r) {
        Xoshiro256pp rng = stream_rng(seed, static_cast<std::uint64_t>(r));
        if (ruin_walk_wins(rho, i, k, rng)) ++wins;
    }
    const double p = static_cast<double>(wins) / reps;
    return {p, std::sqrt(p * (1.0 - p) / reps), reps};
}

}  // namespace dqa
