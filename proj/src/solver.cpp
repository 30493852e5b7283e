#include "dqa/solver.hpp"

#include <algorithm>
#include <cmath>

#include "dqa/allocation.hpp"
#include "dqa/numerics.hpp"
#include "dqa/steady.hpp"

namespace dqa {

void MarketParams::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(c > 0.0)) throw ConfigError("c must be positive");
    if (!(d > 0.0)) throw ConfigError("d must be positive (or inf)");
    if (w < 0.0 || w > 1.0) throw ConfigError("w must lie in [0,1]");
}

double h_k(const ValueDistribution& dist, const MarketParams& params, int k, double a, double b) {
    if (a == b) return params.c;
    const double w = params.w;
    const double integral = adaptive_simpson(
        [&](double v) {
            return dist.virtual_value_deriv(v, w) / geom_sum(params.rho(dist, v), k);
        },
        a, b, 1e-10);
    return params.c - params.mu * integral;
}

Thresholds solve_buyer_thresholds(const ValueDistribution& dist, const MarketParams& params,
                                  double gamma1) {
    params.validate();
    Thresholds thr;
    thr.w = params.w;
    thr.v_hat_zero = dist.inverse_virtual(0.0, params.w);

    const double x1 = gamma1 + params.c / params.mu;
    if (x1 >= 1.0) return thr;  // J_w(1) = 1, so the first cutoff clips to 1 and K* = 0

    thr.v_hat.push_back(dist.inverse_virtual(x1, params.w));
    for (int k = 2;; ++k) {
        if (k > kMaxQueueCap) throw CapExceeded("buyer threshold chain exceeded K cap");
        const double prev = thr.v_hat.back();
        if (h_k(dist, params, k, prev, 1.0) > 0.0) break;
        // h_k(prev, .) starts at c > 0 and decreases in the upper limit
        const double vk =
            bisect([&](double b) { return h_k(dist, params, k, prev, b); }, prev, 1.0, 1e-12, +1);
        thr.v_hat.push_back(vk);
    }
    thr.k_star = static_cast<int>(thr.v_hat.size());
    return thr;
}

Thresholds solve_service_thresholds(const ValueDistribution& dist, const MarketParams& params) {
    Thresholds thr = solve_buyer_thresholds(dist, params, 0.0);
    thr.l_star = 0;
    return thr;
}

double beta_multiplier(const ValueDistribution& dist, const MarketParams& params,
                       const Thresholds& thr, int k, double v) {
    const int i = thr.regime_index(v);
    if (k > i) return 0.0;
    const double rho = params.rho(dist, v);
    const double ratio = geom_sum(rho, i - k + 1) / geom_sum(rho, i + 1);
    return ratio * dist.virtual_value_deriv(v, params.w);
}

namespace {

// delta(gamma_1) = -lambda int (1-F) beta_1 dv, split at the buyer cutoffs
// where beta_1 has kinks.
double delta_term(const ValueDistribution& dist, const MarketParams& params, const Thresholds& thr) {
    double total = 0.0;
    for (int i = 1; i <= thr.k_star; ++i) {
        const double lo = thr.v_hat[i - 1];
        const double hi = i < thr.k_star ? thr.v_hat[i] : 1.0;
        total += adaptive_simpson(
            [&](double v) {
                const double rho = params.rho(dist, v);
                const double ratio = geom_sum(rho, i) / geom_sum(rho, i + 1);
                return (1.0 - dist.cdf(v)) * ratio * dist.virtual_value_deriv(v, params.w);
            },
            lo, hi, 1e-10);
    }
    return -params.lambda * total;
}

// A(gamma_1, 0): everything in A except the +mu*gamma_2 term.
double a_base(const ValueDistribution& dist, const MarketParams& params, const Thresholds& thr,
              double gamma1) {
    const double w = params.w;
    const double lo = dist.inverse_virtual(gamma1, w);
    const double tail = adaptive_simpson(
        [&](double v) {
            return (dist.virtual_value(v, w) - gamma1) * dist.pdf(v);
        },
        lo, 1.0, 1e-10);
    return delta_term(dist, params, thr) + params.lambda * tail - params.mu * gamma1 - params.d;
}

// B(g_prev, g_cur, 0): everything in B except the +mu*g_next term.
double b_base(const ValueDistribution& dist, const MarketParams& params, double g_prev,
              double g_cur) {
    const double w = params.w;
    const double v_prev = dist.inverse_virtual(g_prev, w);
    const double v_cur = dist.inverse_virtual(g_cur, w);
    const double integral = adaptive_simpson(
        [&](double v) {
            return (dist.virtual_value(v, w) - g_cur) * dist.pdf(v);
        },
        v_cur, v_prev, 1e-10);
    return params.lambda * (g_prev - g_cur) * (1.0 - dist.cdf(v_prev)) +
           params.lambda * integral - params.mu * g_cur - params.d;
}

enum class ChainStatus { converged, needs_larger_gamma1, needs_smaller_gamma1 };

constexpr double kGammaZeroTol = 1e-9;

// Runs the inner multiplier chain for a trial gamma_1: gamma_2 zeroes the Q_1
// coefficient, each subsequent gamma_{l+1} zeroes the Q_l coefficient. The
// chain either terminates with an exact zero (solution candidate) or reports
// which direction the trial gamma_1 must move.
ChainStatus run_chain(const ValueDistribution& dist, const MarketParams& params, double gamma1,
                      std::vector<double>& gammas, double* terminal) {
    gammas.clear();
    if (gamma1 <= kGammaZeroTol) {
        // L* = 0 candidate; valid iff the Q_1 coefficient is nonpositive
        const Thresholds thr = solve_buyer_thresholds(dist, params, 0.0);
        const double a00 = a_base(dist, params, thr, 0.0);
        if (terminal) *terminal = a00;
        return a00 <= kGammaZeroTol ? ChainStatus::converged : ChainStatus::needs_larger_gamma1;
    }
    gammas.push_back(gamma1);
    const Thresholds thr = solve_buyer_thresholds(dist, params, gamma1);
    const double a0 = a_base(dist, params, thr, gamma1);
    // gamma_2 root of a0 + mu*g = 0; bisection per the monotonicity of A in g
    if (a0 > 0.0) return ChainStatus::needs_larger_gamma1;
    if (a0 + params.mu * gamma1 < 0.0) return ChainStatus::needs_smaller_gamma1;
    double next = bisect([&](double g) { return a0 + params.mu * g; }, 0.0, gamma1, 1e-13, -1);
    for (;;) {
        const double cur = gammas.back();
        if (next <= kGammaZeroTol) {
            const double term = b_base(dist, params, cur, 0.0);
            if (terminal) *terminal = term;
            return term <= kGammaZeroTol ? ChainStatus::converged
                                         : ChainStatus::needs_larger_gamma1;
        }
        if (next >= cur - 1e-15) return ChainStatus::needs_smaller_gamma1;
        gammas.push_back(next);
        if (static_cast<int>(gammas.size()) > kMaxInventoryCap)
            throw CapExceeded("inventory multiplier chain exceeded L cap");
        const double b0 = b_base(dist, params, cur, next);
        if (b0 > 0.0) return ChainStatus::needs_larger_gamma1;
        if (b0 + params.mu * next < 0.0) return ChainStatus::needs_smaller_gamma1;
        next = bisect([&](double g) { return b0 + params.mu * g; }, 0.0, next, 1e-13, -1);
    }
}

Thresholds thresholds_from_gammas(const ValueDistribution& dist, const MarketParams& params,
                                  const std::vector<double>& gammas) {
    const double gamma1 = gammas.empty() ? 0.0 : gammas.front();
    Thresholds thr = solve_buyer_thresholds(dist, params, gamma1);
    thr.gamma = gammas;
    thr.l_star = static_cast<int>(gammas.size());
    thr.v_hat_minus.resize(gammas.size());
    for (std::size_t l = 0; l < gammas.size(); ++l)
        thr.v_hat_minus[l] = dist.inverse_virtual(gammas[l], params.w);
    return thr;
}

}  // namespace

double coefficient_A(const ValueDistribution& dist, const MarketParams& params, double gamma1,
                     double gamma2) {
    const Thresholds thr = solve_buyer_thresholds(dist, params, gamma1);
    return a_base(dist, params, thr, gamma1) + params.mu * gamma2;
}

double coefficient_B(const ValueDistribution& dist, const MarketParams& params, double g_prev,
                     double g_cur, double g_next) {
    return b_base(dist, params, g_prev, g_cur) + params.mu * g_next;
}

Thresholds solve_platform_thresholds(const ValueDistribution& dist, const MarketParams& params,
                                     SolveReport* report) {
    params.validate();
    if (params.service_model())
        throw ConfigError("solve_platform_thresholds requires finite d");

    SolveReport rep;
    std::vector<double> gammas;
    double terminal = 0.0;
    if (run_chain(dist, params, 0.0, gammas, &terminal) == ChainStatus::converged) {
        rep.terminal_residual = terminal;
        rep.note = "storage collapses (A(0,0) <= 0)";
        if (report) *report = rep;
        return thresholds_from_gammas(dist, params, {});
    }

    // Scan the gamma_1 bracket from the top, per the largest-root selection.
    // Each sign change needs_smaller -> needs_larger (descending) brackets a
    // candidate chain; candidates are certified and compared by objective.
    constexpr int kScan = 48;
    std::vector<std::vector<double>> candidates;
    double hi = 1.0;
    ChainStatus hi_status = run_chain(dist, params, hi, gammas, nullptr);
    if (hi_status == ChainStatus::converged) candidates.push_back(gammas);
    for (int s = 1; s <= kScan; ++s) {
        const double lo = 1.0 - static_cast<double>(s) / kScan;
        ChainStatus lo_status = run_chain(dist, params, lo, gammas, &terminal);
        ++rep.brackets_scanned;
        if (lo_status == ChainStatus::converged) {
            candidates.push_back(gammas);
            hi = lo;
            hi_status = lo_status;
            continue;
        }
        if (lo_status == ChainStatus::needs_larger_gamma1 &&
            hi_status == ChainStatus::needs_smaller_gamma1) {
            double a = lo, b = hi;
            std::vector<double> best;
            while (b - a > 1e-12) {
                const double mid = 0.5 * (a + b);
                const ChainStatus st = run_chain(dist, params, mid, gammas, &terminal);
                if (st == ChainStatus::converged) {
                    best = gammas;
                    break;
                }
                (st == ChainStatus::needs_larger_gamma1 ? a : b) = mid;
            }
            if (best.empty()) {
                // Bracket exhausted without a clean terminal zero: take the
                // feasible side and drop trailing multipliers below tolerance.
                run_chain(dist, params, a, best, &terminal);
                while (!best.empty() && best.back() <= kGammaZeroTol) best.pop_back();
            }
            rep.terminal_residual = terminal;
            candidates.push_back(best);
        }
        hi = lo;
        hi_status = lo_status;
    }

    if (candidates.empty())
        throw NoSolutionFound("no certified gamma_1 bracket found in [0,1]");

    // Certify every candidate; tie-break by objective value.
    Thresholds best_thr;
    double best_obj = -std::numeric_limits<double>::infinity();
    int certified = 0;
    for (const auto& g : candidates) {
        Thresholds thr = thresholds_from_gammas(dist, params, g);
        try {
            build_dual_certificate(dist, params, thr);
        } catch (const CertificateViolation&) {
            continue;
        }
        ++certified;
        const StationaryDistribution sd = solve_stationary(dist, params, thr);
        const double obj = objective_value(dist, params, sd);
        if (obj > best_obj) {
            best_obj = obj;
            best_thr = thr;
        }
    }
    if (certified == 0)
        throw NoSolutionFound("no candidate chain passed the dual certificate");
    rep.certified_solutions = certified;
    rep.multiple_certified = certified > 1;
    if (rep.multiple_certified) rep.note = "multiple certified chains; kept max objective";
    if (report) *report = rep;
    return best_thr;
}

Thresholds solve_thresholds(const ValueDistribution& dist, const MarketParams& params,
                            SolveReport* report) {
    if (params.service_model()) {
        if (report) *report = SolveReport{};
        return solve_service_thresholds(dist, params);
    }
    return solve_platform_thresholds(dist, params, report);
}

DualCertificate build_dual_certificate(const ValueDistribution& dist, const MarketParams& params,
                                       const Thresholds& thr, int grid_n) {
    DualCertificate cert;
    const double w = params.w;

    // value grid: uniform points plus the cutoffs and their neighbourhoods
    cert.grid.reserve(grid_n + 3 * thr.k_star);
    for (int i = 0; i < grid_n; ++i) cert.grid.push_back(static_cast<double>(i) / (grid_n - 1));
    for (double vk : thr.v_hat) {
        cert.grid.push_back(vk);
        if (vk > 1e-9) cert.grid.push_back(vk - 1e-9);
        if (vk < 1.0 - 1e-9) cert.grid.push_back(vk + 1e-9);
    }
    std::sort(cert.grid.begin(), cert.grid.end());

    double worst = 0.0;
    auto record_binding = [&worst](double r) { worst = std::max(worst, std::abs(r)); };
    auto record_sign = [&worst](double r) { worst = std::max(worst, r); };  // must be <= 0

    // (i) P_k(0) coefficients: zero up to K*, positive beyond
    for (int k = 1; k <= thr.k_star + 3; ++k) {
        double hk;
        if (k == 1) {
            hk = -params.mu * dist.virtual_value(thr.buyer_cutoff(1), w) +
                 params.mu * thr.gamma_l(1) + params.c;
        } else {
            hk = h_k(dist, params, k, thr.buyer_cutoff(k - 1), thr.buyer_cutoff(k));
        }
        cert.p0_coeff.push_back(hk);
        if (k <= thr.k_star)
            record_binding(hk);
        else
            record_sign(-hk);  // positive required beyond K*
    }

    // (ii) coefficients of P_k(v) - P_k(0): zero on [v_hat_k, 1], nonpositive below
    cert.pk_coeff.assign(std::max(thr.k_star, 0), {});
    for (int k = 1; k <= thr.k_star; ++k) {
        auto& row = cert.pk_coeff[k - 1];
        row.resize(cert.grid.size());
        for (std::size_t gi = 0; gi < cert.grid.size(); ++gi) {
            const double v = cert.grid[gi];
            const double bk = beta_multiplier(dist, params, thr, k, v);
            const double bk1 = beta_multiplier(dist, params, thr, k + 1, v);
            const double tail = params.lambda * (1.0 - dist.cdf(v));
            double coeff;
            if (k == 1) {
                const double alpha =
                    v >= thr.v_hat_zero ? dist.virtual_value_deriv(v, w) : 0.0;
                coeff = tail * (bk - bk1) - params.mu * alpha + params.mu * bk;
            } else {
                const double bkm1 = beta_multiplier(dist, params, thr, k - 1, v);
                coeff = tail * (bk - bk1) - params.mu * (bkm1 - bk);
            }
            row[gi] = coeff;
            if (v >= thr.v_hat[k - 1])
                record_binding(coeff);
            else
                record_sign(coeff);
        }
    }

    // (iii) Q_l coefficients via the A/B chain, zero up to L*, nonpositive after
    for (int l = 1; l <= thr.l_star + 3; ++l) {
        double coeff;
        if (l == 1) {
            coeff = coefficient_A(dist, params, thr.gamma_l(1), thr.gamma_l(2));
        } else {
            coeff = coefficient_B(dist, params, thr.gamma_l(l - 1), thr.gamma_l(l),
                                  thr.gamma_l(l + 1));
        }
        cert.q_coeff.push_back(coeff);
        if (l <= thr.l_star)
            record_binding(coeff);
        else if (std::isfinite(coeff))
            record_sign(coeff);
    }

    // (iv) X(v) coefficient: lambda (J_w(v) - int_0^v alpha)
    cert.x_coeff.resize(cert.grid.size());
    for (std::size_t gi = 0; gi < cert.grid.size(); ++gi) {
        const double v = cert.grid[gi];
        const double jw = dist.virtual_value(v, w);
        const double alpha_int = v >= thr.v_hat_zero ? jw - dist.virtual_value(thr.v_hat_zero, w) : 0.0;
        const double coeff = params.lambda * (jw - alpha_int);
        cert.x_coeff[gi] = coeff;
        if (v >= thr.v_hat_zero)
            record_binding(coeff);
        else if (std::isfinite(coeff))
            record_sign(coeff);
    }

    cert.max_violation = worst;
    if (worst > 1e-6)
        throw CertificateViolation("dual certificate violation " + std::to_string(worst));
    return cert;
}

}  // namespace dqa
