#pragma once

#include <functional>
#include <string>

#include "dqa/errors.hpp"

namespace dqa {

// Buyer value distribution on [0,1] together with the analytic objects the
// solver needs: density, density derivative, weighted virtual value J_w and
// its inverse. Immutable after construction; safe for concurrent reads.
struct ValueDistribution {
    std::function<double(double)> cdf;        // F
    std::function<double(double)> pdf;        // f, positive on (0,1)
    std::function<double(double)> pdf_deriv;  // f'
    std::function<double(double)> inv_cdf;    // F^{-1}; bisection fallback if empty
    std::string name;

    // J_w(v) = v - (1-w)(1-F(v))/f(v); w=0 is the seller's virtual value,
    // w=1 the identity.
    double virtual_value(double v, double w = 0.0) const;
    double virtual_value_deriv(double v, double w = 0.0) const;

    // Inverse of J_w by bisection on [0,1], absolute tolerance 1e-12.
    double inverse_virtual(double x, double w = 0.0) const;

    // F^{-1}(u), analytic when available, else bisection.
    double quantile(double u) const;
};

ValueDistribution uniform_distribution();

// F(v) = v^a. Regular only for a >= 1; the factory validates and throws
// RegularityViolation otherwise.
ValueDistribution power_distribution(double a);
ValueDistribution power_distribution_unchecked(double a);

struct RegularityReport {
    bool j_monotone = false;
    bool j0_negative = false;
    bool pdf_positive = false;
    bool hazard_monotone = false;  // (1-F)/f non-increasing; needed only for
                                   // the welfare single-crossing results
    bool regular() const { return j_monotone && j0_negative && pdf_positive; }
};

// Grid scan over grid_n uniform points including the endpoints. Failures are
// report entries, not exceptions.
RegularityReport validate_regularity(const ValueDistribution& dist, int grid_n);

}  // namespace dqa
