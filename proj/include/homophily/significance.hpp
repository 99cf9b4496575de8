#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "homophily/error.hpp"

namespace homophily {

/// Correct/total counts of one accuracy measurement.
struct ProportionSample {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

/// One-sided comparison of two proportions.
///
/// significant means the lower confidence bound of (filtered - baseline)
/// is above zero at the given alpha.
struct SignificanceResult {
    double diff = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double z_alpha = 0.0;
    double alpha = 0.0;
    bool significant = false;
};

/// Inverse CDF of the standard normal distribution (Wichura's PPND16
/// rational approximation). Absolute error is far below 1e-8 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -value : value;
}

/// One-sided two-proportion z-test of filtered accuracy exceeding baseline
/// accuracy. The interval is diff +/- z_alpha * se with se the pooled
/// standard error of the two independent binomial proportions; significance
/// is ci_low > 0.
inline SignificanceResult compare_accuracy(ProportionSample baseline, ProportionSample filtered,
                                           double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw std::invalid_argument("compare_accuracy: alpha must be in (0, 0.5]");
    }
    if (baseline.trials == 0 || filtered.trials == 0) {
        throw std::invalid_argument("compare_accuracy: sample with zero trials");
    }
    if (baseline.successes > baseline.trials || filtered.successes > filtered.trials) {
        throw std::invalid_argument("compare_accuracy: successes exceed trials");
    }
    const double p1 = static_cast<double>(baseline.successes) / static_cast<double>(baseline.trials);
    const double p2 = static_cast<double>(filtered.successes) / static_cast<double>(filtered.trials);
    const double se = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(baseline.trials) +
                                p2 * (1.0 - p2) / static_cast<double>(filtered.trials));

    SignificanceResult result;
    result.alpha = alpha;
    result.z_alpha = normal_quantile(1.0 - alpha);
    result.diff = p2 - p1;

    // The interval must be exactly symmetric as measured by double
    // subtraction: ci_high - diff == diff - ci_low bit for bit. Project the
    // margin onto a value both bounds can recover.
    double margin = result.z_alpha * se;
    for (int i = 0; i < 64; ++i) {
        const double from_high = (result.diff + margin) - result.diff;
        const double from_low = result.diff - (result.diff - margin);
        if (from_high == margin && from_low == margin) {
            break;
        }
        margin = (i % 2 == 0) ? from_high : from_low;
    }
    result.ci_low = result.diff - margin;
    result.ci_high = result.diff + margin;
    // Degenerate zero-variance, zero-difference samples count as not
    // significant so batch sweeps keep going.
    result.significant = result.ci_low > 0.0;
    return result;
}

} // namespace homophily
