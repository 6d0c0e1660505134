#pragma once

/*======================================================================================================================
 * Probabilities with a tracked log-complement.
 *
 * `p` alone cannot represent values such as 1 - 1e-290.  Every `Prob` also carries `log_q = log(1 - p)`, computed so
 * that it stays accurate when `p` rounds to 1.
 *====================================================================================================================*/

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace mtpdb {

struct Prob
{
    double p = 0.0;
    double log_q = 0.0; ///< log(1 - p)

    static Prob from(double p) { return {p, std::log1p(-p)}; }
    static Prob zero() { return {0.0, 0.0}; }
    static Prob one() { return {1.0, -std::numeric_limits<double>::infinity()}; }

    /// 1 - p, accurate for p close to 1.
    double complement() const { return std::exp(log_q); }
    double log10_complement() const { return log_q / std::log(10.0); }
};

/// Independent disjunction: 1 - (1 - a)(1 - b).
Prob disjoin(const Prob &a, const Prob &b);

/// Independent conjunction: a * b.
Prob conjoin(const Prob &a, const Prob &b);

/// Signed combination `sum_i c_i * p_i` whose coefficients sum to 1, as produced by inclusion-exclusion; the
/// complement is then `sum_i c_i * (1 - p_i)`.
Prob signed_sum(const std::vector<std::pair<double, Prob>> &terms);

/// Clamp into [0, 1]; returns the distance moved.
double clamp(Prob &x);

/// Tolerance-aware comparison: -1, 0, or +1.  Values differing by more than 1e-12 compare by `p`; otherwise values
/// near 1 compare by complement (relative tolerance 1e-9).
int compare(const Prob &a, const Prob &b);

}
