#ifndef SPATIALREG_STATS_HPP
#define SPATIALREG_STATS_HPP

#include <cstddef>
#include <vector>

namespace spatialreg::stats {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation. Self-contained so t / F p-values need no external dependency.
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z);

// Survival functions: P(T > t) and P(F > f).
double student_t_sf(double t, double df);
double student_t_two_sided_p(double t, double df);
double f_sf(double f, double df1, double df2);

// Two-sided critical value t_crit with P(|T| > t_crit) = alpha.
double student_t_critical(double alpha, double df);

// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile_type7(std::vector<double> values, double prob);

} // namespace spatialreg::stats

#endif
