#ifndef SPATIALREG_AUTOCORR_HPP
#define SPATIALREG_AUTOCORR_HPP

#include "spatialreg/weights.hpp"

#include <cstdint>

namespace spatialreg {

enum class MoranInference { AnalyticalRandomization, AnalyticalNormality, Permutation };
enum class MoranAlternative { Greater, Lower, TwoSided };

struct MoranResult {
    double statistic = 0.0;
    double expected = 0.0;
    double variance = 0.0;
    double z_score = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    MoranInference inference = MoranInference::AnalyticalRandomization;
    MoranAlternative alternative = MoranAlternative::Greater;
    std::size_t n_permutations = 0;
};

// The raw statistic I = (n / W) * sum_ij w_ij z_i z_j / sum_i z_i^2.
double morans_i_statistic(const Vector& x, const SpatialWeights& w);

// Analytical inference. Expected I is -1/(n-1); the variance defaults to the
// randomization (permutation-moment) formula, with the normality formula
// behind the inference flag. One-sided positive-clustering test by default.
MoranResult global_morans_i(const Vector& x, const SpatialWeights& w,
                            MoranInference inference = MoranInference::AnalyticalRandomization,
                            MoranAlternative alternative = MoranAlternative::Greater);

// Monte Carlo permutation test, pseudo p = (1 + #{I_perm >= I_obs}) / (1 + n_perm)
// for the positive tail. Permutation r draws from counter-based stream
// (seed, r), so the result is identical for any worker count.
MoranResult permutation_morans_i(const Vector& x, const SpatialWeights& w,
                                 std::size_t n_permutations, std::uint64_t seed,
                                 MoranAlternative alternative = MoranAlternative::Greater);

// Exact test enumerating all n! relabelings; n must be <= 8.
MoranResult exhaustive_permutation_morans_i(const Vector& x, const SpatialWeights& w,
                                            MoranAlternative alternative = MoranAlternative::Greater);

struct MoranScatter {
    Vector centered; // z_i = x_i - mean(x)
    Vector lag;      // (W z)_i
    double slope = 0.0;
};

// Scatter data behind a Moran plot; requires row-standardized weights, for
// which the least-squares slope of lag on z equals Moran's I.
MoranScatter moran_scatter(const Vector& x, const SpatialWeights& w);

} // namespace spatialreg

#endif
