#include "spatialreg/autocorr.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/rng.hpp"
#include "spatialreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spatialreg {

namespace {

struct MoranParts {
    Vector centered;
    double denominator; // sum z_i^2
    double total_weight;
};

MoranParts moran_parts(const Vector& x, const SpatialWeights& w) {
    if (static_cast<std::size_t>(x.size()) != w.n)
        throw Error("morans_i: value vector length does not match weights");
    if (w.n < 2) throw Error("morans_i: need at least 2 observations");
    MoranParts parts;
    parts.centered = x.array() - x.mean();
    parts.denominator = parts.centered.squaredNorm();
    if (parts.denominator == 0.0)
        throw Error("morans_i: values have zero variance");
    parts.total_weight = w.total_weight();
    if (parts.total_weight <= 0.0)
        throw Error("morans_i: weights sum to zero (all observations are islands)");
    return parts;
}

double cross_product(const Vector& z, const SpatialWeights& w) {
    double num = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) {
        const double zi = z(static_cast<Eigen::Index>(i));
        double acc = 0.0;
        for (const auto& link : w.neighbors[i]) acc += link.weight * z(link.index);
        num += zi * acc;
    }
    return num;
}

double one_sided_or_two(double z, MoranAlternative alternative) {
    switch (alternative) {
        case MoranAlternative::Greater: return 1.0 - stats::normal_cdf(z);
        case MoranAlternative::Lower: return stats::normal_cdf(z);
        case MoranAlternative::TwoSided: return 2.0 * (1.0 - stats::normal_cdf(std::fabs(z)));
    }
    return 1.0;
}

// S1 = sum over unordered pairs of (w_ij + w_ji)^2; S2 = sum_i (row_i + col_i)^2.
void moments_sums(const SpatialWeights& w, double& s1, double& s2) {
    std::unordered_map<std::uint64_t, double> pair_sum;
    pair_sum.reserve(w.nonzero_links());
    std::vector<double> row_sum(w.n, 0.0), col_sum(w.n, 0.0);
    for (std::size_t i = 0; i < w.n; ++i)
        for (const auto& link : w.neighbors[i]) {
            row_sum[i] += link.weight;
            col_sum[link.index] += link.weight;
            const std::uint64_t a = std::min<std::uint64_t>(i, link.index);
            const std::uint64_t b = std::max<std::uint64_t>(i, link.index);
            pair_sum[(a << 32) | b] += link.weight;
        }
    s1 = 0.0;
    for (const auto& [key, total] : pair_sum) s1 += total * total;
    s2 = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) {
        const double t = row_sum[i] + col_sum[i];
        s2 += t * t;
    }
}

} // namespace

double morans_i_statistic(const Vector& x, const SpatialWeights& w) {
    const MoranParts parts = moran_parts(x, w);
    const double num = cross_product(parts.centered, w);
    return (static_cast<double>(w.n) / parts.total_weight) * num / parts.denominator;
}

MoranResult global_morans_i(const Vector& x, const SpatialWeights& w,
                            MoranInference inference, MoranAlternative alternative) {
    if (inference == MoranInference::Permutation)
        throw Error("global_morans_i: use permutation_morans_i for the permutation test");
    const MoranParts parts = moran_parts(x, w);
    const double n = static_cast<double>(w.n);
    const double W = parts.total_weight;

    MoranResult result;
    result.n = w.n;
    result.inference = inference;
    result.alternative = alternative;
    result.statistic =
        (n / W) * cross_product(parts.centered, w) / parts.denominator;
    result.expected = -1.0 / (n - 1.0);

    double s1 = 0.0, s2 = 0.0;
    moments_sums(w, s1, s2);
    const double W2 = W * W;
    if (inference == MoranInference::AnalyticalNormality) {
        result.variance = (n * n * s1 - n * s2 + 3.0 * W2) / (W2 * (n * n - 1.0)) -
                          result.expected * result.expected;
    } else {
        if (w.n < 4)
            throw Error("global_morans_i: randomization variance needs n >= 4");
        const double z4 = parts.centered.array().pow(4).sum();
        const double b2 = n * z4 / (parts.denominator * parts.denominator);
        const double num = n * ((n * n - 3.0 * n + 3.0) * s1 - n * s2 + 3.0 * W2) -
                           b2 * ((n * n - n) * s1 - 2.0 * n * s2 + 6.0 * W2);
        const double den = (n - 1.0) * (n - 2.0) * (n - 3.0) * W2;
        result.variance = num / den - result.expected * result.expected;
    }
    if (!(result.variance > 0.0))
        throw Error("global_morans_i: nonpositive variance, inference undefined");
    result.z_score = (result.statistic - result.expected) / std::sqrt(result.variance);
    result.p_value = one_sided_or_two(result.z_score, alternative);
    return result;
}

MoranResult permutation_morans_i(const Vector& x, const SpatialWeights& w,
                                 std::size_t n_permutations, std::uint64_t seed,
                                 MoranAlternative alternative) {
    if (n_permutations < 99)
        throw Error("permutation_morans_i: need at least 99 permutations");
    const MoranParts parts = moran_parts(x, w);
    const double scale = static_cast<double>(w.n) / (parts.total_weight * parts.denominator);
    const double observed = scale * cross_product(parts.centered, w);

    // The denominator and W are permutation-invariant, so each draw only
    // recomputes the cross product over a shuffled copy.
    std::vector<double> permuted(n_permutations);
    const auto count = static_cast<std::int64_t>(n_permutations);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t r = 0; r < count; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        std::vector<double> values(parts.centered.data(), parts.centered.data() + parts.centered.size());
        rng.shuffle(values);
        Eigen::Map<const Vector> z(values.data(), static_cast<Eigen::Index>(values.size()));
        permuted[static_cast<std::size_t>(r)] = scale * cross_product(z, w);
    }

    std::size_t greater_eq = 0, lower_eq = 0;
    double sum = 0.0;
    for (const double v : permuted) {
        if (v >= observed) ++greater_eq;
        if (v <= observed) ++lower_eq;
        sum += v;
    }
    const double mean = sum / static_cast<double>(n_permutations);
    double var = 0.0;
    for (const double v : permuted) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n_permutations - 1);

    MoranResult result;
    result.statistic = observed;
    result.expected = mean;
    result.variance = var;
    result.n = w.n;
    result.inference = MoranInference::Permutation;
    result.alternative = alternative;
    result.n_permutations = n_permutations;
    result.z_score = var > 0.0 ? (observed - mean) / std::sqrt(var) : 0.0;
    const double denom = 1.0 + static_cast<double>(n_permutations);
    const double p_greater = (1.0 + static_cast<double>(greater_eq)) / denom;
    const double p_lower = (1.0 + static_cast<double>(lower_eq)) / denom;
    switch (alternative) {
        case MoranAlternative::Greater: result.p_value = p_greater; break;
        case MoranAlternative::Lower: result.p_value = p_lower; break;
        case MoranAlternative::TwoSided:
            result.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_lower));
            break;
    }
    return result;
}

MoranResult exhaustive_permutation_morans_i(const Vector& x, const SpatialWeights& w,
                                            MoranAlternative alternative) {
    if (w.n > 8)
        throw Error("exhaustive_permutation_morans_i: n! enumeration limited to n <= 8");
    const MoranParts parts = moran_parts(x, w);
    const double scale = static_cast<double>(w.n) / (parts.total_weight * parts.denominator);
    const double observed = scale * cross_product(parts.centered, w);

    std::vector<std::size_t> order(w.n);
    std::iota(order.begin(), order.end(), 0);
    Vector z(static_cast<Eigen::Index>(w.n));
    std::size_t total = 0, greater_eq = 0, lower_eq = 0;
    double sum = 0.0, sum_sq = 0.0;
    do {
        for (std::size_t i = 0; i < w.n; ++i)
            z(static_cast<Eigen::Index>(i)) = parts.centered(static_cast<Eigen::Index>(order[i]));
        const double value = scale * cross_product(z, w);
        ++total;
        if (value >= observed - 1e-14 * std::max(1.0, std::fabs(observed))) ++greater_eq;
        if (value <= observed + 1e-14 * std::max(1.0, std::fabs(observed))) ++lower_eq;
        sum += value;
        sum_sq += value * value;
    } while (std::next_permutation(order.begin(), order.end()));

    MoranResult result;
    result.statistic = observed;
    result.n = w.n;
    result.inference = MoranInference::Permutation;
    result.alternative = alternative;
    result.n_permutations = total;
    result.expected = sum / static_cast<double>(total);
    result.variance = sum_sq / static_cast<double>(total) - result.expected * result.expected;
    result.z_score = result.variance > 0.0
                         ? (observed - result.expected) / std::sqrt(result.variance)
                         : 0.0;
    const double p_greater = static_cast<double>(greater_eq) / static_cast<double>(total);
    const double p_lower = static_cast<double>(lower_eq) / static_cast<double>(total);
    switch (alternative) {
        case MoranAlternative::Greater: result.p_value = p_greater; break;
        case MoranAlternative::Lower: result.p_value = p_lower; break;
        case MoranAlternative::TwoSided:
            result.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_lower));
            break;
    }
    return result;
}

MoranScatter moran_scatter(const Vector& x, const SpatialWeights& w) {
    if (!w.is_row_standardized())
        throw Error("moran_scatter: weights must be row-standardized");
    if (static_cast<std::size_t>(x.size()) != w.n)
        throw Error("moran_scatter: value vector length does not match weights");
    MoranScatter scatter;
    scatter.centered = x.array() - x.mean();
    scatter.lag = w.lag(scatter.centered);
    const double denom = scatter.centered.squaredNorm();
    if (denom == 0.0) throw Error("moran_scatter: values have zero variance");
    // Least-squares slope of lag on z; mean(z) = 0 makes the intercept drop out.
    scatter.slope = scatter.centered.dot(scatter.lag) / denom;
    return scatter;
}

} // namespace spatialreg
