#ifndef SPATIALREG_GWR_HPP
#define SPATIALREG_GWR_HPP

#include "spatialreg/bandwidth.hpp"
#include "spatialreg/core_data.hpp"
#include "spatialreg/kernels.hpp"

#include <memory>
#include <string>
#include <vector>

namespace spatialreg {

// Pairwise Euclidean distances, materialized once for n below the cache
// limit and recomputed per row above it.
class DistanceCache {
public:
    explicit DistanceCache(const PointSet& points, std::size_t cache_limit = 20000);

    std::size_t n() const { return n_; }
    // Distances from observation i to all observations (out resized to n).
    void row(std::size_t i, Vector& out) const;
    // Bounding-box diagonal; used as the fixed-bandwidth search upper bound.
    double extent() const { return extent_; }
    double min_positive_distance() const { return min_positive_; }

private:
    std::size_t n_;
    Vector x_, y_;
    Matrix cached_; // n x n when cached, 0 x 0 otherwise
    bool use_cache_;
    double extent_ = 0.0;
    double min_positive_ = 0.0;
};

// Smoother machinery of a GWR fit, assembled on request. `total` is the hat
// matrix S. `coefficient[t]` maps y to the local coefficient of term t
// (row i = c_i of the weighted solve at i), so the per-term hat matrix is
// diag(X col t) * coefficient[t].
struct GwrSmoother {
    Matrix total;
    std::vector<Matrix> coefficient;
};

struct GwrFit {
    Matrix local_coefficients; // n x k
    Vector hat_diagonal;
    Vector residuals;
    Vector fitted;
    double trace_s = 0.0;
    double aicc = 0.0;
    double sigma2_mle = 0.0;
    double rss = 0.0;
    double bandwidth = 0.0; // distance, or neighbor count in adaptive mode
    KernelSpec kernel;
};

// Kernel-weighted least squares centered at every location. The adaptive
// bandwidth is a neighbor count k: the local radius is the k-th smallest
// distance (self included), inflated by 1e-6 so the k-th point keeps a
// positive weight. Throws when any location has fewer than p + 2 positive
// weights (offending ids listed) or when trace(S) >= n - 2 (AICc undefined).
// variance_factors, when given, receives ||c_i row t||^2 per location and
// term; local coefficient variances are sigma^2 times these.
GwrFit gwr_fit_matrix(const Matrix& X, const Vector& y, const DistanceCache& distances,
                      const KernelSpec& kernel, double bandwidth,
                      const std::vector<std::string>* ids = nullptr,
                      GwrSmoother* smoother = nullptr,
                      Matrix* variance_factors = nullptr);

GwrFit gwr_fit(const DesignMatrix& design, const PointSet& points, const KernelSpec& kernel,
               double bandwidth, GwrSmoother* smoother = nullptr);

// AICc = n ln(sigma^2) + n ln(2 pi) + n (n + tr S) / (n - 2 - tr S).
double gwr_aicc(std::size_t n, double trace_s, double sigma2_mle);

// Golden-section AICc search over the default interval: [p + 2, n] neighbors
// (adaptive) or [min positive pairwise distance, extent] (fixed).
BandwidthSearchResult select_gwr_bandwidth(const Matrix& X, const Vector& y,
                                           const DistanceCache& distances,
                                           const KernelSpec& kernel);

BandwidthSearchResult select_gwr_bandwidth(const DesignMatrix& design, const PointSet& points,
                                           const KernelSpec& kernel);

} // namespace spatialreg

#endif
