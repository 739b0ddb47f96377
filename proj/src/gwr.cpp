#include "spatialreg/gwr.hpp"
#include "spatialreg/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spatialreg {

DistanceCache::DistanceCache(const PointSet& points, std::size_t cache_limit)
    : n_(points.size()), x_(points.x), y_(points.y) {
    if (n_ < 2) throw Error("DistanceCache: need at least 2 observations");
    use_cache_ = n_ <= cache_limit;

    double min_x = x_.minCoeff(), max_x = x_.maxCoeff();
    double min_y = y_.minCoeff(), max_y = y_.maxCoeff();
    extent_ = std::hypot(max_x - min_x, max_y - min_y);

    double min_pos = std::numeric_limits<double>::infinity();
    if (use_cache_) {
        cached_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            cached_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double d = std::hypot(x_(static_cast<Eigen::Index>(i)) - x_(static_cast<Eigen::Index>(j)),
                                            y_(static_cast<Eigen::Index>(i)) - y_(static_cast<Eigen::Index>(j)));
                cached_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
                cached_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
                if (d > 0.0) min_pos = std::min(min_pos, d);
            }
        }
    } else {
        Vector buf;
        for (std::size_t i = 0; i < n_; ++i) {
            row(i, buf);
            for (std::size_t j = 0; j < n_; ++j) {
                const double d = buf(static_cast<Eigen::Index>(j));
                if (d > 0.0) min_pos = std::min(min_pos, d);
            }
        }
    }
    min_positive_ = std::isfinite(min_pos) ? min_pos : 0.0;
}

void DistanceCache::row(std::size_t i, Vector& out) const {
    const auto n = static_cast<Eigen::Index>(n_);
    if (use_cache_ && cached_.size() > 0) {
        out = cached_.row(static_cast<Eigen::Index>(i));
        return;
    }
    out.resize(n);
    const double xi = x_(static_cast<Eigen::Index>(i));
    const double yi = y_(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < n; ++j)
        out(j) = std::hypot(x_(j) - xi, y_(j) - yi);
}

double gwr_aicc(std::size_t n, double trace_s, double sigma2_mle) {
    const double nd = static_cast<double>(n);
    if (trace_s >= nd - 2.0)
        throw Error("gwr_aicc: trace(S) = " + std::to_string(trace_s) +
                    " >= n - 2, AICc undefined");
    return nd * std::log(sigma2_mle) + nd * std::log(2.0 * M_PI) +
           nd * (nd + trace_s) / (nd - 2.0 - trace_s);
}

namespace {

// Local radius for adaptive kernels: k-th smallest distance (self included),
// inflated so the k-th point keeps a small positive weight.
double adaptive_radius(const Vector& distances, long k) {
    const auto n = distances.size();
    const long kk = std::clamp<long>(k, 1, n);
    std::vector<double> d(distances.data(), distances.data() + n);
    std::nth_element(d.begin(), d.begin() + (kk - 1), d.end());
    const double radius = d[static_cast<std::size_t>(kk - 1)];
    return radius > 0.0 ? radius * (1.0 + 1e-6) : 0.0;
}

struct LocalSolve {
    bool ok = false;
    bool insufficient = false;
};

} // namespace

GwrFit gwr_fit_matrix(const Matrix& X, const Vector& y, const DistanceCache& distances,
                      const KernelSpec& kernel, double bandwidth,
                      const std::vector<std::string>* ids, GwrSmoother* smoother,
                      Matrix* variance_factors) {
    const auto n = X.rows();
    const auto k = X.cols();
    if (y.size() != n) throw Error("gwr_fit: response length mismatch");
    if (static_cast<std::size_t>(n) != distances.n())
        throw Error("gwr_fit: distance cache does not match design rows");
    const auto min_neighbors = static_cast<Eigen::Index>(k) + 2;

    if (kernel.mode == BandwidthMode::FixedDistance && !(bandwidth > 0.0))
        throw Error("gwr_fit: fixed bandwidth must be positive");
    const long adaptive_k = std::lround(bandwidth);
    if (kernel.mode == BandwidthMode::AdaptiveNeighbors &&
        (adaptive_k < min_neighbors || adaptive_k > n))
        throw Error("gwr_fit: adaptive neighbor count " + std::to_string(adaptive_k) +
                    " outside [" + std::to_string(min_neighbors) + ", " + std::to_string(n) + "]");

    GwrFit fit;
    fit.kernel = kernel;
    fit.bandwidth = kernel.mode == BandwidthMode::AdaptiveNeighbors
                        ? static_cast<double>(adaptive_k)
                        : bandwidth;
    fit.local_coefficients.resize(n, k);
    fit.hat_diagonal.resize(n);
    fit.fitted.resize(n);
    if (smoother) {
        smoother->total = Matrix::Zero(n, n);
        smoother->coefficient.assign(static_cast<std::size_t>(k), Matrix::Zero(n, n));
    }
    if (variance_factors) variance_factors->resize(n, k);

    std::vector<LocalSolve> status(static_cast<std::size_t>(n));

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector dist;
        distances.row(static_cast<std::size_t>(i), dist);
        double radius = bandwidth;
        if (kernel.mode == BandwidthMode::AdaptiveNeighbors)
            radius = adaptive_radius(dist, adaptive_k);
        if (!(radius > 0.0)) {
            status[static_cast<std::size_t>(i)].insufficient = true;
            continue;
        }

        Vector w(n);
        Eigen::Index positive = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            w(j) = kernel_weight(dist(j), radius, kernel.family);
            if (w(j) > 0.0) ++positive;
        }
        if (positive < min_neighbors) {
            status[static_cast<std::size_t>(i)].insufficient = true;
            continue;
        }

        Matrix xtw(k, n); // X' W, kept for hat rows
        for (Eigen::Index j = 0; j < n; ++j) xtw.col(j) = X.row(j).transpose() * w(j);
        const Matrix xtwx = xtw * X;
        Eigen::LDLT<Matrix> ldlt(xtwx);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
        const Vector beta = ldlt.solve(xtw * y);
        if (!beta.allFinite()) continue;

        fit.local_coefficients.row(i) = beta.transpose();
        fit.fitted(i) = X.row(i) * beta;
        if (smoother || variance_factors) {
            const Matrix ci = ldlt.solve(xtw); // k x n
            if (smoother) {
                const Eigen::RowVectorXd si = X.row(i) * ci;
                smoother->total.row(i) = si;
                for (Eigen::Index t = 0; t < k; ++t)
                    smoother->coefficient[static_cast<std::size_t>(t)].row(i) = ci.row(t);
                fit.hat_diagonal(i) = si(i);
            } else {
                fit.hat_diagonal(i) = (X.row(i) * ci)(i);
            }
            if (variance_factors)
                for (Eigen::Index t = 0; t < k; ++t)
                    (*variance_factors)(i, t) = ci.row(t).squaredNorm();
        } else {
            const Vector xi = X.row(i).transpose();
            fit.hat_diagonal(i) = xi.dot(ldlt.solve(xi)) * w(i);
        }
        status[static_cast<std::size_t>(i)].ok = true;
    }

    std::string bad_ids;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < status.size(); ++i) {
        if (status[i].ok) continue;
        ++bad;
        if (bad <= 10) {
            if (!bad_ids.empty()) bad_ids += ", ";
            bad_ids += ids ? (*ids)[i] : std::to_string(i);
        }
    }
    if (bad > 0) {
        if (bad > 10) bad_ids += ", ...";
        bool any_insufficient = false;
        for (const auto& s : status) any_insufficient |= s.insufficient;
        throw Error(std::string("gwr_fit: ") +
                    (any_insufficient ? "insufficient effective neighbors"
                                      : "singular local system") +
                    " at " + std::to_string(bad) + " location(s): " + bad_ids);
    }

    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.trace_s = fit.hat_diagonal.sum();
    fit.sigma2_mle = fit.rss / static_cast<double>(n);
    fit.aicc = gwr_aicc(static_cast<std::size_t>(n), fit.trace_s, fit.sigma2_mle);
    return fit;
}

GwrFit gwr_fit(const DesignMatrix& design, const PointSet& points, const KernelSpec& kernel,
               double bandwidth, GwrSmoother* smoother) {
    const DistanceCache distances(points);
    return gwr_fit_matrix(design.X, design.y, distances, kernel, bandwidth, &points.ids, smoother);
}

BandwidthSearchResult select_gwr_bandwidth(const Matrix& X, const Vector& y,
                                           const DistanceCache& distances,
                                           const KernelSpec& kernel) {
    const auto n = static_cast<double>(distances.n());
    const auto objective = [&](double bw) {
        try {
            return gwr_fit_matrix(X, y, distances, kernel, bw, nullptr, nullptr).aicc;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    if (kernel.mode == BandwidthMode::AdaptiveNeighbors) {
        const double lower = static_cast<double>(X.cols()) + 2.0;
        return golden_section_bandwidth(objective, lower, n, /*integer_search=*/true);
    }
    double lower = distances.min_positive_distance();
    if (!(lower > 0.0)) lower = 1e-12 * std::max(1.0, distances.extent());
    return golden_section_bandwidth(objective, lower, distances.extent(), /*integer_search=*/false);
}

BandwidthSearchResult select_gwr_bandwidth(const DesignMatrix& design, const PointSet& points,
                                           const KernelSpec& kernel) {
    const DistanceCache distances(points);
    return select_gwr_bandwidth(design.X, design.y, distances, kernel);
}

} // namespace spatialreg
