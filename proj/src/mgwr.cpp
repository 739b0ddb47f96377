#include "spatialreg/mgwr.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/sar.hpp"
#include "spatialreg/stats.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spatialreg {

namespace {

double rms(const Vector& v) {
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

bool bandwidth_unchanged(double previous, double selected, BandwidthMode mode) {
    if (mode == BandwidthMode::AdaptiveNeighbors)
        return std::lround(previous) == std::lround(selected);
    return std::fabs(selected - previous) <= 1e-3 * std::max(std::fabs(previous), std::fabs(selected));
}

// 2SLS estimate of rho: project Wy onto the instrument space spanned by
// {1, X, WX, W^2 X} and regress the stage-1 partial residual on the
// projection.
double estimate_rho(const Matrix& X, const Vector& y, const Vector& partial_residual,
                    const SpatialWeights& w) {
    const auto n = X.rows();
    const auto p = X.cols() - 1; // predictors, intercept excluded from lagging
    Matrix z(n, 1 + 3 * p);
    z.col(0).setOnes();
    for (Eigen::Index j = 0; j < p; ++j) {
        const Vector xj = X.col(j + 1);
        const Vector wx = w.lag(xj);
        z.col(1 + j) = xj;
        z.col(1 + p + j) = wx;
        z.col(1 + 2 * p + j) = w.lag(wx);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(z);
    if (qr.rank() < z.cols())
        throw Error("mgwr_fit: singular instrument matrix {X, WX, W^2X}");
    const Vector lag_y = w.lag(y);
    const Vector projected = z * qr.solve(lag_y);
    const double denom = projected.squaredNorm();
    if (!(denom > 0.0))
        throw Error("mgwr_fit: instruments orthogonal to the spatial lag");
    return projected.dot(partial_residual) / denom;
}

} // namespace

MgwrFit mgwr_fit(const DesignMatrix& design, const PointSet& points, const SpatialWeights* w,
                 const MgwrConfig& config) {
    const auto n = static_cast<Eigen::Index>(design.n());
    const auto K = static_cast<Eigen::Index>(design.terms());
    if (static_cast<std::size_t>(n) != points.size())
        throw Error("mgwr_fit: design and points disagree on observation count");
    if (n < 50) throw Error("mgwr_fit: need n >= 50 for a meaningful calibration");
    if (config.spatial_lag) {
        if (!w) throw Error("mgwr_fit: spatial lag requested but no weights given");
        if (w->n != static_cast<std::size_t>(n))
            throw Error("mgwr_fit: weights size does not match observations");
        if (!w->is_row_standardized())
            throw Error("mgwr_fit: weights must be row-standardized for the lag term");
    }
    const bool fixed_bw = !config.fixed_bandwidths.empty();
    if (fixed_bw && config.fixed_bandwidths.size() != static_cast<std::size_t>(K))
        throw Error("mgwr_fit: fixed_bandwidths must supply one entry per design term");

    const Matrix& X = design.X;
    const Vector& y = design.y;
    const DistanceCache distances(points);
    const bool exact = static_cast<std::size_t>(n) <= config.hat_matrix_limit;
    const bool adaptive = config.kernel.mode == BandwidthMode::AdaptiveNeighbors;

    MgwrFit fit;
    fit.term_names = design.term_names;
    fit.exact_enp = exact;

    // Initialization: a single-bandwidth GWR seeds the additive terms and,
    // on the exact path, the per-covariate coefficient smoothers.
    Vector bandwidths(K);
    double init_bw;
    if (fixed_bw) {
        for (Eigen::Index k = 0; k < K; ++k) bandwidths(k) = config.fixed_bandwidths[static_cast<std::size_t>(k)];
        init_bw = bandwidths.maxCoeff();
    } else {
        init_bw = select_gwr_bandwidth(X, y, distances, config.kernel).bandwidth;
        bandwidths.setConstant(init_bw);
    }
    GwrSmoother init_smoother;
    const GwrFit init = gwr_fit_matrix(X, y, distances, config.kernel, init_bw, &points.ids,
                                       exact ? &init_smoother : nullptr);

    Matrix beta = init.local_coefficients; // n x K
    Matrix f(n, K);
    for (Eigen::Index k = 0; k < K; ++k) f.col(k) = beta.col(k).cwiseProduct(X.col(k));
    Vector additive = f.rowwise().sum();

    Matrix s_total;
    std::vector<Matrix> coef; // C_k: beta_k = C_k y
    if (exact) {
        s_total = std::move(init_smoother.total);
        coef = std::move(init_smoother.coefficient);
    }

    Vector enp_k = Vector::Zero(K);
    std::vector<std::size_t> stable(static_cast<std::size_t>(K), 0);
    std::vector<bool> frozen(static_cast<std::size_t>(K), fixed_bw);

    const double uni_lower = adaptive ? 3.0 : std::max(distances.min_positive_distance(),
                                                       1e-12 * std::max(1.0, distances.extent()));
    const double uni_upper = adaptive ? static_cast<double>(n) : distances.extent();

    bool converged = false;
    std::size_t iteration = 0;
    while (iteration < config.max_iterations && !converged) {
        ++iteration;
        const Vector additive_prev = additive;
        for (Eigen::Index k = 0; k < K; ++k) {
            const Vector partial = y - (additive - f.col(k));
            const Matrix xk = X.col(k);

            if (!frozen[static_cast<std::size_t>(k)]) {
                const auto objective = [&](double b) {
                    try {
                        return gwr_fit_matrix(xk, partial, distances, config.kernel, b).aicc;
                    } catch (const Error&) {
                        return std::numeric_limits<double>::infinity();
                    }
                };
                const BandwidthSearchResult sel =
                    golden_section_bandwidth(objective, uni_lower, uni_upper, adaptive);
                if (bandwidth_unchanged(bandwidths(k), sel.bandwidth, config.kernel.mode)) {
                    if (++stable[static_cast<std::size_t>(k)] >= config.bandwidth_freeze_after)
                        frozen[static_cast<std::size_t>(k)] = true;
                } else {
                    stable[static_cast<std::size_t>(k)] = 0;
                }
                bandwidths(k) = sel.bandwidth;
            }

            GwrSmoother uni_smoother;
            const GwrFit uni = gwr_fit_matrix(xk, partial, distances, config.kernel, bandwidths(k),
                                              &points.ids, exact ? &uni_smoother : nullptr);
            beta.col(k) = uni.local_coefficients.col(0);
            f.col(k) = beta.col(k).cwiseProduct(X.col(k));
            additive = f.rowwise().sum();

            if (exact) {
                // C_k' = A (I - S + S_k); S' = S + diag(x_k)(C_k' - C_k).
                const Matrix sk_old = X.col(k).asDiagonal() * coef[static_cast<std::size_t>(k)];
                Matrix m = sk_old - s_total;
                m.diagonal().array() += 1.0;
                coef[static_cast<std::size_t>(k)] = uni_smoother.coefficient[0] * m;
                s_total += X.col(k).asDiagonal() * coef[static_cast<std::size_t>(k)] - sk_old;
            } else {
                enp_k(k) = uni.trace_s;
            }
        }

        fit.rss_path.push_back((y - additive).squaredNorm());
        const double denom = rms(additive);
        const double change = rms(additive - additive_prev);
        const double soc = denom > 0.0 ? change / denom
                                       : (change > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        fit.soc_path.push_back(soc);
        converged = soc < config.soc_tolerance;
    }

    fit.converged = converged;
    fit.iterations = iteration;
    fit.coefficient_surfaces = beta;
    fit.bandwidths = bandwidths;
    fit.additive = additive;

    Matrix variance_factors(n, K);
    if (exact) {
        for (Eigen::Index k = 0; k < K; ++k) {
            const Matrix& ck = coef[static_cast<std::size_t>(k)];
            double trace = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                trace += X(i, k) * ck(i, i);
                variance_factors(i, k) = ck.row(i).squaredNorm();
            }
            enp_k(k) = trace;
        }
        fit.hat_diagonal = s_total.diagonal();
    } else {
        // Approximate path: one extra univariate pass per covariate at the
        // final bandwidths supplies variance factors and hat diagonals.
        fit.hat_diagonal = Vector::Zero(n);
        Matrix vf;
        for (Eigen::Index k = 0; k < K; ++k) {
            const Vector partial = y - (additive - f.col(k));
            const GwrFit uni = gwr_fit_matrix(X.col(k), partial, distances, config.kernel,
                                              bandwidths(k), &points.ids, nullptr, &vf);
            enp_k(k) = uni.trace_s;
            fit.hat_diagonal += uni.hat_diagonal;
            variance_factors.col(k) = vf.col(0);
        }
    }
    fit.enp_per_covariate = enp_k;
    fit.enp_total = enp_k.sum();

    // Stage 2: spatial autoregressive parameter on the partial residual.
    fit.rho = 0.0;
    if (config.spatial_lag) {
        fit.rho = estimate_rho(X, y, y - additive, *w);
        fit.rho_unstable = !(std::fabs(fit.rho) < 1.0);
    }
    if (config.spatial_lag && !fit.rho_unstable && fit.rho != 0.0) {
        fit.fitted = solve_simultaneous_lag(*w, fit.rho, additive);
        fit.lag_term = fit.rho * w->lag(fit.fitted);
    } else {
        fit.fitted = additive;
        fit.lag_term = Vector::Zero(n);
    }
    fit.residuals = y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.sigma2_mle = fit.rss / static_cast<double>(n);

    const double tss = (y.array() - y.mean()).square().sum();
    fit.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : 0.0;
    const double df_res = static_cast<double>(n) - fit.enp_total;
    fit.adj_r_squared = df_res > 1.0
                            ? 1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - 1.0) / (df_res - 1.0)
                            : std::numeric_limits<double>::quiet_NaN();
    fit.sigma2_residual = df_res > 0.0 ? fit.rss / df_res
                                       : std::numeric_limits<double>::quiet_NaN();
    try {
        fit.aicc = gwr_aicc(static_cast<std::size_t>(n), fit.enp_total, fit.sigma2_mle);
    } catch (const Error&) {
        fit.aicc = std::numeric_limits<double>::infinity();
    }

    fit.local_standard_errors.resize(n, K);
    fit.local_t_values.resize(n, K);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double se = std::sqrt(fit.sigma2_residual * variance_factors(i, k));
            fit.local_standard_errors(i, k) = se;
            fit.local_t_values(i, k) = se > 0.0 ? beta(i, k) / se : 0.0;
        }
    return fit;
}

SignificanceReport enp_and_inference(const MgwrFit& fit, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("enp_and_inference: alpha must be in (0, 1)");
    const auto n = static_cast<Eigen::Index>(fit.n());
    const auto K = static_cast<Eigen::Index>(fit.covariates());
    SignificanceReport report;
    report.alpha = alpha;
    report.df = static_cast<double>(n) - fit.enp_total;
    if (!(report.df > 0.0))
        throw Error("enp_and_inference: nonpositive degrees of freedom n - ENP");
    report.adjusted_alpha.resize(K);
    report.critical_t.resize(K);
    report.significant.resize(n, K);
    report.share_significant.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const double enp_k = fit.enp_per_covariate(k);
        if (!(enp_k > 0.0))
            throw Error("enp_and_inference: nonpositive ENP for covariate " +
                        fit.term_names[static_cast<std::size_t>(k)]);
        const double adj = std::min(alpha / enp_k, 1.0 - 1e-12);
        report.adjusted_alpha(k) = adj;
        report.critical_t(k) = stats::student_t_critical(adj, report.df);
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool sig = std::fabs(fit.local_t_values(i, k)) > report.critical_t(k);
            report.significant(i, k) = sig;
            count += sig ? 1 : 0;
        }
        report.share_significant(k) = static_cast<double>(count) / static_cast<double>(n);
    }
    return report;
}

namespace {

Vector cooks_from_parts(const Vector& residuals, const Vector& hat, double enp, double sigma2) {
    const auto n = residuals.size();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = hat(i);
        if (h >= 1.0) {
            d(i) = std::numeric_limits<double>::infinity();
            continue;
        }
        const double one_minus = 1.0 - h;
        d(i) = residuals(i) * residuals(i) * h / (enp * sigma2 * one_minus * one_minus);
    }
    return d;
}

} // namespace

Vector cooks_distance(const OlsFit& fit) {
    const double enp = static_cast<double>(fit.predictor_count) + 1.0;
    const double sigma2 = fit.rss / static_cast<double>(fit.df_residual);
    return cooks_from_parts(fit.residuals, fit.hat_diagonal, enp, sigma2);
}

Vector cooks_distance(const MgwrFit& fit) {
    return cooks_from_parts(fit.residuals, fit.hat_diagonal, fit.enp_total, fit.sigma2_residual);
}

MoranResult residual_moran_check(const MgwrFit& fit, const SpatialWeights& w,
                                 std::size_t n_permutations, std::uint64_t seed) {
    return permutation_morans_i(fit.residuals, w, n_permutations, seed);
}

Vector predict_surface(const MgwrFit& fit, const SpatialWeights* w) {
    if (fit.rho == 0.0) return fit.additive;
    if (!(std::fabs(fit.rho) < 1.0))
        throw Error("predict_surface: |rho| >= 1, simultaneous solve undefined");
    if (!w) throw Error("predict_surface: weights required when rho != 0");
    return solve_simultaneous_lag(*w, fit.rho, fit.additive);
}

} // namespace spatialreg
