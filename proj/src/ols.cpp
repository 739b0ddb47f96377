#include "spatialreg/ols.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/stats.hpp"

#include <Eigen/QR>

#include <cmath>

namespace spatialreg {

OlsFit ols_fit(const DesignMatrix& design) {
    const auto n = static_cast<Eigen::Index>(design.n());
    const auto k = static_cast<Eigen::Index>(design.terms());
    const Eigen::Index p = k - 1;
    if (p < 1) throw Error("ols_fit: need at least one predictor");
    if (n <= k)
        throw Error("ols_fit: n = " + std::to_string(n) + " too small for " +
                    std::to_string(k) + " terms");

    Eigen::ColPivHouseholderQR<Matrix> qr(design.X);
    if (qr.rank() < k) {
        const auto& perm = qr.colsPermutation().indices();
        std::string offending;
        for (Eigen::Index j = qr.rank(); j < k; ++j) {
            if (!offending.empty()) offending += ", ";
            offending += design.term_names[static_cast<std::size_t>(perm(j))];
        }
        throw Error("ols_fit: design matrix is rank deficient (columns: " + offending + ")");
    }

    OlsFit fit;
    fit.term_names = design.term_names;
    fit.predictor_count = static_cast<std::size_t>(p);
    fit.coefficients = qr.solve(design.y);
    fit.fitted = design.X * fit.coefficients;
    fit.residuals = design.y - fit.fitted;
    fit.rss = fit.residuals.squaredNorm();
    fit.df_residual = static_cast<std::size_t>(n - k);
    fit.sigma2_mle = fit.rss / static_cast<double>(n);
    const double sigma2 = fit.rss / static_cast<double>(fit.df_residual);
    fit.residual_std_error = std::sqrt(sigma2);

    // (X'X)^-1 = P R^-1 R^-T P'; k is small so the dense inverse is fine.
    const Matrix r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Matrix r_inv = r.inverse();
    const Matrix a = qr.colsPermutation() * r_inv; // (X'X)^-1 = a a'
    fit.standard_errors.resize(k);
    for (Eigen::Index j = 0; j < k; ++j)
        fit.standard_errors(j) = std::sqrt(sigma2 * a.row(j).squaredNorm());

    // Hat diagonal h_i = || R^-T P' x_i ||^2.
    const Matrix c = a.transpose() * design.X.transpose(); // k x n
    fit.hat_diagonal.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        fit.hat_diagonal(i) = c.col(i).squaredNorm();

    fit.t_values.resize(k);
    fit.p_values.resize(k);
    const double df = static_cast<double>(fit.df_residual);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.t_values(j) = fit.coefficients(j) / fit.standard_errors(j);
        fit.p_values(j) = stats::student_t_two_sided_p(fit.t_values(j), df);
    }

    const double tss = (design.y.array() - design.y.mean()).square().sum();
    if (tss == 0.0) throw Error("ols_fit: response has zero variance");
    fit.r_squared = 1.0 - fit.rss / tss;

    std::vector<double> res(fit.residuals.data(), fit.residuals.data() + n);
    fit.residual_quantiles = {stats::quantile_type7(res, 0.0), stats::quantile_type7(res, 0.25),
                              stats::quantile_type7(res, 0.5), stats::quantile_type7(res, 0.75),
                              stats::quantile_type7(res, 1.0)};

    if (fit.r_squared >= 1.0) {
        // Exact fit: F is infinite, adjusted R^2 is 1.
        fit.adj_r_squared = 1.0;
        fit.f_statistic = std::numeric_limits<double>::infinity();
        fit.f_p_value = 0.0;
    } else {
        const FitStats derived =
            derive_fit_stats(fit.r_squared, fit.predictor_count, fit.df_residual);
        fit.adj_r_squared = derived.adj_r_squared;
        fit.f_statistic = derived.f_statistic;
        fit.f_p_value = stats::f_sf(fit.f_statistic, static_cast<double>(p), df);
    }
    return fit;
}

FitStats derive_fit_stats(double r_squared, std::size_t predictors, std::size_t df_residual) {
    if (predictors < 1) throw Error("derive_fit_stats: predictor count must be >= 1");
    if (df_residual < 1) throw Error("derive_fit_stats: residual df must be >= 1");
    if (!(r_squared >= 0.0))
        throw Error("derive_fit_stats: r_squared must be in [0, 1)");
    if (r_squared >= 1.0)
        throw Error("derive_fit_stats: r_squared = 1 makes the F-statistic infinite");
    FitStats out;
    out.n = predictors + df_residual + 1;
    const double p = static_cast<double>(predictors);
    const double df = static_cast<double>(df_residual);
    out.f_statistic = (r_squared / p) / ((1.0 - r_squared) / df);
    out.adj_r_squared =
        1.0 - (1.0 - r_squared) * (static_cast<double>(out.n) - 1.0) / df;
    return out;
}

std::string significance_code(double p_value) {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    if (p_value < 0.1) return ".";
    return "";
}

} // namespace spatialreg
