#ifndef SPATIALREG_MGWR_HPP
#define SPATIALREG_MGWR_HPP

#include "spatialreg/autocorr.hpp"
#include "spatialreg/gwr.hpp"
#include "spatialreg/ols.hpp"
#include "spatialreg/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spatialreg {

struct MgwrConfig {
    KernelSpec kernel{};
    bool spatial_lag = true;
    double soc_tolerance = 1e-5;
    std::size_t max_iterations = 200;
    // Explicit per-covariate smoother matrices (exact ENP_k) are kept up to
    // this many observations; above it the trace of each covariate's last
    // univariate smoother is used instead.
    std::size_t hat_matrix_limit = 5000;
    // A covariate's bandwidth is frozen once re-selection leaves it unchanged
    // this many outer iterations in a row.
    std::size_t bandwidth_freeze_after = 3;
    // Skips bandwidth search entirely when set (one entry per design term).
    std::vector<double> fixed_bandwidths;
};

struct MgwrFit {
    std::vector<std::string> term_names;
    Matrix coefficient_surfaces; // n x K, K = predictor count + 1
    Vector bandwidths;           // per covariate, intercept first
    double rho = 0.0;
    bool rho_unstable = false; // |rho_hat| >= 1; fitted falls back to the additive part

    Vector additive;  // sum_k beta_k(u_i, v_i) x_ik
    Vector fitted;    // (I - rho W)^-1 additive
    Vector lag_term;  // rho (W fitted)
    Vector residuals; // y - fitted

    double rss = 0.0;
    double sigma2_mle = 0.0;      // RSS / n
    double sigma2_residual = 0.0; // RSS / (n - ENP), drives standard errors
    double aicc = 0.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;

    Vector enp_per_covariate;
    double enp_total = 0.0;
    Vector hat_diagonal;
    Matrix local_standard_errors; // n x K
    Matrix local_t_values;        // n x K

    bool converged = false;
    std::size_t iterations = 0;
    bool exact_enp = true;         // which ENP path ran
    std::vector<double> rss_path;  // additive-part RSS after each outer iteration
    std::vector<double> soc_path;  // SOC-f after each outer iteration

    std::size_t n() const { return static_cast<std::size_t>(coefficient_surfaces.rows()); }
    std::size_t covariates() const { return static_cast<std::size_t>(coefficient_surfaces.cols()); }
};

// Two-stage calibration: backfitting with per-covariate AICc bandwidths
// first, then (with bandwidths frozen) a two-stage least-squares estimate of
// the spatial autoregressive parameter on the partial residual, instrumented
// by {X, WX, W^2 X}. `w` may be null when config.spatial_lag is false; it
// must be row-standardized otherwise.
MgwrFit mgwr_fit(const DesignMatrix& design, const PointSet& points, const SpatialWeights* w,
                 const MgwrConfig& config = {});

struct SignificanceReport {
    double alpha = 0.05;
    double df = 0.0; // n - ENP
    Vector adjusted_alpha; // alpha / ENP_k
    Vector critical_t;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> significant; // n x K
    Vector share_significant;
};

// Per-covariate adjusted significance: alpha*_k = alpha / ENP_k, critical t
// from Student-t with df = n - ENP_total.
SignificanceReport enp_and_inference(const MgwrFit& fit, double alpha = 0.05);

// D_i = e_i^2 h_ii / (ENP sigma^2 (1 - h_ii)^2); h_ii = 1 yields +infinity.
// The OLS overload reduces to the textbook Cook's distance.
Vector cooks_distance(const OlsFit& fit);
Vector cooks_distance(const MgwrFit& fit);

// Permutation Moran's I on the fit residuals.
MoranResult residual_moran_check(const MgwrFit& fit, const SpatialWeights& w,
                                 std::size_t n_permutations = 999, std::uint64_t seed = 0);

// In-sample prediction: solves y_hat = rho W y_hat + additive.
Vector predict_surface(const MgwrFit& fit, const SpatialWeights* w);

struct DiagnosticsReport {
    SignificanceReport significance;
    Vector cooks;
    std::optional<MoranResult> residual_moran;
};

} // namespace spatialreg

#endif
