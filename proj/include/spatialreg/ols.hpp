#ifndef SPATIALREG_OLS_HPP
#define SPATIALREG_OLS_HPP

#include "spatialreg/core_data.hpp"

#include <array>
#include <string>
#include <vector>

namespace spatialreg {

struct OlsFit {
    std::vector<std::string> term_names;
    Vector coefficients;
    Vector standard_errors;
    Vector t_values;
    Vector p_values;
    Vector residuals;
    Vector fitted;
    Vector hat_diagonal;
    std::array<double, 5> residual_quantiles{}; // min, Q1, median, Q3, max
    double residual_std_error = 0.0;
    std::size_t df_residual = 0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_statistic = 0.0;
    double f_p_value = 1.0;
    std::size_t predictor_count = 0;
    double sigma2_mle = 0.0;
    double rss = 0.0;
};

// Least-squares fit via column-pivoted QR. Throws on rank deficiency (the
// offending columns are named) and when n <= p + 1.
OlsFit ols_fit(const DesignMatrix& design);

struct FitStats {
    double f_statistic = 0.0;
    double adj_r_squared = 0.0;
    std::size_t n = 0; // reconstructed as p + df_residual + 1
};

// Recovers F and adjusted R^2 from (R^2, predictor count, residual df) alone.
FitStats derive_fit_stats(double r_squared, std::size_t predictors, std::size_t df_residual);

// R-style significance code for a p-value: *** / ** / * / . / empty.
std::string significance_code(double p_value);

} // namespace spatialreg

#endif
