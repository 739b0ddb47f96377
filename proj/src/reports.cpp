#include "spatialreg/reports.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace spatialreg {

namespace {

std::string num(double v, const char* fmt = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string pvalue(double p) {
    if (p < 0.001) return "< 0.001";
    return num(p, "%.4f");
}

void line(std::ostringstream& out, const std::string& label, const std::string& value) {
    out << label;
    for (std::size_t i = label.size(); i < 34; ++i) out << ' ';
    out << value << '\n';
}

} // namespace

std::string format_moran_report(const MoranResult& moran, const WeightsSummary& summary) {
    std::ostringstream out;
    out << "Global Moran's I test\n";
    out << "---------------------\n";
    line(out, "Moran's I", num(moran.statistic));
    line(out, "Expected I", num(moran.expected));
    line(out, "Variance", num(moran.variance));
    line(out, "Standard Deviate (z-score)", num(moran.z_score, "%.4f"));
    const char* tail = moran.alternative == MoranAlternative::Greater
                           ? "greater"
                           : (moran.alternative == MoranAlternative::Lower ? "lower" : "two-sided");
    line(out, "p-value", pvalue(moran.p_value) + " (" + tail + ")");
    line(out, "Inference",
         moran.inference == MoranInference::Permutation
             ? "permutation (" + std::to_string(moran.n_permutations) + " draws)"
             : (moran.inference == MoranInference::AnalyticalNormality ? "analytical (normality)"
                                                                       : "analytical (randomization)"));
    out << '\n';
    line(out, "Number of Regions (n)", std::to_string(summary.n_regions));
    line(out, "Non-zero Links", std::to_string(summary.nonzero_links));
    line(out, "Average Links per Region", num(summary.average_links, "%.2f"));
    line(out, "Regions with No Links", std::to_string(summary.islands));
    return out.str();
}

std::string format_ols_report(const OlsFit& fit) {
    std::ostringstream out;
    out << "Global OLS regression\n";
    out << "---------------------\n";
    out << "Residuals:\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "  Min %.6g  1Q %.6g  Median %.6g  3Q %.6g  Max %.6g\n\n",
                  fit.residual_quantiles[0], fit.residual_quantiles[1], fit.residual_quantiles[2],
                  fit.residual_quantiles[3], fit.residual_quantiles[4]);
    out << buf;

    out << "Coefficients:\n";
    std::size_t width = 12;
    for (const auto& name : fit.term_names) width = std::max(width, name.size());
    std::snprintf(buf, sizeof(buf), "  %-*s %14s %14s %10s %12s\n", static_cast<int>(width),
                  "Term", "Estimate", "Std. Error", "t value", "Pr(>|t|)");
    out << buf;
    for (std::size_t j = 0; j < fit.term_names.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        std::snprintf(buf, sizeof(buf), "  %-*s %14.6g %14.6g %10.3f %12s %s\n",
                      static_cast<int>(width), fit.term_names[j].c_str(), fit.coefficients(idx),
                      fit.standard_errors(idx), fit.t_values(idx), pvalue(fit.p_values(idx)).c_str(),
                      significance_code(fit.p_values(idx)).c_str());
        out << buf;
    }
    out << "  Signif. codes: *** 0.001, ** 0.01, * 0.05, . 0.1\n\n";

    std::snprintf(buf, sizeof(buf), "Residual standard error: %.6g on %zu degrees of freedom\n",
                  fit.residual_std_error, fit.df_residual);
    out << buf;
    std::snprintf(buf, sizeof(buf), "Multiple R-squared: %.4f, Adjusted R-squared: %.4f\n",
                  fit.r_squared, fit.adj_r_squared);
    out << buf;
    std::snprintf(buf, sizeof(buf), "F-statistic: %.4g on %zu and %zu DF, p-value: %s\n",
                  fit.f_statistic, fit.predictor_count, fit.df_residual,
                  pvalue(fit.f_p_value).c_str());
    out << buf;
    std::snprintf(buf, sizeof(buf), "Sigma-squared MLE: %.6g\n", fit.sigma2_mle);
    out << buf;
    return out.str();
}

std::string format_mgwr_report(const OlsFit& ols, const MgwrFit& mgwr) {
    std::ostringstream out;
    out << "Model diagnostics\n";
    out << "-----------------\n";
    char buf[200];
    const auto row = [&](const char* label, const std::string& a, const std::string& b) {
        std::snprintf(buf, sizeof(buf), "%-28s %18s %18s\n", label, a.c_str(), b.c_str());
        out << buf;
    };
    const double n = static_cast<double>(mgwr.n());
    row("Diagnostic", "Global OLS", "MGWR");
    row("R-Squared", num(ols.r_squared, "%.4f"), num(mgwr.r_squared, "%.4f"));
    row("Adjusted R-Squared", num(ols.adj_r_squared, "%.4f"), num(mgwr.adj_r_squared, "%.4f"));
    row("AICc", "---", num(mgwr.aicc, "%.2f"));
    row("Residual Std. Error", num(ols.residual_std_error), "---");
    row("Sigma-Squared MLE", num(ols.sigma2_mle), num(mgwr.sigma2_mle));
    row("F-Statistic", num(ols.f_statistic, "%.4g"), "---");
    row("p-value (F)", pvalue(ols.f_p_value), "---");
    row("Effective Parameters (ENP)", num(static_cast<double>(ols.predictor_count) + 1.0, "%.2f"),
        num(mgwr.enp_total, "%.2f"));
    row("Residual DoF (n - ENP)", std::to_string(ols.df_residual), num(n - mgwr.enp_total, "%.2f"));
    out << '\n';

    out << "Spatial lag: rho = " << num(mgwr.rho, "%.4f");
    if (mgwr.rho_unstable) out << "  [unstable: |rho| >= 1]";
    out << '\n';
    out << "Converged: " << (mgwr.converged ? "yes" : "no") << " after "
        << mgwr.iterations << " iteration(s)\n";
    out << "ENP path: " << (mgwr.exact_enp ? "exact smoother accumulation" : "hat-diagonal approximation")
        << '\n';
    out << '\n';

    std::size_t width = 12;
    for (const auto& name : mgwr.term_names) width = std::max(width, name.size());
    std::snprintf(buf, sizeof(buf), "%-*s %14s %12s\n", static_cast<int>(width), "Covariate",
                  "Bandwidth", "ENP_k");
    out << buf;
    for (std::size_t k = 0; k < mgwr.term_names.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%-*s %14.6g %12.3f\n", static_cast<int>(width),
                      mgwr.term_names[k].c_str(), mgwr.bandwidths(static_cast<Eigen::Index>(k)),
                      mgwr.enp_per_covariate(static_cast<Eigen::Index>(k)));
        out << buf;
    }
    return out.str();
}

std::string format_diagnostics_report(const MgwrFit& fit, const DiagnosticsReport& diagnostics) {
    std::ostringstream out;
    out << "MGWR diagnostics\n";
    out << "----------------\n";
    if (diagnostics.residual_moran) {
        const auto& m = *diagnostics.residual_moran;
        out << "Residual Moran's I: I = " << num(m.statistic, "%.4f")
            << ", p = " << num(m.p_value, "%.4f") << " ("
            << std::to_string(m.n_permutations) << " permutations)\n";
    }
    double max_cooks = 0.0;
    Eigen::Index argmax = 0;
    for (Eigen::Index i = 0; i < diagnostics.cooks.size(); ++i)
        if (diagnostics.cooks(i) > max_cooks) {
            max_cooks = diagnostics.cooks(i);
            argmax = i;
        }
    out << "Cook's distance: max = " << num(max_cooks) << " at observation " << argmax << '\n';
    out << '\n';

    char buf[200];
    std::size_t width = 12;
    for (const auto& name : fit.term_names) width = std::max(width, name.size());
    std::snprintf(buf, sizeof(buf), "%-*s %14s %14s %18s\n", static_cast<int>(width), "Covariate",
                  "alpha*_k", "critical t", "share significant");
    out << buf;
    for (std::size_t k = 0; k < fit.term_names.size(); ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        std::snprintf(buf, sizeof(buf), "%-*s %14.6g %14.4f %18.4f\n", static_cast<int>(width),
                      fit.term_names[k].c_str(), diagnostics.significance.adjusted_alpha(idx),
                      diagnostics.significance.critical_t(idx),
                      diagnostics.significance.share_significant(idx));
        out << buf;
    }
    return out.str();
}

} // namespace spatialreg
