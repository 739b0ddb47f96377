#ifndef SPATIALREG_REPORTS_HPP
#define SPATIALREG_REPORTS_HPP

#include "spatialreg/autocorr.hpp"
#include "spatialreg/mgwr.hpp"
#include "spatialreg/ols.hpp"
#include "spatialreg/weights.hpp"

#include <string>

namespace spatialreg {

// Moran's I block: statistic, expectation, variance, z, p, plus the weights
// summary (regions, links, average links, islands).
std::string format_moran_report(const MoranResult& moran, const WeightsSummary& summary);

// R-style coefficient table with significance codes, residual quantiles,
// residual standard error, R^2 / adjusted R^2 and the F test.
std::string format_ols_report(const OlsFit& fit);

// Side-by-side global OLS vs MGWR diagnostics block.
std::string format_mgwr_report(const OlsFit& ols, const MgwrFit& mgwr);

std::string format_diagnostics_report(const MgwrFit& fit, const DiagnosticsReport& diagnostics);

} // namespace spatialreg

#endif
