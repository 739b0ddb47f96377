#ifndef SPATIALREG_BANDWIDTH_HPP
#define SPATIALREG_BANDWIDTH_HPP

#include <cstddef>
#include <functional>

namespace spatialreg {

struct BandwidthSearchResult {
    double bandwidth = 0.0;
    double score = 0.0;
    std::size_t evaluations = 0;
};

// Golden-section minimization of a bandwidth objective on [lower, upper].
// Non-finite objective values are treated as +infinity and skipped; if every
// evaluation is non-finite the search fails. For unimodal objectives the
// result is within tolerance of the minimum; otherwise it is a local minimum.
//
// integer_search rounds candidates to whole neighbor counts, memoizes
// evaluations, and finishes with an exhaustive scan once the bracket is
// small, so unimodal integer objectives return their exact minimizer.
BandwidthSearchResult golden_section_bandwidth(const std::function<double(double)>& objective,
                                               double lower, double upper,
                                               bool integer_search = false,
                                               double tolerance_fraction = 1e-5);

} // namespace spatialreg

#endif
