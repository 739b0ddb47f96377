#include "spatialreg/bandwidth.hpp"
#include "spatialreg/error.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace spatialreg {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;

double sanitize(double value) {
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

BandwidthSearchResult golden_continuous(const std::function<double(double)>& objective,
                                        double lower, double upper, double tol) {
    std::size_t evals = 0;
    auto eval = [&](double x) {
        ++evals;
        return sanitize(objective(x));
    };

    double a = lower, b = upper;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    double best_x = f1 <= f2 ? x1 : x2;
    double best_f = std::min(f1, f2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = eval(x2);
        }
        if (f1 < best_f) { best_f = f1; best_x = x1; }
        if (f2 < best_f) { best_f = f2; best_x = x2; }
    }
    // Also consider the interval endpoints for boundary minima.
    const double fa = eval(lower);
    if (fa < best_f) { best_f = fa; best_x = lower; }
    const double fb = eval(upper);
    if (fb < best_f) { best_f = fb; best_x = upper; }
    if (!std::isfinite(best_f))
        throw Error("golden_section_bandwidth: objective non-finite everywhere on the interval");
    return {best_x, best_f, evals};
}

BandwidthSearchResult golden_integer(const std::function<double(double)>& objective,
                                     long lower, long upper) {
    std::map<long, double> cache;
    std::size_t evals = 0;
    auto eval = [&](long k) {
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
        ++evals;
        const double value = sanitize(objective(static_cast<double>(k)));
        cache.emplace(k, value);
        return value;
    };

    double a = static_cast<double>(lower), b = static_cast<double>(upper);
    while (b - a > 4.0) {
        const long x1 = static_cast<long>(std::lround(b - kInvPhi * (b - a)));
        const long x2 = static_cast<long>(std::lround(a + kInvPhi * (b - a)));
        if (x1 >= x2) break;
        if (eval(x1) <= eval(x2))
            b = static_cast<double>(x2);
        else
            a = static_cast<double>(x1);
    }
    long best_k = lower;
    double best_f = std::numeric_limits<double>::infinity();
    for (long k = static_cast<long>(std::floor(a)); k <= static_cast<long>(std::ceil(b)); ++k) {
        const double f = eval(k);
        if (f < best_f) { best_f = f; best_k = k; }
    }
    if (!std::isfinite(best_f))
        throw Error("golden_section_bandwidth: objective non-finite everywhere on the interval");
    return {static_cast<double>(best_k), best_f, evals};
}

} // namespace

BandwidthSearchResult golden_section_bandwidth(const std::function<double(double)>& objective,
                                               double lower, double upper, bool integer_search,
                                               double tolerance_fraction) {
    if (!(lower < upper))
        throw Error("golden_section_bandwidth: interval lower bound must be below upper bound");
    if (integer_search)
        return golden_integer(objective, static_cast<long>(std::ceil(lower)),
                              static_cast<long>(std::floor(upper)));
    return golden_continuous(objective, lower, upper, tolerance_fraction * (upper - lower));
}

} // namespace spatialreg
