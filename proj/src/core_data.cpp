#include "spatialreg/core_data.hpp"
#include "spatialreg/error.hpp"

#include <cmath>
#include <unordered_set>

namespace spatialreg {

namespace {

bool row_is_finite(const Dataset& ds, Eigen::Index i) {
    if (!std::isfinite(ds.points.x(i)) || !std::isfinite(ds.points.y(i))) return false;
    if (!std::isfinite(ds.response(i))) return false;
    for (Eigen::Index j = 0; j < ds.predictors.cols(); ++j)
        if (!std::isfinite(ds.predictors(i, j))) return false;
    return true;
}

void check_shapes(const Dataset& ds) {
    const auto n = static_cast<Eigen::Index>(ds.points.size());
    if (ds.points.x.size() != n || ds.points.y.size() != n)
        throw Error("dataset: coordinate arrays do not match id count");
    if (ds.response.size() != n)
        throw Error("dataset: response length " + std::to_string(ds.response.size()) +
                    " does not match observation count " + std::to_string(n));
    if (ds.predictors.rows() != n && ds.predictor_count() > 0)
        throw Error("dataset: predictor rows do not match observation count");
    if (static_cast<std::size_t>(ds.predictors.cols()) != ds.predictor_count())
        throw Error("dataset: predictor matrix does not match predictor names");
    std::unordered_set<std::string> names(ds.predictor_names.begin(), ds.predictor_names.end());
    if (names.size() != ds.predictor_names.size())
        throw Error("dataset: duplicate predictor names");
}

} // namespace

Dataset validate_dataset(const Dataset& raw, ValidationReport* report) {
    check_shapes(raw);

    std::unordered_set<std::string> seen;
    for (const auto& id : raw.points.ids)
        if (!seen.insert(id).second)
            throw Error("validate_dataset: duplicate id '" + id + "'");

    const auto n = static_cast<Eigen::Index>(raw.size());
    std::vector<Eigen::Index> keep;
    keep.reserve(raw.size());
    ValidationReport local;
    local.n_input = raw.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (row_is_finite(raw, i))
            keep.push_back(i);
        else
            local.dropped_ids.push_back(raw.points.ids[static_cast<std::size_t>(i)]);
    }
    local.n_kept = keep.size();
    if (keep.size() < 3)
        throw Error("validate_dataset: fewer than 3 valid rows (" +
                    std::to_string(keep.size()) + " kept of " + std::to_string(raw.size()) + ")");

    Dataset out;
    out.response_name = raw.response_name;
    out.predictor_names = raw.predictor_names;
    const auto m = static_cast<Eigen::Index>(keep.size());
    out.points.ids.reserve(keep.size());
    out.points.x.resize(m);
    out.points.y.resize(m);
    out.response.resize(m);
    out.predictors.resize(m, raw.predictors.cols());
    for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index i = keep[static_cast<std::size_t>(r)];
        out.points.ids.push_back(raw.points.ids[static_cast<std::size_t>(i)]);
        out.points.x(r) = raw.points.x(i);
        out.points.y(r) = raw.points.y(i);
        out.response(r) = raw.response(i);
        out.predictors.row(r) = raw.predictors.row(i);
    }

    const double mean = out.response.mean();
    if ((out.response.array() - mean).abs().maxCoeff() == 0.0)
        throw Error("validate_dataset: response '" + out.response_name + "' has zero variance");

    if (report) *report = local;
    return out;
}

DesignMatrix build_design(const Dataset& ds, bool standardize) {
    check_shapes(ds);
    const auto n = static_cast<Eigen::Index>(ds.size());
    const auto p = static_cast<Eigen::Index>(ds.predictor_count());

    DesignMatrix design;
    design.X.resize(n, p + 1);
    design.X.col(0).setOnes();
    design.y = ds.response;
    design.term_names.reserve(ds.predictor_count() + 1);
    design.term_names.emplace_back("(Intercept)");
    for (const auto& name : ds.predictor_names) design.term_names.push_back(name);
    design.standardized = standardize;
    design.column_means.resize(p);
    design.column_sds.resize(p);

    for (Eigen::Index j = 0; j < p; ++j) {
        const Vector col = ds.predictors.col(j);
        const double mean = col.mean();
        // Population SD, divisor n.
        const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n));
        design.column_means(j) = mean;
        design.column_sds(j) = sd;
        if (standardize) {
            if (sd == 0.0)
                throw Error("build_design: predictor '" + ds.predictor_names[static_cast<std::size_t>(j)] +
                            "' has zero variance, cannot standardize");
            design.X.col(j + 1) = (col.array() - mean) / sd;
        } else {
            design.X.col(j + 1) = col;
        }
    }
    return design;
}

Vector destandardize_coefficients(const DesignMatrix& design, const Vector& standardized_coeffs) {
    if (!design.standardized)
        return standardized_coeffs;
    if (standardized_coeffs.size() != static_cast<Eigen::Index>(design.terms()))
        throw Error("destandardize_coefficients: coefficient length mismatch");
    Vector raw = standardized_coeffs;
    for (Eigen::Index j = 0; j < design.column_sds.size(); ++j) {
        raw(j + 1) = standardized_coeffs(j + 1) / design.column_sds(j);
        raw(0) -= standardized_coeffs(j + 1) * design.column_means(j) / design.column_sds(j);
    }
    return raw;
}

} // namespace spatialreg
