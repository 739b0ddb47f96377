#ifndef SPATIALREG_CORE_DATA_HPP
#define SPATIALREG_CORE_DATA_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace spatialreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Georeferenced observation locations. Coordinates are planar (projected);
// the library never reprojects.
struct PointSet {
    std::vector<std::string> ids;
    Vector x;
    Vector y;

    std::size_t size() const { return ids.size(); }
};

// One polygon ring as parallel coordinate arrays, closed or open.
struct Ring {
    std::vector<double> xs;
    std::vector<double> ys;
};

// Polygon observations; each observation may be a multi-part polygon, in
// which case all parts contribute to adjacency. Numeric feature attributes
// are retained column-wise.
struct PolygonSet {
    std::vector<std::string> ids;
    std::vector<std::vector<Ring>> rings; // per observation, all rings of all parts
    std::vector<std::string> attr_names;
    Matrix attrs; // n x attr_names.size(), NaN where absent

    std::size_t size() const { return ids.size(); }
};

// Response plus ordered named predictor columns, aligned with points.
struct Dataset {
    PointSet points;
    std::string response_name;
    Vector response;
    std::vector<std::string> predictor_names;
    Matrix predictors; // n x p

    std::size_t size() const { return points.size(); }
    std::size_t predictor_count() const { return predictor_names.size(); }
};

struct ValidationReport {
    std::size_t n_input = 0;
    std::size_t n_kept = 0;
    std::vector<std::string> dropped_ids;
};

// Drops rows with non-finite values anywhere (coordinates, response or
// predictors) and reports them. Throws on duplicate ids, fewer than 3
// surviving rows, or a zero-variance response.
Dataset validate_dataset(const Dataset& raw, ValidationReport* report = nullptr);

// Design matrix with a leading intercept column. When standardized, each
// predictor column has mean 0 and population SD 1 (divisor n); the stored
// means/SDs allow exact de-standardization of fitted coefficients.
struct DesignMatrix {
    Matrix X; // n x (p + 1), column 0 is the intercept
    Vector y;
    std::vector<std::string> term_names; // "(Intercept)" then predictor names
    bool standardized = false;
    Vector column_means; // length p (predictors only)
    Vector column_sds;   // length p

    std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t terms() const { return static_cast<std::size_t>(X.cols()); }
};

DesignMatrix build_design(const Dataset& ds, bool standardize);

// Maps coefficients fitted on a standardized design back to raw-unit
// coefficients (intercept first).
Vector destandardize_coefficients(const DesignMatrix& design, const Vector& standardized_coeffs);

} // namespace spatialreg

#endif
