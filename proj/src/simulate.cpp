#include "spatialreg/simulate.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/rng.hpp"
#include "spatialreg/sar.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace spatialreg {

SurfaceSpec SurfaceSpec::constant(double level) {
    SurfaceSpec s;
    s.kind = SurfaceKind::Constant;
    s.level = level;
    return s;
}

SurfaceSpec SurfaceSpec::gradient(double base, double slope_u, double slope_v) {
    SurfaceSpec s;
    s.kind = SurfaceKind::LinearGradient;
    s.level = base;
    s.slope_u = slope_u;
    s.slope_v = slope_v;
    return s;
}

SurfaceSpec SurfaceSpec::bump(double amplitude, double center_u, double center_v, double width) {
    if (!(width > 0.0)) throw Error("SurfaceSpec: bump width must be positive");
    SurfaceSpec s;
    s.kind = SurfaceKind::GaussianBump;
    s.amplitude = amplitude;
    s.center_u = center_u;
    s.center_v = center_v;
    s.width = width;
    return s;
}

SurfaceSpec fixture_constant_surface() { return SurfaceSpec::constant(3.0); }
SurfaceSpec fixture_gradient_surface() { return SurfaceSpec::gradient(1.0, 1.0 / 12.0, 1.0 / 12.0); }
SurfaceSpec fixture_bump_surface() { return SurfaceSpec::bump(5.0, 12.0, 12.0, 4.0); }

PointSet generate_grid(int side) {
    if (side < 2) throw Error("generate_grid: side must be >= 2");
    const auto n = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    PointSet points;
    points.ids.reserve(n);
    points.x.resize(static_cast<Eigen::Index>(n));
    points.y.resize(static_cast<Eigen::Index>(n));
    Eigen::Index idx = 0;
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col, ++idx) {
            points.ids.push_back(std::to_string(idx));
            points.x(idx) = static_cast<double>(col);
            points.y(idx) = static_cast<double>(row);
        }
    return points;
}

Vector evaluate_surface(const SurfaceSpec& spec, const PointSet& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Vector out(n);
    switch (spec.kind) {
        case SurfaceKind::Constant:
            out.setConstant(spec.level);
            break;
        case SurfaceKind::LinearGradient:
            out = spec.level + spec.slope_u * points.x.array() + spec.slope_v * points.y.array();
            break;
        case SurfaceKind::GaussianBump: {
            if (!(spec.width > 0.0)) throw Error("evaluate_surface: bump width must be positive");
            const double denom = 2.0 * spec.width * spec.width;
            out = spec.amplitude *
                  (-((points.x.array() - spec.center_u).square() +
                     (points.y.array() - spec.center_v).square()) / denom).exp();
            break;
        }
    }
    return out;
}

std::pair<Dataset, SimTruth> generate_sample(const SimConfig& config, const SpatialWeights& w) {
    if (config.surfaces.empty())
        throw Error("generate_sample: need at least the intercept surface");
    if (!(std::fabs(config.rho) < 1.0))
        throw Error("generate_sample: |rho| must be < 1");
    if (config.noise_sd < 0.0)
        throw Error("generate_sample: noise SD must be >= 0");
    if (config.rho != 0.0 && !w.is_row_standardized())
        throw Error("generate_sample: weights must be row-standardized when rho != 0");

    PointSet points = generate_grid(config.side);
    const auto n = static_cast<Eigen::Index>(points.size());
    if (w.n != points.size())
        throw Error("generate_sample: weights size does not match grid");

    const auto K = static_cast<Eigen::Index>(config.surfaces.size());
    SimTruth truth;
    truth.rho = config.rho;
    truth.noise_sd = config.noise_sd;
    truth.seed = config.seed;
    truth.surfaces.resize(n, K);
    truth.names.reserve(config.surfaces.size());
    truth.names.emplace_back("(Intercept)");
    for (Eigen::Index k = 1; k < K; ++k) truth.names.push_back("x" + std::to_string(k));
    for (Eigen::Index k = 0; k < K; ++k)
        truth.surfaces.col(k) = evaluate_surface(config.surfaces[static_cast<std::size_t>(k)], points);

    // Stream 0 is the noise; stream k >= 1 is predictor k.
    Dataset ds;
    ds.response_name = "response";
    ds.predictors.resize(n, K - 1);
    for (Eigen::Index k = 1; k < K; ++k) {
        Rng rng(config.seed, static_cast<std::uint64_t>(k));
        ds.predictor_names.push_back("x" + std::to_string(k));
        for (Eigen::Index i = 0; i < n; ++i) ds.predictors(i, k - 1) = rng.next_normal();
    }

    Vector signal = truth.surfaces.col(0);
    for (Eigen::Index k = 1; k < K; ++k)
        signal += truth.surfaces.col(k).cwiseProduct(ds.predictors.col(k - 1));
    Rng noise_rng(config.seed, 0);
    for (Eigen::Index i = 0; i < n; ++i) signal(i) += config.noise_sd * noise_rng.next_normal();

    ds.points = std::move(points);
    ds.response = config.rho == 0.0 ? signal : solve_simultaneous_lag(w, config.rho, signal);
    return {std::move(ds), std::move(truth)};
}

void export_truth_file(const SimTruth& truth, const std::string& path) {
    nlohmann::json j;
    j["rho"] = truth.rho;
    j["noise_sd"] = truth.noise_sd;
    j["seed"] = truth.seed;
    j["names"] = truth.names;
    nlohmann::json cols = nlohmann::json::array();
    for (Eigen::Index k = 0; k < truth.surfaces.cols(); ++k) {
        nlohmann::json col = nlohmann::json::array();
        for (Eigen::Index i = 0; i < truth.surfaces.rows(); ++i) col.push_back(truth.surfaces(i, k));
        cols.push_back(std::move(col));
    }
    j["surfaces"] = std::move(cols);
    std::ofstream out(path);
    if (!out) throw Error("export_truth_file: cannot open '" + path + "'");
    out << j.dump(2) << '\n';
}

namespace {

std::vector<double> parse_number_list(const std::string& text, const std::string& context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string piece =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(piece, &pos));
            if (pos != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw Error("parse_surface_spec: bad number '" + piece + "' in '" + context + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

SurfaceSpec parse_surface_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error("parse_surface_spec: expected 'kind:params' in '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::vector<double> params = parse_number_list(text.substr(colon + 1), text);
    if (kind == "constant") {
        if (params.size() != 1)
            throw Error("parse_surface_spec: constant takes 1 parameter (level)");
        return SurfaceSpec::constant(params[0]);
    }
    if (kind == "gradient") {
        if (params.size() != 3)
            throw Error("parse_surface_spec: gradient takes base,slope_u,slope_v");
        return SurfaceSpec::gradient(params[0], params[1], params[2]);
    }
    if (kind == "bump") {
        if (params.size() != 4)
            throw Error("parse_surface_spec: bump takes amplitude,center_u,center_v,width");
        return SurfaceSpec::bump(params[0], params[1], params[2], params[3]);
    }
    throw Error("parse_surface_spec: unknown kind '" + kind + "' (constant|gradient|bump)");
}

std::vector<SurfaceSpec> parse_surface_list(const std::string& text) {
    std::vector<SurfaceSpec> specs;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto semi = text.find(';', start);
        specs.push_back(parse_surface_spec(
            text.substr(start, semi == std::string::npos ? std::string::npos : semi - start)));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return specs;
}

SimTruth import_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("import_truth_file: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("import_truth_file: " + std::string(e.what()));
    }
    SimTruth truth;
    truth.rho = j.at("rho").get<double>();
    truth.noise_sd = j.at("noise_sd").get<double>();
    truth.seed = j.at("seed").get<std::uint64_t>();
    truth.names = j.at("names").get<std::vector<std::string>>();
    const auto& cols = j.at("surfaces");
    if (cols.empty()) throw Error("import_truth_file: no surfaces");
    const auto K = static_cast<Eigen::Index>(cols.size());
    const auto n = static_cast<Eigen::Index>(cols[0].size());
    truth.surfaces.resize(n, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        if (static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)].size()) != n)
            throw Error("import_truth_file: ragged surface columns");
        for (Eigen::Index i = 0; i < n; ++i)
            truth.surfaces(i, k) = cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].get<double>();
    }
    return truth;
}

} // namespace spatialreg
