#ifndef SPATIALREG_SIMULATE_HPP
#define SPATIALREG_SIMULATE_HPP

#include "spatialreg/core_data.hpp"
#include "spatialreg/weights.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spatialreg {

enum class SurfaceKind { Constant, LinearGradient, GaussianBump };

// Deterministic coefficient surface over planar coordinates.
struct SurfaceSpec {
    SurfaceKind kind = SurfaceKind::Constant;
    double level = 0.0;   // constant value / gradient base
    double slope_u = 0.0; // gradient slope in x
    double slope_v = 0.0; // gradient slope in y
    double center_u = 0.0;
    double center_v = 0.0;
    double amplitude = 0.0;
    double width = 1.0;

    static SurfaceSpec constant(double level);
    static SurfaceSpec gradient(double base, double slope_u, double slope_v);
    static SurfaceSpec bump(double amplitude, double center_u, double center_v, double width);
};

// Canonical test fixtures: constant 3; gradient 1 + (u + v) / 12; bump
// 5 exp(-((u-12)^2 + (v-12)^2) / (2 * 4^2)).
SurfaceSpec fixture_constant_surface();
SurfaceSpec fixture_gradient_surface();
SurfaceSpec fixture_bump_surface();

struct SimConfig {
    int side = 25;
    std::vector<SurfaceSpec> surfaces; // [0] is the intercept surface
    double noise_sd = 1.0;
    double rho = 0.0;
    std::uint64_t seed = 0;
};

struct SimTruth {
    Matrix surfaces; // n x K true coefficients, intercept first
    double rho = 0.0;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> names;
};

// side x side unit-spaced grid with row-major decimal ids.
PointSet generate_grid(int side);

Vector evaluate_surface(const SurfaceSpec& spec, const PointSet& points);

// y = (I - rho W)^-1 (sum_k beta_k(u, v) x_ik + eps). Predictors are iid
// standard normal, eps iid N(0, noise_sd^2), all drawn from counter-based
// streams of the seed. Response column "response", predictors "x1", "x2", ...
std::pair<Dataset, SimTruth> generate_sample(const SimConfig& config, const SpatialWeights& w);

// Lossless truth round-trip (17 significant digits).
void export_truth_file(const SimTruth& truth, const std::string& path);
SimTruth import_truth_file(const std::string& path);

// Parses "constant:3", "gradient:base,slope_u,slope_v" or
// "bump:amplitude,center_u,center_v,width"; lists are semicolon-separated
// with the intercept surface first.
SurfaceSpec parse_surface_spec(const std::string& text);
std::vector<SurfaceSpec> parse_surface_list(const std::string& text);

} // namespace spatialreg

#endif
