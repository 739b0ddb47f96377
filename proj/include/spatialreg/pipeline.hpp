#ifndef SPATIALREG_PIPELINE_HPP
#define SPATIALREG_PIPELINE_HPP

#include "spatialreg/core_data.hpp"
#include "spatialreg/kernels.hpp"
#include "spatialreg/mgwr.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spatialreg {

struct ColumnSpec {
    std::string id = "id";
    std::string x = "x";
    std::string y = "y";
    std::string response;
    std::vector<std::string> predictors;
};

enum class WeightsMethod { Knn, Queen, Hybrid };

struct PipelineConfig {
    std::string points_csv;
    std::string polygons_geojson; // required for queen weights
    ColumnSpec columns;
    WeightsMethod weights_method = WeightsMethod::Knn;
    std::size_t weights_k = 8;
    KernelSpec kernel{};
    bool standardize = true;
    bool spatial_lag = true;
    double soc_tolerance = 1e-5;
    std::size_t max_iterations = 200;
    std::size_t moran_permutations = 999;
    double alpha = 0.05;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    int threads = 0; // 0 = library default
};

// Parses the JSON config file; grammar documented in the README.
PipelineConfig load_pipeline_config(const std::string& path);

// Typed CSV ingestion: row order preserved, strict numeric parsing with line
// numbers in every error.
Dataset load_points_csv(const std::string& path, const ColumnSpec& columns);

// Writes the schema load_points_csv reads: id,x,y,response,predictors...
void write_dataset_csv(const Dataset& ds, const std::string& path);

struct PipelineResult {
    std::vector<std::string> artifacts; // paths written, manifest last
    std::string manifest_path;
    ValidationReport validation;
};

// load -> weights -> Moran -> OLS -> MGWR -> diagnostics -> exports.
// Any stage failure removes partial outputs and rethrows with the stage name.
PipelineResult run_pipeline(const PipelineConfig& config);

} // namespace spatialreg

#endif
