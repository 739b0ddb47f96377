#include "spatialreg/pipeline.hpp"
#include "spatialreg/csv.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/geojson.hpp"
#include "spatialreg/reports.hpp"
#include "spatialreg/weights.hpp"

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <filesystem>
#include <fstream>
#include <unordered_map>

namespace spatialreg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

WeightsMethod parse_weights_method(const std::string& name) {
    if (name == "knn") return WeightsMethod::Knn;
    if (name == "queen") return WeightsMethod::Queen;
    if (name == "hybrid") return WeightsMethod::Hybrid;
    throw Error("config: unknown weights method '" + name + "' (knn|queen|hybrid)");
}

KernelSpec parse_kernel(const json& j) {
    KernelSpec kernel;
    const std::string family = j.value("family", "bisquare");
    if (family == "bisquare")
        kernel.family = KernelFamily::Bisquare;
    else if (family == "gaussian")
        kernel.family = KernelFamily::Gaussian;
    else
        throw Error("config: unknown kernel family '" + family + "' (bisquare|gaussian)");
    const std::string mode = j.value("bandwidth_mode", "adaptive");
    if (mode == "adaptive")
        kernel.mode = BandwidthMode::AdaptiveNeighbors;
    else if (mode == "fixed")
        kernel.mode = BandwidthMode::FixedDistance;
    else
        throw Error("config: unknown bandwidth_mode '" + mode + "' (adaptive|fixed)");
    return kernel;
}

} // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("config '" + path + "': " + e.what());
    }

    PipelineConfig cfg;
    try {
        const auto& input = j.at("input");
        cfg.points_csv = input.at("points_csv").get<std::string>();
        cfg.polygons_geojson = input.value("polygons_geojson", "");

        const auto& columns = j.at("columns");
        cfg.columns.id = columns.value("id", "id");
        cfg.columns.x = columns.value("x", "x");
        cfg.columns.y = columns.value("y", "y");
        cfg.columns.response = columns.at("response").get<std::string>();
        cfg.columns.predictors = columns.at("predictors").get<std::vector<std::string>>();

        if (j.contains("weights")) {
            cfg.weights_method = parse_weights_method(j["weights"].value("method", "knn"));
            cfg.weights_k = j["weights"].value("k", cfg.weights_k);
        }
        if (j.contains("kernel")) cfg.kernel = parse_kernel(j["kernel"]);
        if (j.contains("mgwr")) {
            const auto& m = j["mgwr"];
            cfg.standardize = m.value("standardize", cfg.standardize);
            cfg.spatial_lag = m.value("spatial_lag", cfg.spatial_lag);
            cfg.soc_tolerance = m.value("soc_tolerance", cfg.soc_tolerance);
            cfg.max_iterations = m.value("max_iterations", cfg.max_iterations);
        }
        if (j.contains("moran"))
            cfg.moran_permutations = j["moran"].value("permutations", cfg.moran_permutations);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const json::exception& e) {
        throw Error("config '" + path + "': " + e.what());
    }
    if (cfg.columns.predictors.empty())
        throw Error("config: at least one predictor column required");
    return cfg;
}

Dataset load_points_csv(const std::string& path, const ColumnSpec& columns) {
    const CsvTable table = read_csv_file(path);
    const std::size_t id_col = table.column_index(columns.id);
    const std::size_t x_col = table.column_index(columns.x);
    const std::size_t y_col = table.column_index(columns.y);
    const std::size_t response_col = table.column_index(columns.response);
    std::vector<std::size_t> predictor_cols;
    predictor_cols.reserve(columns.predictors.size());
    for (const auto& name : columns.predictors)
        predictor_cols.push_back(table.column_index(name));

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Dataset ds;
    ds.response_name = columns.response;
    ds.predictor_names = columns.predictors;
    ds.points.ids.reserve(table.rows.size());
    ds.points.x.resize(n);
    ds.points.y.resize(n);
    ds.response.resize(n);
    ds.predictors.resize(n, static_cast<Eigen::Index>(predictor_cols.size()));

    std::unordered_map<std::string, std::size_t> seen;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        // +2: header occupies line 1, rows are 1-based after it.
        const std::string line = path + ":" + std::to_string(i + 2);
        const std::string& id = row[id_col];
        if (id.empty()) throw Error("csv " + line + ": empty id");
        if (!seen.emplace(id, i).second)
            throw Error("csv " + line + ": duplicate id '" + id + "'");
        ds.points.ids.push_back(id);
        ds.points.x(i) = parse_csv_number(row[x_col], line + " column '" + columns.x + "'");
        ds.points.y(i) = parse_csv_number(row[y_col], line + " column '" + columns.y + "'");
        ds.response(i) =
            parse_csv_number(row[response_col], line + " column '" + columns.response + "'");
        for (std::size_t c = 0; c < predictor_cols.size(); ++c)
            ds.predictors(i, static_cast<Eigen::Index>(c)) = parse_csv_number(
                row[predictor_cols[c]], line + " column '" + columns.predictors[c] + "'");
    }
    return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::vector<std::string> header = {"id", "x", "y", ds.response_name};
    header.insert(header.end(), ds.predictor_names.begin(), ds.predictor_names.end());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(ds.size());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(ds.size()); ++i) {
        std::vector<std::string> row;
        row.reserve(header.size());
        row.push_back(ds.points.ids[static_cast<std::size_t>(i)]);
        row.push_back(csv_format_double(ds.points.x(i)));
        row.push_back(csv_format_double(ds.points.y(i)));
        row.push_back(csv_format_double(ds.response(i)));
        for (Eigen::Index c = 0; c < ds.predictors.cols(); ++c)
            row.push_back(csv_format_double(ds.predictors(i, c)));
        rows.push_back(std::move(row));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_dataset_csv: cannot open '" + path + "'");
    write_csv(out, header, rows);
    if (!out) throw Error("write_dataset_csv: write failed for '" + path + "'");
}

namespace {

struct StageTimer {
    std::map<std::string, double>& timings;
    std::string stage;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~StageTimer() {
        timings[stage] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_text_file(const std::string& path, const std::string& content,
                     std::vector<std::string>& created) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + path + "'");
    created.push_back(path);
}

// Reorders polygons to match the dataset's id order.
PolygonSet align_polygons(const PolygonSet& polys, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < polys.ids.size(); ++i) index.emplace(polys.ids[i], i);
    PolygonSet out;
    out.attr_names = polys.attr_names;
    out.attrs.resize(static_cast<Eigen::Index>(ids.size()),
                     static_cast<Eigen::Index>(polys.attr_names.size()));
    for (const auto& id : ids) {
        const auto it = index.find(id);
        if (it == index.end())
            throw Error("polygon set is missing feature id '" + id + "'");
        out.ids.push_back(id);
        out.rings.push_back(polys.rings[it->second]);
        out.attrs.row(static_cast<Eigen::Index>(out.ids.size() - 1)) =
            polys.attrs.row(static_cast<Eigen::Index>(it->second));
    }
    return out;
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    PipelineResult result;
    std::map<std::string, double> timings;
    std::vector<std::string>& created = result.artifacts;
    std::string stage = "setup";

    try {
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec) throw Error("cannot create output directory '" + config.output_dir + "'");
        const auto out_path = [&](const char* name) {
            return (fs::path(config.output_dir) / name).string();
        };

        // Stage 1: load.
        stage = "load";
        Dataset validated;
        PolygonSet polys;
        bool have_polys = false;
        {
            StageTimer timer{timings, stage};
            const Dataset raw = load_points_csv(config.points_csv, config.columns);
            validated = validate_dataset(raw, &result.validation);
            if (!config.polygons_geojson.empty()) {
                polys = align_polygons(load_polygons_geojson(config.polygons_geojson),
                                       validated.points.ids);
                have_polys = true;
            }
        }

        // Stage 2: weights.
        stage = "weights";
        SpatialWeights weights;
        {
            StageTimer timer{timings, stage};
            switch (config.weights_method) {
                case WeightsMethod::Knn:
                    weights = knn_weights(validated.points, config.weights_k);
                    break;
                case WeightsMethod::Hybrid:
                    weights = hybrid_kernel_weights(validated.points, config.weights_k);
                    break;
                case WeightsMethod::Queen:
                    if (!have_polys)
                        throw Error("queen weights need input.polygons_geojson");
                    weights = queen_contiguity(polys);
                    break;
            }
        }
        const SpatialWeights row_std = row_standardize(weights);

        // Stage 3: Moran's I on the response.
        stage = "moran";
        {
            StageTimer timer{timings, stage};
            const MoranResult moran = global_morans_i(validated.response, row_std);
            std::string block = format_moran_report(moran, weights_summary(weights));
            if (config.moran_permutations >= 99) {
                const MoranResult perm = permutation_morans_i(
                    validated.response, row_std, config.moran_permutations, config.seed);
                block += "Permutation p-value (" + std::to_string(perm.n_permutations) +
                         " draws)            " + (perm.p_value < 0.001 ? "< 0.001" : [&] {
                             char buf[32];
                             std::snprintf(buf, sizeof(buf), "%.4f", perm.p_value);
                             return std::string(buf);
                         }()) +
                         "\n";
            }
            write_text_file(out_path("moran_report.txt"), block, created);
        }

        // Stage 4: global OLS in raw units.
        stage = "ols";
        OlsFit ols;
        {
            StageTimer timer{timings, stage};
            ols = ols_fit(build_design(validated, /*standardize=*/false));
            write_text_file(out_path("ols_report.txt"), format_ols_report(ols), created);
        }

        // Stage 5: MGWR.
        stage = "mgwr";
        MgwrFit mgwr;
        DesignMatrix design;
        {
            StageTimer timer{timings, stage};
            design = build_design(validated, config.standardize);
            MgwrConfig mcfg;
            mcfg.kernel = config.kernel;
            mcfg.spatial_lag = config.spatial_lag;
            mcfg.soc_tolerance = config.soc_tolerance;
            mcfg.max_iterations = config.max_iterations;
            mgwr = mgwr_fit(design, validated.points, &row_std, mcfg);
            write_text_file(out_path("mgwr_report.txt"), format_mgwr_report(ols, mgwr), created);
        }

        // Stage 6: diagnostics.
        stage = "diagnostics";
        DiagnosticsReport diagnostics;
        {
            StageTimer timer{timings, stage};
            diagnostics.significance = enp_and_inference(mgwr, config.alpha);
            diagnostics.cooks = cooks_distance(mgwr);
            diagnostics.residual_moran = residual_moran_check(
                mgwr, row_std, std::max<std::size_t>(config.moran_permutations, 99),
                config.seed + 1);
            write_text_file(out_path("diagnostics_report.txt"),
                            format_diagnostics_report(mgwr, diagnostics), created);
        }

        // Stage 7: exports.
        stage = "export";
        {
            StageTimer timer{timings, stage};
            const Vector predicted = predict_surface(mgwr, &row_std);
            const std::string surfaces = out_path("surfaces.geojson");
            export_surfaces_geojson(mgwr, diagnostics, predicted, validated.points,
                                    have_polys ? &polys : nullptr, surfaces);
            created.push_back(surfaces);
        }

        // Manifest.
        stage = "manifest";
        {
            json manifest;
            manifest["tool"] = "spatialreg";
            manifest["format_version"] = 1;
            manifest["seed"] = config.seed;
            manifest["threads"] = config.threads;
            manifest["inputs"] = {{"points_csv", config.points_csv},
                                  {"polygons_geojson", config.polygons_geojson}};
            manifest["rows"] = {{"input", result.validation.n_input},
                                {"kept", result.validation.n_kept},
                                {"dropped_ids", result.validation.dropped_ids}};
            manifest["mgwr"] = {{"converged", mgwr.converged},
                                {"iterations", mgwr.iterations},
                                {"rho", mgwr.rho},
                                {"enp_total", mgwr.enp_total},
                                {"aicc", mgwr.aicc},
                                {"exact_enp", mgwr.exact_enp}};
            json outputs = json::array();
            for (const auto& artifact : created) outputs.push_back(artifact);
            manifest["outputs"] = outputs;
            manifest["timings_seconds"] = timings;
            result.manifest_path = out_path("manifest.json");
            write_text_file(result.manifest_path, manifest.dump(2) + "\n", created);
        }
        return result;
    } catch (const Error& e) {
        for (const auto& path : created) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw Error("stage '" + stage + "': " + e.what());
    }
}

} // namespace spatialreg
