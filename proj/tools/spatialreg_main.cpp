#include "spatialreg/autocorr.hpp"
#include "spatialreg/csv.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/geojson.hpp"
#include "spatialreg/gwr.hpp"
#include "spatialreg/mgwr.hpp"
#include "spatialreg/pipeline.hpp"
#include "spatialreg/reports.hpp"
#include "spatialreg/simulate.hpp"
#include "spatialreg/stats.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <iostream>

namespace {

using namespace spatialreg;

struct PointArgs {
    std::string path;
    ColumnSpec columns;

    void attach(CLI::App* cmd, bool with_model_columns) {
        cmd->add_option("--points", path, "Input points CSV")->required();
        cmd->add_option("--id-column", columns.id, "Id column name (default id)");
        cmd->add_option("--x-column", columns.x, "X coordinate column (default x)");
        cmd->add_option("--y-column", columns.y, "Y coordinate column (default y)");
        if (with_model_columns) {
            cmd->add_option("--response", columns.response, "Response column")->required();
            cmd->add_option("--predictors", columns.predictors, "Predictor columns")
                ->required()
                ->delimiter(',');
        }
    }

    Dataset load_validated(ValidationReport* report = nullptr) const {
        return validate_dataset(load_points_csv(path, columns), report);
    }
};

SpatialWeights build_weights(const std::string& method, std::size_t k, const PointSet& points,
                             const std::string& polygons_path) {
    if (method == "knn") return knn_weights(points, k);
    if (method == "hybrid") return hybrid_kernel_weights(points, k);
    if (method == "queen") {
        if (polygons_path.empty())
            throw Error("queen weights need --polygons");
        return queen_contiguity(load_polygons_geojson(polygons_path));
    }
    throw Error("unknown weights method '" + method + "' (knn|queen|hybrid)");
}

KernelSpec make_kernel(const std::string& family, const std::string& mode) {
    KernelSpec kernel;
    if (family == "bisquare")
        kernel.family = KernelFamily::Bisquare;
    else if (family == "gaussian")
        kernel.family = KernelFamily::Gaussian;
    else
        throw Error("unknown kernel family '" + family + "'");
    if (mode == "adaptive")
        kernel.mode = BandwidthMode::AdaptiveNeighbors;
    else if (mode == "fixed")
        kernel.mode = BandwidthMode::FixedDistance;
    else
        throw Error("unknown bandwidth mode '" + mode + "'");
    return kernel;
}

int run_app(int argc, char** argv) {
    CLI::App app{"spatialreg: spatial weights, Moran's I, OLS, GWR and spatial-lag MGWR"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    // weights
    auto* weights_cmd = app.add_subcommand("weights", "Build a spatial weights matrix");
    PointArgs weights_points;
    weights_points.attach(weights_cmd, false);
    std::string weights_method = "knn", weights_polygons, weights_out;
    std::size_t weights_k = 8;
    bool weights_row_standardize = false;
    weights_cmd->add_option("--method", weights_method, "knn|queen|hybrid");
    weights_cmd->add_option("--k", weights_k, "Neighbor count for knn/hybrid");
    weights_cmd->add_option("--polygons", weights_polygons, "GeoJSON polygons (queen)");
    weights_cmd->add_flag("--row-standardize", weights_row_standardize, "Row-standardize");
    weights_cmd->add_option("--out", weights_out, "Output weights file")->required();

    // moran
    auto* moran_cmd = app.add_subcommand("moran", "Global Moran's I test");
    PointArgs moran_points;
    moran_points.attach(moran_cmd, false);
    std::string moran_column, moran_method = "knn", moran_polygons, moran_weights_file;
    std::size_t moran_k = 8, moran_permutations = 999;
    std::uint64_t moran_seed = 0;
    bool moran_normality = false, moran_two_sided = false;
    moran_cmd->add_option("--column", moran_column, "Value column to test")->required();
    moran_cmd->add_option("--method", moran_method, "knn|queen|hybrid");
    moran_cmd->add_option("--k", moran_k, "Neighbor count");
    moran_cmd->add_option("--polygons", moran_polygons, "GeoJSON polygons (queen)");
    moran_cmd->add_option("--weights", moran_weights_file, "Import weights file instead");
    moran_cmd->add_option("--permutations", moran_permutations, "Permutation draws (0 = analytic only)");
    moran_cmd->add_option("--seed", moran_seed, "Permutation seed");
    moran_cmd->add_flag("--normality", moran_normality, "Normality variance instead of randomization");
    moran_cmd->add_flag("--two-sided", moran_two_sided, "Two-sided test");

    // ols
    auto* ols_cmd = app.add_subcommand("ols", "Global OLS with full diagnostics");
    PointArgs ols_points;
    ols_points.attach(ols_cmd, true);
    bool ols_standardize = false;
    ols_cmd->add_flag("--standardize", ols_standardize, "Z-standardize predictors");

    // gwr
    auto* gwr_cmd = app.add_subcommand("gwr", "Single-bandwidth GWR");
    PointArgs gwr_points;
    gwr_points.attach(gwr_cmd, true);
    std::string gwr_family = "bisquare", gwr_mode = "adaptive", gwr_bandwidth = "auto";
    bool gwr_standardize = false;
    gwr_cmd->add_option("--kernel", gwr_family, "bisquare|gaussian");
    gwr_cmd->add_option("--bandwidth-mode", gwr_mode, "adaptive|fixed");
    gwr_cmd->add_option("--bandwidth", gwr_bandwidth, "Bandwidth value or 'auto'");
    gwr_cmd->add_flag("--standardize", gwr_standardize, "Z-standardize predictors");

    // mgwr
    auto* mgwr_cmd = app.add_subcommand("mgwr", "Multiscale GWR with spatial lag");
    PointArgs mgwr_points;
    mgwr_points.attach(mgwr_cmd, true);
    std::string mgwr_family = "bisquare", mgwr_mode = "adaptive", mgwr_weights_method = "knn";
    std::string mgwr_polygons, mgwr_export;
    std::size_t mgwr_k = 8, mgwr_max_iter = 200, mgwr_moran_perms = 999;
    double mgwr_soc = 1e-5, mgwr_alpha = 0.05;
    bool mgwr_no_lag = false, mgwr_no_standardize = false;
    std::uint64_t mgwr_seed = 0;
    mgwr_cmd->add_option("--kernel", mgwr_family, "bisquare|gaussian");
    mgwr_cmd->add_option("--bandwidth-mode", mgwr_mode, "adaptive|fixed");
    mgwr_cmd->add_option("--weights-method", mgwr_weights_method, "knn|queen|hybrid");
    mgwr_cmd->add_option("--k", mgwr_k, "Weights neighbor count");
    mgwr_cmd->add_option("--polygons", mgwr_polygons, "GeoJSON polygons (queen)");
    mgwr_cmd->add_option("--max-iterations", mgwr_max_iter, "Backfitting iteration cap");
    mgwr_cmd->add_option("--soc-tolerance", mgwr_soc, "SOC-f convergence threshold");
    mgwr_cmd->add_option("--alpha", mgwr_alpha, "Significance level");
    mgwr_cmd->add_option("--permutations", mgwr_moran_perms, "Residual Moran permutations");
    mgwr_cmd->add_option("--seed", mgwr_seed, "Seed for the residual Moran test");
    mgwr_cmd->add_flag("--no-lag", mgwr_no_lag, "Disable the spatial lag term");
    mgwr_cmd->add_flag("--no-standardize", mgwr_no_standardize, "Keep predictors in raw units");
    mgwr_cmd->add_option("--export", mgwr_export, "Write surfaces GeoJSON here");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate known-truth synthetic data");
    int sim_side = 25;
    std::string sim_surfaces = "constant:3;gradient:1,0.0833333333333333,0.0833333333333333;bump:5,12,12,4";
    double sim_noise = 1.0, sim_rho = 0.0;
    std::uint64_t sim_seed = 0;
    std::size_t sim_k = 8;
    std::string sim_out, sim_truth_out;
    sim_cmd->add_option("--side", sim_side, "Grid side length");
    sim_cmd->add_option("--surfaces", sim_surfaces,
                        "Semicolon list, intercept first: constant:v, gradient:b,su,sv, bump:a,cu,cv,w");
    sim_cmd->add_option("--noise", sim_noise, "Noise standard deviation");
    sim_cmd->add_option("--rho", sim_rho, "Spatial autoregressive parameter");
    sim_cmd->add_option("--seed", sim_seed, "Generator seed");
    sim_cmd->add_option("--k", sim_k, "KNN neighbor count for the lag weights");
    sim_cmd->add_option("--out", sim_out, "Output dataset CSV")->required();
    sim_cmd->add_option("--truth", sim_truth_out, "Output truth JSON");

    // run
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline from a config file");
    std::string run_config;
    run_cmd->add_option("--config", run_config, "Pipeline config JSON")->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    if (weights_cmd->parsed()) {
        const Dataset ds = weights_points.load_validated();
        SpatialWeights w = build_weights(weights_method, weights_k, ds.points, weights_polygons);
        std::vector<std::string> ids = ds.points.ids;
        if (weights_method == "queen") {
            const PolygonSet polys = load_polygons_geojson(weights_polygons);
            ids = polys.ids;
        }
        if (weights_row_standardize) w = row_standardize(w);
        export_weights_file(w, ids, weights_out);
        const WeightsSummary summary = weights_summary(w);
        std::printf("wrote %s: n=%zu links=%zu average=%.2f islands=%zu\n", weights_out.c_str(),
                    summary.n_regions, summary.nonzero_links, summary.average_links,
                    summary.islands);
        return 0;
    }

    if (moran_cmd->parsed()) {
        ColumnSpec columns = moran_points.columns;
        columns.response = moran_column;
        const Dataset raw = load_points_csv(moran_points.path, columns);
        const Dataset ds = validate_dataset(raw);
        SpatialWeights w =
            moran_weights_file.empty()
                ? build_weights(moran_method, moran_k, ds.points, moran_polygons)
                : import_weights_file(moran_weights_file, ds.points.ids);
        const WeightsSummary summary = weights_summary(w);
        const SpatialWeights row_std = row_standardize(w);
        const MoranAlternative alt =
            moran_two_sided ? MoranAlternative::TwoSided : MoranAlternative::Greater;
        const MoranResult analytic = global_morans_i(
            ds.response, row_std,
            moran_normality ? MoranInference::AnalyticalNormality
                            : MoranInference::AnalyticalRandomization,
            alt);
        std::cout << format_moran_report(analytic, summary);
        if (moran_permutations >= 99) {
            const MoranResult perm =
                permutation_morans_i(ds.response, row_std, moran_permutations, moran_seed, alt);
            std::printf("Permutation p-value (%zu draws)  %.4f\n", perm.n_permutations,
                        perm.p_value);
        }
        return 0;
    }

    if (ols_cmd->parsed()) {
        const Dataset ds = ols_points.load_validated();
        const OlsFit fit = ols_fit(build_design(ds, ols_standardize));
        std::cout << format_ols_report(fit);
        return 0;
    }

    if (gwr_cmd->parsed()) {
        const Dataset ds = gwr_points.load_validated();
        const DesignMatrix design = build_design(ds, gwr_standardize);
        const KernelSpec kernel = make_kernel(gwr_family, gwr_mode);
        double bandwidth;
        if (gwr_bandwidth == "auto") {
            const BandwidthSearchResult sel = select_gwr_bandwidth(design, ds.points, kernel);
            bandwidth = sel.bandwidth;
            std::printf("selected bandwidth %.6g (AICc %.4f, %zu evaluations)\n", sel.bandwidth,
                        sel.score, sel.evaluations);
        } else {
            bandwidth = std::stod(gwr_bandwidth);
        }
        const GwrFit fit = gwr_fit(design, ds.points, kernel, bandwidth);
        std::printf("GWR fit: n=%zu bandwidth=%.6g trace(S)=%.3f AICc=%.4f sigma2=%.6g\n",
                    ds.size(), fit.bandwidth, fit.trace_s, fit.aicc, fit.sigma2_mle);
        const Eigen::Index k = fit.local_coefficients.cols();
        for (Eigen::Index j = 0; j < k; ++j) {
            const Vector col = fit.local_coefficients.col(j);
            std::printf("  %-20s median %.6g  range [%.6g, %.6g]\n",
                        design.term_names[static_cast<std::size_t>(j)].c_str(),
                        stats::quantile_type7({col.data(), col.data() + col.size()}, 0.5),
                        col.minCoeff(), col.maxCoeff());
        }
        return 0;
    }

    if (mgwr_cmd->parsed()) {
        const Dataset ds = mgwr_points.load_validated();
        const DesignMatrix design = build_design(ds, !mgwr_no_standardize);
        SpatialWeights w = build_weights(mgwr_weights_method, mgwr_k, ds.points, mgwr_polygons);
        const SpatialWeights row_std = row_standardize(w);
        MgwrConfig cfg;
        cfg.kernel = make_kernel(mgwr_family, mgwr_mode);
        cfg.spatial_lag = !mgwr_no_lag;
        cfg.soc_tolerance = mgwr_soc;
        cfg.max_iterations = mgwr_max_iter;
        const MgwrFit fit = mgwr_fit(design, ds.points, &row_std, cfg);
        const OlsFit ols = ols_fit(build_design(ds, false));
        std::cout << format_mgwr_report(ols, fit);
        DiagnosticsReport diagnostics;
        diagnostics.significance = enp_and_inference(fit, mgwr_alpha);
        diagnostics.cooks = cooks_distance(fit);
        diagnostics.residual_moran =
            residual_moran_check(fit, row_std, std::max<std::size_t>(mgwr_moran_perms, 99), mgwr_seed);
        std::cout << '\n' << format_diagnostics_report(fit, diagnostics);
        if (!mgwr_export.empty()) {
            const Vector predicted = predict_surface(fit, &row_std);
            export_surfaces_geojson(fit, diagnostics, predicted, ds.points, nullptr, mgwr_export);
            std::printf("\nwrote %s\n", mgwr_export.c_str());
        }
        return 0;
    }

    if (sim_cmd->parsed()) {
        SimConfig cfg;
        cfg.side = sim_side;
        cfg.surfaces = parse_surface_list(sim_surfaces);
        cfg.noise_sd = sim_noise;
        cfg.rho = sim_rho;
        cfg.seed = sim_seed;
        const PointSet grid = generate_grid(cfg.side);
        const SpatialWeights w = row_standardize(knn_weights(grid, sim_k));
        const auto [dataset, truth] = generate_sample(cfg, w);
        write_dataset_csv(dataset, sim_out);
        if (!sim_truth_out.empty()) export_truth_file(truth, sim_truth_out);
        std::printf("wrote %s: n=%zu predictors=%zu rho=%.3f seed=%llu\n", sim_out.c_str(),
                    dataset.size(), dataset.predictor_count(), cfg.rho,
                    static_cast<unsigned long long>(cfg.seed));
        return 0;
    }

    if (run_cmd->parsed()) {
        PipelineConfig cfg = load_pipeline_config(run_config);
        if (threads > 0) cfg.threads = threads;
        const PipelineResult result = run_pipeline(cfg);
        for (const auto& artifact : result.artifacts) std::printf("wrote %s\n", artifact.c_str());
        if (!result.validation.dropped_ids.empty())
            std::printf("dropped %zu row(s) with non-finite values\n",
                        result.validation.dropped_ids.size());
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const spatialreg::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
