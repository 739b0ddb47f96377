#include "spatialreg/geojson.hpp"
#include "spatialreg/error.hpp"
#include "spatialreg/csv.hpp"
#include "spatialreg/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace spatialreg {

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords) {
    Ring ring;
    ring.xs.reserve(coords.size());
    ring.ys.reserve(coords.size());
    for (const auto& position : coords) {
        if (!position.is_array() || position.size() < 2)
            throw Error("geojson: ring position must be [x, y, ...]");
        ring.xs.push_back(position[0].get<double>());
        ring.ys.push_back(position[1].get<double>());
    }
    return ring;
}

std::vector<Ring> parse_polygon(const json& coords) {
    std::vector<Ring> rings;
    rings.reserve(coords.size());
    for (const auto& ring : coords) rings.push_back(parse_ring(ring));
    return rings;
}

std::string id_to_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number()) return csv_format_double(value.get<double>());
    throw Error("geojson: feature id must be a string or number");
}

} // namespace

PolygonSet load_polygons_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("geojson: cannot open '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw Error("geojson '" + path + "': " + e.what());
    }
    if (root.value("type", "") != "FeatureCollection")
        throw Error("geojson '" + path + "': expected a FeatureCollection");
    const auto features = root.find("features");
    if (features == root.end() || !features->is_array())
        throw Error("geojson '" + path + "': missing features array");

    PolygonSet polys;
    std::set<std::string> numeric_names;
    std::vector<std::vector<std::pair<std::string, double>>> per_feature_attrs;
    std::size_t feature_no = 0;
    for (const auto& feature : *features) {
        ++feature_no;
        const auto geometry = feature.find("geometry");
        if (geometry == feature.end() || geometry->is_null())
            throw Error("geojson feature " + std::to_string(feature_no) + ": missing geometry");
        const std::string type = geometry->value("type", "");
        const auto& coords = geometry->at("coordinates");
        std::vector<Ring> rings;
        if (type == "Polygon") {
            rings = parse_polygon(coords);
        } else if (type == "MultiPolygon") {
            for (const auto& part : coords) {
                auto part_rings = parse_polygon(part);
                rings.insert(rings.end(), part_rings.begin(), part_rings.end());
            }
        } else {
            throw Error("geojson feature " + std::to_string(feature_no) +
                        ": geometry type '" + type + "' is not Polygon/MultiPolygon");
        }

        const auto props = feature.find("properties");
        if (props == feature.end() || !props->is_object() || !props->contains("id"))
            throw Error("geojson feature " + std::to_string(feature_no) + ": missing id property");
        polys.ids.push_back(id_to_string(props->at("id")));
        polys.rings.push_back(std::move(rings));

        std::vector<std::pair<std::string, double>> attrs;
        for (const auto& [key, value] : props->items()) {
            if (key == "id" || !value.is_number()) continue;
            attrs.emplace_back(key, value.get<double>());
            numeric_names.insert(key);
        }
        per_feature_attrs.push_back(std::move(attrs));
    }
    if (polys.ids.empty()) throw Error("geojson '" + path + "': no features");

    std::set<std::string> seen(polys.ids.begin(), polys.ids.end());
    if (seen.size() != polys.ids.size())
        throw Error("geojson '" + path + "': duplicate feature ids");

    polys.attr_names.assign(numeric_names.begin(), numeric_names.end());
    polys.attrs = Matrix::Constant(static_cast<Eigen::Index>(polys.size()),
                                   static_cast<Eigen::Index>(polys.attr_names.size()),
                                   std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < per_feature_attrs.size(); ++i)
        for (const auto& [key, value] : per_feature_attrs[i]) {
            const auto it = std::find(polys.attr_names.begin(), polys.attr_names.end(), key);
            polys.attrs(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(it - polys.attr_names.begin())) = value;
        }
    return polys;
}

std::vector<std::string> quantile_bin_labels(const Vector& values, std::size_t bins) {
    if (bins < 2) throw Error("quantile_bin_labels: need at least 2 bins");
    std::vector<double> sample(values.data(), values.data() + values.size());
    std::vector<double> edges(bins - 1);
    for (std::size_t b = 1; b < bins; ++b)
        edges[b - 1] = stats::quantile_type7(sample, static_cast<double>(b) / static_cast<double>(bins));

    const auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    std::vector<std::string> labels;
    labels.reserve(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double v = values(i);
        std::size_t b = 0;
        while (b < edges.size() && v > edges[b]) ++b;
        if (b == 0)
            labels.push_back("<" + fmt(edges.front()));
        else if (b == edges.size())
            labels.push_back(">" + fmt(edges.back()));
        else
            labels.push_back(fmt(edges[b - 1]) + "-" + fmt(edges[b]));
    }
    return labels;
}

namespace {

// Hand-rolled writer keeps numeric output at a fixed 17 significant digits.
class GeojsonWriter {
public:
    explicit GeojsonWriter(std::ostream& out) : out_(out) {}

    void number(double v) {
        if (std::isnan(v)) {
            out_ << "null";
            return;
        }
        if (std::isinf(v)) {
            out_ << (v > 0 ? "1e308" : "-1e308");
            return;
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out_ << buf;
    }

    void string(const std::string& s) {
        out_ << '"';
        for (const char c : s) {
            switch (c) {
                case '"': out_ << "\\\""; break;
                case '\\': out_ << "\\\\"; break;
                case '\n': out_ << "\\n"; break;
                case '\r': out_ << "\\r"; break;
                case '\t': out_ << "\\t"; break;
                default: out_ << c;
            }
        }
        out_ << '"';
    }

    std::ostream& raw() { return out_; }

private:
    std::ostream& out_;
};

} // namespace

void export_surfaces_geojson(const MgwrFit& fit, const DiagnosticsReport& diagnostics,
                             const Vector& predicted, const PointSet& points,
                             const PolygonSet* polys, const std::string& path) {
    const auto n = static_cast<Eigen::Index>(fit.n());
    const auto K = static_cast<Eigen::Index>(fit.covariates());
    if (static_cast<Eigen::Index>(points.size()) != n)
        throw Error("export_surfaces_geojson: geometry length does not match fit");
    if (polys && static_cast<Eigen::Index>(polys->size()) != n)
        throw Error("export_surfaces_geojson: polygon count does not match fit");
    if (predicted.size() != n)
        throw Error("export_surfaces_geojson: prediction length does not match fit");
    if (diagnostics.cooks.size() != n)
        throw Error("export_surfaces_geojson: Cook's distance length does not match fit");

    const std::vector<std::string> bins = quantile_bin_labels(predicted);

    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("export_surfaces_geojson: cannot open '" + path + "'");
    GeojsonWriter w(file);
    auto& out = w.raw();

    out << "{\"type\":\"FeatureCollection\",\"features\":[\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i) out << ",\n";
        out << "{\"type\":\"Feature\",\"geometry\":";
        if (polys) {
            const auto& rings = polys->rings[static_cast<std::size_t>(i)];
            out << "{\"type\":\"MultiPolygon\",\"coordinates\":[";
            for (std::size_t r = 0; r < rings.size(); ++r) {
                if (r) out << ',';
                out << "[[";
                const auto& ring = rings[r];
                for (std::size_t v = 0; v < ring.xs.size(); ++v) {
                    if (v) out << ',';
                    out << '[';
                    w.number(ring.xs[v]);
                    out << ',';
                    w.number(ring.ys[v]);
                    out << ']';
                }
                out << "]]";
            }
            out << "]}";
        } else {
            out << "{\"type\":\"Point\",\"coordinates\":[";
            w.number(points.x(i));
            out << ',';
            w.number(points.y(i));
            out << "]}";
        }
        out << ",\"properties\":{";
        out << "\"id\":";
        w.string(points.ids[static_cast<std::size_t>(i)]);
        out << ",\"predicted\":";
        w.number(predicted(i));
        out << ",\"predicted_bin\":";
        w.string(bins[static_cast<std::size_t>(i)]);
        out << ",\"residual\":";
        w.number(fit.residuals(i));
        out << ",\"cooks_d\":";
        w.number(diagnostics.cooks(i));
        for (Eigen::Index k = 0; k < K; ++k) {
            const std::string& name = fit.term_names[static_cast<std::size_t>(k)];
            out << ',';
            w.string("beta_" + name);
            out << ':';
            w.number(fit.coefficient_surfaces(i, k));
            out << ',';
            w.string("t_" + name);
            out << ':';
            w.number(fit.local_t_values(i, k));
            out << ',';
            w.string("sig_" + name);
            out << ':' << (diagnostics.significance.significant(i, k) ? "true" : "false");
        }
        out << "}}";
    }
    out << "\n]}\n";
    if (!file) throw Error("export_surfaces_geojson: write failed for '" + path + "'");
}

} // namespace spatialreg
