#include "spatialreg/weights.hpp"
#include "spatialreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace spatialreg {

std::size_t SpatialWeights::nonzero_links() const {
    std::size_t count = 0;
    for (const auto& row : neighbors) count += row.size();
    return count;
}

double SpatialWeights::total_weight() const {
    double total = 0.0;
    for (const auto& row : neighbors)
        for (const auto& link : row) total += link.weight;
    return total;
}

double SpatialWeights::row_sum(std::size_t i) const {
    double total = 0.0;
    for (const auto& link : neighbors[i]) total += link.weight;
    return total;
}

Vector SpatialWeights::lag(const Vector& values) const {
    if (static_cast<std::size_t>(values.size()) != n)
        throw Error("SpatialWeights::lag: vector length does not match n");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& link : neighbors[i]) acc += link.weight * values(link.index);
        out(static_cast<Eigen::Index>(i)) = acc;
    }
    return out;
}

namespace {

void sort_rows(SpatialWeights& w) {
    for (auto& row : w.neighbors)
        std::sort(row.begin(), row.end(),
                  [](const NeighborLink& a, const NeighborLink& b) { return a.index < b.index; });
}

// Indices of the k nearest neighbors of i (self excluded), ties broken by
// lower index. Shared by knn_weights and hybrid_kernel_weights so both pick
// identical neighbor sets.
std::vector<std::uint32_t> nearest_indices(const PointSet& points, std::size_t i, std::size_t k) {
    const std::size_t n = points.size();
    std::vector<std::pair<double, std::uint32_t>> dist;
    dist.reserve(n - 1);
    const double xi = points.x(static_cast<Eigen::Index>(i));
    const double yi = points.y(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dx = points.x(static_cast<Eigen::Index>(j)) - xi;
        const double dy = points.y(static_cast<Eigen::Index>(j)) - yi;
        dist.emplace_back(dx * dx + dy * dy, static_cast<std::uint32_t>(j));
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::uint32_t> out(k);
    for (std::size_t m = 0; m < k; ++m) out[m] = dist[m].second;
    return out;
}

void check_points(const PointSet& points) {
    for (Eigen::Index i = 0; i < points.x.size(); ++i)
        if (!std::isfinite(points.x(i)) || !std::isfinite(points.y(i)))
            throw Error("weights: non-finite coordinate at id '" +
                        points.ids[static_cast<std::size_t>(i)] + "'");
}

double mean_nearest_neighbor_distance(const PointSet& points) {
    const std::size_t n = points.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        const double xi = points.x(static_cast<Eigen::Index>(i));
        const double yi = points.y(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = points.x(static_cast<Eigen::Index>(j)) - xi;
            const double dy = points.y(static_cast<Eigen::Index>(j)) - yi;
            best = std::min(best, dx * dx + dy * dy);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(n);
}

} // namespace

SpatialWeights knn_weights(const PointSet& points, std::size_t k) {
    const std::size_t n = points.size();
    if (k == 0) throw Error("knn_weights: k must be positive");
    if (k >= n)
        throw Error("knn_weights: k = " + std::to_string(k) +
                    " must be smaller than the observation count " + std::to_string(n));
    check_points(points);

    SpatialWeights w;
    w.n = n;
    w.neighbors.resize(n);
    w.scheme = WeightScheme::Binary;
    w.symmetric_before_standardization = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto idx = nearest_indices(points, i, k);
        auto& row = w.neighbors[i];
        row.reserve(k);
        for (auto j : idx) row.push_back({j, 1.0});
    }
    sort_rows(w);
    return w;
}

SpatialWeights hybrid_kernel_weights(const PointSet& points, std::size_t k) {
    const std::size_t n = points.size();
    if (k == 0) throw Error("hybrid_kernel_weights: k must be positive");
    if (k >= n)
        throw Error("hybrid_kernel_weights: k = " + std::to_string(k) +
                    " must be smaller than the observation count " + std::to_string(n));
    check_points(points);

    const double eps_dist = 1e-6 * mean_nearest_neighbor_distance(points);
    if (eps_dist == 0.0 && n > 1) {
        // Every point coincides with its nearest neighbor only when the whole
        // set is degenerate for inverse-distance weighting.
        bool any_positive = false;
        for (std::size_t i = 1; i < n && !any_positive; ++i)
            any_positive = points.x(static_cast<Eigen::Index>(i)) != points.x(0) ||
                           points.y(static_cast<Eigen::Index>(i)) != points.y(0);
        if (!any_positive)
            throw Error("hybrid_kernel_weights: all points coincide, inverse distance undefined");
    }

    SpatialWeights w;
    w.n = n;
    w.neighbors.resize(n);
    w.scheme = WeightScheme::RawKernel;
    w.symmetric_before_standardization = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto idx = nearest_indices(points, i, k);
        auto& row = w.neighbors[i];
        row.reserve(k);
        const double xi = points.x(static_cast<Eigen::Index>(i));
        const double yi = points.y(static_cast<Eigen::Index>(i));
        for (auto j : idx) {
            const double dx = points.x(j) - xi;
            const double dy = points.y(j) - yi;
            double d = std::sqrt(dx * dx + dy * dy);
            if (d == 0.0) d = eps_dist;
            row.push_back({j, 1.0 / d});
        }
    }
    sort_rows(w);
    return w;
}

SpatialWeights queen_contiguity(const PolygonSet& polys) {
    const std::size_t n = polys.size();
    if (n == 0) throw Error("queen_contiguity: empty polygon set");

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    std::size_t vertex_count = 0;
    for (const auto& obs : polys.rings)
        for (const auto& ring : obs) {
            if (ring.xs.size() != ring.ys.size())
                throw Error("queen_contiguity: ring coordinate arrays differ in length");
            for (std::size_t v = 0; v < ring.xs.size(); ++v) {
                min_x = std::min(min_x, ring.xs[v]);
                max_x = std::max(max_x, ring.xs[v]);
                min_y = std::min(min_y, ring.ys[v]);
                max_y = std::max(max_y, ring.ys[v]);
                ++vertex_count;
            }
        }
    if (vertex_count == 0) throw Error("queen_contiguity: polygons contain no vertices");

    const double diag = std::hypot(max_x - min_x, max_y - min_y);
    const double tol = 1e-9 * (diag > 0.0 ? diag : 1.0);

    // Snap vertices to a grid of cell size tol and compare across the 3x3
    // neighborhood so points straddling a cell boundary still match.
    struct CellKey {
        std::int64_t cx, cy;
        bool operator==(const CellKey& o) const { return cx == o.cx && cy == o.cy; }
    };
    struct CellHash {
        std::size_t operator()(const CellKey& k) const {
            std::uint64_t h = static_cast<std::uint64_t>(k.cx) * 0x9e3779b97f4a7c15ULL;
            h ^= static_cast<std::uint64_t>(k.cy) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };
    struct VertexRef {
        double x, y;
        std::uint32_t poly;
    };
    std::unordered_map<CellKey, std::vector<VertexRef>, CellHash> grid;
    grid.reserve(vertex_count);
    auto cell_of = [tol](double v) { return static_cast<std::int64_t>(std::floor(v / tol)); };
    for (std::size_t p = 0; p < n; ++p)
        for (const auto& ring : polys.rings[p])
            for (std::size_t v = 0; v < ring.xs.size(); ++v)
                grid[{cell_of(ring.xs[v]), cell_of(ring.ys[v])}].push_back(
                    {ring.xs[v], ring.ys[v], static_cast<std::uint32_t>(p)});

    std::vector<std::vector<std::uint32_t>> adjacency(n);
    const double tol2 = tol * tol;
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& ring : polys.rings[p]) {
            for (std::size_t v = 0; v < ring.xs.size(); ++v) {
                const double vx = ring.xs[v], vy = ring.ys[v];
                const std::int64_t cx = cell_of(vx), cy = cell_of(vy);
                for (std::int64_t dx = -1; dx <= 1; ++dx)
                    for (std::int64_t dy = -1; dy <= 1; ++dy) {
                        auto it = grid.find({cx + dx, cy + dy});
                        if (it == grid.end()) continue;
                        for (const auto& other : it->second) {
                            if (other.poly == p) continue;
                            const double ddx = other.x - vx, ddy = other.y - vy;
                            if (ddx * ddx + ddy * ddy <= tol2)
                                adjacency[p].push_back(other.poly);
                        }
                    }
            }
        }
    }

    SpatialWeights w;
    w.n = n;
    w.neighbors.resize(n);
    w.scheme = WeightScheme::Binary;
    w.symmetric_before_standardization = true;
    for (std::size_t p = 0; p < n; ++p) {
        auto& adj = adjacency[p];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        auto& row = w.neighbors[p];
        row.reserve(adj.size());
        for (auto j : adj) row.push_back({j, 1.0});
    }
    return w;
}

SpatialWeights row_standardize(const SpatialWeights& w) {
    SpatialWeights out = w;
    for (std::size_t i = 0; i < out.n; ++i) {
        const double total = out.row_sum(i);
        if (total == 0.0) continue; // island row stays empty
        for (auto& link : out.neighbors[i]) link.weight /= total;
    }
    out.scheme = WeightScheme::RowStandardized;
    return out;
}

WeightsSummary weights_summary(const SpatialWeights& w) {
    WeightsSummary s;
    s.n_regions = w.n;
    s.nonzero_links = w.nonzero_links();
    s.average_links = w.n == 0 ? 0.0
                               : static_cast<double>(s.nonzero_links) / static_cast<double>(w.n);
    for (std::size_t i = 0; i < w.n; ++i)
        if (w.neighbors[i].empty()) ++s.islands;
    return s;
}

void export_weights(const SpatialWeights& w, const std::vector<std::string>& ids, std::ostream& out) {
    if (ids.size() != w.n) throw Error("export_weights: id list does not match n");
    out << "i_id,j_id,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < w.n; ++i)
        for (const auto& link : w.neighbors[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", link.weight);
            out << ids[i] << ',' << ids[link.index] << ',' << buf << '\n';
        }
}

void export_weights_file(const SpatialWeights& w, const std::vector<std::string>& ids,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("export_weights: cannot open '" + path + "' for writing");
    export_weights(w, ids, out);
}

SpatialWeights import_weights(std::istream& in, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!index.emplace(ids[i], static_cast<std::uint32_t>(i)).second)
            throw Error("import_weights: duplicate id '" + ids[i] + "' in id universe");

    SpatialWeights w;
    w.n = ids.size();
    w.neighbors.resize(w.n);

    std::string line;
    if (!std::getline(in, line)) throw Error("import_weights: empty file");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "i_id,j_id,weight")
        throw Error("import_weights: expected header 'i_id,j_id,weight', got '" + line + "'");

    std::size_t line_no = 1;
    bool all_unit = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw Error("import_weights: line " + std::to_string(line_no) + ": expected 3 columns");
        const std::string i_id = line.substr(0, c1);
        const std::string j_id = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string w_str = line.substr(c2 + 1);
        const auto it_i = index.find(i_id);
        const auto it_j = index.find(j_id);
        if (it_i == index.end())
            throw Error("import_weights: line " + std::to_string(line_no) + ": unknown id '" + i_id + "'");
        if (it_j == index.end())
            throw Error("import_weights: line " + std::to_string(line_no) + ": unknown id '" + j_id + "'");
        double value = 0.0;
        try {
            std::size_t pos = 0;
            value = std::stod(w_str, &pos);
            if (pos != w_str.size()) throw std::invalid_argument(w_str);
        } catch (const std::exception&) {
            throw Error("import_weights: line " + std::to_string(line_no) +
                        ": unparseable weight '" + w_str + "'");
        }
        if (!(value >= 0.0) || !std::isfinite(value))
            throw Error("import_weights: line " + std::to_string(line_no) +
                        ": weight must be finite and >= 0");
        if (it_i->second == it_j->second)
            throw Error("import_weights: line " + std::to_string(line_no) + ": self-link for id '" + i_id + "'");
        if (value == 0.0) continue;
        if (value != 1.0) all_unit = false;
        w.neighbors[it_i->second].push_back({it_j->second, value});
    }
    sort_rows(w);
    for (std::size_t i = 0; i < w.n; ++i) {
        const auto& row = w.neighbors[i];
        for (std::size_t m = 1; m < row.size(); ++m)
            if (row[m].index == row[m - 1].index)
                throw Error("import_weights: duplicate link " + ids[i] + " -> " + ids[row[m].index]);
    }

    if (all_unit) {
        w.scheme = WeightScheme::Binary;
    } else {
        bool row_std = true;
        for (std::size_t i = 0; i < w.n && row_std; ++i) {
            if (w.neighbors[i].empty()) continue;
            row_std = std::fabs(w.row_sum(i) - 1.0) <= 1e-9;
        }
        w.scheme = row_std ? WeightScheme::RowStandardized : WeightScheme::RawKernel;
    }
    return w;
}

SpatialWeights import_weights_file(const std::string& path, const std::vector<std::string>& ids) {
    std::ifstream in(path);
    if (!in) throw Error("import_weights: cannot open '" + path + "'");
    return import_weights(in, ids);
}

} // namespace spatialreg
