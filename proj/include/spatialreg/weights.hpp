#ifndef SPATIALREG_WEIGHTS_HPP
#define SPATIALREG_WEIGHTS_HPP

#include "spatialreg/core_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spatialreg {

enum class WeightScheme { Binary, RowStandardized, RawKernel };

struct NeighborLink {
    std::uint32_t index;
    double weight;
};

// Sparse spatial weights matrix W. Neighbor lists are kept sorted by index
// and never contain self-links.
struct SpatialWeights {
    std::size_t n = 0;
    std::vector<std::vector<NeighborLink>> neighbors;
    WeightScheme scheme = WeightScheme::Binary;
    bool symmetric_before_standardization = false;

    std::size_t nonzero_links() const;
    // W = sum of all weights.
    double total_weight() const;
    double row_sum(std::size_t i) const;
    // Spatial lag Wx.
    Vector lag(const Vector& values) const;
    bool is_row_standardized() const { return scheme == WeightScheme::RowStandardized; }
};

struct WeightsSummary {
    std::size_t n_regions = 0;
    std::size_t nonzero_links = 0;
    double average_links = 0.0;
    std::size_t islands = 0;
};

// Each observation linked (weight 1) to its k nearest neighbors by Euclidean
// distance; directed. Distance ties break toward the lower observation index.
SpatialWeights knn_weights(const PointSet& points, std::size_t k);

// Binary symmetric queen contiguity: polygons are neighbors iff they share at
// least one vertex within a snapping tolerance of 1e-9 x bounding-box diagonal.
SpatialWeights queen_contiguity(const PolygonSet& polys);

// Inverse-distance weights restricted to the k nearest neighbors; coincident
// points use eps = 1e-6 x mean nearest-neighbor distance instead of d = 0.
SpatialWeights hybrid_kernel_weights(const PointSet& points, std::size_t k);

// Divides every row by its sum; island rows stay empty. Idempotent.
SpatialWeights row_standardize(const SpatialWeights& w);

WeightsSummary weights_summary(const SpatialWeights& w);

// 3-column text format: header "i_id,j_id,weight", one directed link per line.
void export_weights(const SpatialWeights& w, const std::vector<std::string>& ids, std::ostream& out);
void export_weights_file(const SpatialWeights& w, const std::vector<std::string>& ids, const std::string& path);

// Import against a known id universe (ids absent from the file are islands).
// The scheme is inferred: all weights 1 -> Binary, all non-empty rows summing
// to 1 -> RowStandardized, otherwise RawKernel.
SpatialWeights import_weights(std::istream& in, const std::vector<std::string>& ids);
SpatialWeights import_weights_file(const std::string& path, const std::vector<std::string>& ids);

} // namespace spatialreg

#endif
