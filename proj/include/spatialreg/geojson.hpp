#ifndef SPATIALREG_GEOJSON_HPP
#define SPATIALREG_GEOJSON_HPP

#include "spatialreg/core_data.hpp"
#include "spatialreg/mgwr.hpp"

#include <string>
#include <vector>

namespace spatialreg {

// FeatureCollection of Polygon/MultiPolygon features carrying an "id"
// property. Coordinates are taken as planar; MultiPolygon parts belong to one
// observation. Any other geometry type is an error.
PolygonSet load_polygons_geojson(const std::string& path);

// Quantile-bin label per value: the lowest bin is "<q1", the highest ">q4",
// interior bins "qlo-qhi" (quintile edges by default).
std::vector<std::string> quantile_bin_labels(const Vector& values, std::size_t bins = 5);

// One feature per observation with the fit surfaces as properties:
// predicted, beta_*/t_*, significance mask, Cook's D, residual. Numbers are
// serialized with 17 significant digits. Geometry comes from `points`, or
// from `polys` when non-null.
void export_surfaces_geojson(const MgwrFit& fit, const DiagnosticsReport& diagnostics,
                             const Vector& predicted, const PointSet& points,
                             const PolygonSet* polys, const std::string& path);

} // namespace spatialreg

#endif
