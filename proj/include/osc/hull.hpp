#pragma once

#include <array>
#include <optional>
#include <vector>

#include "osc/grid.hpp"

namespace osc {

// Closed convex hull of the masked cell centers.
//   volume: Lebesgue measure of the hull (length / area / volume for dim 1/2/3).
//   vertices: extreme points, deterministic order.
//   dim_supported: construction ran (dim <= 3 or an override was supplied).
//   degenerate: hull has empty interior (all centers affinely dependent);
//               volume is 0 then.
struct HullInfo {
    double volume = 0.0;
    std::vector<std::vector<double>> vertices;
    bool dim_supported = true;
    bool degenerate = false;
};

// dim > 3 has no built-in construction: pass volume_override to use an
// externally supplied value (vertices stay empty), otherwise ConfigError.
HullInfo convex_hull_volume(const GridFunction& g,
                            std::optional<double> volume_override = std::nullopt);

// Masks every cell whose center lies in the closed hull (half-space tests at
// relative tolerance 1e-9); cells gaining mask coverage take the masked
// minimum of g. Original masked values are untouched, so the global minimum
// is preserved and the op is idempotent. Requires dim <= 3.
GridFunction extend_to_hull(const GridFunction& g);

namespace hull_detail {

// 2-D monotone chain; returns hull vertex indices in counter-clockwise order,
// collinear inputs give the two extreme points.
std::vector<std::size_t> hull2d(const std::vector<std::array<double, 2>>& pts);
double polygon_area(const std::vector<std::array<double, 2>>& poly);

// 3-D incremental hull; returns triangle facets (indices, outward normals).
struct Facet3 {
    std::array<std::size_t, 3> v;
    std::array<double, 3> normal;  // not normalized
    double offset;                 // plane: normal . x = offset
};
std::vector<Facet3> hull3d(const std::vector<std::array<double, 3>>& pts);

}  // namespace hull_detail

}  // namespace osc
