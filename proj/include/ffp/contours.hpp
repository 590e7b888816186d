#pragma once

#include <vector>

#include "ffp/grid.hpp"

namespace ffp {

/// Polyline in pixel coordinates (pixel centres at integer positions). A closed
/// polyline does not repeat its first vertex.
struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
};

/// Marching squares over label transitions. Vertices sit at midpoints between
/// differently labelled neighbours; cells touching three or more labels join
/// their crossings at the cell centre. Each boundary is traced once.
std::vector<Polyline> extract_contours(const Field<int>& label_map);

/// Marching squares on the level set {f = level}, "inside" meaning f <= level.
/// Crossings are linearly interpolated; saddles are resolved by the cell mean.
/// Non-finite samples must be replaced by the caller.
std::vector<Polyline> iso_contours(const ScalarField& f, double level);

/// Euclidean length, including the closing segment of closed polylines.
double polyline_perimeter(const Polyline& p);

}  // namespace ffp
