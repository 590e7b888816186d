#pragma once

#include <string>
#include <vector>

#include "ffp/contours.hpp"
#include "ffp/fmm.hpp"
#include "ffp/segmentation.hpp"

namespace ffp {

/// {"sets":[{"label":1,"points":[[x,y],...]},...]}, 0-based, x = column.
/// Throws DataError on malformed JSON, out-of-grid points, overlaps or empty sets.
SeedSets parse_seeds(const std::string& json_text, const Grid2D& grid);

std::string seeds_to_json(const SeedSets& seeds);

/// {"contours":[{"closed":bool,"points":[[x,y],...]}]} with coordinates printed
/// with a fixed precision so repeated runs give identical bytes.
std::string contours_to_json(const std::vector<Polyline>& contours);

/// Summary statistics of a run, without wall-clock time.
std::string stats_to_json(const SegmentationStats& stats);

}  // namespace ffp
