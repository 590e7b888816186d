#include "ffp/seeds_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>

#include "ffp/error.hpp"

namespace ffp {

using nlohmann::json;

SeedSets parse_seeds(const std::string& json_text, const Grid2D& grid) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("seed file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sets") || !doc["sets"].is_array()) {
    throw DataError("seed file needs a \"sets\" array");
  }
  std::vector<SeedSet> sets;
  for (std::size_t s = 0; s < doc["sets"].size(); ++s) {
    const json& js = doc["sets"][s];
    if (!js.is_object() || !js.contains("label") || !js["label"].is_number_integer() || !js.contains("points") ||
        !js["points"].is_array()) {
      throw DataError("seed set " + std::to_string(s) + " needs an integer \"label\" and a \"points\" array");
    }
    SeedSet set;
    const auto label = js["label"].get<long long>();
    if (label < 1 || label > 1'000'000) throw DataError("seed set " + std::to_string(s) + ": label must be >= 1");
    set.label = static_cast<int>(label);
    for (std::size_t k = 0; k < js["points"].size(); ++k) {
      const json& p = js["points"][k];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
        throw DataError("seed set " + std::to_string(s) + ", point " + std::to_string(k) + ": expected [x, y]");
      }
      const auto x = p[0].get<long long>(), y = p[1].get<long long>();
      if (x < 0 || y < 0 || x >= grid.width() || y >= grid.height()) {
        throw DataError("seed set " + std::to_string(s) + ", point " + std::to_string(k) + " (" + std::to_string(x) +
                        "," + std::to_string(y) + ") is outside the " + std::to_string(grid.width()) + "x" +
                        std::to_string(grid.height()) + " grid");
      }
      set.points.push_back({static_cast<int>(x), static_cast<int>(y)});
    }
    sets.push_back(std::move(set));
  }
  return SeedSets(std::move(sets), grid);
}

std::string seeds_to_json(const SeedSets& seeds) {
  json sets = json::array();
  for (const auto& s : seeds.sets()) {
    json pts = json::array();
    for (const Pixel p : s.points) pts.push_back({p.x, p.y});
    sets.push_back({{"label", s.label}, {"points", std::move(pts)}});
  }
  return json{{"sets", std::move(sets)}}.dump();
}

namespace {

// Coordinates are multiples of 1/2 for label contours and interpolated for level
// sets; 6 decimals is plenty and keeps the text stable.
json coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return json::parse(buf);
}

}  // namespace

std::string contours_to_json(const std::vector<Polyline>& contours) {
  json arr = json::array();
  for (const auto& c : contours) {
    json pts = json::array();
    for (const Vec2 p : c.points) pts.push_back({coord(p.x), coord(p.y)});
    arr.push_back({{"closed", c.closed}, {"points", std::move(pts)}});
  }
  return json{{"contours", std::move(arr)}}.dump();
}

std::string stats_to_json(const SegmentationStats& s) {
  json j{{"accepted_count", s.accepted_count},
         {"total", s.total},
         {"kappa", s.kappa},
         {"gvf_iterations", s.gvf_iterations},
         {"gvf_converged", s.gvf_converged},
         {"repair_sweeps", s.repair_sweeps},
         {"edge_pixels", s.edge_pixels},
         {"leak_order_violations", s.leak_order_violations},
         {"distance_threshold", s.distance_threshold},
         {"warnings", s.warnings}};
  return j.dump();
}

}  // namespace ffp
