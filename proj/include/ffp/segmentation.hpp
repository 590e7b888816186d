#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ffp/contours.hpp"
#include "ffp/edge_features.hpp"
#include "ffp/fmm.hpp"
#include "ffp/metric.hpp"

namespace ffp {

enum class ColorSpace { Rgb, Lab };

struct SegmentationStats {
  std::size_t accepted_count = 0;
  std::size_t total = 0;
  double runtime_seconds = 0.0;
  double kappa = 1.0;
  int gvf_iterations = 0;
  bool gvf_converged = false;
  int repair_sweeps = 0;
  /// Edge pixels (rho > 0.5 max rho) where F(x, g) < F(x, -g) fails although alpha_b > 0.
  std::size_t leak_order_violations = 0;
  std::size_t edge_pixels = 0;
  double distance_threshold = 0.0;  // tube mode: the level of the traced contour
  std::vector<std::string> warnings;
};

struct SegmentationResult {
  Field<int> label_map;
  std::vector<Polyline> contours;
  ScalarField distance_map;
  SegmentationStats stats;
};

struct SegmentOptions {
  ColorSpace colorspace = ColorSpace::Rgb;
  /// Replaces the color vector as the feature map of the dynamic potential.
  std::optional<ScalarField> feature_map;
  /// Tube mode contour level; defaults to the largest accepted distance.
  std::optional<double> t_h;
  std::function<void(std::size_t accepted, std::size_t total)> progress;
  int repair_max_sweeps = 1000;
};

/// Edge saliency, GVF and unit edge field shared by both pipelines.
struct EdgeFeatures {
  ScalarField rho;
  GvfResult gvf;
  UnitFieldResult g;
};

EdgeFeatures compute_edge_features(const ImageBuffer& img, const CostParams& params,
                                   ColorSpace colorspace = ColorSpace::Rgb);

/// Min-max normalized gray levels; a constant image maps to 0.
ScalarField normalized_gray(const ImageBuffer& img);

/// Foreground/background segmentation by geodesic Voronoi regions.
SegmentationResult segment_fb(const ImageBuffer& img, const SeedSets& seeds, const CostParams& params,
                              const SegmentOptions& options = {});

/// Tubular segmentation by a front truncated after n_th accepted points.
SegmentationResult segment_tube(const ImageBuffer& img, const SeedSets& seeds, const CostParams& params,
                                std::size_t n_th, const SegmentOptions& options = {});

/// |A ∩ B| / |A ∪ B| of the nonzero pixels; 1 when both are empty.
double region_iou(const Field<std::uint8_t>& a, const Field<std::uint8_t>& b);

/// Pixels where label_map == label.
Field<std::uint8_t> label_mask(const Field<int>& label_map, int label);

}  // namespace ffp
