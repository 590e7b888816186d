#include "ffp/segmentation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "ffp/error.hpp"

namespace ffp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void leak_diagnostics(const RandersMetricField& metric, const ScalarField& rho, double alpha_b,
                      SegmentationStats& stats) {
  const double rmax = max_abs(rho);
  if (!(rmax > 0.0) || !(alpha_b > 0.0) || !metric.sources) return;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.5 * rmax)) continue;
    ++stats.edge_pixels;
    const Vec2 g = metric.sources->g[i];
    if (!(metric.eval(i, g) < metric.eval(i, -1.0 * g))) ++stats.leak_order_violations;
  }
}

void require_inside(const SeedSets& seeds, const Grid2D& grid) {
  for (const auto& set : seeds.sets()) {
    for (const Pixel p : set.points) {
      if (!grid.contains(p)) {
        throw DataError("seed (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") lies outside the " +
                        std::to_string(grid.width()) + "x" + std::to_string(grid.height()) + " image");
      }
    }
  }
}

std::function<void(std::size_t)> wrap_progress(const SegmentOptions& options, std::size_t total) {
  if (!options.progress) return {};
  return [cb = options.progress, total](std::size_t n) { cb(n, total); };
}

}  // namespace

EdgeFeatures compute_edge_features(const ImageBuffer& img, const CostParams& params, ColorSpace colorspace) {
  params.validate();
  const bool lab = colorspace == ColorSpace::Lab && img.channels() == 3;
  ScalarField rho = edge_saliency(lab ? rgb_to_lab(img) : img, params.sigma);
  GvfParams gp;
  gp.epsilon = params.epsilon;
  GvfResult h = gvf(rho, gp);
  UnitFieldResult g = unit_vector_field(h.field);
  return {std::move(rho), std::move(h), std::move(g)};
}

ScalarField normalized_gray(const ImageBuffer& img) {
  ScalarField z = img.gray();
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double a = *lo, b = *hi;
  for (auto& v : z) v = b > a ? (v - a) / (b - a) : 0.0;
  return z;
}

SegmentationResult segment_fb(const ImageBuffer& img, const SeedSets& seeds, const CostParams& params,
                              const SegmentOptions& options) {
  const auto t0 = Clock::now();
  require_inside(seeds, img.grid());
  if (seeds.set_count() < 2) throw DataError("foreground/background segmentation needs at least two seed sets");
  EdgeFeatures ef = compute_edge_features(img, params, options.colorspace);
  RandersMetricField metric = build_fb_metric(ef.rho, ef.g.field, params);

  FmmConfig cfg;
  if (options.feature_map) {
    if (!(options.feature_map->grid() == img.grid())) throw DataError("feature map size differs from the image");
    cfg.dynamics = FeatureDynamics{ImageBuffer::from_gray(*options.feature_map), params.beta_d};
  } else {
    cfg.dynamics = FeatureDynamics{img, params.beta_d};
  }
  cfg.progress = wrap_progress(options, img.grid().size());
  FrontState st = run_fast_marching(metric, seeds, cfg);
  metric.dynamic_potential = st.dynamic_potential;
  const RepairStats rs = fixed_point_repair(st, metric, options.repair_max_sweeps);

  SegmentationResult r{st.labels, extract_contours(st.labels), st.distance, {}};
  r.stats.accepted_count = st.accepted_count;
  r.stats.total = img.grid().size();
  r.stats.kappa = anisotropy_ratio(metric);
  r.stats.gvf_iterations = ef.gvf.iterations;
  r.stats.gvf_converged = ef.gvf.converged;
  r.stats.repair_sweeps = rs.sweeps;
  if (!ef.gvf.converged) r.stats.warnings.push_back("gradient vector flow did not reach its tolerance");
  if (!rs.converged) r.stats.warnings.push_back("fixed-point repair stopped at the sweep limit");
  leak_diagnostics(metric, ef.rho, params.alpha_b, r.stats);
  r.stats.runtime_seconds = seconds_since(t0);
  return r;
}

SegmentationResult segment_tube(const ImageBuffer& img, const SeedSets& seeds, const CostParams& params,
                                std::size_t n_th, const SegmentOptions& options) {
  const auto t0 = Clock::now();
  require_inside(seeds, img.grid());
  if (seeds.set_count() != 1) throw DataError("tubular segmentation needs exactly one seed set");
  if (n_th < seeds.point_count()) throw ConfigError("n_th must be at least the number of seed points");
  std::vector<std::string> warnings;
  const std::size_t total = img.grid().size();
  if (n_th > total) {
    warnings.push_back("n_th " + std::to_string(n_th) + " exceeds the grid size; clamped to " +
                       std::to_string(total));
    n_th = total;
  }
  EdgeFeatures ef = compute_edge_features(img, params, options.colorspace);
  ScalarField zeta = normalized_gray(img);
  RandersMetricField metric = build_tube_metric(ef.rho, zeta, ef.g.field, params);

  FmmConfig cfg;
  cfg.dynamics = TubeDynamics{zeta, params.beta_d};
  cfg.n_th = n_th;
  cfg.progress = wrap_progress(options, n_th);
  FrontState st = run_fast_marching(metric, seeds, cfg);

  SegmentationResult r{Field<int>(img.grid(), 0), {}, st.distance, {}};
  double t_max = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (st.state[i] != PointState::Accepted) continue;
    r.label_map[i] = 1;
    t_max = std::max(t_max, st.distance[i]);
  }
  const double t_h = options.t_h.value_or(t_max);
  // Points beyond the front carry +inf; any value above the level traces the same curve.
  ScalarField finite = st.distance;
  const double cap = 2.0 * std::max(t_h, t_max) + 1.0;
  for (auto& v : finite) {
    if (!std::isfinite(v) || v > cap) v = cap;
  }
  r.contours = iso_contours(finite, t_h);

  r.stats.accepted_count = st.accepted_count;
  r.stats.total = n_th;
  r.stats.kappa = anisotropy_ratio(metric);
  r.stats.gvf_iterations = ef.gvf.iterations;
  r.stats.gvf_converged = ef.gvf.converged;
  r.stats.distance_threshold = t_h;
  r.stats.warnings = std::move(warnings);
  if (!ef.gvf.converged) r.stats.warnings.push_back("gradient vector flow did not reach its tolerance");
  leak_diagnostics(metric, ef.rho, params.alpha_b, r.stats);
  r.stats.runtime_seconds = seconds_since(t0);
  return r;
}

double region_iou(const Field<std::uint8_t>& a, const Field<std::uint8_t>& b) {
  if (!(a.grid() == b.grid())) throw ConfigError("masks have different grids");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0, y = b[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Field<std::uint8_t> label_mask(const Field<int>& label_map, int label) {
  Field<std::uint8_t> m(label_map.grid(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = label_map[i] == label ? 1 : 0;
  return m;
}

}  // namespace ffp
