#pragma once

// Fast marching on an 8-neighbour stencil fan for Randers metrics, with
// simultaneous Voronoi labelling and an in-loop dynamic potential.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "ffp/edge_features.hpp"
#include "ffp/grid.hpp"
#include "ffp/metric.hpp"

namespace ffp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Offset {
  int dx;
  int dy;
};

/// Ring of the 8 neighbour offsets in counterclockwise order; simplex k joins
/// ring[k] and ring[(k+1) % 8].
struct StencilFan {
  static constexpr std::array<Offset, 8> ring{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  static constexpr std::size_t simplex_count = ring.size();
  static constexpr std::pair<Offset, Offset> simplex(std::size_t k) { return {ring[k], ring[(k + 1) % ring.size()]}; }
};

struct SeedSet {
  int label = 1;  // >= 1
  std::vector<Pixel> points;
};

/// Pairwise disjoint, nonempty, in-grid seed sets with distinct labels.
class SeedSets {
 public:
  SeedSets() = default;
  /// Throws DataError on empty sets, out-of-grid points, overlaps or bad labels.
  /// Duplicate points inside one set are removed.
  SeedSets(std::vector<SeedSet> sets, const Grid2D& grid);

  const std::vector<SeedSet>& sets() const { return sets_; }
  std::size_t set_count() const { return sets_.size(); }
  std::size_t point_count() const;
  bool empty() const { return sets_.empty(); }

 private:
  std::vector<SeedSet> sets_;
};

enum class PointState : std::uint8_t { Far, Trial, Accepted };

struct FrontState {
  ScalarField distance;
  Field<int> labels;  // 0 = unassigned
  Field<PointState> state;
  Field<std::uint8_t> seed;
  ScalarField dynamic_potential;
  std::size_t accepted_count = 0;
  std::vector<std::size_t> acceptance_order;
};

struct SimplexResult {
  double value = kInfinity;
  double lambda1 = 1.0;  // weight of z1; lambda2 = 1 - lambda1
};

/// min over lambda in [0,1] of C ‖v‖_M - C <ω, v> + lambda u1 + (1-lambda) u2 with
/// v = -(lambda e1 + (1-lambda) e2), where e_i = z_i - x are independent offsets.
/// The objective is convex; the stationary point is solved in closed form and
/// compared against both endpoints. An infinite vertex restricts to the other one.
SimplexResult simplex_minimize(Vec2 e1, Vec2 e2, double u1, double u2, const Spd2& m, Vec2 omega, double c);

/// Same, with the local metric taken at x (potential from the static field times
/// the given dynamic potential).
SimplexResult simplex_minimize(Pixel x, Pixel z1, Pixel z2, double u1, double u2, const RandersMetricField& metric,
                               double dynamic_potential = 1.0);

/// Label of the minimizing simplex: z1's if lambda1 >= lambda2, else z2's.
int voronoi_index_update(double lambda1, int label_z1, int label_z2);

struct HopfLaxResult {
  double value = kInfinity;
  int label = 0;
  double lambda1 = 1.0;
  int simplex = -1;
};

/// Minimum over the 8 simplexes around x; only Accepted vertices carry values,
/// others and off-grid vertices count as +infinity.
HopfLaxResult hopf_lax(Pixel x, const FrontState& state, const RandersMetricField& metric);
inline double hopf_lax_update(Pixel x, const FrontState& state, const RandersMetricField& metric) {
  return hopf_lax(x, state, metric).value;
}

/// exp(beta_d ‖F(z) - F(x_min)‖) over the feature channels.
double dynamic_update_fb(std::size_t z, std::size_t x_min, const ImageBuffer& features, double beta_d);

/// exp(beta_d |min(zeta(z) - zeta(x_min), 0)|).
double dynamic_update_tube(std::size_t z, std::size_t x_min, const ScalarField& zeta, double beta_d);

struct NoDynamics {};
struct FeatureDynamics {
  ImageBuffer features;
  double beta_d = 10.0;
};
struct TubeDynamics {
  ScalarField zeta;
  double beta_d = 10.0;
};
using DynamicRule = std::variant<NoDynamics, FeatureDynamics, TubeDynamics>;

struct FmmConfig {
  DynamicRule dynamics = NoDynamics{};
  std::optional<std::size_t> n_th;  // stop once this many points are Accepted
  std::function<void(std::size_t)> progress;  // called with accepted_count every few thousand accepts
};

FrontState run_fast_marching(const RandersMetricField& metric, const SeedSets& seeds, const FmmConfig& config = {});

struct RepairStats {
  int sweeps = 0;
  double last_max_update = 0.0;
  std::size_t changed_pixels = 0;
  bool converged = false;
};

/// Gauss-Seidel sweeps of the Hopf-Lax operator in four alternating orders until
/// the largest update drops below tol. Values only decrease; labels of changed
/// pixels are recomputed. Requires a full-domain run.
RepairStats fixed_point_repair(FrontState& state, const RandersMetricField& metric, int max_sweeps = 1000,
                               double tol = 1e-9);

/// max over non-seed pixels of |U(x) - hopf_lax_update(x)|.
double hopf_lax_residual(const FrontState& state, const RandersMetricField& metric);

}  // namespace ffp
