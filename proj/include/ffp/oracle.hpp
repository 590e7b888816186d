#pragma once

// Independent reference computations used to validate the solver. Nothing here
// calls into the fast-marching code path.

#include <vector>

#include "ffp/fmm.hpp"
#include "ffp/grid.hpp"
#include "ffp/metric.hpp"

namespace ffp::oracle {

struct GraphNeighborhood {
  std::vector<Offset> offsets;

  static GraphNeighborhood ring8();
  /// 8-ring plus the eight knight moves.
  static GraphNeighborhood ring16();
};

/// Local metric data bilinearly interpolated at a continuous position.
struct LocalMetric {
  Spd2 m;
  Vec2 omega;
  double c = 1.0;

  double eval(Vec2 u) const { return c * (spd_norm(m, u) - dot(omega, u)); }
};

LocalMetric sample_metric(const RandersMetricField& metric, Vec2 p);

/// Shortest paths on the directed grid graph with edge cost F(midpoint(x,y), y - x).
ScalarField dijkstra_distance(const RandersMetricField& metric, const SeedSets& seeds,
                              const GraphNeighborhood& neighborhood);

/// c (‖x - s‖_M - <ω, x - s>): the exact distance for a constant metric.
double analytic_constant_distance(const Spd2& m, Vec2 omega, double c, Vec2 s, Vec2 x);

/// Sum over segments of F(midpoint, Δ). Needs at least two vertices.
double polyline_length(const RandersMetricField& metric, const std::vector<Vec2>& polyline);

struct ResidualReport {
  ScalarField residual;  // NaN where not evaluated
  std::size_t evaluated = 0;
  double median_abs = 0.0;
  double p90_abs = 0.0;
};

/// r = ‖∇U + Cω‖_{(C²M)^{-1}} - 1 with central-difference gradients, at pixels whose
/// whole 8-neighbourhood is finite and in-grid, skipping pixels flagged in `exclude`.
ResidualReport eikonal_residual(const ScalarField& u, const RandersMetricField& metric,
                                const Field<std::uint8_t>* exclude = nullptr);

/// Ternary search on the simplex objective (no closed form), 1e-10 in lambda,
/// endpoints compared.
SimplexResult ternary_simplex_minimize(Vec2 e1, Vec2 e2, double u1, double u2, const LocalMetric& local);

struct SweepResult {
  ScalarField distance;
  int sweeps = 0;
  bool converged = false;
};

/// Pure Gauss-Seidel iteration of the 8-stencil Hopf-Lax operator from U = +inf
/// (0 on seeds), using the metric's current dynamic potential.
SweepResult iterated_hopf_lax(const RandersMetricField& metric, const SeedSets& seeds, int max_sweeps = 100000,
                              double tol = 1e-12);

}  // namespace ffp::oracle
