#pragma once

// Data-driven Randers metrics F(x,u) = C(x) (‖u‖_{M(x)} - <ω(x), u>).
//
// M and ω are assembled from a unit edge field g and two cost maps psi_f <= psi_b so
// that, with C = 1, F(x, g) = psi_f, F(x, -g) = psi_b and F(x, g⊥) = 1.

#include <optional>
#include <vector>

#include "ffp/grid.hpp"

namespace ffp {

enum class MetricMode { FB, Tube };

struct CostParams {
  double alpha_f = 2.0;
  double alpha_b = 3.0;
  double beta_s = 10.0;
  double beta_d = 10.0;
  double sigma = 1.0;
  double epsilon = 0.1;
  std::optional<double> mu;  // nullopt means "auto" = ‖psi_f‖²_∞

  void validate() const;
};

struct CostMaps {
  ScalarField psi_f;
  ScalarField psi_b;
};

/// What a metric was assembled from; present for metrics built by this module.
struct MetricSources {
  VectorField2 g;
  ScalarField psi_f;
  ScalarField psi_b;
  double mu = 0.0;
};

struct RandersMetricField {
  SpdTensorField tensor;
  VectorField2 omega;
  ScalarField static_potential;
  /// Scaled during a solver run; each run works on its own copy.
  ScalarField dynamic_potential;
  MetricMode mode = MetricMode::FB;
  std::optional<MetricSources> sources;

  const Grid2D& grid() const { return tensor.grid(); }
  double potential(std::size_t i) const { return static_potential[i] * dynamic_potential[i]; }

  /// Randers part without the potential.
  double eval_unscaled(std::size_t i, Vec2 u) const { return spd_norm(tensor[i], u) - dot(omega[i], u); }
  double eval(std::size_t i, Vec2 u) const { return potential(i) * eval_unscaled(i, u); }
};

/// Metric with the same (M, ω, C) at every pixel, dynamic potential 1.
RandersMetricField constant_metric(Grid2D grid, const Spd2& m, Vec2 omega, double c = 1.0);

/// Isotropic metric C(x) ‖u‖.
RandersMetricField isotropic_metric(const ScalarField& potential);

/// psi_f = exp(alpha_f rho/‖rho‖∞), psi_b = exp(alpha_b rho/‖rho‖∞) psi_f; rho/‖rho‖∞ := 0 when ‖rho‖∞ = 0.
CostMaps cost_functions(const ScalarField& rho, double alpha_f, double alpha_b);

/// M = ¼(psi_f+psi_b)² g⊗g + g⊥⊗g⊥ for a unit field g.
SpdTensorField build_tensor(const VectorField2& g, const ScalarField& psi_f, const ScalarField& psi_b);

/// ω = ½(psi_b - psi_f) g.
VectorField2 build_omega(const VectorField2& g, const ScalarField& psi_f, const ScalarField& psi_b);

/// M + mu g⊗g.
SpdTensorField build_tubular_tensor(const SpdTensorField& m, const VectorField2& g, double mu);

/// mu "auto" value ‖psi_f‖²_∞.
double auto_mu(const ScalarField& psi_f);

/// exp(beta_s rho/‖rho‖∞).
ScalarField static_potential_fb(const ScalarField& rho, double beta_s);

/// exp(beta_s (‖zeta‖∞ - zeta)), zeta in [0,1].
ScalarField static_potential_tube(const ScalarField& zeta, double beta_s);

/// Full FB metric from saliency and unit edge field.
RandersMetricField build_fb_metric(const ScalarField& rho, const VectorField2& g, const CostParams& params);

/// Full tubular metric: tensor enhanced by mu g⊗g, potential from zeta.
RandersMetricField build_tube_metric(const ScalarField& rho, const ScalarField& zeta, const VectorField2& g,
                                     const CostParams& params);

/// Throws ConfigError for u = 0.
double eval_metric(const RandersMetricField& field, Pixel x, Vec2 u);

struct PositivityReport {
  double max_ratio = 0.0;  // max over pixels of ‖ω‖_{M^{-1}}
  bool passed = true;      // max_ratio < 1
  std::optional<double> max_closed_form;
  std::optional<double> max_closed_form_gap;  // max |quadratic form - closed form|
};

PositivityReport positivity_check(const RandersMetricField& field);

/// max_u F(x,u)/min_v F(x,v) over unit vectors at one pixel.
double local_anisotropy(const RandersMetricField& field, std::size_t i);

/// Max of local_anisotropy over the grid. Sampled every pi/180 with one Newton
/// refinement of each extremum.
double anisotropy_ratio(const RandersMetricField& field);

/// Boundary points u_j / F(x,u_j) of the unit ball for u_j at angles 2πj/n_samples.
std::vector<Vec2> control_set(const RandersMetricField& field, Pixel x, int n_samples);

struct DirectionalCost {
  double angle = 0.0;  // rotation from g(x), counterclockwise
  double cost = 0.0;   // Randers cost without the potential
  Vec2 ball_point;     // u / cost
};

/// Costs along u_j = R(j·2π/n) g(x), j = 1..n. Requires metric sources.
std::vector<DirectionalCost> directional_costs(const RandersMetricField& field, Pixel x, int n_samples);

}  // namespace ffp
