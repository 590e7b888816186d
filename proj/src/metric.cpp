#include "ffp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ffp {

void CostParams::validate() const {
  if (!(alpha_f >= 0.0) || !(alpha_b >= 0.0)) throw ConfigError("alpha_f and alpha_b must be nonnegative");
  if (!(beta_s > 0.0)) throw ConfigError("beta_s must be positive");
  if (!(beta_d >= 0.0)) throw ConfigError("beta_d must be nonnegative");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (mu && !(*mu >= 0.0)) throw ConfigError("mu must be nonnegative");
}

RandersMetricField constant_metric(Grid2D grid, const Spd2& m, Vec2 omega, double c) {
  return {SpdTensorField(grid, m), VectorField2(grid, omega), ScalarField(grid, c), ScalarField(grid, 1.0),
          MetricMode::FB, std::nullopt};
}

RandersMetricField isotropic_metric(const ScalarField& potential) {
  return {SpdTensorField(potential.grid(), Spd2::identity()), VectorField2(potential.grid()), potential,
          ScalarField(potential.grid(), 1.0), MetricMode::FB, std::nullopt};
}

namespace {

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string("grid mismatch: ") + what);
}

ScalarField normalized(const ScalarField& rho) {
  const double m = max_abs(rho);
  ScalarField r(rho.grid(), 0.0);
  if (m > 0.0) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rho[i] / m;
  }
  return r;
}

}  // namespace

CostMaps cost_functions(const ScalarField& rho, double alpha_f, double alpha_b) {
  const ScalarField r = normalized(rho);
  CostMaps c{ScalarField(rho.grid()), ScalarField(rho.grid())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    c.psi_f[i] = std::exp(alpha_f * r[i]);
    c.psi_b[i] = std::exp(alpha_b * r[i]) * c.psi_f[i];
  }
  return c;
}

SpdTensorField build_tensor(const VectorField2& g, const ScalarField& psi_f, const ScalarField& psi_b) {
  require_same_grid(g.grid(), psi_f.grid(), "g/psi_f");
  require_same_grid(g.grid(), psi_b.grid(), "g/psi_b");
  Field<Spd2> m(g.grid());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double s = psi_f[i] + psi_b[i];
    m[i] = (0.25 * s * s) * outer(g[i]) + outer(perp(g[i]));
  }
  return SpdTensorField(std::move(m));
}

VectorField2 build_omega(const VectorField2& g, const ScalarField& psi_f, const ScalarField& psi_b) {
  require_same_grid(g.grid(), psi_f.grid(), "g/psi_f");
  require_same_grid(g.grid(), psi_b.grid(), "g/psi_b");
  VectorField2 w(g.grid());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (0.5 * (psi_b[i] - psi_f[i])) * g[i];
  return w;
}

SpdTensorField build_tubular_tensor(const SpdTensorField& m, const VectorField2& g, double mu) {
  if (!(mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  require_same_grid(m.grid(), g.grid(), "tensor/g");
  Field<Spd2> out(m.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m[i] + mu * outer(g[i]);
  return SpdTensorField(std::move(out));
}

double auto_mu(const ScalarField& psi_f) {
  const double m = max_abs(psi_f);
  return m * m;
}

ScalarField static_potential_fb(const ScalarField& rho, double beta_s) {
  if (!(beta_s > 0.0)) throw ConfigError("beta_s must be positive");
  ScalarField p = normalized(rho);
  for (auto& v : p) v = std::exp(beta_s * v);
  return p;
}

ScalarField static_potential_tube(const ScalarField& zeta, double beta_s) {
  if (!(beta_s > 0.0)) throw ConfigError("beta_s must be positive");
  const double zmax = max_abs(zeta);
  ScalarField p(zeta.grid());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(beta_s * (zmax - zeta[i]));
  return p;
}

RandersMetricField build_fb_metric(const ScalarField& rho, const VectorField2& g, const CostParams& params) {
  params.validate();
  CostMaps c = cost_functions(rho, params.alpha_f, params.alpha_b);
  RandersMetricField f{build_tensor(g, c.psi_f, c.psi_b), build_omega(g, c.psi_f, c.psi_b),
                       static_potential_fb(rho, params.beta_s), ScalarField(rho.grid(), 1.0), MetricMode::FB,
                       std::nullopt};
  f.sources = MetricSources{g, std::move(c.psi_f), std::move(c.psi_b), 0.0};
  return f;
}

RandersMetricField build_tube_metric(const ScalarField& rho, const ScalarField& zeta, const VectorField2& g,
                                     const CostParams& params) {
  params.validate();
  require_same_grid(rho.grid(), zeta.grid(), "rho/zeta");
  CostMaps c = cost_functions(rho, params.alpha_f, params.alpha_b);
  const double mu = params.mu.value_or(auto_mu(c.psi_f));
  RandersMetricField f{build_tubular_tensor(build_tensor(g, c.psi_f, c.psi_b), g, mu),
                       build_omega(g, c.psi_f, c.psi_b), static_potential_tube(zeta, params.beta_s),
                       ScalarField(rho.grid(), 1.0), MetricMode::Tube, std::nullopt};
  f.sources = MetricSources{g, std::move(c.psi_f), std::move(c.psi_b), mu};
  return f;
}

double eval_metric(const RandersMetricField& field, Pixel x, Vec2 u) {
  if (u.x == 0.0 && u.y == 0.0) throw ConfigError("metric evaluated on the zero vector");
  if (!field.grid().contains(x)) throw ConfigError("pixel outside grid");
  return field.eval(field.grid().index(x), u);
}

PositivityReport positivity_check(const RandersMetricField& field) {
  PositivityReport r;
  double max_cf = 0.0;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < field.grid().size(); ++i) {
    const double q = spd_norm(spd_inverse(field.tensor[i]), field.omega[i]);
    r.max_ratio = std::max(r.max_ratio, q);
    if (field.sources) {
      // Spectral form: ω is along g where M has eigenvalue ¼(psi_f+psi_b)² + mu.
      const double pf = field.sources->psi_f[i];
      const double pb = field.sources->psi_b[i];
      const double cf =
          std::abs(pb - pf) / std::sqrt((pf + pb) * (pf + pb) + 4.0 * field.sources->mu);
      max_cf = std::max(max_cf, cf);
      max_gap = std::max(max_gap, std::abs(cf - q));
    }
  }
  r.passed = r.max_ratio < 1.0;
  if (field.sources) {
    r.max_closed_form = max_cf;
    r.max_closed_form_gap = max_gap;
  }
  return r;
}

namespace {

struct AngularEval {
  double value, d1, d2;
};

// Randers cost along (cos t, sin t) with first and second angular derivatives.
AngularEval angular(const Spd2& m, Vec2 w, double t) {
  const Vec2 u{std::cos(t), std::sin(t)};
  const Vec2 du{-u.y, u.x};
  const double q = m.quad(u);
  const double sq = std::sqrt(q);
  const double uMdu = dot(u, m.apply(du));
  const double q1 = 2.0 * uMdu;
  const double q2 = 2.0 * (m.quad(du) - q);
  return {sq - dot(w, u), q1 / (2.0 * sq) - dot(w, du),
          q2 / (2.0 * sq) - q1 * q1 / (4.0 * q * sq) + dot(w, u)};
}

}  // namespace

double local_anisotropy(const RandersMetricField& field, std::size_t i) {
  const Spd2& m = field.tensor[i];
  const Vec2 w = field.omega[i];
  constexpr int n = 360;
  constexpr double step = std::numbers::pi / 180.0;
  double vmax = -1.0, vmin = std::numeric_limits<double>::infinity();
  double tmax = 0.0, tmin = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = k * step;
    const double v = angular(m, w, t).value;
    if (v > vmax) vmax = v, tmax = t;
    if (v < vmin) vmin = v, tmin = t;
  }
  const AngularEval emax = angular(m, w, tmax);
  if (emax.d2 < 0.0) vmax = std::max(vmax, angular(m, w, tmax - emax.d1 / emax.d2).value);
  const AngularEval emin = angular(m, w, tmin);
  if (emin.d2 > 0.0) vmin = std::min(vmin, angular(m, w, tmin - emin.d1 / emin.d2).value);
  return vmax / vmin;
}

double anisotropy_ratio(const RandersMetricField& field) {
  double k = 1.0;
  for (std::size_t i = 0; i < field.grid().size(); ++i) k = std::max(k, local_anisotropy(field, i));
  return k;
}

std::vector<Vec2> control_set(const RandersMetricField& field, Pixel x, int n_samples) {
  if (n_samples < 8) throw ConfigError("control set needs at least 8 samples");
  if (!field.grid().contains(x)) throw ConfigError("pixel outside grid");
  const std::size_t i = field.grid().index(x);
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n_samples));
  for (int j = 0; j < n_samples; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n_samples;
    const Vec2 u{std::cos(t), std::sin(t)};
    pts.push_back((1.0 / field.eval(i, u)) * u);
  }
  return pts;
}

std::vector<DirectionalCost> directional_costs(const RandersMetricField& field, Pixel x, int n_samples) {
  if (!field.sources) throw ConfigError("directional costs need a metric built from an edge field");
  if (n_samples < 1) throw ConfigError("need at least one direction sample");
  if (!field.grid().contains(x)) throw ConfigError("pixel outside grid");
  const std::size_t i = field.grid().index(x);
  const Vec2 g = field.sources->g[i];
  std::vector<DirectionalCost> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int j = 1; j <= n_samples; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n_samples;
    const double c = std::cos(t), s = std::sin(t);
    const Vec2 u{c * g.x - s * g.y, s * g.x + c * g.y};
    const double cost = field.eval_unscaled(i, u);
    out.push_back({t, cost, (1.0 / cost) * u});
  }
  return out;
}

}  // namespace ffp
