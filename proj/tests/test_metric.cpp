#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ffp/error.hpp"
#include "ffp/metric.hpp"
#include "test_support.hpp"

using namespace ffp;
using testing::unit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Const {
  Grid2D grid{5, 5};
  VectorField2 g;
  ScalarField pf, pb;

  Const(double psi_f, double psi_b, double angle)
      : g(grid, unit(angle)), pf(grid, psi_f), pb(grid, psi_b) {}

  RandersMetricField metric(double mu = 0.0) const {
    SpdTensorField m = build_tensor(g, pf, pb);
    if (mu > 0.0) m = build_tubular_tensor(m, g, mu);
    RandersMetricField f{m, build_omega(g, pf, pb), ScalarField(grid, 1.0), ScalarField(grid, 1.0), MetricMode::FB,
                         std::nullopt};
    f.sources = MetricSources{g, pf, pb, mu};
    return f;
  }
};

}  // namespace

TEST_CASE("cost_functions examples") {
  const Grid2D g(3, 3);
  ScalarField rho(g, 0.0);
  rho(1, 1) = 4.0;
  rho(2, 2) = 1.0;
  const CostMaps c = cost_functions(rho, 2.0, 3.0);
  CHECK(c.psi_f(0, 0) == 1.0);
  CHECK(c.psi_b(0, 0) == 1.0);
  CHECK(c.psi_f(1, 1) == doctest::Approx(7.3890560989).epsilon(1e-10));
  CHECK(c.psi_b(1, 1) == doctest::Approx(148.4131591026).epsilon(1e-10));
  const CostMaps s = cost_functions(rho, 2.0, 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(s.psi_b[i] == s.psi_f[i]);
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK((c.psi_f[i] >= 1.0 && c.psi_b[i] >= c.psi_f[i]));

  const CostMaps z = cost_functions(ScalarField(g, 0.0), 2.0, 3.0);
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(z.psi_b[i] == 1.0);
}

TEST_CASE("build_tensor examples") {
  const Const one(1, 1, 0.3);
  const SpdTensorField id = build_tensor(one.g, one.pf, one.pb);
  CHECK(id[0].m11 == doctest::Approx(1.0));
  CHECK(std::abs(id[0].m12) < 1e-15);
  CHECK(id[0].m22 == doctest::Approx(1.0));

  const Const fig4(3, 8, kPi / 4);
  const SpdTensorField m = build_tensor(fig4.g, fig4.pf, fig4.pb);
  CHECK(m[0].m11 == doctest::Approx(15.625).epsilon(1e-12));
  CHECK(m[0].m12 == doctest::Approx(14.625).epsilon(1e-12));
  CHECK(m[0].m22 == doctest::Approx(15.625).epsilon(1e-12));
  const Vec2 g = fig4.g[0];
  const Vec2 mg = m[0].apply(g);
  CHECK(std::abs(mg.x - 30.25 * g.x) < 1e-10);
  CHECK(std::abs(mg.y - 30.25 * g.y) < 1e-10);
  const Vec2 mp = m[0].apply(perp(g));
  CHECK(std::abs(mp.x - perp(g).x) < 1e-12);
  CHECK(std::abs(mp.y - perp(g).y) < 1e-12);
}

TEST_CASE("build_omega and positivity examples") {
  const Const sym(4, 4, 1.0);
  const VectorField2 w0 = build_omega(sym.g, sym.pf, sym.pb);
  CHECK(w0[0].x == 0.0);
  CHECK(w0[0].y == 0.0);
  CHECK(positivity_check(sym.metric()).max_ratio == 0.0);

  const Const fig4(3, 8, kPi / 4);
  const VectorField2 w = build_omega(fig4.g, fig4.pf, fig4.pb);
  CHECK(w[0].x == doctest::Approx(1.76777).epsilon(1e-5));
  CHECK(w[0].y == doctest::Approx(1.76777).epsilon(1e-5));
  const PositivityReport r = positivity_check(fig4.metric());
  CHECK(r.passed);
  CHECK(r.max_ratio == doctest::Approx(5.0 / 11.0).epsilon(1e-12));
  REQUIRE(r.max_closed_form);
  CHECK(*r.max_closed_form_gap < 1e-9);

  std::mt19937 rng(21);
  std::uniform_real_distribution<double> a(0.0, 6.0);
  for (int k = 0; k < 20; ++k) {
    const Grid2D g(12, 12);
    const ScalarField rho = testing::random_field(g, rng);
    const CostParams p{a(rng), a(rng), 10.0, 10.0, 1.0, 0.1, std::nullopt};
    const RandersMetricField f = build_fb_metric(rho, testing::smooth_unit_field(g, rng), p);
    const PositivityReport pr = positivity_check(f);
    CHECK(pr.passed);
    CHECK(*pr.max_closed_form_gap < 1e-9);
  }
}

TEST_CASE("build_tubular_tensor examples") {
  const Const one(1, 1, 0.0);
  const SpdTensorField m = build_tensor(one.g, one.pf, one.pb);
  const SpdTensorField same = build_tubular_tensor(m, one.g, 0.0);
  CHECK(same[0] == m[0]);
  const SpdTensorField t = build_tubular_tensor(m, one.g, 4.0);
  CHECK(t[0].m11 == doctest::Approx(5.0));
  CHECK(t[0].m12 == doctest::Approx(0.0));
  CHECK(t[0].m22 == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_tubular_tensor(m, one.g, -1.0), ConfigError);

  std::mt19937 rng(4);
  const Grid2D g(16, 16);
  const VectorField2 gf = testing::smooth_unit_field(g, rng);
  const CostMaps c = cost_functions(testing::random_field(g, rng), 2.0, 3.0);
  const SpdTensorField mm = build_tensor(gf, c.psi_f, c.psi_b);
  const SpdTensorField mt = build_tubular_tensor(mm, gf, auto_mu(c.psi_f));
  const VectorField2 w = build_omega(gf, c.psi_f, c.psi_b);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double before = spd_norm(spd_inverse(mm[i]), w[i]);
    const double after = spd_norm(spd_inverse(mt[i]), w[i]);
    CHECK(after <= before + 1e-15);
    CHECK(before < 1.0);
  }
  CHECK(auto_mu(c.psi_f) == doctest::Approx(std::exp(4.0)));
}

TEST_CASE("eval_metric examples") {
  const Const fig4(3, 8, kPi / 4);
  const RandersMetricField f = fig4.metric();
  const Vec2 g = fig4.g[0];
  CHECK(eval_metric(f, {2, 2}, g) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eval_metric(f, {2, 2}, -g) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(eval_metric(f, {2, 2}, perp(g)) == doctest::Approx(1.0).epsilon(1e-12));
  const Vec2 u{0.3, -1.7};
  CHECK(eval_metric(f, {1, 3}, 2.0 * u) == 2.0 * eval_metric(f, {1, 3}, u));
  CHECK_THROWS_AS(eval_metric(f, {1, 1}, {0, 0}), ConfigError);

  std::mt19937 rng(8);
  const Grid2D gr(10, 10);
  const ScalarField pot = testing::random_field(gr, rng, 1.0, 5.0);
  const RandersMetricField iso = isotropic_metric(pot);
  for (int k = 0; k < 16; ++k) {
    const Vec2 d = unit(k * 0.4);
    CHECK(eval_metric(iso, {3, 4}, d) == doctest::Approx(pot(3, 4)).epsilon(1e-14));
  }
}

TEST_CASE("construction identities and leak ordering on built metrics") {
  std::mt19937 rng(13);
  const Grid2D g(20, 20);
  for (const auto& [af, ab] : {std::pair{0.0, 0.0}, {2.0, 0.0}, {2.0, 3.0}, {2.0, 1.0}}) {
    const ScalarField rho = testing::random_field(g, rng);
    const CostParams p{af, ab, 10.0, 10.0, 1.0, 0.1, std::nullopt};
    const RandersMetricField f = build_fb_metric(rho, testing::smooth_unit_field(g, rng), p);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec2 gv = f.sources->g[i];
      const double pf = f.sources->psi_f[i], pb = f.sources->psi_b[i];
      CHECK(std::abs(f.eval_unscaled(i, gv) - pf) < 1e-9);
      CHECK(std::abs(f.eval_unscaled(i, -gv) - pb) < 1e-9);
      CHECK(std::abs(f.eval_unscaled(i, perp(gv)) - 1.0) < 1e-9);
      if (pb > pf && pf > 1.0) {
        CHECK(f.eval_unscaled(i, perp(gv)) < f.eval_unscaled(i, gv));
        CHECK(f.eval_unscaled(i, gv) < f.eval_unscaled(i, -gv));
      }
    }
  }
}

TEST_CASE("static potentials") {
  const Grid2D g(3, 2);
  ScalarField rho(g, 0.0);
  rho(2, 1) = 0.5;
  const ScalarField fb = static_potential_fb(rho, 10.0);
  CHECK(fb(0, 0) == 1.0);
  CHECK(fb(2, 1) == doctest::Approx(std::exp(10.0)));
  ScalarField zeta(g, 0.0);
  zeta(1, 0) = 0.8;
  const ScalarField tp = static_potential_tube(zeta, 10.0);
  CHECK(tp(1, 0) == 1.0);
  CHECK(tp(0, 0) == doctest::Approx(std::exp(8.0)));
  CHECK_THROWS_AS(static_potential_fb(rho, 0.0), ConfigError);
}

TEST_CASE("anisotropy ratio") {
  std::mt19937 rng(2);
  const Grid2D g(8, 8);
  const RandersMetricField iso =
      build_fb_metric(testing::random_field(g, rng), testing::smooth_unit_field(g, rng), {0, 0, 10, 10, 1, 0.1, {}});
  CHECK(std::abs(anisotropy_ratio(iso) - 1.0) < 1e-9);

  const Const fig4(3, 8, kPi / 4);
  RandersMetricField f = fig4.metric();
  const double k = anisotropy_ratio(f);
  double vmax = 0.0, vmin = 1e300;
  for (int j = 0; j < 100000; ++j) {
    const double v = f.eval_unscaled(0, unit(2.0 * kPi * j / 100000.0));
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  CHECK(k == doctest::Approx(vmax / vmin).epsilon(1e-4));
  for (auto& c : f.static_potential) c *= 3.7;
  CHECK(anisotropy_ratio(f) == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("control sets") {
  const Const iso(1, 1, 0.0);
  for (const Vec2 b : control_set(iso.metric(), {2, 2}, 64)) CHECK(std::abs(norm(b) - 1.0) < 1e-12);

  for (const double pb : {5.0, 7.0, 10.0, 15.0}) {
    const Const c(5, pb, kPi / 4);
    const RandersMetricField f = c.metric();
    const int n = 72;
    const auto pts = control_set(f, {2, 2}, n);
    REQUIRE(pts.size() == std::size_t(n));
    Vec2 centroid{0, 0};
    for (const Vec2 b : pts) {
      CHECK(std::abs(f.eval(0, b) - 1.0) < 1e-9);
      centroid = centroid + (1.0 / n) * b;
    }
    if (pb == 5.0) {
      for (int j = 0; j < n / 2; ++j) {
        CHECK(norm(pts[std::size_t(j)] + pts[std::size_t(j + n / 2)]) < 1e-9);
      }
    } else {
      // origin is inside the ball, which reaches further along g (cost psi_f) than along -g
      CHECK(dot(centroid, c.g[0]) > 1e-3);
    }
  }
  CHECK_THROWS_AS(control_set(iso.metric(), {2, 2}, 7), ConfigError);
}

TEST_CASE("directional costs") {
  const Const c(3, 8, 0.4);
  const auto d = directional_costs(c.metric(), {1, 1}, 72);
  REQUIRE(d.size() == 72);
  CHECK(d[71].angle == doctest::Approx(2 * kPi));
  CHECK(d[71].cost == doctest::Approx(3.0));
  CHECK(d[35].cost == doctest::Approx(8.0));
  CHECK(d[17].cost == doctest::Approx(1.0));
  for (const auto& e : d) CHECK(e.cost > 0.0);
}

TEST_CASE("cost params validation") {
  CostParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha_f = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.beta_s = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.mu = -0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
