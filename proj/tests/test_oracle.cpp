#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ffp/fmm.hpp"
#include "ffp/oracle.hpp"
#include "test_support.hpp"

using namespace ffp;
using testing::unit;

namespace {

constexpr double kPi = std::numbers::pi;

RandersMetricField fig4_metric(Grid2D g) {
  const VectorField2 gv(g, unit(kPi / 4));
  const ScalarField pf(g, 3.0), pb(g, 8.0);
  return {build_tensor(gv, pf, pb), build_omega(gv, pf, pb), ScalarField(g, 1.0), ScalarField(g, 1.0),
          MetricMode::FB, std::nullopt};
}

}  // namespace

TEST_CASE("neighbourhoods are symmetric") {
  for (const auto& nb : {oracle::GraphNeighborhood::ring8(), oracle::GraphNeighborhood::ring16()}) {
    for (const Offset o : nb.offsets) {
      bool found = false;
      for (const Offset p : nb.offsets) found |= p.dx == -o.dx && p.dy == -o.dy;
      CHECK(found);
    }
  }
  CHECK(oracle::GraphNeighborhood::ring8().offsets.size() == 8);
  CHECK(oracle::GraphNeighborhood::ring16().offsets.size() == 16);
}

TEST_CASE("dijkstra examples") {
  const Grid2D g(12, 12);
  const RandersMetricField iso = isotropic_metric(ScalarField(g, 1.0));
  const SeedSets origin({{1, {{0, 0}}}}, g);
  const ScalarField d16 = oracle::dijkstra_distance(iso, origin, oracle::GraphNeighborhood::ring16());
  CHECK(d16(5, 0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(d16(0, 0) == 0.0);

  const Grid2D big(41, 41);
  const RandersMetricField f = fig4_metric(big);
  const SeedSets centre({{1, {{20, 20}}}}, big);
  const ScalarField a16 = oracle::dijkstra_distance(f, centre, oracle::GraphNeighborhood::ring16());
  const ScalarField a8 = oracle::dijkstra_distance(f, centre, oracle::GraphNeighborhood::ring8());
  for (int y = 0; y < 41; ++y) {
    for (int x = 0; x < 41; ++x) {
      const double exact = oracle::analytic_constant_distance(f.tensor[0], f.omega[0], 1.0, {20, 20},
                                                              {double(x), double(y)});
      CHECK(a16(x, y) >= exact - 1e-9);
      CHECK(a16(x, y) <= a8(x, y) + 1e-12);
    }
  }
}

TEST_CASE("dijkstra agrees with repaired fast marching away from the source") {
  const Grid2D g(50, 50);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937 rng(seed);
    const ScalarField rho = testing::smooth_field(g, rng, 0, 1);
    const VectorField2 gv = testing::smooth_unit_field(g, rng);
    const RandersMetricField f = build_fb_metric(rho, gv, {0.3, 0.4, 1, 0, 1, 0.1, {}});
    REQUIRE(anisotropy_ratio(f) <= 4.0);
    const SeedSets seeds({{1, {{25, 25}}}}, g);
    FrontState st = run_fast_marching(f, seeds);
    fixed_point_repair(st, f);
    CHECK(hopf_lax_residual(st, f) <= 1e-9);
    const ScalarField d = oracle::dijkstra_distance(f, seeds, oracle::GraphNeighborhood::ring16());
    double gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Pixel p = g.pixel(i);
      if (std::hypot(p.x - 25.0, p.y - 25.0) > 5.0) gap = std::max(gap, std::abs(d[i] - st.distance[i]) / d[i]);
    }
    CHECK(gap <= 0.10);
  }
}

TEST_CASE("analytic constant distance") {
  const Grid2D g(2, 2);
  const RandersMetricField f = fig4_metric(g);
  const Spd2 m = f.tensor[0];
  const Vec2 w = f.omega[0];
  CHECK(oracle::analytic_constant_distance(m, w, 1.0, {3, 4}, {3, 4}) == 0.0);
  const Vec2 d = unit(kPi / 4);
  CHECK(oracle::analytic_constant_distance(m, w, 1.0, {0, 0}, d) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(oracle::analytic_constant_distance(m, w, 1.0, {0, 0}, -d) == doctest::Approx(8.0).epsilon(1e-12));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> p(-50, 50);
  for (int t = 0; t < 10000; ++t) {
    const Vec2 a{p(rng), p(rng)}, b{p(rng), p(rng)}, c{p(rng), p(rng)};
    const double ac = oracle::analytic_constant_distance(m, w, 1.0, a, c);
    const double ab = oracle::analytic_constant_distance(m, w, 1.0, a, b);
    const double bc = oracle::analytic_constant_distance(m, w, 1.0, b, c);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab > 0.0);
  }
}

TEST_CASE("polyline length") {
  const Grid2D g(50, 50);
  const RandersMetricField f = fig4_metric(g);
  const Vec2 a{3, 7}, b{40, 22};
  const double direct = oracle::polyline_length(f, {a, b});
  CHECK(direct == doctest::Approx(oracle::analytic_constant_distance(f.tensor[0], f.omega[0], 1.0, a, b))
                      .epsilon(1e-12));
  std::vector<Vec2> fine;
  for (int k = 0; k <= 37; ++k) fine.push_back(a + (k / 37.0) * (b - a));
  CHECK(oracle::polyline_length(f, fine) == doctest::Approx(direct).epsilon(1e-12));

  // reversal changes the length unless ω is orthogonal to every segment
  const double back = oracle::polyline_length(f, {b, a});
  CHECK(std::abs(back - direct) > 1.0);
  const Vec2 across = a + 10.0 * perp(unit(kPi / 4));
  CHECK(oracle::polyline_length(f, {a, across}) ==
        doctest::Approx(oracle::polyline_length(f, {across, a})).epsilon(1e-12));

  const RandersMetricField iso = isotropic_metric(ScalarField(g, 1.0));
  std::vector<Vec2> circle;
  const double r = 20.0;
  for (int k = 0; k <= 3600; ++k) circle.push_back(Vec2{25, 25} + r * unit(2 * kPi * k / 3600.0));
  CHECK(oracle::polyline_length(iso, circle) == doctest::Approx(2 * kPi * r).epsilon(1e-4));
}

TEST_CASE("eikonal residual") {
  const Grid2D g(201, 201);
  const RandersMetricField f = fig4_metric(g);
  ScalarField exact(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Pixel p = g.pixel(i);
    exact[i] = oracle::analytic_constant_distance(f.tensor[0], f.omega[0], 1.0, {100, 100},
                                                  {double(p.x), double(p.y)});
  }
  const oracle::ResidualReport rep = oracle::eikonal_residual(exact, f);
  CHECK(rep.evaluated > 0);
  CHECK(rep.median_abs <= 0.05);

  // Euclidean distance, 5-pixel mask around the source
  const RandersMetricField iso = isotropic_metric(ScalarField(g, 1.0));
  ScalarField eu(g);
  Field<std::uint8_t> mask(g, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Pixel p = g.pixel(i);
    eu[i] = std::hypot(p.x - 100.0, p.y - 100.0);
    mask[i] = std::abs(p.x - 100) <= 5 && std::abs(p.y - 100) <= 5;
  }
  const oracle::ResidualReport er = oracle::eikonal_residual(eu, iso, &mask);
  CHECK(er.median_abs <= 0.02);
  CHECK(std::isnan(er.residual(100, 100)));

  // homogeneity: scale U and the potential together
  RandersMetricField scaled = f;
  for (auto& c : scaled.static_potential) c *= 3.0;
  ScalarField u3 = exact;
  for (auto& v : u3) v *= 3.0;
  const oracle::ResidualReport r3 = oracle::eikonal_residual(u3, scaled);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::isnan(rep.residual[i])) {
      CHECK(std::isnan(r3.residual[i]));
    } else {
      CHECK(std::abs(r3.residual[i] - rep.residual[i]) <= 1e-12);
    }
  }
}

TEST_CASE("iterated sweeping reproduces the one-pass distance on isotropic metrics") {
  const Grid2D g(30, 20);
  const RandersMetricField iso = isotropic_metric(ScalarField(g, 1.0));
  const SeedSets seeds({{1, {{4, 4}}}, {2, {{25, 15}}}}, g);
  const oracle::SweepResult sw = oracle::iterated_hopf_lax(iso, seeds);
  REQUIRE(sw.converged);
  FrontState st = run_fast_marching(iso, seeds);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(sw.distance[i] - st.distance[i]) <= 1e-9);
}

TEST_CASE("curves never beat the repaired distance") {
  const Grid2D g(60, 60);
  std::mt19937 rng(12);
  const RandersMetricField f = build_fb_metric(testing::smooth_field(g, rng, 0, 1),
                                               testing::smooth_unit_field(g, rng), {1, 2, 1, 0, 1, 0.1, {}});
  const SeedSets seeds({{1, {{30, 30}}}}, g);
  FrontState st = run_fast_marching(f, seeds);
  fixed_point_repair(st, f);
  std::uniform_real_distribution<double> pos(2, 57);
  for (int t = 0; t < 200; ++t) {
    const Vec2 mid{pos(rng), pos(rng)};
    const Pixel end{static_cast<int>(pos(rng)), static_cast<int>(pos(rng))};
    std::vector<Vec2> path;
    for (int k = 0; k <= 40; ++k) path.push_back(Vec2{30, 30} + (k / 40.0) * (mid - Vec2{30, 30}));
    const Vec2 e{double(end.x), double(end.y)};
    for (int k = 1; k <= 40; ++k) path.push_back(mid + (k / 40.0) * (e - mid));
    // metrication allowance of the 8-neighbour scheme
    CHECK(oracle::polyline_length(f, path) >= 0.9 * st.distance.at(end));
  }
}
