#include "doctest.h"

#include <cmath>
#include <queue>
#include <random>

#include "ffp/error.hpp"
#include "ffp/fixtures.hpp"
#include "ffp/segmentation.hpp"

using namespace ffp;

namespace {

CostParams params(double af, double ab) { return {af, ab, 10.0, 10.0, 1.0, 0.1, {}}; }

Field<std::uint8_t> in_mask(const SegmentationResult& r) { return label_mask(r.label_map, 1); }

double inside_fraction(const Field<std::uint8_t>& mask, const Field<std::uint8_t>& truth) {
  std::size_t in = 0, all = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++all;
    in += truth[i] != 0;
  }
  return all ? double(in) / double(all) : 0.0;
}

bool connected(const Field<std::uint8_t>& mask) {
  const Grid2D& g = mask.grid();
  std::size_t start = g.size(), total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask[i]) {
      ++total;
      if (start == g.size()) start = i;
    }
  }
  if (total == 0) return true;
  Field<std::uint8_t> seen(g, 0);
  std::queue<std::size_t> q;
  q.push(start);
  seen[start] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const Pixel p = g.pixel(q.front());
    q.pop();
    ++reached;
    for (const Offset o : StencilFan::ring) {
      const Pixel n{p.x + o.dx, p.y + o.dy};
      if (g.contains(n) && mask.at(n) && !seen.at(n)) {
        seen.at(n) = 1;
        q.push(g.index(n));
      }
    }
  }
  return reached == total;
}

}  // namespace

TEST_CASE("contours of simple label maps") {
  const Grid2D g(20, 20);
  CHECK(extract_contours(Field<int>(g, 3)).empty());

  Field<int> square(g, 1);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) square(x, y) = 2;
  }
  const auto cs = extract_contours(square);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].closed);
  CHECK(polyline_perimeter(cs[0]) == doctest::Approx(40.0).epsilon(0.10));
  for (const Vec2 v : cs[0].points) {
    const double dx = std::max({5.0 - v.x, v.x - 14.0, 0.0}), dy = std::max({5.0 - v.y, v.y - 14.0, 0.0});
    CHECK(std::hypot(dx, dy) <= 1.0);
  }

  Field<int> two(g, 1);
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) two(x, y) = 2;
  }
  for (int y = 12; y < 18; ++y) {
    for (int x = 10; x < 16; ++x) two(x, y) = 2;
  }
  CHECK(extract_contours(two).size() >= 2);

  // a region touching the border gives an open chain
  Field<int> half(g, 1);
  for (int y = 0; y < 20; ++y) {
    for (int x = 10; x < 20; ++x) half(x, y) = 2;
  }
  const auto hc = extract_contours(half);
  REQUIRE(hc.size() == 1);
  CHECK_FALSE(hc[0].closed);
  CHECK(hc[0].points.size() == 20);

  // three labels meeting at a point are joined at the cell centre
  Field<int> tri(g, 1);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) tri(x, y) = x < 10 ? 1 : (y < 10 ? 2 : 3);
  }
  std::size_t vertices = 0;
  for (const auto& c : extract_contours(tri)) vertices += c.points.size();
  CHECK(vertices >= 30);
}

TEST_CASE("iso contours") {
  const Grid2D g(41, 41);
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Pixel p = g.pixel(i);
    f[i] = std::hypot(p.x - 20.0, p.y - 20.0);
  }
  const auto cs = iso_contours(f, 12.0);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].closed);
  CHECK(polyline_perimeter(cs[0]) == doctest::Approx(2 * 3.141592653589793 * 12.0).epsilon(0.02));
  for (const Vec2 v : cs[0].points) CHECK(std::hypot(v.x - 20.0, v.y - 20.0) == doctest::Approx(12.0).epsilon(0.02));
  CHECK(iso_contours(f, -1.0).empty());
}

TEST_CASE("region iou") {
  const Grid2D g(10, 10);
  Field<std::uint8_t> a(g, 0), b(g, 0);
  CHECK(region_iou(a, b) == 1.0);
  for (int x = 0; x < 4; ++x) a(x, 0) = 1;
  CHECK(region_iou(a, a) == 1.0);
  for (int x = 5; x < 9; ++x) b(x, 0) = 1;
  CHECK(region_iou(a, b) == 0.0);
  Field<std::uint8_t> c(g, 0);
  for (int x = 2; x < 6; ++x) c(x, 0) = 1;
  CHECK(region_iou(a, c) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(region_iou(a, Field<std::uint8_t>(Grid2D(5, 5), 0)), ConfigError);
}

TEST_CASE("foreground/background on the disk fixture") {
  const Fixture fx = disk_fixture();
  const SegmentationResult ra = segment_fb(fx.image, fx.seed_sets(), params(2, 3));
  const SegmentationResult ri = segment_fb(fx.image, fx.seed_sets(), params(0, 0));
  const double iou_a = region_iou(in_mask(ra), fx.truth);
  const double iou_i = region_iou(in_mask(ri), fx.truth);
  CHECK(iou_a >= 0.9);
  CHECK(iou_a >= iou_i);
  CHECK(ra.stats.accepted_count == fx.image.grid().size());
  CHECK(ra.stats.leak_order_violations == 0);
  CHECK(ra.stats.edge_pixels > 0);
  CHECK(ra.stats.kappa > 1.0);
  CHECK_FALSE(ra.contours.empty());
  for (std::size_t i = 0; i < ra.label_map.size(); ++i) {
    CHECK((ra.label_map[i] == 1 || ra.label_map[i] == 2));
    CHECK(std::isfinite(ra.distance_map[i]));
  }
  for (const auto& s : fx.seeds) {
    for (const Pixel p : s.points) CHECK(ra.label_map.at(p) == s.label);
  }
  // every contour vertex lies within one pixel of a label change
  for (const auto& c : ra.contours) {
    for (const Vec2 v : c.points) {
      const int x0 = static_cast<int>(std::floor(v.x)), y0 = static_cast<int>(std::floor(v.y));
      bool change = false;
      for (int y = y0 - 1; y <= y0 + 2; ++y) {
        for (int x = x0 - 1; x <= x0 + 2; ++x) {
          if (x < 0 || y < 0 || x + 1 >= 128 || y >= 128) continue;
          change |= ra.label_map(x, y) != ra.label_map(x + 1, y);
          if (y + 1 < 128) change |= ra.label_map(x, y) != ra.label_map(x, y + 1);
        }
      }
      CHECK(change);
    }
  }
}

TEST_CASE("feature map and colour space options") {
  const Fixture fx = disk_fixture(64, 20);
  SegmentOptions opts;
  opts.feature_map = fx.image.gray();
  const SegmentationResult a = segment_fb(fx.image, fx.seed_sets(), params(2, 3), opts);
  const SegmentationResult b = segment_fb(fx.image, fx.seed_sets(), params(2, 3));
  CHECK(region_iou(in_mask(a), in_mask(b)) >= 0.95);
  opts.feature_map = ScalarField(Grid2D(10, 10), 0.0);
  CHECK_THROWS_AS(segment_fb(fx.image, fx.seed_sets(), params(2, 3), opts), DataError);

  SegmentOptions lab;
  lab.colorspace = ColorSpace::Lab;
  const SegmentationResult c = segment_fb(fx.image, fx.seed_sets(), params(2, 3), lab);
  CHECK(region_iou(in_mask(c), fx.truth) >= 0.8);
}

TEST_CASE("seeds covering the whole grid") {
  const Grid2D g(16, 12);
  ImageBuffer img(g, 1);
  SeedSet left{1, {}}, right{2, {}};
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) (x < 7 ? left : right).points.push_back({x, y});
  }
  const SegmentationResult r = segment_fb(img, SeedSets({left, right}, g), params(2, 3));
  Field<int> expected(g, 0);
  for (const auto& s : {left, right}) {
    for (const Pixel p : s.points) expected.at(p) = s.label;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(r.label_map[i] == expected[i]);
    CHECK(r.distance_map[i] == 0.0);
  }
  // the only boundary is the one between the seed sets
  const auto ref = extract_contours(expected);
  REQUIRE(r.contours.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(r.contours[k].points == ref[k].points);
}

TEST_CASE("foreground/background errors") {
  const Fixture fx = disk_fixture(32, 10);
  CHECK_THROWS_AS(segment_fb(fx.image, SeedSets({fx.seeds[0]}, fx.image.grid()), params(2, 3)), DataError);
  const SeedSets big({{1, {{40, 1}}}, {2, {{1, 1}}}}, Grid2D(64, 64));
  CHECK_THROWS_AS(segment_fb(fx.image, big, params(2, 3)), DataError);
}

TEST_CASE("tubular segmentation of the bar") {
  const Fixture fx = bar_fixture();
  const SegmentationResult r = segment_tube(fx.image, fx.seed_sets(), params(2, 3), fx.n_th);
  CHECK(r.stats.accepted_count == fx.n_th);
  const Field<std::uint8_t> m = in_mask(r);
  std::size_t count = 0;
  for (const auto v : m) count += v;
  CHECK(count == fx.n_th);
  CHECK(inside_fraction(m, fx.truth) >= 0.9);
  CHECK(connected(m));
  CHECK_FALSE(r.contours.empty());
  CHECK(r.stats.distance_threshold > 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) CHECK(r.distance_map[i] <= r.stats.distance_threshold);
  }
}

TEST_CASE("tubular segmentation of the spiral") {
  const Fixture fx = spiral_fixture();
  const SegmentationResult ra = segment_tube(fx.image, fx.seed_sets(), params(2, 3), fx.n_th);
  const SegmentationResult ri = segment_tube(fx.image, fx.seed_sets(), params(0, 0), fx.n_th);
  const double fa = inside_fraction(in_mask(ra), fx.truth);
  const double fi = inside_fraction(in_mask(ri), fx.truth);
  CHECK(fa >= fi);
  CHECK(connected(in_mask(ra)));
  CHECK(connected(in_mask(ri)));
}

TEST_CASE("noisy tube fixtures keep the Randers ordering") {
  for (const Fixture& fx : {bar_fixture(), spiral_fixture()}) {
    std::mt19937 rng(1);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<double> samples;
    for (std::size_t i = 0; i < fx.image.grid().size(); ++i) samples.push_back(fx.image.sample(i, 0) + noise(rng));
    const ImageBuffer img(fx.image.grid(), 1, samples);
    const double fa = inside_fraction(in_mask(segment_tube(img, fx.seed_sets(), params(2, 3), fx.n_th)), fx.truth);
    const double fi = inside_fraction(in_mask(segment_tube(img, fx.seed_sets(), params(0, 0), fx.n_th)), fx.truth);
    CHECK(fa > fi);
  }
}

TEST_CASE("tubular truncation edge cases") {
  const Fixture fx = bar_fixture(40, 20, 4);
  const SeedSets seeds = fx.seed_sets();
  const SegmentationResult only = segment_tube(fx.image, seeds, params(2, 3), seeds.point_count());
  Field<std::uint8_t> expected(fx.image.grid(), 0);
  for (const Pixel p : fx.seeds[0].points) expected.at(p) = 1;
  CHECK(region_iou(in_mask(only), expected) == 1.0);

  CHECK_THROWS_AS(segment_tube(fx.image, seeds, params(2, 3), 0), ConfigError);
  const SegmentationResult all = segment_tube(fx.image, seeds, params(2, 3), 100000);
  CHECK(all.stats.accepted_count == fx.image.grid().size());
  REQUIRE(all.stats.warnings.size() >= 1);
  CHECK(all.stats.warnings[0].find("clamped") != std::string::npos);

  const SeedSets two({{1, {{1, 1}}}, {2, {{5, 5}}}}, fx.image.grid());
  CHECK_THROWS_AS(segment_tube(fx.image, two, params(2, 3), 10), DataError);

  SegmentOptions opt;
  opt.t_h = 1e-6;
  const SegmentationResult th = segment_tube(fx.image, seeds, params(2, 3), 60, opt);
  CHECK(th.stats.distance_threshold == 1e-6);
}

TEST_CASE("progress callback reports the accepted count") {
  const Fixture fx = disk_fixture(32, 10);
  std::size_t last = 0, total = 0, calls = 0;
  SegmentOptions opts;
  opts.progress = [&](std::size_t a, std::size_t t) {
    CHECK(a >= last);
    last = a;
    total = t;
    ++calls;
  };
  segment_fb(fx.image, fx.seed_sets(), params(2, 3), opts);
  CHECK(calls > 0);
  CHECK(last == total);
  CHECK(total == 32u * 32u);
}

TEST_CASE("normalized gray") {
  const Grid2D g(2, 2);
  const ImageBuffer img(g, 3, {0.2, 0.2, 0.2, 0.6, 0.6, 0.6, 0.4, 0.4, 0.4, 0.2, 0.2, 0.2});
  const ScalarField z = normalized_gray(img);
  CHECK(z[0] == doctest::Approx(0.0));
  CHECK(z[1] == doctest::Approx(1.0));
  CHECK(z[2] == doctest::Approx(0.5));
  const ScalarField flat = normalized_gray(ImageBuffer(g, 1, {0.3, 0.3, 0.3, 0.3}));
  for (const double v : flat) CHECK(v == 0.0);
}
