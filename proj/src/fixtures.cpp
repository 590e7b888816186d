#include "ffp/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace ffp {

namespace {

constexpr double kBright = 0.9;
constexpr double kDark = 0.1;

std::vector<Pixel> plus_shape(int cx, int cy) {
  return {{cx, cy}, {cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}};
}

Fixture from_mask(Field<std::uint8_t> truth, double bright, double dark) {
  ScalarField gray(truth.grid(), dark);
  std::size_t area = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      gray[i] = bright;
      ++area;
    }
  }
  Fixture f;
  f.image = ImageBuffer::from_gray(gray);
  f.truth = std::move(truth);
  f.n_th = area;
  return f;
}

}  // namespace

Fixture disk_fixture(int size, double radius) {
  const Grid2D grid(size, size);
  Field<std::uint8_t> truth(grid, 0);
  ScalarField gray(grid, 0.0);
  const int c = size / 2;
  constexpr int ss = 4;
  std::size_t area = 0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x - c, dy = y - c;
      truth(x, y) = dx * dx + dy * dy <= radius * radius ? 1 : 0;
      area += truth(x, y);
      // Pixel coverage from ss x ss subsamples.
      int inside = 0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          const double sx = dx - 0.5 + (i + 0.5) / ss, sy = dy - 0.5 + (j + 0.5) / ss;
          inside += sx * sx + sy * sy <= radius * radius;
        }
      }
      gray(x, y) = static_cast<double>(inside) / (ss * ss);
    }
  }
  Fixture f;
  f.image = ImageBuffer::from_gray(gray);
  f.truth = std::move(truth);
  f.n_th = area;
  f.seeds = {{1, plus_shape(c, c)}, {2, plus_shape(2, 2)}};
  return f;
}

Fixture bar_fixture(int width, int height, int bar_width) {
  const Grid2D grid(width, height);
  Field<std::uint8_t> truth(grid, 0);
  const int y0 = (height - bar_width) / 2;
  const int x0 = width / 16, x1 = width - 1 - width / 16;
  for (int y = y0; y < y0 + bar_width; ++y) {
    for (int x = x0; x <= x1; ++x) truth(x, y) = 1;
  }
  Fixture f = from_mask(std::move(truth), kBright, kDark);
  const int ym = y0 + bar_width / 2;
  f.seeds = {{1, {{x0 + 1, ym - 1}, {x0 + 1, ym}}}};
  return f;
}

Fixture spiral_fixture(int size, double half_width) {
  const Grid2D grid(size, size);
  Field<std::uint8_t> truth(grid, 0);
  const double c = 0.5 * (size - 1);
  const double r0 = 0.0625 * size;
  const double spacing = 0.16 * size;
  const double b = spacing / (2.0 * std::numbers::pi);
  const double theta_max = (0.44 * size - r0) / b;
  auto curve = [&](double t) {
    const double r = r0 + b * t;
    return Vec2{c + r * std::cos(t), c + r * std::sin(t)};
  };
  // Stamp discs along the centreline at sub-pixel arc-length steps.
  double t = 0.0;
  while (t <= theta_max) {
    const Vec2 p = curve(t);
    const int xa = static_cast<int>(std::floor(p.x - half_width)), xb = static_cast<int>(std::ceil(p.x + half_width));
    const int ya = static_cast<int>(std::floor(p.y - half_width)), yb = static_cast<int>(std::ceil(p.y + half_width));
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        if (!grid.contains({x, y})) continue;
        const double dx = x - p.x, dy = y - p.y;
        if (dx * dx + dy * dy <= half_width * half_width) truth(x, y) = 1;
      }
    }
    t += 0.25 / (r0 + b * t);
  }
  Fixture f = from_mask(std::move(truth), kBright, kDark);
  const Vec2 end = curve(theta_max);
  const int ex = static_cast<int>(std::lround(end.x)), ey = static_cast<int>(std::lround(end.y));
  f.seeds = {{1, {{ex, ey}}}};
  return f;
}

}  // namespace ffp
