#include "ffp/grid.hpp"

#include <algorithm>
#include <sstream>

namespace ffp {

Spd2 spd_inverse(const Spd2& m) {
  const double d = m.det();
  if (!(d > 1e-300)) {
    std::ostringstream os;
    os << "degenerate tensor (det = " << d << ")";
    throw NumericalError(os.str());
  }
  return {m.m22 / d, -m.m12 / d, m.m11 / d};
}

std::pair<double, double> spd_eigenvalues(const Spd2& m) {
  const double half_trace = 0.5 * (m.m11 + m.m22);
  const double half_diff = 0.5 * (m.m11 - m.m22);
  const double r = std::hypot(half_diff, m.m12);
  return {half_trace - r, half_trace + r};
}

Grid2D::Grid2D(int width, int height) : width_(width), height_(height) {
  if (width < 2 || height < 2) {
    throw ConfigError("grid must be at least 2x2, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

SpdTensorField::SpdTensorField(Field<Spd2> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!values_[i].positive_definite()) {
      const Pixel p = values_.grid().pixel(i);
      throw NumericalError("tensor at (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                           ") is not positive definite");
    }
  }
}

SpdTensorField::SpdTensorField(Grid2D grid, Spd2 constant) : SpdTensorField(Field<Spd2>(grid, constant)) {}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

VectorField2 central_gradient(const ScalarField& f) {
  const int w = f.width();
  const int h = f.height();
  VectorField2 g(f.grid());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx;
      if (x == 0) {
        dx = f(1, y) - f(0, y);
      } else if (x == w - 1) {
        dx = f(w - 1, y) - f(w - 2, y);
      } else {
        dx = 0.5 * (f(x + 1, y) - f(x - 1, y));
      }
      double dy;
      if (y == 0) {
        dy = f(x, 1) - f(x, 0);
      } else if (y == h - 1) {
        dy = f(x, h - 1) - f(x, h - 2);
      } else {
        dy = 0.5 * (f(x, y + 1) - f(x, y - 1));
      }
      g(x, y) = {dx, dy};
    }
  }
  return g;
}

}  // namespace ffp
