#pragma once

// Regular pixel grids, per-pixel fields and the 2x2 SPD kernel.
//
// Storage is row-major with x = column, y = row and the origin at the top-left
// pixel. Grid spacing is one pixel; every length in the library is in pixels.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ffp/error.hpp"

namespace ffp {

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(Pixel, Pixel) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(Vec2, Vec2) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counterclockwise perpendicular (in x-right, y-up orientation).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Symmetric 2x2 matrix [[m11, m12], [m12, m22]].
struct Spd2 {
  double m11 = 1.0;
  double m12 = 0.0;
  double m22 = 1.0;

  static Spd2 identity() { return {1.0, 0.0, 1.0}; }
  double det() const { return m11 * m22 - m12 * m12; }
  Vec2 apply(Vec2 u) const { return {m11 * u.x + m12 * u.y, m12 * u.x + m22 * u.y}; }
  double quad(Vec2 u) const { return u.x * (m11 * u.x + m12 * u.y) + u.y * (m12 * u.x + m22 * u.y); }
  bool positive_definite() const { return m11 > 0.0 && det() > 0.0; }

  friend bool operator==(const Spd2&, const Spd2&) = default;
};

inline Spd2 operator+(const Spd2& a, const Spd2& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m22 + b.m22};
}
inline Spd2 operator*(double s, const Spd2& a) { return {s * a.m11, s * a.m12, s * a.m22}; }

/// u ⊗ u
inline Spd2 outer(Vec2 u) { return {u.x * u.x, u.x * u.y, u.y * u.y}; }

/// ‖u‖_M = sqrt(<u, M u>).
inline double spd_norm(const Spd2& m, Vec2 u) {
  const double q = m.quad(u);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

/// Throws NumericalError when det(M) <= 1e-300.
Spd2 spd_inverse(const Spd2& m);

/// Eigenvalues in ascending order.
std::pair<double, double> spd_eigenvalues(const Spd2& m);

class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }

  bool contains(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  std::size_t index(Pixel p) const {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p.x);
  }
  Pixel pixel(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
};

template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;
  explicit Field(Grid2D grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  Field(Grid2D grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ConfigError("field has " + std::to_string(values_.size()) + " values, grid expects " +
                        std::to_string(grid_.size()));
    }
  }

  const Grid2D& grid() const { return grid_; }
  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  std::size_t size() const { return values_.size(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator()(int x, int y) { return values_[grid_.index({x, y})]; }
  const T& operator()(int x, int y) const { return values_[grid_.index({x, y})]; }
  T& at(Pixel p) { return values_[grid_.index(p)]; }
  const T& at(Pixel p) const { return values_[grid_.index(p)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  Grid2D grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;
using VectorField2 = Field<Vec2>;

/// Tensor field whose every pixel is validated positive definite at construction.
class SpdTensorField {
 public:
  SpdTensorField() = default;
  /// Throws NumericalError naming the first non-SPD pixel.
  explicit SpdTensorField(Field<Spd2> values);
  SpdTensorField(Grid2D grid, Spd2 constant);

  const Grid2D& grid() const { return values_.grid(); }
  std::size_t size() const { return values_.size(); }
  const Spd2& operator[](std::size_t i) const { return values_[i]; }
  const Spd2& at(Pixel p) const { return values_.at(p); }
  const Field<Spd2>& field() const { return values_; }

 private:
  Field<Spd2> values_;
};

/// Largest absolute value, 0 for an empty field.
double max_abs(const ScalarField& f);

/// Central differences in the interior, one-sided at the border.
VectorField2 central_gradient(const ScalarField& f);

}  // namespace ffp
