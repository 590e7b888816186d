#include "ffp/edge_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ffp {

ImageBuffer::ImageBuffer(Grid2D grid, int channels)
    : grid_(grid), channels_(channels), samples_(grid.size() * static_cast<std::size_t>(channels), 0.0) {
  if (channels != 1 && channels != 3) {
    throw ConfigError("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

ImageBuffer::ImageBuffer(Grid2D grid, int channels, std::vector<double> samples) : ImageBuffer(grid, channels) {
  if (samples.size() != samples_.size()) {
    throw ConfigError("image sample count mismatch");
  }
  for (auto& s : samples) s = std::clamp(s, 0.0, 1.0);
  samples_ = std::move(samples);
}

ScalarField ImageBuffer::channel(int c) const {
  ScalarField f(grid_);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = sample(i, c);
  return f;
}

ScalarField ImageBuffer::gray() const {
  ScalarField f(grid_);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < channels_; ++c) s += sample(i, c);
    f[i] = s / channels_;
  }
  return f;
}

ImageBuffer ImageBuffer::from_gray(const ScalarField& f) {
  return ImageBuffer(f.grid(), 1, std::vector<double>(f.begin(), f.end()));
}

namespace {

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

ImageBuffer rgb_to_lab(const ImageBuffer& rgb) {
  if (rgb.channels() != 3) throw ConfigError("Lab conversion needs a 3-channel image");
  ImageBuffer out(rgb.grid(), 3);
  // D65 white point
  constexpr double xn = 0.95047, yn = 1.0, zn = 1.08883;
  for (std::size_t i = 0; i < rgb.grid().size(); ++i) {
    const double r = srgb_to_linear(rgb.sample(i, 0));
    const double g = srgb_to_linear(rgb.sample(i, 1));
    const double b = srgb_to_linear(rgb.sample(i, 2));
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / xn), fy = lab_f(y / yn), fz = lab_f(z / zn);
    const double l = 116.0 * fy - 16.0;
    const double a = 500.0 * (fx - fy);
    const double bb = 200.0 * (fy - fz);
    out.sample(i, 0) = std::clamp(l / 100.0, 0.0, 1.0);
    out.sample(i, 1) = std::clamp(a / 256.0 + 0.5, 0.0, 1.0);
    out.sample(i, 2) = std::clamp(bb / 256.0 + 0.5, 0.0, 1.0);
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

ScalarField gaussian_smooth(const ScalarField& f, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = f.width();
  const int h = f.height();
  ScalarField tmp(f.grid());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        s += k[static_cast<std::size_t>(i + radius)] * f(std::clamp(x + i, 0, w - 1), y);
      }
      tmp(x, y) = s;
    }
  }
  ScalarField out(f.grid());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        s += k[static_cast<std::size_t>(i + radius)] * tmp(x, std::clamp(y + i, 0, h - 1));
      }
      out(x, y) = s;
    }
  }
  return out;
}

ScalarField edge_saliency(const ImageBuffer& img, double sigma) {
  ScalarField sum_sq(img.grid(), 0.0);
  for (int c = 0; c < img.channels(); ++c) {
    const VectorField2 d = central_gradient(gaussian_smooth(img.channel(c), sigma));
    for (std::size_t i = 0; i < sum_sq.size(); ++i) sum_sq[i] += dot(d[i], d[i]);
  }
  for (auto& v : sum_sq) v = std::sqrt(v);
  return sum_sq;
}

void GvfParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("GVF epsilon must be positive");
  if (!(tol > 0.0)) throw ConfigError("GVF tolerance must be positive");
  if (max_iters < 0) throw ConfigError("GVF max_iters must be nonnegative");
}

namespace {

// 5-point Laplacian with Neumann boundary: sum over in-grid neighbours of (h_j - h_i).
Vec2 laplacian(const VectorField2& h, int x, int y) {
  const Vec2 c = h(x, y);
  Vec2 s{};
  if (x > 0) s = s + (h(x - 1, y) - c);
  if (x + 1 < h.width()) s = s + (h(x + 1, y) - c);
  if (y > 0) s = s + (h(x, y - 1) - c);
  if (y + 1 < h.height()) s = s + (h(x, y + 1) - c);
  return s;
}

}  // namespace

double gvf_energy(const VectorField2& h, const VectorField2& grad_rho, double epsilon) {
  double reg = 0.0;
  double data = 0.0;
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const Vec2 c = h(x, y);
      if (x + 1 < h.width()) {
        const Vec2 d = h(x + 1, y) - c;
        reg += dot(d, d);
      }
      if (y + 1 < h.height()) {
        const Vec2 d = h(x, y + 1) - c;
        reg += dot(d, d);
      }
      const Vec2 gr = grad_rho(x, y);
      const Vec2 e = c - gr;
      data += dot(gr, gr) * dot(e, e);
    }
  }
  return epsilon * reg + data;
}

VectorField2 gvf_residual(const VectorField2& h, const VectorField2& grad_rho, double epsilon) {
  VectorField2 r(h.grid());
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const Vec2 gr = grad_rho(x, y);
      r(x, y) = epsilon * laplacian(h, x, y) - dot(gr, gr) * (h(x, y) - gr);
    }
  }
  return r;
}

GvfResult gvf(const ScalarField& rho, const GvfParams& params) {
  params.validate();
  const VectorField2 grad = central_gradient(rho);
  double max_w = 0.0;
  for (const Vec2& g : grad) max_w = std::max(max_w, dot(g, g));
  // Stability bound of the explicit scheme for the 5-point Laplacian plus reaction term;
  // it is also the 1/L step of gradient descent on the discrete energy, hence monotone.
  const double dt = 1.0 / (8.0 * params.epsilon + max_w);

  GvfResult result;
  result.field = grad;
  VectorField2 next(rho.grid());
  VectorField2& h = result.field;
  for (int it = 0; it < params.max_iters; ++it) {
    double max_update = 0.0;
    for (int y = 0; y < h.height(); ++y) {
      for (int x = 0; x < h.width(); ++x) {
        const Vec2 gr = grad(x, y);
        const Vec2 step =
            dt * (params.epsilon * laplacian(h, x, y) - dot(gr, gr) * (h(x, y) - gr));
        next(x, y) = h(x, y) + step;
        max_update = std::max(max_update, norm(step));
      }
    }
    std::swap(h, next);
    result.iterations = it + 1;
    result.last_update = max_update;
    if (max_update < params.tol) {
      result.converged = true;
      break;
    }
  }
  if (params.max_iters == 0) result.converged = false;
  return result;
}

UnitFieldResult unit_vector_field(const VectorField2& h) {
  UnitFieldResult r{VectorField2(h.grid()), Field<unsigned char>(h.grid(), 0), 0};
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double n = norm(h[i]);
    if (n >= 1e-12) {
      r.field[i] = (1.0 / n) * h[i];
    } else {
      r.field[i] = {1.0, 0.0};
      r.degenerate[i] = 1;
      ++r.degenerate_count;
    }
  }
  return r;
}

}  // namespace ffp
