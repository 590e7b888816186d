#pragma once

#include <cstddef>
#include <vector>

#include "ffp/grid.hpp"

namespace ffp {

/// Gray (1 channel) or color (3 channel) image, samples in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(Grid2D grid, int channels);
  /// Interleaved samples, clamped to [0,1].
  ImageBuffer(Grid2D grid, int channels, std::vector<double> samples);

  const Grid2D& grid() const { return grid_; }
  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  int channels() const { return channels_; }

  double& sample(std::size_t pixel, int c) { return samples_[pixel * static_cast<std::size_t>(channels_) + c]; }
  double sample(std::size_t pixel, int c) const { return samples_[pixel * static_cast<std::size_t>(channels_) + c]; }
  double& operator()(int x, int y, int c = 0) { return sample(grid_.index({x, y}), c); }
  double operator()(int x, int y, int c = 0) const { return sample(grid_.index({x, y}), c); }

  ScalarField channel(int c) const;
  /// Mean of the channels.
  ScalarField gray() const;
  std::span<const double> samples() const { return samples_; }

  static ImageBuffer from_gray(const ScalarField& f);

 private:
  Grid2D grid_;
  int channels_ = 1;
  std::vector<double> samples_;
};

/// sRGB -> CIE-Lab (D65), rescaled so L, a, b each land in roughly [0,1].
ImageBuffer rgb_to_lab(const ImageBuffer& rgb);

/// Normalized Gaussian kernel truncated at radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian convolution with replicate boundary.
ScalarField gaussian_smooth(const ScalarField& f, double sigma);

/// Frobenius norm of the Gaussian-smoothed image Jacobian.
ScalarField edge_saliency(const ImageBuffer& img, double sigma);

struct GvfParams {
  double epsilon = 0.1;
  int max_iters = 10000;
  double tol = 1e-4;

  void validate() const;
};

struct GvfResult {
  VectorField2 field;
  int iterations = 0;
  double last_update = 0.0;
  bool converged = false;
};

/// Discrete GVF energy: epsilon * sum of squared forward differences of h
/// (Neumann boundary) plus sum of |grad rho|^2 |h - grad rho|^2.
double gvf_energy(const VectorField2& h, const VectorField2& grad_rho, double epsilon);

/// Pointwise Euler-Lagrange residual eps*Lap(h) - |grad rho|^2 (h - grad rho).
VectorField2 gvf_residual(const VectorField2& h, const VectorField2& grad_rho, double epsilon);

/// Gradient vector flow of rho by explicit descent from h = grad rho.
/// Non-convergence is reported through GvfResult::converged, not thrown.
GvfResult gvf(const ScalarField& rho, const GvfParams& params = {});

struct UnitFieldResult {
  VectorField2 field;
  Field<unsigned char> degenerate;  // 1 where |h| < 1e-12 and the fallback (1,0) was used
  std::size_t degenerate_count = 0;
};

UnitFieldResult unit_vector_field(const VectorField2& h);

}  // namespace ffp
