#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Core>

#include "rh/image.hpp"

namespace rh {

/// Bilinear resample with half-pixel-centred sampling, per channel,
/// rounded to nearest (ties away from zero). Identity when the size is
/// unchanged.
RasterImage resize_bilinear(const RasterImage& img, int width, int height);

inline RasterImage resize_to_work_size(const RasterImage& img) {
  return resize_bilinear(img, kWorkSize, kWorkSize);
}

/// Normalized 1-D taps of the sampled Gaussian (sigma = 1) at offsets 0, 1, 2.
/// The full kernel is {w2, w1, w0, w1, w2}.
/// exp(-k^2/2) is spelled out as literals so the taps do not depend on the
/// platform's libm.
template <typename Scalar = double>
std::array<Scalar, 3> gaussian_taps() {
  const Scalar g0 = 1;
  const Scalar g1 = Scalar(0.60653065971263342360379953499118);  // exp(-1/2)
  const Scalar g2 = Scalar(0.13533528323661269189399949497248);  // exp(-2)
  const Scalar sum = g0 + 2 * g1 + 2 * g2;
  return {g0 / sum, g1 / sum, g2 / sum};
}

namespace detail {

// One 5-tap pass along rows (horizontal=true) or columns, edge replication.
// Written as centre + sum w_k (x_k - centre) so a constant window reproduces
// its value exactly; the clamp keeps rounding inside the window's range.
template <typename Scalar>
Plane<Scalar> gaussian_pass(const Plane<Scalar>& in, bool horizontal) {
  const auto taps = gaussian_taps<Scalar>();
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();
  Plane<Scalar> out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Scalar centre = in(r, c);
      Scalar acc = 0;
      Scalar lo = centre;
      Scalar hi = centre;
      for (int k = -2; k <= 2; ++k) {
        if (k == 0) continue;
        const Scalar v = horizontal
                             ? in(r, std::clamp<Eigen::Index>(c + k, 0, cols - 1))
                             : in(std::clamp<Eigen::Index>(r + k, 0, rows - 1), c);
        acc += taps[static_cast<std::size_t>(std::abs(k))] * (v - centre);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      out(r, c) = std::clamp(centre + acc, lo, hi);
    }
  }
  return out;
}

}  // namespace detail

/// Separable 5x5 Gaussian low-pass (sigma = 1), edge replication, real-valued
/// output. Accepts any Eigen expression.
template <typename Derived>
Plane<typename Derived::Scalar> gaussian5x5(const Eigen::MatrixBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  const Plane<Scalar> src = plane;
  return detail::gaussian_pass<Scalar>(detail::gaussian_pass<Scalar>(src, true), false);
}

/// BT.601 full-range RGB → YCbCr on a working-size image.
PlanarYCbCr to_ycbcr(const RasterImage& img);

/// Inverse of to_ycbcr, unrounded, as three planes (R, G, B).
std::array<PlaneD, 3> from_ycbcr(const PlanarYCbCr& ycc);

/// Full preprocessing: resize to 128x128, convert to YCbCr, blur each plane.
PlanarYCbCr preprocess(const RasterImage& img);

}  // namespace rh
