#include "rh/imageprep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace rh {

namespace {

// Bilinear taps in exact integer form: weight of i1 is num / den.
struct Tap {
  int i0;
  int i1;
  std::int64_t num;
};

// Half-pixel-centred source coordinates for every output index. The source
// position ((2d + 1) * src - dst) / (2 * dst) is rational, so it is kept as
// an integer numerator over den = 2 * dst.
std::vector<Tap> sample_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const std::int64_t den = 2 * static_cast<std::int64_t>(dst);
  for (int d = 0; d < dst; ++d) {
    const std::int64_t n = std::max<std::int64_t>(0, (2 * std::int64_t{d} + 1) * src - dst);
    std::int64_t i0 = n / den;
    std::int64_t num = n % den;
    if (i0 >= src - 1) {
      i0 = src - 1;
      num = 0;
    }
    taps[static_cast<std::size_t>(d)] = {static_cast<int>(i0), static_cast<int>(std::min<std::int64_t>(i0 + 1, src - 1)),
                                         num};
  }
  return taps;
}

}  // namespace

PlaneD channel_plane(const RasterImage& img, int channel) {
  PlaneD p(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) p(y, x) = img.at(x, y, channel);
  return p;
}

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
  if (img.width() == width && img.height() == height) return img;
  const auto xs = sample_taps(img.width(), width);
  const auto ys = sample_taps(img.height(), height);
  const std::int64_t dx = 2 * static_cast<std::int64_t>(width);
  const std::int64_t dy = 2 * static_cast<std::int64_t>(height);
  const std::int64_t total = dx * dy;
  RasterImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < RasterImage::kChannels; ++c) {
        const std::int64_t top = (dx - tx.num) * img.at(tx.i0, ty.i0, c) + tx.num * img.at(tx.i1, ty.i0, c);
        const std::int64_t bottom = (dx - tx.num) * img.at(tx.i0, ty.i1, c) + tx.num * img.at(tx.i1, ty.i1, c);
        const std::int64_t v = (dy - ty.num) * top + ty.num * bottom;
        // round half away from zero, v >= 0
        out.at(x, y, c) = static_cast<std::uint8_t>((2 * v + total) / (2 * total));
      }
    }
  }
  return out;
}

PlanarYCbCr to_ycbcr(const RasterImage& img) {
  const int h = img.height();
  const int w = img.width();
  PlanarYCbCr out{PlaneD(h, w), PlaneD(h, w), PlaneD(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = img.at(x, y, 0);
      const double g = img.at(x, y, 1);
      const double b = img.at(x, y, 2);
      const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
      out.y(y, x) = luma;
      out.cb(y, x) = 128.0 + (b - luma) * 0.564;
      out.cr(y, x) = 128.0 + (r - luma) * 0.713;
    }
  }
  return out;
}

std::array<PlaneD, 3> from_ycbcr(const PlanarYCbCr& ycc) {
  const PlaneD r = ycc.y.array() + (ycc.cr.array() - 128.0) / 0.713;
  const PlaneD b = ycc.y.array() + (ycc.cb.array() - 128.0) / 0.564;
  const PlaneD g = (ycc.y.array() - 0.299 * r.array() - 0.114 * b.array()) / 0.587;
  return {r, g, b};
}

PlanarYCbCr preprocess(const RasterImage& img) {
  PlanarYCbCr ycc = to_ycbcr(resize_to_work_size(img));
  ycc.y = gaussian5x5(ycc.y);
  ycc.cb = gaussian5x5(ycc.cb);
  ycc.cr = gaussian5x5(ycc.cr);
  return ycc;
}

}  // namespace rh
