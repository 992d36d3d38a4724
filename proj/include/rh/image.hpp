#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rh/error.hpp"

namespace rh {

/// Side length of the square working resolution every image is reduced to
/// before feature extraction.
inline constexpr int kWorkSize = 128;

/// Real-valued single-channel image. Row-major so (row, col) indexing walks
/// memory the same way RasterImage does.
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PlaneD = Plane<double>;

/// 8-bit interleaved RGB raster, row-major.
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;

  RasterImage(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
  }

  RasterImage(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height * kChannels)
      throw InvalidArgument("RasterImage: data length does not match dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1)
      throw InvalidArgument("RasterImage: width and height must be >= 1");
  }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Luminance and two chrominance planes at working resolution.
struct PlanarYCbCr {
  PlaneD y;
  PlaneD cb;
  PlaneD cr;
};

/// Copies one channel of an image into a real-valued plane.
PlaneD channel_plane(const RasterImage& img, int channel);

}  // namespace rh
