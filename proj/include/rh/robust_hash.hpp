#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rh/image.hpp"

namespace rh {

/// 120-bit robust hash. Bit 1 is the most significant bit of words[0];
/// bits 65..120 occupy the top 56 bits of words[1], the low byte of
/// words[1] is always zero.
class Hash120 {
 public:
  static constexpr int kBits = 120;
  static constexpr int kHexChars = 30;
  static constexpr std::uint64_t kTailMask = ~std::uint64_t{0xFF};

  constexpr Hash120() = default;
  constexpr Hash120(std::uint64_t hi, std::uint64_t lo) : words_{hi, lo & kTailMask} {}

  /// Builds from a 120-element 0/1 sequence, element 0 = bit 1.
  static Hash120 from_bits(std::span<const std::uint8_t> bits);

  /// 1-based bit accessor.
  constexpr bool bit(int i) const {
    const int k = i - 1;
    return (words_[static_cast<std::size_t>(k / 64)] >> (63 - k % 64)) & 1U;
  }

  constexpr std::uint64_t hi() const { return words_[0]; }
  constexpr std::uint64_t lo() const { return words_[1]; }

  constexpr Hash120 operator~() const { return {~words_[0], ~words_[1]}; }
  constexpr Hash120 operator^(const Hash120& o) const {
    return {words_[0] ^ o.words_[0], words_[1] ^ o.words_[1]};
  }

  friend constexpr bool operator==(const Hash120&, const Hash120&) = default;

 private:
  std::array<std::uint64_t, 2> words_{0, 0};
};

std::string to_hex(const Hash120& h);

/// Exactly 30 hex digits, either case. ParseError otherwise.
Hash120 parse_hex(std::string_view s);

/// The 120 scalars the hash is quantized from, in bit order.
struct FeatureVector {
  static constexpr int kLumaMeans = 64;
  static constexpr int kChromaMeans = 16;
  static constexpr int kLumaStddevs = 16;
  static constexpr int kBands = 8;

  std::array<double, kLumaMeans> luma_means_8x8{};
  std::array<double, kChromaMeans> cb_means_4x4{};
  std::array<double, kChromaMeans> cr_means_4x4{};
  std::array<double, kLumaStddevs> luma_stddev_4x4{};
  std::array<double, kBands> luma_band_means{};
};

enum class BlockStat { mean, stddev };

/// Per-block mean or population standard deviation over a grid x grid tiling
/// of a plane, row-major block order. Sums run in a fixed row-major order
/// (not Eigen's packet reductions) so results do not depend on SIMD width.
template <typename Derived>
std::vector<typename Derived::Scalar> block_stats(const Eigen::MatrixBase<Derived>& plane,
                                                  int grid, BlockStat stat) {
  using Scalar = typename Derived::Scalar;
  if (grid < 1 || plane.rows() % grid != 0 || plane.cols() % grid != 0)
    throw InvalidArgument("block_stats: grid must evenly divide the plane");
  const Eigen::Index bh = plane.rows() / grid;
  const Eigen::Index bw = plane.cols() / grid;
  const Scalar count = static_cast<Scalar>(bh * bw);
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(grid) * grid);
  for (int by = 0; by < grid; ++by) {
    for (int bx = 0; bx < grid; ++bx) {
      const auto block = plane.block(by * bh, bx * bw, bh, bw);
      Scalar sum = 0;
      for (Eigen::Index r = 0; r < bh; ++r)
        for (Eigen::Index c = 0; c < bw; ++c) sum += block(r, c);
      const Scalar mean = sum / count;
      if (stat == BlockStat::mean) {
        out.push_back(mean);
        continue;
      }
      Scalar sq = 0;
      for (Eigen::Index r = 0; r < bh; ++r)
        for (Eigen::Index c = 0; c < bw; ++c) sq += (block(r, c) - mean) * (block(r, c) - mean);
      out.push_back(std::sqrt(sq / count));
    }
  }
  return out;
}

/// bit_i = 1 iff values[i] > median (strict). Even length uses the mean of
/// the two middle order statistics.
std::vector<std::uint8_t> bits_vs_median(std::span<const double> values);

/// Means of `bands` horizontal strips of equal height.
std::vector<double> band_means(const PlaneD& plane, int bands);

FeatureVector extract_features(const PlanarYCbCr& planes);

Hash120 hash_features(const FeatureVector& features);

/// Preprocess + extract + quantize.
Hash120 compute_hash(const RasterImage& img);

}  // namespace rh
