#include "rh/robust_hash.hpp"

#include <algorithm>
#include <cctype>

#include "rh/imageprep.hpp"

namespace rh {

Hash120 Hash120::from_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() != kBits) throw InvalidArgument("Hash120 needs exactly 120 bits");
  std::uint64_t words[2] = {0, 0};
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] > 1) throw InvalidArgument("Hash120 bits must be 0 or 1");
    if (bits[k]) words[k / 64] |= std::uint64_t{1} << (63 - k % 64);
  }
  return {words[0], words[1]};
}

std::string to_hex(const Hash120& h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(Hash120::kHexChars, '0');
  for (int i = 0; i < Hash120::kHexChars; ++i) {
    const std::uint64_t word = i < 16 ? h.hi() : h.lo();
    const int shift = 60 - 4 * (i % 16);
    s[static_cast<std::size_t>(i)] = kDigits[(word >> shift) & 0xF];
  }
  return s;
}

Hash120 parse_hex(std::string_view s) {
  if (s.size() != Hash120::kHexChars)
    throw ParseError("hash must be 30 hex characters, got " + std::to_string(s.size()));
  std::uint64_t words[2] = {0, 0};
  for (int i = 0; i < Hash120::kHexChars; ++i) {
    const char ch = s[static_cast<std::size_t>(i)];
    int v = 0;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw ParseError(std::string("invalid hex character '") + ch + "'");
    words[i / 16] |= static_cast<std::uint64_t>(v) << (60 - 4 * (i % 16));
  }
  return {words[0], words[1]};
}

std::vector<std::uint8_t> bits_vs_median(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("bits_vs_median: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = values[i] > median ? 1 : 0;
  return bits;
}

std::vector<double> band_means(const PlaneD& plane, int bands) {
  if (bands < 1 || plane.rows() % bands != 0)
    throw InvalidArgument("band_means: bands must evenly divide the plane height");
  const Eigen::Index rows = plane.rows() / bands;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(bands));
  for (int b = 0; b < bands; ++b) {
    const PlaneD band = plane.middleRows(b * rows, rows);
    double sum = 0;
    for (Eigen::Index r = 0; r < band.rows(); ++r)
      for (Eigen::Index c = 0; c < band.cols(); ++c) sum += band(r, c);
    out.push_back(sum / static_cast<double>(band.size()));
  }
  return out;
}

FeatureVector extract_features(const PlanarYCbCr& planes) {
  FeatureVector f;
  auto copy = [](const std::vector<double>& src, auto& dst) {
    std::copy(src.begin(), src.end(), dst.begin());
  };
  copy(block_stats(planes.y, 8, BlockStat::mean), f.luma_means_8x8);
  copy(block_stats(planes.cb, 4, BlockStat::mean), f.cb_means_4x4);
  copy(block_stats(planes.cr, 4, BlockStat::mean), f.cr_means_4x4);
  copy(block_stats(planes.y, 4, BlockStat::stddev), f.luma_stddev_4x4);
  copy(band_means(planes.y, FeatureVector::kBands), f.luma_band_means);
  return f;
}

Hash120 hash_features(const FeatureVector& f) {
  std::vector<std::uint8_t> bits;
  bits.reserve(Hash120::kBits);
  auto append = [&bits](std::span<const double> group) {
    const auto b = bits_vs_median(group);
    bits.insert(bits.end(), b.begin(), b.end());
  };
  append(f.luma_means_8x8);
  append(f.cb_means_4x4);
  append(f.cr_means_4x4);
  append(f.luma_stddev_4x4);
  append(f.luma_band_means);
  return Hash120::from_bits(bits);
}

Hash120 compute_hash(const RasterImage& img) {
  return hash_features(extract_features(preprocess(img)));
}

}  // namespace rh
