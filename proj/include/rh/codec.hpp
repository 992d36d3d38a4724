#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "rh/image.hpp"

namespace rh {

enum class ImageFormat { png, jpeg };

using Bytes = std::vector<std::uint8_t>;

/// Identifies PNG or JPEG by magic number; nullopt for anything else.
std::optional<ImageFormat> sniff_format(std::span<const std::uint8_t> bytes);

/// Decodes to 8-bit RGB. Gray and paletted inputs are expanded, alpha is
/// dropped. 16-bit PNG, CMYK JPEG and any libjpeg warning (truncated data,
/// corrupt segments) raise DecodeError.
RasterImage decode_image(std::span<const std::uint8_t> bytes, ImageFormat format);

/// Same as above, format chosen by sniff_format.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// Lossless PNG. zlib level only changes the byte stream, never the pixels.
Bytes encode_png(const RasterImage& img, int compression_level = 6);

/// Baseline JPEG, IJG quality scale, 4:2:0 chroma subsampling, integer DCT.
Bytes encode_jpeg(const RasterImage& img, int quality);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// read_file + decode_image. A missing path raises MissingFile.
RasterImage load_image(const std::filesystem::path& path);

/// Writes PNG or JPEG depending on the extension (.jpg/.jpeg → JPEG).
void save_image(const std::filesystem::path& path, const RasterImage& img, int jpeg_quality = 95);

}  // namespace rh
