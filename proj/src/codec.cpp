#include "rh/codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "rh/error.hpp"

namespace rh {

namespace {

// ---------------------------------------------------------------------------
// JPEG
// ---------------------------------------------------------------------------

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

[[noreturn]] void jpeg_fail(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Warnings (truncated data, corrupt segments) are promoted to errors: a
// query decoded from a damaged stream would hash to garbage silently.
void jpeg_message(j_common_ptr cinfo, int level) {
  if (level < 0) jpeg_fail(cinfo);
}

void install_jpeg_errors(JpegErrorManager& err) {
  jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_fail;
  err.pub.emit_message = jpeg_message;
  err.message[0] = '\0';
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  install_jpeg_errors(err);
  cinfo.err = &err.pub;

  std::vector<std::uint8_t> pixels;
  int width = 0;
  int height = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(std::string("jpeg: ") + err.message);
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError("jpeg: CMYK images are not supported");
  }
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);

  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(width) * 3;
  pixels.resize(stride * height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return RasterImage(width, height, std::move(pixels));
}

Bytes encode_jpeg_impl(const RasterImage& img, int quality) {
  jpeg_compress_struct cinfo{};
  JpegErrorManager err{};
  install_jpeg_errors(err);
  cinfo.err = &err.pub;

  unsigned char* buffer = nullptr;
  unsigned long size = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw EncodeError(std::string("jpeg: ") + err.message);
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  cinfo.optimize_coding = FALSE;
  // 4:2:0
  cinfo.comp_info[0].h_samp_factor = 2;
  cinfo.comp_info[0].v_samp_factor = 2;
  cinfo.comp_info[1].h_samp_factor = 1;
  cinfo.comp_info[1].v_samp_factor = 1;
  cinfo.comp_info[2].h_samp_factor = 1;
  cinfo.comp_info[2].v_samp_factor = 1;
  jpeg_start_compress(&cinfo, TRUE);

  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(img.data().data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  Bytes out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

struct PngErrorState {
  char message[256] = {};
};

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

void png_read_bytes(png_structp png, png_bytep out, png_size_t len) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + len > state->bytes.size()) png_error(png, "unexpected end of stream");
  std::memcpy(out, state->bytes.data() + state->offset, len);
  state->offset += len;
}

void png_write_bytes(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  PngErrorState err;
  PngReadState src{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_ignore_warning);
  if (!png) throw DecodeError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("png: out of memory");
  }

  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  bool sixteen_bit = false;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(std::string("png: ") + err.message);
  }

  png_set_read_fn(png, &src, png_read_bytes);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth == 16) {
    sixteen_bit = true;
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3)
      png_error(png, "unsupported pixel layout");

    const std::size_t stride = static_cast<std::size_t>(width) * 3;
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (sixteen_bit) throw DecodeError("png: 16-bit images are not supported");
  return RasterImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

Bytes encode_png_impl(const RasterImage& img, int level) {
  PngErrorState err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_ignore_warning);
  if (!png) throw EncodeError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw EncodeError("png: out of memory");
  }

  Bytes out;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw EncodeError(std::string("png: ") + err.message);
  }

  png_set_write_fn(png, &out, png_write_bytes, png_flush_noop);
  png_set_compression_level(png, level);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
  rows.resize(static_cast<std::size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y)
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(img.data().data() + stride * y);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

bool has_extension(const std::filesystem::path& p, std::initializer_list<const char*> exts) {
  std::string ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (const char* e : exts)
    if (ext == e) return true;
  return false;
}

}  // namespace

std::optional<ImageFormat> sniff_format(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= sizeof kPng && std::memcmp(bytes.data(), kPng, sizeof kPng) == 0)
    return ImageFormat::png;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return ImageFormat::jpeg;
  return std::nullopt;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes, ImageFormat format) {
  if (bytes.empty()) throw DecodeError("empty image stream");
  return format == ImageFormat::png ? decode_png(bytes) : decode_jpeg(bytes);
}

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  const auto format = sniff_format(bytes);
  if (!format) throw DecodeError("unrecognized image format (expected PNG or JPEG)");
  return decode_image(bytes, *format);
}

Bytes encode_png(const RasterImage& img, int compression_level) {
  if (img.empty()) throw EncodeError("png: empty image");
  return encode_png_impl(img, compression_level);
}

Bytes encode_jpeg(const RasterImage& img, int quality) {
  if (img.empty()) throw EncodeError("jpeg: empty image");
  if (quality < 1 || quality > 100) throw InvalidArgument("jpeg quality must be in 1..100");
  return encode_jpeg_impl(img, quality);
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw MissingFile("missing file: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

RasterImage load_image(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

void save_image(const std::filesystem::path& path, const RasterImage& img, int jpeg_quality) {
  if (has_extension(path, {".jpg", ".jpeg"}))
    write_file(path, encode_jpeg(img, jpeg_quality));
  else
    write_file(path, encode_png(img));
}

}  // namespace rh
