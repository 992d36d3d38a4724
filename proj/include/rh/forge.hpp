#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rh/codec.hpp"
#include "rh/image.hpp"
#include "rh/matcher.hpp"

namespace rh {

/// Quality of the JPEG pass applied to every query image.
inline constexpr int kQueryJpegQuality = 80;
inline constexpr double kDefaultRegionFraction = 0.25;

enum class ManipulationKind { none, jpeg, resize, copy_move, splice };

std::string_view to_string(ManipulationKind k);
ManipulationKind parse_manipulation_kind(std::string_view s);

/// One query-side manipulation. Only the parameters the kind needs may be set.
struct ManipulationSpec {
  ManipulationKind kind = ManipulationKind::none;
  std::optional<int> quality;             // jpeg
  std::optional<double> scale;            // resize
  std::optional<double> region_fraction;  // copy_move, splice
  std::uint64_t seed = 0;
  std::optional<std::string> donor_id;    // splice

  static ManipulationSpec none() { return {}; }
  static ManipulationSpec jpeg(int quality) {
    ManipulationSpec s;
    s.kind = ManipulationKind::jpeg;
    s.quality = quality;
    return s;
  }
  static ManipulationSpec resize(double scale) {
    ManipulationSpec s;
    s.kind = ManipulationKind::resize;
    s.scale = scale;
    return s;
  }
  static ManipulationSpec copy_move(std::uint64_t seed, double fraction = kDefaultRegionFraction) {
    ManipulationSpec s;
    s.kind = ManipulationKind::copy_move;
    s.region_fraction = fraction;
    s.seed = seed;
    return s;
  }
  static ManipulationSpec splice(std::uint64_t seed, double fraction = kDefaultRegionFraction,
                                 std::optional<std::string> donor = std::nullopt) {
    ManipulationSpec s = copy_move(seed, fraction);
    s.kind = ManipulationKind::splice;
    s.donor_id = std::move(donor);
    return s;
  }

  /// copy_move and splice produce fakes; jpeg and resize are benign edits.
  bool produces_fake() const {
    return kind == ManipulationKind::copy_move || kind == ManipulationKind::splice;
  }

  /// InvalidArgument when a parameter is missing, out of range or not
  /// allowed for the kind.
  void validate() const;
};

/// Axis-aligned pixel rectangle.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
  bool overlaps(const Rect& o) const {
    return x < o.x + o.width && o.x < x + width && y < o.y + o.height && o.y < y + height;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Source and destination rectangles chosen by a region-moving manipulation.
struct RegionMove {
  Rect source;
  Rect destination;
};

/// Encode at the given IJG quality (4:2:0) and decode again.
RasterImage jpeg_recompress(const RasterImage& img, int quality);

/// Bilinear resample to (round(w*scale), round(h*scale)). InvalidScale if
/// scale <= 0 or either side would round to zero.
RasterImage resize_scale(const RasterImage& img, double scale);

/// Rectangles copy_move would use for this (seed, size, fraction).
RegionMove plan_copy_move(int width, int height, std::uint64_t seed, double region_fraction);

/// Copies a seeded rectangle of size fraction*w x fraction*h to another
/// position in the same image. The destination avoids overlapping the
/// source whenever the image leaves room for that. fraction in (0, 0.5].
RasterImage copy_move(const RasterImage& img, std::uint64_t seed,
                      double region_fraction = kDefaultRegionFraction);

/// Source rectangle lies in the donor, destination in the target.
RegionMove plan_splice(int width, int height, int donor_width, int donor_height,
                       std::uint64_t seed, double region_fraction);

/// Pastes a seeded rectangle of the donor into a seeded position of img.
/// Region size comes from img's dimensions; DonorTooSmall if it does not fit.
RasterImage splice(const RasterImage& img, const RasterImage& donor, std::uint64_t seed,
                   double region_fraction = kDefaultRegionFraction);

/// Applies one spec. Splice needs a donor.
RasterImage apply_manipulation(const RasterImage& img, const ManipulationSpec& spec,
                               const RasterImage* donor = nullptr);

/// In-memory reference corpus.
struct Corpus {
  std::vector<std::string> ids;
  std::vector<RasterImage> images;

  std::size_t size() const { return ids.size(); }
  /// Index of id, or size() if absent.
  std::size_t find(std::string_view id) const;
};

inline constexpr int kSyntheticSize = 256;

/// Generates the n-th synthetic image of the corpus for `seed`.
RasterImage synthetic_image(std::uint64_t seed, std::size_t index);

/// n images of 256x256: smooth colour gradient backdrop plus 5-10 filled
/// rectangles and ellipses. Ids are "syn0000", "syn0001", ...
Corpus gen_synthetic(std::size_t n, std::uint64_t seed, unsigned threads = 1);

struct ManifestRow {
  std::string query_id;
  std::filesystem::path file_path;
  Verdict label = Verdict::real;
  std::string origin_id;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

/// Header `query_id,file_path,label,origin_id`. Relative paths are resolved
/// against the manifest's directory when read from a file.
struct CorpusManifest {
  std::vector<ManifestRow> rows;

  std::size_t count(Verdict label) const;
};

void write_manifest(const CorpusManifest& m, std::ostream& out);
void save_manifest(const CorpusManifest& m, const std::filesystem::path& path);
CorpusManifest read_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Writes each image as <dir>/<id>.png and returns a manifest of real rows
/// whose origin is the image itself. Paths in the manifest are file names.
CorpusManifest write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Loads the images a manifest points at; ids are query_ids.
Corpus load_corpus(const CorpusManifest& manifest, unsigned threads = 1);

struct ExperimentQuery {
  std::string query_id;
  Verdict label = Verdict::real;
  std::string origin_id;
  Bytes encoded;      // JPEG stream at the query quality
  RasterImage image;  // decode_image(encoded)
};

/// For every reference: one real query (benign specs, then the global JPEG
/// pass) and one fake query per fake-producing spec (benign specs, the
/// tamper, then the global JPEG pass). Output order: per reference, real
/// first, then fakes in spec order.
std::vector<ExperimentQuery> build_experiment_queries(const Corpus& corpus,
                                                      std::span<const ManipulationSpec> specs,
                                                      std::uint64_t seed,
                                                      int query_quality = kQueryJpegQuality,
                                                      unsigned threads = 1);

/// build_experiment_queries written to <out_dir>/<query_id>.jpg at the query
/// quality, plus the manifest. Decoding each file reproduces the in-memory
/// query image exactly.
CorpusManifest build_experiment(const Corpus& corpus, std::span<const ManipulationSpec> specs,
                                std::uint64_t seed, const std::filesystem::path& out_dir,
                                int query_quality = kQueryJpegQuality, unsigned threads = 1);

}  // namespace rh
