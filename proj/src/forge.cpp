#include "rh/forge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "csv.hpp"
#include "rh/imageprep.hpp"
#include "rh/parallel.hpp"
#include "rh/rng.hpp"

namespace rh {

std::string_view to_string(ManipulationKind k) {
  switch (k) {
    case ManipulationKind::none: return "none";
    case ManipulationKind::jpeg: return "jpeg";
    case ManipulationKind::resize: return "resize";
    case ManipulationKind::copy_move: return "copy_move";
    case ManipulationKind::splice: return "splice";
  }
  return "none";
}

ManipulationKind parse_manipulation_kind(std::string_view s) {
  for (auto k : {ManipulationKind::none, ManipulationKind::jpeg, ManipulationKind::resize,
                 ManipulationKind::copy_move, ManipulationKind::splice})
    if (s == to_string(k)) return k;
  if (s == "copy-move") return ManipulationKind::copy_move;
  throw InvalidArgument("unknown manipulation kind: " + std::string(s));
}

void ManipulationSpec::validate() const {
  const auto reject = [this](const char* what) {
    throw InvalidArgument(std::string(to_string(kind)) + ": " + what);
  };
  const bool wants_quality = kind == ManipulationKind::jpeg;
  const bool wants_scale = kind == ManipulationKind::resize;
  const bool wants_region = produces_fake();
  if (quality.has_value() != wants_quality) reject(wants_quality ? "quality is required" : "quality not allowed");
  if (scale.has_value() != wants_scale) reject(wants_scale ? "scale is required" : "scale not allowed");
  if (region_fraction.has_value() != wants_region)
    reject(wants_region ? "region_fraction is required" : "region_fraction not allowed");
  if (donor_id && kind != ManipulationKind::splice) reject("donor_id is only valid for splice");
  if (quality && (*quality < 1 || *quality > 100)) reject("quality must be in 1..100");
  if (scale && !(std::isfinite(*scale) && *scale > 0)) throw InvalidScale("resize: scale must be > 0");
  if (region_fraction) {
    const double f = *region_fraction;
    const double upper = kind == ManipulationKind::copy_move ? 0.5 : 1.0;
    const bool upper_ok = kind == ManipulationKind::copy_move ? f <= upper : f < upper;
    if (!(f > 0 && upper_ok)) reject("region_fraction out of range");
  }
}

RasterImage jpeg_recompress(const RasterImage& img, int quality) {
  return decode_image(encode_jpeg(img, quality), ImageFormat::jpeg);
}

RasterImage resize_scale(const RasterImage& img, double scale) {
  if (!(std::isfinite(scale) && scale > 0)) throw InvalidScale("scale must be > 0");
  const double w = std::round(img.width() * scale);
  const double h = std::round(img.height() * scale);
  if (w < 1 || h < 1) throw InvalidScale("scale " + std::to_string(scale) + " gives an empty image");
  if (w > 1 << 20 || h > 1 << 20) throw InvalidScale("scale " + std::to_string(scale) + " is too large");
  return resize_bilinear(img, static_cast<int>(w), static_cast<int>(h));
}

namespace {

int region_side(int side, double fraction) {
  return std::clamp(static_cast<int>(std::lround(side * fraction)), 1, side);
}

Rect random_rect(SeededRng& rng, int width, int height, int rw, int rh) {
  return {static_cast<int>(rng.uniform_int(0, width - rw)), static_cast<int>(rng.uniform_int(0, height - rh)),
          rw, rh};
}

void copy_region(const RasterImage& src, const Rect& from, RasterImage& dst, const Rect& to) {
  for (int y = 0; y < from.height; ++y)
    for (int x = 0; x < from.width; ++x)
      for (int c = 0; c < RasterImage::kChannels; ++c)
        dst.at(to.x + x, to.y + y, c) = src.at(from.x + x, from.y + y, c);
}

}  // namespace

RegionMove plan_copy_move(int width, int height, std::uint64_t seed, double region_fraction) {
  if (!(region_fraction > 0 && region_fraction <= 0.5))
    throw InvalidArgument("copy_move: region_fraction must be in (0, 0.5]");
  SeededRng rng(seed);
  const int rw = region_side(width, region_fraction);
  const int rh = region_side(height, region_fraction);
  const Rect source = random_rect(rng, width, height, rw, rh);
  const bool can_move = rw < width || rh < height;
  const bool can_separate = 2 * rw <= width || 2 * rh <= height;
  if (!can_move) return {source, source};
  auto acceptable = [&](const Rect& r) { return can_separate ? !r.overlaps(source) : !(r == source); };
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Rect dest = random_rect(rng, width, height, rw, rh);
    if (acceptable(dest)) return {source, dest};
  }
  // Few acceptable spots: pick uniformly among all of them.
  std::vector<Rect> spots;
  for (int y = 0; y <= height - rh; ++y)
    for (int x = 0; x <= width - rw; ++x)
      if (acceptable({x, y, rw, rh})) spots.push_back({x, y, rw, rh});
  if (spots.empty()) {
    // The source sits where no disjoint spot exists; settle for a different one.
    for (int y = 0; y <= height - rh; ++y)
      for (int x = 0; x <= width - rw; ++x)
        if (!(Rect{x, y, rw, rh} == source)) spots.push_back({x, y, rw, rh});
  }
  return {source, spots[rng.uniform_int(0, spots.size() - 1)]};
}

RasterImage copy_move(const RasterImage& img, std::uint64_t seed, double region_fraction) {
  const RegionMove plan = plan_copy_move(img.width(), img.height(), seed, region_fraction);
  RasterImage out = img;
  copy_region(img, plan.source, out, plan.destination);
  return out;
}

RegionMove plan_splice(int width, int height, int donor_width, int donor_height, std::uint64_t seed,
                       double region_fraction) {
  if (!(region_fraction > 0 && region_fraction < 1))
    throw InvalidArgument("splice: region_fraction must be in (0, 1)");
  const int rw = region_side(width, region_fraction);
  const int rh = region_side(height, region_fraction);
  if (donor_width < rw || donor_height < rh)
    throw DonorTooSmall("splice: donor " + std::to_string(donor_width) + "x" + std::to_string(donor_height) +
                        " is smaller than the " + std::to_string(rw) + "x" + std::to_string(rh) + " region");
  SeededRng rng(seed);
  const Rect source = random_rect(rng, donor_width, donor_height, rw, rh);
  const Rect dest = random_rect(rng, width, height, rw, rh);
  return {source, dest};
}

RasterImage splice(const RasterImage& img, const RasterImage& donor, std::uint64_t seed,
                   double region_fraction) {
  const RegionMove plan = plan_splice(img.width(), img.height(), donor.width(), donor.height(), seed,
                                      region_fraction);
  RasterImage out = img;
  copy_region(donor, plan.source, out, plan.destination);
  return out;
}

RasterImage apply_manipulation(const RasterImage& img, const ManipulationSpec& spec, const RasterImage* donor) {
  spec.validate();
  switch (spec.kind) {
    case ManipulationKind::none: return img;
    case ManipulationKind::jpeg: return jpeg_recompress(img, *spec.quality);
    case ManipulationKind::resize: return resize_scale(img, *spec.scale);
    case ManipulationKind::copy_move: return copy_move(img, spec.seed, *spec.region_fraction);
    case ManipulationKind::splice:
      if (!donor) throw InvalidArgument("splice: no donor image");
      return splice(img, *donor, spec.seed, *spec.region_fraction);
  }
  return img;
}

std::size_t Corpus::find(std::string_view id) const {
  return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

RasterImage synthetic_image(std::uint64_t seed, std::size_t index) {
  SeededRng rng(mix_seed(seed ^ mix_seed(index)));
  constexpr int n = kSyntheticSize;
  RasterImage img(n, n);

  // Backdrop: bilinear blend of four random corner colours.
  double corner[4][3];
  for (auto& c : corner)
    for (double& v : c) v = rng.uniform_real(0, 255);
  for (int y = 0; y < n; ++y) {
    const double fy = (y + 0.5) / n;
    for (int x = 0; x < n; ++x) {
      const double fx = (x + 0.5) / n;
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - fx) * corner[0][c] + fx * corner[1][c];
        const double bottom = (1 - fx) * corner[2][c] + fx * corner[3][c];
        img.at(x, y, c) = static_cast<std::uint8_t>(std::lround((1 - fy) * top + fy * bottom));
      }
    }
  }

  const int shapes = static_cast<int>(rng.uniform_int(5, 10));
  for (int s = 0; s < shapes; ++s) {
    const bool ellipse = rng.uniform_int(0, 1) == 1;
    const int w = static_cast<int>(rng.uniform_int(n / 10, n / 2));
    const int h = static_cast<int>(rng.uniform_int(n / 10, n / 2));
    const int x0 = static_cast<int>(rng.uniform_int(-w / 4, n - 3 * w / 4));
    const int y0 = static_cast<int>(rng.uniform_int(-h / 4, n - 3 * h / 4));
    std::uint8_t colour[3];
    for (auto& v : colour) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    const double cx = x0 + w / 2.0;
    const double cy = y0 + h / 2.0;
    for (int y = std::max(0, y0); y < std::min(n, y0 + h); ++y) {
      for (int x = std::max(0, x0); x < std::min(n, x0 + w); ++x) {
        if (ellipse) {
          const double dx = (x + 0.5 - cx) / (w / 2.0);
          const double dy = (y + 0.5 - cy) / (h / 2.0);
          if (dx * dx + dy * dy > 1.0) continue;
        }
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = colour[c];
      }
    }
  }
  return img;
}

Corpus gen_synthetic(std::size_t n, std::uint64_t seed, unsigned threads) {
  if (n < 1) throw InvalidArgument("gen_synthetic: n must be >= 1");
  Corpus corpus;
  corpus.ids.resize(n);
  corpus.images.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn%04zu", i);
    corpus.ids[i] = id;
    corpus.images[i] = synthetic_image(seed, i);
  });
  return corpus;
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

std::size_t CorpusManifest::count(Verdict label) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [label](const ManifestRow& r) { return r.label == label; }));
}

namespace {

constexpr std::string_view kManifestHeader = "query_id,file_path,label,origin_id";

void write_manifest_rows(const CorpusManifest& m, std::ostream& out, const std::filesystem::path& base) {
  out << kManifestHeader << '\n';
  for (const auto& r : m.rows) {
    std::filesystem::path p = r.file_path;
    if (!base.empty()) {
      const auto rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << csv::escape(r.query_id) << ',' << csv::escape(p.generic_string()) << ',' << to_string(r.label)
        << ',' << csv::escape(r.origin_id) << '\n';
  }
}

}  // namespace

void write_manifest(const CorpusManifest& m, std::ostream& out) {
  write_manifest_rows(m, out, {});
}

void save_manifest(const CorpusManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_manifest_rows(m, out, path.parent_path().lexically_normal());
  if (!out) throw IoError("write failed: " + path.string());
}

CorpusManifest read_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  CorpusManifest m;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fail = [line_no](const std::string& why) {
      return ParseError("manifest line " + std::to_string(line_no) + ": " + why);
    };
    if (line_no == 1) {
      if (line != kManifestHeader) throw fail("expected header '" + std::string(kManifestHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    if (!csv::split(line, fields)) throw fail("unterminated quote");
    if (fields.size() != 4) throw fail("expected 4 fields, got " + std::to_string(fields.size()));
    ManifestRow row;
    row.query_id = fields[0];
    row.file_path = fields[1];
    if (row.file_path.is_relative() && !base_dir.empty()) row.file_path = base_dir / row.file_path;
    if (fields[2] == "real") row.label = Verdict::real;
    else if (fields[2] == "fake") row.label = Verdict::fake;
    else throw fail("label must be real or fake");
    row.origin_id = fields[3];
    if (row.query_id.empty() || row.origin_id.empty()) throw fail("query_id and origin_id are required");
    m.rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ParseError("manifest is empty (missing header)");
  return m;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw MissingFile("missing manifest: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  return read_manifest(in, path.parent_path());
}

CorpusManifest write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CorpusManifest m;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto path = dir / (corpus.ids[i] + ".png");
    write_file(path, encode_png(corpus.images[i]));
    m.rows.push_back({corpus.ids[i], path, Verdict::real, corpus.ids[i]});
  }
  return m;
}

Corpus load_corpus(const CorpusManifest& manifest, unsigned threads) {
  Corpus corpus;
  corpus.ids.resize(manifest.rows.size());
  corpus.images.resize(manifest.rows.size());
  parallel_for(manifest.rows.size(), threads, [&](std::size_t i) {
    corpus.ids[i] = manifest.rows[i].query_id;
    corpus.images[i] = load_image(manifest.rows[i].file_path);
  });
  return corpus;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

std::vector<ExperimentQuery> build_experiment_queries(const Corpus& corpus, std::span<const ManipulationSpec> specs,
                                                      std::uint64_t seed, int query_quality, unsigned threads) {
  if (corpus.size() == 0) throw InvalidArgument("build_experiment: corpus is empty");
  for (const auto& s : specs) s.validate();

  std::vector<const ManipulationSpec*> benign;
  std::vector<const ManipulationSpec*> tampers;
  for (const auto& s : specs) {
    if (s.produces_fake()) tampers.push_back(&s);
    else if (s.kind != ManipulationKind::none) benign.push_back(&s);
  }

  // Suffix per tamper; repeated kinds are numbered.
  std::vector<std::string> suffix;
  for (std::size_t k = 0; k < tampers.size(); ++k) {
    const auto kind = tampers[k]->kind;
    const auto same = std::count_if(tampers.begin(), tampers.end(), [kind](auto* t) { return t->kind == kind; });
    std::string s(to_string(kind));
    if (same > 1) s += "_" + std::to_string(k);
    suffix.push_back(std::move(s));
  }

  const std::size_t per_ref = 1 + tampers.size();
  std::vector<ExperimentQuery> out(corpus.size() * per_ref);

  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    RasterImage base = corpus.images[i];
    for (const auto* s : benign) base = apply_manipulation(base, *s);

    const auto finish = [&](std::size_t slot, std::string qid, Verdict label, const RasterImage& img) {
      auto& q = out[i * per_ref + slot];
      q.query_id = std::move(qid);
      q.label = label;
      q.origin_id = corpus.ids[i];
      q.encoded = encode_jpeg(img, query_quality);
      q.image = decode_image(q.encoded, ImageFormat::jpeg);
    };

    finish(0, corpus.ids[i] + "_real", Verdict::real, base);

    for (std::size_t k = 0; k < tampers.size(); ++k) {
      ManipulationSpec item = *tampers[k];
      item.seed = mix_seed(tampers[k]->seed ^ mix_seed(seed + 0x100000001B3ULL * (i + 1) + k));
      const RasterImage* donor = nullptr;
      if (item.kind == ManipulationKind::splice) {
        std::size_t d = 0;
        if (item.donor_id) {
          d = corpus.find(*item.donor_id);
          if (d == corpus.size()) throw InvalidArgument("splice: unknown donor id " + *item.donor_id);
        } else if (corpus.size() == 1) {
          d = i;
        } else {
          SeededRng pick(mix_seed(item.seed));
          d = static_cast<std::size_t>(pick.uniform_int(0, static_cast<std::int64_t>(corpus.size()) - 2));
          if (d >= i) ++d;
        }
        donor = &corpus.images[d];
      }
      finish(1 + k, corpus.ids[i] + "_" + suffix[k], Verdict::fake, apply_manipulation(base, item, donor));
    }
  });
  return out;
}

CorpusManifest build_experiment(const Corpus& corpus, std::span<const ManipulationSpec> specs, std::uint64_t seed,
                                const std::filesystem::path& out_dir, int query_quality, unsigned threads) {
  const auto queries = build_experiment_queries(corpus, specs, seed, query_quality, threads);
  std::filesystem::create_directories(out_dir);
  CorpusManifest m;
  m.rows.reserve(queries.size());
  for (const auto& q : queries) {
    const auto path = out_dir / (q.query_id + ".jpg");
    write_file(path, q.encoded);
    m.rows.push_back({q.query_id, path, q.label, q.origin_id});
  }
  return m;
}

}  // namespace rh
