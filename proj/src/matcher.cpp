#include "rh/matcher.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "rh/parallel.hpp"

namespace rh {

void ReferenceDb::add(std::string id, const Hash120& hash) {
  if (id.empty()) throw InvalidArgument("reference id must not be empty");
  if (index_.contains(id)) throw DuplicateId("duplicate reference id: " + id);
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  hi_.push_back(hash.hi());
  lo_.push_back(hash.lo());
}

bool ReferenceDb::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

void ReferenceDb::reserve(std::size_t n) {
  ids_.reserve(n);
  hi_.reserve(n);
  lo_.reserve(n);
  index_.reserve(n);
}

Match min_distance(const Hash120& q, const ReferenceDb& db, const MinDistanceOptions& opts) {
  Match best{std::numeric_limits<int>::max(), 0};
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (opts.exclude_id && db.id(i) == *opts.exclude_id) continue;
    const Hash120 u = db.hash(i);
    if (opts.exclude_identical && u == q) continue;
    const int d = hamming(u, q);
    if (d < best.distance) best = {d, i};
  }
  if (best.distance == std::numeric_limits<int>::max())
    throw EmptyDatabase("reference database is empty");
  return best;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::real ? "real" : "fake";
}

Judgment judge(const Hash120& q, const ReferenceDb& db, int d, std::string query_id) {
  if (d < 0 || d > Hash120::kBits + 1) throw InvalidArgument("threshold must be in 0..121");
  const Match m = min_distance(q, db);
  return {std::move(query_id), m.distance, db.id(m.index), decide(m.distance, d), d};
}

void enroll(ReferenceDb& db, std::string id, const RasterImage& img) {
  if (db.contains(id)) throw DuplicateId("duplicate reference id: " + id);
  db.add(std::move(id), compute_hash(img));
}

void write_db(const ReferenceDb& db, std::ostream& out) {
  for (std::size_t i = 0; i < db.size(); ++i) out << to_hex(db.hash(i)) << ' ' << db.id(i) << '\n';
}

void save_db(const ReferenceDb& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_db(db, out);
  if (!out) throw IoError("write failed: " + path.string());
}

ReferenceDb read_db(std::istream& in) {
  ReferenceDb db;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fail = [line_no](const std::string& why) {
      return ParseError("line " + std::to_string(line_no) + ": " + why);
    };
    const auto space = line.find(' ');
    if (space == std::string::npos) throw fail("expected '<hex30> <image-id>'");
    Hash120 h;
    try {
      h = parse_hex(std::string_view(line).substr(0, space));
    } catch (const ParseError& e) {
      throw fail(e.what());
    }
    std::string id = line.substr(space + 1);
    if (id.empty()) throw fail("missing image id");
    try {
      db.add(std::move(id), h);
    } catch (const DuplicateId& e) {
      throw fail(e.what());
    }
  }
  if (in.bad()) throw IoError("read failed");
  return db;
}

ReferenceDb load_db(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw MissingFile("missing database: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  ReferenceDb db;
  try {
    db = read_db(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  db.set_source_path(path);
  return db;
}

namespace {

// Entries per tile: 2 x 8 KiB of hash words, comfortably L1/L2 resident
// while every query of the chunk sweeps it.
constexpr std::size_t kTile = 1024;

void scan_chunk(std::span<const Hash120> queries, std::span<const std::uint64_t> hi,
                std::span<const std::uint64_t> lo, std::span<Match> out) {
  for (auto& m : out) m = {std::numeric_limits<int>::max(), 0};
  const std::size_t n = hi.size();
  for (std::size_t t0 = 0; t0 < n; t0 += kTile) {
    const std::size_t t1 = std::min(n, t0 + kTile);
    const std::uint64_t* __restrict h = hi.data();
    const std::uint64_t* __restrict l = lo.data();
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const std::uint64_t qh = queries[qi].hi();
      const std::uint64_t ql = queries[qi].lo();
      int best = out[qi].distance;
      std::size_t best_idx = out[qi].index;
      for (std::size_t j = t0; j < t1; ++j) {
        const int d = std::popcount(qh ^ h[j]) + std::popcount(ql ^ l[j]);
        if (d < best) {
          best = d;
          best_idx = j;
        }
      }
      out[qi] = {best, best_idx};
    }
  }
}

}  // namespace

std::vector<Match> batch_min_distance(std::span<const Hash120> queries, const ReferenceDb& db,
                                      unsigned threads) {
  if (db.empty()) throw EmptyDatabase("reference database is empty");
  std::vector<Match> out(queries.size());
  parallel_chunks(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    scan_chunk(queries.subspan(begin, end - begin), db.hi_words(), db.lo_words(),
               std::span<Match>(out).subspan(begin, end - begin));
  });
  return out;
}

void write_judgments_csv(std::ostream& out, std::span<const Judgment> judgments) {
  out << "query_id,min_distance,nearest_id,verdict,threshold\n";
  for (const auto& j : judgments) {
    out << csv::escape(j.query_id) << ',' << j.min_distance << ',' << csv::escape(j.nearest_id) << ','
        << to_string(j.verdict) << ',' << j.threshold_used << '\n';
  }
}

}  // namespace rh
