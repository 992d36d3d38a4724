#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rh/image.hpp"
#include "rh/robust_hash.hpp"

namespace rh {

/// Number of differing bit positions.
inline int hamming(const Hash120& u, const Hash120& q) {
  return std::popcount(u.hi() ^ q.hi()) + std::popcount(u.lo() ^ q.lo());
}

/// Enrolled reference hashes in enrollment order. Ids are unique. Hashes are
/// kept as two parallel word arrays so the batch scan streams them directly.
class ReferenceDb {
 public:
  ReferenceDb() = default;

  /// Appends an entry. DuplicateId if the id is already present.
  void add(std::string id, const Hash120& hash);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(std::string_view id) const;

  const std::string& id(std::size_t i) const { return ids_[i]; }
  Hash120 hash(std::size_t i) const { return {hi_[i], lo_[i]}; }

  std::span<const std::uint64_t> hi_words() const { return hi_; }
  std::span<const std::uint64_t> lo_words() const { return lo_; }

  const std::optional<std::filesystem::path>& source_path() const { return source_; }
  void set_source_path(std::filesystem::path p) { source_ = std::move(p); }

  void reserve(std::size_t n);

  /// Entry-wise equality (ids, hashes, order); source path is ignored.
  friend bool operator==(const ReferenceDb& a, const ReferenceDb& b) {
    return a.ids_ == b.ids_ && a.hi_ == b.hi_ && a.lo_ == b.lo_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::uint64_t> hi_;
  std::vector<std::uint64_t> lo_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::filesystem::path> source_;
};

struct Match {
  int distance = 0;
  std::size_t index = 0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MinDistanceOptions {
  /// Skip the entry with this id (leave-one-out evaluation).
  std::optional<std::string> exclude_id;
  /// Skip entries whose hash is bit-identical to the query.
  bool exclude_identical = false;
};

/// Smallest distance over the database; ties go to the earliest entry.
/// EmptyDatabase if nothing is left after exclusions.
Match min_distance(const Hash120& q, const ReferenceDb& db, const MinDistanceOptions& opts = {});

enum class Verdict { real, fake };

std::string_view to_string(Verdict v);

/// Threshold rule: real iff distance < d, so distance == d is fake.
constexpr Verdict decide(int min_distance, int d) {
  return min_distance < d ? Verdict::real : Verdict::fake;
}

struct Judgment {
  std::string query_id;
  int min_distance = 0;
  std::string nearest_id;
  Verdict verdict = Verdict::fake;
  int threshold_used = 0;
};

/// Minimum-distance search plus the threshold rule. d must be in 0..121.
Judgment judge(const Hash120& q, const ReferenceDb& db, int d, std::string query_id = {});

/// Appends (id, compute_hash(img)).
void enroll(ReferenceDb& db, std::string id, const RasterImage& img);

/// One `<hex30> <image-id>` line per entry, LF endings.
void save_db(const ReferenceDb& db, const std::filesystem::path& path);
void write_db(const ReferenceDb& db, std::ostream& out);

/// ParseError names the 1-based line number on malformed lines or repeated ids.
ReferenceDb load_db(const std::filesystem::path& path);
ReferenceDb read_db(std::istream& in);

/// Packed scan of many queries. Bit-exact with calling min_distance per
/// query. Work is split by query across `threads` workers.
std::vector<Match> batch_min_distance(std::span<const Hash120> queries, const ReferenceDb& db,
                                      unsigned threads = 1);

/// Header `query_id,min_distance,nearest_id,verdict,threshold`.
void write_judgments_csv(std::ostream& out, std::span<const Judgment> judgments);

}  // namespace rh
