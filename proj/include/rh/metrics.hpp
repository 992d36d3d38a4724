#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rh/forge.hpp"
#include "rh/matcher.hpp"

namespace rh {

/// Largest meaningful threshold: with d = 121 every distance (0..120) is
/// accepted as real.
inline constexpr int kMaxThreshold = Hash120::kBits + 1;

/// Fraction of fake-labelled queries judged fake. NoFakeQueries if none.
/// labels[i] belongs to judgments[i].
double accuracy_fake(std::span<const Judgment> judgments, std::span<const Verdict> labels);

/// Average precision with fake as the positive class, higher score = more
/// fake. Tied scores form one group; precision is taken after the whole
/// group. DegenerateLabels unless both classes are present.
double average_precision(std::span<const double> scores, std::span<const Verdict> labels);

struct CurvePoint {
  int threshold = 0;
  double far = 0;  // fakes with distance < d
  double frr = 0;  // reals with distance >= d

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// One point per d in 0..121. EmptyInput if either side is empty.
std::vector<CurvePoint> far_frr_sweep(std::span<const int> real_distances,
                                      std::span<const int> fake_distances);

/// d minimizing |FAR - FRR|, smallest d on ties.
int eer_threshold(std::span<const CurvePoint> curve);

enum class Calibration { explicit_threshold, eer_pooled };

std::string_view to_string(Calibration c);

struct EvalCounts {
  std::size_t n_qf = 0;    // fake queries
  std::size_t n_tn = 0;    // fake queries judged fake
  std::size_t n_real = 0;  // real queries
  std::size_t n_real_accepted = 0;
};

struct EvalReport {
  double ap = 0;
  double acc_fake = 0;
  int eer_threshold = 0;
  int threshold_used = 0;
  Calibration calibration = Calibration::eer_pooled;
  std::vector<CurvePoint> far_frr_curve;
  EvalCounts counts;
  std::vector<Judgment> judgments;
  std::vector<Verdict> labels;
};

/// Evaluates precomputed judgments-to-be: one (query id, label, match) per
/// query. Uses `threshold` when given, else the EER threshold of the sweep.
EvalReport evaluate_matches(std::span<const std::string> query_ids,
                            std::span<const Verdict> labels, std::span<const Match> matches,
                            const ReferenceDb& db, std::optional<int> threshold);

/// Hashes every manifest file, searches the database without self-exclusion
/// and builds the report. MissingFile names the absent path.
EvalReport evaluate(const CorpusManifest& manifest, const ReferenceDb& db,
                    std::optional<int> threshold = std::nullopt, unsigned threads = 1);

/// {ap, acc_fake, eer_threshold, threshold_used, calibration, counts, curve}.
nlohmann::json report_to_json(const EvalReport& report);

/// `threshold,far,frr` rows.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace rh
