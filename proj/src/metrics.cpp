#include "rh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rh/codec.hpp"
#include "rh/parallel.hpp"

namespace rh {

double accuracy_fake(std::span<const Judgment> judgments, std::span<const Verdict> labels) {
  if (judgments.size() != labels.size()) throw InvalidArgument("accuracy_fake: size mismatch");
  std::size_t n_qf = 0;
  std::size_t n_tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != Verdict::fake) continue;
    ++n_qf;
    if (judgments[i].verdict == Verdict::fake) ++n_tn;
  }
  if (n_qf == 0) throw NoFakeQueries("no fake-labelled queries");
  return static_cast<double>(n_tn) / static_cast<double>(n_qf);
}

double average_precision(std::span<const double> scores, std::span<const Verdict> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("average_precision: size mismatch");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Verdict::fake));
  if (positives == 0 || positives == labels.size())
    throw DegenerateLabels("average_precision needs both fake and real queries");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0;
  std::size_t seen = 0;
  std::size_t hits = 0;
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    std::size_t group_hits = 0;
    while (end < order.size() && scores[order[end]] == scores[order[g]]) {
      if (labels[order[end]] == Verdict::fake) ++group_hits;
      ++end;
    }
    seen += end - g;
    hits += group_hits;
    ap += static_cast<double>(group_hits) * (static_cast<double>(hits) / static_cast<double>(seen));
    g = end;
  }
  return ap / static_cast<double>(positives);
}

std::vector<CurvePoint> far_frr_sweep(std::span<const int> real_distances, std::span<const int> fake_distances) {
  if (real_distances.empty() || fake_distances.empty())
    throw EmptyInput("far_frr_sweep needs real and fake distances");
  // Histograms; distances above 120 cannot occur but are clamped into the
  // last bucket rather than dropped.
  std::vector<std::size_t> real_hist(kMaxThreshold + 1, 0);
  std::vector<std::size_t> fake_hist(kMaxThreshold + 1, 0);
  const auto bucket = [](int d) { return static_cast<std::size_t>(std::clamp(d, 0, kMaxThreshold)); };
  for (int d : real_distances) ++real_hist[bucket(d)];
  for (int d : fake_distances) ++fake_hist[bucket(d)];

  std::vector<CurvePoint> curve;
  curve.reserve(kMaxThreshold + 1);
  std::size_t real_below = 0;  // reals with distance < d
  std::size_t fake_below = 0;
  const auto n_real = static_cast<double>(real_distances.size());
  const auto n_fake = static_cast<double>(fake_distances.size());
  for (int d = 0; d <= kMaxThreshold; ++d) {
    curve.push_back({d, static_cast<double>(fake_below) / n_fake,
                     static_cast<double>(real_distances.size() - real_below) / n_real});
    real_below += real_hist[static_cast<std::size_t>(d)];
    fake_below += fake_hist[static_cast<std::size_t>(d)];
  }
  return curve;
}

int eer_threshold(std::span<const CurvePoint> curve) {
  if (curve.empty()) throw EmptyInput("eer_threshold: empty curve");
  const CurvePoint* best = &curve.front();
  for (const auto& p : curve) {
    const double gap = std::abs(p.far - p.frr);
    const double best_gap = std::abs(best->far - best->frr);
    if (gap < best_gap || (gap == best_gap && p.threshold < best->threshold)) best = &p;
  }
  return best->threshold;
}

std::string_view to_string(Calibration c) {
  return c == Calibration::explicit_threshold ? "explicit" : "eer_pooled";
}

EvalReport evaluate_matches(std::span<const std::string> query_ids, std::span<const Verdict> labels,
                            std::span<const Match> matches, const ReferenceDb& db, std::optional<int> threshold) {
  if (query_ids.size() != labels.size() || labels.size() != matches.size())
    throw InvalidArgument("evaluate: size mismatch");
  if (threshold && (*threshold < 0 || *threshold > kMaxThreshold))
    throw InvalidArgument("threshold must be in 0..121");

  EvalReport r;
  std::vector<int> real_d;
  std::vector<int> fake_d;
  std::vector<double> scores;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == Verdict::fake ? fake_d : real_d).push_back(matches[i].distance);
    scores.push_back(matches[i].distance);
  }
  if (fake_d.empty()) throw NoFakeQueries("manifest has no fake queries");
  if (real_d.empty()) throw DegenerateLabels("manifest has no real queries");

  r.far_frr_curve = far_frr_sweep(real_d, fake_d);
  r.eer_threshold = eer_threshold(r.far_frr_curve);
  r.calibration = threshold ? Calibration::explicit_threshold : Calibration::eer_pooled;
  r.threshold_used = threshold.value_or(r.eer_threshold);

  r.labels.assign(labels.begin(), labels.end());
  r.judgments.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int d = matches[i].distance;
    r.judgments.push_back({query_ids[i], d, db.id(matches[i].index), decide(d, r.threshold_used), r.threshold_used});
  }

  r.counts.n_qf = fake_d.size();
  r.counts.n_real = real_d.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Verdict::fake && r.judgments[i].verdict == Verdict::fake) ++r.counts.n_tn;
    if (labels[i] == Verdict::real && r.judgments[i].verdict == Verdict::real) ++r.counts.n_real_accepted;
  }
  r.acc_fake = accuracy_fake(r.judgments, r.labels);
  r.ap = average_precision(scores, labels);
  return r;
}

EvalReport evaluate(const CorpusManifest& manifest, const ReferenceDb& db, std::optional<int> threshold,
                    unsigned threads) {
  if (db.empty()) throw EmptyDatabase("reference database is empty");
  const std::size_t n = manifest.rows.size();
  std::vector<Hash120> hashes(n);
  parallel_for(n, threads, [&](std::size_t i) { hashes[i] = compute_hash(load_image(manifest.rows[i].file_path)); });

  const auto matches = batch_min_distance(hashes, db, threads);
  std::vector<std::string> ids;
  std::vector<Verdict> labels;
  ids.reserve(n);
  labels.reserve(n);
  for (const auto& row : manifest.rows) {
    ids.push_back(row.query_id);
    labels.push_back(row.label);
  }
  return evaluate_matches(ids, labels, matches, db, threshold);
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.far_frr_curve) curve.push_back({{"d", p.threshold}, {"far", p.far}, {"frr", p.frr}});
  return {
      {"ap", r.ap},
      {"acc_fake", r.acc_fake},
      {"eer_threshold", r.eer_threshold},
      {"threshold_used", r.threshold_used},
      {"calibration", to_string(r.calibration)},
      {"counts",
       {{"N_Qf", r.counts.n_qf},
        {"N_tn", r.counts.n_tn},
        {"N_real", r.counts.n_real},
        {"N_real_accepted", r.counts.n_real_accepted}}},
      {"curve", std::move(curve)},
  };
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "threshold,far,frr\n";
  for (const auto& p : curve) out << p.threshold << ',' << p.far << ',' << p.frr << '\n';
}

}  // namespace rh
