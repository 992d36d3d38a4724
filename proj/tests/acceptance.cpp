// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance <fixture_dir> [bench_report.json]

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "rh/cli.hpp"
#include "rh/forge.hpp"
#include "rh/matcher.hpp"
#include "rh/metrics.hpp"
#include "rh/robust_hash.hpp"
#include "test_util.hpp"

using namespace rh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Hash120 flip_first(const Hash120& h, int n) {
  std::vector<std::uint8_t> mask(Hash120::kBits, 0);
  for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = 1;
  return h ^ Hash120::from_bits(mask);
}

std::string fixture_dir;
std::string bench_report_path;

// Shared by criteria 6 and 7.
const Corpus& corpus200() {
  static const Corpus c = gen_synthetic(200, 1);
  return c;
}

Outcome c1_hamming_oracle() {
  const auto t0 = clock_type::now();
  SeededRng rng(1001);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const Hash120 u = testutil::random_hash(rng);
    const Hash120 q = testutil::random_hash(rng);
    mismatches += hamming(u, q) != oracle::hamming_bitloop(u, q);
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 1.0, fmt("%d mismatches / 10000 pairs, %.3f s", mismatches, s)};
}

Outcome c2_judge_semantics() {
  SeededRng rng(1002);
  int wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const int dist = static_cast<int>(rng.uniform_int(0, 120));
    const int d = static_cast<int>(rng.uniform_int(0, 121));
    const Hash120 q = testutil::random_hash(rng);
    ReferenceDb db;
    db.add("ref", flip_first(q, dist));
    const Judgment j = judge(q, db, d);
    const bool expect_fake = dist >= d;
    wrong += j.min_distance != dist || (j.verdict == Verdict::fake) != expect_fake;
  }
  return {wrong == 0, fmt("%d wrong of 1000", wrong)};
}

Outcome c3_accuracy_fake() {
  auto judgments_for = [](int caught, int missed, int reals) {
    std::vector<Judgment> js;
    std::vector<Verdict> labels;
    for (int i = 0; i < caught; ++i) js.push_back({"f", 9, "r", Verdict::fake, 3}), labels.push_back(Verdict::fake);
    for (int i = 0; i < missed; ++i) js.push_back({"f", 1, "r", Verdict::real, 3}), labels.push_back(Verdict::fake);
    for (int i = 0; i < reals; ++i) js.push_back({"r", 0, "r", Verdict::fake, 3}), labels.push_back(Verdict::real);
    return std::pair{js, labels};
  };
  struct Case { int caught, missed, reals; };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{42, 6, 10}, Case{1, 0, 0}, Case{0, 5, 3}, Case{7, 13, 2}, Case{48, 0, 48}}) {
    const auto [js, labels] = judgments_for(c.caught, c.missed, c.reals);
    const double got = accuracy_fake(js, labels);
    const double expected = static_cast<double>(c.caught) / (c.caught + c.missed);
    ok = ok && got == expected;
    if (c.caught == 42) {
      ok = ok && got == 0.875;
      detail = fmt("42/48 -> %.4f", got);
    }
  }
  return {ok, detail + ", 5 constructed sets exact"};
}

Outcome c4_average_precision() {
  const auto t0 = clock_type::now();
  SeededRng rng(1004);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(2, 12));
    std::vector<double> s(n);
    std::vector<Verdict> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.uniform_int(0, 4));  // few values, many ties
      l[i] = rng.uniform_int(0, 1) ? Verdict::fake : Verdict::real;
    }
    // both classes present, at random positions
    const auto f = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    const auto r = (f + 1 + static_cast<std::size_t>(rng.uniform_int(0, n - 2))) % n;
    l[f] = Verdict::fake;
    l[r] = Verdict::real;
    worst = std::max(worst, std::abs(average_precision(s, l) - oracle::average_precision(s, l)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0, fmt("max |delta| = %.3g over 50 instances, %.3f s", worst, secs)};
}

Outcome c5_eer() {
  const std::vector<int> reals{0, 0, 1, 1, 2, 2, 2};
  const std::vector<int> fakes{5, 6, 9, 17, 40, 63};
  const int d = eer_threshold(far_frr_sweep(reals, fakes));
  return {d == 3, fmt("eer_threshold = %d", d)};
}

Outcome c6_robustness() {
  const auto t0 = clock_type::now();
  const Corpus& c = corpus200();
  std::size_t within = 0;
  int worst = 0;
  for (const auto& img : c.images) {
    const int d = hamming(compute_hash(img), compute_hash(jpeg_recompress(img, 80)));
    within += d <= 4;
    worst = std::max(worst, d);
  }
  const double frac = static_cast<double>(within) / static_cast<double>(c.size());
  const double s = seconds_since(t0);
  return {frac >= 0.95 && s < 120, fmt("%.1f%% within 4 bits (max %d), %.1f s", 100 * frac, worst, s)};
}

Outcome c7_discrimination() {
  const auto t0 = clock_type::now();
  const Corpus& c = corpus200();
  std::vector<Hash120> h;
  for (const auto& img : c.images) h.push_back(compute_hash(img));
  double sum = 0;
  std::size_t pairs = 0;
  std::size_t close = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      const int d = hamming(h[i], h[j]);
      sum += d;
      close += d < 10;
      ++pairs;
    }
  const double mean = sum / static_cast<double>(pairs);
  const double close_frac = static_cast<double>(close) / static_cast<double>(pairs);
  const double s = seconds_since(t0);
  return {mean >= 45 && mean <= 75 && close_frac < 0.01 && s < 120,
          fmt("mean %.2f over %zu pairs, %.2f%% below 10, %.1f s", mean, pairs, 100 * close_frac, s)};
}

Outcome c8_desk_experiment() {
  const auto t0 = clock_type::now();
  const Corpus refs = gen_synthetic(100, 8);
  ReferenceDb db;
  for (std::size_t i = 0; i < refs.size(); ++i) enroll(db, refs.ids[i], refs.images[i]);

  bool ok = true;
  std::string detail;
  for (const auto& spec : {ManipulationSpec::copy_move(81), ManipulationSpec::splice(82)}) {
    const std::vector<ManipulationSpec> specs{spec};
    const auto qs = build_experiment_queries(refs, specs, 800);
    std::vector<std::string> ids;
    std::vector<Verdict> labels;
    std::vector<Hash120> hashes;
    for (const auto& q : qs) {
      ids.push_back(q.query_id);
      labels.push_back(q.label);
      hashes.push_back(compute_hash(q.image));
    }
    const auto matches = batch_min_distance(hashes, db);
    const EvalReport r = evaluate_matches(ids, labels, matches, db, std::nullopt);
    ok = ok && r.acc_fake >= 0.90 && r.ap >= 0.95;
    detail += fmt("%s: AP %.4f acc_fake %.4f d=%d; ", std::string(to_string(spec.kind)).c_str(), r.ap, r.acc_fake,
                  r.threshold_used);
  }
  const double s = seconds_since(t0);
  ok = ok && s < 300;
  return {ok, detail + fmt("%.1f s", s)};
}

Outcome c9_batch_equivalence() {
  const auto t0 = clock_type::now();
  SeededRng rng(1009);
  ReferenceDb db;
  db.reserve(100000);
  for (std::size_t i = 0; i < 100000; ++i) db.add("r" + std::to_string(i), testutil::random_hash(rng));
  std::vector<Hash120> qs;
  for (int i = 0; i < 1000; ++i)
    qs.push_back(i % 10 == 0 ? flip_first(db.hash(static_cast<std::size_t>(i) * 97), i % 5) : testutil::random_hash(rng));
  const auto batch = batch_min_distance(qs, db, 1);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) diff += !(batch[i] == min_distance(qs[i], db));
  const double s = seconds_since(t0);
  return {diff == 0 && s < 60, fmt("%zu differences over 1000 x 100000, %.1f s", diff, s)};
}

Outcome c10_performance() {
  SeededRng rng(1010);
  ReferenceDb db;
  db.reserve(1000000);
  for (std::size_t i = 0; i < 1000000; ++i) db.add("r" + std::to_string(i), testutil::random_hash(rng));
  std::vector<Hash120> qs;
  for (int i = 0; i < 1000; ++i) qs.push_back(testutil::random_hash(rng));
  const auto t0 = clock_type::now();
  const auto out = batch_min_distance(qs, db, 1);
  const double s = seconds_since(t0);
  if (!bench_report_path.empty()) {
    const nlohmann::json j = {{"db_size", 1000000}, {"queries", 1000},     {"threads", 1},
                              {"packed_seconds", s}, {"results", out.size()}};
    std::ofstream(bench_report_path) << j.dump(2) << '\n';
  }
  return {s < 5.0 && out.size() == 1000, fmt("packed scan %.3f s single-threaded", s)};
}

Outcome c11_determinism() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(fixture_dir))
    if (e.path().extension() == ".png" || e.path().extension() == ".jpg") files.push_back(e.path().filename());
  std::sort(files.begin(), files.end());
  if (files.empty()) return {false, "no fixture images in " + fixture_dir};

  // Relative paths keep the output identical wherever the tree lives.
  const fs::path cwd = fs::current_path();
  fs::current_path(fixture_dir);
  std::vector<std::string> args{"hash"};
  for (const auto& f : files) args.push_back(f.string());
  std::string runs[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out;
    std::ostringstream err;
    codes[i] = run_cli(args, out, err);
    runs[i] = out.str();
  }
  std::ifstream expected_in("expected_hashes.txt", std::ios::binary);
  std::ostringstream expected;
  expected << expected_in.rdbuf();
  fs::current_path(cwd);

  const bool identical = runs[0] == runs[1];
  const bool matches_golden = runs[0] == expected.str();
  return {codes[0] == 0 && codes[1] == 0 && identical && matches_golden,
          fmt("%zu files, runs identical: %s, matches recorded output: %s", files.size(), identical ? "yes" : "no",
              matches_golden ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  fixture_dir = argc > 1 ? argv[1] : "tests/fixtures";
  bench_report_path = argc > 2 ? argv[2] : "";

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hamming equals bit-loop oracle", c1_hamming_oracle},
      {"judge is fake iff min_distance >= d", c2_judge_semantics},
      {"accuracy_fake equals hand counts", c3_accuracy_fake},
      {"average_precision equals definition oracle", c4_average_precision},
      {"EER threshold on separated sets", c5_eer},
      {"hash robust to JPEG 80", c6_robustness},
      {"hash discriminates distinct images", c7_discrimination},
      {"copy-move / splice desk experiment", c8_desk_experiment},
      {"batch scan equals scalar scan", c9_batch_equivalence},
      {"1000 x 1000000 scan under 5 s", c10_performance},
      {"hash command is deterministic", c11_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << "  (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
