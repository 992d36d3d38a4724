#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rh/metrics.hpp"
#include "test_util.hpp"

using namespace rh;

namespace {

std::vector<Judgment> judged(const std::vector<Verdict>& verdicts) {
  std::vector<Judgment> out;
  for (auto v : verdicts) out.push_back({"q", 0, "r", v, 3});
  return out;
}

}  // namespace

TEST_SUITE("accuracy_fake") {
  TEST_CASE("all fakes caught") {
    const std::vector<Verdict> labels(10, Verdict::fake);
    CHECK(accuracy_fake(judged(labels), labels) == 1.0);
  }

  TEST_CASE("42 of 48 caught is 0.875") {
    std::vector<Verdict> labels(48, Verdict::fake);
    std::vector<Verdict> verdicts(48, Verdict::fake);
    for (int i = 0; i < 6; ++i) verdicts[static_cast<std::size_t>(i * 7)] = Verdict::real;
    // real-labelled queries never count
    labels.push_back(Verdict::real);
    verdicts.push_back(Verdict::fake);
    CHECK(accuracy_fake(judged(verdicts), labels) == 0.875);
  }

  TEST_CASE("none caught") {
    const std::vector<Verdict> labels(5, Verdict::fake);
    CHECK(accuracy_fake(judged(std::vector<Verdict>(5, Verdict::real)), labels) == 0.0);
  }

  TEST_CASE("no fake queries") {
    const std::vector<Verdict> labels(3, Verdict::real);
    CHECK_THROWS_AS(accuracy_fake(judged(labels), labels), NoFakeQueries);
  }
}

TEST_SUITE("average_precision") {
  TEST_CASE("perfect separation") {
    const std::vector<double> s{10, 9, 1, 0};
    const std::vector<Verdict> l{Verdict::fake, Verdict::fake, Verdict::real, Verdict::real};
    CHECK(average_precision(s, l) == 1.0);
  }

  TEST_CASE("single positive ranked second") {
    const std::vector<double> s{1, 9};
    const std::vector<Verdict> l{Verdict::fake, Verdict::real};
    CHECK(average_precision(s, l) == 0.5);
  }

  TEST_CASE("a tie group is scored after the whole group") {
    const std::vector<double> s{5, 5, 5, 0};
    const std::vector<Verdict> l{Verdict::fake, Verdict::real, Verdict::real, Verdict::real};
    CHECK(average_precision(s, l) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  }

  TEST_CASE("matches the definition-level oracle on random instances with ties") {
    SeededRng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(2, 12));
      std::vector<double> s(n);
      std::vector<Verdict> l(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.uniform_int(0, 5));
        l[i] = rng.uniform_int(0, 1) ? Verdict::fake : Verdict::real;
      }
      l[0] = Verdict::fake;
      l[1] = Verdict::real;
      CHECK(std::abs(average_precision(s, l) - oracle::average_precision(s, l)) <= 1e-12);
    }
  }

  TEST_CASE("invariant under strictly monotone score transforms") {
    SeededRng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> s(10);
      std::vector<Verdict> l(10);
      for (std::size_t i = 0; i < 10; ++i) {
        s[i] = static_cast<double>(rng.uniform_int(0, 120));
        l[i] = i % 3 == 0 ? Verdict::fake : Verdict::real;
      }
      std::vector<double> t;
      for (double x : s) t.push_back(std::exp(x / 10) * 3 + 1);
      CHECK(average_precision(s, l) == average_precision(t, l));
    }
  }

  TEST_CASE("degenerate labels") {
    const std::vector<double> s{1, 2};
    CHECK_THROWS_AS(average_precision(s, std::vector<Verdict>(2, Verdict::fake)), DegenerateLabels);
    CHECK_THROWS_AS(average_precision(s, std::vector<Verdict>(2, Verdict::real)), DegenerateLabels);
  }
}

TEST_SUITE("far_frr_sweep") {
  TEST_CASE("boundaries") {
    const std::vector<int> reals{0, 1, 2};
    const std::vector<int> fakes{10, 20, 120};
    const auto curve = far_frr_sweep(reals, fakes);
    REQUIRE(curve.size() == 122);
    CHECK(curve.front() == CurvePoint{0, 0.0, 1.0});
    CHECK(curve.back() == CurvePoint{121, 1.0, 0.0});
  }

  TEST_CASE("matches direct counting and is monotone") {
    SeededRng rng(55);
    std::vector<int> reals(37);
    std::vector<int> fakes(23);
    for (auto& r : reals) r = static_cast<int>(rng.uniform_int(0, 20));
    for (auto& f : fakes) f = static_cast<int>(rng.uniform_int(3, 70));
    const auto curve = far_frr_sweep(reals, fakes);
    for (int d : {0, 1, 3, 5, 8, 13, 21, 34, 55, 121}) {
      const auto expected = oracle::far_frr_at(reals, fakes, d);
      CHECK(curve[static_cast<std::size_t>(d)].far == expected.far);
      CHECK(curve[static_cast<std::size_t>(d)].frr == expected.frr);
    }
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].far >= curve[i - 1].far);
      CHECK(curve[i].frr <= curve[i - 1].frr);
    }
  }

  TEST_CASE("empty input") {
    CHECK_THROWS_AS(far_frr_sweep(std::vector<int>{}, std::vector<int>{1}), EmptyInput);
    CHECK_THROWS_AS(far_frr_sweep(std::vector<int>{1}, std::vector<int>{}), EmptyInput);
  }
}

TEST_SUITE("eer_threshold") {
  TEST_CASE("separated sets pick the smallest zero-gap threshold") {
    const std::vector<int> reals{0, 0, 1, 2, 2};
    const std::vector<int> fakes{5, 7, 9, 40};
    const auto curve = far_frr_sweep(reals, fakes);
    for (int d = 3; d <= 5; ++d) CHECK(curve[static_cast<std::size_t>(d)].far == curve[static_cast<std::size_t>(d)].frr);
    CHECK(eer_threshold(curve) == 3);
  }

  TEST_CASE("identical distributions resolve to the smallest d") {
    const std::vector<int> same{4, 4, 4};
    const auto curve = far_frr_sweep(same, same);
    // FAR = 0 and FRR = 1 up to d = 4; FAR = 1, FRR = 0 after. |gap| = 1 everywhere.
    CHECK(eer_threshold(curve) == 0);
  }

  TEST_CASE("single real at 0 and single fake at 120") {
    const auto curve = far_frr_sweep(std::vector<int>{0}, std::vector<int>{120});
    CHECK(eer_threshold(curve) == 1);
  }
}

TEST_SUITE("evaluate_matches") {
  ReferenceDb make_db() {
    ReferenceDb db;
    db.add("a", Hash120{});
    db.add("b", ~Hash120{});
    return db;
  }

  TEST_CASE("explicit threshold is echoed and drives verdicts") {
    const ReferenceDb db = make_db();
    const std::vector<std::string> ids{"r1", "r2", "f1", "f2"};
    const std::vector<Verdict> labels{Verdict::real, Verdict::real, Verdict::fake, Verdict::fake};
    const std::vector<Match> matches{{0, 0}, {2, 1}, {3, 0}, {9, 1}};
    const EvalReport r = evaluate_matches(ids, labels, matches, db, 3);
    CHECK(r.threshold_used == 3);
    CHECK(r.calibration == Calibration::explicit_threshold);
    CHECK(r.acc_fake == 1.0);
    CHECK(r.ap == 1.0);
    CHECK(r.counts.n_qf == 2);
    CHECK(r.counts.n_tn == 2);
    CHECK(r.counts.n_real == 2);
    CHECK(r.judgments[1].nearest_id == "b");
    CHECK(r.eer_threshold == 3);

    const EvalReport all_real = evaluate_matches(ids, labels, matches, db, 121);
    CHECK(all_real.acc_fake == 0.0);
    CHECK(all_real.counts.n_real_accepted == 2);
  }

  TEST_CASE("EER calibration when no threshold is given") {
    const ReferenceDb db = make_db();
    const std::vector<std::string> ids{"r1", "r2", "f1"};
    const std::vector<Verdict> labels{Verdict::real, Verdict::real, Verdict::fake};
    const std::vector<Match> matches{{1, 0}, {2, 0}, {6, 0}};
    const EvalReport r = evaluate_matches(ids, labels, matches, db, std::nullopt);
    CHECK(r.calibration == Calibration::eer_pooled);
    CHECK(r.threshold_used == r.eer_threshold);
    CHECK(r.threshold_used == 3);
  }

  TEST_CASE("report json and curve csv") {
    const ReferenceDb db = make_db();
    const std::vector<std::string> ids{"r", "f"};
    const std::vector<Verdict> labels{Verdict::real, Verdict::fake};
    const std::vector<Match> matches{{0, 0}, {7, 0}};
    const EvalReport r = evaluate_matches(ids, labels, matches, db, 3);
    const auto j = report_to_json(r);
    for (const char* key : {"ap", "acc_fake", "eer_threshold", "counts", "curve", "threshold_used"})
      CHECK(j.contains(key));
    CHECK(j["threshold_used"] == 3);
    CHECK(j["counts"]["N_Qf"] == 1);
    CHECK(j["curve"].size() == 122);
    std::ostringstream csv;
    write_curve_csv(csv, r.far_frr_curve);
    CHECK(csv.str().rfind("threshold,far,frr\n0,0,1\n", 0) == 0);
  }

  TEST_CASE("no fakes") {
    const ReferenceDb db = make_db();
    const std::vector<std::string> ids{"r"};
    const std::vector<Verdict> labels{Verdict::real};
    const std::vector<Match> matches{{0, 0}};
    CHECK_THROWS_AS(evaluate_matches(ids, labels, matches, db, 3), NoFakeQueries);
  }
}

TEST_CASE("evaluate on files: lossless originals are accepted at distance 0") {
  const Corpus corpus = gen_synthetic(8, 21);
  testutil::TempDir dir("evaluate");
  CorpusManifest m = write_corpus(corpus, dir.path());
  ReferenceDb db;
  for (std::size_t i = 0; i < corpus.size(); ++i) enroll(db, corpus.ids[i], corpus.images[i]);
  // One unrelated image as the fake.
  const auto fake_path = dir / "unrelated.png";
  write_file(fake_path, encode_png(synthetic_image(999, 0)));
  m.rows.push_back({"unrelated", fake_path, Verdict::fake, "syn0000"});

  const EvalReport r = evaluate(m, db, 3, 2);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(r.judgments[i].min_distance == 0);
    CHECK(r.judgments[i].verdict == Verdict::real);
    CHECK(r.judgments[i].nearest_id == corpus.ids[i]);
  }
  CHECK(r.counts.n_real_accepted == corpus.size());

  m.rows.push_back({"gone", dir / "missing.png", Verdict::fake, "syn0000"});
  CHECK_THROWS_AS(evaluate(m, db, 3), MissingFile);
}
