#include "rh/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rh/codec.hpp"
#include "rh/forge.hpp"
#include "rh/matcher.hpp"
#include "rh/metrics.hpp"
#include "rh/parallel.hpp"
#include "rh/rng.hpp"

namespace rh {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string db;
  std::string output;
  std::string format = "json";

  unsigned worker_count() const {
    if (threads > 0) return threads;
    return std::max(1U, std::thread::hardware_concurrency());
  }
};

void add_threads(CLI::App* cmd, GlobalOptions& g) {
  cmd->add_option("--threads", g.threads, "Worker threads (0 = all cores)")->envname("RH_THREADS");
}

// Writes to --output when given, otherwise to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open for writing: " + path);
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("write failed");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

json config_json(const std::string& command, const GlobalOptions& g) {
  return {{"command", command}, {"seed", g.seed}, {"threads", g.worker_count()}, {"db", g.db},
          {"output", g.output},   {"format", g.format}};
}

// ---------------------------------------------------------------------------

struct HashArgs {
  std::vector<std::string> paths;
};

int cmd_hash(const HashArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  std::vector<std::optional<Hash120>> hashes(a.paths.size());
  std::vector<std::string> errors(a.paths.size());
  parallel_for(a.paths.size(), g.worker_count(), [&](std::size_t i) {
    try {
      hashes[i] = compute_hash(load_image(a.paths[i]));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  Sink sink(g.output, out);
  int rc = kExitOk;
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    if (hashes[i]) {
      sink.stream() << to_hex(*hashes[i]) << ' ' << a.paths[i] << '\n';
    } else {
      err << "error: " << a.paths[i] << ": " << errors[i] << '\n';
      rc = kExitError;
    }
  }
  sink.close();
  return rc;
}

// ---------------------------------------------------------------------------

struct EnrollArgs {
  std::string manifest;
  std::vector<std::string> paths;
};

int cmd_enroll(const EnrollArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream&) {
  if (g.db.empty()) throw InvalidArgument("--db is required");
  ReferenceDb db = fs::exists(g.db) ? load_db(g.db) : ReferenceDb{};

  std::vector<std::string> ids;
  std::vector<fs::path> files;
  if (!a.manifest.empty()) {
    for (const auto& row : load_manifest(a.manifest).rows) {
      ids.push_back(row.query_id);
      files.push_back(row.file_path);
    }
  }
  for (const auto& p : a.paths) {
    ids.push_back(fs::path(p).stem().string());
    files.emplace_back(p);
  }

  std::vector<Hash120> hashes(files.size());
  parallel_for(files.size(), g.worker_count(), [&](std::size_t i) { hashes[i] = compute_hash(load_image(files[i])); });
  const std::size_t before = db.size();
  for (std::size_t i = 0; i < ids.size(); ++i) db.add(ids[i], hashes[i]);
  save_db(db, g.db);
  out << "enrolled " << db.size() - before << " image(s); database " << g.db << " holds " << db.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct QueryArgs {
  int threshold = 3;
  std::vector<std::string> paths;
};

int cmd_query(const QueryArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (g.db.empty()) throw InvalidArgument("--db is required");
  const ReferenceDb db = load_db(g.db);
  if (db.empty()) throw EmptyDatabase("reference database " + g.db + " is empty");

  std::vector<Hash120> hashes(a.paths.size());
  parallel_for(a.paths.size(), g.worker_count(), [&](std::size_t i) { hashes[i] = compute_hash(load_image(a.paths[i])); });
  const auto matches = batch_min_distance(hashes, db, g.worker_count());

  std::vector<Judgment> judgments;
  bool any_fake = false;
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    const Verdict v = decide(matches[i].distance, a.threshold);
    any_fake = any_fake || v == Verdict::fake;
    judgments.push_back({a.paths[i], matches[i].distance, db.id(matches[i].index), v, a.threshold});
  }
  Sink sink(g.output, out);
  write_judgments_csv(sink.stream(), judgments);
  sink.close();
  if (any_fake) err << "fake image(s) detected at threshold " << a.threshold << '\n';
  return any_fake ? kExitFakeDetected : kExitOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::size_t count = 200;
  std::string out_dir;
};

int cmd_gen(const GenArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream&) {
  const Corpus corpus = gen_synthetic(a.count, g.seed, g.worker_count());
  const CorpusManifest m = write_corpus(corpus, a.out_dir);
  const fs::path manifest = fs::path(a.out_dir) / "manifest.csv";
  save_manifest(m, manifest);
  out << "wrote " << corpus.size() << " image(s) and " << manifest.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ForgeArgs {
  std::string corpus;
  std::vector<std::string> inputs;
  std::vector<std::string> kinds{"none"};
  std::optional<int> quality;
  std::optional<double> scale;
  double region_fraction = kDefaultRegionFraction;
  std::optional<std::string> donor;
  int query_quality = kQueryJpegQuality;
  std::string out_dir;
};

int cmd_forge(const ForgeArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream&) {
  Corpus corpus;
  if (!a.corpus.empty()) corpus = load_corpus(load_manifest(a.corpus), g.worker_count());
  for (const auto& p : a.inputs) {
    corpus.ids.push_back(fs::path(p).stem().string());
    corpus.images.push_back(load_image(p));
  }
  if (corpus.size() == 0) throw InvalidArgument("forge: no input images (use --corpus or list files)");

  std::vector<ManipulationSpec> specs;
  for (const auto& k : a.kinds) {
    ManipulationSpec s;
    s.kind = parse_manipulation_kind(k);
    s.seed = g.seed;
    switch (s.kind) {
      case ManipulationKind::none: break;
      case ManipulationKind::jpeg:
        if (!a.quality) throw InvalidArgument("--kind jpeg needs --quality");
        s.quality = a.quality;
        break;
      case ManipulationKind::resize:
        if (!a.scale) throw InvalidArgument("--kind resize needs --scale");
        s.scale = a.scale;
        break;
      case ManipulationKind::copy_move: s.region_fraction = a.region_fraction; break;
      case ManipulationKind::splice:
        s.region_fraction = a.region_fraction;
        s.donor_id = a.donor;
        break;
    }
    specs.push_back(std::move(s));
  }

  CorpusManifest m;
  try {
    m = build_experiment(corpus, specs, g.seed, a.out_dir, a.query_quality, g.worker_count());
  } catch (const InvalidScale& e) {
    throw InvalidScale(std::string("forge: ") + e.what());
  } catch (const DonorTooSmall& e) {
    throw DonorTooSmall(std::string("forge: ") + e.what());
  }
  const fs::path manifest = fs::path(a.out_dir) / "manifest.csv";
  save_manifest(m, manifest);
  out << "wrote " << m.count(Verdict::real) << " real and " << m.count(Verdict::fake) << " fake queries; manifest "
      << manifest.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::optional<int> threshold;
  std::string curve_csv;
};

int cmd_evaluate(const EvaluateArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (g.db.empty()) throw InvalidArgument("--db is required");
  const ReferenceDb db = load_db(g.db);
  const CorpusManifest manifest = load_manifest(a.manifest);
  const EvalReport report = evaluate(manifest, db, a.threshold, g.worker_count());

  err << "threshold " << report.threshold_used << " (" << to_string(report.calibration) << "), EER threshold "
      << report.eer_threshold << '\n';

  Sink sink(g.output, out);
  if (g.format == "csv") {
    write_curve_csv(sink.stream(), report.far_frr_curve);
  } else {
    json j = report_to_json(report);
    json cfg = config_json("evaluate", g);
    cfg["manifest"] = a.manifest;
    cfg["threshold"] = a.threshold ? json(*a.threshold) : json(nullptr);
    j["config"] = std::move(cfg);
    sink.stream() << j.dump(2) << '\n';
  }
  sink.close();
  if (!a.curve_csv.empty()) {
    std::ofstream curve(a.curve_csv, std::ios::binary | std::ios::trunc);
    if (!curve) throw IoError("cannot open for writing: " + a.curve_csv);
    write_curve_csv(curve, report.far_frr_curve);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::size_t db_size = 1000;
  std::size_t queries = 10;
};

int cmd_bench(const BenchArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (a.db_size < 1 || a.queries < 1) throw InvalidArgument("--db-size and --queries must be >= 1");
  SeededRng rng(g.seed);
  ReferenceDb db;
  db.reserve(a.db_size);
  for (std::size_t i = 0; i < a.db_size; ++i) db.add("r" + std::to_string(i), Hash120(rng.next(), rng.next()));
  std::vector<Hash120> queries;
  queries.reserve(a.queries);
  for (std::size_t i = 0; i < a.queries; ++i) queries.emplace_back(rng.next(), rng.next());

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  std::vector<Match> scalar;
  scalar.reserve(queries.size());
  for (const auto& q : queries) scalar.push_back(min_distance(q, db));
  const double scalar_s = std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  const auto packed = batch_min_distance(queries, db, g.worker_count());
  const double packed_s = std::chrono::duration<double>(clock::now() - t0).count();

  const bool equal = scalar == packed;
  std::uint64_t checksum = 0;
  for (const auto& m : packed) checksum = checksum * 131 + static_cast<std::uint64_t>(m.distance) * 1000003 + m.index;

  const double comparisons = static_cast<double>(a.db_size) * static_cast<double>(a.queries);
  json j = {
      {"db_size", a.db_size},
      {"queries", a.queries},
      {"scalar_seconds", scalar_s},
      {"packed_seconds", packed_s},
      {"packed_comparisons_per_second", packed_s > 0 ? comparisons / packed_s : 0.0},
      {"results_equal", equal},
      {"result_checksum", checksum},
      {"config", config_json("bench", g)},
  };
  Sink sink(g.output, out);
  sink.stream() << j.dump(2) << '\n';
  sink.close();
  if (!equal) {
    err << "error: packed and scalar results differ\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fake-image detection by robust hashing"};
  app.require_subcommand(1);
  GlobalOptions g;

  auto* hash = app.add_subcommand("hash", "Print `<hex30> <path>` for each image");
  HashArgs hash_args;
  hash->add_option("paths", hash_args.paths, "Images")->required();
  hash->add_option("--output", g.output, "Write to file instead of stdout");
  add_threads(hash, g);

  auto* enroll_cmd = app.add_subcommand("enroll", "Hash reference images into a database");
  EnrollArgs enroll_args;
  enroll_cmd->add_option("--db", g.db, "Database file (created if missing)")->required();
  enroll_cmd->add_option("--manifest", enroll_args.manifest, "Manifest of reference images (ids = query_id)");
  enroll_cmd->add_option("paths", enroll_args.paths, "Reference images (ids = file stem)");
  add_threads(enroll_cmd, g);

  auto* query = app.add_subcommand("query", "Judge query images against a database");
  QueryArgs query_args;
  query->add_option("--db", g.db, "Database file")->required();
  query->add_option("--threshold,-d", query_args.threshold, "Threshold d: distance < d is real")
      ->check(CLI::Range(0, kMaxThreshold));
  query->add_option("--output", g.output, "Write CSV to file instead of stdout");
  query->add_option("paths", query_args.paths, "Query images")->required();
  add_threads(query, g);

  auto* gen = app.add_subcommand("gen", "Generate a seeded synthetic reference corpus");
  GenArgs gen_args;
  gen->add_option("--count,-n", gen_args.count, "Number of images")->check(CLI::PositiveNumber);
  gen->add_option("--seed", g.seed, "Corpus seed");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  add_threads(gen, g);

  auto* forge = app.add_subcommand("forge", "Write JPEG query images (real + manipulated) and a manifest");
  ForgeArgs forge_args;
  forge->add_option("--corpus", forge_args.corpus, "Manifest of reference images");
  forge->add_option("inputs", forge_args.inputs, "Reference images");
  forge->add_option("--kind", forge_args.kinds, "none|jpeg|resize|copy_move|splice (repeatable)");
  forge->add_option("--quality", forge_args.quality, "JPEG quality for --kind jpeg")->check(CLI::Range(1, 100));
  forge->add_option("--scale", forge_args.scale, "Scale factor for --kind resize");
  forge->add_option("--region-fraction", forge_args.region_fraction, "Tamper region side as a fraction of the image");
  forge->add_option("--donor", forge_args.donor, "Splice donor id (default: seeded pick from the corpus)");
  forge->add_option("--query-quality", forge_args.query_quality, "JPEG quality of every written query")
      ->check(CLI::Range(1, 100));
  forge->add_option("--seed", g.seed, "Manipulation seed");
  forge->add_option("--out", forge_args.out_dir, "Output directory")->required();
  add_threads(forge, g);

  auto* eval = app.add_subcommand("evaluate", "AP / Accuracy(fake) / EER report for a query manifest");
  EvaluateArgs eval_args;
  eval->add_option("--db", g.db, "Database file")->required();
  eval->add_option("--manifest", eval_args.manifest, "Query manifest")->required();
  eval->add_option("--threshold,-d", eval_args.threshold, "Fixed threshold (default: EER-calibrated)")
      ->check(CLI::Range(0, kMaxThreshold));
  eval->add_option("--output", g.output, "Write report to file instead of stdout");
  eval->add_option("--format", g.format, "json or csv (curve only)")->check(CLI::IsMember({"json", "csv"}));
  eval->add_option("--curve-csv", eval_args.curve_csv, "Also write the FAR/FRR curve as CSV");
  add_threads(eval, g);

  auto* bench = app.add_subcommand("bench", "Time scalar vs packed nearest-hash search on random hashes");
  BenchArgs bench_args;
  bench->add_option("--db-size", bench_args.db_size, "Reference count")->check(CLI::PositiveNumber);
  bench->add_option("--queries", bench_args.queries, "Query count")->check(CLI::PositiveNumber);
  bench->add_option("--seed", g.seed, "Hash generator seed");
  bench->add_option("--output", g.output, "Write report to file instead of stdout");
  add_threads(bench, g);

  std::vector<const char*> argv{"rh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*hash) return cmd_hash(hash_args, g, out, err);
    if (*enroll_cmd) return cmd_enroll(enroll_args, g, out, err);
    if (*query) return cmd_query(query_args, g, out, err);
    if (*gen) return cmd_gen(gen_args, g, out, err);
    if (*forge) return cmd_forge(forge_args, g, out, err);
    if (*eval) return cmd_evaluate(eval_args, g, out, err);
    if (*bench) return cmd_bench(bench_args, g, out, err);
  } catch (const EmptyDatabase& e) {
    err << "error: " << e.what() << '\n';
    return kExitEmptyDatabase;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace rh
