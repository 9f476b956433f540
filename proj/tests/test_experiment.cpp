// Experiment layer: config round-trips, manifest parsing, the command
// pipeline (codebook -> featurize -> evaluate -> report), feature stores,
// synthetic curve checks, and rerun determinism.

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "motent/experiment.hpp"
#include "motent/rng.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace motent;

namespace {

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "motent-exp-tests";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write_file(const std::string& name, const std::string& content) const {
    const auto p = path(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << content;
  }

  // A small descriptor file: descriptors drawn around `blobs` cluster centers
  // in D dimensions, frames cycling over [1, frames].
  void write_stip(const std::string& name, std::uint64_t seed, int frames = 40, int count = 60,
                  int blobs = 3, int d = 6) const {
    Rng rng(seed);
    std::ostringstream out;
    out << "# synthetic descriptor fixture\n";
    out << "# point-type y x t sigma2 tau2 detector-confidence descriptor\n";
    for (int i = 0; i < count; ++i) {
      const int frame = 1 + static_cast<int>(rng.uniform_int(0, frames - 1));
      const int blob = static_cast<int>(rng.uniform_int(0, blobs - 1));
      out << (100.0 + i) << " " << (50.0 + i) << " " << frame << " 4 2 0.9";
      for (int j = 0; j < d; ++j) out << " " << (10.0 * blob + rng.gaussian(0.0, 0.05));
      out << "\n";
    }
    write_file(name, out.str());
  }

  // Accelerometer CSV: three noisy sine axes at `rate` Hz.
  void write_accel(const std::string& name, std::uint64_t seed, int rows = 120,
                   double rate = 50.0) const {
    Rng rng(seed);
    std::ostringstream out;
    out << "timestamp,x,y,z\n";
    char buf[128];
    for (int i = 0; i < rows; ++i) {
      const double t = static_cast<double>(i) / rate;
      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", t,
                    std::sin(2.0 * kPi * 3.0 * t) + 0.1 * rng.gaussian(),
                    std::cos(2.0 * kPi * 3.0 * t) + 0.1 * rng.gaussian(),
                    std::sin(2.0 * kPi * 5.0 * t) + 0.1 * rng.gaussian());
      out << buf;
    }
    write_file(name, out.str());
  }

  // Manifest with `n` trials. Every trial gets a video file; trials whose
  // index is in `no_accel` get no accelerometer entry.
  std::string write_corpus(int n = 4, const std::set<int>& no_accel = {}) {
    njson doc;
    doc["version"] = "motent-manifest-v1";
    doc["task"] = "suturing";
    njson trials = njson::array();
    njson experts = njson::array();
    const char* skills[] = {"beginner", "intermediate", "expert"};
    for (int i = 0; i < n; ++i) {
      const std::string id = "trial-" + std::to_string(i);
      write_stip("stips/" + id + ".stip", 100 + static_cast<std::uint64_t>(i));
      njson t;
      t["id"] = id;
      t["video"] = "stips/" + id + ".stip";
      if (no_accel.count(i) == 0) {
        write_accel("accel/" + id + "-a.csv", 200 + static_cast<std::uint64_t>(i));
        write_accel("accel/" + id + "-b.csv", 300 + static_cast<std::uint64_t>(i));
        t["accel"] = njson::array({"accel/" + id + "-a.csv", "accel/" + id + "-b.csv"});
      }
      const char* skill = skills[i % 3];
      t["labels"] = njson{{"overall_performance", skill}, {"respect_for_tissue", skill}};
      trials.push_back(std::move(t));
      if (i % 3 == 2) experts.push_back(id);
    }
    doc["trials"] = std::move(trials);
    doc["experts"] = std::move(experts);
    write_file("manifest.json", doc.dump(2));
    return path("manifest.json").string();
  }

  ExperimentConfig base_config() const {
    ExperimentConfig cfg;
    cfg.manifest = path("manifest.json").string();
    cfg.output_dir = path("out").string();
    cfg.k_grid = {2, 3};
    cfg.threads = 2;
    cfg.sffs_max_dim = 4;
    cfg.seed = 23;
    return cfg;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) { return read_text_file(p); }

// ---------------------------------------------------------------------------
// Config serialization.

TEST(ExperimentConfig, RoundTripsDefaults) {
  const ExperimentConfig cfg;
  const auto copy = ExperimentConfig::from_text(cfg.to_text());
  EXPECT_EQ(copy.entries(), cfg.entries());
}

TEST(ExperimentConfig, RoundTripsEveryField) {
  ExperimentConfig cfg;
  cfg.task = Task::KnotTying;
  cfg.modality = Modality::Accel;
  cfg.family = FamilyChoice::Smt;
  cfg.manifest = "some/manifest.json";
  cfg.output_dir = "runs/out";
  cfg.seed = 99;
  cfg.k_grid = {4, 8, 16};
  cfg.m = 2;
  cfg.tau = 3;
  cfg.radii = {0.05, 0.15, 0.35};
  cfg.xapen_radii = {0.1, 0.3};
  cfg.coeffs_per_dim = 7;
  cfg.smt_windows = 5;
  cfg.smt_levels = 4;
  cfg.cv = "kfold:5";
  cfg.cv_sweep = true;
  cfg.cv_seed = 1234;
  cfg.sffs = false;
  cfg.sffs_max_dim = 3;
  cfg.paper_protocol = true;
  cfg.metric = Metric::Chebyshev;
  cfg.threads = 6;
  cfg.synthetic = true;
  cfg.synthetic_per_class = 5;
  cfg.synthetic_dims = 2;
  cfg.synthetic_length = 256;
  cfg.snr_reps = 3;
  cfg.phase_reps = 4;
  cfg.probe_radius = 0.25;
  cfg.probe_horizon = 12;

  const auto copy = ExperimentConfig::from_text(cfg.to_text());
  EXPECT_EQ(copy.entries(), cfg.entries());
  EXPECT_EQ(copy.task, Task::KnotTying);
  EXPECT_EQ(copy.metric, Metric::Chebyshev);
  EXPECT_EQ(copy.k_grid, (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(copy.radii, cfg.radii);
  EXPECT_TRUE(copy.paper_protocol);
  EXPECT_TRUE(copy.cv_sweep);
}

TEST(ExperimentConfig, RoundTripsThroughAFile) {
  const auto dir = fs::temp_directory_path() / "motent-exp-cfg";
  fs::create_directories(dir);
  ExperimentConfig cfg;
  cfg.seed = 41;
  cfg.cv = "kfold:10";
  cfg.save(dir / "config.txt");
  const auto copy = ExperimentConfig::load(dir / "config.txt");
  EXPECT_EQ(copy.entries(), cfg.entries());
  fs::remove_all(dir);
}

TEST(ExperimentConfig, ParsesCommentsBlanksAndSpacing) {
  const auto cfg = ExperimentConfig::from_text(
      "# comment\n\n  seed=5\nm   =   2\r\n\ttau = 4\n# another\n");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.m, 2);
  EXPECT_EQ(cfg.tau, 4);
}

TEST(ExperimentConfig, LastDuplicateWins) {
  const auto cfg = ExperimentConfig::from_text("seed = 1\nseed = 9\n");
  EXPECT_EQ(cfg.seed, 9u);
}

TEST(ExperimentConfig, RejectsMalformedInput) {
  EXPECT_THROW(ExperimentConfig::from_text("no equals sign\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("not_a_key = 1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("m = two\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("sffs = yes\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("radii = 0.1,abc\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("modality = audio\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_text("family = wavelet\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.txt"), ConfigError);
}

TEST(ExperimentConfig, ValidateEnforcesGrids) {
  ExperimentConfig cfg;
  cfg.k_grid = {11};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.k_grid = {};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.cv = "kfold:3";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.cv = "weird";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.radii = {0.3, 0.2};  // not increasing
  EXPECT_THROW(cfg.validate(), ParamError);
  cfg = {};
  cfg.probe_radius = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.smt_levels = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.synthetic = true;
  cfg.synthetic_per_class = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  EXPECT_NO_THROW(cfg.validate());
  cfg.k_grid = {2, 9, 20};
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ExperimentConfig, OutputDirResolutionOrder) {
  ExperimentConfig cfg;
  cfg.output_dir = "explicit";
  EXPECT_EQ(cfg.resolved_output_dir(), fs::path("explicit"));

  cfg.output_dir.clear();
  ::setenv("MOTENT_OUTPUT_ROOT", "/tmp/motent-env-root", 1);
  EXPECT_EQ(cfg.resolved_output_dir(), fs::path("/tmp/motent-env-root"));
  ::unsetenv("MOTENT_OUTPUT_ROOT");
  EXPECT_EQ(cfg.resolved_output_dir(), fs::path("motent-out"));
}

// ---------------------------------------------------------------------------
// Manifest parsing.

TEST_F(ExperimentTest, ManifestParsesTrialsLabelsAndExperts) {
  write_file("m.json", R"({
    "version": "motent-manifest-v1",
    "task": "knot_tying",
    "experts": ["t1"],
    "trials": [
      {"id": "t1", "video": "v1.stip",
       "labels": {"overall_performance": "expert", "time_and_motion": "intermediate"}},
      {"id": "t2", "accel": "a.csv", "label": "beginner"},
      {"id": "t3", "video": "/abs/v3.stip", "accel": ["a1.csv", "a2.csv"]}
    ]
  })");
  const auto m = load_manifest(path("m.json"));
  EXPECT_EQ(m.task, Task::KnotTying);
  ASSERT_EQ(m.trials.size(), 3u);
  EXPECT_EQ(m.trials[0].labels.at(Criterion::OverallPerformance), SkillClass::Expert);
  EXPECT_EQ(m.trials[0].labels.at(Criterion::TimeAndMotion), SkillClass::Intermediate);
  EXPECT_EQ(m.trials[1].labels.at(Criterion::OverallPerformance), SkillClass::Beginner);
  EXPECT_EQ(m.trials[1].accel, std::vector<std::string>{"a.csv"});
  EXPECT_EQ(m.trials[2].accel.size(), 2u);
  EXPECT_EQ(m.expert_ids(), std::vector<std::string>{"t1"});
  // Relative paths resolve against the manifest directory; absolute pass through.
  EXPECT_EQ(m.resolve(m.trials[0].video), dir_ / "v1.stip");
  EXPECT_EQ(m.resolve(m.trials[2].video), fs::path("/abs/v3.stip"));
  EXPECT_THROW(m.find("nope"), DataError);
  EXPECT_EQ(m.find("t2").id, "t2");
}

TEST_F(ExperimentTest, ManifestDerivesExpertsFromLabels) {
  write_file("m.json", R"({
    "version": "motent-manifest-v1",
    "trials": [
      {"id": "a", "label": "expert"},
      {"id": "b", "label": "beginner"},
      {"id": "c", "label": "expert"}
    ]
  })");
  const auto m = load_manifest(path("m.json"));
  EXPECT_EQ(m.expert_ids(), (std::vector<std::string>{"a", "c"}));
}

TEST_F(ExperimentTest, ManifestRejectsMalformedDocuments) {
  write_file("bad1.json", "{ not json");
  EXPECT_THROW(load_manifest(path("bad1.json")), ParseError);
  write_file("bad2.json", R"({"version": "other-v9", "trials": []})");
  EXPECT_THROW(load_manifest(path("bad2.json")), ParseError);
  write_file("bad3.json", R"({"version": "motent-manifest-v1"})");
  EXPECT_THROW(load_manifest(path("bad3.json")), ParseError);
  write_file("bad4.json", R"({"version": "motent-manifest-v1", "trials": [{"video": "v"}]})");
  EXPECT_THROW(load_manifest(path("bad4.json")), ParseError);
  write_file("bad5.json",
             R"({"version": "motent-manifest-v1",
                 "trials": [{"id": "t", "accel": ["a", "b", "c"]}]})");
  EXPECT_THROW(load_manifest(path("bad5.json")), ParseError);
  write_file("bad6.json",
             R"({"version": "motent-manifest-v1",
                 "trials": [{"id": "t", "labels": {"overall_performance": "wizard"}}]})");
  EXPECT_THROW(load_manifest(path("bad6.json")), ParseError);
  EXPECT_THROW(load_manifest(path("absent.json")), DataError);
}

// ---------------------------------------------------------------------------
// parallel_for.

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(257, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL() << "no work expected"; });
}

TEST(ParallelFor, ReportsTheLowestFailingIndex) {
  for (int threads : {1, 4}) {
    try {
      parallel_for(16, threads, [&](std::size_t i) {
        if (i == 3 || i == 7) throw DataError("boom at " + std::to_string(i));
      });
      FAIL() << "expected a throw";
    } catch (const DataError& e) {
      EXPECT_STREQ(e.what(), "boom at 3") << "threads=" << threads;
    }
  }
}

// ---------------------------------------------------------------------------
// Spearman (drives the synth --check trend assertions).

TEST(SpearmanRho, MatchesNaiveRankCorrelation) {
  EXPECT_DOUBLE_EQ(detail::spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(detail::spearman_rho({1, 2, 3, 4}, {9, 7, 5, 3}), -1.0);
  Rng rng(33);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
      x.push_back(rng.gaussian());
      y.push_back(rng.gaussian());
    }
    // A few deliberate ties.
    x[5] = x[9];
    y[2] = y[17];
    EXPECT_NEAR(detail::spearman_rho(x, y), oracle::spearman(x, y), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// cmd_codebook.

TEST_F(ExperimentTest, CodebookTrainsOnePerKAndIsReproducible) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(6);  // experts: trial-2, trial-5

  const auto result = cmd_codebook(cfg);
  EXPECT_TRUE(result.ok());
  for (int k : {2, 3}) {
    const auto p = codebook_path(cfg, k);
    ASSERT_TRUE(fs::exists(p)) << p;
    const auto cb = load_codebook(p);
    EXPECT_EQ(cb.k, k);
    EXPECT_EQ(cb.descriptor_dim, 6u);
  }
  EXPECT_TRUE(fs::exists(path("out") / "codebooks" / "codebooks-meta.json"));

  // Same seed -> identical artifacts; new seed -> different centroids.
  const auto before = slurp(codebook_path(cfg, 2));
  cmd_codebook(cfg);
  EXPECT_EQ(slurp(codebook_path(cfg, 2)), before);
  cfg.seed = 24;
  cmd_codebook(cfg);
  EXPECT_NE(slurp(codebook_path(cfg, 2)), before);
}

TEST_F(ExperimentTest, CodebookErrorsNameTheTrial) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(3);  // expert: trial-2
  fs::remove(path("stips/trial-2.stip"));
  try {
    cmd_codebook(cfg);
    FAIL() << "expected a throw";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("trial-2"), std::string::npos) << e.what();
  }
}

TEST_F(ExperimentTest, CodebookRequiresExpertTrials) {
  write_file("m.json", R"({
    "version": "motent-manifest-v1",
    "trials": [{"id": "t", "video": "v.stip", "label": "beginner"}]
  })");
  auto cfg = base_config();
  cfg.manifest = path("m.json").string();
  EXPECT_THROW(cmd_codebook(cfg), DataError);
}

TEST_F(ExperimentTest, CommandsRequireAManifest) {
  auto cfg = base_config();
  cfg.manifest.clear();
  EXPECT_THROW(cmd_codebook(cfg), ConfigError);
  cfg.manifest = path("missing.json").string();
  EXPECT_THROW(cmd_featurize(cfg), ConfigError);
}

// ---------------------------------------------------------------------------
// cmd_featurize.

TEST_F(ExperimentTest, FeaturizeVideoWritesOneStorePerK) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(6);
  cfg.modality = Modality::Video;
  cmd_codebook(cfg);

  const auto result = cmd_featurize(cfg);
  EXPECT_TRUE(result.ok());
  ASSERT_EQ(result.outputs.size(), 2u);

  for (int k : {2, 3}) {
    const auto store = load_feature_store(feature_store_path(cfg, k));
    EXPECT_EQ(store.k, k);
    EXPECT_EQ(store.modality, "video");
    EXPECT_EQ(store.family, "entropy");
    ASSERT_EQ(store.records.size(), 6u);
    // Fused entropy layout: 6K ApEn features + one radius of XApEn pairs.
    const std::size_t expect_dim = 6u * static_cast<std::size_t>(k) +
                                   static_cast<std::size_t>(k) * (static_cast<std::size_t>(k) - 1) / 2;
    for (const auto& rec : store.records) {
      EXPECT_EQ(rec.values.size(), expect_dim);
      EXPECT_EQ(rec.tags.size(), expect_dim);
      EXPECT_TRUE(all_finite(rec.values));
      EXPECT_EQ(rec.labels.count("overall_performance"), 1u);
    }
    EXPECT_EQ(store.records[0].trial, "trial-0");
    EXPECT_EQ(store.records[5].trial, "trial-5");
    EXPECT_EQ(store.records[0].tags[0], "apen[d0][r0]");
  }
}

TEST_F(ExperimentTest, FeaturizeAccelIgnoresTheKGrid) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(3);
  cfg.modality = Modality::Accel;

  const auto result = cmd_featurize(cfg);
  EXPECT_TRUE(result.ok());
  ASSERT_EQ(result.outputs.size(), 1u);
  const auto store = load_feature_store(feature_store_path(cfg, -1));
  EXPECT_EQ(store.k, -1);
  EXPECT_EQ(store.modality, "accel");
  ASSERT_EQ(store.records.size(), 3u);
  // Two sensors -> 6 axes: 36 ApEn features + 15 XApEn pairs at one radius.
  EXPECT_EQ(store.records[0].values.size(), 51u);
}

TEST_F(ExperimentTest, FeaturizeFusedSkipsAndCollectsFailures) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(5, /*no_accel=*/{1});  // trial-1 has no accel entry
  cfg.k_grid = {2};
  cmd_codebook(cfg);
  write_file("stips/trial-3.stip", "100 50 not-a-number 4 2 0.9 1 2 3\n");  // corrupt video

  const auto result = cmd_featurize(cfg);
  EXPECT_FALSE(result.ok());
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].first, "trial-3");

  bool skipped_warning = false;
  for (const auto& w : result.warnings)
    if (w.find("trial-1") != std::string::npos && w.find("skipped") != std::string::npos)
      skipped_warning = true;
  EXPECT_TRUE(skipped_warning);

  const auto store = load_feature_store(feature_store_path(cfg, 2));
  ASSERT_EQ(store.records.size(), 3u);  // 5 trials - 1 skipped - 1 failed
  EXPECT_EQ(store.records[0].trial, "trial-0");
  EXPECT_EQ(store.records[1].trial, "trial-2");
  EXPECT_EQ(store.records[2].trial, "trial-4");
  ASSERT_EQ(store.failures.size(), 1u);
  EXPECT_EQ(store.failures[0].first, "trial-3");
  // Fused tags carry their modality prefix.
  EXPECT_EQ(store.records[0].tags[0], "video:apen[d0][r0]");
  bool has_accel_tag = false;
  for (const auto& t : store.records[0].tags)
    if (t.rfind("accel:", 0) == 0) has_accel_tag = true;
  EXPECT_TRUE(has_accel_tag);
}

TEST_F(ExperimentTest, FeaturizeEmptyManifestWarnsAndWritesAnEmptyStore) {
  write_file("m.json", R"({"version": "motent-manifest-v1", "trials": []})");
  auto cfg = base_config();
  cfg.manifest = path("m.json").string();
  cfg.modality = Modality::Accel;

  const auto result = cmd_featurize(cfg);
  EXPECT_TRUE(result.ok());
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings[0].find("empty manifest"), std::string::npos);
  const auto store = load_feature_store(feature_store_path(cfg, -1));
  EXPECT_TRUE(store.records.empty());
}

TEST_F(ExperimentTest, FeaturizeVideoNeedsItsCodebook) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(3);
  cfg.modality = Modality::Video;
  try {
    cmd_featurize(cfg);
    FAIL() << "expected a throw";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("codebook"), std::string::npos);
  }
}

TEST_F(ExperimentTest, FeaturizeRerunsAreByteIdentical) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(4);
  cfg.k_grid = {2};
  cmd_codebook(cfg);
  cmd_featurize(cfg);
  const auto first = slurp(feature_store_path(cfg, 2));
  cfg.threads = 1;  // thread count is part of the config, so pin it...
  cfg.threads = 2;  // ...back to the original value for a true rerun
  cmd_featurize(cfg);
  EXPECT_EQ(slurp(feature_store_path(cfg, 2)), first);
}

TEST_F(ExperimentTest, SyntheticFeaturizeIsManifestFree) {
  auto cfg = base_config();
  cfg.manifest.clear();
  cfg.synthetic = true;
  cfg.synthetic_per_class = 4;
  cfg.synthetic_dims = 2;
  cfg.synthetic_length = 128;

  const auto result = cmd_featurize(cfg);
  EXPECT_TRUE(result.ok());
  const auto store = load_feature_store(feature_store_path(cfg, -1));
  EXPECT_EQ(store.modality, "synthetic");
  ASSERT_EQ(store.records.size(), 12u);
  EXPECT_EQ(store.records[0].trial, "synthetic-c0-0");
  EXPECT_EQ(store.records[0].labels.at("overall_performance"), "beginner");
  EXPECT_EQ(store.records[11].labels.at("overall_performance"), "expert");
  // 2 dims: 12 ApEn features + 1 XApEn pair.
  EXPECT_EQ(store.records[0].values.size(), 13u);
}

// ---------------------------------------------------------------------------
// Feature stores.

TEST_F(ExperimentTest, FeatureStoreRoundTrips) {
  FeatureStore store;
  store.k = 4;
  store.modality = "video";
  store.family = "dct";
  FeatureRecord rec;
  rec.trial = "t-0";
  rec.labels["overall_performance"] = "expert";
  rec.values = {1.5, -2.25, 1e-17, 3.141592653589793};
  rec.tags = {"dct[d0][c0]", "dct[d0][c1]", "dct[d0][c2]", "dct[d0][c3]"};
  store.records.push_back(rec);
  store.warnings.push_back("a warning");
  store.failures.emplace_back("t-9", "exploded");

  const ExperimentConfig cfg;
  save_feature_store(store, cfg, path("store.json"));
  const auto loaded = load_feature_store(path("store.json"));
  EXPECT_EQ(loaded.k, 4);
  EXPECT_EQ(loaded.modality, "video");
  EXPECT_EQ(loaded.family, "dct");
  ASSERT_EQ(loaded.records.size(), 1u);
  EXPECT_EQ(loaded.records[0].trial, "t-0");
  EXPECT_EQ(loaded.records[0].labels, rec.labels);
  EXPECT_EQ(loaded.records[0].values, rec.values);  // exact doubles
  EXPECT_EQ(loaded.records[0].tags, rec.tags);
  EXPECT_EQ(loaded.warnings, store.warnings);
  EXPECT_EQ(loaded.failures, store.failures);
}

TEST_F(ExperimentTest, FeatureStoreRejectsForeignFiles) {
  write_file("foreign.json", R"({"version": "other", "records": []})");
  EXPECT_THROW(load_feature_store(path("foreign.json")), ParseError);
  write_file("garbage.json", "][");
  EXPECT_THROW(load_feature_store(path("garbage.json")), ParseError);
  write_file("partial.json", R"({"version": "motent-features-v1"})");
  EXPECT_THROW(load_feature_store(path("partial.json")), ParseError);
}

TEST_F(ExperimentTest, CriterionDatasetsGroupByLabel) {
  FeatureStore store;
  for (int i = 0; i < 5; ++i) {
    FeatureRecord rec;
    rec.trial = "t" + std::to_string(i);
    rec.values = {static_cast<double>(i), 1.0};
    rec.labels["overall_performance"] = (i < 2 ? "beginner" : "expert");
    if (i < 4) rec.labels["flow_of_operation"] = "intermediate";
    store.records.push_back(rec);
  }
  const auto datasets = criterion_datasets(store, Task::KnotTying);
  ASSERT_EQ(datasets.size(), 2u);
  // Enum order puts flow_of_operation before overall_performance.
  EXPECT_EQ(datasets[0].criterion, Criterion::FlowOfOperation);
  EXPECT_EQ(datasets[0].samples.size(), 4u);
  EXPECT_EQ(datasets[1].criterion, Criterion::OverallPerformance);
  EXPECT_EQ(datasets[1].samples.size(), 5u);
  EXPECT_EQ(datasets[1].task, Task::KnotTying);
  EXPECT_EQ(datasets[1].samples[0].label, SkillClass::Beginner);
  EXPECT_EQ(datasets[1].samples[4].label, SkillClass::Expert);
  EXPECT_DOUBLE_EQ(datasets[1].samples[3].features[0], 3.0);
}

// ---------------------------------------------------------------------------
// cmd_evaluate + cmd_report.

TEST_F(ExperimentTest, EvaluateSyntheticEndToEnd) {
  auto cfg = base_config();
  cfg.manifest.clear();
  cfg.synthetic = true;
  cfg.synthetic_per_class = 5;
  cfg.synthetic_dims = 2;
  cfg.synthetic_length = 192;
  cfg.sffs_max_dim = 3;

  cmd_featurize(cfg);
  const auto result = cmd_evaluate(cfg);
  EXPECT_TRUE(result.ok());

  const auto osats_path = path("out") / "eval" / "osats-synthetic.json";
  const auto summary_path = path("out") / "eval" / "summary.json";
  ASSERT_TRUE(fs::exists(osats_path));
  ASSERT_TRUE(fs::exists(summary_path));

  const auto osats = njson::parse(slurp(osats_path));
  EXPECT_EQ(osats.at("version"), "motent-osats-v1");
  EXPECT_EQ(osats.at("config").at("seed"), "23");  // embedded resolved config
  EXPECT_EQ(osats.at("selection_mode"), "sffs_in_fold");
  ASSERT_EQ(osats.at("criteria").size(), 1u);
  const double acc = osats.at("criteria")[0].at("accuracy").get<double>();
  EXPECT_GE(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  EXPECT_EQ(osats.at("criteria")[0].at("criterion"), "overall_performance");

  const auto summary = njson::parse(slurp(summary_path));
  EXPECT_EQ(summary.at("best_tag"), "synthetic");
  EXPECT_EQ(summary.at("best_k"), -1);

  // CSV mirrors the table and embeds the config.
  const auto csv = slurp(path("out") / "eval" / "osats-synthetic.csv");
  EXPECT_NE(csv.find("# config.seed = 23"), std::string::npos);
  EXPECT_NE(csv.find("criterion,accuracy,stdev_folds,n_samples"), std::string::npos);
  EXPECT_NE(csv.find("overall_performance,"), std::string::npos);
  EXPECT_NE(csv.find("average,"), std::string::npos);

  // Reruns are byte-identical.
  const auto before_json = slurp(osats_path);
  const auto before_csv = slurp(path("out") / "eval" / "summary.csv");
  cmd_evaluate(cfg);
  EXPECT_EQ(slurp(osats_path), before_json);
  EXPECT_EQ(slurp(path("out") / "eval" / "summary.csv"), before_csv);

  // Report renders from the persisted outputs alone.
  const auto report = render_report(cfg);
  EXPECT_NE(report.find("synthetic"), std::string::npos);
  EXPECT_NE(report.find("<- best"), std::string::npos);
  EXPECT_NE(report.find("overall_performance"), std::string::npos);
  const auto report_result = cmd_report(cfg);
  EXPECT_TRUE(fs::exists(path("out") / "report.txt"));
  EXPECT_EQ(slurp(path("out") / "report.txt"), report);
}

TEST_F(ExperimentTest, EvaluateSweepsTheKGridAndAnnotatesTheBest) {
  auto cfg = base_config();
  cfg.manifest = write_corpus(6);
  cfg.modality = Modality::Video;
  cfg.cv = "kfold:2";
  cfg.sffs = false;  // keep the sweep fast
  cmd_codebook(cfg);
  cmd_featurize(cfg);
  const auto result = cmd_evaluate(cfg);
  EXPECT_TRUE(result.ok());

  ASSERT_TRUE(fs::exists(path("out") / "eval" / "osats-k2.json"));
  ASSERT_TRUE(fs::exists(path("out") / "eval" / "osats-k3.json"));
  const auto summary = njson::parse(slurp(path("out") / "eval" / "summary.json"));
  ASSERT_EQ(summary.at("entries").size(), 2u);
  EXPECT_EQ(summary.at("entries")[0].at("k"), 2);
  EXPECT_EQ(summary.at("entries")[1].at("k"), 3);
  const int best_k = summary.at("best_k").get<int>();
  EXPECT_TRUE(best_k == 2 || best_k == 3);
  double best_avg = -1.0;
  for (const auto& e : summary.at("entries"))
    best_avg = std::max(best_avg, e.at("average_accuracy").get<double>());
  EXPECT_DOUBLE_EQ(summary.at("best_average_accuracy").get<double>(), best_avg);
}

TEST_F(ExperimentTest, EvaluateCvSweepWritesAllFourSchemeTables) {
  auto cfg = base_config();
  cfg.manifest.clear();
  cfg.synthetic = true;
  cfg.synthetic_per_class = 5;
  cfg.synthetic_dims = 2;
  cfg.synthetic_length = 192;
  cfg.sffs_max_dim = 3;
  cfg.cv_sweep = true;

  cmd_featurize(cfg);
  const auto result = cmd_evaluate(cfg);
  EXPECT_TRUE(result.ok());

  const std::vector<std::string> tags = {"kfold2-synthetic", "kfold5-synthetic",
                                         "kfold10-synthetic", "loocv-synthetic"};
  for (const auto& tag : tags) {
    ASSERT_TRUE(fs::exists(path("out") / "eval" / ("osats-" + tag + ".json"))) << tag;
    ASSERT_TRUE(fs::exists(path("out") / "eval" / ("osats-" + tag + ".csv"))) << tag;
  }

  const auto summary = njson::parse(slurp(path("out") / "eval" / "summary.json"));
  ASSERT_EQ(summary.at("entries").size(), 4u);
  const std::vector<std::string> schemes = {"kfold2", "kfold5", "kfold10", "loocv"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(summary.at("entries")[i].at("tag"), tags[i]);
    EXPECT_EQ(summary.at("entries")[i].at("scheme"), schemes[i]);
    EXPECT_EQ(summary.at("entries")[i].at("k"), -1);
  }
  EXPECT_NE(std::find(tags.begin(), tags.end(), summary.at("best_tag").get<std::string>()),
            tags.end());
  double best_avg = -1.0;
  for (const auto& e : summary.at("entries"))
    best_avg = std::max(best_avg, e.at("average_accuracy").get<double>());
  EXPECT_DOUBLE_EQ(summary.at("best_average_accuracy").get<double>(), best_avg);

  // Each table was produced by the scheme its tag claims.
  const auto loocv = njson::parse(slurp(path("out") / "eval" / "osats-loocv-synthetic.json"));
  EXPECT_EQ(loocv.at("criteria")[0].at("scheme"), "loocv");
  const auto kf2 = njson::parse(slurp(path("out") / "eval" / "osats-kfold2-synthetic.json"));
  EXPECT_NE(kf2.at("criteria")[0].at("scheme").get<std::string>().find("kfold(2"),
            std::string::npos);

  const auto csv = slurp(path("out") / "eval" / "summary.csv");
  EXPECT_NE(csv.find("tag,scheme,k,average_accuracy,accuracy_std_criteria"), std::string::npos);
  EXPECT_NE(csv.find("kfold10-synthetic,kfold10,-1,"), std::string::npos);
}

TEST_F(ExperimentTest, EvaluateWithoutAStoreExplainsTheFix) {
  auto cfg = base_config();
  cfg.synthetic = true;
  try {
    cmd_evaluate(cfg);
    FAIL() << "expected a throw";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("featurize"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// cmd_synth and the curve checks.

TEST_F(ExperimentTest, SynthWritesDeterministicCurves) {
  auto cfg = base_config();
  cfg.manifest.clear();
  cfg.snr_reps = 2;
  cfg.phase_reps = 2;

  const auto result = cmd_synth(cfg, /*check=*/false);
  EXPECT_TRUE(result.ok());
  const auto snr_path = path("out") / "curves" / "snr_curve.csv";
  const auto phase_path = path("out") / "curves" / "phase_curve.csv";
  ASSERT_TRUE(fs::exists(snr_path));
  ASSERT_TRUE(fs::exists(phase_path));

  const auto snr_csv = slurp(snr_path);
  EXPECT_NE(snr_csv.find("# version = motent-curve-v1"), std::string::npos);
  EXPECT_NE(snr_csv.find("# config.seed = 23"), std::string::npos);
  EXPECT_NE(snr_csv.find("snr,radius,mean_apen,std_apen"), std::string::npos);
  const auto phase_csv = slurp(phase_path);
  EXPECT_NE(phase_csv.find("phase,mean_asynchrony,std_asynchrony,excess_asynchrony"),
            std::string::npos);

  cmd_synth(cfg, false);
  EXPECT_EQ(slurp(snr_path), snr_csv);
  EXPECT_EQ(slurp(phase_path), phase_csv);
}

TEST(CurveChecks, SnrCheckCatchesBrokenTrends) {
  CurveTable good;
  good.columns = {"snr", "radius", "mean_apen", "std_apen"};
  CurveTable bad = good;
  for (int s = 1; s <= 10; ++s) {
    good.rows.push_back({static_cast<double>(s), 0.1, 1.0 / s, 0.0});
    bad.rows.push_back({static_cast<double>(s), 0.1, static_cast<double>(s % 3), 0.0});
  }
  EXPECT_NO_THROW(check_snr_curve(good, {0.1}));
  EXPECT_THROW(check_snr_curve(bad, {0.1}), CheckFailure);
}

TEST(CurveChecks, PhaseCheckWantsAMidGridPeakAndQuietEndpoints) {
  const auto table = [](std::vector<double> excess) {
    CurveTable t;
    t.columns = {"phase", "mean_asynchrony", "std_asynchrony", "excess_asynchrony"};
    for (std::size_t i = 0; i < excess.size(); ++i) {
      const double phase = kPi * static_cast<double>(i) / static_cast<double>(excess.size() - 1);
      t.rows.push_back({phase, 0.5 + excess[i], 0.01, excess[i]});
    }
    return t;
  };
  EXPECT_NO_THROW(check_phase_curve(table({0.0, 0.2, 0.5, 0.2, 0.0})));
  // Peak at an endpoint.
  EXPECT_THROW(check_phase_curve(table({0.5, 0.2, 0.1, 0.05, 0.0})), CheckFailure);
  // Endpoints never come back down.
  EXPECT_THROW(check_phase_curve(table({0.3, 0.4, 0.5, 0.4, 0.3})), CheckFailure);
  // Flat zero curve has no positive peak.
  EXPECT_THROW(check_phase_curve(table({0.0, 0.0, 0.0, 0.0, 0.0})), CheckFailure);
}

}  // namespace
