#pragma once

// Experiment plumbing: a key-value config that round-trips losslessly, a JSON
// trial manifest, persisted feature stores, and the five commands behind the
// CLI (codebook, featurize, evaluate, synth, report). Every output embeds the
// resolved config + seed, all writes are atomic (temp + rename), and
// trial-level parallelism assembles results in deterministic input order.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "motent/baselines.hpp"
#include "motent/core.hpp"
#include "motent/entropy.hpp"
#include "motent/ingest.hpp"
#include "motent/learn.hpp"
#include "motent/rng.hpp"
#include "motent/synth.hpp"

namespace motent {

using njson = nlohmann::json;

// ---------------------------------------------------------------------------
// Filesystem helpers.

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Write via a temporary in the same directory, then rename into place, so a
// crash never leaves a half-written artifact under the final name.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << content;
    if (!out) throw DataError("short write: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Bounded worker pool. Work items are indexed; exceptions are captured per
// index and the lowest-index one is rethrown after the join, so failure
// reporting does not depend on scheduling.

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const int want = threads > 0 ? threads : default_thread_count();
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(want), n);
  std::vector<std::exception_ptr> errors(n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

// ---------------------------------------------------------------------------
// Config enums.

enum class Modality { Video, Accel, Fused };

inline std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::Video: return "video";
    case Modality::Accel: return "accel";
    case Modality::Fused: return "fused";
  }
  return "?";
}

inline Modality modality_from_name(std::string_view s) {
  if (s == "video") return Modality::Video;
  if (s == "accel") return Modality::Accel;
  if (s == "fused") return Modality::Fused;
  throw ConfigError("unknown modality: " + std::string(s));
}

// Which feature family the experiment computes per series.
enum class FamilyChoice { Entropy, ApEn, XApEn, Dct, Dft, Smt };

inline std::string_view family_choice_name(FamilyChoice f) {
  switch (f) {
    case FamilyChoice::Entropy: return "entropy";
    case FamilyChoice::ApEn: return "apen";
    case FamilyChoice::XApEn: return "xapen";
    case FamilyChoice::Dct: return "dct";
    case FamilyChoice::Dft: return "dft";
    case FamilyChoice::Smt: return "smt";
  }
  return "?";
}

inline FamilyChoice family_choice_from_name(std::string_view s) {
  if (s == "entropy") return FamilyChoice::Entropy;
  if (s == "apen") return FamilyChoice::ApEn;
  if (s == "xapen") return FamilyChoice::XApEn;
  if (s == "dct") return FamilyChoice::Dct;
  if (s == "dft") return FamilyChoice::Dft;
  if (s == "smt") return FamilyChoice::Smt;
  throw ConfigError("unknown feature family: " + std::string(s));
}

// ---------------------------------------------------------------------------
// ExperimentConfig: every experiment knob, serialized as `key = value` lines.

struct ExperimentConfig {
  Task task = Task::Suturing;
  Modality modality = Modality::Fused;
  FamilyChoice family = FamilyChoice::Entropy;
  std::string manifest;    // path to the trial manifest (empty = unset)
  std::string output_dir;  // empty = $MOTENT_OUTPUT_ROOT or ./motent-out
  std::uint64_t seed = 7;

  std::vector<int> k_grid = {6};  // codebook sizes (subset of the trained grid)
  int m = 1;
  int tau = 1;
  std::vector<double> radii = {0.10, 0.13, 0.16, 0.19, 0.22, 0.25};
  std::vector<double> xapen_radii = {0.20};
  int coeffs_per_dim = 10;
  int smt_windows = 10;
  int smt_levels = 8;

  std::string cv = "loocv";  // loocv | kfold:2 | kfold:5 | kfold:10
  bool cv_sweep = false;     // evaluate over all four schemes in one run
  std::uint64_t cv_seed = 17;
  bool sffs = true;
  int sffs_max_dim = 10;
  bool paper_protocol = false;
  Metric metric = Metric::Euclidean;
  int threads = 0;  // 0 = auto

  bool synthetic = false;  // generate the labeled synthetic dataset instead of ingesting
  int synthetic_per_class = 10;
  int synthetic_dims = 6;
  int synthetic_length = 1024;

  int snr_reps = 20;
  int phase_reps = 10;
  double probe_radius = 0.20;
  int probe_horizon = 32;

  // -- serialization ---------------------------------------------------------

  static std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += detail::format_double(v[i]);
    }
    return out;
  }

  static std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(v[i]);
    }
    return out;
  }

  // The resolved config in canonical key order; the single source for the
  // config file, the `# config.*` CSV headers, and the JSON "config" objects.
  std::vector<std::pair<std::string, std::string>> entries() const {
    return {
        {"task", std::string(task_name(task))},
        {"modality", std::string(modality_name(modality))},
        {"family", std::string(family_choice_name(family))},
        {"manifest", manifest},
        {"output_dir", output_dir},
        {"seed", std::to_string(seed)},
        {"k_grid", join_ints(k_grid)},
        {"m", std::to_string(m)},
        {"tau", std::to_string(tau)},
        {"radii", join_doubles(radii)},
        {"xapen_radii", join_doubles(xapen_radii)},
        {"coeffs_per_dim", std::to_string(coeffs_per_dim)},
        {"smt_windows", std::to_string(smt_windows)},
        {"smt_levels", std::to_string(smt_levels)},
        {"cv", cv},
        {"cv_sweep", cv_sweep ? "true" : "false"},
        {"cv_seed", std::to_string(cv_seed)},
        {"sffs", sffs ? "true" : "false"},
        {"sffs_max_dim", std::to_string(sffs_max_dim)},
        {"paper_protocol", paper_protocol ? "true" : "false"},
        {"metric", std::string(metric_name(metric))},
        {"threads", std::to_string(threads)},
        {"synthetic", synthetic ? "true" : "false"},
        {"synthetic_per_class", std::to_string(synthetic_per_class)},
        {"synthetic_dims", std::to_string(synthetic_dims)},
        {"synthetic_length", std::to_string(synthetic_length)},
        {"snr_reps", std::to_string(snr_reps)},
        {"phase_reps", std::to_string(phase_reps)},
        {"probe_radius", detail::format_double(probe_radius)},
        {"probe_horizon", std::to_string(probe_horizon)},
    };
  }

  std::string to_text() const {
    std::string out = "# motent experiment config\n";
    for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
    return out;
  }

  void set(const std::string& key, const std::string& value) {
    const auto to_bool = [&](const std::string& v) {
      if (v == "true") return true;
      if (v == "false") return false;
      throw ConfigError("expected true/false for '" + key + "', got '" + v + "'");
    };
    const auto to_int = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        const int n = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
      } catch (const std::exception&) {
        throw ConfigError("expected an integer for '" + key + "', got '" + value + "'");
      }
    };
    const auto to_u64 = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        const auto n = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(n);
      } catch (const std::exception&) {
        throw ConfigError("expected an unsigned integer for '" + key + "', got '" + value + "'");
      }
    };
    const auto to_double = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw ConfigError("expected a number for '" + key + "', got '" + value + "'");
      }
    };
    const auto split = [](const std::string& v) {
      std::vector<std::string> parts;
      std::string cur;
      for (char c : v) {
        if (c == ',') {
          parts.push_back(cur);
          cur.clear();
        } else if (c != ' ') {
          cur += c;
        }
      }
      if (!cur.empty()) parts.push_back(cur);
      return parts;
    };
    const auto to_doubles = [&](const std::string& v) {
      std::vector<double> out;
      for (const auto& p : split(v)) out.push_back(to_double(p));
      return out;
    };
    const auto to_ints = [&](const std::string& v) {
      std::vector<int> out;
      for (const auto& p : split(v)) out.push_back(to_int(p));
      return out;
    };

    try {
      if (key == "task") task = task_from_name(value);
      else if (key == "modality") modality = modality_from_name(value);
      else if (key == "family") family = family_choice_from_name(value);
      else if (key == "manifest") manifest = value;
      else if (key == "output_dir") output_dir = value;
      else if (key == "seed") seed = to_u64(value);
      else if (key == "k_grid") k_grid = to_ints(value);
      else if (key == "m") m = to_int(value);
      else if (key == "tau") tau = to_int(value);
      else if (key == "radii") radii = to_doubles(value);
      else if (key == "xapen_radii") xapen_radii = to_doubles(value);
      else if (key == "coeffs_per_dim") coeffs_per_dim = to_int(value);
      else if (key == "smt_windows") smt_windows = to_int(value);
      else if (key == "smt_levels") smt_levels = to_int(value);
      else if (key == "cv") cv = value;
      else if (key == "cv_sweep") cv_sweep = to_bool(value);
      else if (key == "cv_seed") cv_seed = to_u64(value);
      else if (key == "sffs") sffs = to_bool(value);
      else if (key == "sffs_max_dim") sffs_max_dim = to_int(value);
      else if (key == "paper_protocol") paper_protocol = to_bool(value);
      else if (key == "metric") metric = metric_from_name(value);
      else if (key == "threads") threads = to_int(value);
      else if (key == "synthetic") synthetic = to_bool(value);
      else if (key == "synthetic_per_class") synthetic_per_class = to_int(value);
      else if (key == "synthetic_dims") synthetic_dims = to_int(value);
      else if (key == "synthetic_length") synthetic_length = to_int(value);
      else if (key == "snr_reps") snr_reps = to_int(value);
      else if (key == "phase_reps") phase_reps = to_int(value);
      else if (key == "probe_radius") probe_radius = to_double(value);
      else if (key == "probe_horizon") probe_horizon = to_int(value);
      else throw ConfigError("unknown config key: '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  static ExperimentConfig from_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
      const std::size_t first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
      const auto trim = [](std::string s) {
        const std::size_t a = s.find_first_not_of(" \t");
        const std::size_t b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream probe(path);
    if (!probe) throw ConfigError("cannot open config file: " + path.string());
    probe.close();
    return from_text(read_text_file(path));
  }

  void save(const std::filesystem::path& path) const { atomic_write_text(path, to_text()); }

  // -- derived views ---------------------------------------------------------

  EntropyParams entropy_params() const {
    EntropyParams p;
    p.m = m;
    p.tau = tau;
    p.radii = radii;
    p.xapen_radii = xapen_radii;
    return p;
  }

  CvScheme cv_scheme() const {
    if (cv == "loocv") return CvScheme::loocv();
    if (cv.rfind("kfold:", 0) == 0) {
      int folds = 0;
      try {
        folds = std::stoi(cv.substr(6));
      } catch (const std::exception&) {
        throw ConfigError("bad cv scheme: '" + cv + "'");
      }
      try {
        return CvScheme::kfold(folds, cv_seed);
      } catch (const ParamError& e) {
        throw ConfigError(e.what());
      }
    }
    throw ConfigError("bad cv scheme: '" + cv + "' (use loocv or kfold:2|5|10)");
  }

  Pipeline pipeline() const {
    Pipeline p;
    p.use_sffs = sffs;
    p.sffs_max_dim = static_cast<std::size_t>(sffs_max_dim);
    p.paper_protocol = paper_protocol;
    p.metric = metric;
    return p;
  }

  std::filesystem::path resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv("MOTENT_OUTPUT_ROOT"); env && *env) return env;
    return "motent-out";
  }

  // Structural checks shared by every command. Commands that read the
  // manifest additionally require the path to exist.
  void validate() const {
    entropy_params().check();
    cv_scheme();
    if (k_grid.empty()) throw ConfigError("k_grid must list at least one K");
    for (int k : k_grid)
      if (std::find(codebook_k_grid().begin(), codebook_k_grid().end(), k) == codebook_k_grid().end())
        throw ConfigError("k_grid entry " + std::to_string(k) +
                          " is outside the codebook grid [2..10, 12, 14, 16, 18, 20]");
    if (coeffs_per_dim < 1) throw ConfigError("coeffs_per_dim must be >= 1");
    if (smt_windows < 1) throw ConfigError("smt_windows must be >= 1");
    if (smt_levels < 2) throw ConfigError("smt_levels must be >= 2");
    if (sffs_max_dim < 1) throw ConfigError("sffs_max_dim must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0 (0 = auto)");
    if (snr_reps < 1 || phase_reps < 1) throw ConfigError("sweep reps must be >= 1");
    if (!(probe_radius > 0.0 && probe_radius < 1.0)) throw ConfigError("probe_radius must lie in (0, 1)");
    if (probe_horizon < 1) throw ConfigError("probe_horizon must be >= 1");
    if (synthetic) {
      if (synthetic_per_class < 4) throw ConfigError("synthetic_per_class must be >= 4");
      if (synthetic_dims < 1) throw ConfigError("synthetic_dims must be >= 1");
      if (synthetic_length < 64) throw ConfigError("synthetic_length must be >= 64");
    }
  }

  void require_manifest() const {
    if (synthetic) return;
    if (manifest.empty()) throw ConfigError("this command needs a manifest (set `manifest = path`)");
    if (!std::filesystem::exists(manifest))
      throw ConfigError("manifest does not exist: " + manifest);
  }

  njson config_json() const {
    njson obj = njson::object();
    for (const auto& [k, v] : entries()) obj[k] = v;
    return obj;
  }

  void prepend_meta(CurveTable& table) const {
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("version", "motent-curve-v1");
    for (const auto& [k, v] : entries()) meta.emplace_back("config." + k, v);
    meta.insert(meta.end(), table.meta.begin(), table.meta.end());
    table.meta = std::move(meta);
  }
};

// ---------------------------------------------------------------------------
// Trial manifest (JSON).

struct TrialEntry {
  std::string id;
  std::string video;                // descriptor file, may be empty
  std::vector<std::string> accel;   // 0..2 accelerometer CSVs
  std::map<Criterion, SkillClass> labels;
};

struct Manifest {
  Task task = Task::Suturing;
  std::vector<TrialEntry> trials;
  std::vector<std::string> experts;  // trial ids used for codebook training
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base_dir / fp;
  }

  const TrialEntry& find(const std::string& id) const {
    for (const auto& t : trials)
      if (t.id == id) return t;
    throw DataError("manifest has no trial '" + id + "'");
  }

  // Explicit expert list if present, otherwise trials labeled expert on
  // overall performance.
  std::vector<std::string> expert_ids() const {
    if (!experts.empty()) return experts;
    std::vector<std::string> out;
    for (const auto& t : trials) {
      const auto it = t.labels.find(Criterion::OverallPerformance);
      if (it != t.labels.end() && it->second == SkillClass::Expert) out.push_back(t.id);
    }
    return out;
  }
};

inline Manifest load_manifest(const std::filesystem::path& path) {
  njson doc;
  try {
    doc = njson::parse(read_text_file(path));
  } catch (const njson::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  const auto fail = [&](const std::string& what) {
    throw ParseError(path.string() + ": " + what);
  };

  Manifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!doc.is_object()) fail("top level must be an object");
  if (doc.value("version", "") != "motent-manifest-v1") fail("expected version 'motent-manifest-v1'");
  if (doc.contains("task")) m.task = task_from_name(doc["task"].get<std::string>());
  if (doc.contains("experts")) {
    if (!doc["experts"].is_array()) fail("'experts' must be an array of trial ids");
    for (const auto& e : doc["experts"]) m.experts.push_back(e.get<std::string>());
  }
  if (!doc.contains("trials") || !doc["trials"].is_array()) fail("missing 'trials' array");

  for (const auto& t : doc["trials"]) {
    TrialEntry entry;
    if (!t.is_object() || !t.contains("id")) fail("every trial needs an 'id'");
    entry.id = t["id"].get<std::string>();
    if (t.contains("video")) entry.video = t["video"].get<std::string>();
    if (t.contains("accel")) {
      if (t["accel"].is_string()) {
        entry.accel.push_back(t["accel"].get<std::string>());
      } else if (t["accel"].is_array()) {
        for (const auto& a : t["accel"]) entry.accel.push_back(a.get<std::string>());
      } else {
        fail("trial '" + entry.id + "': 'accel' must be a path or an array of paths");
      }
      if (entry.accel.size() > 2) fail("trial '" + entry.id + "': at most 2 accelerometer files");
    }
    if (t.contains("labels")) {
      if (!t["labels"].is_object()) fail("trial '" + entry.id + "': 'labels' must be an object");
      for (const auto& [k, v] : t["labels"].items()) {
        try {
          entry.labels[criterion_from_name(k)] = skill_from_name(v.get<std::string>());
        } catch (const ParamError& e) {
          fail("trial '" + entry.id + "': " + e.what());
        }
      }
    }
    if (t.contains("label")) {  // shorthand for the overall criterion
      try {
        entry.labels[Criterion::OverallPerformance] = skill_from_name(t["label"].get<std::string>());
      } catch (const ParamError& e) {
        fail("trial '" + entry.id + "': " + e.what());
      }
    }
    m.trials.push_back(std::move(entry));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Family features for one series.

inline FeatureVector features_for_series(const MultiTimeSeries& series, const ExperimentConfig& cfg) {
  switch (cfg.family) {
    case FamilyChoice::Entropy: return fused_entropy_features(series, cfg.entropy_params());
    case FamilyChoice::ApEn: return apen_features(series, cfg.entropy_params());
    case FamilyChoice::XApEn: return xapen_features(series, cfg.entropy_params());
    case FamilyChoice::Dct: return dct_features(series, {cfg.coeffs_per_dim});
    case FamilyChoice::Dft: return dft_features(series, {cfg.coeffs_per_dim});
    case FamilyChoice::Smt: return smt_features(series, {cfg.smt_windows, cfg.smt_levels});
  }
  throw ParamError("unhandled feature family");
}

// ---------------------------------------------------------------------------
// Command results.

struct CommandResult {
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> failures;  // (trial id, error)

  bool ok() const { return failures.empty(); }
};

// ---------------------------------------------------------------------------
// cmd_codebook: one persisted codebook per K, trained on pooled expert trials.

inline std::filesystem::path codebook_path(const ExperimentConfig& cfg, int k) {
  return cfg.resolved_output_dir() / "codebooks" / ("codebook-k" + std::to_string(k) + ".txt");
}

inline CommandResult cmd_codebook(const ExperimentConfig& cfg) {
  cfg.validate();
  cfg.require_manifest();
  const auto manifest = load_manifest(cfg.manifest);

  const auto expert_ids = manifest.expert_ids();
  if (expert_ids.empty())
    throw DataError("manifest lists no expert trials (add an 'experts' array or expert labels)");

  CommandResult result;
  std::vector<DescriptorSet> sets(expert_ids.size());
  std::vector<std::vector<std::string>> set_warnings(expert_ids.size());
  parallel_for(expert_ids.size(), cfg.threads, [&](std::size_t i) {
    const auto& trial = manifest.find(expert_ids[i]);
    if (trial.video.empty())
      throw DataError("trial '" + trial.id + "': no descriptor file in manifest");
    try {
      sets[i] = parse_stip_file(manifest.resolve(trial.video), &set_warnings[i]);
    } catch (const Error& e) {
      throw DataError("trial '" + trial.id + "': " + e.what());
    }
  });
  for (const auto& w : set_warnings) result.warnings.insert(result.warnings.end(), w.begin(), w.end());

  std::vector<std::filesystem::path> files(cfg.k_grid.size());
  parallel_for(cfg.k_grid.size(), cfg.threads, [&](std::size_t i) {
    const int k = cfg.k_grid[i];
    const auto cb =
        train_codebook(sets, k, substream_seed(cfg.seed, "codebook/k" + std::to_string(k)));
    const auto path = codebook_path(cfg, k);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    save_codebook(cb, path);
    files[i] = path;
  });
  result.outputs = files;

  njson meta;
  meta["version"] = "motent-codebooks-v1";
  meta["config"] = cfg.config_json();
  meta["expert_trials"] = expert_ids;
  njson file_list = njson::array();
  for (const auto& f : files) file_list.push_back(f.filename().string());
  meta["files"] = file_list;
  meta["warnings"] = result.warnings;
  const auto meta_path = cfg.resolved_output_dir() / "codebooks" / "codebooks-meta.json";
  atomic_write_text(meta_path, meta.dump(2) + "\n");
  result.outputs.push_back(meta_path);
  return result;
}

// ---------------------------------------------------------------------------
// Feature stores.

struct FeatureRecord {
  std::string trial;
  std::map<std::string, std::string> labels;  // criterion name -> skill name
  std::vector<double> values;
  std::vector<std::string> tags;
};

struct FeatureStore {
  int k = -1;  // codebook size, -1 when not applicable
  std::string modality;
  std::string family;
  std::vector<FeatureRecord> records;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> failures;
};

inline std::filesystem::path feature_store_path(const ExperimentConfig& cfg, int k) {
  const auto dir = cfg.resolved_output_dir() / "features";
  if (cfg.synthetic) return dir / "features-synthetic.json";
  const std::string mod(modality_name(cfg.modality));
  if (cfg.modality == Modality::Accel) return dir / ("features-" + mod + ".json");
  return dir / ("features-" + mod + "-k" + std::to_string(k) + ".json");
}

inline void save_feature_store(const FeatureStore& store, const ExperimentConfig& cfg,
                               const std::filesystem::path& path) {
  njson doc;
  doc["version"] = "motent-features-v1";
  doc["config"] = cfg.config_json();
  doc["k"] = store.k;
  doc["modality"] = store.modality;
  doc["family"] = store.family;
  njson records = njson::array();
  for (const auto& r : store.records) {
    njson rec;
    rec["trial"] = r.trial;
    rec["labels"] = r.labels;
    rec["values"] = r.values;
    rec["tags"] = r.tags;
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  doc["warnings"] = store.warnings;
  njson failures = njson::array();
  for (const auto& [trial, err] : store.failures) {
    njson f;
    f["trial"] = trial;
    f["error"] = err;
    failures.push_back(std::move(f));
  }
  doc["failures"] = std::move(failures);
  atomic_write_text(path, doc.dump(2) + "\n");
}

inline FeatureStore load_feature_store(const std::filesystem::path& path) {
  njson doc;
  try {
    doc = njson::parse(read_text_file(path));
  } catch (const njson::exception& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("version", "") != "motent-features-v1")
    throw ParseError(path.string() + ": not a motent feature store");
  FeatureStore store;
  try {
    store.k = doc.value("k", -1);
    store.modality = doc.value("modality", "");
    store.family = doc.value("family", "");
    for (const auto& rec : doc.at("records")) {
      FeatureRecord r;
      r.trial = rec.at("trial").get<std::string>();
      if (rec.contains("labels"))
        for (const auto& [k, v] : rec["labels"].items()) r.labels[k] = v.get<std::string>();
      r.values = rec.at("values").get<std::vector<double>>();
      if (rec.contains("tags")) r.tags = rec["tags"].get<std::vector<std::string>>();
      store.records.push_back(std::move(r));
    }
    if (doc.contains("warnings")) store.warnings = doc["warnings"].get<std::vector<std::string>>();
    if (doc.contains("failures"))
      for (const auto& f : doc["failures"])
        store.failures.emplace_back(f.value("trial", ""), f.value("error", ""));
  } catch (const njson::exception& e) {
    throw ParseError(path.string() + ": malformed feature store: " + e.what());
  }
  return store;
}

// ---------------------------------------------------------------------------
// cmd_featurize.

namespace detail {

inline std::map<std::string, std::string> label_strings(const std::map<Criterion, SkillClass>& labels) {
  std::map<std::string, std::string> out;
  for (const auto& [c, s] : labels) out[std::string(criterion_name(c))] = std::string(skill_name(s));
  return out;
}

inline std::vector<std::string> tag_strings(const FeatureVector& fv) {
  std::vector<std::string> out;
  out.reserve(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) out.push_back(fv.tag(i).str());
  return out;
}

// Load + combine a trial's accelerometer CSVs into one series.
inline MultiTimeSeries accel_series(const Manifest& manifest, const TrialEntry& trial,
                                    std::vector<std::string>* warnings) {
  const auto first = parse_accel_csv(manifest.resolve(trial.accel.front()));
  if (trial.accel.size() == 1) return accel_to_series(first);
  const auto second = parse_accel_csv(manifest.resolve(trial.accel[1]));
  return combine_accel(first, second, warnings);
}

}  // namespace detail

// Featurize the synthetic labeled dataset (no manifest needed).
inline FeatureStore featurize_synthetic(const ExperimentConfig& cfg) {
  const auto dataset =
      gen_skill_dataset(cfg.synthetic_per_class, cfg.synthetic_dims,
                        static_cast<std::size_t>(cfg.synthetic_length), substream_seed(cfg.seed, "synthetic"));
  FeatureStore store;
  store.k = -1;
  store.modality = "synthetic";
  store.family = std::string(family_choice_name(cfg.family));
  store.records.resize(dataset.samples.size());
  parallel_for(dataset.samples.size(), cfg.threads, [&](std::size_t i) {
    const auto& sample = dataset.samples[i];
    const auto fv = features_for_series(sample.series, cfg);
    FeatureRecord rec;
    rec.trial = sample.trial_id;
    rec.labels[std::string(criterion_name(dataset.criterion))] = std::string(skill_name(sample.label));
    rec.values = fv.values();
    rec.tags = detail::tag_strings(fv);
    store.records[i] = std::move(rec);
  });
  return store;
}

inline CommandResult cmd_featurize(const ExperimentConfig& cfg) {
  cfg.validate();
  CommandResult result;

  if (cfg.synthetic) {
    const auto store = featurize_synthetic(cfg);
    const auto path = feature_store_path(cfg, -1);
    save_feature_store(store, cfg, path);
    result.outputs.push_back(path);
    return result;
  }

  cfg.require_manifest();
  const auto manifest = load_manifest(cfg.manifest);

  // Ks this run needs: one pass per K for video/fused, a single pass for accel.
  std::vector<int> ks;
  if (cfg.modality == Modality::Accel)
    ks = {-1};
  else
    ks = cfg.k_grid;

  for (const int k : ks) {
    MotionCodebook cb;
    if (cfg.modality != Modality::Accel) {
      const auto cb_path = codebook_path(cfg, k);
      if (!std::filesystem::exists(cb_path))
        throw DataError("codebook not found: " + cb_path.string() + " (run the codebook command first)");
      cb = load_codebook(cb_path);
    }

    FeatureStore store;
    store.k = k;
    store.modality = std::string(modality_name(cfg.modality));
    store.family = std::string(family_choice_name(cfg.family));

    const std::size_t n = manifest.trials.size();
    if (n == 0) store.warnings.push_back("empty manifest: no trials to featurize");

    enum class Outcome { Ok, Skipped, Failed };
    std::vector<Outcome> outcome(n, Outcome::Ok);
    std::vector<FeatureRecord> records(n);
    std::vector<std::string> skip_or_fail(n);
    std::vector<std::vector<std::string>> warn(n);

    parallel_for(n, cfg.threads, [&](std::size_t i) {
      const auto& trial = manifest.trials[i];
      const bool needs_video = cfg.modality != Modality::Accel;
      const bool needs_accel = cfg.modality != Modality::Video;
      if (needs_video && trial.video.empty()) {
        outcome[i] = Outcome::Skipped;
        skip_or_fail[i] = "trial '" + trial.id + "': no video data in manifest; skipped";
        return;
      }
      if (needs_accel && trial.accel.empty()) {
        outcome[i] = Outcome::Skipped;
        skip_or_fail[i] = "trial '" + trial.id + "': no accelerometer data in manifest; skipped";
        return;
      }
      try {
        FeatureVector fv;
        if (cfg.modality == Modality::Video) {
          const auto ds = parse_stip_file(manifest.resolve(trial.video), &warn[i]);
          fv = features_for_series(encode_video(ds, cb, &warn[i]), cfg);
        } else if (cfg.modality == Modality::Accel) {
          fv = features_for_series(detail::accel_series(manifest, trial, &warn[i]), cfg);
        } else {
          const auto ds = parse_stip_file(manifest.resolve(trial.video), &warn[i]);
          const auto video_fv = features_for_series(encode_video(ds, cb, &warn[i]), cfg);
          const auto accel_fv = features_for_series(detail::accel_series(manifest, trial, &warn[i]), cfg);
          fv = early_fuse(video_fv, accel_fv);
        }
        FeatureRecord rec;
        rec.trial = trial.id;
        rec.labels = detail::label_strings(trial.labels);
        rec.values = fv.values();
        rec.tags = detail::tag_strings(fv);
        records[i] = std::move(rec);
      } catch (const Error& e) {
        outcome[i] = Outcome::Failed;
        skip_or_fail[i] = e.what();
      }
    });

    for (std::size_t i = 0; i < n; ++i) {
      store.warnings.insert(store.warnings.end(), warn[i].begin(), warn[i].end());
      switch (outcome[i]) {
        case Outcome::Ok: store.records.push_back(std::move(records[i])); break;
        case Outcome::Skipped: store.warnings.push_back(skip_or_fail[i]); break;
        case Outcome::Failed: store.failures.emplace_back(manifest.trials[i].id, skip_or_fail[i]); break;
      }
    }

    const auto path = feature_store_path(cfg, k);
    save_feature_store(store, cfg, path);
    result.outputs.push_back(path);
    result.warnings.insert(result.warnings.end(), store.warnings.begin(), store.warnings.end());
    result.failures.insert(result.failures.end(), store.failures.begin(), store.failures.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// cmd_evaluate.

// Group a store's records into per-criterion datasets (enum order). Criteria
// with no labeled records are dropped.
inline std::vector<CriterionDataset> criterion_datasets(const FeatureStore& store, Task task) {
  std::vector<CriterionDataset> out;
  for (int c = 0; c < kNumCriteria; ++c) {
    const auto criterion = static_cast<Criterion>(c);
    const std::string key(criterion_name(criterion));
    CriterionDataset ds;
    ds.criterion = criterion;
    ds.task = task;
    for (const auto& rec : store.records) {
      const auto it = rec.labels.find(key);
      if (it == rec.labels.end()) continue;
      FeatureVector fv;
      for (std::size_t j = 0; j < rec.values.size(); ++j) {
        FeatureTag tag;
        tag.coeff_index = static_cast<int>(j);  // placeholder identity; names live in store.tags
        fv.push(rec.values[j], tag);
      }
      ds.samples.push_back({rec.trial, std::move(fv), skill_from_name(it->second)});
    }
    if (!ds.samples.empty()) out.push_back(std::move(ds));
  }
  return out;
}

inline njson osats_json(const OsatsTable& table, const ExperimentConfig& cfg) {
  njson doc;
  doc["version"] = "motent-osats-v1";
  doc["config"] = cfg.config_json();
  doc["task"] = std::string(task_name(table.task));
  doc["k"] = table.k_used;
  doc["selection_mode"] = table.selection_mode;
  doc["average_accuracy"] = table.average_accuracy;
  doc["accuracy_std_criteria"] = table.accuracy_std_criteria;
  njson criteria = njson::array();
  for (const auto& r : table.reports) {
    njson rep;
    rep["criterion"] = std::string(criterion_name(r.criterion));
    rep["scheme"] = r.scheme;
    rep["accuracy"] = r.accuracy;
    rep["stdev_folds"] = r.stdev;
    rep["per_fold_accuracy"] = r.per_fold_accuracy;
    rep["fold_sizes"] = r.fold_sizes;
    njson confusion = njson::array();
    for (const auto& row : r.confusion) confusion.push_back(row);
    rep["confusion"] = std::move(confusion);
    criteria.push_back(std::move(rep));
  }
  doc["criteria"] = std::move(criteria);
  return doc;
}

inline std::string osats_csv(const OsatsTable& table, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# version = motent-osats-v1\n";
  for (const auto& [k, v] : cfg.entries()) out << "# config." << k << " = " << v << "\n";
  out << "# k = " << table.k_used << "\n";
  out << "# selection = " << table.selection_mode << "\n";
  out << "criterion,accuracy,stdev_folds,n_samples\n";
  for (const auto& r : table.reports) {
    std::size_t n = 0;
    for (std::size_t s : r.fold_sizes) n += s;
    out << criterion_name(r.criterion) << "," << detail::format_double(r.accuracy) << ","
        << detail::format_double(r.stdev) << "," << n << "\n";
  }
  out << "average," << detail::format_double(table.average_accuracy) << ","
      << detail::format_double(table.accuracy_std_criteria) << ",\n";
  return out.str();
}

inline CommandResult cmd_evaluate(const ExperimentConfig& cfg) {
  cfg.validate();
  CommandResult result;
  const auto out_dir = cfg.resolved_output_dir() / "eval";

  std::vector<int> ks;
  if (cfg.synthetic || cfg.modality == Modality::Accel)
    ks = {-1};
  else
    ks = cfg.k_grid;

  // One scheme from the config, or the documented four-scheme sweep.
  std::vector<std::pair<std::string, CvScheme>> schemes;
  if (cfg.cv_sweep) {
    schemes.emplace_back("kfold2-", CvScheme::kfold(2, cfg.cv_seed));
    schemes.emplace_back("kfold5-", CvScheme::kfold(5, cfg.cv_seed));
    schemes.emplace_back("kfold10-", CvScheme::kfold(10, cfg.cv_seed));
    schemes.emplace_back("loocv-", CvScheme::loocv());
  } else {
    schemes.emplace_back("", cfg.cv_scheme());
  }

  struct Row {
    std::string tag;
    std::string scheme;
    int k = -1;
    double average = 0.0;
    double stdev = 0.0;
  };
  std::vector<Row> rows;

  for (const int k : ks) {
    const auto store_path = feature_store_path(cfg, k);
    if (!std::filesystem::exists(store_path))
      throw DataError("feature store not found: " + store_path.string() +
                      " (run the featurize command first)");
    const auto store = load_feature_store(store_path);
    const auto datasets = criterion_datasets(store, cfg.task);
    if (datasets.empty())
      throw DataError(store_path.string() + ": no labeled records to evaluate");
    const std::string k_tag = k >= 0 ? "k" + std::to_string(k) : store.modality;

    for (const auto& [prefix, scheme] : schemes) {
      const auto table = evaluate_osats(datasets, scheme, cfg.pipeline(), k);
      const std::string tag = prefix + k_tag;
      const std::string scheme_name = scheme.kind == CvScheme::Kind::Loocv
                                          ? "loocv"
                                          : "kfold" + std::to_string(scheme.folds);
      const auto json_path = out_dir / ("osats-" + tag + ".json");
      const auto csv_path = out_dir / ("osats-" + tag + ".csv");
      atomic_write_text(json_path, osats_json(table, cfg).dump(2) + "\n");
      atomic_write_text(csv_path, osats_csv(table, cfg));
      result.outputs.push_back(json_path);
      result.outputs.push_back(csv_path);
      rows.push_back({tag, scheme_name, k, table.average_accuracy, table.accuracy_std_criteria});
    }
  }

  // Summary with the best-K annotation (ties -> first in grid order).
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].average > rows[best].average) best = i;

  njson summary;
  summary["version"] = "motent-summary-v1";
  summary["config"] = cfg.config_json();
  njson entries = njson::array();
  for (const auto& r : rows) {
    njson e;
    e["tag"] = r.tag;
    e["scheme"] = r.scheme;
    e["k"] = r.k;
    e["average_accuracy"] = r.average;
    e["accuracy_std_criteria"] = r.stdev;
    entries.push_back(std::move(e));
  }
  summary["entries"] = std::move(entries);
  summary["best_tag"] = rows[best].tag;
  summary["best_k"] = rows[best].k;
  summary["best_average_accuracy"] = rows[best].average;

  std::ostringstream csv;
  csv << "# version = motent-summary-v1\n";
  for (const auto& [k, v] : cfg.entries()) csv << "# config." << k << " = " << v << "\n";
  csv << "# best = " << rows[best].tag << "\n";
  csv << "tag,scheme,k,average_accuracy,accuracy_std_criteria\n";
  for (const auto& r : rows)
    csv << r.tag << "," << r.scheme << "," << r.k << "," << detail::format_double(r.average)
        << "," << detail::format_double(r.stdev) << "\n";

  const auto summary_json = out_dir / "summary.json";
  const auto summary_csv = out_dir / "summary.csv";
  atomic_write_text(summary_json, summary.dump(2) + "\n");
  atomic_write_text(summary_csv, csv.str());
  result.outputs.push_back(summary_json);
  result.outputs.push_back(summary_csv);
  return result;
}

// ---------------------------------------------------------------------------
// cmd_synth: the two validation curves, optionally with trend enforcement.

namespace detail {

// Spearman rank correlation (average ranks on ties).
inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rank = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> out(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = static_cast<double>(i + j) / 2.0 + 1.0;
      for (std::size_t p = i; p <= j; ++p) out[order[p]] = avg;
      i = j + 1;
    }
    return out;
  };
  const auto rx = rank(x), ry = rank(y);
  const double mx = mean_of(rx), my = mean_of(ry);
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return (dx > 0.0 && dy > 0.0) ? num / std::sqrt(dx * dy) : 0.0;
}

}  // namespace detail

// The regularity trend: mean ApEn must fall essentially monotonically with
// SNR for every radius in the grid.
inline void check_snr_curve(const CurveTable& table, const std::vector<double>& radii,
                            double max_rho = -0.9) {
  for (const double r : radii) {
    std::vector<double> snrs, means;
    for (const auto& row : table.rows) {
      if (row[1] == r) {
        snrs.push_back(row[0]);
        means.push_back(row[2]);
      }
    }
    const double rho = detail::spearman_rho(snrs, means);
    if (!(rho <= max_rho)) {
      std::ostringstream msg;
      msg << "snr curve check failed: radius " << detail::format_double(r) << " has Spearman rho "
          << detail::format_double(rho) << " (needs <= " << detail::format_double(max_rho) << ")";
      throw CheckFailure(msg.str());
    }
  }
}

// The asynchrony trend: the excess curve must peak near the quarter phase and
// return toward the baseline at both ends.
inline void check_phase_curve(const CurveTable& table) {
  if (table.rows.empty()) throw CheckFailure("phase curve check failed: empty table");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i][3] > table.rows[peak][3]) peak = i;
  const double peak_phase = table.rows[peak][0];
  const double peak_excess = table.rows[peak][3];
  if (!(peak_phase >= 0.35 * kPi && peak_phase <= 0.65 * kPi)) {
    std::ostringstream msg;
    msg << "phase curve check failed: peak at " << detail::format_double(peak_phase / kPi)
        << " pi (needs [0.35, 0.65] pi)";
    throw CheckFailure(msg.str());
  }
  if (!(peak_excess > 0.0)) throw CheckFailure("phase curve check failed: peak excess is not positive");
  const double lo = table.rows.front()[3];
  const double hi = table.rows.back()[3];
  if (!(lo <= 0.25 * peak_excess && hi <= 0.25 * peak_excess)) {
    std::ostringstream msg;
    msg << "phase curve check failed: endpoint excess (" << detail::format_double(lo) << ", "
        << detail::format_double(hi) << ") exceeds 25% of peak " << detail::format_double(peak_excess);
    throw CheckFailure(msg.str());
  }
}

inline CommandResult cmd_synth(const ExperimentConfig& cfg, bool check = false) {
  cfg.validate();
  CommandResult result;
  const auto dir = cfg.resolved_output_dir() / "curves";

  auto snr_table = snr_sweep(cfg.radii, default_snr_grid(), cfg.snr_reps,
                             substream_seed(cfg.seed, "synth/snr"));
  AsynchronyParams probe;
  probe.m = cfg.m;
  probe.tau = cfg.tau;
  probe.radius = cfg.probe_radius;
  probe.horizon = static_cast<std::size_t>(cfg.probe_horizon);
  auto phase_table = phase_sweep(default_phase_grid(), 25.0, cfg.phase_reps,
                                 substream_seed(cfg.seed, "synth/phase"), probe);

  cfg.prepend_meta(snr_table);
  cfg.prepend_meta(phase_table);
  const auto snr_path = dir / "snr_curve.csv";
  const auto phase_path = dir / "phase_curve.csv";
  atomic_write_text(snr_path, snr_table.to_csv());
  atomic_write_text(phase_path, phase_table.to_csv());
  result.outputs.push_back(snr_path);
  result.outputs.push_back(phase_path);

  if (check) {
    check_snr_curve(snr_table, cfg.radii);
    check_phase_curve(phase_table);
  }
  return result;
}

// ---------------------------------------------------------------------------
// cmd_report: human-readable roll-up of an evaluate run.

inline std::string render_report(const ExperimentConfig& cfg) {
  const auto eval_dir = cfg.resolved_output_dir() / "eval";
  const auto summary_path = eval_dir / "summary.json";
  if (!std::filesystem::exists(summary_path))
    throw DataError("no evaluation summary at " + summary_path.string() +
                    " (run the evaluate command first)");
  njson summary;
  try {
    summary = njson::parse(read_text_file(summary_path));
  } catch (const njson::exception& e) {
    throw ParseError(summary_path.string() + ": invalid JSON: " + e.what());
  }

  char buf[64];
  std::ostringstream out;
  out << "motent evaluation report\n";
  out << "========================\n";
  const auto config = summary.value("config", njson::object());
  out << "task: " << config.value("task", "?") << "   modality: " << config.value("modality", "?")
      << "   family: " << config.value("family", "?") << "\n";
  const std::string cv_shown = config.value("cv_sweep", "false") == std::string("true")
                                   ? "sweep(kfold2|kfold5|kfold10|loocv)"
                                   : config.value("cv", "?");
  out << "cv: " << cv_shown << "   selection: "
      << (config.value("sffs", "true") == std::string("true")
              ? (config.value("paper_protocol", "false") == std::string("true") ? "sffs_full_dataset"
                                                                                : "sffs_in_fold")
              : "none")
      << "   seed: " << config.value("seed", "?") << "\n\n";

  out << "tag                 K   avg accuracy   std(criteria)\n";
  const std::string best_tag = summary.value("best_tag", "");
  for (const auto& e : summary.at("entries")) {
    std::snprintf(buf, sizeof buf, "%-18s %3d   %12.4f   %13.4f", e.value("tag", "?").c_str(),
                  e.value("k", -1), e.value("average_accuracy", 0.0),
                  e.value("accuracy_std_criteria", 0.0));
    out << buf << (e.value("tag", "") == best_tag ? "   <- best" : "") << "\n";
  }

  // Per-criterion detail for the best entry.
  const auto osats_path = eval_dir / ("osats-" + best_tag + ".json");
  if (std::filesystem::exists(osats_path)) {
    njson osats;
    try {
      osats = njson::parse(read_text_file(osats_path));
    } catch (const njson::exception& e) {
      throw ParseError(osats_path.string() + ": invalid JSON: " + e.what());
    }
    out << "\nper-criterion (" << best_tag << "):\n";
    out << "criterion                 accuracy   std(folds)\n";
    for (const auto& r : osats.at("criteria")) {
      std::snprintf(buf, sizeof buf, "%-24s %9.4f   %10.4f", r.value("criterion", "?").c_str(),
                    r.value("accuracy", 0.0), r.value("stdev_folds", 0.0));
      out << buf << "\n";
    }
  }
  return out.str();
}

inline CommandResult cmd_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto text = render_report(cfg);
  const auto path = cfg.resolved_output_dir() / "report.txt";
  atomic_write_text(path, text);
  CommandResult result;
  result.outputs.push_back(path);
  return result;
}

}  // namespace motent
