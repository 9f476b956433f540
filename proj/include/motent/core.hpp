#pragma once

// Core value types shared by every stage: multi-dimensional time series,
// entropy parameters, tagged feature vectors, labels, and validation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace motent {

// ---------------------------------------------------------------------------
// Errors. Every failure mode maps onto one of these so callers (and the CLI
// exit-code mapping) can distinguish bad parameters from bad data.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamError : Error {  // invalid parameter or configuration value
  using Error::Error;
};
struct ConfigError : ParamError {  // malformed config file / CLI usage
  using ParamError::ParamError;
};
struct ShapeError : Error {  // mismatched dimensions between inputs
  using Error::Error;
};
struct LengthError : Error {  // series too short for the requested operation
  using Error::Error;
};
struct ParseError : Error {  // malformed input file (reports line/row)
  using Error::Error;
};
struct DataError : Error {  // missing, empty, or inconsistent data
  using Error::Error;
};
struct StratificationError : DataError {  // class too small for k-fold
  using DataError::DataError;
};
struct CheckFailure : Error {  // a --check style self-test did not hold
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Small stats helpers used throughout.

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Population standard deviation (divide by N).
inline double population_std(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// MultiTimeSeries: K dimensions x N time steps, row-major, rectangular.

class MultiTimeSeries {
 public:
  MultiTimeSeries(std::size_t dims, std::size_t length, double fill = 0.0)
      : dims_(dims), length_(length), values_(dims * length, fill) {
    if (dims_ < 1) throw ShapeError("series must have at least 1 dimension");
    if (length_ < 2) throw LengthError("series must have at least 2 time steps");
  }

  static MultiTimeSeries from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ShapeError("series must have at least 1 dimension");
    MultiTimeSeries out(rows.size(), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != out.length_) {
        std::ostringstream msg;
        msg << "ragged series: dimension " << k << " has length " << rows[k].size()
            << ", expected " << out.length_;
        throw ShapeError(msg.str());
      }
      std::copy(rows[k].begin(), rows[k].end(), out.values_.begin() + static_cast<std::ptrdiff_t>(k * out.length_));
    }
    return out;
  }

  std::size_t dims() const { return dims_; }
  std::size_t length() const { return length_; }

  double operator()(std::size_t k, std::size_t n) const { return values_[k * length_ + n]; }
  double& operator()(std::size_t k, std::size_t n) { return values_[k * length_ + n]; }

  std::span<const double> dim(std::size_t k) const {
    return {values_.data() + k * length_, length_};
  }
  std::span<double> dim(std::size_t k) {
    return {values_.data() + k * length_, length_};
  }

  const std::vector<double>& raw() const { return values_; }

  // Optional metadata: per-dimension names (empty or size dims()).
  std::vector<std::string> dim_names;
  std::optional<double> sample_rate_hz;

 private:
  std::size_t dims_;
  std::size_t length_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Entropy parameters.

struct EntropyParams {
  int m = 1;    // embedding dimension
  int tau = 1;  // embedding delay
  // ApEn radii, as fractions of the per-dimension population std.
  std::vector<double> radii = {0.10, 0.13, 0.16, 0.19, 0.22, 0.25};
  // XApEn radii in normalized (z-score) units. Empty -> use `radii`.
  std::vector<double> xapen_radii = {};

  static EntropyParams defaults() { return EntropyParams{}; }

  // Video features use the full ApEn grid but a single XApEn radius.
  static EntropyParams video_defaults() {
    EntropyParams p;
    p.xapen_radii = {0.20};
    return p;
  }

  const std::vector<double>& cross_radii() const {
    return xapen_radii.empty() ? radii : xapen_radii;
  }

  void check() const {
    if (m < 1) throw ParamError("embedding dimension m must be >= 1");
    if (tau < 1) throw ParamError("embedding delay tau must be >= 1");
    if (radii.empty()) throw ParamError("radius grid must be non-empty");
    const auto check_grid = [](const std::vector<double>& g, const char* what) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0 && g[i] < 1.0)) throw ParamError(std::string(what) + " must lie in (0, 1)");
        if (i > 0 && !(g[i] > g[i - 1]))
          throw ParamError(std::string(what) + " must be strictly increasing");
      }
    };
    check_grid(radii, "radii");
    check_grid(xapen_radii, "xapen radii");
  }
};

// ---------------------------------------------------------------------------
// Feature vectors carry a descriptor per entry so downstream selection and
// reports can name exactly which statistic each number is.

enum class Family { ApEn, XApEn, Dct, Dft, Smt };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::ApEn: return "apen";
    case Family::XApEn: return "xapen";
    case Family::Dct: return "dct";
    case Family::Dft: return "dft";
    case Family::Smt: return "smt";
  }
  return "?";
}

inline Family family_from_name(std::string_view s) {
  if (s == "apen") return Family::ApEn;
  if (s == "xapen") return Family::XApEn;
  if (s == "dct") return Family::Dct;
  if (s == "dft") return Family::Dft;
  if (s == "smt") return Family::Smt;
  throw ParamError("unknown feature family: " + std::string(s));
}

struct FeatureTag {
  Family family = Family::ApEn;
  std::string modality;  // "" until fused; then "video" or "accel"
  int dim_a = -1;        // source dimension (first of the pair for xapen)
  int dim_b = -1;        // second dimension for xapen, else -1
  int radius_index = -1;
  int coeff_index = -1;  // spectral coefficient / smt slot, else -1
  bool floored = false;  // xapen zero-match floor was applied

  // Canonical printable form, e.g. "video:xapen[d0,d2][r3]" or "dft[d1][c4]".
  std::string str() const {
    std::ostringstream s;
    if (!modality.empty()) s << modality << ":";
    s << family_name(family);
    if (dim_b >= 0)
      s << "[d" << dim_a << ",d" << dim_b << "]";
    else if (dim_a >= 0)
      s << "[d" << dim_a << "]";
    if (radius_index >= 0) s << "[r" << radius_index << "]";
    if (coeff_index >= 0) s << "[c" << coeff_index << "]";
    if (floored) s << "!";
    return s.str();
  }
};

class FeatureVector {
 public:
  FeatureVector() = default;

  void push(double value, FeatureTag tag) {
    values_.push_back(value);
    tags_.push_back(std::move(tag));
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  const FeatureTag& tag(std::size_t i) const { return tags_[i]; }
  FeatureTag& tag(std::size_t i) { return tags_[i]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<FeatureTag>& tags() const { return tags_; }

  std::optional<std::size_t> find(std::string_view tag_str) const {
    for (std::size_t i = 0; i < tags_.size(); ++i)
      if (tags_[i].str() == tag_str) return i;
    return std::nullopt;
  }

  void append(const FeatureVector& other) {
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    tags_.insert(tags_.end(), other.tags_.begin(), other.tags_.end());
  }

 private:
  std::vector<double> values_;
  std::vector<FeatureTag> tags_;
};

// ---------------------------------------------------------------------------
// Labels.

enum class SkillClass { Beginner = 0, Intermediate = 1, Expert = 2 };

inline std::string_view skill_name(SkillClass c) {
  switch (c) {
    case SkillClass::Beginner: return "beginner";
    case SkillClass::Intermediate: return "intermediate";
    case SkillClass::Expert: return "expert";
  }
  return "?";
}

inline SkillClass skill_from_name(std::string_view s) {
  if (s == "beginner") return SkillClass::Beginner;
  if (s == "intermediate") return SkillClass::Intermediate;
  if (s == "expert") return SkillClass::Expert;
  throw ParamError("unknown skill class: " + std::string(s));
}

// OSATS-style assessment criteria.
enum class Criterion {
  RespectForTissue = 0,
  TimeAndMotion = 1,
  InstrumentHandling = 2,
  SutureHandling = 3,
  FlowOfOperation = 4,
  KnowledgeOfProcedure = 5,
  OverallPerformance = 6,
};

inline constexpr int kNumCriteria = 7;

inline std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::RespectForTissue: return "respect_for_tissue";
    case Criterion::TimeAndMotion: return "time_and_motion";
    case Criterion::InstrumentHandling: return "instrument_handling";
    case Criterion::SutureHandling: return "suture_handling";
    case Criterion::FlowOfOperation: return "flow_of_operation";
    case Criterion::KnowledgeOfProcedure: return "knowledge_of_procedure";
    case Criterion::OverallPerformance: return "overall_performance";
  }
  return "?";
}

inline Criterion criterion_from_name(std::string_view s) {
  for (int i = 0; i < kNumCriteria; ++i) {
    const auto c = static_cast<Criterion>(i);
    if (criterion_name(c) == s) return c;
  }
  throw ParamError("unknown criterion: " + std::string(s));
}

enum class Task { Suturing = 0, KnotTying = 1 };

inline std::string_view task_name(Task t) {
  return t == Task::Suturing ? "suturing" : "knot_tying";
}

inline Task task_from_name(std::string_view s) {
  if (s == "suturing") return Task::Suturing;
  if (s == "knot_tying") return Task::KnotTying;
  throw ParamError("unknown task: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Datasets.

struct LabeledFeatures {
  std::string trial_id;
  FeatureVector features;
  SkillClass label = SkillClass::Beginner;
};

struct CriterionDataset {
  Criterion criterion = Criterion::OverallPerformance;
  Task task = Task::Suturing;
  std::vector<LabeledFeatures> samples;

  std::size_t feature_dim() const {
    return samples.empty() ? 0 : samples.front().features.size();
  }

  // Structural checks for learning: uniform dimensionality, >= 2 classes.
  void check() const {
    if (samples.empty()) throw DataError("dataset is empty");
    const std::size_t d = samples.front().features.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].features.size() != d) {
        std::ostringstream msg;
        msg << "sample " << i << " (" << samples[i].trial_id << ") has " << samples[i].features.size()
            << " features, expected " << d;
        throw ShapeError(msg.str());
      }
    }
    bool seen[3] = {false, false, false};
    for (const auto& s : samples) seen[static_cast<int>(s.label)] = true;
    if (seen[0] + seen[1] + seen[2] < 2)
      throw DataError("dataset must contain at least 2 distinct classes");
  }
};

struct LabeledSeries {
  std::string trial_id;
  MultiTimeSeries series;
  SkillClass label = SkillClass::Beginner;
};

struct SeriesDataset {
  Criterion criterion = Criterion::OverallPerformance;
  Task task = Task::Suturing;
  std::vector<LabeledSeries> samples;
};

// ---------------------------------------------------------------------------
// Normalization and validation.

// Per-dimension z-score using the population std. Dimensions with zero
// variance become all-zero; their indices are reported via `degenerate_dims`.
inline MultiTimeSeries zscore_normalize(const MultiTimeSeries& in,
                                        std::vector<std::size_t>* degenerate_dims = nullptr) {
  MultiTimeSeries out(in.dims(), in.length());
  out.dim_names = in.dim_names;
  out.sample_rate_hz = in.sample_rate_hz;
  for (std::size_t k = 0; k < in.dims(); ++k) {
    const auto src = in.dim(k);
    const double mu = mean_of(src);
    const double sd = population_std(src);
    auto dst = out.dim(k);
    if (sd == 0.0) {
      if (degenerate_dims) degenerate_dims->push_back(k);
      std::fill(dst.begin(), dst.end(), 0.0);
    } else {
      for (std::size_t n = 0; n < src.size(); ++n) dst[n] = (src[n] - mu) / sd;
    }
  }
  return out;
}

// Returns a list of human-readable violations; empty == valid. Checks that
// every value is finite and the series is long enough for both embedding
// orders m and m+1 (N - m*tau >= 2 windows at order m+1).
inline std::vector<std::string> validate(const MultiTimeSeries& series, const EntropyParams& params) {
  params.check();
  std::vector<std::string> out;
  const auto need = static_cast<std::size_t>(params.m) * static_cast<std::size_t>(params.tau) + 2;
  if (series.length() < need) {
    std::ostringstream msg;
    msg << "series length " << series.length() << " too short: need at least " << need
        << " samples for m=" << params.m << ", tau=" << params.tau;
    out.push_back(msg.str());
  }
  for (std::size_t k = 0; k < series.dims(); ++k) {
    const auto row = series.dim(k);
    for (std::size_t n = 0; n < row.size(); ++n) {
      if (!std::isfinite(row[n])) {
        std::ostringstream msg;
        msg << "dimension " << k << ", index " << n << ": non-finite value";
        out.push_back(msg.str());
        break;  // one report per dimension is enough
      }
    }
  }
  return out;
}

inline void require_valid(const MultiTimeSeries& series, const EntropyParams& params) {
  const auto violations = validate(series, params);
  if (violations.empty()) return;
  std::string joined;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) joined += "; ";
    joined += violations[i];
  }
  if (violations.front().find("too short") != std::string::npos) throw LengthError(joined);
  throw DataError(joined);
}

}  // namespace motent
