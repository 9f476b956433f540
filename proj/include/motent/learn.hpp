#pragma once

// Feature selection (SFFS), nearest-neighbor classification, cross-validation
// (LOOCV and stratified k-fold), and per-OSATS-criterion aggregation.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

#include "motent/core.hpp"
#include "motent/rng.hpp"

namespace motent {

enum class Metric { Euclidean, Manhattan, Chebyshev };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Chebyshev: return "chebyshev";
  }
  return "?";
}

inline Metric metric_from_name(std::string_view s) {
  if (s == "euclidean") return Metric::Euclidean;
  if (s == "manhattan") return Metric::Manhattan;
  if (s == "chebyshev") return Metric::Chebyshev;
  throw ParamError("unknown metric: " + std::string(s));
}

namespace detail {

inline double feature_distance(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<std::size_t>& dims, Metric metric) {
  double acc = 0.0;
  for (std::size_t d : dims) {
    const double diff = std::fabs(a[d] - b[d]);
    switch (metric) {
      case Metric::Euclidean: acc += diff * diff; break;
      case Metric::Manhattan: acc += diff; break;
      case Metric::Chebyshev: acc = std::max(acc, diff); break;
    }
  }
  return acc;  // squared for Euclidean; order-preserving either way
}

// Nearest training sample among `train_rows` (indices into the dataset),
// ties broken by the earliest position in train_rows.
inline std::size_t nearest_row(const CriterionDataset& data, const std::vector<std::size_t>& train_rows,
                               const std::vector<double>& query, const std::vector<std::size_t>& dims,
                               Metric metric) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_row = train_rows.front();
  for (std::size_t row : train_rows) {
    const double d = feature_distance(data.samples[row].features.values(), query, dims, metric);
    if (d < best) {
      best = d;
      best_row = row;
    }
  }
  return best_row;
}

inline std::vector<std::size_t> all_dims(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1-NN classification. Ties go to the lowest training-sample index.

inline SkillClass nn_classify(const CriterionDataset& train, const FeatureVector& query,
                              Metric metric = Metric::Euclidean) {
  if (train.samples.empty()) throw DataError("nn_classify: empty training set");
  if (query.size() != train.feature_dim()) {
    std::ostringstream msg;
    msg << "nn_classify: query has " << query.size() << " features, training set has "
        << train.feature_dim();
    throw ShapeError(msg.str());
  }
  const auto rows = detail::all_dims(train.samples.size());
  const auto dims = detail::all_dims(train.feature_dim());
  const std::size_t hit = detail::nearest_row(train, rows, query.values(), dims, metric);
  return train.samples[hit].label;
}

// ---------------------------------------------------------------------------
// LOOCV accuracy of 1-NN over a feature subset: the default SFFS objective.

inline double loocv_nn_accuracy(const CriterionDataset& data, const std::vector<std::size_t>& dims,
                                Metric metric = Metric::Euclidean) {
  if (data.samples.size() < 2 || dims.empty()) return 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> train_rows;
  train_rows.reserve(data.samples.size() - 1);
  for (std::size_t held = 0; held < data.samples.size(); ++held) {
    train_rows.clear();
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      if (i != held) train_rows.push_back(i);
    const std::size_t hit =
        detail::nearest_row(data, train_rows, data.samples[held].features.values(), dims, metric);
    if (data.samples[hit].label == data.samples[held].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

// ---------------------------------------------------------------------------
// SFFS: greedy forward additions with conditional backward removals, both
// accepted only on strict objective improvement; ties take the lowest index.

using Scorer = std::function<double(const CriterionDataset&, const std::vector<std::size_t>&)>;

inline Scorer make_loocv_nn_scorer(Metric metric = Metric::Euclidean) {
  return [metric](const CriterionDataset& data, const std::vector<std::size_t>& dims) {
    return loocv_nn_accuracy(data, dims, metric);
  };
}

struct SelectionStep {
  std::size_t index = 0;
  bool added = true;  // false = removed
  double objective = 0.0;
};

struct SelectionResult {
  std::vector<std::size_t> selected;      // in final (sorted) order
  std::vector<SelectionStep> trace;       // accepted steps, in order
  std::optional<double> objective;        // empty when nothing was selected
};

inline SelectionResult sffs(const CriterionDataset& data, std::size_t max_dim, const Scorer& score) {
  data.check();
  const std::size_t dim = data.feature_dim();
  SelectionResult result;
  if (max_dim == 0 || dim == 0) return result;

  std::vector<bool> in_set(dim, false);
  std::vector<std::size_t> current;
  double current_obj = -std::numeric_limits<double>::infinity();

  const auto with = [&](std::size_t idx, bool add) {
    std::vector<std::size_t> probe;
    probe.reserve(current.size() + 1);
    for (std::size_t d : current)
      if (add || d != idx) probe.push_back(d);
    if (add) {
      probe.push_back(idx);
      std::sort(probe.begin(), probe.end());
    }
    return probe;
  };

  while (current.size() < max_dim) {
    // Forward: best single addition, strict improvement required.
    double best_obj = current_obj;
    std::size_t best_idx = dim;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (in_set[idx]) continue;
      const double obj = score(data, with(idx, true));
      if (obj > best_obj) {
        best_obj = obj;
        best_idx = idx;
      }
    }
    if (best_idx == dim) break;  // no addition improves

    current = with(best_idx, true);
    in_set[best_idx] = true;
    current_obj = best_obj;
    result.trace.push_back({best_idx, true, current_obj});

    // Backward: keep removing while some removal strictly improves.
    while (current.size() > 1) {
      double best_rm_obj = current_obj;
      std::size_t rm_idx = dim;
      for (std::size_t idx : current) {
        const double obj = score(data, with(idx, false));
        if (obj > best_rm_obj) {
          best_rm_obj = obj;
          rm_idx = idx;
        }
      }
      if (rm_idx == dim) break;
      current = with(rm_idx, false);
      in_set[rm_idx] = false;
      current_obj = best_rm_obj;
      result.trace.push_back({rm_idx, false, current_obj});
    }
  }

  result.selected = current;
  if (!current.empty()) result.objective = current_obj;
  return result;
}

inline SelectionResult sffs(const CriterionDataset& data, std::size_t max_dim,
                            Metric metric = Metric::Euclidean) {
  return sffs(data, max_dim, make_loocv_nn_scorer(metric));
}

// ---------------------------------------------------------------------------
// Cross-validation.

struct CvScheme {
  enum class Kind { Loocv, KFold };
  Kind kind = Kind::Loocv;
  int folds = 0;
  std::uint64_t seed = 0;

  static CvScheme loocv() { return {}; }
  static CvScheme kfold(int k, std::uint64_t seed) {
    if (k != 2 && k != 5 && k != 10) throw ParamError("supported k-fold schemes: 2, 5, 10");
    CvScheme s;
    s.kind = Kind::KFold;
    s.folds = k;
    s.seed = seed;
    return s;
  }

  std::string str() const {
    if (kind == Kind::Loocv) return "loocv";
    std::ostringstream s;
    s << "kfold(" << folds << ", seed=" << seed << ")";
    return s.str();
  }
};

struct Pipeline {
  bool use_sffs = true;
  std::size_t sffs_max_dim = 10;
  bool paper_protocol = false;  // SFFS once on the full dataset (leaky; recorded)
  Metric metric = Metric::Euclidean;
};

struct CvReport {
  std::string scheme;
  std::string selection_mode;  // sffs_in_fold | sffs_full_dataset | none
  Criterion criterion = Criterion::OverallPerformance;
  Task task = Task::Suturing;
  std::vector<double> per_fold_accuracy;
  std::vector<std::size_t> fold_sizes;
  double accuracy = 0.0;  // fold-size-weighted mean = overall fraction correct
  double stdev = 0.0;     // across folds
  std::array<std::array<int, 3>, 3> confusion{};  // [true][predicted]
};

// Per-class seeded shuffle, then round-robin assignment: fold sizes within
// one sample of each other per class. Classes with < 2 samples cannot appear
// in every training fold.
inline std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<SkillClass>& labels,
                                                              int k, std::uint64_t seed) {
  if (k < 2) throw ParamError("k-fold needs k >= 2");
  if (labels.size() < static_cast<std::size_t>(k)) {
    std::ostringstream msg;
    msg << "cannot split " << labels.size() << " samples into " << k << " folds";
    throw DataError(msg.str());
  }
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);

  Rng rng(substream_seed(seed, "stratified_folds"));
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < 3; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      std::ostringstream msg;
      msg << "class '" << skill_name(static_cast<SkillClass>(c)) << "' has " << members.size()
          << " sample(s); stratified " << k << "-fold needs at least 2";
      throw StratificationError(msg.str());
    }
    rng.shuffle(members);
    for (std::size_t p = 0; p < members.size(); ++p)
      folds[p % static_cast<std::size_t>(k)].push_back(members[p]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

inline CvReport cross_validate(const CriterionDataset& data, const CvScheme& scheme,
                               const Pipeline& pipeline = {}) {
  data.check();
  const std::size_t n = data.samples.size();

  std::vector<std::vector<std::size_t>> folds;
  if (scheme.kind == CvScheme::Kind::Loocv) {
    folds.resize(n);
    for (std::size_t i = 0; i < n; ++i) folds[i] = {i};
  } else {
    std::vector<SkillClass> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = data.samples[i].label;
    folds = stratified_folds(labels, scheme.folds, scheme.seed);
  }

  CvReport report;
  report.scheme = scheme.str();
  report.criterion = data.criterion;
  report.task = data.task;
  report.selection_mode =
      pipeline.use_sffs ? (pipeline.paper_protocol ? "sffs_full_dataset" : "sffs_in_fold") : "none";

  // Paper-protocol replication: select once on the full dataset (the
  // held-out samples leak into selection; the report says so).
  std::vector<std::size_t> global_dims;
  if (pipeline.use_sffs && pipeline.paper_protocol) {
    const auto sel = sffs(data, pipeline.sffs_max_dim, pipeline.metric);
    global_dims = sel.selected.empty() ? detail::all_dims(data.feature_dim()) : sel.selected;
  }

  std::size_t total_correct = 0;
  for (const auto& test_rows : folds) {
    if (test_rows.empty()) continue;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(n - test_rows.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!std::binary_search(test_rows.begin(), test_rows.end(), i)) train_rows.push_back(i);
    if (train_rows.empty()) throw DataError("cross_validate: empty training fold");

    // Verify every class with test presence is learnable; k-fold guarantees
    // it by stratification, LOOCV intentionally does not.
    if (scheme.kind == CvScheme::Kind::KFold) {
      bool train_has[3] = {false, false, false};
      for (std::size_t i : train_rows) train_has[static_cast<int>(data.samples[i].label)] = true;
      bool data_has[3] = {false, false, false};
      for (const auto& s : data.samples) data_has[static_cast<int>(s.label)] = true;
      for (int c = 0; c < 3; ++c)
        if (data_has[c] && !train_has[c])
          throw StratificationError(std::string("class '") + std::string(skill_name(static_cast<SkillClass>(c))) +
                                    "' absent from a training fold");
    }

    std::vector<std::size_t> dims;
    if (!pipeline.use_sffs) {
      dims = detail::all_dims(data.feature_dim());
    } else if (pipeline.paper_protocol) {
      dims = global_dims;
    } else {
      CriterionDataset train_set;
      train_set.criterion = data.criterion;
      train_set.task = data.task;
      for (std::size_t i : train_rows) train_set.samples.push_back(data.samples[i]);
      const auto sel = sffs(train_set, pipeline.sffs_max_dim, pipeline.metric);
      dims = sel.selected.empty() ? detail::all_dims(data.feature_dim()) : sel.selected;
    }

    std::size_t fold_correct = 0;
    for (std::size_t row : test_rows) {
      const std::size_t hit =
          detail::nearest_row(data, train_rows, data.samples[row].features.values(), dims, pipeline.metric);
      const auto predicted = data.samples[hit].label;
      const auto truth = data.samples[row].label;
      ++report.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
      if (predicted == truth) ++fold_correct;
    }
    total_correct += fold_correct;
    report.per_fold_accuracy.push_back(static_cast<double>(fold_correct) /
                                       static_cast<double>(test_rows.size()));
    report.fold_sizes.push_back(test_rows.size());
  }

  report.accuracy = static_cast<double>(total_correct) / static_cast<double>(n);
  const double mu = mean_of(report.per_fold_accuracy);
  double var = 0.0;
  for (double a : report.per_fold_accuracy) var += (a - mu) * (a - mu);
  report.stdev = report.per_fold_accuracy.empty()
                     ? 0.0
                     : std::sqrt(var / static_cast<double>(report.per_fold_accuracy.size()));
  return report;
}

// ---------------------------------------------------------------------------
// OSATS aggregation: one report per criterion, unweighted mean accuracy.

struct OsatsTable {
  Task task = Task::Suturing;
  int k_used = -1;  // codebook size the features came from, if any
  std::string selection_mode;
  std::vector<CvReport> reports;
  double average_accuracy = 0.0;       // the paper's A-hat
  double accuracy_std_criteria = 0.0;  // std across criteria (labeled as such)
};

inline OsatsTable evaluate_osats(const std::vector<CriterionDataset>& datasets, const CvScheme& scheme,
                                 const Pipeline& pipeline = {}, int k_used = -1) {
  if (datasets.empty()) throw DataError("evaluate_osats: no criterion datasets");
  OsatsTable table;
  table.task = datasets.front().task;
  table.k_used = k_used;
  for (const auto& ds : datasets) table.reports.push_back(cross_validate(ds, scheme, pipeline));
  table.selection_mode = table.reports.front().selection_mode;
  std::vector<double> accs;
  accs.reserve(table.reports.size());
  for (const auto& r : table.reports) accs.push_back(r.accuracy);
  table.average_accuracy = mean_of(accs);
  table.accuracy_std_criteria = population_std(accs);
  return table;
}

}  // namespace motent
