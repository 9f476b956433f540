#pragma once

// External data ingestion: interest-point descriptor files, motion-codebook
// learning (k-means), per-frame encoding to K x N series, accelerometer CSVs,
// and early (concatenation) fusion of per-modality feature vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "motent/core.hpp"
#include "motent/rng.hpp"

namespace motent {

// ---------------------------------------------------------------------------
// Interest-point descriptors.

struct DescriptorSet {
  // One row per interest point: 1-based frame index + fixed-length descriptor.
  std::vector<int> frame_index;
  std::vector<std::vector<double>> descriptor;
  std::size_t descriptor_dim = 0;
  int video_length_frames = 0;  // defaults to the max frame index seen

  std::size_t size() const { return frame_index.size(); }
};

// Text format: '#' comment lines; data rows of 6 point fields
// (y x t sigma2 tau2 confidence) followed by D descriptor reals,
// whitespace-delimited. D is fixed by the first data row.
inline DescriptorSet parse_stip_file(const std::filesystem::path& path,
                                     std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open descriptor file: " + path.string());

  DescriptorSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream row(line);
    std::vector<double> fields;
    double v;
    while (row >> v) fields.push_back(v);
    if (!row.eof()) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << ": non-numeric field";
      throw ParseError(msg.str());
    }
    if (fields.size() < 7) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << ": expected 6 point fields plus descriptor, got "
          << fields.size() << " fields";
      throw ParseError(msg.str());
    }
    const std::size_t d = fields.size() - 6;
    if (out.descriptor_dim == 0) {
      out.descriptor_dim = d;
    } else if (d != out.descriptor_dim) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << ": descriptor length " << d
          << " inconsistent with earlier rows (" << out.descriptor_dim << ")";
      throw ParseError(msg.str());
    }

    const double t = fields[2];
    const int frame = static_cast<int>(std::llround(t));
    if (frame < 1 || std::fabs(t - frame) > 1e-9) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_no << ": frame index must be a positive integer, got " << t;
      throw ParseError(msg.str());
    }
    out.frame_index.push_back(frame);
    out.descriptor.emplace_back(fields.begin() + 6, fields.end());
    out.video_length_frames = std::max(out.video_length_frames, frame);
  }

  if (out.size() == 0 && warnings)
    warnings->push_back(path.string() + ": no descriptor rows (comments/empty only)");
  return out;
}

// ---------------------------------------------------------------------------
// Motion codebook (k-means over pooled expert descriptors).

inline const std::vector<int>& codebook_k_grid() {
  static const std::vector<int> grid = {2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20};
  return grid;
}

struct CodebookMeta {
  std::uint64_t seed = 0;
  int iterations = 0;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // inertia after each assignment step
};

struct MotionCodebook {
  int k = 0;
  std::size_t descriptor_dim = 0;
  std::vector<double> centroids;  // k x descriptor_dim, row-major
  CodebookMeta meta;

  std::span<const double> centroid(int c) const {
    return {centroids.data() + static_cast<std::size_t>(c) * descriptor_dim, descriptor_dim};
  }
};

namespace detail {

inline double sqdist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

// Seeded k-means++ initialization followed by Lloyd iterations. Deterministic
// per seed. Empty clusters are re-seeded from the point farthest from its
// centroid. K must come from the documented experiment grid.
inline MotionCodebook train_codebook(const std::vector<DescriptorSet>& expert_sets, int k,
                                     std::uint64_t seed, int max_iters = 100, double tol = 1e-10) {
  if (std::find(codebook_k_grid().begin(), codebook_k_grid().end(), k) == codebook_k_grid().end()) {
    std::ostringstream msg;
    msg << "K=" << k << " is not in the codebook grid [2..10, 12, 14, 16, 18, 20]";
    throw ParamError(msg.str());
  }

  // Pool descriptors in input order.
  std::size_t dim = 0;
  std::vector<std::span<const double>> points;
  for (const auto& set : expert_sets) {
    if (set.size() == 0) continue;
    if (dim == 0) dim = set.descriptor_dim;
    if (set.descriptor_dim != dim) {
      std::ostringstream msg;
      msg << "descriptor length mismatch across sets: " << set.descriptor_dim << " vs " << dim;
      throw ShapeError(msg.str());
    }
    for (const auto& row : set.descriptor) points.emplace_back(row.data(), row.size());
  }
  if (points.size() < static_cast<std::size_t>(k)) {
    std::ostringstream msg;
    msg << "need at least " << k << " pooled descriptors to train K=" << k << ", got " << points.size();
    throw DataError(msg.str());
  }

  Rng rng(seed);
  const std::size_t n = points.size();

  // k-means++ spreading.
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
  std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const auto last = points[chosen.back()];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best_d2[i] = std::min(best_d2[i], detail::sqdist(points[i], last));
      total += best_d2[i];
    }
    std::size_t pick = 0;
    if (total <= 0.0) {  // all remaining points coincide with a centroid
      pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best_d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
  }

  MotionCodebook cb;
  cb.k = k;
  cb.descriptor_dim = dim;
  cb.centroids.resize(static_cast<std::size_t>(k) * dim);
  for (int c = 0; c < k; ++c)
    std::copy(points[chosen[static_cast<std::size_t>(c)]].begin(), points[chosen[static_cast<std::size_t>(c)]].end(),
              cb.centroids.begin() + static_cast<std::size_t>(c) * dim);
  cb.meta.seed = seed;

  std::vector<int> assign(n, 0);
  std::vector<double> dist_to_own(n, 0.0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = detail::sqdist(points[i], cb.centroid(c));
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      assign[i] = best_c;
      dist_to_own[i] = best;
      inertia += best;
    }
    cb.meta.inertia_trace.push_back(inertia);
    cb.meta.inertia = inertia;
    cb.meta.iterations = iter + 1;

    // Update.
    std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(assign[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += points[i][j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // Re-seed from the point farthest from its current centroid.
        const auto far = static_cast<std::size_t>(
            std::max_element(dist_to_own.begin(), dist_to_own.end()) - dist_to_own.begin());
        std::copy(points[far].begin(), points[far].end(),
                  cb.centroids.begin() + static_cast<std::size_t>(c) * dim);
        dist_to_own[far] = 0.0;  // don't hand the same point to two empty clusters
      } else {
        for (std::size_t j = 0; j < dim; ++j)
          cb.centroids[static_cast<std::size_t>(c) * dim + j] =
              sums[static_cast<std::size_t>(c) * dim + j] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }

    if (prev_inertia - inertia <= tol * std::max(1.0, prev_inertia)) break;
    prev_inertia = inertia;
  }
  return cb;
}

// Nearest centroid, ties to the lowest index.
inline int nearest_centroid(const MotionCodebook& cb, std::span<const double> descriptor) {
  double best = std::numeric_limits<double>::infinity();
  int best_c = 0;
  for (int c = 0; c < cb.k; ++c) {
    const double d2 = detail::sqdist(descriptor, cb.centroid(c));
    if (d2 < best) {
      best = d2;
      best_c = c;
    }
  }
  return best_c;
}

// K x N per-frame motion-class count series. Frames are 1-based in the
// descriptor set and map to columns 0..N-1; frames with no interest points
// stay all-zero.
inline MultiTimeSeries encode_video(const DescriptorSet& ds, const MotionCodebook& cb,
                                    std::vector<std::string>* warnings = nullptr) {
  if (ds.size() > 0 && ds.descriptor_dim != cb.descriptor_dim) {
    std::ostringstream msg;
    msg << "descriptor length " << ds.descriptor_dim << " does not match codebook dimension "
        << cb.descriptor_dim;
    throw ShapeError(msg.str());
  }
  const int n = ds.video_length_frames;
  if (n < 2) {
    std::ostringstream msg;
    msg << "video length " << n << " frames is too short to encode (need >= 2)";
    throw DataError(msg.str());
  }
  MultiTimeSeries series(static_cast<std::size_t>(cb.k), static_cast<std::size_t>(n));
  if (ds.size() == 0 && warnings) warnings->push_back("empty descriptor set: all-zero series");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int frame = ds.frame_index[i];
    if (frame < 1 || frame > n) {
      std::ostringstream msg;
      msg << "descriptor row " << i << " has frame index " << frame << " outside [1, " << n << "]";
      throw DataError(msg.str());
    }
    const int c = nearest_centroid(cb, {ds.descriptor[i].data(), ds.descriptor[i].size()});
    series(static_cast<std::size_t>(c), static_cast<std::size_t>(frame - 1)) += 1.0;
  }
  series.sample_rate_hz = 30.0;
  return series;
}

// ---------------------------------------------------------------------------
// Codebook persistence: versioned text artifact, layout documented in README.

inline void save_codebook(const MotionCodebook& cb, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "motent-codebook v1\n";
  out << "k " << cb.k << "\n";
  out << "d " << cb.descriptor_dim << "\n";
  out << "seed " << cb.meta.seed << "\n";
  out << "iterations " << cb.meta.iterations << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", cb.meta.inertia);
  out << "inertia " << buf << "\n";
  for (int c = 0; c < cb.k; ++c) {
    out << "c";
    for (double v : cb.centroid(c)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw DataError("cannot write codebook: " + path.string());
    f << out.str();
  }
  std::filesystem::rename(tmp, path);
}

inline MotionCodebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open codebook: " + path.string());
  std::string header;
  std::getline(in, header);
  if (header != "motent-codebook v1")
    throw ParseError(path.string() + ": not a motent codebook (bad header)");
  MotionCodebook cb;
  std::string key;
  std::size_t dim = 0;
  while (in >> key) {
    if (key == "k") in >> cb.k;
    else if (key == "d") in >> dim;
    else if (key == "seed") in >> cb.meta.seed;
    else if (key == "iterations") in >> cb.meta.iterations;
    else if (key == "inertia") in >> cb.meta.inertia;
    else if (key == "c") {
      cb.descriptor_dim = dim;
      for (std::size_t j = 0; j < dim; ++j) {
        double v;
        if (!(in >> v)) throw ParseError(path.string() + ": truncated centroid row");
        cb.centroids.push_back(v);
      }
    } else {
      throw ParseError(path.string() + ": unknown field '" + key + "'");
    }
  }
  if (cb.k < 2 || cb.centroids.size() != static_cast<std::size_t>(cb.k) * dim)
    throw ParseError(path.string() + ": centroid count does not match header");
  return cb;
}

// ---------------------------------------------------------------------------
// Accelerometers.

enum class Sensor { Wrist, NeedleHolder, LeftWrist, RightWrist };

struct AccelTrace {
  MultiTimeSeries samples;  // 3 x Q: x, y, z
  Sensor sensor_id = Sensor::Wrist;
  double sample_rate_hz = 0.0;

  AccelTrace() : samples(3, 2) {}
  std::size_t length() const { return samples.length(); }
};

// CSV with header `timestamp,x,y,z`, timestamps in seconds, strictly
// increasing. Sample rate is inferred from the median timestamp delta.
inline AccelTrace parse_accel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open accelerometer file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  // Trim trailing CR and whitespace from the header.
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
  if (line != "timestamp,x,y,z")
    throw ParseError(path.string() + ": expected header 'timestamp,x,y,z', got '" + line + "'");

  std::vector<double> ts;
  std::vector<std::array<double, 3>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    ++row_no;
    std::istringstream ss(line);
    double vals[4];
    for (int i = 0; i < 4; ++i) {
      std::string cell;
      if (!std::getline(ss, cell, ',')) {
        std::ostringstream msg;
        msg << path.string() << ": row " << row_no << ": expected 4 comma-separated cells";
        throw ParseError(msg.str());
      }
      try {
        std::size_t pos = 0;
        vals[i] = std::stod(cell, &pos);
        while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\t')) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << path.string() << ": row " << row_no << ": non-numeric cell '" << cell << "'";
        throw ParseError(msg.str());
      }
    }
    if (!ts.empty() && vals[0] <= ts.back()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << row_no << ": non-monotonic timestamp";
      throw ParseError(msg.str());
    }
    ts.push_back(vals[0]);
    rows.push_back({vals[1], vals[2], vals[3]});
  }
  if (rows.size() < 2) {
    std::ostringstream msg;
    msg << path.string() << ": need at least 2 samples, got " << rows.size();
    throw DataError(msg.str());
  }

  AccelTrace trace;
  trace.samples = MultiTimeSeries(3, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t d = 0; d < 3; ++d) trace.samples(d, i) = rows[i][d];
  trace.samples.dim_names = {"x", "y", "z"};

  std::vector<double> deltas(ts.size() - 1);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) deltas[i] = ts[i + 1] - ts[i];
  std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2), deltas.end());
  const double median_dt = deltas[deltas.size() / 2];
  trace.sample_rate_hz = median_dt > 0.0 ? 1.0 / median_dt : 0.0;
  trace.samples.sample_rate_hz = trace.sample_rate_hz;
  return trace;
}

// Surfaces |a| > threshold excursions; data curation stays manual.
inline std::vector<std::string> amplitude_spike_warnings(const AccelTrace& t, double threshold) {
  std::vector<std::string> out;
  const char* axes = "xyz";
  for (std::size_t d = 0; d < 3; ++d) {
    const auto row = t.samples.dim(d);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::fabs(row[i]) > threshold) {
        std::ostringstream msg;
        msg << "amplitude spike: axis " << axes[d] << ", sample " << i << ", |" << row[i] << "| > "
            << threshold;
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

// 6 x Q series from two pre-aligned traces, Q = min length, dimension order
// [a.x, a.y, a.z, b.x, b.y, b.z]. Truncation and rate mismatch are warned.
inline MultiTimeSeries combine_accel(const AccelTrace& a, const AccelTrace& b,
                                     std::vector<std::string>* warnings = nullptr) {
  const std::size_t q = std::min(a.length(), b.length());
  if (q < 2) throw DataError("combine_accel: traces must have at least 2 samples");
  if (warnings && a.length() != b.length()) {
    std::ostringstream msg;
    msg << "combine_accel: truncating to common length " << q << " (inputs " << a.length() << ", "
        << b.length() << ")";
    warnings->push_back(msg.str());
  }
  if (warnings && a.sample_rate_hz > 0.0 && b.sample_rate_hz > 0.0 &&
      std::fabs(a.sample_rate_hz - b.sample_rate_hz) > 1e-9 * std::max(a.sample_rate_hz, b.sample_rate_hz)) {
    std::ostringstream msg;
    msg << "combine_accel: sample rates differ (" << a.sample_rate_hz << " vs " << b.sample_rate_hz
        << "); keeping the first";
    warnings->push_back(msg.str());
  }
  MultiTimeSeries out(6, q);
  for (std::size_t d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < q; ++i) {
      out(d, i) = a.samples(d, i);
      out(d + 3, i) = b.samples(d, i);
    }
  out.dim_names = {"a.x", "a.y", "a.z", "b.x", "b.y", "b.z"};
  out.sample_rate_hz = a.sample_rate_hz;
  return out;
}

// Single-sensor path: the 3 x Q trace as-is.
inline MultiTimeSeries accel_to_series(const AccelTrace& t) {
  MultiTimeSeries out = t.samples;
  out.sample_rate_hz = t.sample_rate_hz;
  return out;
}

// ---------------------------------------------------------------------------
// Early fusion: concatenate per-modality feature vectors, prefixing each
// entry's tag with its modality so round-trip lookup by tag still works.

inline FeatureVector early_fuse(const FeatureVector& video, const FeatureVector& accel) {
  FeatureVector out;
  for (std::size_t i = 0; i < video.size(); ++i) {
    FeatureTag tag = video.tag(i);
    tag.modality = "video";
    out.push(video[i], tag);
  }
  for (std::size_t i = 0; i < accel.size(); ++i) {
    FeatureTag tag = accel.tag(i);
    tag.modality = "accel";
    out.push(accel[i], tag);
  }
  return out;
}

}  // namespace motent
