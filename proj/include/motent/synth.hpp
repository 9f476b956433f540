#pragma once

// Synthetic-signal laboratory: seeded noisy sinusoids, the ApEn-vs-SNR and
// asynchrony-vs-phase sweep curves, and a labeled skill-like dataset whose
// three classes differ in regularity, jerkiness, and inter-dimension
// synchrony — the properties the entropy features are built to detect.

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "motent/core.hpp"
#include "motent/entropy.hpp"
#include "motent/rng.hpp"

namespace motent {

inline constexpr double kPi = 3.14159265358979323846264338328;

// ---------------------------------------------------------------------------
// Sinusoid generation.

struct SineSpec {
  double frequency = 8.0;  // cycles over the whole window
  double phase = 0.0;      // radians, [0, pi]
  double snr = std::numeric_limits<double>::infinity();  // linear; inf = noiseless
  std::size_t length = 1024;
  std::uint64_t seed = 0;

  void check() const {
    if (length < 16) throw ParamError("sine length must be >= 16 samples");
    if (!(frequency > 0.0) || !std::isfinite(frequency))
      throw ParamError("sine frequency must be positive and finite");
    if (!(phase >= 0.0 && phase <= kPi)) throw ParamError("sine phase must lie in [0, pi]");
    if (std::isnan(snr) || snr <= 0.0) throw ParamError("snr must be > 0 (or infinite for noiseless)");
  }
};

// Unit-amplitude sine plus seeded white Gaussian noise, with the noise scaled
// so the realized linear SNR (signal power / noise power) is exact.
inline MultiTimeSeries gen_sine(const SineSpec& spec) {
  spec.check();
  const std::size_t n = spec.length;
  MultiTimeSeries out(1, n);
  auto row = out.dim(0);

  double signal_power = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    row[t] = std::sin(2.0 * kPi * spec.frequency * static_cast<double>(t) / static_cast<double>(n) +
                      spec.phase);
    signal_power += row[t] * row[t];
  }
  signal_power /= static_cast<double>(n);

  if (std::isfinite(spec.snr)) {
    Rng rng(spec.seed);
    std::vector<double> noise(n);
    double noise_power = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      noise[t] = rng.gaussian();
      noise_power += noise[t] * noise[t];
    }
    noise_power /= static_cast<double>(n);
    if (noise_power > 0.0 && signal_power > 0.0) {
      const double scale = std::sqrt(signal_power / (spec.snr * noise_power));
      for (std::size_t t = 0; t < n; ++t) row[t] += scale * noise[t];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plot-ready curve tables (CSV with '#'-prefixed metadata lines).

struct CurveTable {
  std::vector<std::pair<std::string, std::string>> meta;  // emitted as '# key = value'
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const {
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.12g", row[c]);
        out << (c ? "," : "") << buf;
      }
      out << "\n";
    }
    return out.str();
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::vector<double> default_snr_grid() {
  std::vector<double> out;
  for (int s = 1; s <= 50; ++s) out.push_back(static_cast<double>(s));
  return out;
}

inline std::vector<double> default_phase_grid(int points = 17) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(kPi * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

// ---------------------------------------------------------------------------
// ApEn vs SNR. Substream names are derived from the grid *values*, so equal
// grid entries produce byte-identical rows and parallel evaluation order
// cannot matter.

inline CurveTable snr_sweep(const std::vector<double>& radii, const std::vector<double>& snr_grid,
                            int reps, std::uint64_t seed, std::size_t length = 1024,
                            double frequency = 8.0) {
  if (reps < 1) throw ParamError("reps must be >= 1");
  if (radii.empty()) throw ParamError("radius grid must be non-empty");

  CurveTable table;
  table.columns = {"snr", "radius", "mean_apen", "std_apen"};
  table.meta.emplace_back("reps", std::to_string(reps));
  table.meta.emplace_back("seed", std::to_string(seed));
  table.meta.emplace_back("length", std::to_string(length));
  table.meta.emplace_back("frequency", detail::format_double(frequency));

  for (double snr : snr_grid) {
    std::vector<double> acc(radii.size(), 0.0), acc2(radii.size(), 0.0);
    for (int rep = 0; rep < reps; ++rep) {
      SineSpec spec;
      spec.frequency = frequency;
      spec.length = length;
      spec.snr = snr;
      spec.seed = substream_seed(seed, "snr[" + detail::format_double(snr) + "]/rep[" + std::to_string(rep) + "]");
      const auto series = gen_sine(spec);
      const auto vals = apen_multi(series.dim(0), 1, radii, 1);
      for (std::size_t r = 0; r < radii.size(); ++r) {
        acc[r] += vals[r];
        acc2[r] += vals[r] * vals[r];
      }
    }
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const double mean = acc[r] / reps;
      const double var = std::max(0.0, acc2[r] / reps - mean * mean);
      table.rows.push_back({snr, radii[r], mean, std::sqrt(var)});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Asynchrony vs phase difference. The statistic is the time-local,
// orientation-normalized cross-entropy probe (entropy.hpp); the global
// all-pairs XApEn is provably blind to a pure phase shift between
// equal-frequency sines, so the curve is reported both raw and as the excess
// over an equal-phase baseline (two independent phase-0 realizations).

inline CurveTable phase_sweep(const std::vector<double>& phase_grid, double snr, int reps,
                              std::uint64_t seed, const AsynchronyParams& probe = {},
                              std::size_t length = 1024, double frequency = 8.0) {
  if (reps < 1) throw ParamError("reps must be >= 1");
  if (phase_grid.empty()) throw ParamError("phase grid must be non-empty");

  const auto make_sine = [&](double phase, const std::string& stream) {
    SineSpec spec;
    spec.frequency = frequency;
    spec.length = length;
    spec.snr = snr;
    spec.phase = phase;
    spec.seed = substream_seed(seed, stream);
    return gen_sine(spec);
  };

  double baseline = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto a = make_sine(0.0, "baseline/rep[" + std::to_string(rep) + "]/a");
    const auto b = make_sine(0.0, "baseline/rep[" + std::to_string(rep) + "]/b");
    baseline += asynchrony(a.dim(0), b.dim(0), probe);
  }
  baseline /= reps;

  CurveTable table;
  table.columns = {"phase", "mean_asynchrony", "std_asynchrony", "excess_asynchrony"};
  table.meta.emplace_back("snr", detail::format_double(snr));
  table.meta.emplace_back("reps", std::to_string(reps));
  table.meta.emplace_back("seed", std::to_string(seed));
  table.meta.emplace_back("length", std::to_string(length));
  table.meta.emplace_back("frequency", detail::format_double(frequency));
  table.meta.emplace_back("probe_radius", detail::format_double(probe.radius));
  table.meta.emplace_back("probe_horizon", std::to_string(probe.horizon));
  table.meta.emplace_back("baseline_asynchrony", detail::format_double(baseline));

  for (double phase : phase_grid) {
    const std::string tag = "phase[" + detail::format_double(phase) + "]";
    double acc = 0.0, acc2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto ref = make_sine(0.0, tag + "/rep[" + std::to_string(rep) + "]/ref");
      const auto shifted = make_sine(phase, tag + "/rep[" + std::to_string(rep) + "]/shift");
      const double v = asynchrony(ref.dim(0), shifted.dim(0), probe);
      acc += v;
      acc2 += v * v;
    }
    const double mean = acc / reps;
    const double var = std::max(0.0, acc2 / reps - mean * mean);
    table.rows.push_back({phase, mean, std::sqrt(var), mean - baseline});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Labeled skill-like dataset. Class generators differ in
//   - noise level (SNR 3 / 8 / 25),
//   - jerkiness (expected impulse insertions per dimension: 12 / 5 / 1),
//   - inter-dimension synchrony (phase jitter 0.5 / 0.2 / 0.05 x pi),
// beginner -> expert, so experts produce the most regular, synchronized
// motion. All dimensions share a random global phase per sample.

inline SeriesDataset gen_skill_dataset(int per_class, int dims, std::size_t length,
                                       std::uint64_t seed) {
  if (per_class < 4) throw ParamError("per_class must be >= 4 (needs to survive 2-fold splits)");
  if (dims < 1) throw ParamError("dims must be >= 1");
  if (length < 64) throw ParamError("length must be >= 64");

  constexpr double kClassSnr[3] = {3.0, 8.0, 25.0};
  constexpr double kClassImpulseMean[3] = {12.0, 5.0, 1.0};
  constexpr double kClassJitter[3] = {0.5, 0.2, 0.05};  // x pi
  constexpr std::size_t kImpulseLen = 8;
  const double cycles = 8.0;

  SeriesDataset out;
  out.criterion = Criterion::OverallPerformance;
  out.task = Task::Suturing;

  for (int cls = 0; cls < 3; ++cls) {
    for (int s = 0; s < per_class; ++s) {
      Rng rng(substream_seed(seed, "skill/c" + std::to_string(cls) + "/s" + std::to_string(s)));
      const double global_phase = rng.uniform(0.0, 2.0 * kPi);

      MultiTimeSeries series(static_cast<std::size_t>(dims), length);
      for (int d = 0; d < dims; ++d) {
        const double phase = global_phase + rng.gaussian() * kClassJitter[cls] * kPi;
        auto row = series.dim(static_cast<std::size_t>(d));

        double signal_power = 0.0;
        for (std::size_t t = 0; t < length; ++t) {
          row[t] = std::sin(2.0 * kPi * cycles * static_cast<double>(t) / static_cast<double>(length) + phase);
          signal_power += row[t] * row[t];
        }
        signal_power /= static_cast<double>(length);

        std::vector<double> noise(length);
        double noise_power = 0.0;
        for (std::size_t t = 0; t < length; ++t) {
          noise[t] = rng.gaussian();
          noise_power += noise[t] * noise[t];
        }
        noise_power /= static_cast<double>(length);
        const double scale =
            noise_power > 0.0 ? std::sqrt(signal_power / (kClassSnr[cls] * noise_power)) : 0.0;
        for (std::size_t t = 0; t < length; ++t) row[t] += scale * noise[t];

        // Decaying random kicks: the "jerk" marker.
        const int impulses = rng.poisson(kClassImpulseMean[cls]);
        for (int imp = 0; imp < impulses; ++imp) {
          const auto pos = static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(length - kImpulseLen) - 1));
          const double amp = rng.uniform(1.5, 3.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
          for (std::size_t k = 0; k < kImpulseLen; ++k)
            row[pos + k] += amp * std::exp(-static_cast<double>(k) / 2.0);
        }
      }

      LabeledSeries sample{"synthetic-c" + std::to_string(cls) + "-" + std::to_string(s),
                           std::move(series), static_cast<SkillClass>(cls)};
      out.samples.push_back(std::move(sample));
    }
  }
  return out;
}

}  // namespace motent
