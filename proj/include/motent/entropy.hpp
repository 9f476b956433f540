#pragma once

// Approximate entropy (ApEn), cross approximate entropy (XApEn), and a
// time-local asynchrony probe built on the same conditional-probability
// statistic. Conventions used everywhere (kernels, features, oracles):
//   - Chebyshev (max-coordinate) distance between embedding vectors
//   - a pair matches when distance <= r (boundary counts as a match)
//   - ApEn includes the self-match; r is a fraction of the population std
//   - XApEn z-scores both series first; r is absolute in normalized units;
//     zero match counts are floored to 1 and flagged
//   - per-order normalization: order m averages over N-(m-1)*tau windows,
//     order m+1 over N-m*tau

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "motent/core.hpp"

namespace motent {

// ---------------------------------------------------------------------------
// Delay embedding. Kernels below index the raw series directly; this
// materialized form exists for callers and tests.

struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows x cols, row-major

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

inline EmbeddingMatrix embed(std::span<const double> x, int m, int tau) {
  if (m < 1) throw ParamError("embedding dimension m must be >= 1");
  if (tau < 1) throw ParamError("embedding delay tau must be >= 1");
  const std::size_t span = static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(tau);
  if (x.size() < span + 2) {
    std::ostringstream msg;
    msg << "series length " << x.size() << " too short to embed: need at least " << (span + 2)
        << " samples for m=" << m << ", tau=" << tau;
    throw LengthError(msg.str());
  }
  EmbeddingMatrix e;
  e.rows = x.size() - span;
  e.cols = static_cast<std::size_t>(m);
  e.data.resize(e.rows * e.cols);
  for (std::size_t i = 0; i < e.rows; ++i)
    for (std::size_t t = 0; t < e.cols; ++t)
      e.data[i * e.cols + t] = x[i + t * static_cast<std::size_t>(tau)];
  return e;
}

namespace detail {

// Sorts radii ascending, remembering the original slots so results can be
// returned in caller order. Counting is integer-exact, so evaluating all
// radii in one pass is identical to evaluating them one at a time.
struct RadiusGrid {
  std::vector<double> sorted;        // ascending absolute radii
  std::vector<std::size_t> to_slot;  // sorted index -> caller index
  double rmax = 0.0;

  explicit RadiusGrid(std::span<const double> radii) {
    std::vector<std::size_t> order(radii.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    sorted.reserve(radii.size());
    to_slot = order;
    for (std::size_t k : order) sorted.push_back(radii[k]);
    rmax = sorted.empty() ? 0.0 : sorted.back();
  }

  // First sorted radius that accepts distance d, or size() if none.
  std::size_t first_accepting(double d) const {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), d) - sorted.begin());
  }
};

// Chebyshev distance between the order-m embedding windows starting at i and
// j, with early exit once the bound is exceeded (returns a value > bound).
inline double cheb_m(const double* x, std::size_t i, std::size_t j, int m, int tau, double bound) {
  double d = 0.0;
  const std::size_t ti = i, tj = j;
  for (int t = 0; t < m; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * static_cast<std::size_t>(tau);
    const double diff = std::fabs(x[ti + off] - x[tj + off]);
    if (diff > d) d = diff;
    if (d > bound) return d;
  }
  return d;
}

// Same, but coordinates come from two different series (x1 window vs x2 window).
inline double cheb_m2(const double* x1, const double* x2, std::size_t i, std::size_t j, int m, int tau,
                      double bound) {
  double d = 0.0;
  for (int t = 0; t < m; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * static_cast<std::size_t>(tau);
    const double diff = std::fabs(x1[i + off] - x2[j + off]);
    if (diff > d) d = diff;
    if (d > bound) return d;
  }
  return d;
}

// mean over rows of ln(count/norm), in row order (deterministic).
inline double mean_log_ratio(const std::vector<std::uint32_t>& counts, std::size_t rows, std::size_t stride,
                             std::size_t slot, double norm) {
  double s = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    s += std::log(static_cast<double>(counts[i * stride + slot]) / norm);
  return s / static_cast<double>(rows);
}

inline void require_pair_lengths(std::size_t n, int m, int tau, std::string_view what) {
  const auto need = static_cast<std::size_t>(m) * static_cast<std::size_t>(tau) + 2;
  if (n < need) {
    std::ostringstream msg;
    msg << what << ": series length " << n << " too short: need at least " << need << " samples for m=" << m
        << ", tau=" << tau;
    throw LengthError(msg.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ApEn. Evaluates every radius in a single pass over pairs; returns values in
// the caller's radius order. Radii are fractions of the population std; a
// zero-variance series yields 0 for every radius.

inline std::vector<double> apen_multi(std::span<const double> x, int m, std::span<const double> r_fractions,
                                      int tau = 1) {
  if (m < 1) throw ParamError("embedding dimension m must be >= 1");
  if (tau < 1) throw ParamError("embedding delay tau must be >= 1");
  if (r_fractions.empty()) throw ParamError("radius grid must be non-empty");
  for (double r : r_fractions)
    if (!(r > 0.0 && r < 1.0)) throw ParamError("radii must lie in (0, 1)");
  if (!all_finite(x)) throw DataError("series contains non-finite values");
  detail::require_pair_lengths(x.size(), m, tau, "apen");

  const double sd = population_std(x);
  if (sd == 0.0) return std::vector<double>(r_fractions.size(), 0.0);

  std::vector<double> abs_radii(r_fractions.begin(), r_fractions.end());
  for (double& r : abs_radii) r *= sd;
  const detail::RadiusGrid grid(abs_radii);
  const std::size_t R = grid.sorted.size();

  const std::size_t n_m = x.size() - static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(tau);
  const std::size_t n_m1 = x.size() - static_cast<std::size_t>(m) * static_cast<std::size_t>(tau);

  // counts[i*R + k] over the ascending radius grid; self-match included.
  std::vector<std::uint32_t> counts_m(n_m * R, 1u);
  std::vector<std::uint32_t> counts_m1(n_m1 * R, 1u);

  // Enumerate pairs through a first-coordinate sort: any pair matching at
  // either order satisfies |x_i - x_j| <= rmax, so a sliding window over the
  // sorted first coordinates visits every counting pair.
  std::vector<std::uint32_t> order(n_m);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });

  const double* xp = x.data();
  for (std::size_t a = 0; a < n_m; ++a) {
    const std::uint32_t i = order[a];
    for (std::size_t b = a + 1; b < n_m; ++b) {
      const std::uint32_t j = order[b];
      if (x[j] - x[i] > grid.rmax) break;
      const double dm = detail::cheb_m(xp, i, j, m, tau, grid.rmax);
      if (dm > grid.rmax) continue;
      const std::size_t k0 = grid.first_accepting(dm);
      for (std::size_t k = k0; k < R; ++k) {
        ++counts_m[i * R + k];
        ++counts_m[j * R + k];
      }
      if (i < n_m1 && j < n_m1) {
        const std::size_t ext = static_cast<std::size_t>(m) * static_cast<std::size_t>(tau);
        const double dm1 = std::max(dm, std::fabs(xp[i + ext] - xp[j + ext]));
        if (dm1 > grid.rmax) continue;
        const std::size_t k1 = grid.first_accepting(dm1);
        for (std::size_t k = k1; k < R; ++k) {
          ++counts_m1[i * R + k];
          ++counts_m1[j * R + k];
        }
      }
    }
  }

  std::vector<double> out(R, 0.0);
  for (std::size_t k = 0; k < R; ++k) {
    const double omega_m = detail::mean_log_ratio(counts_m, n_m, R, k, static_cast<double>(n_m));
    const double omega_m1 = detail::mean_log_ratio(counts_m1, n_m1, R, k, static_cast<double>(n_m1));
    out[grid.to_slot[k]] = omega_m - omega_m1;
  }
  return out;
}

inline double apen(std::span<const double> x, int m, double r_fraction, int tau = 1) {
  const double r[] = {r_fraction};
  return apen_multi(x, m, r, tau)[0];
}

// ---------------------------------------------------------------------------
// XApEn.

struct CrossEntropy {
  double value = 0.0;
  bool floored = false;  // some window had zero matches and was floored to 1
};

inline std::vector<CrossEntropy> xapen_multi(std::span<const double> a, std::span<const double> b, int m,
                                             std::span<const double> radii, int tau = 1) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "xapen: series lengths differ (" << a.size() << " vs " << b.size() << ")";
    throw ShapeError(msg.str());
  }
  if (m < 1) throw ParamError("embedding dimension m must be >= 1");
  if (tau < 1) throw ParamError("embedding delay tau must be >= 1");
  if (radii.empty()) throw ParamError("radius grid must be non-empty");
  for (double r : radii)
    if (!(r > 0.0 && r < 1.0)) throw ParamError("radii must lie in (0, 1)");
  if (!all_finite(a) || !all_finite(b)) throw DataError("series contains non-finite values");
  detail::require_pair_lengths(a.size(), m, tau, "xapen");

  const std::size_t n = a.size();
  std::vector<double> x1(a.begin(), a.end()), x2(b.begin(), b.end());
  for (auto* v : {&x1, &x2}) {
    const double mu = mean_of(*v);
    const double sd = population_std(*v);
    for (double& e : *v) e = sd == 0.0 ? 0.0 : (e - mu) / sd;
  }

  const detail::RadiusGrid grid(radii);
  const std::size_t R = grid.sorted.size();
  const std::size_t n_m = n - static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(tau);
  const std::size_t n_m1 = n - static_cast<std::size_t>(m) * static_cast<std::size_t>(tau);

  std::vector<std::uint32_t> counts_m(n_m * R, 0u);
  std::vector<std::uint32_t> counts_m1(n_m1 * R, 0u);

  // Window-prune on x2's first coordinates.
  std::vector<std::uint32_t> order(n_m);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t p, std::uint32_t q) { return x2[p] < x2[q]; });
  std::vector<double> firsts(n_m);
  for (std::size_t p = 0; p < n_m; ++p) firsts[p] = x2[order[p]];

  const std::size_t ext = static_cast<std::size_t>(m) * static_cast<std::size_t>(tau);
  for (std::size_t i = 0; i < n_m; ++i) {
    const double lo = x1[i] - grid.rmax;
    const double hi = x1[i] + grid.rmax;
    auto p = static_cast<std::size_t>(std::lower_bound(firsts.begin(), firsts.end(), lo) - firsts.begin());
    for (; p < n_m && firsts[p] <= hi; ++p) {
      const std::uint32_t j = order[p];
      const double dm = detail::cheb_m2(x1.data(), x2.data(), i, j, m, tau, grid.rmax);
      if (dm > grid.rmax) continue;
      for (std::size_t k = grid.first_accepting(dm); k < R; ++k) ++counts_m[i * R + k];
      if (i < n_m1 && j < n_m1) {
        const double dm1 = std::max(dm, std::fabs(x1[i + ext] - x2[j + ext]));
        if (dm1 > grid.rmax) continue;
        for (std::size_t k = grid.first_accepting(dm1); k < R; ++k) ++counts_m1[i * R + k];
      }
    }
  }

  std::vector<CrossEntropy> out(R);
  for (std::size_t k = 0; k < R; ++k) {
    bool floored = false;
    double omega_m = 0.0, omega_m1 = 0.0;
    for (std::size_t i = 0; i < n_m; ++i) {
      std::uint32_t c = counts_m[i * R + k];
      if (c == 0) {
        c = 1;
        floored = true;
      }
      omega_m += std::log(static_cast<double>(c) / static_cast<double>(n_m));
    }
    omega_m /= static_cast<double>(n_m);
    for (std::size_t i = 0; i < n_m1; ++i) {
      std::uint32_t c = counts_m1[i * R + k];
      if (c == 0) {
        c = 1;
        floored = true;
      }
      omega_m1 += std::log(static_cast<double>(c) / static_cast<double>(n_m1));
    }
    omega_m1 /= static_cast<double>(n_m1);
    out[grid.to_slot[k]] = {omega_m - omega_m1, floored};
  }
  return out;
}

inline double xapen(std::span<const double> a, std::span<const double> b, int m, double r, int tau = 1) {
  const double radii[] = {r};
  return xapen_multi(a, b, m, radii, tau)[0].value;
}

// ---------------------------------------------------------------------------
// Time-local asynchrony probe. The global XApEn statistic compares every
// window against every other and is therefore blind to a constant time shift
// between two equal-frequency oscillations (the shifted signal sweeps out the
// same set of embedding vectors). This probe keeps the same conditional-
// probability form but (a) only admits matches within `horizon` steps of the
// query window, so alignment in time matters, and (b) takes the minimum over
// the two orientations of b, so an anti-phase pair (b = -a) still reads as
// synchronized. Larger values = more asynchronous.

struct AsynchronyParams {
  int m = 1;
  int tau = 1;
  double radius = 0.20;       // normalized units
  std::size_t horizon = 32;   // max |i - j| admitted as a candidate match
};

namespace detail {

inline double local_cross_stat(const std::vector<double>& x1, const std::vector<double>& x2, int m, int tau,
                               double r, std::size_t horizon) {
  const std::size_t n = x1.size();
  const auto order_rows = [&](int order) {
    return n - static_cast<std::size_t>(order - 1) * static_cast<std::size_t>(tau);
  };
  const auto phi = [&](int order) {
    const std::size_t rows = order_rows(order);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const std::size_t lo = i > horizon ? i - horizon : 0;
      const std::size_t hi = std::min(rows, i + horizon + 1);
      std::uint32_t cnt = 0;
      for (std::size_t j = lo; j < hi; ++j)
        if (cheb_m2(x1.data(), x2.data(), i, j, order, tau, r) <= r) ++cnt;
      if (cnt == 0) cnt = 1;
      total += std::log(static_cast<double>(cnt) / static_cast<double>(hi - lo));
    }
    return total / static_cast<double>(rows);
  };
  return phi(m) - phi(m + 1);
}

}  // namespace detail

inline double asynchrony(std::span<const double> a, std::span<const double> b,
                         const AsynchronyParams& params = {}) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "asynchrony: series lengths differ (" << a.size() << " vs " << b.size() << ")";
    throw ShapeError(msg.str());
  }
  if (params.m < 1 || params.tau < 1) throw ParamError("m and tau must be >= 1");
  if (!(params.radius > 0.0 && params.radius < 1.0)) throw ParamError("radius must lie in (0, 1)");
  if (params.horizon < 1) throw ParamError("horizon must be >= 1");
  if (!all_finite(a) || !all_finite(b)) throw DataError("series contains non-finite values");
  detail::require_pair_lengths(a.size(), params.m, params.tau, "asynchrony");

  std::vector<double> x1(a.begin(), a.end()), x2(b.begin(), b.end());
  for (auto* v : {&x1, &x2}) {
    const double mu = mean_of(*v);
    const double sd = population_std(*v);
    for (double& e : *v) e = sd == 0.0 ? 0.0 : (e - mu) / sd;
  }
  std::vector<double> neg(x2.size());
  for (std::size_t i = 0; i < x2.size(); ++i) neg[i] = -x2[i];

  const double straight = detail::local_cross_stat(x1, x2, params.m, params.tau, params.radius, params.horizon);
  const double flipped = detail::local_cross_stat(x1, neg, params.m, params.tau, params.radius, params.horizon);
  return std::min(straight, flipped);
}

// ---------------------------------------------------------------------------
// Feature extraction.

// One ApEn value per (dimension, radius); dimension-major, radius-minor.
inline FeatureVector apen_features(const MultiTimeSeries& series, const EntropyParams& params) {
  params.check();
  require_valid(series, params);
  FeatureVector out;
  for (std::size_t k = 0; k < series.dims(); ++k) {
    std::vector<double> vals;
    try {
      vals = apen_multi(series.dim(k), params.m, params.radii, params.tau);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "dimension " << k << ": " << e.what();
      throw DataError(msg.str());
    }
    for (std::size_t j = 0; j < vals.size(); ++j) {
      FeatureTag tag;
      tag.family = Family::ApEn;
      tag.dim_a = static_cast<int>(k);
      tag.radius_index = static_cast<int>(j);
      out.push(vals[j], tag);
    }
  }
  return out;
}

// One XApEn value per unordered dimension pair (a < b, lexicographic) and
// cross radius; pair-major, radius-minor. A 1-dimensional series yields an
// empty vector.
inline FeatureVector xapen_features(const MultiTimeSeries& series, const EntropyParams& params) {
  params.check();
  require_valid(series, params);
  const auto& radii = params.cross_radii();
  FeatureVector out;
  for (std::size_t a = 0; a < series.dims(); ++a) {
    for (std::size_t b = a + 1; b < series.dims(); ++b) {
      std::vector<CrossEntropy> vals;
      try {
        vals = xapen_multi(series.dim(a), series.dim(b), params.m, radii, params.tau);
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "dimension pair (" << a << ", " << b << "): " << e.what();
        throw DataError(msg.str());
      }
      for (std::size_t j = 0; j < vals.size(); ++j) {
        FeatureTag tag;
        tag.family = Family::XApEn;
        tag.dim_a = static_cast<int>(a);
        tag.dim_b = static_cast<int>(b);
        tag.radius_index = static_cast<int>(j);
        tag.floored = vals[j].floored;
        out.push(vals[j].value, tag);
      }
    }
  }
  return out;
}

// ApEn block followed by the XApEn block.
inline FeatureVector fused_entropy_features(const MultiTimeSeries& series, const EntropyParams& params) {
  FeatureVector out = apen_features(series, params);
  out.append(xapen_features(series, params));
  return out;
}

}  // namespace motent
