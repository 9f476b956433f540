#pragma once

// Comparison features: retained low-frequency DFT magnitudes, signed type-II
// DCT coefficients, and sequential motion texture (windowed frame-kernel
// matrices summarized by 13 Haralick co-occurrence statistics).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "motent/core.hpp"

namespace motent {

struct SpectralParams {
  int coeffs_per_dim = 10;
};

struct SmtParams {
  int n_windows = 10;
  int quant_levels = 8;
};

inline constexpr int kHaralickCount = 13;

namespace detail {

inline void require_finite_series(const MultiTimeSeries& s) {
  for (std::size_t k = 0; k < s.dims(); ++k) {
    if (!all_finite(s.dim(k))) {
      std::ostringstream msg;
      msg << "dimension " << k << " contains non-finite values";
      throw DataError(msg.str());
    }
  }
}

// 13 Haralick statistics of a symmetric, normalized co-occurrence matrix
// p (levels x levels, row-major). Natural log; 0*ln(0) = 0; correlation and
// f12 fall back to 0 when a marginal is degenerate. f7 (sum variance) is
// centered on f6 (sum average), the usual fix of the original erratum.
inline std::array<double, kHaralickCount> haralick13(const std::vector<double>& p, int levels) {
  const auto at = [&](int i, int j) { return p[static_cast<std::size_t>(i) * levels + j]; };
  const auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };

  std::vector<double> px(levels, 0.0), py(levels, 0.0);
  std::vector<double> p_sum(2 * levels - 1, 0.0);   // p_{x+y}, index i+j
  std::vector<double> p_diff(levels, 0.0);          // p_{x-y}, index |i-j|
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j) {
      const double v = at(i, j);
      px[i] += v;
      py[j] += v;
      p_sum[i + j] += v;
      p_diff[std::abs(i - j)] += v;
    }

  double mu_x = 0.0, mu_y = 0.0;
  for (int i = 0; i < levels; ++i) {
    mu_x += i * px[i];
    mu_y += i * py[i];
  }
  double var_x = 0.0, var_y = 0.0;
  for (int i = 0; i < levels; ++i) {
    var_x += (i - mu_x) * (i - mu_x) * px[i];
    var_y += (i - mu_y) * (i - mu_y) * py[i];
  }
  const double sd_x = std::sqrt(var_x), sd_y = std::sqrt(var_y);

  std::array<double, kHaralickCount> f{};

  double asm_ = 0.0, contrast = 0.0, corr_num = 0.0, ssq = 0.0, idm = 0.0, entropy = 0.0;
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j) {
      const double v = at(i, j);
      asm_ += v * v;
      contrast += (i - j) * (i - j) * v;
      corr_num += i * j * v;
      ssq += (i - mu_x) * (i - mu_x) * v;
      idm += v / (1.0 + (i - j) * (i - j));
      entropy -= xlogx(v);
    }
  f[0] = asm_;
  f[1] = contrast;
  f[2] = (sd_x > 0.0 && sd_y > 0.0) ? (corr_num - mu_x * mu_y) / (sd_x * sd_y) : 0.0;
  f[3] = ssq;
  f[4] = idm;

  double sum_avg = 0.0;
  for (int k = 0; k < 2 * levels - 1; ++k) sum_avg += k * p_sum[k];
  f[5] = sum_avg;
  double sum_var = 0.0, sum_ent = 0.0;
  for (int k = 0; k < 2 * levels - 1; ++k) {
    sum_var += (k - sum_avg) * (k - sum_avg) * p_sum[k];
    sum_ent -= xlogx(p_sum[k]);
  }
  f[6] = sum_var;
  f[7] = sum_ent;
  f[8] = entropy;

  double diff_avg = 0.0;
  for (int k = 0; k < levels; ++k) diff_avg += k * p_diff[k];
  double diff_var = 0.0, diff_ent = 0.0;
  for (int k = 0; k < levels; ++k) {
    diff_var += (k - diff_avg) * (k - diff_avg) * p_diff[k];
    diff_ent -= xlogx(p_diff[k]);
  }
  f[9] = diff_var;
  f[10] = diff_ent;

  double hx = 0.0, hy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
  for (int i = 0; i < levels; ++i) {
    hx -= xlogx(px[i]);
    hy -= xlogx(py[i]);
  }
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j) {
      const double marg = px[i] * py[j];
      if (marg > 0.0) {
        hxy1 -= at(i, j) * std::log(marg);
        hxy2 -= marg * std::log(marg);
      }
    }
  const double hmax = std::max(hx, hy);
  f[11] = hmax > 0.0 ? (entropy - hxy1) / hmax : 0.0;
  f[12] = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * (hxy2 - entropy))));
  return f;
}

// Offset-(1,1) co-occurrence of a quantized matrix, symmetrized and
// normalized to sum 1. Returns levels x levels row-major; all-zero when the
// window is too small to contain any offset pair.
inline std::vector<double> cooccurrence11(const std::vector<int>& q, std::size_t w, int levels) {
  std::vector<double> p(static_cast<std::size_t>(levels) * levels, 0.0);
  if (w < 2) return p;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < w; ++i)
    for (std::size_t j = 0; j + 1 < w; ++j) {
      const int a = q[i * w + j];
      const int b = q[(i + 1) * w + (j + 1)];
      p[static_cast<std::size_t>(a) * levels + b] += 1.0;
      p[static_cast<std::size_t>(b) * levels + a] += 1.0;
      total += 2.0;
    }
  if (total > 0.0)
    for (double& v : p) v /= total;
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DFT: per dimension, magnitudes of the first coeffs_per_dim coefficients
// (DC first), unnormalized X_k = sum_n x_n e^{-2 pi i k n / N}.

inline FeatureVector dft_features(const MultiTimeSeries& series, const SpectralParams& p = {}) {
  if (p.coeffs_per_dim < 1) throw ParamError("coeffs_per_dim must be >= 1");
  if (static_cast<std::size_t>(p.coeffs_per_dim) > series.length()) {
    std::ostringstream msg;
    msg << "coeffs_per_dim " << p.coeffs_per_dim << " exceeds series length " << series.length();
    throw ParamError(msg.str());
  }
  detail::require_finite_series(series);

  const double two_pi = 6.283185307179586476925286766559;
  const auto n = static_cast<double>(series.length());
  FeatureVector out;
  for (std::size_t k = 0; k < series.dims(); ++k) {
    const auto x = series.dim(k);
    for (int c = 0; c < p.coeffs_per_dim; ++c) {
      double re = 0.0, im = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        const double ang = two_pi * c * static_cast<double>(t) / n;
        re += x[t] * std::cos(ang);
        im -= x[t] * std::sin(ang);
      }
      FeatureTag tag;
      tag.family = Family::Dft;
      tag.dim_a = static_cast<int>(k);
      tag.coeff_index = c;
      out.push(std::hypot(re, im), tag);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DCT: per dimension, the first coeffs_per_dim signed type-II coefficients,
// unnormalized X_k = sum_n x_n cos(pi k (2n+1) / 2N).

inline FeatureVector dct_features(const MultiTimeSeries& series, const SpectralParams& p = {}) {
  if (p.coeffs_per_dim < 1) throw ParamError("coeffs_per_dim must be >= 1");
  if (static_cast<std::size_t>(p.coeffs_per_dim) > series.length()) {
    std::ostringstream msg;
    msg << "coeffs_per_dim " << p.coeffs_per_dim << " exceeds series length " << series.length();
    throw ParamError(msg.str());
  }
  detail::require_finite_series(series);

  const double pi = 3.14159265358979323846264338328;
  const auto n = static_cast<double>(series.length());
  FeatureVector out;
  for (std::size_t k = 0; k < series.dims(); ++k) {
    const auto x = series.dim(k);
    for (int c = 0; c < p.coeffs_per_dim; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t)
        acc += x[t] * std::cos(pi * c * (2.0 * static_cast<double>(t) + 1.0) / (2.0 * n));
      FeatureTag tag;
      tag.family = Family::Dct;
      tag.dim_a = static_cast<int>(k);
      tag.coeff_index = c;
      out.push(acc, tag);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SMT: split time into n_windows contiguous windows (last absorbs the
// remainder); per window build the W x W Gram matrix of per-time-step
// K-vectors, min-max scale to [0,1], quantize to quant_levels, and summarize
// its offset-(1,1) co-occurrence with the 13 Haralick statistics.
// Output is window-major: window w occupies slots [13w, 13w+12].

inline FeatureVector smt_features(const MultiTimeSeries& series, const SmtParams& p = {}) {
  if (p.n_windows < 1) throw ParamError("n_windows must be >= 1");
  if (p.quant_levels < 2) throw ParamError("quant_levels must be >= 2");
  if (series.length() < 2 * static_cast<std::size_t>(p.n_windows)) {
    std::ostringstream msg;
    msg << "series length " << series.length() << " too short for " << p.n_windows
        << " windows: need at least " << 2 * p.n_windows << " time steps";
    throw ParamError(msg.str());
  }
  detail::require_finite_series(series);

  const std::size_t n = series.length();
  const std::size_t k_dims = series.dims();
  const std::size_t base = n / static_cast<std::size_t>(p.n_windows);

  FeatureVector out;
  for (int w = 0; w < p.n_windows; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * base;
    const std::size_t hi = (w + 1 == p.n_windows) ? n : lo + base;
    const std::size_t width = hi - lo;

    // Gram matrix of the K-vectors at each time step in the window.
    std::vector<double> gram(width * width, 0.0);
    for (std::size_t s = 0; s < width; ++s)
      for (std::size_t t = s; t < width; ++t) {
        double dot = 0.0;
        for (std::size_t d = 0; d < k_dims; ++d) dot += series(d, lo + s) * series(d, lo + t);
        gram[s * width + t] = dot;
        gram[t * width + s] = dot;
      }

    const auto [mn_it, mx_it] = std::minmax_element(gram.begin(), gram.end());
    const double mn = *mn_it, mx = *mx_it;
    std::vector<int> q(width * width, 0);
    if (mx > mn) {
      for (std::size_t i = 0; i < gram.size(); ++i) {
        const double scaled = (gram[i] - mn) / (mx - mn);
        q[i] = std::min(static_cast<int>(scaled * p.quant_levels), p.quant_levels - 1);
      }
    }

    const auto cooc = detail::cooccurrence11(q, width, p.quant_levels);
    const auto stats = detail::haralick13(cooc, p.quant_levels);
    for (int s = 0; s < kHaralickCount; ++s) {
      FeatureTag tag;
      tag.family = Family::Smt;
      tag.coeff_index = w * kHaralickCount + s;
      out.push(stats[s], tag);
    }
  }
  return out;
}

}  // namespace motent
