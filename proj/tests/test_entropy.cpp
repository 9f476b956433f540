#include "motent/entropy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "motent/rng.hpp"
#include "motent/synth.hpp"
#include "oracles.hpp"

namespace {

using namespace motent;

std::vector<double> random_series(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = rng.uniform(-1.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// embed

TEST(Embed, DirectUnrolling) {
  const std::vector<double> x = {1, 2, 3, 4};
  const auto e = embed(x, 2, 1);
  ASSERT_EQ(e.rows, 3u);
  ASSERT_EQ(e.cols, 2u);
  EXPECT_DOUBLE_EQ(e.row(0)[0], 1.0);
  EXPECT_DOUBLE_EQ(e.row(0)[1], 2.0);
  EXPECT_DOUBLE_EQ(e.row(2)[0], 3.0);
  EXPECT_DOUBLE_EQ(e.row(2)[1], 4.0);
}

TEST(Embed, DelayCase) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const auto e = embed(x, 2, 2);
  ASSERT_EQ(e.rows, 3u);
  EXPECT_DOUBLE_EQ(e.row(0)[0], 1.0);
  EXPECT_DOUBLE_EQ(e.row(0)[1], 3.0);
  EXPECT_DOUBLE_EQ(e.row(1)[0], 2.0);
  EXPECT_DOUBLE_EQ(e.row(1)[1], 4.0);
  EXPECT_DOUBLE_EQ(e.row(2)[0], 3.0);
  EXPECT_DOUBLE_EQ(e.row(2)[1], 5.0);
}

TEST(Embed, IdentityAtOrderOne) {
  const auto x = random_series(3, 17);
  const auto e = embed(x, 1, 1);
  ASSERT_EQ(e.rows, x.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(e.row(i)[0], x[i]);
}

TEST(Embed, TooShortNamesMinimum) {
  const std::vector<double> x = {1, 2, 3};
  try {
    embed(x, 3, 2);  // needs (3-1)*2 + 2 = 6
    FAIL() << "expected LengthError";
  } catch (const LengthError& e) {
    EXPECT_NE(std::string(e.what()).find("at least 6"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// apen

TEST(Apen, ConstantSeriesIsZero) {
  const std::vector<double> x(100, 5.0);
  EXPECT_DOUBLE_EQ(apen(x, 1, 0.2, 1), 0.0);
  const auto multi = apen_multi(x, 1, EntropyParams::defaults().radii, 1);
  for (double v : multi) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Apen, PureSineBelowNoisySine) {
  SineSpec pure;
  pure.frequency = 10.0;
  pure.length = 1000;
  const auto clean = gen_sine(pure);

  SineSpec noisy = pure;
  noisy.snr = 1.0;
  noisy.seed = 77;
  const auto dirty = gen_sine(noisy);

  EXPECT_LT(apen(clean.dim(0), 1, 0.2, 1), apen(dirty.dim(0), 1, 0.2, 1));
}

TEST(Apen, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 50 + static_cast<std::size_t>(seed) * 15;
    const auto x = random_series(seed + 100, n);
    for (const double r : {0.1, 0.2, 0.25}) {
      EXPECT_NEAR(apen(x, 1, r, 1), oracle::apen(x, 1, r, 1), 1e-10) << "seed " << seed << " r " << r;
    }
    EXPECT_NEAR(apen(x, 2, 0.2, 1), oracle::apen(x, 2, 0.2, 1), 1e-10);
    EXPECT_NEAR(apen(x, 1, 0.2, 2), oracle::apen(x, 1, 0.2, 2), 1e-10);
    EXPECT_NEAR(apen(x, 2, 0.15, 3), oracle::apen(x, 2, 0.15, 3), 1e-10);
  }
}

TEST(Apen, MultiRadiusMatchesSingleCalls) {
  const auto x = random_series(42, 120);
  const auto& radii = EntropyParams::defaults().radii;
  const auto multi = apen_multi(x, 1, radii, 1);
  for (std::size_t i = 0; i < radii.size(); ++i)
    EXPECT_DOUBLE_EQ(multi[i], apen(x, 1, radii[i], 1));
}

TEST(Apen, AffineInvariance) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto x = random_series(seed + 7, 100);
    const double base = apen(x, 1, 0.2, 1);
    for (const double a : {0.5, 3.0, -2.0}) {
      for (const double b : {0.0, 10.0}) {
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
        EXPECT_NEAR(apen(y, 1, 0.2, 1), base, 1e-9) << "a=" << a << " b=" << b;
      }
    }
  }
}

TEST(Apen, ShufflingRaisesEntropyOfPeriodicSeries) {
  SineSpec spec;
  spec.length = 256;
  const auto sine = gen_sine(spec);
  std::vector<double> x(sine.dim(0).begin(), sine.dim(0).end());
  const double base = apen(x, 1, 0.2, 1);

  Rng rng(2024);
  double shuffled_sum = 0.0;
  const int shuffles = 20;
  for (int s = 0; s < shuffles; ++s) {
    auto y = x;
    rng.shuffle(y);
    shuffled_sum += apen(y, 1, 0.2, 1);
  }
  EXPECT_GT(shuffled_sum / shuffles, base);
}

TEST(Apen, Deterministic) {
  const auto x = random_series(5, 200);
  EXPECT_EQ(apen(x, 1, 0.13, 1), apen(x, 1, 0.13, 1));
}

TEST(Apen, InputChecks) {
  const auto x = random_series(1, 50);
  EXPECT_THROW(apen(x, 0, 0.2, 1), ParamError);
  EXPECT_THROW(apen(x, 1, 0.0, 1), ParamError);
  EXPECT_THROW(apen(x, 1, 1.0, 1), ParamError);
  EXPECT_THROW(apen(std::vector<double>{1.0, 2.0}, 1, 0.2, 1), LengthError);
  auto bad = x;
  bad[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(apen(bad, 1, 0.2, 1), DataError);
}

// ---------------------------------------------------------------------------
// xapen

TEST(Xapen, IdenticalSeriesReducesToApen) {
  // With T||T the cross count includes j=i, so the statistic collapses to
  // ApEn with the same radius fraction (z-scoring matches the std scaling).
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = random_series(seed + 40, 80);
    EXPECT_DOUBLE_EQ(xapen(x, x, 1, 0.2, 1), apen(x, 1, 0.2, 1));
    EXPECT_DOUBLE_EQ(xapen(x, x, 2, 0.15, 1), apen(x, 2, 0.15, 1));
  }
}

TEST(Xapen, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_series(seed + 300, 50);
    const auto b = random_series(seed + 600, 50);
    for (const double r : {0.1, 0.2, 0.3}) {
      EXPECT_NEAR(xapen(a, b, 1, r, 1), oracle::xapen(a, b, 1, r, 1), 1e-10)
          << "seed " << seed << " r " << r;
    }
    EXPECT_NEAR(xapen(a, b, 2, 0.2, 1), oracle::xapen(a, b, 2, 0.2, 1), 1e-10);
    EXPECT_NEAR(xapen(a, b, 1, 0.2, 2), oracle::xapen(a, b, 1, 0.2, 2), 1e-10);
  }
}

TEST(Xapen, FlooredCountsAreFlagged) {
  // A slow ramp against a fast alternation with a tiny radius: some windows
  // of the first series see no cross matches at order m+1.
  std::vector<double> a(64), b(64);
  for (std::size_t i = 0; i < 64; ++i) {
    a[i] = static_cast<double>(i);
    b[i] = (i % 2 == 0) ? 1.0 : -1.0;
  }
  const double radii[] = {0.01};
  const auto res = xapen_multi(a, b, 1, radii, 1);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_TRUE(res[0].floored);

  // Identical series never floor (self pair always matches).
  const auto self_res = xapen_multi(a, a, 1, radii, 1);
  EXPECT_FALSE(self_res[0].floored);
}

TEST(Xapen, ErrorsOnBadInput) {
  const auto a = random_series(1, 50);
  const auto b = random_series(2, 49);
  EXPECT_THROW(xapen(a, b, 1, 0.2, 1), ShapeError);
  EXPECT_THROW(xapen(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, 4.0}, 1, 0.2, 1),
               LengthError);
  EXPECT_THROW(xapen(a, a, 1, 0.0, 1), ParamError);
}

TEST(Xapen, Deterministic) {
  const auto a = random_series(21, 90);
  const auto b = random_series(22, 90);
  EXPECT_EQ(xapen(a, b, 1, 0.2, 1), xapen(a, b, 1, 0.2, 1));
}

// ---------------------------------------------------------------------------
// asynchrony probe (time-local, orientation-normalized)

TEST(Asynchrony, QuarterPhaseReadsAsAsynchronous) {
  // Three relations among equal-frequency sines: in phase, quarter phase,
  // anti-phase. The probe must spike only in the middle case.
  const double snr = 25.0;
  AsynchronyParams probe;
  probe.horizon = 32;

  const auto make = [&](double phase, std::uint64_t seed) {
    SineSpec spec;
    spec.snr = snr;
    spec.phase = phase;
    spec.seed = seed;
    return gen_sine(spec);
  };

  double v0 = 0.0, vq = 0.0, vpi = 0.0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    const auto ref1 = make(0.0, 1000 + static_cast<std::uint64_t>(rep));
    const auto s0 = make(0.0, 2000 + static_cast<std::uint64_t>(rep));
    const auto sq = make(kPi / 2.0, 3000 + static_cast<std::uint64_t>(rep));
    const auto spi = make(kPi, 4000 + static_cast<std::uint64_t>(rep));
    v0 += asynchrony(ref1.dim(0), s0.dim(0), probe);
    vq += asynchrony(ref1.dim(0), sq.dim(0), probe);
    vpi += asynchrony(ref1.dim(0), spi.dim(0), probe);
  }
  v0 /= reps;
  vq /= reps;
  vpi /= reps;

  EXPECT_GT(vq, v0 + 0.15);           // quarter phase clearly asynchronous
  EXPECT_NEAR(vpi, v0, 0.1);          // anti-phase reads as synchronous
}

TEST(Asynchrony, ChecksInput) {
  const auto a = random_series(1, 64);
  const auto b = random_series(2, 63);
  AsynchronyParams probe;
  EXPECT_THROW(asynchrony(a, b, probe), ShapeError);
  probe.radius = 0.0;
  EXPECT_THROW(asynchrony(a, a, probe), ParamError);
  probe = AsynchronyParams{};
  probe.horizon = 0;
  EXPECT_THROW(asynchrony(a, a, probe), ParamError);
}

// ---------------------------------------------------------------------------
// feature vectors

MultiTimeSeries random_multiseries(std::uint64_t seed, std::size_t dims, std::size_t n) {
  Rng rng(seed);
  MultiTimeSeries s(dims, n);
  for (std::size_t k = 0; k < dims; ++k)
    for (std::size_t t = 0; t < n; ++t) s(k, t) = rng.gaussian();
  return s;
}

TEST(ApenFeatures, DimensionalityAndOrdering) {
  const auto s = random_multiseries(1, 6, 128);
  const auto fv = apen_features(s, EntropyParams::defaults());
  ASSERT_EQ(fv.size(), 36u);  // 6 radii x K=6
  // Dimension-major, radius-minor; entry 7 is dim 1, radius 1.
  EXPECT_EQ(fv.tag(7).str(), "apen[d1][r1]");
  EXPECT_DOUBLE_EQ(fv[7], apen(s.dim(1), 1, EntropyParams::defaults().radii[1], 1));
}

TEST(ApenFeatures, LargeK) {
  const auto s = random_multiseries(2, 16, 64);
  EXPECT_EQ(apen_features(s, EntropyParams::defaults()).size(), 96u);
}

TEST(ApenFeatures, ConstantSeriesAllZero) {
  const MultiTimeSeries s(1, 100, 4.0);
  const auto fv = apen_features(s, EntropyParams::defaults());
  ASSERT_EQ(fv.size(), 6u);
  for (std::size_t i = 0; i < fv.size(); ++i) EXPECT_DOUBLE_EQ(fv[i], 0.0);
}

TEST(ApenFeatures, AttachesDimensionToErrors) {
  MultiTimeSeries s = random_multiseries(3, 3, 64);
  s(2, 10) = std::numeric_limits<double>::quiet_NaN();
  try {
    apen_features(s, EntropyParams::defaults());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension 2"), std::string::npos);
  }
}

TEST(XapenFeatures, PairGridDimensionality) {
  const auto s6 = random_multiseries(4, 6, 96);
  EXPECT_EQ(xapen_features(s6, EntropyParams::defaults()).size(), 90u);  // 6*15

  const auto s16 = random_multiseries(5, 16, 64);
  EXPECT_EQ(xapen_features(s16, EntropyParams::video_defaults()).size(), 120u);  // 1*120
}

TEST(XapenFeatures, SingleDimensionIsEmpty) {
  const auto s = random_multiseries(6, 1, 64);
  EXPECT_EQ(xapen_features(s, EntropyParams::defaults()).size(), 0u);
}

TEST(XapenFeatures, PairOrderingAndValues) {
  const auto s = random_multiseries(7, 3, 96);
  const auto p = EntropyParams::video_defaults();
  const auto fv = xapen_features(s, p);
  ASSERT_EQ(fv.size(), 3u);  // (0,1), (0,2), (1,2)
  const int expected_pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(fv.tag(i).family, Family::XApEn);
    EXPECT_EQ(fv.tag(i).dim_a, expected_pairs[i][0]);
    EXPECT_EQ(fv.tag(i).dim_b, expected_pairs[i][1]);
    EXPECT_EQ(fv.tag(i).radius_index, 0);
  }
  EXPECT_DOUBLE_EQ(fv[1], xapen(s.dim(0), s.dim(2), p.m, 0.2, p.tau));
}

TEST(FusedFeatures, LengthFormula) {
  // (R*K^2 + K*(12-R))/2 with 6 ApEn radii and R cross radii.
  const auto check = [](std::size_t k, std::size_t r_cross, std::uint64_t seed) {
    EntropyParams p = EntropyParams::defaults();
    p.xapen_radii.clear();
    for (std::size_t i = 0; i < r_cross; ++i)
      p.xapen_radii.push_back(0.1 + 0.03 * static_cast<double>(i));
    const auto s = random_multiseries(seed, k, 64);
    const auto fv = fused_entropy_features(s, p);
    const std::size_t expected = (r_cross * k * k + k * (12 - r_cross)) / 2;
    EXPECT_EQ(fv.size(), expected) << "K=" << k << " R=" << r_cross;
    EXPECT_EQ(fv.size(), 6 * k + r_cross * k * (k - 1) / 2);
  };
  check(6, 6, 10);   // 126 = 36 + 90
  check(16, 1, 11);  // 216 = 96 + 120
  check(2, 1, 12);   // 13 = 12 + 1
}

TEST(FusedFeatures, BlockOrdering) {
  const auto s = random_multiseries(13, 2, 80);
  const auto fv = fused_entropy_features(s, EntropyParams::video_defaults());
  ASSERT_EQ(fv.size(), 13u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(fv.tag(i).family, Family::ApEn);
  EXPECT_EQ(fv.tag(12).family, Family::XApEn);
}

}  // namespace
