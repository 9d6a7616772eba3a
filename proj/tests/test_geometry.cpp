#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "simplex_langevin/geometry.hpp"
#include "test_support.hpp"

namespace sl = simplex_langevin;
using test_support::max_abs_diff;
using test_support::random_simplex;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(SimplexPoint, RejectsInvalidCoordinates) {
  EXPECT_THROW(sl::SimplexPoint({1.0}), sl::InvalidArgument);
  EXPECT_THROW(sl::SimplexPoint({0.5, 0.6}), sl::InvalidArgument);
  EXPECT_THROW(sl::SimplexPoint({1.0, 0.0}), sl::InvalidArgument);
  EXPECT_THROW(sl::SimplexPoint({1.5, -0.5}), sl::InvalidArgument);
  EXPECT_NO_THROW(sl::SimplexPoint({0.5, 0.5 + 5e-10}));
}

TEST(TangentVector, RequiresZeroSum) {
  const auto x = sl::SimplexPoint::barycenter(2);
  EXPECT_NO_THROW(sl::TangentVector(x, {0.3, -0.3}));
  EXPECT_THROW(sl::TangentVector(x, {0.3, 0.3}), sl::InvalidArgument);
  EXPECT_THROW(sl::TangentVector(x, {0.0, 0.0, 0.0}), sl::InvalidArgument);
}

TEST(ShahshahaniGradient, ScalesByCoordinates) {
  const sl::SimplexPoint half({0.5, 0.5});
  EXPECT_EQ(sl::shahshahani_gradient(half, std::vector{0.0, 0.0}), (std::vector{0.0, 0.0}));
  EXPECT_EQ(sl::shahshahani_gradient(half, std::vector{1.0, 0.0}), (std::vector{0.5, 0.0}));
  const sl::SimplexPoint x({0.2, 0.3, 0.5});
  EXPECT_EQ(sl::shahshahani_gradient(x, std::vector{1.0, 1.0, 1.0}),
            (std::vector{0.2, 0.3, 0.5}));
  EXPECT_THROW(sl::shahshahani_gradient(x, std::vector{1.0, 1.0}), sl::InvalidArgument);
}

TEST(ExpMap, ZeroVectorIsIdentity) {
  const sl::SimplexPoint x({0.5, 0.5});
  EXPECT_EQ(sl::exp_map(x, std::vector{0.0, 0.0}), x);
}

TEST(ExpMap, HandExample) {
  const sl::SimplexPoint x({0.5, 0.5});
  const auto y = sl::exp_map(x, std::vector{std::log(2.0), -std::log(2.0)});
  EXPECT_NEAR(y[0], 0.8, 1e-15);
  EXPECT_NEAR(y[1], 0.2, 1e-15);
}

TEST(ExpMap, ShiftInvariance) {
  const sl::SimplexPoint x({0.8, 0.2});
  for (double c : {-30.0, -1.0, 0.0, 2.5, 30.0}) {
    const auto y = sl::exp_map(x, std::vector{c, c});
    EXPECT_NEAR(y[0], 0.8, 1e-15);
    EXPECT_NEAR(y[1], 0.2, 1e-15);
  }
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), shift(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const sl::SimplexPoint p(random_simplex(gen, n));
    std::vector<double> v(n), w(n);
    const double c = shift(gen);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = u(gen);
      w[i] = v[i] + c;
    }
    EXPECT_LT(max_abs_diff(sl::exp_map(p, v).vec(), sl::exp_map(p, w).vec()), 1e-13);
  }
}

TEST(ExpMap, LargeInputsDoNotOverflow) {
  const sl::SimplexPoint x({0.5, 0.5});
  const auto y = sl::exp_map(x, std::vector{1000.0, 999.0});
  EXPECT_NEAR(y[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  // A coordinate that underflows is lifted to the floor.
  const auto z = sl::exp_map(x, std::vector{0.0, -2000.0});
  EXPECT_EQ(z[1], sl::kDefaultFloor);
  EXPECT_NEAR(z[0] + z[1], 1.0, 1e-15);
}

TEST(LogMap, IdentityAndHandExample) {
  const sl::SimplexPoint x({0.3, 0.3, 0.4});
  const auto zero = sl::log_map(x, x);
  for (double c : zero.components()) EXPECT_EQ(c, 0.0);

  const auto v = sl::log_map(sl::SimplexPoint({0.5, 0.5}), sl::SimplexPoint({0.8, 0.2}));
  EXPECT_NEAR(v.components()[0], std::log(2.0), 1e-15);
  EXPECT_NEAR(v.components()[1], -std::log(2.0), 1e-15);
}

TEST(LogMap, RoundTripsThroughExpMap) {
  std::mt19937_64 gen(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const sl::SimplexPoint x(random_simplex(gen, n));
    const sl::SimplexPoint y(random_simplex(gen, n));
    const auto v = sl::log_map(x, y);
    EXPECT_NEAR(std::accumulate(v.vec().begin(), v.vec().end(), 0.0), 0.0, 1e-12);
    worst = std::max(worst, max_abs_diff(sl::exp_map(x, v.components()).vec(), y.vec()));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(DistanceSqBarycenter, ZeroAtBarycenter) {
  for (std::size_t n = 2; n <= 8; ++n) {
    EXPECT_NEAR(sl::distance_sq_barycenter(sl::SimplexPoint::barycenter(n)), 0.0, 1e-28);
  }
}

TEST(DistanceSqBarycenter, TwoPointExample) {
  // 2 * (ln(1.6)^2 + ln(0.4)^2), evaluated to 30 digits offline.
  constexpr double kExpected = 2.12098423364527514834759168831;
  EXPECT_NEAR(sl::distance_sq_barycenter(sl::SimplexPoint({0.8, 0.2})), kExpected, 1e-12);
  EXPECT_EQ(sl::distance_sq_barycenter(sl::SimplexPoint({0.8, 0.2})),
            sl::distance_sq_barycenter(sl::SimplexPoint({0.2, 0.8})));
}

TEST(DistanceSqBarycenter, ExactlyPermutationInvariant) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_simplex(gen, 2 + trial % 7);
    const double d = sl::distance_sq_barycenter(sl::SimplexPoint(x));
    std::shuffle(x.begin(), x.end(), gen);
    EXPECT_EQ(sl::distance_sq_barycenter(sl::SimplexPoint(x)), d);
    EXPECT_GT(d, 0.0);
  }
}

TEST(ChristoffelDrift, BarycenterHandExample) {
  const auto d = sl::christoffel_drift(sl::SimplexPoint({0.5, 0.5}), 0.1, 1.0);
  EXPECT_NEAR(d[0], -0.15, 1e-15);
  EXPECT_NEAR(d[1], -0.15, 1e-15);
}

TEST(ChristoffelDrift, IdenticalAcrossCoordinatesAtBarycenter) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto d = sl::christoffel_drift(sl::SimplexPoint::barycenter(n), 0.01, 3.0);
    for (double v : d) EXPECT_EQ(v, d.front());
  }
}

TEST(ChristoffelDrift, VanishesAsBetaGrows) {
  const sl::SimplexPoint x({0.7, 0.2, 0.1});
  for (double v : sl::christoffel_drift(x, 0.1, kInf)) EXPECT_EQ(v, 0.0);
  const auto d6 = sl::christoffel_drift(x, 0.1, 1e6);
  const auto d12 = sl::christoffel_drift(x, 0.1, 1e12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(d12[i], d6[i] * 1e-6, 1e-20);
}

TEST(ChristoffelDrift, MatchesUnsimplifiedChristoffelSum) {
  // (eps / 2 beta) (n + 1 - sum_j 1/x_j - sum_j x_i / x_j)
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const sl::SimplexPoint x(random_simplex(gen, n, 1e-3));
    const double eps = 1e-3, beta = 2.0;
    const auto d = sl::christoffel_drift(x, eps, beta);
    for (std::size_t i = 0; i < n; ++i) {
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s1 += 1.0 / x[j];
        s2 += x[i] / x[j];
      }
      const double oracle = eps / (2.0 * beta) * (static_cast<double>(n) + 1.0 - s1 - s2);
      EXPECT_NEAR(d[i], oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST(ChristoffelDrift, RejectsDegenerateAndBadParameters) {
  const sl::SimplexPoint x({1.0 - 1e-13, 1e-13});
  EXPECT_THROW(sl::christoffel_drift(x, 0.1, 1.0), sl::DegeneratePoint);
  const sl::SimplexPoint ok({0.5, 0.5});
  EXPECT_THROW(sl::christoffel_drift(ok, 0.0, 1.0), sl::InvalidArgument);
  EXPECT_THROW(sl::christoffel_drift(ok, 0.1, -1.0), sl::InvalidArgument);
}

TEST(SampleNoise, ZeroDrawReturnsDrift) {
  const sl::SimplexPoint x({0.7, 0.2, 0.1});
  sl::ZeroGaussian zero;
  const auto draw = sl::sample_noise(x, 0.1, 2.0, zero);
  EXPECT_EQ(draw.values, draw.drift_part);
  EXPECT_EQ(draw.drift_part, sl::christoffel_drift(x, 0.1, 2.0));
}

TEST(SampleNoise, ValuesAreDriftPlusGaussExactly) {
  const sl::SimplexPoint x({0.7, 0.2, 0.1});
  sl::Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto d = sl::sample_noise(x, 0.05, 4.0, rng);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(d.values[i], d.drift_part[i] + d.gauss_part[i]);
  }
}

TEST(SampleNoise, SameSeedSameDraws) {
  const sl::SimplexPoint x({0.25, 0.25, 0.5});
  sl::Rng a(99), b(99), c(100);
  bool differs = false;
  for (int k = 0; k < 50; ++k) {
    const auto da = sl::sample_noise(x, 0.1, 1.0, a);
    const auto db = sl::sample_noise(x, 0.1, 1.0, b);
    const auto dc = sl::sample_noise(x, 0.1, 1.0, c);
    EXPECT_EQ(da.values, db.values);
    differs |= da.values != dc.values;
  }
  EXPECT_TRUE(differs);
}

TEST(SampleNoise, MonteCarloMomentsMatchAnalytic) {
  const sl::SimplexPoint x({0.7, 0.2, 0.1});
  const double eps = 0.1, beta = 1.0;
  const std::size_t N = 1000000;
  const auto drift = sl::christoffel_drift(x, eps, beta);
  sl::Rng rng(2024);
  std::vector<double> s1(3, 0.0), s2(3, 0.0);
  for (std::size_t k = 0; k < N; ++k) {
    const auto d = sl::sample_noise(x, eps, beta, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      const double c = d.values[i] - drift[i];
      s1[i] += c;
      s2[i] += c * c;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double var_true = 2.0 * eps * x[i] / beta;
    const double mean_dev = s1[i] / N;
    const double var = s2[i] / N - mean_dev * mean_dev;
    EXPECT_LT(std::abs(mean_dev) / std::sqrt(var_true / N), 4.0) << "coord " << i;
    // Gaussian: SE of the sample variance is var * sqrt(2 / N).
    EXPECT_LT(std::abs(var - var_true) / (var_true * std::sqrt(2.0 / N)), 4.0) << "coord " << i;
  }
}

TEST(NormalizeRetraction, ScalesToUnitMass) {
  const auto a = sl::normalize_retraction(std::vector{0.3, 0.3});
  EXPECT_EQ(a.point.vec(), (std::vector{0.5, 0.5}));
  EXPECT_FALSE(a.clamped);
  // MWU numerators at a uniform gradient, e.g. x = (0.5, 0.5), eps g = 0.1.
  const auto b = sl::normalize_retraction(std::vector{0.45, 0.45});
  EXPECT_EQ(b.point.vec(), (std::vector{0.5, 0.5}));
}

TEST(NormalizeRetraction, ClampsZeroAndNegativeEntries) {
  const auto r = sl::normalize_retraction(std::vector{0.0, 0.4, 0.6}, 1e-12);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.point[0], 1e-12);
  EXPECT_NEAR(r.point[0] + r.point[1] + r.point[2], 1.0, 1e-15);
  EXPECT_NEAR(r.point[1] / r.point[2], 0.4 / 0.6, 1e-14);

  const auto neg = sl::normalize_retraction(std::vector{-0.1, 0.5, 0.6}, 1e-6);
  EXPECT_TRUE(neg.clamped);
  EXPECT_GE(neg.point.min_coord(), 1e-6);
}

TEST(NormalizeRetraction, FailsWithoutPositiveMass) {
  EXPECT_THROW(sl::normalize_retraction(std::vector{0.0, 0.0}), sl::RetractionFailure);
  EXPECT_THROW(sl::normalize_retraction(std::vector{0.5, -0.5}), sl::RetractionFailure);
  EXPECT_THROW(sl::normalize_retraction(std::vector{1e-13, 0.0}, 1e-12), sl::RetractionFailure);
}

TEST(EuclideanProjection, HandExamples) {
  EXPECT_EQ(sl::euclidean_simplex_projection(std::vector{0.6, 0.6}), (std::vector{0.5, 0.5}));
  const auto p = sl::euclidean_simplex_projection(std::vector{1.2, -0.1});
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_EQ(p[1], 0.0);
  const auto q = sl::euclidean_simplex_projection(std::vector{0.2, 0.3, 0.1});
  EXPECT_NEAR(q[0], 0.2 + 0.4 / 3, 1e-15);
  EXPECT_NEAR(q[1], 0.3 + 0.4 / 3, 1e-15);
  EXPECT_NEAR(q[2], 0.1 + 0.4 / 3, 1e-15);
}

TEST(EuclideanProjection, MatchesGridSearch) {
  // (1.2, -0.1): a 1e-3 grid contains the projection (1, 0).
  const std::vector y{1.2, -0.1};
  EXPECT_LT(test_support::diff_norm(sl::euclidean_simplex_projection(y),
                                    test_support::projection_by_grid(y, 1000)),
            1e-12);
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const auto c = test_support::grid_projection_case(gen, n, 1000);
    const auto grid = test_support::projection_by_grid(c.y, 1000);
    EXPECT_LT(test_support::diff_norm(sl::euclidean_simplex_projection(c.y), grid), 1e-6);
  }
}

TEST(EuclideanProjection, MatchesSupportEnumeration) {
  std::mt19937_64 gen(37);
  std::normal_distribution<double> z(0.2, 0.7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> y(1 + trial % 8);
    for (double& v : y) v = z(gen);
    const auto p = sl::euclidean_simplex_projection(y);
    EXPECT_LT(test_support::diff_norm(p, test_support::projection_by_enumeration(y)), 1e-12);
  }
}

TEST(EuclideanProjection, SatisfiesKktInHighDimension) {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> z(0.0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(64);
    for (double& v : y) v = z(gen);
    const auto x = sl::euclidean_simplex_projection(y);
    EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-12);
    double theta = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < 64; ++i) {
      EXPECT_GE(x[i], 0.0);
      if (x[i] > 0.0) {
        if (std::isnan(theta)) theta = y[i] - x[i];
        EXPECT_NEAR(y[i] - x[i], theta, 1e-12);
      }
    }
    for (std::size_t i = 0; i < 64; ++i) {
      if (x[i] == 0.0) {
        EXPECT_LE(y[i] - theta, 1e-12);
      }
    }
  }
}

TEST(ProjectToInterior, LiftsZerosToFloor) {
  const auto r = sl::project_to_interior(std::vector{1.2, -0.1}, 1e-9);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.point[1], 1e-9);
  EXPECT_NEAR(r.point[0], 1.0 - 1e-9, 1e-15);
}

TEST(ChristoffelDrift, TotalMassIdentity) {
  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const sl::SimplexPoint x(random_simplex(gen, n, 1e-4));
    const auto d = sl::christoffel_drift(x, 0.2, 0.5);
    double s = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += 1.0 / x[i];
      total += d[i];
    }
    const double nn = static_cast<double>(n);
    const double expected = 0.2 / (2.0 * 0.5) * (nn + 1.0) * (nn - s);
    EXPECT_NEAR(total, expected, 1e-12 * std::abs(expected) + 1e-15);
    EXPECT_LE(total, 1e-12);
  }
}
