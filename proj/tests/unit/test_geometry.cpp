#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "heterotomo/errors.hpp"
#include "heterotomo/geometry.hpp"
#include "oracles.hpp"

using namespace heterotomo;

TEST(Rotation, MatchesMatrixProduct) {
  EXPECT_EQ(rotation_apply(0.0, Point2(0.3, -0.2)), Point2(0.3, -0.2));
  const Point2 q = rotation_apply(std::numbers::pi / 2, Point2(1, 0));
  EXPECT_NEAR(q.x(), 0.0, 1e-15);
  EXPECT_NEAR(q.y(), 1.0, 1e-15);
  const Point2 r = rotation_apply(0.7, Point2(0.5, 0.1));
  EXPECT_NEAR((r - oracle::rotate(0.7, Point2(0.5, 0.1))).norm(), 0.0, 1e-15);
  EXPECT_NEAR(r.norm(), Point2(0.5, 0.1).norm(), 1e-15);
}

TEST(Chord, HalfLengthInvariant) {
  for (double x : {-1.0, -0.999, -0.3, 0.0, 0.42, 0.8, 1.0}) {
    const Chord c(0.3, x);
    EXPECT_NEAR(c.half_length() * c.half_length() + x * x, 1.0, 1e-12);
  }
  EXPECT_EQ(Chord(0.1, 1.0).half_length(), 0.0);
  EXPECT_EQ(Chord(0.1, -1.0).half_length(), 0.0);
  EXPECT_THROW(Chord(0.0, 1.5), DomainError);
}

TEST(Chord, Points) {
  const Point2 a = chord_point(Chord(0.0, 0.0), 0.5);
  EXPECT_NEAR(a.x(), 0.0, 1e-15);
  EXPECT_NEAR(a.y(), 0.5, 1e-15);
  EXPECT_NEAR((chord_point(Chord(0.0, 0.6), 0.0) - Point2(0.6, 0)).norm(), 0.0, 1e-15);
  const double phi = std::numbers::pi / 3;
  const Point2 b = chord_point(Chord(phi, 0.2), 0.4);
  EXPECT_NEAR((b - oracle::rotate(-phi, Point2(0.2, 0.4))).norm(), 0.0, 1e-15);
  EXPECT_NEAR(b.squaredNorm(), 0.2 * 0.2 + 0.4 * 0.4, 1e-15);
  EXPECT_THROW(Chord(0.0, 0.8).point(0.7), DomainError);
}

TEST(Chord, CanonicalFlipsDetector) {
  const Chord c = Chord(std::numbers::pi + 0.4, 0.3).canonical();
  EXPECT_NEAR(c.phi(), 0.4, 1e-14);
  EXPECT_NEAR(c.x(), -0.3, 1e-15);
  for (double phi : {-7.0, -0.1, 0.0, 3.2, 10.0}) {
    const double t = canonical_tilt(phi);
    EXPECT_GE(t, 0.0);
    EXPECT_LT(t, std::numbers::pi);
  }
}

TEST(XrayNumeric, ChordLengths) {
  auto one = [](const Point2&) { return 1.0; };
  EXPECT_NEAR(xray_numeric(one, Chord(1.3, 0.0), 32), 2.0, 1e-14);
  EXPECT_NEAR(xray_numeric(one, Chord(0.2, 0.8), 32), 1.2, 1e-14);
  EXPECT_EQ(xray_numeric(one, Chord(0.2, 1.0), 32), 0.0);
}

TEST(XrayNumeric, GaussianGeneratorAgainstAdaptive) {
  auto k0 = [](const Point2& z) { return std::exp(-256.0 * z.squaredNorm()); };
  const double expect = oracle::adaptive([](double t) { return std::exp(-256.0 * t * t); }, -1.0, 1.0);
  EXPECT_NEAR(xray_numeric(k0, Chord(0.0, 0.0), 96), expect, 1e-12);
}

TEST(XrayNumeric, AntipodalAndRotationCovariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), loc(-0.95, 0.95);
  auto f = [](const Point2& z) { return std::exp(-20.0 * (z - Point2(0.2, -0.1)).squaredNorm()) + z.x() * z.y(); };
  for (int trial = 0; trial < 50; ++trial) {
    const double phi = ang(rng), x = loc(rng), psi = ang(rng);
    EXPECT_NEAR(xray_numeric(f, Chord(phi, x), 64), xray_numeric(f, Chord(phi + std::numbers::pi, -x), 64), 1e-10);
    // (f o E(psi)^{-1}) along (phi, x) equals f along (phi + psi, x)
    auto rotated = [&](const Point2& z) { return f(rotation_apply(-psi, z)); };
    EXPECT_NEAR(xray_numeric(rotated, Chord(phi, x), 64), xray_numeric(f, Chord(phi + psi, x), 64), 1e-10);
  }
}

TEST(XrayNumeric, NodeDoublingStable) {
  for (double gamma : {16.0, 256.0, 1024.0}) {
    const int nodes = std::max(32, static_cast<int>(std::ceil(6.0 * std::sqrt(gamma))));
    auto k = [&](const Point2& z) { return std::exp(-gamma * (z - Point2(0.1, 0.3)).squaredNorm()); };
    const Chord c(0.4, 0.2);
    EXPECT_NEAR(xray_numeric(k, c, nodes), xray_numeric(k, c, 2 * nodes), 1e-10) << gamma;
  }
}

TEST(Quadrature, RejectsTooFewNodes) { EXPECT_THROW(gauss_legendre(1), ParameterError); }
