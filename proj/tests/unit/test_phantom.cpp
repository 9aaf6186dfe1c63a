#include <gtest/gtest.h>

#include <numbers>

#include "heterotomo/errors.hpp"
#include "heterotomo/phantom.hpp"
#include "oracles.hpp"

using namespace heterotomo;

namespace {

PhantomModel two_bumps(const Eigen::MatrixXd& cov) {
  std::vector<BumpSpec> bumps{{Point2(0.3, 0.1), Eigen::Vector2d(0.05, 0.02).asDiagonal()},
                              {Point2(-0.4, -0.2), Eigen::Matrix2d{{0.03, 0.01}, {0.01, 0.04}}}};
  return PhantomModel(bumps, Eigen::Vector2d(1.0, -0.5), cov);
}

}  // namespace

TEST(BumpProfile, Values) {
  EXPECT_EQ(bump_profile(0.0), 1.0);
  EXPECT_EQ(bump_profile(1.0), 0.0);
  EXPECT_DOUBLE_EQ(bump_profile(0.5), 0.5);
  EXPECT_EQ(bump_profile(1.5), 0.0);
  EXPECT_THROW(bump_profile(-0.1), DomainError);
  for (int i = 0; i <= 1000; ++i) {
    const double r = i / 1000.0;
    EXPECT_NEAR(bump_profile(r) + bump_profile(1 - r), 1.0, 1e-12);
  }
}

TEST(PhantomModel, Validation) {
  EXPECT_THROW(PhantomModel({}, Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)), ParameterError);
  // ellipse leaving the disk
  EXPECT_THROW(PhantomModel({{Point2(0.9, 0), Eigen::Matrix2d::Identity() * 0.04}}, Eigen::VectorXd::Ones(1),
                            Eigen::MatrixXd::Zero(1, 1)),
               ParameterError);
  // indefinite dispersion
  EXPECT_THROW(PhantomModel({{Point2(0, 0), Eigen::Matrix2d{{0.04, 0}, {0, -0.01}}}}, Eigen::VectorXd::Ones(1),
                            Eigen::MatrixXd::Zero(1, 1)),
               ParameterError);
  // covariance not PSD
  EXPECT_THROW(two_bumps(Eigen::Matrix2d{{1, 2}, {2, 1}}), ParameterError);
  const PhantomModel def = PhantomModel::default_model();
  EXPECT_EQ(def.size(), 6);
  EXPECT_EQ(def.digest(), PhantomModel::default_model().digest());
}

TEST(Field, Evaluation) {
  const PhantomModel m = two_bumps(Eigen::Matrix2d::Identity());
  EXPECT_EQ(field_eval(m, {Eigen::Vector2d::Zero()}, Point2(0.3, 0.1)), 0.0);
  EXPECT_EQ(field_eval(m, {Eigen::Vector2d(2.0, 0.0)}, Point2(0.3, 0.1)), 2.0);
  const Point2 z(0.25, 0.05);
  const Eigen::Vector2d xi(0.7, 1.3);
  const Point2 d1 = z - Point2(0.3, 0.1), d2 = z - Point2(-0.4, -0.2);
  const Eigen::Matrix2d s2{{0.03, 0.01}, {0.01, 0.04}};
  const double expect = 0.7 * bump_profile(d1.x() * d1.x() / 0.05 + d1.y() * d1.y() / 0.02) +
                        1.3 * bump_profile(d2.dot(s2.inverse() * d2));
  EXPECT_NEAR(field_eval(m, {xi}, z), expect, 1e-15);
  EXPECT_EQ(field_eval(m, {xi}, Point2(0.9, -0.3)), 0.0);
}

TEST(Field, ProjectionMatchesAdaptiveLineIntegral) {
  const PhantomModel m = PhantomModel::default_model();
  const FieldSample f = sample_field(m, 4);
  for (double phi : {0.0, 0.7, 2.1}) {
    for (double x : {-0.6, -0.1, 0.3, 0.55}) {
      const double expect = oracle::xray([&](const Eigen::Vector2d& z) { return field_eval(m, f, z); }, phi, x, 1e-12);
      EXPECT_NEAR(field_projection(m, f, Chord(phi, x)), expect, 1e-9);
    }
  }
}

TEST(Sampling, DeterministicAndDegenerate) {
  const PhantomModel m = PhantomModel::default_model();
  EXPECT_EQ(sample_field(m, 9, 3).xi, sample_field(m, 9, 3).xi);
  EXPECT_NE(sample_field(m, 9, 3).xi, sample_field(m, 9, 4).xi);
  const PhantomModel c0 = two_bumps(Eigen::Matrix2d::Zero());
  EXPECT_EQ(sample_field(c0, 1).xi, c0.mean());
}

TEST(Sampling, MonteCarloMeanOfStandardNormal) {
  std::vector<BumpSpec> bumps{{Point2(0, 0), Eigen::Matrix2d::Identity() * 0.1},
                              {Point2(0.5, 0), Eigen::Matrix2d::Identity() * 0.05}};
  const PhantomModel m(bumps, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity());
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += sample_field(m, 2, static_cast<std::uint64_t>(i)).xi;
  EXPECT_LT((sum / draws).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Truth, MomentIdentities) {
  const PhantomModel zero = two_bumps(Eigen::Matrix2d::Zero());
  const Point2 a(0.3, 0.12), b(-0.38, -0.2);
  EXPECT_EQ(true_cov_eval(zero, a, b), 0.0);
  EXPECT_DOUBLE_EQ(true_secmom_eval(zero, a, b), true_mean_eval(zero, a) * true_mean_eval(zero, b));
  const PhantomModel m = PhantomModel::default_model();
  const Point2 c(0.5, 0.2), d(-0.3, 0.45);
  EXPECT_NEAR(true_cov_eval(m, c, d), true_cov_eval(m, d, c), 1e-15);
}
