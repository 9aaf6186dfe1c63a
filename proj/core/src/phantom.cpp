#include "heterotomo/phantom.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/quadrature.hpp"
#include "heterotomo/random.hpp"

namespace heterotomo {

double bump_profile(double r) {
  if (r < 0.0) throw DomainError("bump_profile: negative argument");
  if (r > 1.0) return 0.0;
  const double a = std::tanh(5.0 * (1.0 - r));
  const double b = std::tanh(5.0 * r);
  const double a2 = a * a;
  return a2 / (a2 + b * b);
}

namespace {

constexpr int kContainmentSamples = 360;

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

PhantomModel::PhantomModel(std::vector<BumpSpec> bumps, Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : bumps_(std::move(bumps)), mean_(std::move(mean)), cov_(std::move(cov)) {
  const Eigen::Index q = static_cast<Eigen::Index>(bumps_.size());
  if (q < 1) throw ParameterError("PhantomModel: need at least one bump");
  if (mean_.size() != q) throw ParameterError("PhantomModel: mean length must equal bump count");
  if (cov_.rows() != q || cov_.cols() != q) {
    throw ParameterError("PhantomModel: covariance must be Q x Q");
  }
  const double cov_scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * cov_scale) {
    throw ParameterError("PhantomModel: covariance must be symmetric");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cov_eig(cov_);
  if (cov_eig.eigenvalues().minCoeff() < -1e-12) {
    throw ParameterError("PhantomModel: covariance must be positive semidefinite");
  }
  cov_sqrt_ = cov_eig.eigenvectors() *
              cov_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
              cov_eig.eigenvectors().transpose();

  inverse_dispersions_.reserve(bumps_.size());
  for (std::size_t b = 0; b < bumps_.size(); ++b) {
    const Eigen::Matrix2d& s = bumps_[b].dispersion;
    const std::string where = "PhantomModel: bump " + std::to_string(b);
    if (std::abs(s(0, 1) - s(1, 0)) > 1e-14 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
      throw ParameterError(where + " dispersion is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw ParameterError(where + " dispersion is not positive definite");
    }
    const Eigen::Matrix2d root =
        eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    for (int t = 0; t < kContainmentSamples; ++t) {
      const double theta = 2.0 * std::numbers::pi * t / kContainmentSamples;
      const Point2 edge = bumps_[b].center + root * Point2(std::cos(theta), std::sin(theta));
      if (edge.norm() > 1.0 + kDiskSlack) {
        throw ParameterError(where + " ellipse leaves the unit disk");
      }
    }
    inverse_dispersions_.push_back(s.inverse());
  }
}

PhantomModel PhantomModel::default_model() {
  constexpr int q = 6;
  std::vector<BumpSpec> bumps;
  Eigen::Matrix2d axes = Eigen::Vector2d(0.04, 0.015).asDiagonal();
  for (int b = 1; b <= q; ++b) {
    const double theta = 2.0 * std::numbers::pi * b / q;
    const Eigen::Matrix2d r = rotation(theta);
    bumps.push_back({0.55 * Point2(std::cos(theta), std::sin(theta)), r * axes * r.transpose()});
  }
  Eigen::VectorXd mean(q);
  mean << 1.0, 0.8, 1.2, 0.9, 1.1, 0.7;
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(q, 1.0 / std::sqrt(double(q)));
  Eigen::MatrixXd cov = 0.25 * (0.6 * Eigen::MatrixXd::Identity(q, q) + 0.4 * u * u.transpose());
  return PhantomModel(std::move(bumps), std::move(mean), std::move(cov));
}

double PhantomModel::bump_value(int q, const Point2& z) const {
  const Point2 d = z - bumps_[q].center;
  return bump_profile(d.dot(inverse_dispersions_[q] * d));
}

Eigen::VectorXd PhantomModel::bump_values(const Point2& z) const {
  Eigen::VectorXd v(size());
  for (int q = 0; q < size(); ++q) v[q] = bump_value(q, z);
  return v;
}

double PhantomModel::bump_projection(int q, const Chord& c, int nodes) const {
  const double half = c.half_length();
  if (half == 0.0) return 0.0;
  const Point2 origin = c.point(0.0) - bumps_[q].center;
  const Point2 dir = rotation_apply(-c.phi(), Point2(0.0, 1.0));
  const Eigen::Matrix2d& inv = inverse_dispersions_[q];
  // quadratic form along the chord: a t^2 + 2 b t + c0
  const double a = dir.dot(inv * dir);
  const double b = dir.dot(inv * origin);
  const double c0 = origin.dot(inv * origin);
  const double disc = b * b - a * (c0 - 1.0);
  if (!(disc > 0.0)) return 0.0;
  const double root = std::sqrt(disc);
  const double lo = std::max(-half, (-b - root) / a);
  const double hi = std::min(half, (-b + root) / a);
  if (!(hi > lo)) return 0.0;
  return integrate_gauss_legendre(
      [&](double t) {
        const double form = (a * t + 2.0 * b) * t + c0;
        return bump_profile(std::clamp(form, 0.0, 1.0));
      },
      lo, hi, nodes);
}

Eigen::VectorXd PhantomModel::bump_projections(const Chord& c, int nodes) const {
  Eigen::VectorXd v(size());
  for (int q = 0; q < size(); ++q) v[q] = bump_projection(q, c, nodes);
  return v;
}

std::string PhantomModel::digest() const {
  std::ostringstream out;
  out.precision(17);
  out << "Q=" << size() << '\n';
  for (const auto& b : bumps_) {
    out << b.center.x() << ' ' << b.center.y() << ' ' << b.dispersion(0, 0) << ' '
        << b.dispersion(0, 1) << ' ' << b.dispersion(1, 1) << '\n';
  }
  for (Eigen::Index i = 0; i < mean_.size(); ++i) out << mean_[i] << ' ';
  out << '\n';
  for (Eigen::Index i = 0; i < cov_.rows(); ++i)
    for (Eigen::Index j = 0; j < cov_.cols(); ++j) out << cov_(i, j) << ' ';
  return fnv1a_hex(out.str());
}

double field_eval(const PhantomModel& model, const FieldSample& sample, const Point2& z) {
  return sample.xi.dot(model.bump_values(z));
}

FieldSample sample_field(const PhantomModel& model, std::uint64_t seed, std::uint64_t index) {
  RandomStream stream(seed, StreamPurpose::field_coefficients, index);
  Eigen::VectorXd g(model.size());
  for (int q = 0; q < model.size(); ++q) g[q] = stream.normal();
  return {model.mean() + model.cov_sqrt() * g};
}

double field_projection(const PhantomModel& model, const FieldSample& sample, const Chord& c,
                        int nodes) {
  return sample.xi.dot(model.bump_projections(c, nodes));
}

double true_mean_eval(const PhantomModel& model, const Point2& z) {
  return model.mean().dot(model.bump_values(z));
}

double true_cov_eval(const PhantomModel& model, const Point2& z1, const Point2& z2) {
  return model.bump_values(z1).dot(model.cov() * model.bump_values(z2));
}

double true_secmom_eval(const PhantomModel& model, const Point2& z1, const Point2& z2) {
  return true_cov_eval(model, z1, z2) + true_mean_eval(model, z1) * true_mean_eval(model, z2);
}

}  // namespace heterotomo
