#include "cva/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cva {

UnitVec UnitVec::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("UnitVec: cannot normalize a zero or non-finite vector");
  return UnitVec(v / n);
}

UnitVec UnitVec::from_unit(const Vec3& v) {
  if (!(std::abs(v.norm() - 1.0) <= 1e-12)) throw std::invalid_argument("UnitVec: vector is not unit length");
  return UnitVec(v);
}

Frame Frame::adapted(const UnitVec& axis) {
  const Vec3& a = axis.vec();
  // Seed with the lab axis least aligned with `a`.
  Vec3 seed = std::abs(a.x()) < 0.9 ? Vec3(1.0, 0.0, 0.0) : Vec3(0.0, 1.0, 0.0);
  Vec3 e1 = (seed - seed.dot(a) * a).normalized();
  Vec3 e2 = a.cross(e1);
  return Frame{e1, e2, a};
}

void Frame::validate() const {
  Mat3 m;
  m.col(0) = e1;
  m.col(1) = e2;
  m.col(2) = e3;
  if ((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("Frame: basis is not orthonormal within 1e-12");
}

Vec3 project_tangent(const UnitVec& omega, const Vec3& v) {
  const Vec3& w = omega.vec();
  return v - v.dot(w) * w;
}

SphericalAngles to_spherical(const UnitVec& omega, const Frame& frame) {
  const Vec3& w = omega.vec();
  const double c = w.dot(frame.e3);
  const double x = w.dot(frame.e1);
  const double y = w.dot(frame.e2);
  const double s = std::hypot(x, y);
  SphericalAngles out;
  out.theta = std::atan2(s, c);
  if (s == 0.0) {
    out.phi = 0.0;
  } else {
    double phi = std::atan2(y, x);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
    out.phi = phi;
  }
  return out;
}

UnitVec from_spherical(const SphericalAngles& angles, const Frame& frame) {
  const double theta = std::clamp(angles.theta, 0.0, std::numbers::pi);
  const double st = std::sin(theta);
  return UnitVec::normalized(st * std::cos(angles.phi) * frame.e1 + st * std::sin(angles.phi) * frame.e2 +
                             std::cos(theta) * frame.e3);
}

Mat3 phi_moment2(double theta, const UnitVec& axis) {
  const Vec3& o = axis.vec();
  const Mat3 oo = o * o.transpose();
  const double s = std::sin(theta), c = std::cos(theta);
  return std::numbers::pi * s * s * (Mat3::Identity() - oo) + 2.0 * std::numbers::pi * c * c * oo;
}

PhiMoment3 phi_moment3_contracted(double theta, const UnitVec& axis, const Mat3& grad) {
  const Vec3& o = axis.vec();
  if ((grad * o).cwiseAbs().maxCoeff() > 1e-8)
    throw std::domain_error("phi_moment3_contracted: gradient violates the unit-field constraint G*Omega = 0");

  const double s = std::sin(theta), c = std::cos(theta);
  const double a = std::numbers::pi * s * s * c;
  const double b = 2.0 * std::numbers::pi * c * c * c;
  const Mat3 p = Mat3::Identity() - o * o.transpose();

  // Index form: a [P_ij O_k + O_i P_jk + P_ik O_j] G_jk + b O_i O_j O_k G_jk
  const Vec3 go = grad * o;                    // (G O)_j = G_jk O_k
  const Vec3 convective = grad.transpose() * o;  // ((O.grad)O)_k = O_j G_jk
  const double trace_pg = (p.cwiseProduct(grad)).sum();
  PhiMoment3 out;
  out.full = a * (p * go + trace_pg * o + p * convective) + b * o * o.dot(go);
  out.projected = p * out.full;
  return out;
}

UnitVec exp_map(const UnitVec& omega, const Vec3& v) {
  const double a = v.norm();
  if (a == 0.0) return omega;
  return UnitVec::normalized(std::cos(a) * omega.vec() + (std::sin(a) / a) * v);
}

}  // namespace cva
