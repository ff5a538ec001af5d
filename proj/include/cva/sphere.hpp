#pragma once

#include <Eigen/Dense>

namespace cva {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A direction on S^2. Every constructor normalizes, so |v| = 1 to round-off.
class UnitVec {
 public:
  UnitVec() : v_(0.0, 0.0, 1.0) {}

  /// Throws std::invalid_argument for a zero (or non-finite) vector.
  static UnitVec normalized(const Vec3& v);
  /// Keeps the bits of an already-unit vector (checkpoint restore). Throws
  /// std::invalid_argument when | |v| - 1 | > 1e-12.
  static UnitVec from_unit(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVec& o) const { return v_.dot(o.v_); }

  static UnitVec e1() { return normalized({1.0, 0.0, 0.0}); }
  static UnitVec e2() { return normalized({0.0, 1.0, 0.0}); }
  static UnitVec e3() { return normalized({0.0, 0.0, 1.0}); }

 private:
  explicit UnitVec(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Orthonormal right-handed basis (e1, e2, e3). Spherical angles are always
/// measured against an explicit frame: theta from e3, phi from e1 towards e2.
struct Frame {
  Vec3 e1{1.0, 0.0, 0.0};
  Vec3 e2{0.0, 1.0, 0.0};
  Vec3 e3{0.0, 0.0, 1.0};

  static Frame lab() { return {}; }
  /// Frame with e3 = axis; e1, e2 completed deterministically.
  static Frame adapted(const UnitVec& axis);
  /// Throws std::invalid_argument unless orthonormal within 1e-12.
  void validate() const;
};

struct SphericalAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)
};

/// (Id - omega omega^T) v
Vec3 project_tangent(const UnitVec& omega, const Vec3& v);

/// Pole convention: phi = 0 when theta is 0 or pi.
SphericalAngles to_spherical(const UnitVec& omega, const Frame& frame);
UnitVec from_spherical(const SphericalAngles& angles, const Frame& frame);

/// Closed form of the azimuthal integral of omega (x) omega at fixed polar
/// angle theta about the axis Omega:
///   pi sin^2(theta) (Id - Omega Omega^T) + 2 pi cos^2(theta) Omega Omega^T.
Mat3 phi_moment2(double theta, const UnitVec& axis);

struct PhiMoment3 {
  Vec3 full;       // (int omega(x)omega(x)omega dphi)_{ijk} G_{jk}
  Vec3 projected;  // (Id - Omega Omega^T) full = pi sin^2 cos (Omega.grad)Omega
};

/// Third azimuthal moment contracted against a velocity-gradient tensor G with
/// G(j, k) = d_j Omega_k. G must be the gradient of a unit field, so G Omega = 0;
/// throws std::domain_error if max |G Omega| > 1e-8.
PhiMoment3 phi_moment3_contracted(double theta, const UnitVec& axis, const Mat3& grad);

/// Rotate omega by the tangent vector v along the great circle (exponential map).
UnitVec exp_map(const UnitVec& omega, const Vec3& v);

/// Minimum-image separation a - b in a periodic cube of side box.
inline Vec3 min_image(const Vec3& a, const Vec3& b, double box) {
  Vec3 d = a - b;
  for (int k = 0; k < 3; ++k) d[k] -= box * std::nearbyint(d[k] / box);
  return d;
}

}  // namespace cva
