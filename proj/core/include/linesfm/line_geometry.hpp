#pragma once

#include <linesfm/types.hpp>

namespace linesfm {

/// Binormalized Plücker line: unit direction, unit moment and depth l > 0.
struct PluckerLine {
  Vec3 direction = Vec3::UnitX();
  Vec3 moment = Vec3::UnitY();
  double depth = 1.0;

  /// Checks unit norms, orthogonality and positive depth within `tol`.
  [[nodiscard]] bool is_valid(double tol = 1e-12) const;
};

/// Minimal spherical parameterization (theta, phi, eta1, eta2).
struct SphereLine {
  double theta = 0.0;  ///< azimuth of the moment, (-pi, pi]
  double phi = 0.0;    ///< elevation of the moment, [-pi/2, pi/2]
  double eta1 = 0.0;   ///< (d / l) projected on m_P [1/m]
  double eta2 = 0.0;   ///< (d / l) projected on m_S x m_P [1/m]

  [[nodiscard]] Vec4 to_vector() const { return {theta, phi, eta1, eta2}; }
  static SphereLine from_vector(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// Moment-point coordinates: unit moment m and chi = (d x m) / l.
struct MPLine {
  Vec3 moment = Vec3::UnitY();
  Vec3 chi = Vec3::Zero();

  [[nodiscard]] Vec6 to_vector() const {
    Vec6 v;
    v << moment, chi;
    return v;
  }
  static MPLine from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

/// A point on a line together with the angle between its view ray and the line direction.
struct LinePoint {
  Vec3 point = Vec3::UnitZ();
  double gamma = 0.0;
};

struct MomentDepth {
  Vec3 moment;
  double depth;
};

/// Orthonormal frame attached to the spherical angles of the moment.
struct SphereBasis {
  Vec3 m_s;    ///< the moment itself
  Vec3 m_p;    ///< d m_s / d phi, negated
  Vec3 m_sxp;  ///< m_s x m_p = (-sin theta, cos theta, 0)
};

SphereBasis sphere_basis(double theta, double phi);

/// Builds the point/angle pair for `point` on a line with unit `direction`.
LinePoint make_line_point(const Vec3& point, const Vec3& direction);

/// Unit moment and depth of the line through `point` with unit `direction`.
/// Throws DegenerateLine if the line passes through the origin.
MomentDepth moment_from_point_direction(const Vec3& point, const Vec3& direction);

/// Convenience wrapper returning the full Plücker line.
PluckerLine plucker_from_point_direction(const Vec3& point, const Vec3& direction);

MPLine plucker_to_mp(const PluckerLine& line);

/// Throws LineAtInfinity if |chi| < 1e-12.
PluckerLine mp_to_plucker(const MPLine& state);

/// Throws SphericalSingularity if |m_z| > 1 - 1e-9.
SphereLine plucker_to_sphere(const PluckerLine& line);

/// Throws LineAtInfinity if eta1^2 + eta2^2 < 1e-24.
PluckerLine sphere_to_plucker(const SphereLine& state);

/// Re-projects an M-P state onto the constraint set: |m| = 1 and m . chi = 0.
MPLine project_mp(const MPLine& state);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// chi expressed through the spherical basis, and the inverse map.
Vec3 sphere_chi(const SphereLine& state);
SphereLine mp_to_sphere(const MPLine& state);
MPLine sphere_to_mp(const SphereLine& state);

constexpr double kPoleTolerance = 1e-9;

}  // namespace linesfm
