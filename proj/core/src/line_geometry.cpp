#include <linesfm/line_geometry.hpp>

#include <linesfm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace linesfm {

bool PluckerLine::is_valid(double tol) const {
  return std::abs(direction.norm() - 1.0) <= tol && std::abs(moment.norm() - 1.0) <= tol &&
         std::abs(moment.dot(direction)) <= tol && depth > 0.0 && std::isfinite(depth);
}

SphereBasis sphere_basis(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  return {Vec3(ct * cp, st * cp, sp), Vec3(ct * sp, st * sp, -cp), Vec3(-st, ct, 0.0)};
}

LinePoint make_line_point(const Vec3& point, const Vec3& direction) {
  const double pn = point.norm();
  if (pn < 1e-12) {
    throw DegenerateLine("point at the optical center");
  }
  const double c = std::clamp(point.dot(direction) / pn, -1.0, 1.0);
  return {point, std::acos(c)};
}

MomentDepth moment_from_point_direction(const Vec3& point, const Vec3& direction) {
  const Vec3 n = point.cross(direction);
  const double l = n.norm();
  if (l < 1e-12) {
    throw DegenerateLine("line passes through the optical center");
  }
  return {n / l, l};
}

PluckerLine plucker_from_point_direction(const Vec3& point, const Vec3& direction) {
  const auto [m, l] = moment_from_point_direction(point, direction);
  return {direction, m, l};
}

MPLine plucker_to_mp(const PluckerLine& line) {
  return {line.moment, line.direction.cross(line.moment) / line.depth};
}

PluckerLine mp_to_plucker(const MPLine& state) {
  const double inv_depth = state.chi.norm();
  if (inv_depth < 1e-12) {
    throw LineAtInfinity("|chi| below 1e-12");
  }
  return {state.moment.cross(state.chi) / inv_depth, state.moment, 1.0 / inv_depth};
}

SphereLine plucker_to_sphere(const PluckerLine& line) {
  const Vec3& m = line.moment;
  if (std::abs(m.z()) > 1.0 - kPoleTolerance) {
    throw SphericalSingularity("moment at a pole");
  }
  const double theta = std::atan2(m.y(), m.x());
  const double phi = std::asin(m.z());
  const SphereBasis b = sphere_basis(theta, phi);
  const Vec3 d_over_l = line.direction / line.depth;
  return {theta, phi, d_over_l.dot(b.m_p), d_over_l.dot(b.m_sxp)};
}

PluckerLine sphere_to_plucker(const SphereLine& state) {
  const double inv_depth_sq = state.eta1 * state.eta1 + state.eta2 * state.eta2;
  if (inv_depth_sq < 1e-24) {
    throw LineAtInfinity("eta1^2 + eta2^2 below 1e-24");
  }
  const SphereBasis b = sphere_basis(state.theta, state.phi);
  const double depth = 1.0 / std::sqrt(inv_depth_sq);
  const Vec3 d_over_l = state.eta1 * b.m_p + state.eta2 * b.m_sxp;
  return {d_over_l * depth, b.m_s, depth};
}

MPLine project_mp(const MPLine& state) {
  const Vec3 m = state.moment.normalized();
  return {m, state.chi - m.dot(state.chi) * m};
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

Vec3 sphere_chi(const SphereLine& state) {
  const SphereBasis b = sphere_basis(state.theta, state.phi);
  return -state.eta1 * b.m_sxp + state.eta2 * b.m_p;
}

SphereLine mp_to_sphere(const MPLine& state) {
  const Vec3& m = state.moment;
  if (std::abs(m.z()) > 1.0 - kPoleTolerance) {
    throw SphericalSingularity("moment at a pole");
  }
  const double theta = std::atan2(m.y(), m.x());
  const double phi = std::asin(std::clamp(m.z(), -1.0, 1.0));
  const SphereBasis b = sphere_basis(theta, phi);
  return {theta, phi, -state.chi.dot(b.m_sxp), state.chi.dot(b.m_p)};
}

MPLine sphere_to_mp(const SphereLine& state) {
  return {sphere_basis(state.theta, state.phi).m_s, sphere_chi(state)};
}

}  // namespace linesfm
