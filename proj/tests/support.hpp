#pragma once

#include <linesfm/line_dynamics.hpp>
#include <linesfm/line_geometry.hpp>
#include <linesfm/sim.hpp>

#include <cmath>

namespace linesfm::test {

// Frozen reference values. Published values come from the reference stability table;
// the rest were computed once by hand or by an independent script and pinned here.
namespace oracle {
inline constexpr double kCg = 2.04;  // 2(0.5) + 0.5 + 5(0.5)(0.2) + 2(0.5)(0.04)
inline constexpr double kCf = 1.0 + 2.04 / 30.0;
inline constexpr double kCf2 = 2.068;  // c_F at N = 2, rounded as published
inline constexpr double kPublishedDelta[] = {0.484, 0.312, 0.226, 0.175, 0.141, 0.116};
inline constexpr double kPublishedMu[] = {0.060, 0.038, 0.028, 0.022, 0.017, 0.014};
// delta and mu_max for N = 2..7, recomputed with an independent Python script
// from the closed-form sums.
inline constexpr double kDelta[] = {0.48355899419729204, 0.31166007609492413,
                                    0.2258962779999159,  0.17458607914778357,
                                    0.14050220107690392, 0.11626143581013054};
inline constexpr double kMu[] = {0.05951501173137057, 0.03835820097975778,
                                 0.027802646205672066, 0.021487538590534434,
                                 0.01729259562063617, 0.014309113880989733};
}  // namespace oracle

/// Random valid line at moderate depth, away from the sphere poles when asked.
inline PluckerLine random_line(Rng& rng, bool avoid_poles = false) {
  for (;;) {
    const Vec3 p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 6));
    const Vec3 d = rng.unit_vector();
    const Vec3 pxd = p.cross(d);
    if (pxd.norm() < 1e-3) continue;
    PluckerLine line = plucker_from_point_direction(p, d);
    if (avoid_poles && std::abs(line.moment.z()) > std::cos(0.02)) continue;
    return line;
  }
}

inline CameraTwist random_twist(Rng& rng, double max_nu = 0.5, double max_omega = 0.5) {
  CameraTwist u;
  u.nu = rng.unit_vector() * rng.uniform(0.0, max_nu);
  u.omega = rng.unit_vector() * rng.uniform(0.0, max_omega);
  return u;
}

/// Random M-P state with |chi| drawn up to `max_chi`.
inline MPLine random_mp(Rng& rng, double max_chi) {
  const Vec3 m = rng.unit_vector();
  Vec3 c = rng.unit_vector();
  c -= c.dot(m) * m;
  c = c.normalized() * rng.uniform(0.01, max_chi);
  return {m, c};
}

/// Classical fourth-order Runge-Kutta step of the continuous M-P field.
inline Vec6 rk4_step(const Vec6& x, const CameraTwist& u, double h) {
  const Vec6 k1 = mp_vector_field(x, u);
  const Vec6 k2 = mp_vector_field(x + 0.5 * h * k1, u);
  const Vec6 k3 = mp_vector_field(x + 0.5 * h * k2, u);
  const Vec6 k4 = mp_vector_field(x + h * k3, u);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fine RK4 integration used as the "exact" flow.
inline Vec6 rk4_flow(Vec6 x, const CameraTwist& u, double t, int substeps = 200) {
  const double h = t / substeps;
  for (int i = 0; i < substeps; ++i) x = rk4_step(x, u, h);
  return x;
}

}  // namespace linesfm::test
