#include "support.hpp"

#include <linesfm/errors.hpp>
#include <linesfm/line_dynamics.hpp>

#include <Eigen/SVD>
#include <doctest.h>

#include <cmath>
#include <vector>

using namespace linesfm;
using namespace linesfm::test;

namespace {

double spectral_norm(const Mat3& a) {
  return Eigen::JacobiSVD<Mat3>(a).singularValues()(0);
}

Mat6 fd_jacobian(const Vec6& x, const CameraTwist& u, double h) {
  Mat6 j;
  for (int c = 0; c < 6; ++c) {
    Vec6 xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (mp_vector_field(xp, u) - mp_vector_field(xm, u)) / (2 * h);
  }
  return j;
}

// Sphere derivative pushed to (dm, dchi) by differentiating
// m = m_S(theta, phi) and chi = -eta1 (m_S x m_P) + eta2 m_P by hand.
Vec6 sphere_tangent_in_mp(const SphereLine& s, const SphereDerivative& ds) {
  const double ct = std::cos(s.theta), st = std::sin(s.theta);
  const double cp = std::cos(s.phi), sp = std::sin(s.phi);
  const Vec3 ms_t(-st * cp, ct * cp, 0.0);
  const Vec3 ms_p(-ct * sp, -st * sp, cp);
  const Vec3 mp(ct * sp, st * sp, -cp);
  const Vec3 mp_t(-st * sp, ct * sp, 0.0);
  const Vec3 mp_p(ct * cp, st * cp, sp);
  const Vec3 mx(-st, ct, 0.0);
  const Vec3 mx_t(-ct, -st, 0.0);

  Vec6 out;
  out.head<3>() = ms_t * ds.dtheta + ms_p * ds.dphi;
  out.tail<3>() = -ds.deta1 * mx - s.eta1 * mx_t * ds.dtheta + ds.deta2 * mp +
                  s.eta2 * (mp_t * ds.dtheta + mp_p * ds.dphi);
  return out;
}

}  // namespace

TEST_SUITE("line_dynamics") {

TEST_CASE("zero twist is a fixed point") {
  const MPDerivative d = mp_dynamics({{1, 0, 0}, {0, 0, 0.5}}, {});
  CHECK(d.dm.norm() == 0.0);
  CHECK(d.dchi.norm() == 0.0);
  const SphereDerivative s = sphere_dynamics({0.3, 0.2, 0.1, 0.4}, {});
  CHECK(s.dtheta == 0.0);
  CHECK(s.dphi == 0.0);
  CHECK(s.deta1 == 0.0);
  CHECK(s.deta2 == 0.0);
  CHECK(mp_jacobian({{1, 0, 0}, {0, 0, 0.5}}, {}).norm() == 0.0);
}

TEST_CASE("pure rotation about the optical axis") {
  CameraTwist u;
  u.omega = {0, 0, 1};
  const MPDerivative d = mp_dynamics({{1, 0, 0}, {0, 0, 0.5}}, u);
  CHECK((d.dm - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK(d.dchi.norm() < 1e-15);
}

TEST_CASE("the flow preserves |m| and m.chi") {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const MPLine x = random_mp(rng, 2.0);
    const CameraTwist u = random_twist(rng, 1.0, 1.0);
    const MPDerivative d = mp_dynamics(x, u);
    CHECK(std::abs(2.0 * x.moment.dot(d.dm)) < 1e-10);
    CHECK(std::abs(d.dm.dot(x.chi) + x.moment.dot(d.dchi)) < 1e-10);
  }
}

TEST_CASE("velocity in the interpretation plane without rotation freezes the moment") {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const MPLine x = random_mp(rng, 1.0);
    CameraTwist u = random_twist(rng);
    u.nu -= u.nu.dot(x.moment) * x.moment;
    u.omega.setZero();
    CHECK(mp_dynamics(x, u).dm.norm() < 1e-15);
  }
}

TEST_CASE("sphere dynamics are rejected at the poles") {
  CameraTwist u;
  u.nu = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(sphere_dynamics({0.0, std::numbers::pi / 2, 0.1, 0.1}, u),
                  SphericalSingularity);
  CHECK_THROWS_AS(sphere_dynamics({0.0, -std::numbers::pi / 2, 0.1, 0.1}, u),
                  SphericalSingularity);
}

TEST_CASE("sphere and M-P derivatives agree in a common tangent space") {
  Rng rng(23);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PluckerLine l = random_line(rng, true);
    const CameraTwist u = random_twist(rng, 1.0, 1.0);
    const MPLine x = plucker_to_mp(l);
    const SphereLine s = plucker_to_sphere(l);
    const MPDerivative dm = mp_dynamics(x, u);
    Vec6 mp_tangent;
    mp_tangent << dm.dm, dm.dchi;
    const Vec6 sph_tangent = sphere_tangent_in_mp(s, sphere_dynamics(s, u));
    worst = std::max(worst, (mp_tangent - sph_tangent).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("analytic Jacobian matches central differences") {
  Rng rng(24);
  for (int i = 0; i < 1000; ++i) {
    const MPLine x = random_mp(rng, 2.0);
    const CameraTwist u = random_twist(rng, 1.0, 1.0);
    const Mat6 j = mp_jacobian(x, u);
    const Mat6 fd = fd_jacobian(x.to_vector(), u, 1e-6);
    CHECK((j - fd).norm() <= 1e-5 * std::max(j.norm(), 1e-12));
  }
}

TEST_CASE("Jacobian blocks respect their norm bounds inside the envelope") {
  Rng rng(25);
  for (int i = 0; i < 1000; ++i) {
    const MPLine x = random_mp(rng, 0.2);
    const CameraTwist u = random_twist(rng);
    const JacobianBlocks b = mp_jacobian_blocks(x, u);
    const double w = u.omega.norm(), v = u.nu.norm(), c = x.chi.norm();
    const double slack = 1e-12;
    CHECK(spectral_norm(b.j1) <= w + v * c + slack);
    CHECK(spectral_norm(b.j2) <= v + slack);
    CHECK(spectral_norm(b.j3) <= 2 * v * c * c + slack);
    CHECK(spectral_norm(b.j4) <= w + 4 * v * c + slack);
    Mat6 assembled;
    assembled << b.j1, b.j2, b.j3, b.j4;
    CHECK((assembled - mp_jacobian(x, u)).norm() == 0.0);
  }
}

TEST_CASE("Euler steps with zero dt or zero twist are the identity") {
  Rng rng(26);
  const MPLine x = random_mp(rng, 0.5);
  const CameraTwist u = random_twist(rng);
  CHECK((euler_step(x, u, 0.0).to_vector() - x.to_vector()).norm() < 1e-15);
  CHECK((euler_step(x, {}, kDefaultDt).to_vector() - x.to_vector()).norm() < 1e-15);
  const SphereLine s{0.4, -0.3, 0.2, 0.1};
  CHECK((euler_step_sphere(s, u, 0.0).to_vector() - s.to_vector()).norm() < 1e-15);
  CHECK((euler_step_sphere(s, {}, kDefaultDt).to_vector() - s.to_vector()).norm() < 1e-15);
}

TEST_CASE("Euler step keeps the M-P constraints") {
  Rng rng(27);
  for (int i = 0; i < 200; ++i) {
    const MPLine x = euler_step(random_mp(rng, 1.0), random_twist(rng), kDefaultDt);
    CHECK(x.moment.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(x.moment.dot(x.chi)) < 1e-14);
  }
}

TEST_CASE("Euler local error against an RK4 reference is second order") {
  Rng rng(28);
  const MPLine x = random_mp(rng, 0.5);
  const CameraTwist u = random_twist(rng);
  std::vector<double> hs{0.04, 0.02, 0.01, 0.005};
  std::vector<double> errs;
  for (double h : hs) {
    const Vec6 exact = rk4_flow(x.to_vector(), u, h);
    errs.push_back((euler_step_raw(x.to_vector(), u, h) - exact).norm());
  }
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double slope = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("sphere and M-P Euler steps agree to second order") {
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const PluckerLine l = random_line(rng, true);
    const CameraTwist u = random_twist(rng);
    auto gap = [&](double h) {
      const MPLine a = euler_step(plucker_to_mp(l), u, h);
      const MPLine b = sphere_to_mp(euler_step_sphere(plucker_to_sphere(l), u, h));
      return (a.to_vector() - b.to_vector()).norm();
    };
    const double g1 = gap(0.02), g2 = gap(0.01);
    // the second-order constant grows with |chi| cubed for lines near the camera
    const double c = 1.0 + plucker_to_mp(l).chi.norm();
    CHECK(g1 < 50 * 0.02 * 0.02 * c * c * c);
    // halving dt divides the gap by about four
    CHECK(g2 < 0.3 * g1 + 1e-13);
  }
}

}  // TEST_SUITE
