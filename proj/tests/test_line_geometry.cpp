#include "support.hpp"

#include <linesfm/errors.hpp>
#include <linesfm/line_geometry.hpp>

#include <doctest.h>

#include <numbers>

using namespace linesfm;
using linesfm::test::random_line;

namespace {

void check_invariants(const PluckerLine& l) {
  CHECK(l.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.moment.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(l.moment.dot(l.direction)) < 1e-12);
  CHECK(l.depth > 0.0);
}

}  // namespace

TEST_SUITE("line_geometry") {

TEST_CASE("moment from an axis-aligned point and direction") {
  const MomentDepth md = moment_from_point_direction({0, 0, 2}, {1, 0, 0});
  CHECK((md.moment - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK(md.depth == doctest::Approx(2.0));
}

TEST_CASE("a line through the camera center is degenerate") {
  CHECK_THROWS_AS(moment_from_point_direction({0, 0, 1}, {0, 0, 1}), DegenerateLine);
  CHECK_THROWS_AS(make_line_point({0, 0, 0}, {1, 0, 0}), DegenerateLine);
}

TEST_CASE("generic point and direction give an orthonormal moment") {
  const Vec3 p(1, 1, 3);
  const Vec3 d(0, 1, 0);
  const MomentDepth md = moment_from_point_direction(p, d);
  const Vec3 expected = p.cross(d).normalized();
  CHECK((md.moment - expected).norm() < 1e-15);
  CHECK(std::abs(md.moment.dot(d)) < 1e-15);
  CHECK(md.moment.norm() == doctest::Approx(1.0).epsilon(1e-15));
  // distance from the origin to the line through p along d
  CHECK(md.depth == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
}

TEST_CASE("moment and depth do not depend on the point chosen on the line") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const PluckerLine l = random_line(rng);
    const Vec3 p = l.direction.cross(l.moment) * l.depth;  // closest point
    const double t = rng.uniform(-10, 10);
    const MomentDepth a = moment_from_point_direction(p, l.direction);
    const MomentDepth b = moment_from_point_direction(p + t * l.direction, l.direction);
    CHECK((a.moment - b.moment).norm() < 1e-10);
    CHECK(std::abs(a.depth - b.depth) < 1e-10);
  }
}

TEST_CASE("plucker to M-P on a hand example and back") {
  const PluckerLine l{{1, 0, 0}, {0, 1, 0}, 2.0};
  const MPLine x = plucker_to_mp(l);
  CHECK((x.chi - Vec3(0, 0, 0.5)).norm() < 1e-15);
  const PluckerLine back = mp_to_plucker({{0, 1, 0}, {0, 0, 0.5}});
  CHECK((back.direction - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK(back.depth == doctest::Approx(2.0));
}

TEST_CASE("zero inverse depth is a line at infinity") {
  CHECK_THROWS_AS(mp_to_plucker({{0, 1, 0}, {0, 0, 0}}), LineAtInfinity);
  CHECK_THROWS_AS(sphere_to_plucker({0.0, 0.0, 0.0, 0.0}), LineAtInfinity);
}

TEST_CASE("M-P round trip and chi norm over random lines") {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const PluckerLine l = random_line(rng);
    const MPLine x = plucker_to_mp(l);
    CHECK(x.chi.norm() * l.depth == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(x.moment.dot(x.chi)) < 1e-12);
    const PluckerLine back = mp_to_plucker(x);
    check_invariants(back);
    CHECK((back.direction - l.direction).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((back.moment - l.moment).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(std::abs(back.depth - l.depth) < 1e-12 * std::max(1.0, l.depth));
  }
}

TEST_CASE("random admissible M-P states map to valid lines") {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const MPLine x = test::random_mp(rng, 2.0);
    check_invariants(mp_to_plucker(x));
  }
}

TEST_CASE("sphere angles of an equator moment") {
  const SphereLine s = plucker_to_sphere({{0, 1, 0}, {1, 0, 0}, 1.0});
  CHECK(s.theta == doctest::Approx(0.0));
  CHECK(s.phi == doctest::Approx(0.0));
}

TEST_CASE("a polar moment is a spherical singularity") {
  CHECK_THROWS_AS(plucker_to_sphere({{1, 0, 0}, {0, 0, 1}, 1.0}), SphericalSingularity);
  CHECK_THROWS_AS(plucker_to_sphere({{1, 0, 0}, {0, 0, -1}, 1.0}), SphericalSingularity);
}

TEST_CASE("sphere state on the equator reconstructs the expected moment") {
  const PluckerLine l = sphere_to_plucker({0.0, 0.0, 0.0, 0.5});
  CHECK((l.moment - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK(std::abs(l.moment.dot(l.direction)) < 1e-15);
  CHECK(l.depth == doctest::Approx(2.0));
}

TEST_CASE("sphere basis is orthonormal and right-handed") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double ph = rng.uniform(-1.5, 1.5);
    const SphereBasis b = sphere_basis(th, ph);
    CHECK(std::abs(b.m_s.dot(b.m_p)) < 1e-15);
    CHECK((b.m_s.cross(b.m_p) - b.m_sxp).norm() < 1e-15);
    CHECK(b.m_sxp.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("sphere round trip over random non-polar lines") {
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const PluckerLine l = random_line(rng, true);
    const SphereLine s = plucker_to_sphere(l);
    CHECK(s.theta > -std::numbers::pi);
    CHECK(s.theta <= std::numbers::pi);
    CHECK(std::abs(s.phi) < std::numbers::pi / 2);
    CHECK(s.eta1 * s.eta1 + s.eta2 * s.eta2 ==
          doctest::Approx(1.0 / (l.depth * l.depth)).epsilon(1e-12));
    const PluckerLine back = sphere_to_plucker(s);
    check_invariants(back);
    CHECK((back.direction - l.direction).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((back.moment - l.moment).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(std::abs(back.depth - l.depth) < 1e-10);
  }
}

TEST_CASE("M-P and sphere conversions commute") {
  Rng rng(16);
  for (int i = 0; i < 300; ++i) {
    const PluckerLine l = random_line(rng, true);
    const MPLine x = plucker_to_mp(l);
    const SphereLine s = mp_to_sphere(x);
    const SphereLine direct = plucker_to_sphere(l);
    CHECK((s.to_vector() - direct.to_vector()).norm() < 1e-12);
    CHECK((sphere_to_mp(s).to_vector() - x.to_vector()).norm() < 1e-12);
    CHECK((sphere_chi(s) - x.chi).norm() < 1e-12);
  }
}

TEST_CASE("projection restores the M-P constraints") {
  const MPLine p = project_mp({{0, 2, 0}, {0.3, 0.4, 0.5}});
  CHECK(p.moment.norm() == doctest::Approx(1.0));
  CHECK(std::abs(p.moment.dot(p.chi)) < 1e-15);
  CHECK((p.chi - Vec3(0.3, 0, 0.5)).norm() < 1e-15);
}

TEST_CASE("angle wrapping lands in the half-open interval") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}

}  // TEST_SUITE
