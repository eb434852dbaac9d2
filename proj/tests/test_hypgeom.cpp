#include <cmath>
#include <random>

#include "doctest.h"
#include "orthospec/error.hpp"
#include "orthospec/hypgeom.hpp"
#include "orthospec/identity.hpp"

using namespace orthospec;
using doctest::Approx;

TEST_CASE("isometry classification and translation length") {
  const auto d = Isometry::dilation(1.7);
  CHECK(classify(d) == IsometryClass::Hyperbolic);
  CHECK(translation_length(d) == Approx(1.7).epsilon(1e-14));
  CHECK(classify(Isometry::translation(2.0)) == IsometryClass::Parabolic);
  CHECK(std::abs(d.determinant() - 1.0) < 1e-14);
  CHECK_THROWS_AS(Isometry(1.0, 0.0, 0.0, -1.0), Error);
}

TEST_CASE("common perpendicular of two nested lines") {
  // (0,inf) and (1,4): cosh d = (1+4)/(4-1)
  const GeodesicLine g1{BoundaryPoint::at(0.0), BoundaryPoint::infinity()};
  const GeodesicLine g2{BoundaryPoint::at(1.0), BoundaryPoint::at(4.0)};
  const auto p = common_perpendicular(g1, g2);
  CHECK(p.length == Approx(std::acosh(5.0 / 3.0)).epsilon(1e-13));
  CHECK(point_distance(p.foot1, p.foot2) == Approx(p.length).epsilon(1e-12));
  const GeodesicLine g3{BoundaryPoint::at(-1.0), BoundaryPoint::at(4.0)};
  CHECK_THROWS_AS(common_perpendicular(g1, g3), Error);
}

TEST_CASE("horoball ortholength is invariant") {
  const Horocycle h1{BoundaryPoint::at(0.0), 0.5};
  const Horocycle h2{BoundaryPoint::infinity(), 3.0};
  const double d = horoball_ortholength(h1, h2);
  CHECK(d == Approx(std::log(3.0 / 0.5)));
  const Isometry g(2.0, 1.0, 3.0, 2.0);
  CHECK(horoball_ortholength(apply(g, h1), apply(g, h2)) == Approx(d).epsilon(1e-12));
}

TEST_CASE("collar") {
  CHECK(collar_halfwidth(2.0) == Approx(std::asinh(1.0 / std::sinh(1.0))));
  CHECK(collar_boundary_length(1e-6) == Approx(2.0));
  CHECK_THROWS_AS(collar_halfwidth(0.0), Error);
}

TEST_CASE("gap functions: dual forms and hexagon") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 10.0);
  for (int k = 0; k < 2000; ++k) {
    const double a = u(rng), e = u(rng);
    const double t = std::cosh(e / 2);
    CHECK(std::abs(gap_phi(e) - std::log(t * t / (t * t - 1))) <= 1e-12 * std::max(1.0, gap_phi(e)));
    const auto hex = hexagon_unfold(a, e);
    CHECK(std::abs(hex.psi - gap_psi(a, e)) < 1e-10);
    CHECK(hexagon_residuals(a, e).max() < 1e-10);
  }
  CHECK(gap_phi_cusp(1.0) == Approx(2.0 * std::exp(-1.0)));
  CHECK(gap_psi_cusp(1.0, 2.0) == Approx(std::exp(-1.5)));
}
