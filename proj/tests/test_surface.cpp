#include <cmath>
#include <string>

#include "doctest.h"
#include "orthospec/error.hpp"
#include "orthospec/surface.hpp"

using namespace orthospec;
using doctest::Approx;

TEST_CASE("surfaces validate") {
  for (const char* spec : {"pants:2,2,2", "pants:1,0.5,3", "pants:cusp,2,2", "pants:cusp,cusp,1", "modular",
                           "torus1:1,0", "torus1:cusp,1"}) {
    const std::string name = spec;
    CAPTURE(name);
    const auto s = build_surface(spec);
    const auto v = validate(s);
    for (const auto& c : v.checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
    }
    CHECK(v.ok());
  }
}

TEST_CASE("boundary generators have the requested lengths") {
  const auto s = build_surface("pants:1,0.5,3");
  const double want[] = {1.0, 0.5, 3.0};
  for (int i = 0; i < 3; ++i) {
    const auto [w, g] = boundary_generator(s, i);
    CHECK(translation_length(g) == Approx(want[i]).epsilon(1e-10));
    CHECK(s.class_length(w) == Approx(want[i]).epsilon(1e-10));
    CHECK(s.frames[i].period == Approx(want[i]).epsilon(1e-10));
  }
}

TEST_CASE("modular torus has one cusp and a systole of 2 acosh(3/2)") {
  const auto s = build_modular_torus();
  REQUIRE(s.boundary_count() == 1);
  CHECK(s.boundary_specs[0].is_cusp());
  CHECK(classify(s.boundary_elements[0]) == IsometryClass::Parabolic);
  CHECK(s.class_length(s.word("a")) == Approx(2 * std::acosh(1.5)).epsilon(1e-12));
  CHECK(s.class_length(s.word("b")) == Approx(2 * std::acosh(1.5)).epsilon(1e-12));
}

TEST_CASE("locate moves points into the domain") {
  const auto s = build_surface("pants:2,2,2");
  const Point z(0.3, 0.7);
  Point local;
  const auto w = s.locate(z, &local);
  CHECK(s.in_domain(local));
  const Point back = s.evaluate(w).apply(local);
  CHECK(std::abs(back - z) < 1e-10);
}

TEST_CASE("bad specs are rejected") {
  CHECK_THROWS_AS(build_surface("pants:1,2"), Error);
  CHECK_THROWS_AS(build_surface("sphere:1"), Error);
  CHECK_THROWS_AS(build_surface("pants:1,x,2"), Error);
  CHECK_THROWS_AS(build_surface("pants:-1,1,1"), Error);
}
