#include <cmath>
#include <string>

#include "doctest.h"
#include "orthospec/error.hpp"
#include "orthospec/raysim.hpp"

using namespace orthospec;

TEST_CASE("ray from the foot of an arc lands on that arc") {
  for (const char* spec : {"pants:2,2,2", "pants:cusp,2,2"}) {
    const std::string name = spec;
    CAPTURE(name);
    const auto s = build_surface(spec);
    const auto r = enumerate_orthogeodesics(s, 0, 6.0);
    REQUIRE(!r.arcs.empty());
    for (std::size_t k = 0; k < std::min<std::size_t>(3, r.arcs.size()); ++k) {
      const auto& a = r.arcs[k];
      const auto o = shoot(s, 0, a.foot_from, Marking::empty(), 30.0);
      CHECK(o.kind == RayOutcome::Kind::HitBoundary);
      REQUIRE(o.eta.has_value());
      CHECK(o.eta->label() == a.label());
      CHECK(o.hit_boundary == a.to_boundary);
    }
  }
}

TEST_CASE("tiny budget stops every ray") {
  const auto s = build_surface("pants:2,2,2");
  const auto o = shoot(s, 1, 0.3, Marking::empty(), 0.001);
  CHECK(o.kind == RayOutcome::Kind::Budget);
  CHECK(o.signature().empty());
  CHECK(wandering_mass(s, 0, Marking::empty(), 200, 0.001) == 1.0);
}

TEST_CASE("sampling is deterministic and thread independent") {
  const auto s = build_surface("pants:2,2,2");
  const auto m = parse_marking("curve:BA", s);
  McOptions o1, o2;
  o2.threads = 2;
  const auto x = sample_orthorays(s, 0, m, 500, o1);
  const auto y = sample_orthorays(s, 0, m, 500, o1);
  const auto z = sample_orthorays(s, 0, m, 500, o2);
  REQUIRE(x.size() == 500);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(x[k].position == y[k].position);
    CHECK(x[k].outcome.signature() == y[k].outcome.signature());
    CHECK(x[k].outcome.signature() == z[k].outcome.signature());
    // stratum k of 500
    CHECK(x[k].position >= s.frames[0].period * k / 500.0);
    CHECK(x[k].position < s.frames[0].period * (k + 1) / 500.0 + 1e-12);
  }
  o1.seed = 99;
  const auto w = sample_orthorays(s, 0, m, 500, o1);
  CHECK(w[0].position != x[0].position);
}

TEST_CASE("monte carlo agrees with the largest gap") {
  const auto s = build_surface("pants:2,2,2");
  const auto m = Marking::empty();
  const auto r = verify_boundary(s, 0, m, 8.0);
  REQUIRE(!r.terms.empty());
  auto best = r.terms.front();
  for (const auto& t : r.terms)
    if (t.value > best.value) best = t;
  const auto g = estimate_gap_measure(s, 0, m, best, 4000);
  CHECK(g.samples == 4000);
  CHECK(g.stderr_ > 0.0);
  CHECK(std::abs(g.estimate - best.value) < 4.0 * g.stderr_);
  CHECK_THROWS_AS(estimate_gap_measure(s, 0, m, best, 10), Error);
}
