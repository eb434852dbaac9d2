#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "orthospec/identity.hpp"

using namespace orthospec;
using doctest::Approx;

TEST_CASE("empty marking on pants: partial sums grow towards the boundary length") {
  const auto s = build_surface("pants:2,2,2");
  const auto m = Marking::empty();
  double prev = 0.0;
  for (double cut : {6.0, 8.0, 10.0}) {
    const auto r = verify_boundary(s, 0, m, cut);
    CHECK(r.violations().empty());
    CHECK(r.target == Approx(2.0));
    CHECK(r.partial_sum >= prev);
    CHECK(r.partial_sum <= r.target + 1e-9);
    CHECK(r.defect == Approx(r.target - r.partial_sum));
    CHECK(r.max_overlap < 1e-8);
    for (const auto& t : r.terms) CHECK(t.kind == GapTerm::Kind::Phi);
    prev = r.partial_sum;
  }
}

TEST_CASE("marked cuff produces psi terms only for unsupportive arcs") {
  const auto s = build_surface("pants:2,2,2");
  const auto m = parse_marking("curve:BA", s);
  const auto r = verify_boundary(s, 0, m, 8.0);
  CHECK(r.violations().empty());
  std::size_t psi = 0;
  for (const auto& t : r.terms) {
    if (t.kind != GapTerm::Kind::Psi) continue;
    ++psi;
    const auto ins = inspect_arc(s, t.eta, m);
    CHECK_FALSE(ins.supportive);
    REQUIRE(t.alpha.has_value());
    CHECK(m.contains(*t.alpha, &s));
    CHECK(is_peripheral_to(s, t.eta, *t.alpha));
  }
  CHECK(psi > 0);
}

TEST_CASE("modular torus identity") {
  const auto s = build_modular_torus();
  const auto r = verify_surface(s, Marking::all_simple_primitive(12.0), 10.0);
  CHECK(r.violations().empty());
  CHECK(r.target == Approx(2.0));
  CHECK(r.partial_sum > 1.8);
  CHECK(r.partial_sum <= 2.0 + 1e-9);
}

TEST_CASE("violations catch a tampered report") {
  const auto s = build_surface("pants:2,2,2");
  auto r = verify_boundary(s, 0, Marking::empty(), 6.0);
  REQUIRE(r.violations().empty());
  auto neg = r;
  neg.defect = -0.5;
  CHECK_FALSE(neg.violations().empty());
  auto bad = r;
  REQUIRE(!bad.terms.empty());
  bad.terms.front().value = -1.0;
  CHECK_FALSE(bad.violations().empty());
}

TEST_CASE("csv and json output are deterministic") {
  const auto s = build_surface("pants:1,0.5,3");
  const auto m = parse_marking("curve:a", s);
  IdentityOptions one, two;
  two.threads = 2;
  const auto r1 = verify_surface(s, m, 7.0, one);
  const auto r2 = verify_surface(s, m, 7.0, two);
  CHECK(report_csv(r1) == report_csv(r2));
  CHECK(report_json(r1) == report_json(r2));
  const auto j = nlohmann::json::parse(report_json(r1));
  CHECK(j.contains("terms"));
  CHECK(j["terms"].size() == r1.terms.size());
}

TEST_CASE("half-trace product") {
  const auto s = build_surface("pants:2,2,2");
  const auto r = verify_boundary(s, 0, parse_marking("curve:BA", s), 8.0);
  const auto h = halftrace_product_check(s, r);
  CHECK(h.terms_checked == r.terms.size());
  CHECK(h.max_term_residual < 1e-12);
  CHECK(h.aggregate_residual < 1e-12);
  CHECK((h.normalization == "e^beta" || h.normalization == "e^(beta/2)"));

  const auto cusp = build_surface("modular");
  const auto rc = verify_surface(cusp, Marking::empty(), 6.0);
  CHECK(halftrace_product_check(cusp, rc).normalization == "none");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.5e17, -7.25}) CHECK(std::stod(format_double(v)) == v);
}
