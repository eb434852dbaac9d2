#include <set>
#include <string>

#include "doctest.h"
#include "orthospec/error.hpp"
#include "orthospec/ortho.hpp"

using namespace orthospec;
using doctest::Approx;

namespace {

// every arc from `from` of measured length <= cut with a coset word of length <= max_word
std::set<std::string> brute_force(const SurfaceModel& s, int from, double cut, int max_word) {
  std::set<std::string> out;
  auto add = [&](const GroupWord& g) {
    for (int j = 0; j < static_cast<int>(s.boundary_count()); ++j) {
      try {
        const auto e = make_orthogeodesic(s, from, g, j);
        if (e.measured_length() <= cut) out.insert(e.label());
      } catch (const Error&) {
      }
    }
  };
  add(GroupWord({}, s.rank));
  for_each_reduced_word(s.rank, max_word, [&](const GroupWord& g) {
    add(g);
    return true;
  });
  return out;
}

}  // namespace

TEST_CASE("enumeration matches brute force on small cases") {
  struct Case {
    const char* spec;
    int from;
    double cut;
  };
  for (const Case c : {Case{"pants:2,2,2", 0, 7.0}, Case{"pants:1,0.5,3", 1, 7.0}, Case{"modular", 0, 6.0},
                       Case{"torus1:1,0.5", 0, 7.0}, Case{"pants:cusp,2,2", 0, 6.0}}) {
    const std::string spec = c.spec;
    CAPTURE(spec);
    const auto s = build_surface(c.spec);
    const auto r = enumerate_orthogeodesics(s, c.from, c.cut);
    CHECK_FALSE(r.budget_hit);
    std::set<std::string> got;
    for (const auto& a : r.arcs) CHECK(got.insert(a.label()).second);
    CHECK(got == brute_force(s, c.from, c.cut, 8));
    CHECK(!got.empty());
  }
}

TEST_CASE("arcs come sorted and carry consistent data") {
  const auto s = build_surface("pants:2,2,2");
  const auto r = enumerate_orthogeodesics(s, 0, 8.0);
  REQUIRE(r.arcs.size() > 4);
  for (std::size_t k = 1; k < r.arcs.size(); ++k) CHECK(r.arcs[k - 1].measured_length() <= r.arcs[k].measured_length());
  for (const auto& a : r.arcs) {
    CHECK(a.foot_from >= 0.0);
    CHECK(a.foot_from < s.frames[0].period);
    const auto again = make_orthogeodesic(s, a.from_boundary, a.coset_word, a.to_boundary);
    CHECK(again.length == Approx(a.length).epsilon(1e-10));
    CHECK(again.label() == a.label());
  }
}

TEST_CASE("coset words are canonical") {
  const auto s = build_surface("pants:1,0.5,3");
  const auto g = s.word("aB");
  const auto w0 = canonical_coset_word(s, 0, g, 1);
  const auto b0 = s.boundary_words[0], b1 = s.boundary_words[1];
  CHECK(canonical_coset_word(s, 0, b0 * g, 1) == w0);
  CHECK(canonical_coset_word(s, 0, b0.power(-2) * g * b1.power(3), 1) == w0);
}

TEST_CASE("cusp arcs get truncated lengths") {
  const auto s = build_surface("pants:cusp,2,2");
  const auto r = enumerate_orthogeodesics(s, 0, 6.0);
  REQUIRE(!r.arcs.empty());
  for (const auto& a : r.arcs) {
    CHECK(a.from_cusp);
    CHECK(a.trunc_len.has_value());
    if (a.to_cusp) CHECK(a.dbl_trunc_len.has_value());
  }
}

TEST_CASE("self-intersection counts") {
  const auto p = build_surface("pants:2,2,2");
  CHECK(self_intersections(p, conj_class(p.word("a"))) == 0);
  CHECK(self_intersections(p, conj_class(p.word("ab"))) == 0);
  CHECK(self_intersections(p, conj_class(p.word("aB"))) == 1);
  CHECK(self_intersections(p, conj_class(p.word("aaB"))) == 2);
  const auto t = build_surface("modular");
  for (const char* w : {"a", "b", "ab", "aB", "abAB"}) CHECK(self_intersections(t, conj_class(t.word(w))) == 0);
  CHECK(self_intersections(t, conj_class(t.word("aabb"))) == 1);
}

TEST_CASE("shortest arc is simple and its subloops are empty") {
  const auto s = build_surface("pants:2,2,2");
  const auto r = enumerate_orthogeodesics(s, 0, 6.0);
  REQUIRE(!r.arcs.empty());
  const auto loops = subloops(s, r.arcs.front());
  CHECK(loops.empty());
  CHECK(loops.crossings == 0);
}
