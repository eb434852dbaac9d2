#include <string>

#include "doctest.h"
#include "orthospec/error.hpp"
#include "orthospec/markings.hpp"
#include "orthospec/ortho.hpp"

using namespace orthospec;

TEST_CASE("marking specs parse") {
  const auto s = build_surface("modular");
  CHECK(parse_marking("empty", s).is_empty());
  const auto c = parse_marking("curve:ab", s);
  CHECK(c.rule() == Marking::Rule::SingleCurve);
  CHECK(c.contains(conj_class(s.word("ab"))));
  CHECK(c.contains(conj_class(s.word("BA"))));
  const auto o = parse_marking("curve:ab,oriented", s);
  CHECK(o.contains(conj_class(s.word("ab"))));
  CHECK_FALSE(o.contains(conj_class(s.word("BA"))));
  CHECK(parse_marking("simple:maxlen=5", s).rule() == Marking::Rule::AllSimplePrimitive);
  CHECK_THROWS_AS(parse_marking("simple:len=5", s), Error);
  CHECK_THROWS_AS(parse_marking("bogus", s), Error);
  CHECK_THROWS_AS(parse_marking("curve:ab,twice", s), Error);
}

TEST_CASE("all simple primitive membership") {
  const auto s = build_surface("modular");
  const auto m = Marking::all_simple_primitive(10.0);
  for (const char* w : {"a", "b", "ab", "aB", "aab"}) CHECK(m.contains(conj_class(s.word(w)), &s));
  CHECK_FALSE(m.contains(conj_class(s.word("aa")), &s));    // not primitive
  CHECK_FALSE(m.contains(conj_class(s.word("aabb")), &s));  // not simple
}

TEST_CASE("simple classes on pants are the cuffs") {
  const auto s = build_surface("pants:2,2,2");
  const auto cs = simple_classes(s, 20.0);
  CHECK(cs.size() == 6);
  for (const auto& c : cs) CHECK(self_intersections(s, c) == 0);
}

TEST_CASE("coherence rejects a class with its own square") {
  const auto s = build_surface("torus1:1,0.5");
  const auto ab = conj_class(s.word("ab"));
  const auto abab = conj_class(s.word("abab"));
  const auto bad = Marking::explicit_list({ab, abab});
  const auto rep = is_coherent(bad, s, 14.0);
  CHECK_FALSE(rep.ok());
  REQUIRE(!rep.violations.empty());
  CHECK(rep.violations.front().inner == ab);
  CHECK(rep.violations.front().outer == abab);

  const auto kept = filter_coherent({ab, abab}, s, 14.0);
  const auto mem = kept.materialize(s, 14.0);
  REQUIRE(mem.size() == 1);
  CHECK(mem.front() == ab);
}

TEST_CASE("all simple primitive is coherent") {
  for (const char* spec : {"modular", "pants:2,2,2"}) {
    const std::string name = spec;
    CAPTURE(name);
    const auto s = build_surface(spec);
    CHECK(is_coherent(Marking::all_simple_primitive(14.0), s, 14.0).ok());
  }
}
