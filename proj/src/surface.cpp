#include "orthospec/surface.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "orthospec/error.hpp"

namespace orthospec {

namespace {

using Mat = Eigen::Matrix2d;

// Order-two isometry: half-turn, or reflection z -> (a conj(z) + b) / (c conj(z) + d) with det -1.
struct Involution {
  Mat m;
  bool reflect = false;

  Point apply(const Point& z) const {
    const Point w = reflect ? std::conj(z) : z;
    return (m(0, 0) * w + m(0, 1)) / (m(1, 0) * w + m(1, 1));
  }
  BoundaryPoint apply(const BoundaryPoint& p) const {
    if (p.infinite) {
      if (m(1, 0) == 0.0) return BoundaryPoint::infinity();
      return BoundaryPoint::at(m(0, 0) / m(1, 0));
    }
    const double den = m(1, 0) * p.x + m(1, 1);
    if (den == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::at((m(0, 0) * p.x + m(0, 1)) / den);
  }
  HalfPlane apply(const HalfPlane& h) const {
    return half_plane_containing({apply(h.edge.from), apply(h.edge.to)}, apply(h.interior_point()));
  }
};

Isometry compose(const Involution& s, const Involution& t) {
  Isometry g(s.m * t.m);
  g.renormalize();
  return g;
}

Involution reflection_in(const GeodesicLine& line) {
  Involution r;
  r.reflect = true;
  if (line.from.infinite || line.to.infinite) {
    const double u = line.from.infinite ? line.to.x : line.from.x;
    r.m << -1.0, 2.0 * u, 0.0, 1.0;
    return r;
  }
  const double mid = 0.5 * (line.from.x + line.to.x);
  const double rad = 0.5 * std::abs(line.to.x - line.from.x);
  r.m << mid, rad * rad - mid * mid, 1.0, -mid;
  r.m /= rad;
  return r;
}

Involution half_turn(const Point& p) {
  const double sv = std::sqrt(p.imag());
  Mat s, rot;
  s << sv, p.real() / sv, 0.0, 1.0 / sv;
  rot << 0.0, -1.0, 1.0, 0.0;
  Involution e;
  e.m = s * rot * s.inverse();
  return e;
}

// Map sending xi to infinity.
Isometry cusp_chart(const BoundaryPoint& xi) {
  if (xi.infinite) return Isometry::identity();
  return Isometry(0.0, -1.0, 1.0, -xi.x);
}

GeodesicLine perpendicular_through(const Point& p, const GeodesicLine& line) {
  const Isometry n = standard_frame(line);
  const double r = std::abs(n.apply(p));
  const Isometry inv = n.inverse();
  return {inv.apply(BoundaryPoint::at(-r)), inv.apply(BoundaryPoint::at(r))};
}

GeodesicLine line_to_ideal(const Point& p, const BoundaryPoint& xi) {
  const Isometry n = cusp_chart(xi);
  const Isometry inv = n.inverse();
  return {inv.apply(BoundaryPoint::at(n.apply(p).real())), inv.apply(BoundaryPoint::infinity())};
}

// Overlap of two open half-planes measured on the boundary circle: > 0 means they intersect.
double half_plane_overlap(const HalfPlane& h1, const HalfPlane& h2) {
  auto one_way = [](const HalfPlane& a, const HalfPlane& b) {
    const Isometry n = standard_frame(a.edge);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& e : {b.edge.from, b.edge.to}) {
      const BoundaryPoint w = n.apply(e);
      if (w.infinite) continue;
      // endpoints of b must avoid the open arc (-inf, 0) bounding a; depth measured in angle
      const double th = std::atan(w.x);
      worst = std::max(worst, std::min(-th, th + M_PI / 2));
    }
    // b may also swallow a: a's interior point inside b
    if (b.contains(a.interior_point())) worst = std::max(worst, 1.0);
    return worst;
  };
  return std::max(one_way(h1, h2), one_way(h2, h1));
}

double schottky_residual(const std::vector<HalfPlane>& hp) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hp.size(); ++i)
    for (std::size_t j = i + 1; j < hp.size(); ++j) worst = std::max(worst, half_plane_overlap(hp[i], hp[j]));
  return worst;
}

double sign_free_distance(const Isometry& g, const Isometry& h) {
  const Mat d1 = g.matrix() - h.matrix();
  const Mat d2 = g.matrix() + h.matrix();
  return std::min(d1.cwiseAbs().maxCoeff(), d2.cwiseAbs().maxCoeff());
}

// Generators A = s1 s0, B = s0 s2 and the four side half-planes of D u s0(D).
struct InvolutionTriple {
  Involution s1, s0, s2;
  GeodesicLine l1, l2;
  Point ref;  // point of D fixed by s0
};

bool assemble(const InvolutionTriple& t, SurfaceModel& s) {
  const HalfPlane ha = half_plane_containing(t.l1, t.ref);
  const HalfPlane hbi = half_plane_containing(t.l2, t.ref);
  // half_plane_containing picks the side of ref; flip to the far side
  const HalfPlane far_a{ha.edge.reversed()};
  const HalfPlane far_bi{hbi.edge.reversed()};
  if (!ha.contains(t.ref) || !hbi.contains(t.ref)) return false;
  s.half_planes = {far_a, t.s0.apply(far_a), t.s0.apply(far_bi), far_bi};
  if (schottky_residual(s.half_planes) > 1e-9) return false;
  s.rank = 2;
  s.generators = {compose(t.s1, t.s0), compose(t.s0, t.s2)};
  return true;
}

std::string fmt_len(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool HalfPlane::contains(const Point& z, double tol) const { return signed_distance_to_line(z, edge) < -tol; }

Point HalfPlane::interior_point() const { return standard_frame(edge).inverse().apply(Point(-1.0, 1.0)); }

HalfPlane half_plane_containing(const GeodesicLine& line, const Point& inside) {
  if (signed_distance_to_line(inside, line) < 0.0) return {line};
  return {line.reversed()};
}

Isometry SurfaceModel::letter_matrix(Letter x) const {
  const Isometry& g = generators.at(x / 2);
  return (x & 1u) ? g.inverse() : g;
}

Isometry SurfaceModel::evaluate(std::span<const Letter> letters) const {
  Isometry acc;
  std::size_t n = 0;
  for (Letter x : letters) {
    acc = acc * letter_matrix(x);
    if (++n % 32 == 0) acc.renormalize();
  }
  acc.renormalize();
  return acc;
}

Isometry SurfaceModel::evaluate(const GroupWord& w) const { return evaluate(std::span<const Letter>(w.letters())); }

GroupWord SurfaceModel::locate(const Point& z0, Point* local) const {
  Point z = z0;
  std::vector<Letter> h;
  const int n_letters = 2 * rank;
  for (int step = 0;; ++step) {
    if (step > 200000) throw Error(ErrorKind::BudgetExceeded, "locate: point too close to the limit set");
    int hit = -1;
    for (int x = 0; x < n_letters; ++x)
      if (half_planes[x].contains(z, 1e-12)) {
        hit = x;
        break;
      }
    if (hit < 0) break;
    z = letter_matrix(inverse_letter(static_cast<Letter>(hit))).apply(z);
    h.push_back(static_cast<Letter>(hit));
  }
  if (local) *local = z;
  return GroupWord(std::span<const Letter>(h), rank);
}

bool SurfaceModel::in_domain(const Point& z) const {
  return std::none_of(half_planes.begin(), half_planes.end(), [&](const HalfPlane& h) { return h.contains(z); });
}

double SurfaceModel::boundary_position(int i, const Point& z) const {
  const BoundaryFrame& f = frames.at(i);
  const Point w = f.to_frame.apply(z);
  return f.cusp ? w.real() / f.height : std::log(w.imag());
}

double SurfaceModel::class_length(const GroupWord& w) const {
  const Isometry m = evaluate(w);
  switch (classify(m)) {
    case IsometryClass::Hyperbolic: return translation_length(m);
    case IsometryClass::Parabolic: return 0.0;
    default: throw Error(ErrorKind::NotHyperbolic, "class_length: element " + w.str() + " is not hyperbolic");
  }
}

namespace {

// endpoints shared by two side lines
std::vector<BoundaryPoint> ideal_vertices(const SurfaceModel& s) {
  std::vector<BoundaryPoint> vertices;
  for (std::size_t a = 0; a < s.half_planes.size(); ++a)
    for (std::size_t b = a + 1; b < s.half_planes.size(); ++b)
      for (const auto& p : {s.half_planes[a].edge.from, s.half_planes[a].edge.to})
        for (const auto& q : {s.half_planes[b].edge.from, s.half_planes[b].edge.to})
          if (p.same_as(q, 1e-9) && std::none_of(vertices.begin(), vertices.end(), [&](const BoundaryPoint& v) { return v.same_as(p, 1e-9); }))
            vertices.push_back(p);
  return vertices;
}

}  // namespace

void finalize_surface(SurfaceModel& s) {
  const std::size_t nb = s.boundary_words.size();
  s.frames.assign(nb, {});
  s.cusp_horocycles.assign(nb, std::nullopt);
  s.lifts_in_domain.clear();
  for (std::size_t i = 0; i < nb; ++i) {
    const Isometry b = s.evaluate(s.boundary_words[i]);
    BoundaryFrame& f = s.frames[i];
    if (s.boundary_specs[i].is_cusp()) {
      const Isometry chart = cusp_chart(parabolic_fixed_point(b));
      const Isometry p = chart * b * chart.inverse();
      const double c = p.b() / p.a();
      f.cusp = true;
      f.to_frame = chart;
      f.height = std::abs(c) / 2.0;
      f.shift = c / f.height;
      f.period = std::abs(f.shift);
      s.cusp_horocycles[i] = apply(chart.inverse(), Horocycle{BoundaryPoint::infinity(), f.height});
      continue;
    }
    f.to_frame = standard_frame(axis(b));
    f.period = translation_length(b);
    f.shift = f.period;
    // the limit set sits on one side of every boundary lift
    for (const char* probe : {"a", "b", "ab", "aB", "aab"}) {
      const Isometry g = s.evaluate(s.word(probe));
      if (classify(g) != IsometryClass::Hyperbolic) continue;
      const BoundaryPoint e = f.to_frame.apply(axis(g).to);
      if (e.infinite || std::abs(e.x) < 1e-12) continue;
      f.inward = e.x > 0 ? 1 : -1;
      break;
    }
  }
  // boundary lifts touching the closed domain
  std::vector<GroupWord> words{GroupWord(std::span<const Letter>(), s.rank)};
  for_each_reduced_word(s.rank, 4, [&](const GroupWord& w) {
    words.push_back(w);
    return true;
  });
  const std::vector<BoundaryPoint> vertices = ideal_vertices(s);
  // h and h b_i^n give the same lift; keep the shortest (then least) representative
  auto coset_canonical = [&](const GroupWord& h, std::size_t i) {
    for (int n = -6; n <= 6; ++n) {
      if (n == 0) continue;
      const GroupWord w = h * s.boundary_words[i].power(n);
      if (w.size() < h.size() || (w.size() == h.size() && w < h)) return false;
    }
    return true;
  };
  s.horoballs_in_domain.clear();
  for (std::size_t i = 0; i < nb; ++i) {
    if (!s.boundary_specs[i].is_cusp()) continue;
    for (const auto& h : words) {
      if (!coset_canonical(h, i)) continue;
      const Horocycle horo = apply(s.evaluate(h), *s.cusp_horocycles[i]);
      const bool at_vertex = std::any_of(vertices.begin(), vertices.end(), [&](const BoundaryPoint& v) { return v.same_as(horo.base, 1e-9); });
      const bool dup = std::any_of(s.horoballs_in_domain.begin(), s.horoballs_in_domain.end(),
                                   [&](const HoroballLift& l) { return l.horo.base.same_as(horo.base, 1e-9); });
      if (at_vertex && !dup) s.horoballs_in_domain.push_back({static_cast<int>(i), h, horo});
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (s.boundary_specs[i].is_cusp()) continue;
    const GeodesicLine ax = axis(s.evaluate(s.boundary_words[i]));
    for (const auto& h : words) {
      if (!coset_canonical(h, i)) continue;
      const GeodesicLine line = apply(s.evaluate(h), ax);
      bool inside_one = false;
      for (const auto& hp : s.half_planes) {
        const Isometry n = standard_frame(hp.edge);
        const BoundaryPoint u = n.apply(line.from), v = n.apply(line.to);
        if (!u.infinite && !v.infinite && u.x < -1e-12 && v.x < -1e-12) {
          inside_one = true;
          break;
        }
      }
      if (inside_one) continue;
      const bool dup = std::any_of(s.lifts_in_domain.begin(), s.lifts_in_domain.end(), [&](const BoundaryLift& l) {
        return l.line.from.same_as(line.from, 1e-9) && l.line.to.same_as(line.to, 1e-9);
      });
      if (!dup) s.lifts_in_domain.push_back({static_cast<int>(i), h, line});
    }
  }
}

SurfaceModel build_pair_of_pants(double l1, double l2, double l3) {
  for (double l : {l1, l2, l3})
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::InadmissibleParams, "pants: boundary lengths must be finite and >= 0");
  const double c1 = std::cosh(l1 / 2.0), c2 = std::cosh(l2 / 2.0);
  const double q1 = (c1 - 1.0) / (c1 + 1.0);
  const GeodesicLine p{BoundaryPoint::at(0.0), BoundaryPoint::infinity()};
  const GeodesicLine q{BoundaryPoint::at(q1), BoundaryPoint::at(1.0)};

  auto r_line = [&](double rho) -> GeodesicLine {
    if (l2 == 0.0) return {BoundaryPoint::at(rho), BoundaryPoint::infinity()};
    return {BoundaryPoint::at(rho), BoundaryPoint::at(rho * (c2 + 1.0) / (c2 - 1.0))};
  };
  double rho = 1.0;
  if (l3 > 0.0) {
    auto dist = [&](double r) { return common_perpendicular(q, r_line(r)).length; };
    double lo = 0.0, hi = 1.0;  // log rho
    while (dist(std::exp(hi)) < l3 / 2.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (dist(std::exp(mid)) < l3 / 2.0 ? lo : hi) = mid;
    }
    rho = std::exp(0.5 * (lo + hi));
  }
  const GeodesicLine r = r_line(rho);

  SurfaceModel s;
  s.id = "pants:" + fmt_len(l1) + "," + fmt_len(l2) + "," + fmt_len(l3);
  const InvolutionTriple t{reflection_in(q), reflection_in(p), reflection_in(r), q, r, Point(0.0, 2.0)};
  if (!assemble(t, s)) throw Error(ErrorKind::InadmissibleParams, "pants: side lines do not bound a Schottky domain");
  s.boundary_words = {s.word("a"), s.word("b"), s.word("BA")};
  s.boundary_elements = {compose(t.s1, t.s0), compose(t.s0, t.s2), compose(t.s2, t.s1)};
  const double ls[3] = {l1, l2, l3};
  for (int i = 0; i < 3; ++i) {
    BoundarySpec b;
    b.kind = ls[i] == 0.0 ? BoundarySpec::Kind::Cusp : BoundarySpec::Kind::Geodesic;
    b.length = ls[i];
    b.index = i;
    s.boundary_specs.push_back(b);
  }
  finalize_surface(s);
  return s;
}

SurfaceModel build_one_holed_torus(const BoundarySpec& boundary, double fn_len, double fn_twist) {
  if (!(fn_len > 0.0) || !std::isfinite(fn_len)) throw Error(ErrorKind::InadmissibleParams, "torus: fn_len must be positive");
  if (!boundary.is_cusp() && !(boundary.length > 0.0)) throw Error(ErrorKind::InadmissibleParams, "torus: boundary length must be positive");
  if (!std::isfinite(fn_twist)) throw Error(ErrorKind::InadmissibleParams, "torus: twist must be finite");
  const double x = 2.0 * std::cosh(fn_len / 2.0);
  const double kappa = boundary.is_cusp() ? 0.0 : 2.0 - 2.0 * std::cosh(boundary.length / 2.0);
  const double th = fn_twist / 2.0;
  const double u = std::sqrt((x * x - kappa) / (x - 2.0)) * std::cosh(th);
  const double v = std::sqrt((x * x - kappa) / (x + 2.0)) * std::sinh(th);
  const double y = u + v, z = u - v;
  if (!(y > 2.0) || !(z > 2.0)) throw Error(ErrorKind::InadmissibleParams, "torus: parameters give a non-hyperbolic generator");

  const double d12 = std::acosh(x / 2.0), d23 = std::acosh(y / 2.0), d13 = std::acosh(z / 2.0);
  const double cos2 = (std::cosh(d12) * std::cosh(d23) - std::cosh(d13)) / (std::sinh(d12) * std::sinh(d23));
  if (!(std::abs(cos2) < 1.0)) throw Error(ErrorKind::InadmissibleParams, "torus: degenerate half-turn triangle");
  const double theta = std::acos(cos2);

  SurfaceModel s;
  s.id = "torus1:" + (boundary.is_cusp() ? std::string("cusp") : fmt_len(boundary.length)) + "," + fmt_len(fn_twist);
  const Point p1(0.0, std::exp(d12)), p2(0.0, 1.0);
  for (double sgn : {1.0, -1.0}) {
    const double ph = sgn * theta / 2.0;
    const Isometry rot(std::cos(ph), std::sin(ph), -std::sin(ph), std::cos(ph));
    const Point p3 = rot.apply(Point(0.0, std::exp(d23)));
    const Involution e1 = half_turn(p1), e2 = half_turn(p2), e3 = half_turn(p3);
    // candidate sides: through P1 and P3, orthogonal to (or ending at) a boundary lift
    const Involution* es[3] = {&e1, &e2, &e3};
    std::vector<Isometry> ks;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int k = 3 - i - j;
        if (i == j || k == i || k == j) continue;
        ks.push_back(Isometry(es[i]->m * es[j]->m * es[k]->m));
      }
    auto side = [&](const Point& pt, const Isometry& k) -> std::optional<GeodesicLine> {
      const IsometryClass c = classify(k, 1e-7);
      if (boundary.is_cusp()) {
        if (c != IsometryClass::Parabolic) return std::nullopt;
        return line_to_ideal(pt, parabolic_fixed_point(k));
      }
      if (c != IsometryClass::Hyperbolic) return std::nullopt;
      return perpendicular_through(pt, axis(k));
    };
    for (const auto& k1 : ks)
      for (const auto& k3 : ks) {
        const auto g1 = side(p1, k1), g3 = side(p3, k3);
        if (!g1 || !g3) continue;
        const InvolutionTriple t{e1, e2, e3, *g1, *g3, p2};
        if (!assemble(t, s)) continue;
        s.boundary_words = {s.word("abAB")};
        if (boundary.is_cusp()) {
          // the cusp frame needs the fixed point of the boundary word at an ideal vertex of F
          const auto verts = ideal_vertices(s);
          std::optional<GroupWord> pick;
          for_each_reduced_word(s.rank, 2, [&](const GroupWord& w) {
            const GroupWord c = w * s.boundary_words[0] * w.inverse();
            const BoundaryPoint fp = parabolic_fixed_point(s.evaluate(c));
            if (std::any_of(verts.begin(), verts.end(), [&](const BoundaryPoint& v) { return v.same_as(fp, 1e-9); })) {
              pick = c;
              return false;
            }
            return true;
          });
          const BoundaryPoint fp0 = parabolic_fixed_point(s.evaluate(s.boundary_words[0]));
          const bool at_vertex = std::any_of(verts.begin(), verts.end(), [&](const BoundaryPoint& v) { return v.same_as(fp0, 1e-9); });
          if (!at_vertex) {
            if (!pick) continue;
            s.boundary_words = {*pick};
          }
        }
        s.boundary_elements = {s.evaluate(s.boundary_words[0])};
        BoundarySpec b = boundary;
        b.index = 0;
        if (b.is_cusp()) b.length = 0.0;
        s.boundary_specs = {b};
        finalize_surface(s);
        return s;
      }
  }
  throw Error(ErrorKind::InadmissibleParams, "torus: no Schottky configuration found");
}

SurfaceModel build_modular_torus() {
  SurfaceModel s = build_one_holed_torus(BoundarySpec{BoundarySpec::Kind::Cusp, 0.0, 0}, 2.0 * std::acosh(1.5), 0.0);
  s.id = "modular";
  return s;
}

namespace {

double parse_len(std::string_view tok, bool allow_cusp) {
  if (allow_cusp && tok == "cusp") return 0.0;
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(ErrorKind::Parse, "bad number '" + std::string(tok) + "' in surface spec");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t k = s.find(sep, start);
    out.push_back(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  return out;
}

}  // namespace

SurfaceModel build_surface(std::string_view spec) {
  if (spec == "modular") return build_modular_torus();
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorKind::Parse, "unknown surface spec '" + std::string(spec) + "'");
  const std::string_view kind = spec.substr(0, colon);
  const auto args = split(spec.substr(colon + 1), ',');
  if (kind == "pants") {
    if (args.size() != 3) throw Error(ErrorKind::Parse, "pants spec needs three lengths");
    SurfaceModel s = build_pair_of_pants(parse_len(args[0], true), parse_len(args[1], true), parse_len(args[2], true));
    s.id = std::string(spec);
    return s;
  }
  if (kind == "torus1") {
    if (args.size() != 2) throw Error(ErrorKind::Parse, "torus1 spec needs a boundary length and a twist");
    BoundarySpec b;
    if (args[0] == "cusp" || parse_len(args[0], false) == 0.0) {
      b.kind = BoundarySpec::Kind::Cusp;
    } else {
      b.kind = BoundarySpec::Kind::Geodesic;
      b.length = parse_len(args[0], false);
    }
    // fn_len stays at the modular value 2 acosh(3/2)
    SurfaceModel s = build_one_holed_torus(b, 2.0 * std::acosh(1.5), parse_len(args[1], false));
    s.id = std::string(spec);
    return s;
  }
  throw Error(ErrorKind::Parse, "unknown surface kind '" + std::string(kind) + "'");
}

std::pair<GroupWord, Isometry> boundary_generator(const SurfaceModel& s, int i) {
  if (i < 0 || static_cast<std::size_t>(i) >= s.boundary_words.size())
    throw Error(ErrorKind::BadIndex, "boundary index " + std::to_string(i) + " out of range");
  return {s.boundary_words[i], s.evaluate(s.boundary_words[i])};
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

ValidationReport validate(const SurfaceModel& s) {
  ValidationReport rep;
  auto add = [&](std::string name, double residual, double tol) {
    const bool pass = std::isfinite(residual) && residual <= tol;
    rep.checks.push_back({std::move(name), residual, tol, pass});
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.boundary_words.size(); ++i) {
    const Isometry m = s.evaluate(s.boundary_words[i]);
    const std::string tag = "boundary[" + std::to_string(i) + "] ";
    if (s.boundary_specs[i].is_cusp()) {
      add(tag + "parabolic", classify(m) == IsometryClass::Parabolic ? std::abs(std::abs(m.trace()) - 2.0) : inf, 1e-9);
    } else {
      add(tag + "length", classify(m) == IsometryClass::Hyperbolic ? std::abs(translation_length(m) - s.boundary_specs[i].length) : inf,
          1e-9);
    }
    if (i < s.boundary_elements.size()) add(tag + "relator", sign_free_distance(m, s.boundary_elements[i]), 1e-9);
  }
  if (s.boundary_elements.size() == 3) {
    const Isometry prod = s.boundary_elements[0] * s.boundary_elements[1] * s.boundary_elements[2];
    add("boundary product", sign_free_distance(prod, Isometry::identity()), 1e-9);
  }
  if (s.boundary_words.size() == 1 && s.rank == 2) {
    const Isometry a = s.generators[0], b = s.generators[1];
    const double x = a.trace(), y = b.trace(), z = (a * b).trace();
    const double comm = (a * b * a.inverse() * b.inverse()).trace();
    add("commutator trace identity", std::abs(x * x + y * y + z * z - x * y * z - 2.0 - comm), 1e-9 * (1.0 + x * y * z));
  }
  double closest = inf;
  for_each_reduced_word(s.rank, 6, [&](const GroupWord& w) {
    closest = std::min(closest, sign_free_distance(s.evaluate(w), Isometry::identity()));
    return true;
  });
  // residual is how close a nontrivial short word comes to the identity
  add("free of rank " + std::to_string(s.rank), closest > 1e-6 ? 0.0 : 1.0 - closest, 0.0);
  add("schottky sides disjoint", std::max(0.0, schottky_residual(s.half_planes)), 1e-9);
  return rep;
}

}  // namespace orthospec
