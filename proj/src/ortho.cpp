#include "orthospec/ortho.hpp"

#include <algorithm>
#include <cmath>

#include "orthospec/error.hpp"
#include "orthospec/markings.hpp"

namespace orthospec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Geodesic through two interior points, oriented z -> w.
GeodesicLine line_through(const Point& z, const Point& w) {
  if (std::abs(z.real() - w.real()) <= 1e-14 * (1.0 + std::abs(z.real()))) {
    const BoundaryPoint foot = BoundaryPoint::at(0.5 * (z.real() + w.real()));
    return z.imag() < w.imag() ? GeodesicLine{foot, BoundaryPoint::infinity()} : GeodesicLine{BoundaryPoint::infinity(), foot};
  }
  const double c = (std::norm(z) - std::norm(w)) / (2.0 * (z.real() - w.real()));
  const double r = std::abs(z - c);
  // z before w along the semicircle: moving from the left end to the right end when z.x < w.x
  return z.real() < w.real() ? GeodesicLine{BoundaryPoint::at(c - r), BoundaryPoint::at(c + r)}
                             : GeodesicLine{BoundaryPoint::at(c + r), BoundaryPoint::at(c - r)};
}

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Lower bound on the distance from the departure segment to the half-plane left of `edge` (frame coords).
double segment_region_distance(const GeodesicLine& edge, double ell) {
  const HalfPlane r{edge};
  const double top = std::exp(ell);
  if (r.contains(Point(0.0, 1.0)) || r.contains(Point(0.0, top))) return 0.0;
  double guess = 1.0;
  if (!edge.from.infinite && !edge.to.infinite) {
    const double uv = edge.from.x * edge.to.x;
    if (uv < 0) {
      const double yc = std::sqrt(-uv);
      if (yc >= 1.0 && yc <= top) return 0.0;
    }
    guess = std::clamp(std::sqrt(std::abs(uv)), 1.0, top);
  }
  double d = kInf;
  for (double y : {1.0, top, guess}) d = std::min(d, std::abs(signed_distance_to_line(Point(0.0, y), edge)));
  return d;
}

// In the cusp frame every target has its top point in the box [0, width] x [floor, height], and a
// region holding a target holds that point, so regions missing the box are dead.
bool region_meets_box(GeodesicLine edge, double height, double width, double floor) {
  // a vertex at the cusp comes out of the frame map as a huge finite endpoint
  const double huge = 1e8 * (1.0 + height + width);
  for (BoundaryPoint* e : {&edge.from, &edge.to})
    if (!e->infinite && std::abs(e->x) > huge) *e = BoundaryPoint::infinity();
  if (edge.from.infinite && edge.to.infinite) return false;
  if (edge.from.infinite || edge.to.infinite) {
    // oriented upwards the region on the left is x < u
    const double u = edge.from.infinite ? edge.to.x : edge.from.x;
    return edge.from.infinite ? u < width : u > 0.0;
  }
  const double u = edge.from.x, v = edge.to.x;
  const double m = 0.5 * (u + v), rho = 0.5 * std::abs(u - v);
  if (u < v) {
    // exterior of the disc: dead only when the disc swallows the box
    const double dx = std::max(std::abs(m), std::abs(width - m));
    return dx * dx + height * height >= rho * rho;
  }
  const double dx = m - std::clamp(m, 0.0, width);
  return dx * dx + floor * floor < rho * rho;
}

// Tiles spiral into every parabolic vertex. Targets stay outside the open standard horoballs, so a
// region beyond an edge ending at a horoball base is dead once the part of it sticking out of the
// horoball lies below `floor`, the lowest top point a target within the cutoff can have.
bool inside_horoball_below(const GeodesicLine& edge, const std::vector<Horocycle>& balls, double floor) {
  if (edge.from.infinite || edge.to.infinite) return false;
  const double u = edge.from.x, v = edge.to.x;
  // the region beyond u -> v is the disc only when u > v
  if (u < v) return false;
  const double rho = 0.5 * (u - v);
  for (const Horocycle& b : balls) {
    const double q = b.base.x, tol = 1e-9 * (1.0 + std::abs(q));
    if (std::abs(u - q) > tol && std::abs(v - q) > tol) continue;
    const double r = 0.5 * b.size;
    // the two circles meet at q and at height 2 rho^2 r / (r^2 + rho^2), past the top of the
    // semicircle only when rho < r
    if (rho < r && 2.0 * rho * rho * r / (r * r + rho * rho) < floor) return true;
  }
  return false;
}

struct Candidate {
  int to;
  GroupWord word;
  double foot;
  double measured;
  std::optional<GroupWord> lift_key = std::nullopt;  // shortest element of word <b_to>, filled lazily
};

// Shortest (then least) element of w <y>. |w y^n| falls while y^n cancels into w and then grows
// by at least one letter per further power, so each direction stops once it is past the minimum.
GroupWord right_coset_min(const GroupWord& w, const GroupWord& y) {
  GroupWord best = w;
  for (const GroupWord& step : {y, y.inverse()}) {
    GroupWord c = w;
    std::size_t prev = w.size();
    for (int n = 1; n <= static_cast<int>(2 * (w.size() + y.size())) + 2; ++n) {
      c = c * step;
      if (c.size() < best.size() || (c.size() == best.size() && c < best)) best = c;
      if (c.size() > prev && c.size() > best.size() + 2 * y.size()) break;
      prev = c.size();
    }
  }
  return best;
}

}  // namespace

double Orthogeodesic::measured_length() const {
  if (!from_cusp && !to_cusp) return length;
  if (from_cusp && !to_cusp) return trunc_len.value_or(kInf);
  if (from_cusp && to_cusp) return dbl_trunc_len.value_or(kInf);
  return kInf;
}

std::string Orthogeodesic::label() const {
  return std::to_string(from_boundary) + "->" + std::to_string(to_boundary) + ":" + coset_word.str();
}

GroupWord canonical_coset_word(const SurfaceModel& s, int from_b, const GroupWord& g, int to_b) {
  const GroupWord& bi = s.boundary_words.at(from_b);
  const GroupWord& bj = s.boundary_words.at(to_b);
  const int k = static_cast<int>(g.size() / std::max<std::size_t>(1, std::min(bi.size(), bj.size()))) + 2;
  auto scan = [&](bool left) {
    std::size_t best = static_cast<std::size_t>(-1);
    int lo = 0, hi = 0;
    for (int m = -k; m <= k; ++m) {
      const GroupWord w = left ? bi.power(m) * g : g * bj.power(m);
      if (w.size() < best) {
        best = w.size();
        lo = hi = m;
      } else if (w.size() == best) {
        hi = m;
      }
    }
    return std::pair<int, int>(lo - 1, hi + 1);
  };
  const auto [mlo, mhi] = scan(true);
  const auto [nlo, nhi] = scan(false);
  GroupWord best = g;
  for (int m = mlo; m <= mhi; ++m)
    for (int n = nlo; n <= nhi; ++n) {
      const GroupWord w = bi.power(m) * g * bj.power(n);
      if (w < best) best = w;
    }
  return best;
}

Orthogeodesic make_orthogeodesic(const SurfaceModel& s, int from_b, const GroupWord& g, int to_b) {
  const int nb = static_cast<int>(s.boundary_count());
  if (from_b < 0 || from_b >= nb || to_b < 0 || to_b >= nb) throw Error(ErrorKind::BadIndex, "boundary index out of range");
  const BoundaryFrame& f = s.frames[from_b];
  const Isometry t = f.to_frame;
  const Isometry tinv = t.inverse();
  const Isometry mg = t * s.evaluate(g);
  const bool to_cusp = s.boundary_specs[to_b].is_cusp();

  Orthogeodesic eta;
  eta.from_boundary = from_b;
  eta.to_boundary = to_b;
  eta.lift_word = g;
  eta.from_cusp = f.cusp;
  eta.to_cusp = to_cusp;

  // start and end points in the departure frame
  Point p, q;
  BoundaryPoint far_end;  // endpoint of the carrier line beyond q
  auto fail = [&](const char* why) { return Error(ErrorKind::UnknownArc, "no orthogeodesic " + std::to_string(from_b) + "->" + std::to_string(to_b) + " for word " + g.str() + ": " + why); };

  if (from_b == to_b) {
    const GroupWord& b = s.boundary_words[from_b];
    if (g * b == b * g) throw fail("word lies in the boundary subgroup");
  }
  Horocycle target_horo;
  GeodesicLine target_line;
  if (to_cusp) {
    target_horo = apply(mg, *s.cusp_horocycles[to_b]);
    if (target_horo.base.infinite) throw fail("target is the departure cusp");
  } else {
    target_line = apply(mg, axis(s.evaluate(s.boundary_words[to_b])));
    if (target_line.from.infinite || target_line.to.infinite) throw fail("target shares an endpoint with the departure lift");
  }

  if (!f.cusp) {
    if (to_cusp) {
      const double x0 = target_horo.base.x;
      if (x0 == 0.0) throw fail("asymptotic");
      const double r = std::abs(x0), dd = target_horo.size;
      p = Point(0.0, r);
      // |z| = r meets the horocycle of diameter dd at x0
      const double yq = 4.0 * r * r * dd / (dd * dd + 4.0 * r * r);
      q = Point((2.0 * r * r - dd * yq) / (2.0 * x0), yq);
      eta.length = kInf;
    } else {
      const double u = target_line.from.x, v = target_line.to.x;
      if (u * v <= 0.0) throw fail("target crosses the departure lift");
      eta.length = std::acosh(std::abs(u + v) / std::abs(v - u));
      const double uv = u * v, m = 0.5 * (u + v);
      p = Point(0.0, std::sqrt(uv));
      const double fx = uv / m;
      q = Point(fx, std::sqrt(std::max(uv - fx * fx, 0.0)));
    }
    eta.foot_from = wrap(std::log(p.imag()), f.period);
  } else {
    const double h = f.height;
    if (to_cusp) {
      const double x0 = target_horo.base.x, dd = target_horo.size;
      p = Point(x0, h);
      q = Point(x0, dd);
      far_end = BoundaryPoint::at(x0);
      if (to_b == from_b) {
        eta.dbl_trunc_len = std::log(h / dd);
        eta.trunc_len = kInf;
      }
    } else {
      const double u = target_line.from.x, v = target_line.to.x;
      const double m = 0.5 * (u + v), rho = 0.5 * std::abs(v - u);
      p = Point(m, h);
      q = Point(m, rho);
      far_end = BoundaryPoint::at(m);
      eta.trunc_len = std::log(h / rho);
    }
    eta.foot_from = wrap(p.real() / h, f.period);
  }
  if (p == q) throw fail("degenerate arc");

  const Point po = tinv.apply(p), qo = tinv.apply(q);
  if (!f.cusp) {
    eta.line = line_through(po, qo);
  } else {
    eta.line = {tinv.apply(BoundaryPoint::infinity()), tinv.apply(far_end)};
  }
  const Isometry n = standard_frame(eta.line);
  eta.s_begin = std::log(n.apply(po).imag());
  eta.s_end = std::log(n.apply(qo).imag());

  // arrival foot, measured on the arrival boundary's own chart
  const Point q_home = s.evaluate(g).inverse().apply(qo);
  eta.foot_to = wrap(s.boundary_position(to_b, q_home), s.frames[to_b].period);
  eta.coset_word = canonical_coset_word(s, from_b, g, to_b);
  return eta;
}

double truncated_length(const SurfaceModel&, const Orthogeodesic& eta) {
  if (!eta.from_cusp) throw Error(ErrorKind::NotCuspEnd, "truncated_length: departure end is not a cusp");
  return eta.trunc_len.value_or(kInf);
}

double doubly_truncated_length(const SurfaceModel&, const Orthogeodesic& eta) {
  if (!eta.from_cusp || !eta.to_cusp || eta.from_boundary != eta.to_boundary)
    throw Error(ErrorKind::NotCuspEnd, "doubly_truncated_length: both ends must be the same cusp");
  return *eta.dbl_trunc_len;
}

EnumerationResult enumerate_orthogeodesics(const SurfaceModel& s, int from_b, double cutoff, const EnumerationOptions& opt) {
  if (!(cutoff > 0.0)) throw Error(ErrorKind::InadmissibleParams, "cutoff must be positive");
  if (from_b < 0 || static_cast<std::size_t>(from_b) >= s.boundary_count()) throw Error(ErrorKind::BadIndex, "boundary index out of range");
  const BoundaryFrame& f = s.frames[from_b];
  const double period = f.period;
  EnumerationResult res;
  std::vector<Candidate> cands;

  auto wanted = [&](int j) { return !opt.to_boundary || *opt.to_boundary == j; };
  const GroupWord& bf = s.boundary_words[from_b];
  auto stabilizes_departure = [&](const GroupWord& w) { return w * bf == bf * w; };
  auto in_segment = [&](double pos) { return pos >= 0.0 && pos < period; };
  const double floor = f.cusp ? f.height * std::exp(-cutoff) : 0.0;

  struct Node {
    std::vector<Letter> word;
    Isometry m;
  };
  std::vector<Node> stack;
  stack.push_back({{}, f.to_frame});
  const int nl = 2 * s.rank;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (++res.nodes_visited > opt.max_nodes) {
      res.budget_hit = true;
      break;
    }
    const GroupWord g(std::span<const Letter>(node.word), s.rank);
    // targets at this tile
    for (const auto& lift : s.lifts_in_domain) {
      if (!wanted(lift.boundary)) continue;
      if (lift.boundary == from_b && stabilizes_departure(g * lift.word)) continue;
      const GeodesicLine tl = apply(node.m, lift.line);
      if (tl.from.infinite || tl.to.infinite) continue;
      const double u = tl.from.x, v = tl.to.x;
      if (!f.cusp) {
        if (u * v <= 0.0) continue;
        const double pos = 0.5 * std::log(u * v);
        if (!in_segment(pos)) continue;
        const double len = std::acosh(std::abs(u + v) / std::abs(v - u));
        if (len <= cutoff) cands.push_back({lift.boundary, g * lift.word, pos, len});
      } else {
        const double pos = 0.5 * (u + v) / f.height;
        if (!in_segment(pos)) continue;
        const double tr = std::log(f.height / (0.5 * std::abs(v - u)));
        if (tr <= cutoff) cands.push_back({lift.boundary, g * lift.word, pos, tr});
      }
    }
    if (f.cusp) {
      for (const auto& hb : s.horoballs_in_domain) {
        if (hb.boundary != from_b || !wanted(hb.boundary)) continue;
        if (stabilizes_departure(g * hb.word)) continue;
        const Horocycle th = apply(node.m, hb.horo);
        if (th.base.infinite) continue;
        const double pos = th.base.x / f.height;
        if (!in_segment(pos)) continue;
        const double dl = std::log(f.height / th.size);
        if (dl <= cutoff) cands.push_back({hb.boundary, g * hb.word, pos, dl});
      }
    }
    // children
    std::vector<Horocycle> balls;
    if (f.cusp)
      for (const auto& hb : s.horoballs_in_domain) {
        const Horocycle th = apply(node.m, hb.horo);
        if (!th.base.infinite) balls.push_back(th);
      }
    for (int x = nl - 1; x >= 0; --x) {
      const Letter lx = static_cast<Letter>(x);
      if (!node.word.empty() && node.word.back() == inverse_letter(lx)) continue;
      const GeodesicLine edge = apply(node.m, s.half_planes[x].edge);
      if (f.cusp ? !region_meets_box(edge, f.height, period * f.height, floor) : segment_region_distance(edge, period) > cutoff)
        continue;
      if (f.cusp && inside_horoball_below(edge, balls, floor)) continue;
      Node child{node.word, node.m * s.letter_matrix(lx)};
      child.word.push_back(lx);
      child.m.renormalize();
      stack.push_back(std::move(child));
    }
  }

  // the same lift can be reached from several tiles: near-equal feet are compared by the exact lift coset
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.to != b.to) return a.to < b.to;
    return a.foot < b.foot;
  });
  const double tol = 1e-9 * (1.0 + period);
  const double window = 1e-6 * (1.0 + period);
  auto key = [&](Candidate& c) -> const GroupWord& {
    if (!c.lift_key) c.lift_key = right_coset_min(c.word, s.boundary_words[c.to]);
    return *c.lift_key;
  };
  std::vector<Candidate> uniq;
  for (auto& c : cands) {
    bool dup = false;
    for (std::size_t k = uniq.size(); k-- > 0;) {
      if (uniq[k].to != c.to || c.foot - uniq[k].foot > window) break;
      if (key(uniq[k]) == key(c)) {
        dup = true;
        if (c.word.size() < uniq[k].word.size() || (c.word.size() == uniq[k].word.size() && c.word < uniq[k].word)) {
          c.lift_key = uniq[k].lift_key;
          uniq[k] = std::move(c);
        }
        break;
      }
    }
    if (!dup) uniq.push_back(std::move(c));
  }
  // wrap-around duplicates at the ends of the fundamental segment
  std::vector<bool> drop(uniq.size(), false);
  for (std::size_t lo = 0; lo < uniq.size();) {
    std::size_t hi = lo;
    while (hi < uniq.size() && uniq[hi].to == uniq[lo].to) ++hi;
    for (std::size_t a = lo; a < hi && uniq[a].foot - uniq[lo].foot < tol; ++a)
      for (std::size_t b = hi; b-- > a + 1 && period - (uniq[b].foot - uniq[a].foot) < tol;)
        if (std::abs(uniq[a].measured - uniq[b].measured) < 1e-9) drop[b] = true;
    lo = hi;
  }

  for (std::size_t k = 0; k < uniq.size(); ++k) {
    if (drop[k]) continue;
    res.arcs.push_back(make_orthogeodesic(s, from_b, uniq[k].word, uniq[k].to));
  }
  std::sort(res.arcs.begin(), res.arcs.end(), [](const Orthogeodesic& a, const Orthogeodesic& b) {
    const double la = a.measured_length(), lb = b.measured_length();
    if (la != lb) return la < lb;
    if (a.to_boundary != b.to_boundary) return a.to_boundary < b.to_boundary;
    return a.coset_word < b.coset_word;
  });
  res.cutoff_too_small = res.arcs.empty();
  return res;
}

std::pair<ConjClass, ConjClass> peripheral_classes(const SurfaceModel& s, const Orthogeodesic& eta) {
  if (eta.from_boundary != eta.to_boundary) throw Error(ErrorKind::DifferentBoundaries, "peripheral_classes: arc joins different boundaries");
  const int i = eta.from_boundary;
  const BoundaryFrame& f = s.frames[i];
  const Isometry n_inv = standard_frame(eta.line).inverse();
  const Point p = n_inv.apply(Point(0.0, std::exp(eta.s_begin)));
  const Point q = n_inv.apply(Point(0.0, std::exp(eta.s_end)));
  const double pp = s.boundary_position(i, p);
  const double pq = s.boundary_position(i, s.evaluate(eta.lift_word).inverse().apply(q));
  const double k = std::floor((pq - pp) / f.shift);
  const GroupWord& b = s.boundary_words[i];
  const ConjClass ck = conj_class(eta.lift_word * b.power(static_cast<int>(k)));
  const ConjClass ck1 = conj_class(eta.lift_word * b.power(static_cast<int>(k) + 1));
  // the copy of the departure point lying below the arrival point closes the loop on the increasing side
  return f.shift > 0 ? std::pair{ck, ck1} : std::pair{ck1, ck};
}

// ---------------------------------------------------------------- tracing

std::vector<TracePiece> trace_line(const SurfaceModel& s, const GeodesicLine& line, double s0, double s1, const TraceOptions& opt) {
  const Isometry n = standard_frame(line);
  const Isometry n_inv = n.inverse();
  const double eps = 1e-10;
  GroupWord h = s.locate(n_inv.apply(Point(0.0, std::exp(s0 + eps * (1.0 + std::abs(s0))))));
  Isometry e = n * s.evaluate(h);
  std::vector<TracePiece> out;
  double cur = s0;
  const int nl = 2 * s.rank;
  while (true) {
    if (out.size() >= opt.max_pieces) throw Error(ErrorKind::BudgetExceeded, "trace_line: piece budget exhausted");
    double best = kInf;
    int best_x = -1;
    for (int x = 0; x < nl; ++x) {
      const GeodesicLine edge = apply(e, s.half_planes[x].edge);
      if (edge.from.infinite || edge.to.infinite) continue;
      const double uv = edge.from.x * edge.to.x;
      if (!(uv < 0.0)) continue;
      const double sx = 0.5 * std::log(-uv);
      if (sx > cur + eps * (1.0 + std::abs(cur)) && sx < best) {
        best = sx;
        best_x = x;
      }
    }
    if (best_x < 0 || best >= s1) {
      out.push_back({h, e, cur, s1});
      break;
    }
    out.push_back({h, e, cur, best});
    const Letter lx = static_cast<Letter>(best_x);
    h = h * GroupWord({lx}, s.rank);
    e = e * s.letter_matrix(lx);
    e.renormalize();
    cur = best;
  }
  return out;
}

std::vector<SelfCrossing> find_self_crossings(const std::vector<TracePiece>& pieces, std::size_t* ambiguous, double period) {
  std::vector<SelfCrossing> out;
  std::size_t amb = 0;
  // crossings on a tile edge sit at a piece end; accept them from either side and dedupe below
  auto within = [](double t, const TracePiece& p) {
    const double tol = 1e-9 * (1.0 + std::abs(t));
    return t >= p.s0 - tol && t < p.s1 + tol;
  };
  std::vector<std::pair<double, double>> seen_amb;
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    for (std::size_t b = a + 1; b < pieces.size(); ++b) {
      const Isometry x = pieces[a].frame * pieces[b].frame.inverse();
      const BoundaryPoint u = x.apply(BoundaryPoint::at(0.0)), v = x.apply(BoundaryPoint::infinity());
      if (u.infinite || v.infinite) continue;
      const double uv = u.x * v.x;
      if (!(uv < 0.0)) continue;
      const double sa = 0.5 * std::log(-uv);
      if (!within(sa, pieces[a])) continue;
      const Isometry y = x.inverse();
      const BoundaryPoint u2 = y.apply(BoundaryPoint::at(0.0)), v2 = y.apply(BoundaryPoint::infinity());
      if (u2.infinite || v2.infinite) continue;
      const double uv2 = u2.x * v2.x;
      if (!(uv2 < 0.0)) continue;
      const double sb = 0.5 * std::log(-uv2);
      if (!within(sb, pieces[b])) continue;
      const double m = 0.5 * (u.x + v.x), r = 0.5 * std::abs(v.x - u.x);
      const double angle = std::acos(std::min(1.0, std::abs(m) / r));
      if (angle < 1e-7) {
        seen_amb.emplace_back(sa, sb);
        continue;
      }
      out.push_back({a, b, sa, sb, angle, pieces[b].tile * pieces[a].tile.inverse()});
    }
  }
  // one entry per point of the curve, parameters taken mod the period for closed curves
  auto key = [&](double sa, double sb) {
    if (period > 0.0) {
      sa = wrap(sa, period);
      sb = wrap(sb, period);
      if (sb < sa) std::swap(sa, sb);
    }
    return std::pair{sa, sb};
  };
  auto same = [&](std::pair<double, double> p, std::pair<double, double> q) {
    auto close = [&](double s, double t) {
      double d = std::abs(s - t);
      if (period > 0.0) d = std::min(d, period - d);
      return d < 1e-7 * (1.0 + std::abs(s));
    };
    return close(p.first, q.first) && close(p.second, q.second);
  };
  std::vector<SelfCrossing> uniq;
  for (auto& c : out) {
    const auto k = key(c.s_a, c.s_b);
    if (std::none_of(uniq.begin(), uniq.end(), [&](const SelfCrossing& d) { return same(key(d.s_a, d.s_b), k); })) uniq.push_back(std::move(c));
  }
  std::vector<std::pair<double, double>> amb_keys;
  for (const auto& [sa, sb] : seen_amb) {
    const auto k = key(sa, sb);
    if (std::none_of(amb_keys.begin(), amb_keys.end(), [&](const auto& q) { return same(q, k); })) amb_keys.push_back(k);
  }
  amb = amb_keys.size();
  if (ambiguous) *ambiguous = amb;
  return uniq;
}

bool SubloopSet::contains(const ConjClass& c) const { return std::binary_search(classes.begin(), classes.end(), c); }

void close_under_roots(std::vector<ConjClass>& classes) {
  const std::size_t n = classes.size();
  for (std::size_t i = 0; i < n; ++i)
    for (int l = 1; l < classes[i].power; ++l) classes.push_back(conj_class(classes[i].root.power(l)));
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
}

namespace {

void add_class(std::vector<ConjClass>& out, const GroupWord& w) {
  if (cyclic_reduce(w).empty()) return;
  out.push_back(conj_class(w));
}

}  // namespace

SubloopSet subloops(const SurfaceModel& s, const Orthogeodesic& eta, double cusp_extension) {
  SubloopSet res;
  const double s0 = eta.s_begin - (eta.from_cusp ? cusp_extension : 0.0);
  const double s1 = eta.s_end + (eta.to_cusp ? cusp_extension : 0.0);
  std::vector<TracePiece> pieces;
  try {
    pieces = trace_line(s, eta.line, s0, s1);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
    res.budget_hit = true;
    return res;
  }
  const auto crossings = find_self_crossings(pieces, &res.ambiguous);
  res.crossings = crossings.size();
  for (const auto& c : crossings) add_class(res.classes, c.loop);
  close_under_roots(res.classes);
  return res;
}

namespace {

struct ClosedTrace {
  std::vector<TracePiece> pieces;
  GroupWord root;
  double period = 0.0;
  bool parabolic = false;
};

ClosedTrace trace_closed(const SurfaceModel& s, const GroupWord& root) {
  ClosedTrace ct;
  ct.root = root;
  const Isometry g = s.evaluate(root);
  const IsometryClass cls = classify(g);
  if (cls == IsometryClass::Parabolic) {
    ct.parabolic = true;
    return ct;
  }
  if (cls != IsometryClass::Hyperbolic) throw Error(ErrorKind::NotHyperbolic, "closed curve " + root.str() + " is not hyperbolic");
  const double ell = translation_length(g);
  ct.period = ell;
  auto pieces = trace_line(s, axis(g), 0.0, ell);
  // glue the last partial piece to the first: the last tile is root * first tile
  if (pieces.size() >= 2 && pieces.back().tile == root * pieces.front().tile) {
    TracePiece merged = pieces.back();
    merged.s1 = ell + pieces.front().s1;
    pieces.front() = merged;
    pieces.pop_back();
  }
  ct.pieces = std::move(pieces);
  return ct;
}

}  // namespace

SubloopSet curve_subloops(const SurfaceModel& s, const ConjClass& c) {
  SubloopSet res;
  const int k = c.power;
  for (int l = 1; l < k; ++l) res.classes.push_back(conj_class(c.root.power(l)));
  ClosedTrace ct;
  try {
    ct = trace_closed(s, c.root);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
    res.budget_hit = true;
    return res;
  }
  const auto crossings = find_self_crossings(ct.pieces, &res.ambiguous, ct.period);
  res.crossings = crossings.size();
  for (const auto& x : crossings) {
    const GroupWord fwd = x.loop;  // tile_b tile_a^-1
    const GroupWord back = fwd.inverse();
    for (int d = 0; d <= k - 1; ++d) add_class(res.classes, c.root.power(d) * fwd);
    for (int d = 1; d <= k; ++d) add_class(res.classes, c.root.power(d) * back);
  }
  close_under_roots(res.classes);
  res.classes.erase(std::remove(res.classes.begin(), res.classes.end(), c), res.classes.end());
  return res;
}

std::size_t self_intersections(const SurfaceModel& s, const ConjClass& c) {
  const ClosedTrace ct = trace_closed(s, c.root);
  if (ct.parabolic) return 0;
  std::size_t amb = 0;
  const auto crossings = find_self_crossings(ct.pieces, &amb, ct.period);
  if (amb) throw Error(ErrorKind::AmbiguousCrossing, "near-tangent self-crossing on " + c.str());
  return crossings.size();
}

bool supports(const SubloopSet& loops, const Marking& m, const SurfaceModel& s) {
  return std::any_of(loops.classes.begin(), loops.classes.end(), [&](const ConjClass& c) { return m.contains(c, &s); });
}

bool supports(const SurfaceModel& s, const Orthogeodesic& eta, const Marking& m) {
  if (m.is_empty()) return false;
  return supports(subloops(s, eta), m, s);
}

bool is_peripheral_to(const SurfaceModel& s, const Orthogeodesic& eta, const ConjClass& alpha) {
  if (eta.from_boundary != eta.to_boundary) return false;
  const auto [c1, c2] = peripheral_classes(s, eta);
  return c1 == alpha || c2 == alpha;
}

}  // namespace orthospec
