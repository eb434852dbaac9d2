#include "orthospec/raysim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "orthospec/error.hpp"

namespace orthospec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAngleTol = 1e-7;

struct Piece {
  GroupWord tile;
  Isometry frame;
  double s0, s1;
};

struct Crossing {
  double s_b;
  GroupWord loop;
};

// Crossing of the ray with itself between an earlier piece a and a later piece b.
std::optional<Crossing> cross(const Piece& a, const Piece& b) {
  const Isometry x = a.frame * b.frame.inverse();
  const BoundaryPoint u = x.apply(BoundaryPoint::at(0.0)), v = x.apply(BoundaryPoint::infinity());
  if (u.infinite || v.infinite || !(u.x * v.x < 0.0)) return std::nullopt;
  const double sa = 0.5 * std::log(-u.x * v.x);
  const double tol_a = 1e-9 * (1.0 + std::abs(sa));
  if (sa < a.s0 - tol_a || sa >= a.s1 + tol_a) return std::nullopt;
  const Isometry y = x.inverse();
  const BoundaryPoint u2 = y.apply(BoundaryPoint::at(0.0)), v2 = y.apply(BoundaryPoint::infinity());
  if (u2.infinite || v2.infinite || !(u2.x * v2.x < 0.0)) return std::nullopt;
  const double sb = 0.5 * std::log(-u2.x * v2.x);
  const double tol_b = 1e-9 * (1.0 + std::abs(sb));
  if (sb < b.s0 - tol_b || sb >= b.s1 + tol_b) return std::nullopt;
  const double m = 0.5 * (u.x + v.x), r = 0.5 * std::abs(v.x - u.x);
  if (std::acos(std::min(1.0, std::abs(m) / r)) < kAngleTol)
    throw Error(ErrorKind::AmbiguousCrossing, "near-tangent self-crossing of an orthoray");
  return Crossing{sb, b.tile * a.tile.inverse()};
}

// First point past `after` where the ray (imaginary axis of `e`) enters a boundary lift seen from tile h.
struct Hit {
  double s = kInf;
  int boundary = -1;
  GroupWord word;
};

Hit first_hit(const SurfaceModel& s, const Isometry& e, const GroupWord& h, double lo, double hi, double after) {
  Hit best;
  const double tol = 1e-9 * (1.0 + std::abs(lo));
  auto offer = [&](double t, int j, const GroupWord& w) {
    if (t <= after || t < lo - tol || t > hi + tol || t >= best.s) return;
    best = {t, j, h * w};
  };
  for (const auto& lift : s.lifts_in_domain) {
    const GeodesicLine l = apply(e, lift.line);
    if (l.from.infinite || l.to.infinite || !(l.from.x * l.to.x < 0.0)) continue;
    offer(0.5 * std::log(-l.from.x * l.to.x), lift.boundary, lift.word);
  }
  for (const auto& hb : s.horoballs_in_domain) {
    const Horocycle c = apply(e, hb.horo);
    if (c.base.infinite) {
      offer(std::log(c.size), hb.boundary, hb.word);
      continue;
    }
    const double d = c.size, x0 = c.base.x;
    if (4.0 * x0 * x0 >= d * d) continue;
    offer(std::log(0.5 * (d - std::sqrt(d * d - 4.0 * x0 * x0))), hb.boundary, hb.word);
  }
  return best;
}

// Earliest-closing self-crossing of the arc whose loop class is marked.
std::optional<std::pair<GroupWord, ConjClass>> first_marked_loop(const SurfaceModel& s, const Orthogeodesic& eta,
                                                                 const Marking& m, std::size_t* crossings) {
  const double s0 = eta.s_begin - (eta.from_cusp ? 4.0 : 0.0);
  const double s1 = eta.s_end + (eta.to_cusp ? 4.0 : 0.0);
  const auto pieces = trace_line(s, eta.line, s0, s1);
  std::size_t amb = 0;
  auto xs = find_self_crossings(pieces, &amb);
  if (amb) throw Error(ErrorKind::AmbiguousCrossing, "near-tangent self-crossing on " + eta.label());
  if (crossings) *crossings = xs.size();
  std::sort(xs.begin(), xs.end(), [](const SelfCrossing& a, const SelfCrossing& b) { return a.s_b < b.s_b; });
  for (const auto& x : xs) {
    if (cyclic_reduce(x.loop).empty()) continue;
    ConjClass c = conj_class(x.loop);
    if (m.contains(c, &s)) return std::pair{x.loop, std::move(c)};
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(RayOutcome::Kind k) {
  switch (k) {
    case RayOutcome::Kind::HitBoundary: return "hit";
    case RayOutcome::Kind::Looped: return "looped";
    case RayOutcome::Kind::Budget: return "budget";
  }
  return "?";
}

std::string RayOutcome::signature() const {
  if (!eta) return {};
  std::string k = eta->label();
  if (kind == Kind::Looped && alpha) k += "|" + alpha->str();
  return k;
}

std::string term_signature(const GapTerm& t) {
  std::string k = t.eta.label();
  if (t.alpha) k += "|" + t.alpha->str();
  return k;
}

RayOutcome shoot(const SurfaceModel& s, int i, double p, const Marking& m, double max_len) {
  if (i < 0 || static_cast<std::size_t>(i) >= s.boundary_count()) throw Error(ErrorKind::BadIndex, "boundary index out of range");
  if (!(max_len > 0.0)) throw Error(ErrorKind::InadmissibleParams, "max_len must be positive");
  const BoundaryFrame& f = s.frames[i];
  if (!(p >= 0.0 && p < f.period)) throw Error(ErrorKind::InadmissibleParams, "position outside [0, period)");
  const Isometry tinv = f.to_frame.inverse();

  // the ray in the departure frame, then in the model
  GeodesicLine ray;
  Point start;
  if (f.cusp) {
    const double x = p * f.height;
    ray = {BoundaryPoint::infinity(), BoundaryPoint::at(x)};
    start = Point(x, f.height);
  } else {
    const double r = std::exp(p);
    ray = {BoundaryPoint::at(-f.inward * r), BoundaryPoint::at(f.inward * r)};
    start = Point(0.0, r);
  }
  ray = apply(tinv, ray);
  const Isometry n = standard_frame(ray);
  const double s_start = std::log(n.apply(tinv.apply(start)).imag());
  const double s_stop = s_start + max_len;

  RayOutcome out;
  out.position = p;
  const bool watch_loops = !m.is_empty();
  const double eps = 1e-10;
  GroupWord h = s.locate(n.inverse().apply(Point(0.0, std::exp(s_start + eps * (1.0 + std::abs(s_start))))));
  Isometry e = n * s.evaluate(h);
  std::vector<Piece> pieces;
  double cur = s_start;
  const int nl = 2 * s.rank;
  while (true) {
    double next = kInf;
    int next_x = -1;
    for (int x = 0; x < nl; ++x) {
      const GeodesicLine edge = apply(e, s.half_planes[x].edge);
      if (edge.from.infinite || edge.to.infinite || !(edge.from.x * edge.to.x < 0.0)) continue;
      const double sx = 0.5 * std::log(-edge.from.x * edge.to.x);
      if (sx > cur + eps * (1.0 + std::abs(cur)) && sx < next) {
        next = sx;
        next_x = x;
      }
    }
    const double end = std::min(next, s_stop);
    pieces.push_back({h, e, cur, end});
    const Piece& pc = pieces.back();
    const Hit hit = first_hit(s, e, h, cur, end, s_start + 1e-9 * (1.0 + std::abs(s_start)));

    std::optional<Crossing> loop;
    if (watch_loops) {
      for (std::size_t a = 0; a + 1 < pieces.size(); ++a) {
        auto c = cross(pieces[a], pc);
        if (!c || c->s_b >= hit.s || (loop && c->s_b >= loop->s_b)) continue;
        if (cyclic_reduce(c->loop).empty() || !m.contains(conj_class(c->loop), &s)) continue;
        loop = std::move(c);
      }
    }
    if (loop) {
      out.kind = RayOutcome::Kind::Looped;
      out.path_length = loop->s_b - s_start;
      out.crossing_word = h;
      out.alpha = conj_class(loop->loop);
      // the loop followed by the way back gives the arc to loop * (departure lift)
      try {
        Orthogeodesic eta = make_orthogeodesic(s, i, loop->loop, i);
        std::size_t xs = 0;
        auto nxt = first_marked_loop(s, eta, m, &xs);
        const std::size_t cap = 2 * xs + 2;
        while (nxt && out.reductions < cap) {
          eta = make_orthogeodesic(s, i, nxt->first, i);
          out.alpha = nxt->second;
          ++out.reductions;
          nxt = first_marked_loop(s, eta, m, nullptr);
        }
        out.reduction_cap_hit = nxt.has_value();
        out.eta = std::move(eta);
      } catch (const Error& err) {
        // a loop around the departure boundary itself has no arc
        if (err.kind() != ErrorKind::UnknownArc) throw;
      }
      return out;
    }
    if (hit.boundary >= 0) {
      out.kind = RayOutcome::Kind::HitBoundary;
      out.path_length = hit.s - s_start;
      out.crossing_word = h;
      out.hit_boundary = hit.boundary;
      try {
        out.eta = make_orthogeodesic(s, i, hit.word, hit.boundary);
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::UnknownArc) throw;
      }
      return out;
    }
    if (next >= s_stop) {
      out.kind = RayOutcome::Kind::Budget;
      out.path_length = max_len;
      out.crossing_word = h;
      return out;
    }
    const Letter lx = static_cast<Letter>(next_x);
    h = h * GroupWord({lx}, s.rank);
    e = e * s.letter_matrix(lx);
    e.renormalize();
    cur = next;
  }
}

std::vector<McSample> sample_orthorays(const SurfaceModel& s, int i, const Marking& m, std::size_t n, const McOptions& opt) {
  if (n == 0) throw Error(ErrorKind::InadmissibleParams, "sample count must be positive");
  if (i < 0 || static_cast<std::size_t>(i) >= s.boundary_count()) throw Error(ErrorKind::BadIndex, "boundary index out of range");
  const double period = s.frames[i].period;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<McSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = unif(rng);
    out[k].position = std::min((static_cast<double>(k) + u) / static_cast<double>(n) * period, std::nextafter(period, 0.0));
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        out[k].outcome = shoot(s, i, out[k].position, m, opt.max_len);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::AmbiguousCrossing) {
          out[k].ambiguous = true;
          out[k].outcome.position = out[k].position;
          continue;
        }
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
        return;
      }
    }
  };
  const int nt = std::max(1, std::min<int>(opt.threads, static_cast<int>(n)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

template <typename Pred>
GapEstimate count_matching(const std::vector<McSample>& samples, double period, Pred match) {
  GapEstimate g;
  g.samples = samples.size();
  if (samples.empty()) return g;
  for (const auto& x : samples)
    if (!x.ambiguous && match(x.outcome)) ++g.hits;
  const double n = static_cast<double>(g.samples);
  const double frac = static_cast<double>(g.hits) / n;
  g.estimate = period * frac;
  // binomial model; with no hits the variance is floored at one hit
  const double fv = std::max(frac, 1.0 / n);
  g.stderr_ = period * std::sqrt(fv * (1.0 - std::min(fv, 1.0)) / n);
  return g;
}

}  // namespace

GapEstimate gap_measure_from(const std::vector<McSample>& samples, double period, const GapTerm& term) {
  const std::string key = term_signature(term);
  return count_matching(samples, period, [&](const RayOutcome& o) { return o.signature() == key; });
}

GapEstimate arc_gap_measure_from(const std::vector<McSample>& samples, double period, const Orthogeodesic& eta) {
  const std::string key = eta.label();
  return count_matching(samples, period, [&](const RayOutcome& o) { return o.eta && o.eta->label() == key; });
}

GapEstimate estimate_gap_measure(const SurfaceModel& s, int i, const Marking& m, const GapTerm& term, std::size_t n,
                                 const McOptions& opt) {
  if (n < 100) throw Error(ErrorKind::InadmissibleParams, "at least 100 samples are needed");
  return gap_measure_from(sample_orthorays(s, i, m, n, opt), s.frames[i].period, term);
}

double wandering_mass(const SurfaceModel& s, int i, const Marking& m, std::size_t n, double max_len, std::uint64_t seed,
                      int threads) {
  McOptions opt;
  opt.max_len = max_len;
  opt.seed = seed;
  opt.threads = threads;
  const auto xs = sample_orthorays(s, i, m, n, opt);
  std::size_t b = 0;
  for (const auto& x : xs) b += x.outcome.kind == RayOutcome::Kind::Budget;
  return static_cast<double>(b) / static_cast<double>(n);
}

}  // namespace orthospec
