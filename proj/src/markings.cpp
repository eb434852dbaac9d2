#include "orthospec/markings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <set>

#include "orthospec/error.hpp"
#include "orthospec/ortho.hpp"

namespace orthospec {

struct Marking::Cache {
  std::mutex mu;
  std::map<ConjClass, bool> simple;
};

Marking::Marking() : cache_(std::make_shared<Cache>()) {}

Marking Marking::empty() { return Marking(); }

namespace {

void sort_unique(std::vector<ConjClass>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double class_len_or_inf(const SurfaceModel& s, const ConjClass& c) {
  try {
    return s.class_length(c.rep);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Marking Marking::explicit_list(std::vector<ConjClass> classes, Orientation o) {
  Marking m;
  m.rule_ = Rule::Explicit;
  m.orientation_ = o;
  sort_unique(classes);
  m.members_ = std::move(classes);
  m.spec_ = "explicit:";
  for (std::size_t i = 0; i < m.members_.size(); ++i) m.spec_ += (i ? "," : "") + m.members_[i].str();
  return m;
}

Marking Marking::all_simple_primitive(double max_len) {
  Marking m;
  m.rule_ = Rule::AllSimplePrimitive;
  m.orientation_ = Orientation::Both;
  m.max_len_ = max_len;
  m.spec_ = "simple:maxlen=" + fmt(max_len);
  return m;
}

Marking Marking::single_curve(const ConjClass& c, Orientation o) {
  Marking m;
  m.rule_ = Rule::SingleCurve;
  m.orientation_ = o;
  m.members_ = {c};
  m.spec_ = "curve:" + c.str() + (o == Orientation::AsGiven ? ",oriented" : "");
  return m;
}

namespace {

// Letter substitution by an automorphism given on generators.
GroupWord substitute(const GroupWord& w, const std::vector<GroupWord>& images) {
  GroupWord out(std::span<const Letter>(), w.rank());
  for (Letter x : w.letters()) {
    const GroupWord& img = images[x / 2];
    out = out * ((x & 1u) ? img.inverse() : img);
  }
  return out;
}

}  // namespace

Marking Marking::orbit(const SurfaceModel& s, const ConjClass& seed, int depth, double max_len) {
  Marking m;
  m.rule_ = Rule::McgOrbitApprox;
  m.orientation_ = Orientation::Both;
  m.max_len_ = max_len;
  m.spec_ = "orbit:" + seed.str() + ":depth=" + std::to_string(depth) + ",maxlen=" + fmt(max_len);
  std::set<ConjClass> seen{seed};
  if (s.boundary_count() == 1 && s.rank == 2) {
    const GroupWord a = s.word("a"), b = s.word("b");
    // twists along a and b and their inverses
    const std::vector<std::vector<GroupWord>> autos = {
        {a, b * a}, {a, b * a.inverse()}, {a * b, b}, {a * b.inverse(), b}};
    std::vector<ConjClass> layer{seed};
    for (int d = 0; d < depth; ++d) {
      std::vector<ConjClass> next;
      for (const auto& c : layer)
        for (const auto& img : autos) {
          const ConjClass t = conj_class(substitute(c.rep, img));
          if (seen.insert(t).second) next.push_back(t);
        }
      layer = std::move(next);
    }
  }
  for (const auto& c : seen)
    if (class_len_or_inf(s, c) <= max_len) m.members_.push_back(c);
  sort_unique(m.members_);
  return m;
}

bool Marking::contains(const ConjClass& c, const SurfaceModel* s) const {
  switch (rule_) {
    case Rule::Empty: return false;
    case Rule::Explicit:
    case Rule::SingleCurve:
    case Rule::McgOrbitApprox: {
      if (std::binary_search(members_.begin(), members_.end(), c)) return true;
      return orientation_ == Orientation::Both && std::binary_search(members_.begin(), members_.end(), inverse_class(c));
    }
    case Rule::AllSimplePrimitive: {
      if (!s) throw Error(ErrorKind::NeedsSurface, "simple-curve membership needs a surface");
      if (!is_primitive(c)) return false;
      if (class_len_or_inf(*s, c) > max_len_) return false;
      {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->simple.find(c);
        if (it != cache_->simple.end()) return it->second;
      }
      const bool simple = self_intersections(*s, c) == 0;
      std::lock_guard<std::mutex> lock(cache_->mu);
      cache_->simple[c] = simple;
      return simple;
    }
  }
  return false;
}

std::vector<ConjClass> simple_classes(const SurfaceModel& s, double horizon) {
  std::vector<ConjClass> out;
  auto add = [&](const GroupWord& w) {
    const ConjClass c = conj_class(w);
    out.push_back(c);
    out.push_back(inverse_class(c));
  };
  for (const auto& b : s.boundary_words)
    if (s.class_length(b) <= horizon) add(b);
  if (s.boundary_count() == 1 && s.rank == 2) {
    auto tr = [&](const GroupWord& w) { return std::abs(s.evaluate(w).trace()); };
    const double tr_max = 2.0 * std::cosh(horizon / 2.0);
    // Farey recursion over bases; traces grow once the mediant dominates both parents
    std::function<void(const GroupWord&, const GroupWord&, int)> visit = [&](const GroupWord& u, const GroupWord& v, int depth) {
      const GroupWord w = u * v;
      const double t = tr(w);
      if (t > tr_max && t >= std::max(tr(u), tr(v))) return;
      if (depth > 200) return;
      if (t <= tr_max) add(w);
      visit(u, w, depth + 1);
      visit(w, v, depth + 1);
    };
    const GroupWord a = s.word("a"), b = s.word("b");
    for (const auto& g : {a, b})
      if (tr(g) <= tr_max) add(g);
    visit(a, b, 0);
    visit(a, b.inverse(), 0);
  }
  sort_unique(out);
  // geometric cross-check
  out.erase(std::remove_if(out.begin(), out.end(), [&](const ConjClass& c) { return self_intersections(s, c) != 0; }), out.end());
  return out;
}

std::vector<ConjClass> Marking::materialize(const SurfaceModel& s, double horizon) const {
  if (rule_ == Rule::Empty) return {};
  if (rule_ == Rule::AllSimplePrimitive) return simple_classes(s, std::min(horizon, max_len_));
  std::vector<ConjClass> out;
  for (const auto& c : members_) {
    if (class_len_or_inf(s, c) > horizon) continue;
    out.push_back(c);
    if (orientation_ == Orientation::Both) out.push_back(inverse_class(c));
  }
  sort_unique(out);
  return out;
}

namespace {

double parse_number(std::string_view tok, std::string_view what) {
  double v = 0.0;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw Error(ErrorKind::Parse, "bad " + std::string(what) + " '" + std::string(tok) + "' in marking spec");
  return v;
}

std::string_view key_value(std::string_view item, std::string_view key) {
  if (item.substr(0, key.size() + 1) != std::string(key) + "=")
    throw Error(ErrorKind::Parse, "expected " + std::string(key) + "=<value> in marking spec, got '" + std::string(item) + "'");
  return item.substr(key.size() + 1);
}

}  // namespace

Marking parse_marking(std::string_view spec, const SurfaceModel& s) {
  if (spec == "empty") return Marking::empty();
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorKind::Parse, "unknown marking spec '" + std::string(spec) + "'");
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "simple") return Marking::all_simple_primitive(parse_number(key_value(rest, "maxlen"), "maxlen"));
  if (kind == "curve") {
    const std::size_t comma = rest.find(',');
    const std::string_view word = rest.substr(0, comma);
    Marking::Orientation o = Marking::Orientation::Both;
    if (comma != std::string_view::npos) {
      if (rest.substr(comma + 1) != "oriented") throw Error(ErrorKind::Parse, "curve marking accepts only the 'oriented' flag");
      o = Marking::Orientation::AsGiven;
    }
    return Marking::single_curve(conj_class(GroupWord::parse(word, s.rank)), o);
  }
  if (kind == "orbit") {
    const std::size_t c2 = rest.find(':');
    if (c2 == std::string_view::npos) throw Error(ErrorKind::Parse, "orbit marking needs :depth=<n>,maxlen=<R>");
    const std::string_view word = rest.substr(0, c2);
    const std::string_view opts = rest.substr(c2 + 1);
    const std::size_t comma = opts.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorKind::Parse, "orbit marking needs depth and maxlen");
    const double depth = parse_number(key_value(opts.substr(0, comma), "depth"), "depth");
    const double maxlen = parse_number(key_value(opts.substr(comma + 1), "maxlen"), "maxlen");
    if (depth < 0 || depth != std::floor(depth)) throw Error(ErrorKind::Parse, "orbit depth must be a nonnegative integer");
    return Marking::orbit(s, conj_class(GroupWord::parse(word, s.rank)), static_cast<int>(depth), maxlen);
  }
  if (kind == "file") {
    std::ifstream in{std::string(rest)};
    if (!in) throw Error(ErrorKind::Parse, "cannot open marking file '" + std::string(rest) + "'");
    std::vector<ConjClass> classes;
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      classes.push_back(conj_class(GroupWord::parse(line, s.rank)));
    }
    return Marking::explicit_list(std::move(classes));
  }
  throw Error(ErrorKind::Parse, "unknown marking kind '" + std::string(kind) + "'");
}

CoherenceReport is_coherent(const Marking& m, const SurfaceModel& s, double horizon) {
  CoherenceReport rep;
  const auto members = m.materialize(s, horizon);
  rep.members_checked = members.size();
  for (const auto& alpha : members) {
    const SubloopSet loops = curve_subloops(s, alpha);
    if (loops.budget_hit || loops.ambiguous) rep.budget_hit = true;
    for (const auto& gamma : members)
      if (!(gamma == alpha) && loops.contains(gamma)) rep.violations.push_back({alpha, gamma});
  }
  return rep;
}

Marking filter_coherent(const std::vector<ConjClass>& classes, const SurfaceModel& s, double horizon) {
  std::vector<ConjClass> kept;
  std::vector<SubloopSet> kept_loops;
  for (const auto& c : classes) {
    if (class_len_or_inf(s, c) > horizon) continue;
    if (std::find(kept.begin(), kept.end(), c) != kept.end()) continue;
    SubloopSet loops = curve_subloops(s, c);
    bool clash = false;
    for (std::size_t k = 0; k < kept.size() && !clash; ++k) clash = loops.contains(kept[k]) || kept_loops[k].contains(c);
    if (clash) continue;
    kept.push_back(c);
    kept_loops.push_back(std::move(loops));
  }
  if (kept.empty()) return Marking::empty();
  return Marking::explicit_list(std::move(kept));
}

}  // namespace orthospec
