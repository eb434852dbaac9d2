#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "orthospec/error.hpp"
#include "orthospec/identity.hpp"
#include "orthospec/raysim.hpp"

using namespace orthospec;

namespace {

struct Config {
  std::string surface;
  std::string marking = "empty";
  std::string boundary = "all";
  double cutoff = 10.0;
  std::string format = "table";
  std::string out;
  int threads = 0;
  std::uint64_t seed = McOptions{}.seed;
  std::size_t mc_samples = 10000;
  double mc_max_len = 30.0;
  double tol = 1e-7;
  std::string word;
  int to = -1;
  std::size_t top = 5;
};

int default_threads() {
  if (const char* env = std::getenv("ORTHOSPEC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// -1 selects every boundary
int parse_boundary(const std::string& b, const SurfaceModel& s) {
  if (b == "all") return -1;
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(b, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != b.size() || v < 0 || static_cast<std::size_t>(v) >= s.boundary_count())
    throw Error(ErrorKind::BadIndex, "boundary must be 'all' or an index below " + std::to_string(s.boundary_count()));
  return v;
}

void emit(const Config& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::InadmissibleParams, "cannot open " + c.out);
  f << text;
}

std::string fmt(double v) { return format_double(v); }

std::string report_table(const IdentityReport& r, const HalftraceCheck& ht, const std::vector<std::string>& viol) {
  std::ostringstream o;
  o << "surface      " << r.surface_id << "\n";
  o << "marking      " << r.marking_spec << "\n";
  o << "boundaries  ";
  for (int b : r.boundaries) o << ' ' << b;
  o << "\ncutoff       " << fmt(r.cutoff) << "\n";
  o << "arcs         " << r.arcs_enumerated << " (" << r.arcs_supportive << " supportive)\n";
  std::map<std::string, std::size_t> kinds;
  for (const auto& t : r.terms) ++kinds[to_string(t.kind)];
  o << "terms        " << r.terms.size();
  for (const auto& [k, n] : kinds) o << "  " << k << '=' << n;
  o << "\npartial sum  " << fmt(r.partial_sum) << "\n";
  o << "target       " << fmt(r.target) << "\n";
  o << "defect       " << fmt(r.defect) << "\n";
  o << "max overlap  " << fmt(r.max_overlap) << "\n";
  if (ht.terms_checked) {
    o << "half-trace   normalization " << ht.normalization << ", term residual " << fmt(ht.max_term_residual)
      << ", product residual " << fmt(ht.aggregate_residual) << "\n";
  }
  if (r.flags.parabolic_alpha_skipped) o << "skipped      " << r.flags.parabolic_alpha_skipped << " parabolic alpha\n";
  if (r.flags.ambiguous_arcs_skipped) o << "skipped      " << r.flags.ambiguous_arcs_skipped << " ambiguous arcs\n";
  o << "status       " << (viol.empty() ? "ok" : "VIOLATION") << "\n";
  for (const auto& v : viol) o << "  " << v << "\n";
  return o.str();
}

int cmd_verify(const Config& c) {
  const SurfaceModel s = build_surface(c.surface);
  const Marking m = parse_marking(c.marking, s);
  const int b = parse_boundary(c.boundary, s);
  IdentityOptions opt;
  opt.threads = c.threads;
  const IdentityReport r = b < 0 ? verify_surface(s, m, c.cutoff, opt) : verify_boundary(s, b, m, c.cutoff, opt);
  const HalftraceCheck ht = halftrace_product_check(s, r);
  const auto viol = r.violations(c.tol);
  if (c.format == "csv")
    emit(c, report_csv(r));
  else if (c.format == "json")
    emit(c, report_json(r, ht, c.tol));
  else
    emit(c, report_table(r, ht, viol));
  for (const auto& v : viol) std::cerr << "violation: " << v << "\n";
  return viol.empty() ? 0 : 2;
}

int cmd_gaps(const Config& c) {
  const SurfaceModel s = build_surface(c.surface);
  const Marking m = parse_marking(c.marking, s);
  const int from = parse_boundary(c.boundary == "all" ? "0" : c.boundary, s);
  const int to = c.to < 0 ? from : c.to;
  if (static_cast<std::size_t>(to) >= s.boundary_count()) throw Error(ErrorKind::BadIndex, "--to out of range");
  const Orthogeodesic eta = make_orthogeodesic(s, from, s.word(c.word), to);
  const ArcInspection a = inspect_arc(s, eta, m);
  std::ostringstream o;
  o << "arc          " << eta.label() << "\n";
  o << "lift word    " << eta.lift_word.str() << "\n";
  o << "length       " << fmt(eta.length) << "\n";
  if (eta.trunc_len) o << "eta_o        " << fmt(*eta.trunc_len) << "\n";
  if (eta.dbl_trunc_len) o << "eta_dbl      " << fmt(*eta.dbl_trunc_len) << "\n";
  o << "feet         " << fmt(eta.foot_from) << " -> " << fmt(eta.foot_to) << "\n";
  if (a.peripheral) {
    for (int side = 0; side < 2; ++side) {
      const ConjClass& p = side == 0 ? a.peripheral->first : a.peripheral->second;
      const Isometry g = s.evaluate(p.rep);
      o << (side == 0 ? "boundary+    " : "boundary-    ") << p.str();
      if (classify(g) == IsometryClass::Hyperbolic)
        o << "  length " << fmt(translation_length(g));
      else
        o << "  parabolic";
      o << (m.contains(p, &s) ? "  marked" : "") << "\n";
    }
  }
  o << "subloops     ";
  if (a.loops.classes.empty()) o << "none";
  for (const auto& l : a.loops.classes) o << l.str() << (m.contains(l, &s) ? "*" : "") << ' ';
  o << "\n";
  o << "crossings    " << a.loops.crossings << (a.loops.ambiguous ? " (ambiguous present)" : "") << "\n";
  o << "supportive   " << (a.supportive ? "yes" : "no") << "\n";
  for (const auto& t : a.terms) {
    o << "term         " << to_string(t.kind);
    if (t.alpha) o << " alpha=" << t.alpha->str();
    o << " value " << fmt(t.value) << " on [" << fmt(t.lo) << ", " << fmt(t.hi) << "]\n";
  }
  emit(c, o.str());
  return 0;
}

int cmd_mc(const Config& c) {
  if (c.mc_samples == 0) throw Error(ErrorKind::InadmissibleParams, "--mc-samples must be positive");
  const SurfaceModel s = build_surface(c.surface);
  const Marking m = parse_marking(c.marking, s);
  const int b = parse_boundary(c.boundary == "all" ? "0" : c.boundary, s);
  IdentityOptions iopt;
  iopt.threads = c.threads;
  const IdentityReport r = verify_boundary(s, b, m, c.cutoff, iopt);
  McOptions opt;
  opt.max_len = c.mc_max_len;
  opt.seed = c.seed;
  opt.threads = c.threads;
  const auto samples = sample_orthorays(s, b, m, c.mc_samples, opt);
  const double period = s.frames[b].period;

  // arcs ranked by their whole gap, i.e. the sum of their terms
  std::map<std::string, std::pair<double, const Orthogeodesic*>> arcs;
  for (const auto& t : r.terms) {
    auto& e = arcs[t.eta.label()];
    e.first += t.value;
    e.second = &t.eta;
  }
  std::vector<std::pair<double, std::string>> rank;
  for (const auto& [k, v] : arcs) rank.emplace_back(-v.first, k);
  std::sort(rank.begin(), rank.end());

  std::size_t hit = 0, looped = 0, budget = 0, amb = 0;
  for (const auto& x : samples) {
    if (x.ambiguous) ++amb;
    else if (x.outcome.kind == RayOutcome::Kind::HitBoundary) ++hit;
    else if (x.outcome.kind == RayOutcome::Kind::Looped) ++looped;
    else ++budget;
  }
  const bool csv = c.format == "csv";
  std::ostringstream o;
  if (csv)
    o << "level,signature,analytic,estimate,stderr,z\n";
  else
    o << "samples " << samples.size() << " seed " << c.seed << " max_len " << fmt(c.mc_max_len) << "  hit " << hit
      << " looped " << looped << " wandering " << budget << " ambiguous " << amb << "\n";
  auto row = [&](const char* level, const std::string& sig, double an, const GapEstimate& g) {
    const double z = (g.estimate - an) / g.stderr_;
    if (csv) {
      o << level << ',' << sig << ',' << fmt(an) << ',' << fmt(g.estimate) << ',' << fmt(g.stderr_) << ',' << fmt(z) << "\n";
    } else {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-6s %-32s analytic %.6f  mc %.6f  se %.6f  z %+.2f\n", level, sig.c_str(), an,
                    g.estimate, g.stderr_, z);
      o << buf;
    }
    return z;
  };
  bool bad = false;
  for (std::size_t k = 0; k < std::min(c.top, rank.size()); ++k) {
    const auto& [value, eta] = arcs[rank[k].second];
    const double z = row("arc", rank[k].second, value, arc_gap_measure_from(samples, period, *eta));
    if (std::abs(z) > 4.0) bad = true;
    // per-term split, informational
    std::map<std::string, double> per;
    for (const auto& t : r.terms)
      if (t.eta.label() == rank[k].second) per[term_signature(t)] += t.value;
    if (per.size() > 1)
      for (const auto& [sig, v] : per) {
        GapTerm probe;
        for (const auto& t : r.terms)
          if (term_signature(t) == sig) probe = t;
        row("term", sig, v, gap_measure_from(samples, period, probe));
      }
  }
  emit(c, o.str());
  return bad ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthospectrum identities on hyperbolic surfaces"};
  app.require_subcommand(1);
  Config c;
  c.threads = default_threads();

  auto common = [&](CLI::App* sub) {
    sub->add_option("--surface", c.surface, "pants:l1,l2,l3 | torus1:L,T | modular (0 or cusp for a cusp)")->required();
    sub->add_option("--marking", c.marking, "empty | simple:maxlen=R | curve:<word>[,oriented] | orbit:<word>:depth=n,maxlen=R | file:<path>");
    sub->add_option("--boundary", c.boundary, "boundary index or 'all'");
    sub->add_option("--cutoff", c.cutoff, "length cutoff")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json", "table"}));
    sub->add_option("--out", c.out, "write the report here instead of stdout");
    sub->add_option("--threads", c.threads, "worker threads (default ORTHOSPEC_THREADS or all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--tol", c.tol, "report tolerance for negative defects")->check(CLI::NonNegativeNumber);
  };
  CLI::App* verify = app.add_subcommand("verify", "partial sums of the identity with invariant checks");
  common(verify);
  CLI::App* gaps = app.add_subcommand("gaps", "inspect a single arc");
  common(gaps);
  gaps->add_option("word", c.word, "lift word of the arc")->required();
  gaps->add_option("--to", c.to, "arrival boundary (default: the departure boundary)");
  CLI::App* mc = app.add_subcommand("mc", "Monte-Carlo orthorays against analytic gaps");
  common(mc);
  mc->add_option("--seed", c.seed, "64-bit sampling seed");
  mc->add_option("--mc-samples", c.mc_samples, "number of strata (one draw each)");
  mc->add_option("--mc-max-len", c.mc_max_len, "ray length budget")->check(CLI::PositiveNumber);
  mc->add_option("--top", c.top, "number of largest arcs compared");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    if (*verify) return cmd_verify(c);
    if (*gaps) return cmd_gaps(c);
    if (*mc) return cmd_mc(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
