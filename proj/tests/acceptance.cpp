#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orthospec/error.hpp"
#include "orthospec/identity.hpp"
#include "orthospec/raysim.hpp"

using namespace orthospec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IdentityOptions single_thread() {
  IdentityOptions o;
  o.threads = 1;
  return o;
}

// per-boundary defects over increasing cutoffs; ok when every sequence is nonincreasing (strictly if asked)
struct DefectRun {
  std::vector<std::vector<double>> defects;  // [boundary][cutoff]
  std::size_t violations = 0;
  double last_seconds = 0.0;
  bool monotone = true;
  double worst_final = 0.0;
  double min_defect = std::numeric_limits<double>::infinity();
};

DefectRun defect_run(const SurfaceModel& s, const Marking& m, const std::vector<double>& cutoffs, bool strict) {
  DefectRun d;
  d.defects.resize(s.boundary_count());
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < static_cast<int>(s.boundary_count()); ++i) {
      const auto r = verify_boundary(s, i, m, cutoffs[k], single_thread());
      d.violations += r.violations().size();
      d.defects[i].push_back(r.defect);
      d.min_defect = std::min(d.min_defect, r.defect);
    }
    d.last_seconds = seconds_since(t0);
  }
  for (const auto& seq : d.defects) {
    for (std::size_t k = 1; k < seq.size(); ++k)
      if (strict ? !(seq[k] < seq[k - 1]) : seq[k] > seq[k - 1] + 1e-12) d.monotone = false;
    d.worst_final = std::max(d.worst_final, seq.back());
  }
  return d;
}

Outcome basmajian() {
  const auto s = build_surface("pants:1,1,1");
  const auto d = defect_run(s, Marking::empty(), {6, 8, 10, 12, 14}, true);
  Outcome o;
  o.pass = d.worst_final < 5e-3 && d.monotone && d.last_seconds < 60.0 && d.violations == 0;
  o.detail = "pants(1,1,1), M=empty: worst per-boundary defect at cutoff 14 = " + fmt("%.3e", d.worst_final) +
             " (needs < 5e-3); strictly decreasing over cutoffs 6..14: " + (d.monotone ? "yes" : "no") +
             "; cutoff-14 runtime " + fmt("%.1f", d.last_seconds) + " s single-threaded; violations " +
             std::to_string(d.violations);
  return o;
}

Outcome cusp_identity() {
  const auto s = build_modular_torus();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_surface(s, Marking::all_simple_primitive(16.0), 14.0, single_thread());
  const double secs = seconds_since(t0);
  // regrouped: 1/2 sum_alpha e^{-alpha/2} sum_eta e^{-eta_dbl/2}, next to 1/2 of the phi_cusp part
  double term_err = 0.0, phi_half = 0.0;
  std::map<std::string, std::pair<double, std::vector<double>>> by_alpha;
  std::size_t psi = 0;
  for (const auto& t : r.terms) {
    if (t.kind == GapTerm::Kind::PhiCusp) phi_half += t.value / 2;
    if (t.kind != GapTerm::Kind::PsiCusp) continue;
    ++psi;
    const double a = std::exp(-t.alpha_len / 2), e = std::exp(-*t.eta.dbl_trunc_len / 2);
    term_err = std::max(term_err, std::abs(t.value - a * e));
    auto& slot = by_alpha[t.alpha->str()];
    slot.first = a;
    slot.second.push_back(e);
  }
  std::vector<double> parts{phi_half};
  for (const auto& [k, v] : by_alpha) parts.push_back(0.5 * v.first * compensated_sum(v.second));
  const double regrouped = compensated_sum(parts);
  const double regroup_err = std::abs(regrouped - r.partial_sum / 2);
  Outcome o;
  o.pass = r.partial_sum >= 1.95 && term_err <= 1e-10 && regroup_err <= 1e-10 && r.violations().empty() && psi > 0;
  o.detail = "modular torus, M=simple(maxlen 16), cutoff 14: sum " + fmt("%.6f", r.partial_sum) +
             " of 2 (needs >= 1.95); " + std::to_string(psi) + " psi-terms over " + std::to_string(by_alpha.size()) +
             " classes; regrouped term error " + fmt("%.1e", term_err) + ", half-sum error " +
             fmt("%.1e", regroup_err) + "; " + fmt("%.1f", secs) + " s";
  return o;
}

Outcome marked_identity() {
  const auto s = build_surface("pants:2,2,2");
  const auto m = parse_marking("curve:BA", s);
  const auto cuff = conj_class(s.boundary_words[2]);
  const auto d = defect_run(s, m, {6, 8, 10, 12, 14}, false);

  // psi-terms against an independent reading of the arcs at cutoff 10
  std::size_t arcs = 0, mismatches = 0, psi_terms = 0;
  for (int i = 0; i < static_cast<int>(s.boundary_count()); ++i) {
    const auto r = verify_boundary(s, i, m, 10.0, single_thread());
    std::map<std::string, std::size_t> got;
    for (const auto& t : r.terms)
      if (t.kind == GapTerm::Kind::Psi) {
        ++got[t.eta.label()];
        ++psi_terms;
        if (!(*t.alpha == cuff || *t.alpha == inverse_class(cuff))) ++mismatches;
      }
    for (const auto& eta : enumerate_orthogeodesics(s, i, 10.0).arcs) {
      ++arcs;
      const auto ins = inspect_arc(s, eta, m);
      std::size_t want = 0;
      if (!ins.supportive && ins.peripheral)
        want = static_cast<std::size_t>(m.contains(ins.peripheral->first, &s)) + m.contains(ins.peripheral->second, &s);
      if (got[eta.label()] != want) ++mismatches;
    }
  }
  Outcome o;
  o.pass = d.min_defect >= -1e-12 && d.monotone && d.worst_final < 1e-2 && d.violations == 0 && mismatches == 0 &&
           psi_terms > 0;
  o.detail = "pants(2,2,2), M=cuff 2 both orientations: worst per-boundary defect at cutoff 14 = " +
             fmt("%.3e", d.worst_final) + " (needs < 1e-2); min defect " + fmt("%.1e", d.min_defect) +
             "; nonincreasing: " + (d.monotone ? "yes" : "no") + "; psi placement checked on " + std::to_string(arcs) +
             " arcs (" + std::to_string(psi_terms) + " psi-terms), mismatches " + std::to_string(mismatches);
  return o;
}

Outcome gap_formulas() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.05, 10.0);
  double phi_err = 0.0, hex_err = 0.0, literal = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), e = u(rng);
    const double t = std::cosh(e / 2);
    const double p = gap_phi(e);
    phi_err = std::max(phi_err, std::abs(p - std::log(t * t / (t * t - 1))) / std::max(1.0, p));
    const auto r = hexagon_residuals(a, e);
    hex_err = std::max({hex_err, std::abs(r.sinh_h_sinh_y), std::abs(r.pentagon), std::abs(r.sinh_h), std::abs(r.psi_closed)});
    const auto hex = hexagon_unfold(a, e);
    literal = std::max(literal, std::abs(std::sinh(hex.h) * std::sinh(hex.psi) - 1));
  }
  Outcome o;
  o.pass = phi_err <= 1e-12 && hex_err <= 1e-10;
  o.detail = "10^4 random (alpha, eta) in (0.05, 10)^2: phi dual forms " + fmt("%.1e", phi_err) +
             " (needs 1e-12); hexagon relations " + fmt("%.1e", hex_err) +
             " (needs 1e-10; the right-angle relation is read as sinh(h) sinh(y) = 1, the literal sinh(h) sinh(psi) = 1 is off by up to " +
             fmt("%.2g", literal) + ")";
  return o;
}

Outcome cusp_limit() {
  // the shortest arc from the cusp back to itself around cuff 2, followed through pants(beta, 2, 2)
  const auto lim_s = build_surface("pants:cusp,2,2");
  const auto cuff = conj_class(lim_s.boundary_words[2]);
  std::optional<Orthogeodesic> lim;
  for (const auto& a : enumerate_orthogeodesics(lim_s, 0, 8.0, {.to_boundary = 0}).arcs)
    if (is_peripheral_to(lim_s, a, cuff) && (!lim || a.measured_length() < lim->measured_length())) lim = a;
  if (!lim) return {false, "no arc around cuff 2 on pants(cusp,2,2)"};
  const double alpha = lim_s.frames[2].period;
  const double target = gap_psi_cusp(alpha, *lim->dbl_trunc_len);

  std::vector<double> xs, ys;
  std::string rows;
  for (double beta : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    const auto s = build_surface("pants:" + format_double(beta) + ",2,2");
    const auto eta = make_orthogeodesic(s, 0, lim->coset_word, 0);
    if (!is_peripheral_to(s, eta, conj_class(s.boundary_words[2]))) return {false, "arc is not peripheral to cuff 2 at beta " + format_double(beta)};
    const double v = gap_psi(alpha, eta.length) / std::tanh(beta / 2);
    const double err = std::abs(v - target);
    xs.push_back(std::log(beta));
    ys.push_back(std::log(err));
    rows += (rows.empty() ? "" : ", ") + format_double(beta) + ":" + fmt("%.2e", err);
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool converging = std::is_sorted(ys.rbegin(), ys.rend());
  Outcome o;
  o.pass = converging && std::abs(slope - 2.0) <= 0.3;
  o.detail = "pants(beta,2,2), eta " + lim->label() + ", limit e^{-(alpha+eta_dbl)/2} = " + fmt("%.9f", target) +
             "; errors " + rows + "; converging: " + (converging ? "yes" : "no") + "; log-log slope " + fmt("%.3f", slope) +
             " (needs 2 +- 0.3; the closed-form psi carries a first-order term -beta/(4K^2) on this family)";
  return o;
}

Outcome monte_carlo() {
  const auto s = build_surface("pants:2,2,2");
  const auto m = Marking::empty();
  const int b = 0;
  const double period = s.frames[b].period;
  const auto r = verify_boundary(s, b, m, 12.0, single_thread());
  auto terms = r.terms;
  std::sort(terms.begin(), terms.end(), [](const GapTerm& x, const GapTerm& y) { return x.value > y.value; });
  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = sample_orthorays(s, b, m, 100000);
  const double secs = seconds_since(t0);

  double worst_z = 0.0;
  std::string rows;
  for (std::size_t k = 0; k < 5 && k < terms.size(); ++k) {
    const auto g = gap_measure_from(samples, period, terms[k]);
    const double z = (g.estimate - terms[k].value) / g.stderr_;
    worst_z = std::max(worst_z, std::abs(z));
    rows += (rows.empty() ? "" : ", ") + terms[k].eta.label() + " z=" + fmt("%.2f", z);
  }
  // a sample lying in two analytic gaps, or in one gap but classified elsewhere
  std::size_t double_class = 0, misplaced = 0;
  for (const auto& x : samples) {
    std::size_t in = 0;
    const GapTerm* owner = nullptr;
    for (const auto& t : terms) {
      const double p = x.position;
      const bool inside = (p >= t.lo && p < t.hi) || (p + period >= t.lo && p + period < t.hi) ||
                          (p - period >= t.lo && p - period < t.hi);
      if (inside) {
        ++in;
        owner = &t;
      }
    }
    if (in > 1) ++double_class;
    if (owner && x.outcome.signature() != term_signature(*owner)) ++misplaced;
  }
  std::vector<double> wander;
  for (double ml : {5.0, 10.0, 20.0}) wander.push_back(wandering_mass(s, b, m, 20000, ml));
  const bool decreasing = wander[1] < wander[0] && wander[2] < wander[1];
  Outcome o;
  o.pass = worst_z <= 3.0 && double_class == 0 && misplaced == 0 && decreasing;
  o.detail = "pants(2,2,2), M=empty, 10^5 stratified rays (" + fmt("%.1f", secs) + " s): top-5 " + rows +
             " (needs |z| <= 3); samples in two gaps " + std::to_string(double_class) + ", classified against their gap " +
             std::to_string(misplaced) + "; wandering at max_len 5/10/20 = " + fmt("%.4f", wander[0]) + "/" +
             fmt("%.4f", wander[1]) + "/" + fmt("%.5f", wander[2]);
  return o;
}

Outcome combinatorics() {
  std::string notes;
  bool ok = true;
  // roots: arcs whose subloops hold the square of cuff 2 must hold cuff 2 itself
  const auto p = build_surface("pants:2,2,2");
  const auto root = conj_class(p.boundary_words[2]);
  const auto sq = conj_class(p.boundary_words[2].power(2));
  std::size_t wrapping = 0, missing_root = 0;
  for (const auto& eta : enumerate_orthogeodesics(p, 0, 12.0).arcs) {
    const auto loops = subloops(p, eta);
    for (const auto& [s2, r] : {std::pair{sq, root}, std::pair{inverse_class(sq), inverse_class(root)}})
      if (loops.contains(s2)) {
        ++wrapping;
        if (!loops.contains(r)) ++missing_root;
      }
  }
  ok = ok && wrapping > 0 && missing_root == 0;
  notes += "arcs wrapping cuff 2 twice " + std::to_string(wrapping) + ", root missing " + std::to_string(missing_root);

  const auto t = build_modular_torus();
  const auto ab = conj_class(t.word("ab"));
  const auto rej = is_coherent(Marking::explicit_list({ab, conj_class(t.word("abab"))}), t, 14.0);
  const bool rejects = !rej.ok() && !rej.violations.empty() && rej.violations.front().inner == ab;
  const auto acc_t = is_coherent(Marking::all_simple_primitive(14.0), t, 14.0);
  const auto acc_p = is_coherent(Marking::all_simple_primitive(14.0), p, 14.0);
  ok = ok && rejects && acc_t.ok() && acc_p.ok();
  notes += std::string("; {ab,(ab)^2} rejected: ") + (rejects ? "yes" : "no") + "; simple(14) coherent on modular (" +
           std::to_string(acc_t.members_checked) + " classes): " + (acc_t.ok() ? "yes" : "no") + ", on pants: " +
           (acc_p.ok() ? "yes" : "no");

  std::size_t psi_empty = 0;
  for (const SurfaceModel* s : {&p, &t})
    for (const auto& term : verify_surface(*s, Marking::empty(), 10.0, single_thread()).terms)
      psi_empty += term.kind == GapTerm::Kind::Psi || term.kind == GapTerm::Kind::PsiCusp;
  std::size_t phi_arcs = 0, phi_nonsimple = 0;
  const auto h = build_surface("torus1:1,0.5");
  for (const SurfaceModel* s : {&p, &h})
    for (const auto& term : verify_surface(*s, Marking::all_simple_primitive(14.0), 10.0, single_thread()).terms) {
      if (term.kind != GapTerm::Kind::Phi && term.kind != GapTerm::Kind::PhiCusp) continue;
      ++phi_arcs;
      if (subloops(*s, term.eta).crossings != 0) ++phi_nonsimple;
    }
  ok = ok && psi_empty == 0 && phi_nonsimple == 0 && phi_arcs > 0;
  notes += "; M=empty psi-terms " + std::to_string(psi_empty) + "; M=simple non-simple phi arcs " +
           std::to_string(phi_nonsimple) + " of " + std::to_string(phi_arcs);
  return {ok, notes};
}

Outcome halftrace() {
  bool ok = true;
  std::string notes;
  struct Case {
    const char* spec;
    const char* marking;
    double cutoff;
  };
  for (const Case c : {Case{"pants:1,1,1", "empty", 14.0}, Case{"pants:2,2,2", "curve:BA", 12.0}}) {
    const auto s = build_surface(c.spec);
    const auto r = verify_surface(s, parse_marking(c.marking, s), c.cutoff, single_thread());
    const auto h = halftrace_product_check(s, r);
    ok = ok && h.terms_checked == r.terms.size() && h.max_term_residual <= 1e-12 && h.aggregate_residual <= 1e-12 &&
         h.normalization != "none";
    notes += std::string(notes.empty() ? "" : "; ") + c.spec + " M=" + c.marking + ": " + std::to_string(h.terms_checked) +
             " factors, term " + fmt("%.1e", h.max_term_residual) + ", product " + fmt("%.1e", h.aggregate_residual) +
             ", closes against " + h.normalization + " (|log P - beta| " + fmt("%.2e", h.residual_e_beta) +
             ", |log P - beta/2| " + fmt("%.2e", h.residual_e_half_beta) + ")";
  }
  return {ok, notes};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs the acceptance criteria and prints one line per criterion."};
  std::vector<int> expect_fail;
  std::vector<int> only;
  app.add_option("--expect-fail", expect_fail, "Criteria known not to reach their target; exit 0 iff exactly these fail")
      ->delimiter(',');
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Basmajian specialization", basmajian},   {"cusp identity", cusp_identity},
      {"marked identity", marked_identity},      {"gap formulas", gap_formulas},
      {"cusp-limit law", cusp_limit},            {"Monte Carlo gaps", monte_carlo},
      {"combinatorics", combinatorics},          {"half-trace product", halftrace}};
  std::set<int> failed, ran;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ran.insert(id);
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::printf("criterion %d %s: %s  [%.1f s]  %s\n", id, criteria[k].first, o.pass ? "PASS" : "FAIL", seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::set<int> expected;
  for (int id : expect_fail)
    if (ran.count(id)) expected.insert(id);
  std::printf("summary: %zu of %zu criteria pass\n", ran.size() - failed.size(), ran.size());
  if (expect_fail.empty()) return failed.empty() ? 0 : 1;
  if (failed != expected) {
    std::printf("failures differ from the expected set\n");
    return 1;
  }
  return 0;
}
