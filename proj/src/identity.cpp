#include "orthospec/identity.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "orthospec/error.hpp"

namespace orthospec {

namespace {

constexpr double kAbsTol = 1e-10;
constexpr double kRelTol = 1e-9;

bool close(double a, double b, double abs_tol = kAbsTol, double rel_tol = kRelTol) {
  return std::abs(a - b) <= abs_tol + rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

double gap_phi(double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::NonPositiveLength, "gap_phi: eta must be positive");
  const double v = -2.0 * std::log(std::tanh(eta / 2.0));
  // t^2/(t^2-1) with t^2 - 1 = sinh^2(eta/2), kept exact for small eta
  const double t = std::cosh(eta / 2.0), se = std::sinh(eta / 2.0);
  const double w = std::log(t * t / (se * se));
  if (!close(v, w, 1e-12, 1e-12)) throw Error(ErrorKind::FormulaMismatch, "gap_phi: closed forms disagree");
  return v;
}

double gap_phi_cusp(double eta_trunc) {
  if (!std::isfinite(eta_trunc)) {
    if (eta_trunc > 0) return 0.0;
    throw Error(ErrorKind::InadmissibleParams, "gap_phi_cusp: truncated length must be finite");
  }
  return 2.0 * std::exp(-eta_trunc);
}

double gap_psi(double alpha, double eta) {
  if (!(alpha > 0.0) || !(eta > 0.0)) throw Error(ErrorKind::NonPositiveLength, "gap_psi: lengths must be positive");
  const double ca = std::cosh(alpha / 2.0), sa = std::sinh(alpha / 2.0), ce = std::cosh(eta / 2.0);
  const double r = std::sqrt(ca * ca + ce * ce - 1.0);
  const double v = std::log((ca + r) / (sa + r));
  const HexagonUnfold hex = hexagon_unfold(alpha, eta);
  if (!close(v, hex.psi)) throw Error(ErrorKind::FormulaMismatch, "gap_psi: hexagon and closed form disagree");
  return v;
}

double gap_psi_cusp(double alpha, double eta_dbl) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::NonPositiveAlpha, "gap_psi_cusp: alpha must be positive");
  if (!std::isfinite(eta_dbl)) throw Error(ErrorKind::InadmissibleParams, "gap_psi_cusp: doubly truncated length must be finite");
  return std::exp(-(alpha + eta_dbl) / 2.0);
}

double HexagonResiduals::max() const {
  return std::max({std::abs(sinh_h_sinh_y), std::abs(pentagon), std::abs(sinh_h), std::abs(psi_closed)});
}

HexagonResiduals hexagon_residuals(double alpha, double eta) {
  const HexagonUnfold hex = hexagon_unfold(alpha, eta);
  const double ca = std::cosh(alpha / 2.0), sa = std::sinh(alpha / 2.0), ce = std::cosh(eta / 2.0), se = std::sinh(eta / 2.0);
  const double r = std::sqrt(ca * ca + ce * ce - 1.0);
  HexagonResiduals res;
  res.sinh_h_sinh_y = std::sinh(hex.h) * std::sinh(hex.y) - 1.0;
  res.pentagon = (std::sinh(hex.x + hex.y) * se - ca) / ca;
  res.sinh_h = (std::sinh(hex.h) - ce / sa) / (ce / sa);
  res.psi_closed = hex.psi - std::log((ca + r) / (sa + r));
  return res;
}

double halftrace_phi_factor(double t) { return t * t / (t * t - 1.0); }

double halftrace_psi_factor(double a, double t) {
  const double r = std::sqrt(a * a + t * t - 1.0);
  return (a + r) / (std::sqrt(a * a - 1.0) + r);
}

const char* to_string(GapTerm::Kind k) {
  switch (k) {
    case GapTerm::Kind::Phi: return "phi";
    case GapTerm::Kind::PhiCusp: return "phi_cusp";
    case GapTerm::Kind::Psi: return "psi";
    case GapTerm::Kind::PsiCusp: return "psi_cusp";
  }
  return "?";
}

double compensated_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), [](double a, double b) { return a > b; });
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

namespace {

struct ArcOutcome {
  bool supportive = false;
  bool ambiguous = false;
  bool budget = false;
  std::size_t parabolic_skipped = 0;
  std::vector<GapTerm> terms;
};

ArcOutcome analyze_arc(const SurfaceModel& s, const Orthogeodesic& eta, const Marking& m) {
  ArcOutcome out;
  try {
    if (!m.is_empty()) {
      const SubloopSet loops = subloops(s, eta);
      if (loops.budget_hit) {
        out.budget = true;
        return out;
      }
      if (loops.ambiguous) {
        out.ambiguous = true;
        return out;
      }
      if (supports(loops, m, s)) {
        out.supportive = true;
        return out;
      }
    }
    const double foot = eta.foot_from;
    double half_phi = 0.0;
    if (!eta.from_cusp) {
      GapTerm t;
      t.kind = GapTerm::Kind::Phi;
      t.eta = eta;
      t.value = gap_phi(eta.length);
      half_phi = t.value / 2.0;
      t.lo = foot - half_phi;
      t.hi = foot + half_phi;
      out.terms.push_back(std::move(t));
    } else if (!eta.to_cusp) {
      GapTerm t;
      t.kind = GapTerm::Kind::PhiCusp;
      t.eta = eta;
      t.value = gap_phi_cusp(*eta.trunc_len);
      half_phi = t.value / 2.0;
      t.lo = foot - half_phi;
      t.hi = foot + half_phi;
      out.terms.push_back(std::move(t));
    }
    if (eta.to_boundary == eta.from_boundary && !m.is_empty()) {
      const auto [first, second] = peripheral_classes(s, eta);
      for (int side = 0; side < 2; ++side) {
        const ConjClass& alpha = side == 0 ? first : second;
        if (!m.contains(alpha, &s)) continue;
        const Isometry g = s.evaluate(alpha.rep);
        if (classify(g) != IsometryClass::Hyperbolic) {
          ++out.parabolic_skipped;
          continue;
        }
        GapTerm t;
        t.eta = eta;
        t.alpha = alpha;
        t.alpha_len = translation_length(g);
        t.alpha_halftrace = std::abs(g.trace()) / 2.0;
        if (eta.from_cusp) {
          t.kind = GapTerm::Kind::PsiCusp;
          t.value = gap_psi_cusp(t.alpha_len, *eta.dbl_trunc_len);
        } else {
          t.kind = GapTerm::Kind::Psi;
          t.value = gap_psi(t.alpha_len, eta.length);
        }
        if (side == 0) {
          t.lo = foot + half_phi;
          t.hi = t.lo + t.value;
        } else {
          t.hi = foot - half_phi;
          t.lo = t.hi - t.value;
        }
        out.terms.push_back(std::move(t));
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AmbiguousCrossing) throw;
    out = ArcOutcome{};
    out.ambiguous = true;
  }
  return out;
}

bool term_less(const GapTerm& a, const GapTerm& b) {
  const double la = a.eta.measured_length(), lb = b.eta.measured_length();
  if (la != lb) return la < lb;
  if (a.eta.from_boundary != b.eta.from_boundary) return a.eta.from_boundary < b.eta.from_boundary;
  if (a.eta.to_boundary != b.eta.to_boundary) return a.eta.to_boundary < b.eta.to_boundary;
  if (!(a.eta.coset_word == b.eta.coset_word)) return a.eta.coset_word < b.eta.coset_word;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.alpha.has_value() != b.alpha.has_value()) return !a.alpha.has_value();
  if (a.alpha && b.alpha && !(*a.alpha == *b.alpha)) return *a.alpha < *b.alpha;
  return a.lo < b.lo;
}

// largest overlap between gap intervals on a circle of the given period
double max_overlap(std::vector<std::pair<double, double>> iv, double period) {
  if (iv.size() < 2) return 0.0;
  for (auto& [lo, hi] : iv) {
    const double w = hi - lo;
    lo = std::fmod(lo, period);
    if (lo < 0) lo += period;
    hi = lo + w;
  }
  std::sort(iv.begin(), iv.end());
  double worst = 0.0;
  double reach = iv.front().second;
  for (std::size_t k = 1; k < iv.size(); ++k) {
    worst = std::max(worst, std::min(reach, iv[k].second) - iv[k].first);
    reach = std::max(reach, iv[k].second);
  }
  // wrap: intervals running past the period overlap the first ones
  worst = std::max(worst, std::min(reach - period, iv.front().second) - iv.front().first);
  return std::max(worst, 0.0);
}

void run_boundary(const SurfaceModel& s, int i, const Marking& m, double cutoff, const IdentityOptions& opt, IdentityReport& rep) {
  const EnumerationResult en = enumerate_orthogeodesics(s, i, cutoff, opt.enumeration);
  rep.flags.enumeration_budget_hit = rep.flags.enumeration_budget_hit || en.budget_hit;
  rep.arcs_enumerated += en.arcs.size();
  std::vector<ArcOutcome> outs(en.arcs.size());
  const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(en.arcs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= en.arcs.size()) return;
      try {
        outs[k] = analyze_arc(s, en.arcs[k], m);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (!failure) failure = std::current_exception();
        next = en.arcs.size();
        return;
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<std::pair<double, double>> iv;
  for (auto& o : outs) {
    if (o.supportive) ++rep.arcs_supportive;
    if (o.ambiguous) ++rep.flags.ambiguous_arcs_skipped;
    if (o.budget) ++rep.flags.subloop_budget_hits;
    rep.flags.parabolic_alpha_skipped += o.parabolic_skipped;
    for (auto& t : o.terms) {
      iv.emplace_back(t.lo, t.hi);
      rep.terms.push_back(std::move(t));
    }
  }
  rep.max_overlap = std::max(rep.max_overlap, max_overlap(std::move(iv), s.frames[i].period));
  rep.target += s.boundary_specs[i].is_cusp() ? 2.0 : s.frames[i].period;
}

void finish(IdentityReport& rep) {
  std::sort(rep.terms.begin(), rep.terms.end(), term_less);
  std::vector<double> vals;
  vals.reserve(rep.terms.size());
  for (const auto& t : rep.terms) vals.push_back(t.value);
  rep.partial_sum = compensated_sum(std::move(vals));
  rep.defect = rep.target - rep.partial_sum;
}

IdentityReport start(const SurfaceModel& s, const Marking& m, double cutoff, const IdentityOptions& opt) {
  if (!(cutoff > 0.0)) throw Error(ErrorKind::InadmissibleParams, "cutoff must be positive");
  IdentityReport rep;
  rep.surface_id = s.id;
  rep.marking_spec = m.spec();
  rep.cutoff = cutoff;
  if (opt.check_coherence && !m.is_empty()) {
    const CoherenceReport c = is_coherent(m, s, cutoff + opt.horizon_margin);
    if (!c.violations.empty())
      throw Error(ErrorKind::IncoherentMarking, "marking is not coherent: " + c.violations.front().inner.str() + " is a subloop of " +
                                                    c.violations.front().outer.str());
    rep.flags.marking_budget_hit = c.budget_hit;
  }
  return rep;
}

}  // namespace

ArcInspection inspect_arc(const SurfaceModel& s, const Orthogeodesic& eta, const Marking& m) {
  ArcInspection a;
  a.eta = eta;
  a.loops = subloops(s, eta);
  a.supportive = !m.is_empty() && supports(a.loops, m, s);
  if (eta.from_boundary == eta.to_boundary) a.peripheral = peripheral_classes(s, eta);
  a.terms = analyze_arc(s, eta, m).terms;
  return a;
}

IdentityReport verify_boundary(const SurfaceModel& s, int boundary, const Marking& m, double cutoff, const IdentityOptions& opt) {
  if (boundary < 0 || static_cast<std::size_t>(boundary) >= s.boundary_count()) throw Error(ErrorKind::BadIndex, "boundary index out of range");
  IdentityReport rep = start(s, m, cutoff, opt);
  rep.boundaries = {boundary};
  run_boundary(s, boundary, m, cutoff, opt, rep);
  finish(rep);
  return rep;
}

IdentityReport verify_surface(const SurfaceModel& s, const Marking& m, double cutoff, const IdentityOptions& opt) {
  IdentityReport rep = start(s, m, cutoff, opt);
  for (int i = 0; i < static_cast<int>(s.boundary_count()); ++i) {
    rep.boundaries.push_back(i);
    run_boundary(s, i, m, cutoff, opt, rep);
  }
  finish(rep);
  return rep;
}

std::vector<std::string> IdentityReport::violations(double tol_report, double tol_overlap) const {
  std::vector<std::string> v;
  if (defect < -tol_report) v.push_back("negative defect " + format_double(defect));
  if (max_overlap > tol_overlap) v.push_back("gap intervals overlap by " + format_double(max_overlap));
  for (const auto& t : terms) {
    if (!(t.value > 0.0)) {
      v.push_back("nonpositive term on " + t.eta.label());
      break;
    }
    const bool cusp_kind = t.kind == GapTerm::Kind::PhiCusp || t.kind == GapTerm::Kind::PsiCusp;
    if (cusp_kind != t.eta.from_cusp) {
      v.push_back("term kind does not match boundary kind on " + t.eta.label());
      break;
    }
  }
  if (flags.enumeration_budget_hit) v.push_back("enumeration budget exhausted");
  return v;
}

HalftraceCheck halftrace_product_check(const SurfaceModel& s, const IdentityReport& r) {
  HalftraceCheck hc;
  double beta = 0.0;
  for (int i : r.boundaries)
    if (!s.boundary_specs[i].is_cusp()) beta += s.frames[i].period;
  std::vector<double> logs, vals;
  for (const auto& t : r.terms) {
    double f;
    const double tt = std::cosh(t.eta.length / 2.0);
    if (t.kind == GapTerm::Kind::Phi) {
      f = halftrace_phi_factor(tt);
    } else if (t.kind == GapTerm::Kind::Psi) {
      f = halftrace_psi_factor(t.alpha_halftrace, tt);
    } else {
      continue;
    }
    ++hc.terms_checked;
    hc.max_term_residual = std::max(hc.max_term_residual, std::abs(std::exp(t.value) - f) / f);
    logs.push_back(std::log(f));
    vals.push_back(t.value);
  }
  hc.log_product = compensated_sum(logs);
  const double sum = compensated_sum(vals);
  hc.aggregate_residual = std::abs(std::expm1(sum - hc.log_product));
  hc.residual_e_beta = std::abs(hc.log_product - beta);
  hc.residual_e_half_beta = std::abs(hc.log_product - beta / 2.0);
  if (hc.terms_checked == 0)
    hc.normalization = "none";
  else
    hc.normalization = hc.residual_e_beta <= hc.residual_e_half_beta ? "e^beta" : "e^(beta/2)";
  return hc;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

struct Row {
  std::string kind, word, alpha_word;
  int boundary;
  double length, value, cumsum, defect, alpha_length;
  std::optional<double> trunc, dbl_trunc;
};

std::vector<Row> rows(const IdentityReport& r) {
  std::vector<Row> out;
  double sum = 0.0, comp = 0.0;
  for (const auto& t : r.terms) {
    const double nt = sum + t.value;
    comp += std::abs(sum) >= std::abs(t.value) ? (sum - nt) + t.value : (t.value - nt) + sum;
    sum = nt;
    Row row;
    row.kind = to_string(t.kind);
    row.boundary = t.eta.from_boundary;
    row.word = t.eta.label();
    row.length = t.eta.length;
    if (t.eta.from_cusp) {
      if (t.eta.to_cusp) {
        row.dbl_trunc = t.eta.dbl_trunc_len;
      } else {
        row.trunc = t.eta.trunc_len;
      }
    }
    row.alpha_word = t.alpha ? t.alpha->str() : "";
    row.alpha_length = t.alpha_len;
    row.value = t.value;
    row.cumsum = sum + comp;
    row.defect = r.target - row.cumsum;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::string report_csv(const IdentityReport& r) {
  std::ostringstream os;
  os << "kind,boundary,word,length,trunc,dbl_trunc,alpha_word,alpha_length,value,cumsum,defect\n";
  for (const auto& row : rows(r)) {
    os << row.kind << ',' << row.boundary << ',' << row.word << ',' << format_double(row.length) << ','
       << (row.trunc ? format_double(*row.trunc) : "") << ',' << (row.dbl_trunc ? format_double(*row.dbl_trunc) : "") << ','
       << row.alpha_word << ',' << (row.alpha_word.empty() ? "" : format_double(row.alpha_length)) << ',' << format_double(row.value)
       << ',' << format_double(row.cumsum) << ',' << format_double(row.defect) << '\n';
  }
  return os.str();
}

std::string report_json(const IdentityReport& r, const std::optional<HalftraceCheck>& ht, double tol_report) {
  using nlohmann::json;
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  json meta;
  meta["surface"] = r.surface_id;
  meta["marking"] = r.marking_spec;
  meta["boundaries"] = r.boundaries;
  meta["cutoff"] = r.cutoff;
  meta["target"] = r.target;
  meta["partial_sum"] = r.partial_sum;
  meta["defect"] = r.defect;
  meta["max_overlap"] = r.max_overlap;
  meta["arcs_enumerated"] = r.arcs_enumerated;
  meta["arcs_supportive"] = r.arcs_supportive;
  meta["tolerances"] = {{"report", tol_report}, {"overlap", 1e-8}, {"closed_form_abs", kAbsTol}, {"closed_form_rel", kRelTol}};
  meta["flags"] = {{"parabolic_alpha_skipped", r.flags.parabolic_alpha_skipped},
                   {"ambiguous_arcs_skipped", r.flags.ambiguous_arcs_skipped},
                   {"subloop_budget_hits", r.flags.subloop_budget_hits},
                   {"enumeration_budget_hit", r.flags.enumeration_budget_hit},
                   {"marking_budget_hit", r.flags.marking_budget_hit}};
  meta["violations"] = r.violations(tol_report);
  if (ht) {
    meta["halftrace"] = {{"terms_checked", ht->terms_checked},
                         {"max_term_residual", ht->max_term_residual},
                         {"aggregate_residual", ht->aggregate_residual},
                         {"log_product", ht->log_product},
                         {"normalization", ht->normalization},
                         {"residual_e_beta", ht->residual_e_beta},
                         {"residual_e_half_beta", ht->residual_e_half_beta}};
  }
  json terms = json::array();
  for (const auto& row : rows(r)) {
    json t;
    t["kind"] = row.kind;
    t["boundary"] = row.boundary;
    t["word"] = row.word;
    t["length"] = num(row.length);
    t["trunc"] = row.trunc ? num(*row.trunc) : json(nullptr);
    t["dbl_trunc"] = row.dbl_trunc ? num(*row.dbl_trunc) : json(nullptr);
    t["alpha_word"] = row.alpha_word.empty() ? json(nullptr) : json(row.alpha_word);
    t["alpha_length"] = row.alpha_word.empty() ? json(nullptr) : json(row.alpha_length);
    t["value"] = row.value;
    t["cumsum"] = row.cumsum;
    t["defect"] = row.defect;
    terms.push_back(std::move(t));
  }
  json doc;
  doc["meta"] = std::move(meta);
  doc["terms"] = std::move(terms);
  return doc.dump(2) + "\n";
}

}  // namespace orthospec
