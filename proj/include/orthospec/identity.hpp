#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orthospec/hypgeom.hpp"
#include "orthospec/markings.hpp"
#include "orthospec/ortho.hpp"
#include "orthospec/surface.hpp"

namespace orthospec {

/// 2 log coth(eta/2), checked against log(t^2/(t^2-1)) with t = cosh(eta/2).
double gap_phi(double eta);
/// 2 e^{-eta_o}.
double gap_phi_cusp(double eta_trunc);
/// Closed form, checked against the unfolded hexagon (x = psi + phi/2).
double gap_psi(double alpha, double eta);
/// e^{-(alpha + eta_dbl)/2}.
double gap_psi_cusp(double alpha, double eta_dbl);

/// Residuals of the hexagon relations for (alpha, eta).
struct HexagonResiduals {
  double sinh_h_sinh_y;  // sinh(h) sinh(y) - 1
  double pentagon;       // sinh(x + y) sinh(eta/2) - cosh(alpha/2)
  double sinh_h;         // sinh(h) - cosh(eta/2)/sinh(alpha/2)
  double psi_closed;     // hexagon psi - closed-form psi
  double max() const;
};
HexagonResiduals hexagon_residuals(double alpha, double eta);

/// Factor of the half-trace product for a single term: t^2/(t^2-1) or the psi factor.
double halftrace_phi_factor(double t);
double halftrace_psi_factor(double a, double t);

struct GapTerm {
  enum class Kind { Phi, PhiCusp, Psi, PsiCusp };
  Kind kind = Kind::Phi;
  Orthogeodesic eta;
  std::optional<ConjClass> alpha;
  double alpha_len = 0.0;
  double alpha_halftrace = 0.0;  // |tr|/2 of the alpha element
  double value = 0.0;
  double lo = 0.0, hi = 0.0;  // gap interval in boundary positions (not wrapped)
};

const char* to_string(GapTerm::Kind k);

struct IdentityFlags {
  std::size_t parabolic_alpha_skipped = 0;
  std::size_t ambiguous_arcs_skipped = 0;
  std::size_t subloop_budget_hits = 0;
  bool enumeration_budget_hit = false;
  bool marking_budget_hit = false;
};

struct IdentityReport {
  std::string surface_id;
  std::vector<int> boundaries;
  std::string marking_spec;
  double cutoff = 0.0;
  std::vector<GapTerm> terms;  // sorted by (measured length, boundary, kind, word, alpha)
  double partial_sum = 0.0;
  double target = 0.0;
  double defect = 0.0;
  double max_overlap = 0.0;  // largest pairwise overlap of gap intervals on one boundary
  std::size_t arcs_enumerated = 0;
  std::size_t arcs_supportive = 0;
  IdentityFlags flags;

  /// Invariant violations (empty when the report is sound).
  std::vector<std::string> violations(double tol_report = 1e-7, double tol_overlap = 1e-8) const;
};

struct IdentityOptions {
  int threads = 1;
  double horizon_margin = 2.0;
  bool check_coherence = true;
  EnumerationOptions enumeration;
};

IdentityReport verify_boundary(const SurfaceModel& s, int boundary, const Marking& m, double cutoff,
                               const IdentityOptions& opt = {});
/// Every boundary; the target is the sum of the per-boundary targets.
IdentityReport verify_surface(const SurfaceModel& s, const Marking& m, double cutoff, const IdentityOptions& opt = {});

/// Everything the identity uses about a single arc.
struct ArcInspection {
  Orthogeodesic eta;
  SubloopSet loops;
  bool supportive = false;
  std::optional<std::pair<ConjClass, ConjClass>> peripheral;  // same-boundary arcs only
  std::vector<GapTerm> terms;
};
ArcInspection inspect_arc(const SurfaceModel& s, const Orthogeodesic& eta, const Marking& m);

/// Neumaier-compensated sum of values taken in descending order.
double compensated_sum(std::vector<double> values);

struct HalftraceCheck {
  double max_term_residual = 0.0;  // relative, exp(term) vs factor
  double log_product = 0.0;        // sum of log factors
  double aggregate_residual = 0.0;  // |exp(partial_sum) - product| / product
  double residual_e_beta = 0.0;     // |log product - beta|
  double residual_e_half_beta = 0.0;
  std::string normalization;  // "e^beta", "e^(beta/2)", or "none" when no geodesic-boundary term was checked
  std::size_t terms_checked = 0;
};

/// Uses the geodesic-boundary terms of the report; cusp terms are skipped.
HalftraceCheck halftrace_product_check(const SurfaceModel& s, const IdentityReport& r);

std::string report_csv(const IdentityReport& r);
std::string report_json(const IdentityReport& r, const std::optional<HalftraceCheck>& ht = std::nullopt,
                        double tol_report = 1e-7);

/// Shortest-first printing of doubles that round-trips.
std::string format_double(double v);

}  // namespace orthospec
