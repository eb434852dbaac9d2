#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orthospec/identity.hpp"
#include "orthospec/markings.hpp"
#include "orthospec/ortho.hpp"
#include "orthospec/surface.hpp"

namespace orthospec {

struct RayOutcome {
  enum class Kind { HitBoundary, Looped, Budget };
  Kind kind = Kind::Budget;
  double position = 0.0;
  double path_length = 0.0;
  GroupWord crossing_word;  // product of the side crossings up to the stop
  int hit_boundary = -1;
  // HitBoundary: the arc the ray stops on. Looped: the unsupportive arc the loop reduces to.
  std::optional<Orthogeodesic> eta;
  std::optional<ConjClass> alpha;  // first marked loop, then the one of the final arc
  std::size_t reductions = 0;
  bool reduction_cap_hit = false;

  /// "from->to:word" or "from->to:word|alpha"; empty when nothing was classified.
  std::string signature() const;
};

const char* to_string(RayOutcome::Kind k);

/// Orthoray from position p on boundary i (p in [0, period)), followed for at most max_len.
RayOutcome shoot(const SurfaceModel& s, int i, double p, const Marking& m, double max_len);

/// Same key as RayOutcome::signature.
std::string term_signature(const GapTerm& t);

struct McOptions {
  double max_len = 30.0;
  std::uint64_t seed = 0x6f72746f72617973ULL;
  int threads = 1;
};

struct McSample {
  double position = 0.0;
  RayOutcome outcome;
  bool ambiguous = false;  // near-tangent self-crossing, left unclassified
};

/// Stratified sampling: n equal strata of the boundary with one uniform draw each.
std::vector<McSample> sample_orthorays(const SurfaceModel& s, int i, const Marking& m, std::size_t n,
                                       const McOptions& opt = {});

struct GapEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// Boundary length times the fraction of samples whose signature is the term's.
GapEstimate gap_measure_from(const std::vector<McSample>& samples, double period, const GapTerm& term);
/// Same, counting every outcome whose final arc is `eta` whatever the loop class. Near the edge of the
/// arc's shadow on a marked side some rays loop before they land, so only this union is sharp.
GapEstimate arc_gap_measure_from(const std::vector<McSample>& samples, double period, const Orthogeodesic& eta);
GapEstimate estimate_gap_measure(const SurfaceModel& s, int i, const Marking& m, const GapTerm& term, std::size_t n,
                                 const McOptions& opt = {});

/// Fraction of Budget outcomes.
double wandering_mass(const SurfaceModel& s, int i, const Marking& m, std::size_t n, double max_len,
                      std::uint64_t seed = McOptions{}.seed, int threads = 1);

}  // namespace orthospec
