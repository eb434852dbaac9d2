#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "orthospec/surface.hpp"
#include "orthospec/words.hpp"

namespace orthospec {

class Marking;

/// Oriented orthogeodesic between boundary components.
///
/// Geometry lives in the universal cover: the arc runs along `line` (oriented
/// from -> to) and, in standard_frame(line), meets the departure boundary (or
/// its standard horocycle) at i e^{s_begin} and the arrival one at i e^{s_end}.
/// The departure lift is the axis (or horoball) of the boundary generator and
/// the arrival lift is `lift_word` applied to the corresponding lift of `to_boundary`.
struct Orthogeodesic {
  static constexpr double inf = std::numeric_limits<double>::infinity();

  int from_boundary = 0;
  int to_boundary = 0;
  GroupWord coset_word;  // canonical double coset representative
  GroupWord lift_word;
  double length = inf;
  std::optional<double> trunc_len;
  std::optional<double> dbl_trunc_len;
  double foot_from = 0.0;  // position on the departure boundary, in [0, period)
  double foot_to = 0.0;
  GeodesicLine line;
  double s_begin = 0.0;
  double s_end = 0.0;
  bool from_cusp = false;
  bool to_cusp = false;

  /// The length compared against enumeration cutoffs.
  double measured_length() const;
  std::string label() const;
};

struct EnumerationResult {
  std::vector<Orthogeodesic> arcs;
  std::size_t nodes_visited = 0;
  bool budget_hit = false;
  bool cutoff_too_small = false;  // no arc below the cutoff
};

struct EnumerationOptions {
  std::optional<int> to_boundary;
  std::size_t max_nodes = 20'000'000;
};

/// All oriented orthogeodesics leaving `from_b` whose measured length is <= cutoff,
/// sorted by (length, word). Arcs of infinite measured length (into a cusp that is
/// not the departure cusp) are not listed.
EnumerationResult enumerate_orthogeodesics(const SurfaceModel& s, int from_b, double cutoff,
                                           const EnumerationOptions& opt = {});

/// Minimal-length representative of <b_from> g <b_to>, ties broken lexicographically.
GroupWord canonical_coset_word(const SurfaceModel& s, int from_b, const GroupWord& g, int to_b);

/// Builds the arc from the lift word alone; throws UnknownArc if the double coset
/// does not give an orthogeodesic (e.g. g in <b_from> with from == to).
Orthogeodesic make_orthogeodesic(const SurfaceModel& s, int from_b, const GroupWord& g, int to_b);

double truncated_length(const SurfaceModel& s, const Orthogeodesic& eta);
double doubly_truncated_length(const SurfaceModel& s, const Orthogeodesic& eta);

/// The two classes of ∂η. `first` is the push-off whose gap sits on the increasing
/// side of the departure foot, `second` the one on the decreasing side.
std::pair<ConjClass, ConjClass> peripheral_classes(const SurfaceModel& s, const Orthogeodesic& eta);

// ---------------------------------------------------------------- tracing

/// One piece of a traced geodesic inside a single tile h.F.
struct TracePiece {
  GroupWord tile;
  Isometry frame;  // standard frame of the traced line composed with the tile element
  double s0, s1;
};

struct TraceOptions {
  std::size_t max_pieces = 200000;
};

/// Pieces of the geodesic standard_frame(line)^-1 (i e^s), s in [s0, s1].
std::vector<TracePiece> trace_line(const SurfaceModel& s, const GeodesicLine& line, double s0, double s1,
                                   const TraceOptions& opt = {});

struct SelfCrossing {
  std::size_t piece_a, piece_b;  // piece_a < piece_b
  double s_a, s_b;
  double angle;
  GroupWord loop;  // tile_b * tile_a^-1
};

/// Transverse crossings between distinct pieces; `ambiguous` counts near-tangent ones.
/// Pass the translation length as `period` when the pieces trace a closed curve.
std::vector<SelfCrossing> find_self_crossings(const std::vector<TracePiece>& pieces, std::size_t* ambiguous = nullptr,
                                              double period = 0.0);

struct SubloopSet {
  std::vector<ConjClass> classes;  // sorted, unique
  std::size_t crossings = 0;
  std::size_t ambiguous = 0;
  bool budget_hit = false;

  bool empty() const { return classes.empty(); }
  bool contains(const ConjClass& c) const;
};

/// Proper subloops of the arc. Cusp ends are traced `cusp_extension` past the standard horocycle.
SubloopSet subloops(const SurfaceModel& s, const Orthogeodesic& eta, double cusp_extension = 4.0);

/// Proper subloops of the closed geodesic in class c (lesser powers included).
SubloopSet curve_subloops(const SurfaceModel& s, const ConjClass& c);

/// Self-intersection count of the primitive closed geodesic in class c (0 for parabolic classes).
std::size_t self_intersections(const SurfaceModel& s, const ConjClass& c);

/// Adds root^l, l < k, for every member root^k with k >= 2.
void close_under_roots(std::vector<ConjClass>& classes);

bool supports(const SurfaceModel& s, const Orthogeodesic& eta, const Marking& m);
bool supports(const SubloopSet& loops, const Marking& m, const SurfaceModel& s);
bool is_peripheral_to(const SurfaceModel& s, const Orthogeodesic& eta, const ConjClass& alpha);

}  // namespace orthospec
