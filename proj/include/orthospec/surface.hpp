#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orthospec/hypgeom.hpp"
#include "orthospec/words.hpp"

namespace orthospec {

struct BoundarySpec {
  enum class Kind { Geodesic, Cusp };
  Kind kind = Kind::Cusp;
  double length = 0.0;  // geodesic length; 0 for a cusp
  int index = 0;

  bool is_cusp() const { return kind == Kind::Cusp; }
};

/// Open half-plane to the left of `edge`.
struct HalfPlane {
  GeodesicLine edge;

  bool contains(const Point& z, double tol = 0.0) const;
  /// Some point strictly inside.
  Point interior_point() const;
};

HalfPlane half_plane_containing(const GeodesicLine& line, const Point& inside);

/// Normalizing chart for one boundary component.
///
/// Geodesic boundary: `to_frame` sends the axis of the boundary generator to
/// (0, inf) with the generator translating upwards; positions along the
/// boundary are log(Im z) and one turn is `period` = length.
/// Cusp: `to_frame` sends the cusp to inf with the generator acting as
/// z -> z + shift*height; the standard horocycle is Im z = height (length 2)
/// and positions are Re z / height.
struct BoundaryFrame {
  Isometry to_frame;
  bool cusp = false;
  double period = 0.0;  // |shift|
  double shift = 0.0;   // signed translation of the boundary generator in position units
  double height = 0.0;  // cusp horocycle height in the frame
  int inward = 1;       // geodesic: sign of Re on the surface side of (0, inf)
};

/// A lift of a geodesic boundary component meeting the closed fundamental domain.
struct BoundaryLift {
  int boundary;
  GroupWord word;  // lift = word . axis(boundary generator)
  GeodesicLine line;
};

/// Standard horoball of a cusp based at an ideal vertex of the fundamental domain.
struct HoroballLift {
  int boundary;
  GroupWord word;  // horoball = word . (standard horoball of the boundary generator)
  Horocycle horo;
};

struct SurfaceModel {
  std::string id;
  int rank = 2;
  std::vector<Isometry> generators;
  std::vector<GroupWord> boundary_words;
  std::vector<BoundarySpec> boundary_specs;
  /// Boundary elements as produced by the construction, independent of the words.
  std::vector<Isometry> boundary_elements;
  std::vector<std::optional<Horocycle>> cusp_horocycles;
  /// half_planes[x]: letter x maps the complement of half_planes[x ^ 1] onto the closure of half_planes[x].
  std::vector<HalfPlane> half_planes;
  std::vector<BoundaryFrame> frames;
  std::vector<BoundaryLift> lifts_in_domain;
  std::vector<HoroballLift> horoballs_in_domain;

  std::size_t boundary_count() const { return boundary_words.size(); }

  Isometry letter_matrix(Letter x) const;
  /// Matrix product of a word, renormalized every 32 letters.
  Isometry evaluate(const GroupWord& w) const;
  Isometry evaluate(std::span<const Letter> letters) const;

  /// Tile containing z: returns h with z in h.F; `local` receives h^-1 z.
  GroupWord locate(const Point& z, Point* local = nullptr) const;
  bool in_domain(const Point& z) const;

  GroupWord word(std::string_view literal) const { return GroupWord::parse(literal, rank); }

  /// Unwrapped position along boundary i of a point on the boundary axis (or standard horocycle).
  double boundary_position(int i, const Point& z) const;

  /// Free-homotopy length of a class: translation length, or 0 when parabolic.
  double class_length(const GroupWord& w) const;
};

SurfaceModel build_pair_of_pants(double l1, double l2, double l3);
SurfaceModel build_one_holed_torus(const BoundarySpec& boundary, double fn_len, double fn_twist);
SurfaceModel build_modular_torus();

/// Parses `pants:L1,L2,L3`, `torus1:L,T`, `torus1:cusp,T`, `modular`.
SurfaceModel build_surface(std::string_view spec);

std::pair<GroupWord, Isometry> boundary_generator(const SurfaceModel& s, int i);

struct ValidationCheck {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

ValidationReport validate(const SurfaceModel& s);

/// Recomputes frames, cusp horocycles and domain lifts from generators and half-planes.
void finalize_surface(SurfaceModel& s);

}  // namespace orthospec
