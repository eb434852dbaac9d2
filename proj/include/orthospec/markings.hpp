#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "orthospec/surface.hpp"
#include "orthospec/words.hpp"

namespace orthospec {

/// A set of oriented free homotopy classes, given by a rule.
class Marking {
 public:
  enum class Rule { Empty, Explicit, AllSimplePrimitive, SingleCurve, McgOrbitApprox };
  enum class Orientation { Both, AsGiven };

  Marking();

  static Marking empty();
  static Marking explicit_list(std::vector<ConjClass> classes, Orientation o = Orientation::AsGiven);
  static Marking all_simple_primitive(double max_len);
  static Marking single_curve(const ConjClass& c, Orientation o = Orientation::Both);
  /// Orbit of `seed` under the standard Dehn twists up to `depth`, kept if length <= max_len.
  static Marking orbit(const SurfaceModel& s, const ConjClass& seed, int depth, double max_len);

  Rule rule() const { return rule_; }
  Orientation orientation() const { return orientation_; }
  bool is_empty() const { return rule_ == Rule::Empty || (rule_ != Rule::AllSimplePrimitive && members_.empty()); }
  double max_len() const { return max_len_; }
  const std::vector<ConjClass>& members() const { return members_; }
  const std::string& spec() const { return spec_; }

  /// Membership. AllSimplePrimitive needs the surface (simplicity is geometric) and
  /// throws NeedsSurface without one.
  bool contains(const ConjClass& c, const SurfaceModel* s = nullptr) const;

  /// Members of length <= horizon as an explicit list (both orientations where the rule implies them).
  std::vector<ConjClass> materialize(const SurfaceModel& s, double horizon) const;

 private:
  struct Cache;

  Rule rule_ = Rule::Empty;
  Orientation orientation_ = Orientation::AsGiven;
  std::vector<ConjClass> members_;  // sorted
  double max_len_ = 0.0;
  std::string spec_ = "empty";
  std::shared_ptr<Cache> cache_;
};

/// `empty`, `simple:maxlen=R`, `curve:<word>[,oriented]`, `orbit:<word>:depth=n,maxlen=R`, `file:<path>`.
Marking parse_marking(std::string_view spec, const SurfaceModel& s);

/// Simple primitive closed geodesics of length <= horizon (both orientations), boundary classes included.
std::vector<ConjClass> simple_classes(const SurfaceModel& s, double horizon);

struct CoherenceViolation {
  ConjClass outer;  // the curve that carries the subloop
  ConjClass inner;  // the member found as a proper subloop
};

struct CoherenceReport {
  std::vector<CoherenceViolation> violations;
  std::size_t members_checked = 0;
  bool budget_hit = false;
  bool ok() const { return violations.empty() && !budget_hit; }
};

CoherenceReport is_coherent(const Marking& m, const SurfaceModel& s, double horizon);

/// Greedy pass: keeps a class unless it supports, or is supported by, a class kept earlier.
Marking filter_coherent(const std::vector<ConjClass>& classes, const SurfaceModel& s, double horizon);

}  // namespace orthospec
