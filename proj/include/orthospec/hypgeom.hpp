#pragma once

// Upper half-plane primitives. Everything here is header-only and templated
// on the scalar type; the rest of the library uses the double aliases at the
// bottom of the file.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "orthospec/error.hpp"

namespace orthospec {

/// Point of the boundary circle R u {inf}. Infinity is a tag, never a big float.
template <typename Scalar>
struct BoundaryPointT {
  Scalar x = Scalar(0);
  bool infinite = false;

  static BoundaryPointT at(Scalar v) { return {v, false}; }
  static BoundaryPointT infinity() { return {Scalar(0), true}; }

  bool same_as(const BoundaryPointT& o, Scalar tol) const {
    if (infinite || o.infinite) return infinite == o.infinite;
    using std::abs;
    return abs(x - o.x) <= tol * (Scalar(1) + abs(x));
  }
};

enum class IsometryClass { Identity, Elliptic, Parabolic, Hyperbolic };

inline const char* to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::Identity: return "identity";
    case IsometryClass::Elliptic: return "elliptic";
    case IsometryClass::Parabolic: return "parabolic";
    case IsometryClass::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

template <typename Scalar>
class IsometryT {
 public:
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;
  using Point = std::complex<Scalar>;
  using Boundary = BoundaryPointT<Scalar>;

  IsometryT() : m_(Matrix::Identity()) {}

  /// Rescales to determinant +1; throws if the determinant is not positive.
  explicit IsometryT(const Matrix& m) : m_(m) { fix_determinant(); }

  IsometryT(Scalar a, Scalar b, Scalar c, Scalar d) {
    m_ << a, b, c, d;
    fix_determinant();
  }

  static IsometryT identity() { return IsometryT(); }

  /// Hyperbolic element with axis (0, inf) translating towards inf by `length`.
  static IsometryT dilation(Scalar length) {
    using std::exp;
    return IsometryT(exp(length / 2), Scalar(0), Scalar(0), exp(-length / 2));
  }

  static IsometryT translation(Scalar c) { return IsometryT(Scalar(1), c, Scalar(0), Scalar(1)); }

  const Matrix& matrix() const { return m_; }
  Scalar a() const { return m_(0, 0); }
  Scalar b() const { return m_(0, 1); }
  Scalar c() const { return m_(1, 0); }
  Scalar d() const { return m_(1, 1); }

  Scalar trace() const { return m_.trace(); }
  Scalar determinant() const { return m_.determinant(); }

  IsometryT inverse() const {
    IsometryT r;
    r.m_ << d(), -b(), -c(), a();
    return r;
  }

  IsometryT operator*(const IsometryT& o) const {
    IsometryT r;
    r.m_.noalias() = m_ * o.m_;
    return r;
  }

  /// Restores det = +1 and chooses the sign with nonnegative trace.
  IsometryT& renormalize() {
    fix_determinant();
    if (m_.trace() < Scalar(0)) m_ = -m_;
    return *this;
  }

  Point apply(const Point& z) const { return (a() * z + b()) / (c() * z + d()); }

  Boundary apply(const Boundary& p) const {
    if (p.infinite) {
      if (c() == Scalar(0)) return Boundary::infinity();
      return Boundary::at(a() / c());
    }
    const Scalar den = c() * p.x + d();
    if (den == Scalar(0)) return Boundary::infinity();
    return Boundary::at((a() * p.x + b()) / den);
  }

 private:
  void fix_determinant() {
    // ad - bc via fma; entries of long products are large and plain cancellation loses the sign
    using std::fma;
    const Scalar w = m_(0, 1) * m_(1, 0);
    const Scalar det = fma(m_(0, 0), m_(1, 1), -w) + fma(-m_(0, 1), m_(1, 0), w);
    if (!(det > Scalar(0))) {
      // det of a product with huge entries is pure roundoff; the product is unimodular anyway
      const Scalar big = m_.cwiseAbs().maxCoeff();
      if (big * big * Scalar(1e-13) > Scalar(1)) return;
    }
    if (!(det > Scalar(0))) throw Error(ErrorKind::InadmissibleParams, "isometry with non-positive determinant");
    using std::sqrt;
    m_ /= sqrt(det);
  }

  Matrix m_;
};

/// Oriented complete geodesic, `from` -> `to`.
template <typename Scalar>
struct GeodesicLineT {
  BoundaryPointT<Scalar> from;
  BoundaryPointT<Scalar> to;

  GeodesicLineT reversed() const { return {to, from}; }
};

/// Horoball boundary: Euclidean diameter for a finite base, height for base inf.
template <typename Scalar>
struct HorocycleT {
  BoundaryPointT<Scalar> base;
  Scalar size = Scalar(1);
};

template <typename Scalar>
struct PerpendicularT {
  Scalar length;
  std::complex<Scalar> foot1;
  std::complex<Scalar> foot2;
};

/// Quantities of the unfolded half-pants hexagon and its left pentagon.
template <typename Scalar>
struct HexagonUnfoldT {
  Scalar alpha_len;
  Scalar eta_len;
  Scalar h;
  Scalar x;
  Scalar y;
  Scalar psi;
  Scalar phi;
};

namespace detail {
template <typename Scalar>
constexpr Scalar class_tol() {
  return Scalar(1e-9);
}
}  // namespace detail

template <typename Scalar>
IsometryClass classify(const IsometryT<Scalar>& m, Scalar tol = detail::class_tol<Scalar>()) {
  using std::abs;
  const Scalar t = abs(m.trace());
  if (abs(t - Scalar(2)) <= tol) {
    const Scalar off = abs(m.b()) + abs(m.c()) + abs(m.a() - m.d());
    return off <= tol ? IsometryClass::Identity : IsometryClass::Parabolic;
  }
  return t > Scalar(2) ? IsometryClass::Hyperbolic : IsometryClass::Elliptic;
}

template <typename Scalar>
Scalar translation_length(const IsometryT<Scalar>& m) {
  if (classify(m) != IsometryClass::Hyperbolic) throw Error(ErrorKind::NotHyperbolic, "translation_length: element is not hyperbolic");
  using std::abs;
  using std::acosh;
  return Scalar(2) * acosh(abs(m.trace()) / Scalar(2));
}

/// Fixed points of a hyperbolic element, ordered repelling -> attracting.
template <typename Scalar>
GeodesicLineT<Scalar> axis(const IsometryT<Scalar>& m) {
  if (classify(m) != IsometryClass::Hyperbolic) throw Error(ErrorKind::NotHyperbolic, "axis: element is not hyperbolic");
  using B = BoundaryPointT<Scalar>;
  using std::abs;
  using std::sqrt;
  const Scalar a = m.a(), b = m.b(), c = m.c(), d = m.d();
  if (c == Scalar(0)) {
    const B finite = B::at(b / (d - a));
    // z -> (a/d) z + b/d, inf attracts when |a| > |d|
    return abs(a) > abs(d) ? GeodesicLineT<Scalar>{finite, B::infinity()} : GeodesicLineT<Scalar>{B::infinity(), finite};
  }
  const Scalar p = d - a;
  const Scalar disc = sqrt(p * p + Scalar(4) * b * c);
  // roots of c z^2 + (d - a) z - b = 0, written to avoid cancellation
  const Scalar q = p >= Scalar(0) ? -(p + disc) / Scalar(2) : -(p - disc) / Scalar(2);
  const Scalar r1 = q / c;
  const Scalar r2 = -b / q;
  // derivative at a fixed point z is 1 / (c z + d)^2
  const bool r1_attracting = abs(c * r1 + d) > Scalar(1);
  return r1_attracting ? GeodesicLineT<Scalar>{B::at(r2), B::at(r1)} : GeodesicLineT<Scalar>{B::at(r1), B::at(r2)};
}

/// Fixed point of a parabolic element.
template <typename Scalar>
BoundaryPointT<Scalar> parabolic_fixed_point(const IsometryT<Scalar>& m) {
  using B = BoundaryPointT<Scalar>;
  using std::abs;
  if (abs(m.c()) <= Scalar(1e-14) * (abs(m.a()) + abs(m.b()) + abs(m.d()))) return B::infinity();
  return B::at((m.a() - m.d()) / (Scalar(2) * m.c()));
}

/// Isometry sending line.from -> 0 and line.to -> inf. Left of the line maps to Re < 0.
template <typename Scalar>
IsometryT<Scalar> standard_frame(const GeodesicLineT<Scalar>& line) {
  const auto& p = line.from;
  const auto& q = line.to;
  if (p.infinite && q.infinite) throw Error(ErrorKind::InadmissibleParams, "degenerate geodesic");
  if (q.infinite) return IsometryT<Scalar>(Scalar(1), -p.x, Scalar(0), Scalar(1));
  if (p.infinite) return IsometryT<Scalar>(Scalar(0), Scalar(-1), Scalar(1), -q.x);
  if (p.x > q.x) return IsometryT<Scalar>(Scalar(1), -p.x, Scalar(1), -q.x);
  if (p.x < q.x) return IsometryT<Scalar>(Scalar(-1), p.x, Scalar(1), -q.x);
  throw Error(ErrorKind::InadmissibleParams, "degenerate geodesic");
}

template <typename Scalar>
GeodesicLineT<Scalar> apply(const IsometryT<Scalar>& m, const GeodesicLineT<Scalar>& g) {
  return {m.apply(g.from), m.apply(g.to)};
}

template <typename Scalar>
Scalar point_distance(const std::complex<Scalar>& z, const std::complex<Scalar>& w) {
  using std::acosh;
  using std::norm;
  return acosh(Scalar(1) + norm(z - w) / (Scalar(2) * z.imag() * w.imag()));
}

/// Signed distance from z to the line; positive on the right of the orientation.
template <typename Scalar>
Scalar signed_distance_to_line(const std::complex<Scalar>& z, const GeodesicLineT<Scalar>& line) {
  using std::asinh;
  const auto w = standard_frame(line).apply(z);
  return asinh(w.real() / w.imag());
}

template <typename Scalar>
PerpendicularT<Scalar> common_perpendicular(const GeodesicLineT<Scalar>& g1, const GeodesicLineT<Scalar>& g2) {
  const Scalar tol = Scalar(1e-13);
  if (g1.from.same_as(g2.from, tol) || g1.from.same_as(g2.to, tol) || g1.to.same_as(g2.from, tol) ||
      g1.to.same_as(g2.to, tol))
    throw Error(ErrorKind::Asymptotic, "common_perpendicular: lines share an endpoint");
  const auto frame = standard_frame(g1);
  const auto u_pt = frame.apply(g2.from);
  const auto v_pt = frame.apply(g2.to);
  if (u_pt.infinite || v_pt.infinite) throw Error(ErrorKind::Asymptotic, "common_perpendicular: lines share an endpoint");
  const Scalar u = u_pt.x, v = v_pt.x;
  if (u * v <= Scalar(0)) throw Error(ErrorKind::Intersecting, "common_perpendicular: lines intersect");
  using std::abs;
  using std::acosh;
  using std::log;
  using std::sqrt;
  const Scalar uv = u * v;
  const Scalar m = (u + v) / Scalar(2);
  const Scalar len = acosh(abs(u + v) / abs(v - u));
  const std::complex<Scalar> f1(Scalar(0), sqrt(uv));
  const Scalar fx = uv / m;
  const std::complex<Scalar> f2(fx, sqrt(std::max(uv - fx * fx, Scalar(0))));
  const auto inv = frame.inverse();
  return {len, inv.apply(f1), inv.apply(f2)};
}

/// Horoball through `h` as the image of {Im z > height} under the returned map.
template <typename Scalar>
std::pair<IsometryT<Scalar>, Scalar> horoball_chart(const HorocycleT<Scalar>& h) {
  if (h.base.infinite) return {IsometryT<Scalar>::identity(), h.size};
  return {IsometryT<Scalar>(h.base.x, Scalar(-1), Scalar(1), Scalar(0)), Scalar(1) / h.size};
}

template <typename Scalar>
HorocycleT<Scalar> apply(const IsometryT<Scalar>& m, const HorocycleT<Scalar>& h) {
  using B = BoundaryPointT<Scalar>;
  const auto [chart, height] = horoball_chart(h);
  const auto k = m * chart;
  using std::abs;
  if (abs(k.c()) <= Scalar(1e-15) * (abs(k.a()) + abs(k.d()))) return {B::infinity(), k.a() * k.a() * height};
  return {B::at(k.a() / k.c()), Scalar(1) / (k.c() * k.c() * height)};
}

/// Signed length of the geodesic segment between two horoballs.
template <typename Scalar>
Scalar horoball_ortholength(const HorocycleT<Scalar>& h1, const HorocycleT<Scalar>& h2) {
  if (h1.base.same_as(h2.base, Scalar(1e-14))) throw Error(ErrorKind::SameBase, "horoball_ortholength: horoballs share a base point");
  if (!(h1.size > Scalar(0)) || !(h2.size > Scalar(0))) throw Error(ErrorKind::NonPositiveLength, "horocycle size must be positive");
  using std::log;
  if (h1.base.infinite) return log(h1.size / h2.size);
  if (h2.base.infinite) return log(h2.size / h1.size);
  const Scalar dx = h2.base.x - h1.base.x;
  return log(dx * dx / (h1.size * h2.size));
}

template <typename Scalar>
Scalar collar_halfwidth(Scalar len) {
  if (!(len > Scalar(0))) throw Error(ErrorKind::NonPositiveLength, "collar_halfwidth: length must be positive");
  using std::asinh;
  using std::sinh;
  return asinh(Scalar(1) / sinh(len / Scalar(2)));
}

template <typename Scalar>
Scalar collar_boundary_length(Scalar len) {
  if (!(len > Scalar(0))) throw Error(ErrorKind::NonPositiveLength, "collar_boundary_length: length must be positive");
  using std::tanh;
  // len * coth(len/2), with the series near zero
  if (len < Scalar(1e-4)) return Scalar(2) + len * len / Scalar(6);
  return len / tanh(len / Scalar(2));
}

/// Builds the unfolded hexagon from the lengths of alpha and eta.
template <typename Scalar>
HexagonUnfoldT<Scalar> hexagon_unfold(Scalar alpha, Scalar eta) {
  if (!(alpha > Scalar(0)) || !(eta > Scalar(0))) throw Error(ErrorKind::NonPositiveLength, "hexagon_unfold: lengths must be positive");
  using std::asinh;
  using std::cosh;
  using std::log;
  using std::sinh;
  using std::tanh;
  HexagonUnfoldT<Scalar> hex{};
  hex.alpha_len = alpha;
  hex.eta_len = eta;
  const Scalar ca = cosh(alpha / 2), sa = sinh(alpha / 2);
  const Scalar ce = cosh(eta / 2), se = sinh(eta / 2);
  hex.h = asinh(ce / sa);
  hex.y = asinh(Scalar(1) / sinh(hex.h));
  hex.x = asinh(ca / se) - hex.y;
  hex.phi = -Scalar(2) * log(tanh(eta / 2));
  hex.psi = hex.x - hex.phi / Scalar(2);
  return hex;
}

using BoundaryPoint = BoundaryPointT<double>;
using Isometry = IsometryT<double>;
using GeodesicLine = GeodesicLineT<double>;
using Horocycle = HorocycleT<double>;
using Perpendicular = PerpendicularT<double>;
using HexagonUnfold = HexagonUnfoldT<double>;
using Point = std::complex<double>;

}  // namespace orthospec
