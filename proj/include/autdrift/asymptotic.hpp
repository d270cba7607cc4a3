#pragma once

// Asymptotic pairs, calibration, the induced action on calibrated pairs and
// the drift cocycle c(φ, (x, y)) = M(φx, φy).

#include <algorithm>
#include <string>
#include <utility>

#include "autdrift/automorphism.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

// Two points with x_n = y_n for n < m_index and x_{m_index} != y_{m_index}.
class AsymptoticPair {
 public:
  AsymptoticPair(Point x, Point y) : x_(std::move(x)), y_(std::move(y)) {
    const Difference d = first_difference(x_, y_);
    switch (d.kind()) {
      case Difference::Kind::equal:
        throw NotAPairError("points are equal");
      case Difference::Kind::not_asymptotic:
        throw NotAsymptoticError("points differ infinitely often to the left");
      case Difference::Kind::at:
        m_ = d.index();
    }
  }

  const Point& x() const noexcept { return x_; }
  const Point& y() const noexcept { return y_; }
  Coord m_index() const noexcept { return m_; }

  friend bool operator==(const AsymptoticPair&, const AsymptoticPair&) = default;
  friend auto operator<=>(const AsymptoticPair& a, const AsymptoticPair& b) {
    if (auto c = a.x_ <=> b.x_; c != 0) return c;
    return a.y_ <=> b.y_;
  }

 private:
  Point x_;
  Point y_;
  Coord m_ = 0;
};

// An element of CA(Σ): an asymptotic pair with first difference at 0.
class CalibratedPair {
 public:
  CalibratedPair(Point x, Point y) : pair_(std::move(x), std::move(y)) {
    if (pair_.m_index() != 0)
      throw InputError("pair is not calibrated (first difference at " +
                       std::to_string(pair_.m_index()) + ")");
  }
  explicit CalibratedPair(AsymptoticPair p) : pair_(std::move(p)) {
    if (pair_.m_index() != 0) throw InputError("pair is not calibrated");
  }

  const Point& x() const noexcept { return pair_.x(); }
  const Point& y() const noexcept { return pair_.y(); }
  const AsymptoticPair& pair() const noexcept { return pair_; }

  friend bool operator==(const CalibratedPair&, const CalibratedPair&) = default;
  friend auto operator<=>(const CalibratedPair& a, const CalibratedPair& b) { return a.pair_ <=> b.pair_; }

 private:
  AsymptoticPair pair_;
};

inline AsymptoticPair make_pair(const Point& x, const Point& y) { return AsymptoticPair(x, y); }

// C(x, y) = (σ^{-M} x, σ^{-M} y).
inline CalibratedPair calibrate(const AsymptoticPair& p) {
  const Coord m = p.m_index();
  if (m == 0) return CalibratedPair(p);
  return CalibratedPair(shift_point(p.x(), -m), shift_point(p.y(), -m));
}

// B = max(k, k′).
inline Coord cocycle_bound(const Automorphism& a) {
  return std::max(a.forward().memory(), a.inverse().memory());
}

// Coordinates [-m, m] of act(a, p) depend only on coordinates [-m-b, m+b] of p.
inline Coord locality_radius(const Automorphism& a) { return a.forward().memory() + cocycle_bound(a); }

namespace detail {

// min{m in [-B, B] : [φx]_m != [φy]_m}; the images agree left of -k_fwd
// because the input pair is calibrated.
inline Coord bounded_scan(const Automorphism& a, const Point& fx, const Point& fy) {
  const Coord b = cocycle_bound(a);
  for (Coord m = -b; m <= b; ++m)
    if (fx.at(m) != fy.at(m)) return m;
  throw InvariantViolation("automorphism '" + a.label() + "': images agree on [-" + std::to_string(b) +
                           ", " + std::to_string(b) + "]; not a valid automorphism pair");
}

}  // namespace detail

inline Coord drift_cocycle(const Automorphism& a, const CalibratedPair& p) {
  return detail::bounded_scan(a, apply_to_point(a, p.x()), apply_to_point(a, p.y()));
}

// φ̂(x, y) = C(φx, φy).
inline CalibratedPair act(const Automorphism& a, const CalibratedPair& p) {
  Point fx = apply_to_point(a, p.x());
  Point fy = apply_to_point(a, p.y());
  const Coord m = detail::bounded_scan(a, fx, fy);
  return CalibratedPair(shift_point(fx, -m), shift_point(fy, -m));
}

// act and drift_cocycle in one pass.
inline std::pair<CalibratedPair, Coord> act_with_cocycle(const Automorphism& a, const CalibratedPair& p) {
  Point fx = apply_to_point(a, p.x());
  Point fy = apply_to_point(a, p.y());
  const Coord m = detail::bounded_scan(a, fx, fy);
  return {CalibratedPair(shift_point(fx, -m), shift_point(fy, -m)), m};
}

}  // namespace autdrift
