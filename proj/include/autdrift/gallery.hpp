#pragma once

// Worked examples: the sunny-side-up shift S, products Σ × S, the
// embedding of the topological full group of Σ into Aut(Σ × S) and the
// orbit-cocycle expectation identity.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "autdrift/asymptotic.hpp"
#include "autdrift/automorphism.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/measure.hpp"
#include "autdrift/rational.hpp"
#include "autdrift/shift_space.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

struct SpaceWithFamily {
  ShiftSpacePtr space;
  CAFamilyPtr family;
};

inline Alphabet binary_alphabet() { return Alphabet({"0", "1"}); }

// x̄: a single 1 at coordinate 0.
inline Point sunny_point() { return Point::finite(0, {1}, 0); }
// z̄: all zeros.
inline Point zero_point() { return Point::constant(0); }

inline ShiftSpacePtr sunny_side_up_space() {
  return std::make_shared<const ShiftSpace>(ShiftSpace::orbit_closure("S", binary_alphabet(), {sunny_point()}));
}

// All left-agreeing pairs of S: the diagonal, (σ^i x̄, σ^j x̄) for i, j ≥ 0,
// and (σ^j x̄, z̄), (z̄, σ^j x̄) for j ≥ 0. Its calibrated part is
// {(x̄, z̄), (z̄, x̄)} ∪ {(x̄, σ^d x̄), (σ^d x̄, x̄) : d ≥ 1}.
inline std::vector<Schema> sunny_side_up_schemas() {
  const PointTemplate shifts{sunny_point(), ShiftRange{0, std::nullopt}};
  const PointTemplate zero{zero_point(), std::nullopt};
  return {DiagonalSchema{}, PairSchema{shifts, shifts}, PairSchema{shifts, zero}, PairSchema{zero, shifts}};
}

inline SpaceWithFamily sunny_side_up() {
  auto s = sunny_side_up_space();
  auto f = std::make_shared<const CAFamily>(CAFamily::leaf("CA_S", s, sunny_side_up_schemas()));
  return {s, f};
}

// Only (x̄, z̄) and (z̄, x̄). A proper subfamily of CA(S).
inline CAFamilyPtr sunny_side_up_two_pair_family(ShiftSpacePtr s = sunny_side_up_space()) {
  const PointTemplate x{sunny_point(), std::nullopt};
  const PointTemplate z{zero_point(), std::nullopt};
  return std::make_shared<const CAFamily>(
      CAFamily::leaf("two_pair_S", std::move(s), {PairSchema{x, z}, PairSchema{z, x}}));
}

// The orbit {(01)^∞, (10)^∞}.
inline ShiftSpacePtr period_two_orbit() {
  return std::make_shared<const ShiftSpace>(
      ShiftSpace::orbit_closure("P2", binary_alphabet(), {Point::periodic({0, 1})}));
}

inline ShiftSpacePtr full_shift(const Alphabet& alphabet, std::string name = "full") {
  SoficAutomaton a;
  a.states = {"q"};
  for (std::size_t s = 0; s < alphabet.size(); ++s) a.edges.push_back({0, static_cast<Symbol>(s), 0});
  return std::make_shared<const ShiftSpace>(ShiftSpace::sofic(std::move(name), alphabet, std::move(a)));
}

inline CAFamilyPtr diagonal_family(ShiftSpacePtr s) {
  std::string name = "diag_" + s->name();
  return std::make_shared<const CAFamily>(CAFamily::leaf(std::move(name), std::move(s), {DiagonalSchema{}}));
}

// Σ × S. Without a base family the base component ranges over the diagonal
// of Σ, which yields the pairs ((y, ·), (y, ·)); with one, base differences
// are included as well.
inline SpaceWithFamily product_with_s(ShiftSpacePtr base, CAFamilyPtr base_family = nullptr) {
  if (base_family && base_family->space().get() != base.get() &&
      !(base_family->space()->alphabet() == base->alphabet()))
    throw InputError("product_with_s: base family is over a different space");
  auto sunny = sunny_side_up();
  auto space = std::make_shared<const ShiftSpace>(ShiftSpace::product(base->name() + "xS", base, sunny.space));
  if (!base_family) base_family = diagonal_family(base);
  auto family = std::make_shared<const CAFamily>(
      CAFamily::product("CA_" + space->name(), base_family, sunny.family, space));
  return {space, family};
}

// ---------------------------------------------------------------------------
// Orbit cocycles

// N: A^{2r+1} → ℤ read on the window y_{-r..r}. The embedding moves the S
// marker of (y, σ^m x̄) from m to m + N(σ^{-m} y).
class OrbitCocycle {
 public:
  using Rule = std::function<int(std::span<const Symbol>)>;

  OrbitCocycle(std::string name, Alphabet alphabet, Coord radius, std::vector<int> table)
      : name_(std::move(name)), alphabet_(std::move(alphabet)), radius_(radius), table_(std::move(table)) {
    if (radius < 0) throw InputError("cocycle radius must be non-negative");
    if (table_.size() != BlockMap::table_size(alphabet_.size(), radius))
      throw InputError("cocycle table has wrong size");
    for (int v : table_) max_abs_ = std::max<Coord>(max_abs_, std::abs(v));
  }

  static OrbitCocycle from_rule(std::string name, Alphabet alphabet, Coord radius, const Rule& rule) {
    const std::size_t n = BlockMap::table_size(alphabet.size(), radius);
    std::vector<int> table(n);
    Word w(static_cast<std::size_t>(2 * radius + 1));
    for (std::size_t i = 0; i < n; ++i) {
      BlockMap::decode(i, alphabet.size(), w);
      table[i] = rule(w);
    }
    return OrbitCocycle(std::move(name), std::move(alphabet), radius, std::move(table));
  }

  const std::string& name() const noexcept { return name_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Coord radius() const noexcept { return radius_; }
  Coord max_abs() const noexcept { return max_abs_; }
  const std::vector<int>& table() const noexcept { return table_; }

  int operator()(std::span<const Symbol> window) const {
    std::size_t idx = 0;
    for (Symbol s : window) idx = idx * alphabet_.size() + s;
    return table_[idx];
  }

  // N(σ^{-m} y): the rule read on y_{m-r..m+r}.
  int at(const Point& y, Coord m) const { return (*this)(window(y, m - radius_, m + radius_)); }

  friend bool operator==(const OrbitCocycle& a, const OrbitCocycle& b) {
    return a.alphabet_ == b.alphabet_ && a.radius_ == b.radius_ && a.table_ == b.table_;
  }

 private:
  std::string name_;
  Alphabet alphabet_;
  Coord radius_;
  std::vector<int> table_;
  Coord max_abs_ = 0;
};

inline OrbitCocycle constant_cocycle(const Alphabet& alphabet, int value) {
  return OrbitCocycle::from_rule("const" + std::to_string(value), alphabet, 0,
                                 [value](std::span<const Symbol>) { return value; });
}

// On the period-two orbit: +1 where y_0 = 0, −1 where y_0 = 1.
inline OrbitCocycle period_two_flip_cocycle() {
  return OrbitCocycle::from_rule("flip", binary_alphabet(), 0,
                                 [](std::span<const Symbol> w) { return w[0] == 0 ? 1 : -1; });
}

// On S: swaps the marker positions 0 and 1 along the orbit of x̄ (m ↦ m + N(σ^{-m} y)).
inline OrbitCocycle sunny_transposition_cocycle() {
  return OrbitCocycle::from_rule("transpose", binary_alphabet(), 1, [](std::span<const Symbol> w) {
    if (w[1] == 1) return 1;
    if (w[0] == 1) return -1;
    return 0;
  });
}

// N3 with embed(N3) = embed(N1) ∘ embed(N2): the marker moves m ↦ m + N2
// and then by N1 read at the new position, so N3(y) = N2(y) + N1(σ^{-N2(y)} y).
inline OrbitCocycle compose_orbit_cocycles(const OrbitCocycle& n1, const OrbitCocycle& n2) {
  if (!(n1.alphabet() == n2.alphabet())) throw InputError("compose cocycles: alphabet mismatch");
  const Coord r = n2.radius() + n2.max_abs() + n1.radius();
  const Coord r1 = n1.radius(), r2 = n2.radius();
  return OrbitCocycle::from_rule(n1.name() + "*" + n2.name(), n1.alphabet(), r, [&](std::span<const Symbol> w) {
    const int a = n2(w.subspan(static_cast<std::size_t>(r - r2), static_cast<std::size_t>(2 * r2 + 1)));
    // [σ^{-a} y]_n = y_{n+a}: the window of σ^{-a} y around 0 sits at +a.
    const Coord c = r + a;
    return a + n1(w.subspan(static_cast<std::size_t>(c - r1), static_cast<std::size_t>(2 * r1 + 1)));
  });
}

namespace detail {

// For every y in the base, m ↦ m + N(σ^{-m} y) must be a bijection of ℤ.
// Collisions and gaps are visible on windows of radius r + K, so it is
// enough to test one point per such window over a range that covers the
// non-periodic part plus full periods of both tails.
inline std::optional<std::string> orbit_bijection_failure(const ShiftSpace& base, const OrbitCocycle& n) {
  const Coord k = n.max_abs();
  const Coord r = n.radius();
  for (const auto& y : window_points(base, r + k)) {
    const Coord lo = y.left_bound() - r - 2 * k - 2 * y.left_period() - 2;
    const Coord hi = y.right_start() + r + 2 * k + 2 * y.right_period() + 2;
    std::set<Coord> images;
    for (Coord m = lo - k; m <= hi + k; ++m) {
      if (!images.insert(m + n.at(y, m)).second)
        return "orbit cocycle '" + n.name() + "' is not injective on " + format_point(y, base.alphabet());
    }
    for (Coord j = lo; j <= hi; ++j)
      if (!images.count(j))
        return "orbit cocycle '" + n.name() + "' is not surjective on " + format_point(y, base.alphabet());
  }
  return std::nullopt;
}

}  // namespace detail

// φ̄(y, σ^m x̄) = (y, σ^{m + N(σ^{-m} y)} x̄), φ̄(y, z̄) = (y, z̄), as a block
// map pair on Σ × S with memory r + max|N|.
inline Automorphism embed_full_group(const ShiftSpace& base, const OrbitCocycle& n) {
  if (!(n.alphabet() == base.alphabet())) throw InputError("embed: cocycle alphabet differs from base");
  if (auto failure = detail::orbit_bijection_failure(base, n)) throw InputError("invalid orbit cocycle: " + *failure);
  const Alphabet product = Alphabet::product(base.alphabet(), binary_alphabet());
  const Coord r = n.radius();
  const Coord kk = n.max_abs();
  const Coord mem = r + kk;
  const std::size_t q = product.size();
  auto base_window = [&](std::span<const Symbol> w, Coord centre) {
    Word b(static_cast<std::size_t>(2 * r + 1));
    for (Coord i = -r; i <= r; ++i) b[static_cast<std::size_t>(i + r)] = product.unpack(w[static_cast<std::size_t>(centre + i)]).first;
    return b;
  };
  auto bit = [&](std::span<const Symbol> w, Coord pos) { return product.unpack(w[static_cast<std::size_t>(pos)]).second; };
  // Window index mem is coordinate j; index mem - d is coordinate j - d.
  auto fwd = BlockMap::from_rule(q, mem, [&](std::span<const Symbol> w) {
    Symbol out = 0;
    for (Coord d = -kk; d <= kk; ++d) {
      const Coord pos = mem - d;
      if (bit(w, pos) == 1 && n(base_window(w, pos)) == d) out = 1;
    }
    return product.pack(product.unpack(w[static_cast<std::size_t>(mem)]).first, out);
  });
  auto inv = BlockMap::from_rule(q, mem, [&](std::span<const Symbol> w) {
    const int d = n(base_window(w, mem));
    return product.pack(product.unpack(w[static_cast<std::size_t>(mem)]).first, bit(w, mem + d));
  });
  return Automorphism("embed(" + n.name() + ")", std::move(fwd), std::move(inv));
}

// ---------------------------------------------------------------------------
// Base measures and the expectation identity

class BaseMeasure {
 public:
  BaseMeasure(std::vector<Point> support, std::vector<Rational> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty() || support_.size() != weights_.size())
      throw InputError("base measure: support and weights must be non-empty and aligned");
    Rational total = 0;
    for (const auto& w : weights_) {
      if (w < 0) throw InputError("base measure: negative weight");
      total += w;
    }
    if (total != 1) throw InputError("base measure: weights sum to " + format_exact(total) + ", not 1");
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const Point s = shift_point(support_[i], 1);
      auto it = std::find(support_.begin(), support_.end(), s);
      if (it == support_.end() || weights_[static_cast<std::size_t>(it - support_.begin())] != weights_[i])
        throw InputError("base measure is not shift invariant");
    }
  }

  static BaseMeasure uniform(std::vector<Point> support) {
    std::vector<Rational> w(support.size(), Rational(1, static_cast<std::int64_t>(support.size())));
    return BaseMeasure(std::move(support), std::move(w));
  }

  const std::vector<Point>& support() const noexcept { return support_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }

 private:
  std::vector<Point> support_;
  std::vector<Rational> weights_;
};

// Uniform measure on the period-two orbit.
inline BaseMeasure period_two_uniform() {
  const Point a = Point::periodic({0, 1});
  return BaseMeasure::uniform({a, shift_point(a, 1)});
}

// E_μ[N].
inline Rational orbit_cocycle_expectation(const BaseMeasure& mu, const OrbitCocycle& n) {
  Rational e = 0;
  for (std::size_t i = 0; i < mu.support().size(); ++i) e += mu.weights()[i] * n.at(mu.support()[i], 0);
  return e;
}

// E_μ[c(φ̄, ((y, x̄), (y, z̄)))] over the schema pairs.
inline Rational full_group_drift(const BaseMeasure& mu, const Automorphism& phibar, const Alphabet& base_alphabet) {
  const Alphabet product = Alphabet::product(base_alphabet, binary_alphabet());
  Rational e = 0;
  for (std::size_t i = 0; i < mu.support().size(); ++i) {
    const Point& y = mu.support()[i];
    const CalibratedPair p(zip_points(y, sunny_point(), product), zip_points(y, zero_point(), product));
    e += mu.weights()[i] * drift_cocycle(phibar, p);
  }
  return e;
}

}  // namespace autdrift
