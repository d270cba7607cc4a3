#pragma once

// Symbols, words, eventually periodic tails and bi-infinite points.
//
// A Point is stored in canonical form: the right tail is the maximal purely
// periodic suffix with minimal period, everything to its left is folded into
// the left tail (minimal period, minimal preperiod) and the core is empty.
// Globally periodic points are pinned at origin 0. Two points are equal iff
// their symbol functions agree, and equality is structural.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autdrift/errors.hpp"

namespace autdrift {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using Coord = std::int64_t;

inline constexpr std::size_t kMaxAlphabetSize = 256;

class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw InputError("alphabet must be non-empty");
    if (names_.size() > kMaxAlphabetSize) throw InputError("alphabet larger than 256 symbols");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const auto& n = names_[i];
      if (n.empty()) throw InputError("empty symbol name");
      for (char c : n) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '|' || c == '<' ||
            c == '>' || c == '@' || c == '^' || c == ';' || c == '*' || c == '#')
          throw InputError("symbol name '" + n + "' contains a reserved character");
      }
      if (!index_.emplace(n, static_cast<Symbol>(i)).second)
        throw InputError("duplicate symbol '" + n + "'");
    }
  }

  // Cartesian product; atom (a,b) is named "a:b" and has index a*|rhs|+b.
  static Alphabet product(const Alphabet& lhs, const Alphabet& rhs) {
    std::vector<std::string> names;
    names.reserve(lhs.size() * rhs.size());
    for (const auto& a : lhs.names_)
      for (const auto& b : rhs.names_) names.push_back(a + ":" + b);
    Alphabet out(std::move(names));
    out.factors_ = std::make_shared<const std::pair<Alphabet, Alphabet>>(lhs, rhs);
    return out;
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(Symbol s) const { return names_.at(s); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  Symbol symbol(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw InputError("symbol '" + std::string(name) + "' not in alphabet");
    return it->second;
  }

  bool contains(Symbol s) const noexcept { return s < names_.size(); }

  bool is_product() const noexcept { return factors_ != nullptr; }
  const Alphabet& first_factor() const { return require_factors().first; }
  const Alphabet& second_factor() const { return require_factors().second; }

  Symbol pack(Symbol a, Symbol b) const {
    return static_cast<Symbol>(a * second_factor().size() + b);
  }
  std::pair<Symbol, Symbol> unpack(Symbol s) const {
    const auto n = second_factor().size();
    return {static_cast<Symbol>(s / n), static_cast<Symbol>(s % n)};
  }

  std::string format_word(const Word& w) const {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out += ',';
      out += name(w[i]);
    }
    return out;
  }

  // Compact rendering for single-character alphabets (e.g. "00100").
  std::string format_compact(const Word& w) const {
    bool single = std::all_of(names_.begin(), names_.end(),
                              [](const std::string& n) { return n.size() == 1; });
    if (!single) return format_word(w);
    std::string out;
    for (Symbol s : w) out += name(s);
    return out;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.names_ == b.names_; }

 private:
  const std::pair<Alphabet, Alphabet>& require_factors() const {
    if (!factors_) throw InputError("alphabet is not a product");
    return *factors_;
  }

  std::vector<std::string> names_;
  std::map<std::string, Symbol, std::less<>> index_;
  std::shared_ptr<const std::pair<Alphabet, Alphabet>> factors_;
};

namespace detail {

inline Coord floor_mod(Coord a, Coord m) {
  Coord r = a % m;
  return r < 0 ? r + m : r;
}

// Length of the primitive root of w (smallest d with w = u^(|w|/d)).
inline std::size_t primitive_root_length(const Word& w) {
  const std::size_t n = w.size();
  if (n == 0) return 0;
  std::vector<std::size_t> fail(n + 1, 0);
  for (std::size_t i = 1, k = 0; i < n; ++i) {
    while (k > 0 && w[i] != w[k]) k = fail[k];
    if (w[i] == w[k]) ++k;
    fail[i + 1] = k;
  }
  const std::size_t p = n - fail[n];
  return n % p == 0 ? p : n;
}

inline Coord lcm(Coord a, Coord b) { return std::lcm(a, b); }

}  // namespace detail

// One-sided eventually periodic stream preperiod·period·period·…, read away
// from the core.
class Tail {
 public:
  Tail() : period_{0} {}

  Tail(Word preperiod, Word period) : pre_(std::move(preperiod)), period_(std::move(period)) {
    if (period_.empty()) throw InputError("tail period must be non-empty");
    canonicalize();
  }

  const Word& preperiod() const noexcept { return pre_; }
  const Word& period() const noexcept { return period_; }

  Symbol at(std::size_t d) const {
    if (d < pre_.size()) return pre_[d];
    return period_[(d - pre_.size()) % period_.size()];
  }

  friend auto operator<=>(const Tail&, const Tail&) = default;
  friend bool operator==(const Tail&, const Tail&) = default;

 private:
  void canonicalize() {
    period_.resize(detail::primitive_root_length(period_));
    while (!pre_.empty() && pre_.back() == period_.back()) {
      pre_.pop_back();
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    }
  }

  Word pre_;
  Word period_;
};

// A bi-infinite point with eventually periodic tails in both directions.
class Point {
 public:
  Point() : Point(Tail({}, {0}), {}, Tail({}, {0}), 0) {}

  // Any presentation is accepted; the stored form is canonical.
  Point(Tail left, Word core, Tail right, Coord origin)
      : left_(std::move(left)), core_(std::move(core)), right_(std::move(right)), origin_(origin) {
    canonicalize();
  }

  static Point constant(Symbol s) { return Point(Tail({}, {s}), {}, Tail({}, {s}), 0); }

  // Point with `core` starting at `origin`, and constant tails.
  static Point finite(Symbol background, Word core, Coord origin) {
    return Point(Tail({}, {background}), std::move(core), Tail({}, {background}), origin);
  }

  // Bi-infinite repetition of `period` with period[0] at coordinate 0.
  static Point periodic(const Word& period) {
    if (period.empty()) throw InputError("period must be non-empty");
    Word left(period.rbegin(), period.rend());
    return Point(Tail({}, std::move(left)), {}, Tail({}, period), 0);
  }

  Symbol at(Coord n) const {
    const Coord core_end = origin_ + static_cast<Coord>(core_.size());
    if (n >= core_end) return right_.at(static_cast<std::size_t>(n - core_end));
    if (n >= origin_) return core_[static_cast<std::size_t>(n - origin_)];
    return left_.at(static_cast<std::size_t>(origin_ - 1 - n));
  }

  const Tail& left() const noexcept { return left_; }
  const Tail& right() const noexcept { return right_; }
  const Word& core() const noexcept { return core_; }
  Coord origin() const noexcept { return origin_; }

  // x_n is left-periodic (period left().period()) for n < left_bound().
  Coord left_bound() const noexcept { return origin_ - static_cast<Coord>(left_.preperiod().size()); }
  // x_n is right-periodic for n >= right_start().
  Coord right_start() const noexcept {
    return origin_ + static_cast<Coord>(core_.size() + right_.preperiod().size());
  }
  Coord left_period() const noexcept { return static_cast<Coord>(left_.period().size()); }
  Coord right_period() const noexcept { return static_cast<Coord>(right_.period().size()); }

  // True iff the point is a bi-infinite periodic sequence.
  bool is_periodic() const noexcept { return globally_periodic_; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.origin_ == b.origin_ && a.left_ == b.left_ && a.right_ == b.right_ && a.core_ == b.core_;
  }
  friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
    if (auto c = a.origin_ <=> b.origin_; c != 0) return c;
    if (auto c = a.left_ <=> b.left_; c != 0) return c;
    if (auto c = a.right_ <=> b.right_; c != 0) return c;
    return a.core_ <=> b.core_;
  }

 private:
  void canonicalize();

  Tail left_;
  Word core_;
  Tail right_;
  Coord origin_ = 0;
  bool globally_periodic_ = false;
};

inline void Point::canonicalize() {
  const Coord p = right_period();
  const Coord pl = left_period();
  const Coord lb = left_bound();
  Coord r = right_start();
  // Walk the periodic suffix leftwards as far as it goes.
  const Coord floor = lb - p - pl - 1;
  bool global = false;
  while (at(r - 1) == at(r - 1 + p)) {
    --r;
    if (r < floor) {
      global = true;
      break;
    }
  }
  if (global) {
    Word right(static_cast<std::size_t>(p));
    Word left(static_cast<std::size_t>(p));
    for (Coord i = 0; i < p; ++i) {
      right[static_cast<std::size_t>(i)] = at(i);
      left[static_cast<std::size_t>(i)] = at(-1 - i);
    }
    left_ = Tail({}, std::move(left));
    right_ = Tail({}, std::move(right));
    core_.clear();
    origin_ = 0;
    globally_periodic_ = true;
    return;
  }
  Word right(static_cast<std::size_t>(p));
  for (Coord i = 0; i < p; ++i) right[static_cast<std::size_t>(i)] = at(r + i);
  const Coord pre_len = std::max<Coord>(0, r - lb);
  Word pre(static_cast<std::size_t>(pre_len));
  for (Coord i = 0; i < pre_len; ++i) pre[static_cast<std::size_t>(i)] = at(r - 1 - i);
  const Coord c = r - pre_len - 1;
  Word per(static_cast<std::size_t>(pl));
  for (Coord i = 0; i < pl; ++i) per[static_cast<std::size_t>(i)] = at(c - i);
  left_ = Tail(std::move(pre), std::move(per));
  right_ = Tail({}, std::move(right));
  core_.clear();
  origin_ = r;
  globally_periodic_ = false;
}

// (x_lo, …, x_hi).
inline Word window(const Point& p, Coord lo, Coord hi) {
  if (lo > hi) throw InputError("window: lo > hi");
  Word out(static_cast<std::size_t>(hi - lo + 1));
  for (Coord n = lo; n <= hi; ++n) out[static_cast<std::size_t>(n - lo)] = p.at(n);
  return out;
}

// q_n = p_{n-k}.
inline Point shift_point(const Point& p, Coord k) {
  return Point(p.left(), p.core(), p.right(), p.origin() + k);
}

class Difference {
 public:
  enum class Kind { equal, at, not_asymptotic };

  static Difference equal() { return Difference(Kind::equal, 0); }
  static Difference at_index(Coord m) { return Difference(Kind::at, m); }
  static Difference not_asymptotic() { return Difference(Kind::not_asymptotic, 0); }

  Kind kind() const noexcept { return kind_; }
  bool is_index() const noexcept { return kind_ == Kind::at; }
  Coord index() const {
    if (kind_ != Kind::at) throw InputError("difference has no index");
    return index_;
  }

  friend bool operator==(const Difference&, const Difference&) = default;

 private:
  Difference(Kind k, Coord m) : kind_(k), index_(m) {}
  Kind kind_;
  Coord index_;
};

// M(x, y) = min{m : x_m != y_m}, or `equal`, or `not_asymptotic` when the
// points differ infinitely often to the left.
inline Difference first_difference(const Point& x, const Point& y) {
  if (x == y) return Difference::equal();
  const Coord lb = std::min(x.left_bound(), y.left_bound());
  const Coord lp = detail::lcm(x.left_period(), y.left_period());
  for (Coord n = lb - lp; n < lb; ++n)
    if (x.at(n) != y.at(n)) return Difference::not_asymptotic();
  const Coord hi = std::max(x.right_start(), y.right_start()) +
                   detail::lcm(x.right_period(), y.right_period());
  for (Coord n = lb; n <= hi; ++n)
    if (x.at(n) != y.at(n)) return Difference::at_index(n);
  throw InvariantViolation("first_difference: distinct points agree on a full period");
}

// ---------------------------------------------------------------------------
// Point literals
//
//   left_pre | left_period ^omega < core @ origin > right_pre | right_period ^omega
//
// Symbols are comma-separated atom names. Every word is written in natural
// left-to-right order, so the left tail reads …(left_period)(left_period)left_pre.
// Example: the point with a single 1 at coordinate 0 is
//   |0^omega <1@0> |0^omega

namespace detail {

class LiteralReader {
 public:
  LiteralReader(std::string_view text, const Alphabet& alphabet) : s_(text), a_(alphabet) {}

  Point read() {
    auto [lpre, lper] = read_tail();
    expect('<');
    Word core = read_symbols();
    expect('@');
    Coord origin = read_int();
    expect('>');
    auto [rpre, rper] = read_tail();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    std::reverse(lpre.begin(), lpre.end());
    std::reverse(lper.begin(), lper.end());
    return Point(Tail(std::move(lpre), std::move(lper)), std::move(core),
                 Tail(std::move(rpre), std::move(rper)), origin);
  }

 private:
  std::pair<Word, Word> read_tail() {
    Word pre = read_symbols();
    expect('|');
    Word per = read_symbols();
    if (per.empty()) fail("empty tail period");
    expect('^');
    skip_ws();
    if (s_.substr(pos_, 5) != "omega") fail("expected 'omega'");
    pos_ += 5;
    return {std::move(pre), std::move(per)};
  }

  Word read_symbols() {
    Word out;
    skip_ws();
    if (pos_ < s_.size() && is_stop(s_[pos_])) return out;
    while (true) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && !is_stop(s_[pos_]) && s_[pos_] != ',' &&
             !std::isspace(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      if (start == pos_) fail("expected a symbol");
      try {
        out.push_back(a_.symbol(s_.substr(start, pos_ - start)));
      } catch (const InputError& e) {
        fail(e.what());
      }
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      return out;
    }
  }

  Coord read_int() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_ || (pos_ - start == 1 && !std::isdigit(static_cast<unsigned char>(s_[start]))))
      fail("expected an integer");
    return std::stoll(std::string(s_.substr(start, pos_ - start)));
  }

  static bool is_stop(char c) { return c == '|' || c == '<' || c == '>' || c == '@' || c == '^'; }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("point literal: " + what + " at offset " + std::to_string(pos_) + " in '" +
                         std::string(s_) + "'",
                     0, 0);
  }

  std::string_view s_;
  const Alphabet& a_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Point parse_point(std::string_view text, const Alphabet& alphabet) {
  return detail::LiteralReader(text, alphabet).read();
}

// The left preperiod is printed as part of the core, so x̄ renders as
// "|0^omega <1@0> |0^omega".
inline std::string format_point(const Point& p, const Alphabet& alphabet) {
  Word core(p.left().preperiod().rbegin(), p.left().preperiod().rend());
  core.insert(core.end(), p.core().begin(), p.core().end());
  Word lper(p.left().period().rbegin(), p.left().period().rend());
  std::string out;
  out += "|" + alphabet.format_word(lper) + "^omega <";
  out += alphabet.format_word(core) + "@" + std::to_string(p.left_bound()) + "> ";
  out += alphabet.format_word(p.right().preperiod()) + "|" +
         alphabet.format_word(p.right().period()) + "^omega";
  return out;
}

// Coordinatewise pairing of two points into a point over the product alphabet.
inline Point zip_points(const Point& a, const Point& b, const Alphabet& product) {
  const Coord lb = std::min(a.left_bound(), b.left_bound());
  const Coord rs = std::max(a.right_start(), b.right_start());
  const Coord lp = detail::lcm(a.left_period(), b.left_period());
  const Coord rp = detail::lcm(a.right_period(), b.right_period());
  Word core(static_cast<std::size_t>(rs - lb));
  for (Coord n = lb; n < rs; ++n)
    core[static_cast<std::size_t>(n - lb)] = product.pack(a.at(n), b.at(n));
  Word lper(static_cast<std::size_t>(lp));
  for (Coord i = 0; i < lp; ++i)
    lper[static_cast<std::size_t>(i)] = product.pack(a.at(lb - 1 - i), b.at(lb - 1 - i));
  Word rper(static_cast<std::size_t>(rp));
  for (Coord i = 0; i < rp; ++i)
    rper[static_cast<std::size_t>(i)] = product.pack(a.at(rs + i), b.at(rs + i));
  return Point(Tail({}, std::move(lper)), std::move(core), Tail({}, std::move(rper)), lb);
}

// Component `which` (0 or 1) of a point over a product alphabet.
inline Point project_point(const Point& p, const Alphabet& product, int which) {
  auto pick = [&](Symbol s) {
    auto [a, b] = product.unpack(s);
    return which == 0 ? a : b;
  };
  auto map_word = [&](const Word& w) {
    Word out(w.size());
    std::transform(w.begin(), w.end(), out.begin(), pick);
    return out;
  };
  return Point(Tail(map_word(p.left().preperiod()), map_word(p.left().period())), map_word(p.core()),
               Tail(map_word(p.right().preperiod()), map_word(p.right().period())), p.origin());
}

}  // namespace autdrift
