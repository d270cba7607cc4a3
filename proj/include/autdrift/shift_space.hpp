#pragma once

// Shift spaces given by a sofic automaton, by the orbit closure of finitely
// many eventually periodic points, or as a product of two spaces.

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "autdrift/errors.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

struct EnumerationCap {
  std::size_t max_length = 64;
  std::size_t max_words = 2'000'000;
};

struct SoficAutomaton {
  struct Edge {
    std::size_t from;
    Symbol label;
    std::size_t to;
    friend bool operator==(const Edge&, const Edge&) = default;
  };
  std::vector<std::string> states;
  std::vector<Edge> edges;

  friend bool operator==(const SoficAutomaton&, const SoficAutomaton&) = default;
};

struct OrbitClosure {
  std::vector<Point> generators;
  friend bool operator==(const OrbitClosure&, const OrbitClosure&) = default;
};

class ShiftSpace;

struct ProductPresentation {
  std::shared_ptr<const ShiftSpace> first;
  std::shared_ptr<const ShiftSpace> second;
  friend bool operator==(const ProductPresentation& a, const ProductPresentation& b);
};

class ShiftSpace {
 public:
  using Presentation = std::variant<SoficAutomaton, OrbitClosure, ProductPresentation>;
  using StateSet = std::uint64_t;

  // Trims the automaton to its essential part (states on a bi-infinite path).
  static ShiftSpace sofic(std::string name, Alphabet alphabet, SoficAutomaton automaton) {
    if (automaton.states.size() > 64) throw InputError("sofic automaton limited to 64 states");
    for (const auto& e : automaton.edges) {
      if (e.from >= automaton.states.size() || e.to >= automaton.states.size())
        throw InputError("edge refers to unknown state");
      if (!alphabet.contains(e.label)) throw InputError("edge label outside alphabet");
    }
    std::vector<bool> alive(automaton.states.size(), true);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t q = 0; q < alive.size(); ++q) {
        if (!alive[q]) continue;
        bool in = false, out = false;
        for (const auto& e : automaton.edges) {
          if (!alive[e.from] || !alive[e.to]) continue;
          in = in || e.to == q;
          out = out || e.from == q;
        }
        if (!in || !out) {
          alive[q] = false;
          changed = true;
        }
      }
    }
    SoficAutomaton trimmed;
    std::vector<std::size_t> remap(alive.size(), 0);
    for (std::size_t q = 0; q < alive.size(); ++q) {
      if (!alive[q]) continue;
      remap[q] = trimmed.states.size();
      trimmed.states.push_back(automaton.states[q]);
    }
    for (const auto& e : automaton.edges)
      if (alive[e.from] && alive[e.to]) trimmed.edges.push_back({remap[e.from], e.label, remap[e.to]});
    if (trimmed.states.empty()) throw InputError("sofic automaton presents the empty shift");
    ShiftSpace s(std::move(name), std::move(alphabet), std::move(trimmed));
    return s;
  }

  static ShiftSpace orbit_closure(std::string name, Alphabet alphabet, std::vector<Point> generators) {
    if (generators.empty()) throw InputError("orbit closure needs at least one generator");
    for (const auto& g : generators) check_point_symbols(g, alphabet);
    return ShiftSpace(std::move(name), std::move(alphabet), OrbitClosure{std::move(generators)});
  }

  static ShiftSpace product(std::string name, std::shared_ptr<const ShiftSpace> first,
                            std::shared_ptr<const ShiftSpace> second) {
    Alphabet a = Alphabet::product(first->alphabet(), second->alphabet());
    return ShiftSpace(std::move(name), std::move(a),
                      ProductPresentation{std::move(first), std::move(second)});
  }

  const std::string& name() const noexcept { return name_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Presentation& presentation() const noexcept { return presentation_; }

  const SoficAutomaton* as_sofic() const { return std::get_if<SoficAutomaton>(&presentation_); }
  const OrbitClosure* as_orbit_closure() const { return std::get_if<OrbitClosure>(&presentation_); }
  const ProductPresentation* as_product() const {
    return std::get_if<ProductPresentation>(&presentation_);
  }

  // Presentation-level zero-entropy certificate: orbit closures of eventually
  // periodic points have polynomial complexity, products of certified spaces
  // are certified. Sofic spaces carry no certificate.
  bool certified_zero_entropy() const {
    if (as_orbit_closure()) return true;
    if (const auto* p = as_product())
      return p->first->certified_zero_entropy() && p->second->certified_zero_entropy();
    return false;
  }

  // Sofic helpers (state sets are bitmasks).
  StateSet all_states() const {
    const auto n = as_sofic()->states.size();
    return n == 64 ? ~StateSet{0} : ((StateSet{1} << n) - 1);
  }
  StateSet step(StateSet from, Symbol a) const {
    StateSet out = 0;
    for (const auto& e : as_sofic()->edges)
      if (e.label == a && (from >> e.from & 1)) out |= StateSet{1} << e.to;
    return out;
  }
  StateSet step_back(StateSet to, Symbol a) const {
    StateSet out = 0;
    for (const auto& e : as_sofic()->edges)
      if (e.label == a && (to >> e.to & 1)) out |= StateSet{1} << e.from;
    return out;
  }

  // Structural: same name, alphabet and presentation (products compared deeply).
  friend bool operator==(const ShiftSpace& a, const ShiftSpace& b) {
    return a.name_ == b.name_ && a.alphabet_ == b.alphabet_ && a.presentation_ == b.presentation_;
  }

  static void check_point_symbols(const Point& p, const Alphabet& a) {
    auto check = [&](const Word& w) {
      for (Symbol s : w)
        if (!a.contains(s)) throw InputError("point uses a symbol outside the alphabet");
    };
    check(p.left().preperiod());
    check(p.left().period());
    check(p.core());
    check(p.right().preperiod());
    check(p.right().period());
  }

 private:
  ShiftSpace(std::string name, Alphabet alphabet, Presentation presentation)
      : name_(std::move(name)), alphabet_(std::move(alphabet)), presentation_(std::move(presentation)) {}

  std::string name_;
  Alphabet alphabet_;
  Presentation presentation_;
};

using ShiftSpacePtr = std::shared_ptr<const ShiftSpace>;

inline bool operator==(const ProductPresentation& a, const ProductPresentation& b) {
  return *a.first == *b.first && *a.second == *b.second;
}

namespace detail {

// Window starting positions of g that realize every length-n word of g.
inline std::pair<Coord, Coord> window_start_range(const Point& g, Coord n) {
  return {g.left_bound() - n - g.left_period(), g.right_start() + g.right_period() - 1};
}

inline Word zip_words(const Word& a, const Word& b, const Alphabet& product) {
  Word out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = product.pack(a[i], b[i]);
  return out;
}

inline std::pair<Word, Word> unzip_word(const Word& w, const Alphabet& product) {
  Word a(w.size()), b(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) std::tie(a[i], b[i]) = product.unpack(w[i]);
  return {std::move(a), std::move(b)};
}

}  // namespace detail

inline bool contains_word(const ShiftSpace& s, const Word& w) {
  for (Symbol a : w)
    if (!s.alphabet().contains(a)) throw InputError("word uses a symbol outside the alphabet");
  if (w.empty()) return true;
  if (s.as_sofic()) {
    ShiftSpace::StateSet m = s.all_states();
    for (Symbol a : w) {
      m = s.step(m, a);
      if (!m) return false;
    }
    return true;
  }
  if (const auto* oc = s.as_orbit_closure()) {
    const Coord n = static_cast<Coord>(w.size());
    for (const auto& g : oc->generators) {
      auto [lo, hi] = detail::window_start_range(g, n);
      for (Coord st = lo; st <= hi; ++st) {
        bool match = true;
        for (Coord i = 0; i < n && match; ++i) match = g.at(st + i) == w[static_cast<std::size_t>(i)];
        if (match) return true;
      }
    }
    return false;
  }
  const auto* pr = s.as_product();
  auto [a, b] = detail::unzip_word(w, s.alphabet());
  return contains_word(*pr->first, a) && contains_word(*pr->second, b);
}

// All length-n words of the space, sorted lexicographically.
inline std::vector<Word> words(const ShiftSpace& s, std::size_t n, const EnumerationCap& cap = {}) {
  if (n < 1) throw InputError("words: n must be at least 1");
  if (n > cap.max_length)
    throw ResourceError("words: length " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap.max_length));
  if (s.as_sofic()) {
    std::vector<std::pair<Word, ShiftSpace::StateSet>> level{{Word{}, s.all_states()}};
    for (std::size_t len = 0; len < n; ++len) {
      std::vector<std::pair<Word, ShiftSpace::StateSet>> next;
      for (const auto& [w, m] : level) {
        for (std::size_t a = 0; a < s.alphabet().size(); ++a) {
          auto m2 = s.step(m, static_cast<Symbol>(a));
          if (!m2) continue;
          Word w2 = w;
          w2.push_back(static_cast<Symbol>(a));
          next.emplace_back(std::move(w2), m2);
          if (next.size() > cap.max_words)
            throw ResourceError("words: more than " + std::to_string(cap.max_words) + " words");
        }
      }
      level = std::move(next);
    }
    std::vector<Word> out;
    out.reserve(level.size());
    for (auto& [w, m] : level) out.push_back(std::move(w));
    return out;
  }
  if (const auto* oc = s.as_orbit_closure()) {
    std::set<Word> found;
    const Coord len = static_cast<Coord>(n);
    for (const auto& g : oc->generators) {
      auto [lo, hi] = detail::window_start_range(g, len);
      for (Coord st = lo; st <= hi; ++st) {
        found.insert(window(g, st, st + len - 1));
        if (found.size() > cap.max_words)
          throw ResourceError("words: more than " + std::to_string(cap.max_words) + " words");
      }
    }
    return {found.begin(), found.end()};
  }
  const auto* pr = s.as_product();
  auto wa = words(*pr->first, n, cap);
  auto wb = words(*pr->second, n, cap);
  if (wa.size() * wb.size() > cap.max_words)
    throw ResourceError("words: more than " + std::to_string(cap.max_words) + " words");
  std::vector<Word> out;
  out.reserve(wa.size() * wb.size());
  for (const auto& a : wa)
    for (const auto& b : wb) out.push_back(detail::zip_words(a, b, s.alphabet()));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t word_count(const ShiftSpace& s, std::size_t n, const EnumerationCap& cap = {}) {
  return words(s, n, cap).size();
}

// (1/n) log P(n), natural log.
inline double entropy_estimate(const ShiftSpace& s, std::size_t n, const EnumerationCap& cap = {}) {
  return std::log(static_cast<double>(word_count(s, n, cap))) / static_cast<double>(n);
}

struct ComplexityReport {
  std::map<std::size_t, std::size_t> counts;
  std::map<std::size_t, double> entropy_estimates;

  // P(n) = P(n+1) somewhere in range: the space is finite.
  bool detects_finite() const {
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      auto next = std::next(it);
      if (next != counts.end() && next->first == it->first + 1 && next->second == it->second)
        return true;
    }
    return false;
  }
};

inline ComplexityReport complexity(const ShiftSpace& s, std::size_t n_max, const EnumerationCap& cap = {}) {
  ComplexityReport r;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto c = word_count(s, n, cap);
    r.counts[n] = c;
    r.entropy_estimates[n] = std::log(static_cast<double>(c)) / static_cast<double>(n);
  }
  return r;
}

namespace detail {

// Greatest fixed point of "q can read `period` and land in the set again".
inline ShiftSpace::StateSet periodic_run_states(const ShiftSpace& s, const Word& period, bool backward) {
  ShiftSpace::StateSet live = s.all_states();
  const auto nstates = s.as_sofic()->states.size();
  while (true) {
    ShiftSpace::StateSet next = 0;
    for (std::size_t q = 0; q < nstates; ++q) {
      if (!(live >> q & 1)) continue;
      ShiftSpace::StateSet m = ShiftSpace::StateSet{1} << q;
      if (backward) {
        for (auto it = period.rbegin(); it != period.rend() && m; ++it) m = s.step_back(m, *it);
      } else {
        for (auto it = period.begin(); it != period.end() && m; ++it) m = s.step(m, *it);
      }
      if (m & live) next |= ShiftSpace::StateSet{1} << q;
    }
    if (next == live) return live;
    live = next;
  }
}

// Orbit closure candidates: generators plus the periodic limit points of
// their tails.
inline std::vector<Point> orbit_candidates(const OrbitClosure& oc) {
  std::vector<Point> out;
  for (const auto& g : oc.generators) {
    out.push_back(g);
    out.push_back(Point::periodic(window(g, g.left_bound() - g.left_period(), g.left_bound() - 1)));
    out.push_back(Point::periodic(window(g, g.right_start(), g.right_start() + g.right_period() - 1)));
  }
  return out;
}

}  // namespace detail

// Exact membership for eventually periodic points.
inline bool is_point_in(const ShiftSpace& s, const Point& p) {
  ShiftSpace::check_point_symbols(p, s.alphabet());
  if (s.as_sofic()) {
    const Coord lb = p.left_bound();
    const Coord rs = p.right_start();
    const Word left = window(p, lb - p.left_period(), lb - 1);
    const Word right = window(p, rs, rs + p.right_period() - 1);
    auto m = detail::periodic_run_states(s, left, true);
    for (Coord n = lb; n < rs && m; ++n) m = s.step(m, p.at(n));
    return (m & detail::periodic_run_states(s, right, false)) != 0;
  }
  if (const auto* oc = s.as_orbit_closure()) {
    for (const auto& c : detail::orbit_candidates(*oc)) {
      if (c.is_periodic() != p.is_periodic()) continue;
      if (c.is_periodic()) {
        for (Coord k = 0; k < c.right_period(); ++k)
          if (shift_point(c, k) == p) return true;
      } else if (shift_point(c, p.origin() - c.origin()) == p) {
        return true;
      }
    }
    return false;
  }
  const auto* pr = s.as_product();
  return is_point_in(*pr->first, project_point(p, s.alphabet(), 0)) &&
         is_point_in(*pr->second, project_point(p, s.alphabet(), 1));
}

namespace detail {

// An eventually periodic point of a sofic space whose window at
// [offset, offset+|w|) is w. Requires w to be a word of the space.
inline Point sofic_point_with_word(const ShiftSpace& s, const Word& w, Coord offset) {
  const auto& aut = *s.as_sofic();
  std::vector<ShiftSpace::StateSet> reach{s.all_states()};
  for (Symbol a : w) reach.push_back(s.step(reach.back(), a));
  if (!reach.back()) throw InputError("word not in the space");
  // Backtrack one concrete path (lowest-index states).
  std::vector<std::size_t> path(w.size() + 1);
  path[w.size()] = static_cast<std::size_t>(std::countr_zero(reach.back()));
  for (std::size_t i = w.size(); i-- > 0;) {
    auto prev = s.step_back(ShiftSpace::StateSet{1} << path[i + 1], w[i]) & reach[i];
    path[i] = static_cast<std::size_t>(std::countr_zero(prev));
  }
  // Greedy walks until a state repeats give eventually periodic extensions.
  auto walk = [&](std::size_t start, bool forward) {
    std::vector<std::size_t> seen_at(aut.states.size(), SIZE_MAX);
    Word labels;
    std::size_t q = start;
    while (seen_at[q] == SIZE_MAX) {
      seen_at[q] = labels.size();
      for (const auto& e : aut.edges) {
        if ((forward ? e.from : e.to) != q) continue;
        labels.push_back(e.label);
        q = forward ? e.to : e.from;
        break;
      }
    }
    Word pre(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(seen_at[q]));
    Word per(labels.begin() + static_cast<std::ptrdiff_t>(seen_at[q]), labels.end());
    return Tail(std::move(pre), std::move(per));
  };
  return Point(walk(path.front(), false), w, walk(path.back(), true), offset);
}

}  // namespace detail

// A list of points of the space realizing every word of length 2n+1 in the
// centered window [-n, n]; one point per word, first found in a fixed
// deterministic order.
inline std::vector<Point> window_points(const ShiftSpace& s, Coord n, const EnumerationCap& cap = {}) {
  std::vector<Point> out;
  const Coord len = 2 * n + 1;
  if (const auto* oc = s.as_orbit_closure()) {
    std::set<Word> seen;
    for (const auto& g : oc->generators) {
      auto [lo, hi] = detail::window_start_range(g, len);
      for (Coord st = lo; st <= hi; ++st) {
        // window of σ^k g at [-n, n] is g's window at [-n-k, n-k]
        if (seen.insert(window(g, st, st + len - 1)).second) out.push_back(shift_point(g, -n - st));
      }
    }
    return out;
  }
  if (s.as_sofic()) {
    for (const auto& w : words(s, static_cast<std::size_t>(len), cap))
      out.push_back(detail::sofic_point_with_word(s, w, -n));
    return out;
  }
  const auto* pr = s.as_product();
  auto a = window_points(*pr->first, n, cap);
  auto b = window_points(*pr->second, n, cap);
  if (a.size() * b.size() > cap.max_words) throw ResourceError("window_points: too many points");
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(zip_points(x, y, s.alphabet()));
  return out;
}

}  // namespace autdrift
