#pragma once

// Shared generators and fixtures for the test suites.

#include <random>
#include <vector>

#include "autdrift/asymptotic.hpp"
#include "autdrift/gallery.hpp"
#include "autdrift/measure.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift::testing {

using Rng = std::mt19937_64;

inline Word random_word(Rng& rng, std::size_t q, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, static_cast<int>(q) - 1);
  Word w(len(rng));
  for (auto& s : w) s = static_cast<Symbol>(sym(rng));
  return w;
}

// An arbitrary eventually periodic point over q symbols.
inline Point random_point(Rng& rng, std::size_t q) {
  std::uniform_int_distribution<Coord> origin(-8, 8);
  return Point(Tail(random_word(rng, q, 0, 3), random_word(rng, q, 1, 3)), random_word(rng, q, 0, 6),
               Tail(random_word(rng, q, 0, 3), random_word(rng, q, 1, 3)), origin(rng));
}

// Same stream, presented with padded preperiods and repeated periods.
inline Tail re_present(Rng& rng, const Tail& t) {
  std::uniform_int_distribution<int> reps(1, 3), pad(0, 4);
  Word pre = t.preperiod();
  const Word& per = t.period();
  const int extra = pad(rng);
  for (int i = 0; i < extra; ++i) pre.push_back(per[i % per.size()]);
  Word rotated;
  for (std::size_t i = 0; i < per.size(); ++i) rotated.push_back(per[(i + static_cast<std::size_t>(extra)) % per.size()]);
  Word period;
  const int r = reps(rng);
  for (int i = 0; i < r; ++i) period.insert(period.end(), rotated.begin(), rotated.end());
  return Tail(pre, period);
}

// The left tail of x strictly below `cut`, read away from `cut`.
inline Tail left_tail_below(const Point& x, Coord cut) {
  const Coord deep = std::min(cut, x.left_bound());
  Word pre;
  for (Coord n = cut - 1; n >= deep; --n) pre.push_back(x.at(n));
  Word per;
  for (Coord i = 0; i < x.left_period(); ++i) per.push_back(x.at(deep - 1 - i));
  return Tail(pre, per);
}

// A point agreeing with x below `cut` and differing from it at `cut`.
inline Point perturb_right_of(Rng& rng, const Point& x, Coord cut, std::size_t q) {
  Word core = random_word(rng, q, 1, 5);
  std::uniform_int_distribution<int> bump(1, static_cast<int>(q) - 1);
  core[0] = static_cast<Symbol>((x.at(cut) + bump(rng)) % static_cast<int>(q));
  return Point(left_tail_below(x, cut), core, Tail(random_word(rng, q, 0, 2), random_word(rng, q, 1, 2)), cut);
}

inline std::vector<CalibratedPair> gallery_pairs_s(Coord n = 3) { return representatives(*sunny_side_up().family, n); }

inline std::vector<CalibratedPair> gallery_pairs_sxs(Coord n = 2) {
  auto s = sunny_side_up();
  return representatives(*product_with_s(s.space, s.family).family, n);
}

inline std::vector<CalibratedPair> gallery_pairs_p2xs(Coord n = 3) {
  return representatives(*product_with_s(period_two_orbit()).family, n);
}

}  // namespace autdrift::testing
