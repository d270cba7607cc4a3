#include <catch_amalgamated.hpp>

#include "autdrift/asymptotic.hpp"
#include "autdrift/gallery.hpp"
#include "support.hpp"

using namespace autdrift;
using namespace autdrift::testing;

namespace {

const Alphabet kBin = binary_alphabet();

CalibratedPair xz() { return CalibratedPair(sunny_point(), zero_point()); }

// M(φx, φy) by a wide window scan instead of the bounded one.
Coord brute_force_cocycle(const Automorphism& a, const CalibratedPair& p) {
  const Point fx = apply_to_point(a, p.x());
  const Point fy = apply_to_point(a, p.y());
  for (Coord m = -200; m <= 200; ++m)
    if (fx.at(m) != fy.at(m)) return m;
  throw std::logic_error("no difference in window");
}

}  // namespace

TEST_CASE("make_pair examples") {
  CHECK(make_pair(sunny_point(), zero_point()).m_index() == 0);
  CHECK_THROWS_AS(make_pair(zero_point(), zero_point()), NotAPairError);
  CHECK(make_pair(shift_point(sunny_point(), 4), zero_point()).m_index() == 4);
  const Point a = Point::periodic({0, 1});
  CHECK_THROWS_AS(make_pair(a, shift_point(a, 1)), NotAsymptoticError);
}

TEST_CASE("calibrate examples") {
  const Point x = sunny_point(), z = zero_point();
  CHECK(calibrate(make_pair(shift_point(x, 4), z)) == xz());
  CHECK(calibrate(xz().pair()) == xz());
  CHECK(calibrate(make_pair(shift_point(x, -2), z)) == xz());
  CHECK_THROWS_AS(CalibratedPair(shift_point(x, 1), z), InputError);
}

TEST_CASE("act examples") {
  const auto sigma = shift_automorphism(kBin);
  CHECK(act(sigma, xz()) == xz());
  for (const auto& p : gallery_pairs_s()) CHECK(act(identity_automorphism(kBin), p) == p);

  const Alphabet prod = Alphabet::product(kBin, kBin);
  const auto swap = swap_automorphism(prod);
  const Point x = sunny_point(), z = zero_point();
  for (const Point& c : {z, x, shift_point(x, 3)}) {
    const CalibratedPair p(zip_points(x, c, prod), zip_points(z, c, prod));
    const CalibratedPair q = act(swap, p);
    CHECK(q == CalibratedPair(zip_points(c, x, prod), zip_points(c, z, prod)));
  }
}

TEST_CASE("drift_cocycle examples") {
  CHECK(drift_cocycle(shift_automorphism(kBin), xz()) == 1);
  for (const auto& p : gallery_pairs_s()) {
    CHECK(drift_cocycle(identity_automorphism(kBin), p) == 0);
    CHECK(drift_cocycle(shift_automorphism(kBin, 5), p) == 5);
    CHECK(brute_force_cocycle(shift_automorphism(kBin, 5), p) == 5);
  }
}

TEST_CASE("cocycle_bound and locality_radius examples") {
  const auto s = shift_automorphism(kBin);
  CHECK(cocycle_bound(s) == 1);
  CHECK(cocycle_bound(identity_automorphism(kBin)) == 0);
  CHECK(cocycle_bound(compose(s, compose(s, s))) == 3);
  CHECK(locality_radius(identity_automorphism(kBin)) == 0);
  CHECK(locality_radius(s) == 2);
  CHECK(locality_radius(swap_automorphism(Alphabet::product(kBin, kBin))) == 0);
}

TEST_CASE("bounded scan flags an invalid automorphism pair") {
  // Collapses every symbol to 0: images of a pair agree everywhere.
  const Automorphism collapse("collapse", BlockMap(2, 0, {0, 0}), BlockMap(2, 0, {0, 0}));
  CHECK_THROWS_AS(drift_cocycle(collapse, xz()), InvariantViolation);
  CHECK_THROWS_AS(act(collapse, xz()), InvariantViolation);
}

namespace {

struct Fixture {
  std::string name;
  std::vector<CalibratedPair> pairs;
  std::vector<Automorphism> automorphisms;
};

std::vector<Fixture> fixtures() {
  const auto s = sunny_side_up();
  const auto ss = product_with_s(s.space, s.family).space;
  const auto p2s = product_with_s(period_two_orbit()).space;
  const Alphabet& a = ss->alphabet();
  std::vector<Automorphism> sxs = {shift_automorphism(a, 1),
                                   shift_automorphism(a, -1),
                                   shift_automorphism(a, 2),
                                   shift_automorphism(a, -2),
                                   identity_automorphism(a),
                                   swap_automorphism(a),
                                   embed_full_group(*s.space, sunny_transposition_cocycle()),
                                   embed_full_group(*s.space, constant_cocycle(kBin, 1))};
  std::vector<Automorphism> p2 = {shift_automorphism(p2s->alphabet(), 1),
                                  embed_full_group(*period_two_orbit(), period_two_flip_cocycle()),
                                  embed_full_group(*period_two_orbit(), constant_cocycle(kBin, 1))};
  std::vector<Automorphism> sa = {shift_automorphism(kBin, 1), shift_automorphism(kBin, -2),
                                  identity_automorphism(kBin)};
  return {{"S", gallery_pairs_s(4), sa}, {"SxS", gallery_pairs_sxs(1), sxs}, {"P2xS", gallery_pairs_p2xs(2), p2}};
}

}  // namespace

TEST_CASE("homomorphism, cocycle relation and boundedness") {
  for (const auto& f : fixtures()) {
    INFO(f.name);
    for (const auto& a : f.automorphisms)
      for (const auto& b : f.automorphisms) {
        const Automorphism ab = compose(a, b);
        for (const auto& p : f.pairs) {
          const CalibratedPair bp = act(b, p);
          CHECK(act(a, bp) == act(ab, p));
          CHECK(drift_cocycle(ab, p) == drift_cocycle(a, bp) + drift_cocycle(b, p));
          CHECK(std::abs(drift_cocycle(a, p)) <= cocycle_bound(a));
          CHECK(drift_cocycle(a, p) == brute_force_cocycle(a, p));
        }
      }
  }
}

TEST_CASE("locality of the action") {
  for (const auto& f : fixtures()) {
    INFO(f.name);
    for (const auto& a : f.automorphisms) {
      const Coord b = locality_radius(a);
      for (Coord m = 0; m <= 3; ++m) {
        std::map<WordPair, WordPair> seen;
        for (const auto& p : f.pairs) {
          const WordPair in = project(p, m + b);
          const WordPair out = project(act(a, p), m);
          auto [it, fresh] = seen.emplace(in, out);
          CHECK(it->second == out);
        }
      }
    }
  }
}

TEST_CASE("calibration is shift invariant") {
  Rng rng(41);
  for (const auto& p : gallery_pairs_sxs(1))
    for (Coord k = -20; k <= 20; ++k) CHECK(calibrate(make_pair(shift_point(p.x(), k), shift_point(p.y(), k))) == p);
  for (int t = 0; t < 100; ++t) {
    const Point x = random_point(rng, 3);
    const Point y = perturb_right_of(rng, x, std::uniform_int_distribution<Coord>(-5, 5)(rng), 3);
    const AsymptoticPair p = make_pair(x, y);
    const Coord k = std::uniform_int_distribution<Coord>(-20, 20)(rng);
    CHECK(calibrate(make_pair(shift_point(x, k), shift_point(y, k))) == calibrate(p));
  }
}

TEST_CASE("pairs are ordered") {
  const CalibratedPair a(sunny_point(), zero_point());
  const CalibratedPair b(zero_point(), sunny_point());
  CHECK_FALSE(a == b);
}
