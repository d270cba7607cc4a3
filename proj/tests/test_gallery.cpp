#include <catch_amalgamated.hpp>

#include "autdrift/drift.hpp"
#include "autdrift/gallery.hpp"
#include "support.hpp"

using namespace autdrift;
using namespace autdrift::testing;

namespace {

const Alphabet kBin = binary_alphabet();

// Every instance of a leaf family over radius n.
std::size_t instance_count(const CAFamily& f, Coord n) {
  std::vector<PointPair> out;
  detail::append_instances(f, n, {}, out);
  return out.size();
}

}  // namespace

TEST_CASE("sunny_side_up examples") {
  const auto s = sunny_side_up();
  CHECK(s.space->name() == "S");
  CHECK(s.family->name() == "CA_S");
  CHECK(instance_count(*sunny_side_up_two_pair_family(), 5) == 2);
  CHECK(is_point_in(*s.space, zero_point()));
  CHECK(word_count(*s.space, 4) == 5);
}

TEST_CASE("CA(S) is infinite: (x̄, σ^d x̄) are calibrated pairs of S") {
  const auto s = sunny_side_up();
  for (Coord d = 1; d <= 6; ++d) {
    const CalibratedPair p(sunny_point(), shift_point(sunny_point(), d));
    CHECK(is_point_in(*s.space, p.y()));
    const auto wps = word_pairs(*s.family, d);
    CHECK(std::binary_search(wps.begin(), wps.end(), project(p, d)));
  }
}

TEST_CASE("product_with_s examples") {
  const auto p2 = product_with_s(period_two_orbit());
  CHECK(p2.space->name() == "P2xS");
  CHECK_FALSE(complexity(*p2.space, 8).detects_finite());
  // W_0: two base symbols times the two center-differing S pairs.
  const auto w0 = word_pairs(*p2.family, 0);
  CHECK(w0.size() == 4);
  std::set<WordPair> brute;
  for (const auto& p : representatives(*p2.family, 4)) brute.insert(project(p, 0));
  CHECK(brute == std::set<WordPair>(w0.begin(), w0.end()));

  const auto ss = product_with_s(sunny_side_up_space());
  for (const Point& y : {zero_point(), sunny_point(), shift_point(sunny_point(), 2)}) {
    const auto& a = ss.space->alphabet();
    const CalibratedPair p(zip_points(y, sunny_point(), a), zip_points(y, zero_point(), a));
    const auto wps = word_pairs(*ss.family, 3);
    CHECK(std::binary_search(wps.begin(), wps.end(), project(p, 3)));
  }
  CHECK(word_count(*ss.space, 1) == word_count(*sunny_side_up_space(), 1) * 2);
  CHECK_THROWS_AS(product_with_s(period_two_orbit(), diagonal_family(full_shift(Alphabet({"a", "b", "c"})))),
                  InputError);
}

TEST_CASE("embed_full_group examples") {
  const auto s = sunny_side_up_space();
  const auto ss = product_with_s(s);
  const auto& a = ss.space->alphabet();
  const auto one = embed_full_group(*s, constant_cocycle(kBin, 1));
  for (const auto& y : window_points(*s, 3)) {
    const CalibratedPair p(zip_points(y, sunny_point(), a), zip_points(y, zero_point(), a));
    CHECK(drift_cocycle(one, p) == 1);
    // Only the S component moves.
    CHECK(project_point(apply_to_point(one, p.x()), a, 0) == y);
    CHECK(project_point(apply_to_point(one, p.x()), a, 1) == shift_point(sunny_point(), 1));
  }
  const auto zero = embed_full_group(*s, constant_cocycle(kBin, 0));
  CHECK(zero.forward() == identity_automorphism(a).forward());

  const auto p2 = period_two_orbit();
  const auto p2s = product_with_s(p2);
  const auto flip = embed_full_group(*p2, period_two_flip_cocycle());
  CHECK(verify_automorphism(*p2s.space, flip, 2 * static_cast<std::size_t>(flip.forward().memory() + flip.inverse().memory()) + 3).passed());
  for (const Point& y : {Point::periodic({0, 1}), Point::periodic({1, 0})}) {
    const auto& pa = p2s.space->alphabet();
    const CalibratedPair p(zip_points(y, sunny_point(), pa), zip_points(y, zero_point(), pa));
    CHECK(drift_cocycle(flip, p) == (y.at(0) == 0 ? 1 : -1));
  }
}

TEST_CASE("embedded automorphisms verify") {
  const auto s = sunny_side_up_space();
  const auto ss = product_with_s(s).space;
  for (const auto& n : {sunny_transposition_cocycle(), constant_cocycle(kBin, 1), constant_cocycle(kBin, -2)}) {
    const auto e = embed_full_group(*s, n);
    CHECK(e.forward().memory() == n.radius() + n.max_abs());
    CHECK(verify_automorphism(*ss, e, 2 * static_cast<std::size_t>(2 * e.forward().memory()) + 1).passed());
  }
}

TEST_CASE("invalid orbit cocycles are rejected") {
  // N(y) = 1 where y_0 = 1 sends markers 0 and 1 of x̄ to the same place.
  const auto bad = OrbitCocycle::from_rule("bad", kBin, 0, [](std::span<const Symbol> w) { return w[0] == 1 ? 1 : 0; });
  CHECK_THROWS_AS(embed_full_group(*sunny_side_up_space(), bad), InputError);
  CHECK_THROWS_AS(embed_full_group(*period_two_orbit(), bad), InputError);
  CHECK_THROWS_AS(embed_full_group(*full_shift(Alphabet({"a", "b", "c"})), bad), InputError);
}

TEST_CASE("orbit_cocycle_expectation examples") {
  const auto mu = period_two_uniform();
  CHECK(orbit_cocycle_expectation(mu, constant_cocycle(kBin, 1)) == 1);
  CHECK(orbit_cocycle_expectation(mu, period_two_flip_cocycle()) == 0);
  const auto one = embed_full_group(*period_two_orbit(), constant_cocycle(kBin, 1));
  CHECK(full_group_drift(mu, one, kBin) == 1);
  const auto dirac = BaseMeasure::uniform({zero_point()});
  CHECK(orbit_cocycle_expectation(dirac, constant_cocycle(kBin, 1)) == 1);
}

TEST_CASE("full-group identity on the gallery bases") {
  const auto mu = period_two_uniform();
  for (const auto& n : {constant_cocycle(kBin, 1), constant_cocycle(kBin, 0), period_two_flip_cocycle(),
                        constant_cocycle(kBin, -1)}) {
    const auto e = embed_full_group(*period_two_orbit(), n);
    CHECK(full_group_drift(mu, e, kBin) == orbit_cocycle_expectation(mu, n));
  }
  const auto dirac = BaseMeasure::uniform({zero_point()});
  for (const auto& n : {sunny_transposition_cocycle(), constant_cocycle(kBin, 2)}) {
    const auto e = embed_full_group(*sunny_side_up_space(), n);
    CHECK(full_group_drift(dirac, e, kBin) == orbit_cocycle_expectation(dirac, n));
  }
}

TEST_CASE("base measures must be invariant and normalized") {
  const Point a = Point::periodic({0, 1});
  CHECK_THROWS_AS(BaseMeasure::uniform({a}), InputError);
  CHECK_THROWS_AS(BaseMeasure({a, shift_point(a, 1)}, {Rational(1, 3), Rational(2, 3)}), InputError);
  CHECK_THROWS_AS(BaseMeasure({zero_point()}, {Rational(1, 2)}), InputError);
}

TEST_CASE("embedding respects composition of orbit cocycles") {
  const auto s = sunny_side_up_space();
  const auto ss = product_with_s(s).space;
  const std::vector<OrbitCocycle> ns = {sunny_transposition_cocycle(), constant_cocycle(kBin, 1),
                                        constant_cocycle(kBin, -1)};
  const auto pts = window_points(*ss, 4);
  for (const auto& n1 : ns)
    for (const auto& n2 : ns) {
      const auto lhs = compose(embed_full_group(*s, n1), embed_full_group(*s, n2));
      const auto rhs = embed_full_group(*s, compose_orbit_cocycles(n1, n2));
      for (const auto& p : pts) CHECK(apply_to_point(lhs, p) == apply_to_point(rhs, p));
    }
  const auto p2 = period_two_orbit();
  const auto flip = period_two_flip_cocycle();
  const auto twice = compose_orbit_cocycles(flip, flip);
  for (const auto& p : window_points(*product_with_s(p2).space, 3))
    CHECK(apply_to_point(compose(embed_full_group(*p2, flip), embed_full_group(*p2, flip)), p) ==
          apply_to_point(embed_full_group(*p2, twice), p));
}
