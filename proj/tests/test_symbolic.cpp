#include <catch_amalgamated.hpp>

#include "autdrift/gallery.hpp"
#include "autdrift/symbolic.hpp"
#include "support.hpp"

using namespace autdrift;
using namespace autdrift::testing;

namespace {

const Alphabet kBin = binary_alphabet();

std::string compact(const Word& w) { return kBin.format_compact(w); }

}  // namespace

TEST_CASE("window examples") {
  const Point x = sunny_point();
  const Point z = zero_point();
  CHECK(compact(window(x, -2, 2)) == "00100");
  CHECK(compact(window(z, -3, 3)) == "0000000");
  CHECK(compact(window(shift_point(x, 2), 0, 3)) == "0010");
  CHECK_THROWS_AS(window(x, 1, 0), InputError);
}

TEST_CASE("shift_point examples") {
  const Point x = sunny_point();
  const Point z = zero_point();
  CHECK(shift_point(z, 5) == z);
  CHECK(shift_point(x, 1) == Point::finite(0, {1}, 1));
  CHECK(shift_point(x, 1).at(1) == 1);
  CHECK(shift_point(shift_point(x, 3), -3) == x);
}

TEST_CASE("first_difference examples") {
  const Point x = sunny_point();
  const Point z = zero_point();
  CHECK(first_difference(x, z) == Difference::at_index(0));
  CHECK(first_difference(z, z) == Difference::equal());
  CHECK(first_difference(shift_point(x, 3), z) == Difference::at_index(3));
  const Point a = Point::periodic({0, 1});
  CHECK(first_difference(a, shift_point(a, 1)) == Difference::not_asymptotic());
}

TEST_CASE("first_difference agrees with a window scan") {
  Rng rng(101);
  for (int t = 0; t < 500; ++t) {
    const Point x = random_point(rng, 2);
    const Point y = random_point(rng, 2);
    const Difference d = first_difference(x, y);
    // Brute force on a wide window: beyond it both tails are periodic.
    const Coord lo = std::min(x.left_bound(), y.left_bound()) - 24;
    const Coord hi = std::max(x.right_start(), y.right_start()) + 24;
    std::optional<Coord> first;
    for (Coord n = lo; n <= hi && !first; ++n)
      if (x.at(n) != y.at(n)) first = n;
    bool left_differs = false;
    for (Coord n = lo - 36; n < lo; ++n) left_differs = left_differs || x.at(n) != y.at(n);
    if (!first) {
      CHECK(d == Difference::equal());
    } else if (left_differs) {
      CHECK(d == Difference::not_asymptotic());
    } else {
      CHECK(d == Difference::at_index(*first));
    }
  }
}

TEST_CASE("shift equivariance of M") {
  Rng rng(7);
  std::uniform_int_distribution<Coord> kd(-50, 50);
  for (int t = 0; t < 400; ++t) {
    const Point x = random_point(rng, 2);
    const Point y = perturb_right_of(rng, x, std::uniform_int_distribution<Coord>(-6, 6)(rng), 2);
    const Difference d = first_difference(x, y);
    REQUIRE(d.kind() == Difference::Kind::at);
    const Coord k = kd(rng);
    CHECK(first_difference(shift_point(x, k), shift_point(y, k)) == Difference::at_index(d.index() + k));
  }
}

TEST_CASE("canonicalization: re-presented tails compare equal") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const Tail a(random_word(rng, 3, 0, 4), random_word(rng, 3, 1, 4));
    const Tail b = re_present(rng, a);
    CHECK(a == b);
    for (std::size_t d = 0; d < 30; ++d) CHECK(a.at(d) == b.at(d));
  }
  // Points with the same symbol function but different presentations.
  const Point p1(Tail({}, {0}), {1, 0, 0}, Tail({}, {0}), 0);
  const Point p2(Tail({0, 0}, {0, 0}), {0, 1}, Tail({}, {0, 0, 0}), -1);
  CHECK(p1 == p2);
  CHECK(p1 == sunny_point());
}

TEST_CASE("window and shift coherence") {
  Rng rng(13);
  std::uniform_int_distribution<Coord> kd(-20, 20), lod(-15, 15), lend(0, 12);
  for (int t = 0; t < 300; ++t) {
    const Point p = random_point(rng, 3);
    const Coord k = kd(rng), lo = lod(rng), hi = lo + lend(rng);
    CHECK(window(shift_point(p, k), lo, hi) == window(p, lo - k, hi - k));
    CHECK(shift_point(shift_point(p, k), -k) == p);
  }
}

TEST_CASE("point literals round trip") {
  CHECK(parse_point("|0^omega <0@0> |0^omega", kBin) == zero_point());
  CHECK(parse_point("|0^omega <1@0> |0^omega", kBin) == sunny_point());
  CHECK(format_point(sunny_point(), kBin) == "|0^omega <1@0> |0^omega");
  CHECK(format_point(zero_point(), kBin) == "|0^omega <@0> |0^omega");
  CHECK(format_point(Point::periodic({0, 1}), kBin) == "|0,1^omega <@0> |0,1^omega");
  Rng rng(17);
  const Alphabet abc({"a", "b", "c"});
  for (int t = 0; t < 200; ++t) {
    const Point p = random_point(rng, 3);
    CHECK(parse_point(format_point(p, abc), abc) == p);
  }
  CHECK_THROWS_AS(parse_point("|0^omega <2@0> |0^omega", kBin), InputError);
  CHECK_THROWS_AS(parse_point("|0^omega <1@0>", kBin), ParseError);
}

TEST_CASE("alphabet validation and products") {
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{}), InputError);
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InputError);
  CHECK_THROWS_AS(Alphabet({"a,b"}), InputError);
  CHECK_THROWS_AS(Alphabet({"*"}), InputError);
  const Alphabet p = Alphabet::product(kBin, kBin);
  CHECK(p.size() == 4);
  CHECK(p.name(p.pack(1, 0)) == "1:0");
  CHECK(p.unpack(p.pack(1, 0)) == std::pair<Symbol, Symbol>{1, 0});
  const Point zp = zip_points(sunny_point(), zero_point(), p);
  CHECK(project_point(zp, p, 0) == sunny_point());
  CHECK(project_point(zp, p, 1) == zero_point());
}
