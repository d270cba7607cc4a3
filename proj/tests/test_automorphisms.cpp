#include <catch_amalgamated.hpp>

#include "autdrift/automorphism.hpp"
#include "autdrift/gallery.hpp"
#include "support.hpp"

using namespace autdrift;
using namespace autdrift::testing;

namespace {

const Alphabet kBin = binary_alphabet();

Word bits(const std::string& s) {
  Word w;
  for (char c : s) w.push_back(static_cast<Symbol>(c - '0'));
  return w;
}

Automorphism bit_flip() { return permutation_automorphism(kBin, {1, 0}, "flip"); }

// Automorphisms over the binary full shift for property tests.
std::vector<Automorphism> binary_sample() {
  std::vector<Automorphism> out = {identity_automorphism(kBin), shift_automorphism(kBin, 1),
                                   shift_automorphism(kBin, -2), bit_flip()};
  // x ↦ x_m + x_{m+1} is not invertible; use the invertible marker map
  // flip ∘ σ³ instead to get a larger memory.
  out.push_back(compose(bit_flip(), shift_automorphism(kBin, 3)));
  return out;
}

}  // namespace

TEST_CASE("apply_block_map_word examples") {
  const BlockMap id(2, 0, {0, 1});
  CHECK(apply_block_map_word(id, bits("0110")) == bits("0110"));
  const BlockMap shift = shift_block_map(2, 1);
  CHECK(apply_block_map_word(shift, bits("00100")) == bits("001"));
  CHECK(apply_block_map_word(bit_flip().forward(), bits("010")) == bits("101"));
  CHECK_THROWS_AS(apply_block_map_word(shift, bits("01")), InputError);
}

TEST_CASE("apply_to_point examples") {
  CHECK(apply_to_point(shift_automorphism(kBin), sunny_point()) == shift_point(sunny_point(), 1));
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Point p = random_point(rng, 2);
    CHECK(apply_to_point(identity_automorphism(kBin), p) == p);
  }
  const Alphabet prod = Alphabet::product(kBin, kBin);
  const Automorphism swap = swap_automorphism(prod);
  CHECK(apply_to_point(swap, zip_points(sunny_point(), zero_point(), prod)) ==
        zip_points(zero_point(), sunny_point(), prod));
}

TEST_CASE("compose examples") {
  const auto s = shift_automorphism(kBin);
  const auto s2 = compose(s, s);
  CHECK(s2.forward().memory() == 2);
  CHECK(s2.forward() == shift_block_map(2, 2));
  for (const auto& w : words(*full_shift(kBin), 5)) {
    CHECK(apply_block_map_word(s2.forward(), w) == Word{w[0]});
    CHECK(apply_block_map_word(s2.forward(), w) ==
          apply_block_map_word(s.forward(), apply_block_map_word(s.forward(), w)));
  }
  const auto a = compose(bit_flip(), s);
  const auto ai = compose(a, identity_automorphism(kBin));
  for (const auto& w : words(*full_shift(kBin), 5))
    CHECK(apply_block_map_word(ai.forward(), w) == apply_block_map_word(a.forward(), w));

  const auto ss = product_with_s(sunny_side_up_space()).space;
  const auto swap = swap_automorphism(ss->alphabet());
  const auto sw2 = compose(swap, swap);
  for (std::size_t n = 1; n <= 7; ++n)
    for (const auto& w : words(*ss, n)) CHECK(apply_block_map_word(sw2.forward(), w) == w);
  CHECK_THROWS_AS(compose(s, swap), InputError);
}

TEST_CASE("verify_automorphism examples") {
  const auto s = sunny_side_up_space();
  CHECK(verify_automorphism(*s, shift_automorphism(kBin), 9).passed());
  const auto ss = product_with_s(s).space;
  CHECK(verify_automorphism(*ss, swap_automorphism(ss->alphabet()), 9).passed());
  const auto r = verify_automorphism(*s, bit_flip(), 9);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.forward_preserves_language);
  CHECK(r.inverse_after_forward);
  CHECK(r.render().find("forward image of 00100 is 11011") != std::string::npos);
  CHECK_THROWS_AS(verify_automorphism(*s, shift_automorphism(kBin), 4), InputError);
}

TEST_CASE("verify_automorphism rejects a non-inverse pair") {
  const auto s = sunny_side_up_space();
  const Automorphism bogus("bogus", shift_block_map(2, 1), shift_block_map(2, 1));
  const auto r = verify_automorphism(*s, bogus, 9);
  CHECK(r.forward_preserves_language);
  CHECK_FALSE(r.inverse_after_forward);
  CHECK_FALSE(r.passed());
}

TEST_CASE("memory_bound examples") {
  const auto s = shift_automorphism(kBin);
  CHECK(memory_bound(s) == MemoryBound{1, 1});
  CHECK(memory_bound(identity_automorphism(kBin)) == MemoryBound{0, 0});
  CHECK(memory_bound(compose(s, s)) == MemoryBound{2, 2});
}

TEST_CASE("as_shift_power recognizes shift powers") {
  CHECK(as_shift_power(shift_automorphism(kBin, 3)) == 3);
  CHECK(as_shift_power(shift_automorphism(kBin, -2)) == -2);
  CHECK(as_shift_power(identity_automorphism(kBin)) == 0);
  CHECK_FALSE(as_shift_power(bit_flip()).has_value());
  CHECK(as_shift_power(compose(shift_automorphism(kBin, 2), shift_automorphism(kBin, -1))) == 1);
}

TEST_CASE("shift commutation, round trip and word/point coherence") {
  Rng rng(29);
  std::uniform_int_distribution<Coord> kd(-20, 20), lod(-10, 10), lend(0, 8);
  for (const auto& a : binary_sample()) {
    INFO(a.label());
    const Automorphism inv = a.inverted();
    const Coord k = a.forward().memory();
    for (int t = 0; t < 60; ++t) {
      const Point p = random_point(rng, 2);
      const Coord j = kd(rng);
      CHECK(apply_to_point(a, shift_point(p, j)) == shift_point(apply_to_point(a, p), j));
      CHECK(apply_to_point(inv, apply_to_point(a, p)) == p);
      const Coord lo = lod(rng), hi = lo + lend(rng);
      CHECK(window(apply_to_point(a, p), lo, hi) == apply_block_map_word(a.forward(), window(p, lo - k, hi + k)));
    }
  }
}

TEST_CASE("round trip on gallery spaces") {
  Rng rng(31);
  const auto sp = product_with_s(sunny_side_up_space());
  const auto embed = embed_full_group(*sunny_side_up_space(), sunny_transposition_cocycle());
  const auto swap = swap_automorphism(sp.space->alphabet());
  for (const auto& p : window_points(*sp.space, 3)) {
    for (const auto* a : {&embed, &swap}) {
      CHECK(apply_to_point(a->inverted(), apply_to_point(*a, p)) == p);
      CHECK(is_point_in(*sp.space, apply_to_point(*a, p)));
    }
  }
}

TEST_CASE("block maps reject malformed tables") {
  CHECK_THROWS_AS(BlockMap(2, 1, {0, 1}), InputError);
  CHECK_THROWS_AS(BlockMap(2, 0, {0, 2}), InputError);
  CHECK_THROWS_AS(permutation_automorphism(kBin, {0, 0}, "p"), InputError);
  CHECK_THROWS_AS(BlockMap::table_size(256, 4), ResourceError);
}
