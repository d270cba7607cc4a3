#include <catch_amalgamated.hpp>

#include <cmath>

#include "autdrift/drift.hpp"
#include "autdrift/gallery.hpp"
#include "autdrift/spec_file.hpp"
#include "support.hpp"

using namespace autdrift;
using namespace autdrift::testing;

namespace {

const Alphabet kBin = binary_alphabet();

SpaceWithFamily sxs() {
  auto s = sunny_side_up();
  return product_with_s(s.space, s.family);
}

}  // namespace

TEST_CASE("drift_estimate examples") {
  const auto s = sunny_side_up();
  for (const auto& f : {s.family, sunny_side_up_two_pair_family()}) {
    const auto nu = empirical_measure(*f, 2, 12, 10);
    CHECK(drift_estimate(nu, shift_automorphism(kBin)).value == 1);
    CHECK(drift_estimate(nu, identity_automorphism(kBin)).value == 0);
    for (Coord k = -5; k <= 5; ++k) CHECK(drift_estimate(nu, shift_automorphism(kBin, k)).value == k);
  }

  const auto p = sxs();
  const auto swap = swap_automorphism(p.space->alphabet());
  for (Coord m = 1; m <= 3; ++m) {
    const auto nu = empirical_measure(*p.family, m, 8, 2);
    const auto e = drift_estimate(nu, swap);
    const Rational defect = additivity_defect(nu, swap, swap);
    // Φ(swap ∘ swap) = Φ(id) = 0, so |2 Φ(swap)| is the additivity defect.
    CHECK(abs(e.value) * 2 == defect);
    CHECK(abs(e.value) <= Rational(e.certificate.bound));
  }
}

TEST_CASE("drift_estimate rejects a measure radius below the locality radius") {
  const auto nu = empirical_measure(*sunny_side_up().family, 1, 3, 1);
  CHECK_THROWS_AS(drift_estimate(nu, shift_automorphism(kBin, 2)), InputError);
  const auto p = sxs();
  CHECK_THROWS_AS(drift_estimate(nu, swap_automorphism(p.space->alphabet())), InputError);
}

TEST_CASE("additivity_defect examples") {
  const auto s = sunny_side_up();
  const auto nu = empirical_measure(*s.family, 1, 12, 12);
  CHECK(additivity_defect(nu, shift_automorphism(kBin, 3), shift_automorphism(kBin, -1)) == 0);
  for (Coord i = -3; i <= 3; ++i)
    for (Coord j = -3; j <= 3; ++j)
      CHECK(additivity_defect(nu, shift_automorphism(kBin, i), shift_automorphism(kBin, j)) == 0);
  const auto p = sxs();
  const auto id = identity_automorphism(p.space->alphabet());
  const auto nu2 = empirical_measure(*p.family, 1, 8, 4);
  for (const auto& a : {swap_automorphism(p.space->alphabet()), shift_automorphism(p.space->alphabet()),
                        embed_full_group(*s.space, sunny_transposition_cocycle())})
    CHECK(additivity_defect(nu2, id, a) == 0);
}

TEST_CASE("swap additivity defect decreases across stages") {
  const auto p = sxs();
  const auto swap = swap_automorphism(p.space->alphabet());
  std::vector<Rational> d;
  for (Coord m = 1; m <= 3; ++m) d.push_back(additivity_defect(empirical_measure(*p.family, m, 12, 2), swap, swap));
  CHECK(d[1] <= d[0]);
  CHECK(d[2] <= d[1]);
}

TEST_CASE("conjugation invariance where defects vanish") {
  const auto s = sunny_side_up();
  const auto nu = empirical_measure(*s.family, 1, 12, 12);
  const auto a = shift_automorphism(kBin, 2);
  const auto b = shift_automorphism(kBin, -1);
  const auto conj = compose(b, compose(a, b.inverted()));
  CHECK(drift_estimate(nu, conj).value == drift_estimate(nu, a).value);
}

TEST_CASE("entropy guard") {
  const auto full = entropy_guard(*full_shift(kBin));
  CHECK_FALSE(full.passed);
  CHECK(full.entropy_length >= 10);
  CHECK(std::abs(full.entropy - std::log(2.0)) < 1e-9);
  const auto s = entropy_guard(*sunny_side_up_space());
  CHECK(s.passed);
  CHECK(s.certified_zero_entropy);
  CHECK(s.entropy_length == 30);
  CHECK(s.entropy == Catch::Approx(std::log(31.0) / 30).epsilon(1e-12));
  const auto p2 = entropy_guard(*period_two_orbit());
  CHECK_FALSE(p2.passed);
  CHECK(p2.finite_detected);
  CHECK_THROWS_AS(entropy_guard(*sunny_side_up_space(), {0.0}), InputError);
}

TEST_CASE("theorem_pipeline on sunny-side-up") {
  const auto s = sunny_side_up();
  PipelineConfig cfg;
  cfg.family = s.family;
  cfg.automorphisms = {shift_automorphism(kBin, 1), shift_automorphism(kBin, 2), identity_automorphism(kBin)};
  cfg.stages = 3;
  cfg.n_max = 12;
  const auto rep = theorem_pipeline(cfg);
  CHECK(rep.passed());
  REQUIRE(rep.stages.size() == 3);
  for (const auto& st : rep.stages) {
    CHECK(st.estimates[0].value == 1);
    CHECK(st.estimates[1].value == 2);
    CHECK(st.estimates[2].value == 0);
    for (const auto& row : st.defects)
      for (const auto& d : row) CHECK(d == 0);
  }
}

TEST_CASE("theorem_pipeline refuses positive entropy") {
  PipelineConfig cfg;
  const auto full = full_shift(kBin, "full2");
  cfg.family = diagonal_family(full);
  cfg.automorphisms = {shift_automorphism(kBin)};
  CHECK_THROWS_AS(theorem_pipeline(cfg), GuardRefusal);
}

TEST_CASE("theorem_pipeline records threshold failures") {
  const auto p = sxs();
  PipelineConfig cfg;
  cfg.family = p.family;
  cfg.automorphisms = {shift_automorphism(p.space->alphabet())};
  cfg.stages = 1;
  cfg.n_max = 6;
  cfg.max_ratio = 1.01;
  const auto rep = theorem_pipeline(cfg);
  CHECK_FALSE(rep.passed());
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].find("growth ratio") != std::string::npos);
  cfg.n_max = 1;
  CHECK_THROWS_AS(theorem_pipeline(cfg), InputError);
}

TEST_CASE("defect bound across gallery automorphisms") {
  const auto s = sunny_side_up();
  const auto p = sxs();
  const Alphabet& a = p.space->alphabet();
  PipelineConfig cfg;
  cfg.family = p.family;
  cfg.automorphisms = {shift_automorphism(a), swap_automorphism(a),
                       embed_full_group(*s.space, sunny_transposition_cocycle()),
                       embed_full_group(*s.space, constant_cocycle(kBin, 1))};
  cfg.cylinders = {build_cylinder(*p.family, {"c", 2, 0, 0, {"1:0", "1:1"}}),
                   build_cylinder(*p.family, {"d", 1, 1, 1, {"0:1", "1:1"}})};
  cfg.stages = 3;
  cfg.n_max = 10;
  cfg.defect_matrix = false;
  const auto rep = theorem_pipeline(cfg);
  CHECK(rep.passed());
  for (const auto& st : rep.stages) {
    CHECK(st.estimates[0].value == 1);
    for (const auto& e : st.invariance) {
      INFO("stage " << st.stage << " automorphism " << e.automorphism << " cylinder " << e.cylinder);
      CHECK(boost::rational_cast<double>(e.defect) <= e.bound);
    }
    for (const auto& e : st.estimates) CHECK(abs(e.value) <= Rational(e.certificate.bound));
  }
}
