#pragma once

// Drift estimates Φ_{ν_m}(φ) = ∫ c(φ, ·) dν_m, additivity defects and the
// staged pipeline that checks Φ(σ) = 1 on zero-entropy infinite shifts.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "autdrift/asymptotic.hpp"
#include "autdrift/automorphism.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/measure.hpp"
#include "autdrift/parallel.hpp"
#include "autdrift/rational.hpp"
#include "autdrift/shift_space.hpp"

namespace autdrift {

struct DriftCertificate {
  Rational ratio;    // r_m
  Rational unique;   // u_m
  Coord bound = 0;   // B
};

struct DriftEstimate {
  std::string label;
  Rational value;
  Coord stage = 0;
  Coord radius = 0;
  DriftCertificate certificate;
};

inline DriftEstimate drift_estimate(const EmpiricalMeasure& nu, const Automorphism& a) {
  if (a.alphabet_size() != nu.windows().alphabet().size())
    throw InputError("drift_estimate: automorphism '" + a.label() + "' is over a different alphabet");
  if (nu.radius() < locality_radius(a))
    throw InputError("drift_estimate: measure radius " + std::to_string(nu.radius()) +
                     " is below the locality radius " + std::to_string(locality_radius(a)) + " of '" +
                     a.label() + "'");
  const std::int64_t sum =
      detail::parallel_sum(nu.size(), [&](std::size_t i) -> std::int64_t { return drift_cocycle(a, nu.pair(i)); });
  DriftEstimate e;
  e.label = a.label();
  e.value = Rational(sum, static_cast<std::int64_t>(nu.size()));
  e.stage = nu.stage();
  e.radius = nu.radius();
  e.certificate = {nu.selection().ratio_exact(), nu.unique_extension().exact(), cocycle_bound(a)};
  return e;
}

// |Φ(ab) − Φ(a) − Φ(b)| at the stage of ν.
inline Rational additivity_defect(const EmpiricalMeasure& nu, const Automorphism& a, const Automorphism& b) {
  const Automorphism ab = compose(a, b);
  return abs(drift_estimate(nu, ab).value - drift_estimate(nu, a).value - drift_estimate(nu, b).value);
}

// ---------------------------------------------------------------------------
// Guards

struct GuardReport {
  bool finite_detected = false;
  bool certified_zero_entropy = false;
  std::size_t entropy_length = 0;
  std::size_t word_count = 0;
  double entropy = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string diagnostic;
};

struct GuardConfig {
  double entropy_threshold = 0.05;
  std::size_t max_length = 30;
  std::size_t word_budget = 100000;  // stop growing n once P(n) passes this
};

// Infinite-shift and zero-entropy checks. The entropy estimate is taken at
// the largest n ≤ max_length reached before P(n) exceeds the word budget.
inline GuardReport entropy_guard(const ShiftSpace& s, const GuardConfig& cfg = {}) {
  if (!(cfg.entropy_threshold > 0)) throw InputError("entropy threshold must be positive");
  GuardReport g;
  g.threshold = cfg.entropy_threshold;
  g.certified_zero_entropy = s.certified_zero_entropy();
  ComplexityReport rep;
  for (std::size_t n = 1; n <= cfg.max_length; ++n) {
    const auto c = word_count(s, n);
    rep.counts[n] = c;
    g.entropy_length = n;
    g.word_count = c;
    g.entropy = std::log(static_cast<double>(c)) / static_cast<double>(n);
    if (c > cfg.word_budget) break;
  }
  g.finite_detected = rep.detects_finite();
  if (g.finite_detected) {
    g.diagnostic = "space '" + s.name() + "' is finite (P(n) stops growing); CA is empty";
    return g;
  }
  if (!g.certified_zero_entropy && g.entropy > cfg.entropy_threshold) {
    g.diagnostic = "space '" + s.name() + "': entropy estimate " + format_decimal(g.entropy) + " at n = " +
                   std::to_string(g.entropy_length) + " exceeds threshold " + format_decimal(cfg.entropy_threshold);
    return g;
  }
  g.passed = true;
  return g;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
  CAFamilyPtr family;
  std::vector<Automorphism> automorphisms;
  std::vector<Cylinder> cylinders;
  Coord stages = 3;
  Coord n_max = 12;
  GuardConfig guard;
  bool defect_matrix = true;
  std::optional<double> max_ratio;       // r_m must not exceed
  std::optional<double> min_unique;      // u_m must not fall below
  std::optional<double> max_invariance;  // every invariance defect
};

struct InvarianceEntry {
  std::size_t automorphism;
  std::size_t cylinder;
  Rational defect;
  double bound;  // 2(1 − u) + 2(r − 1) + 4b/(2n+1)
};

struct StageReport {
  Coord stage = 0;
  WindowSelection selection;
  UniqueExtension unique;
  std::vector<DriftEstimate> estimates;
  std::vector<std::vector<Rational>> defects;  // [i][j] = additivity_defect(a_i, a_j)
  std::vector<InvarianceEntry> invariance;
};

struct PipelineReport {
  std::string space;
  std::string family;
  GuardReport guard;
  Coord n_min = 1;
  std::vector<std::string> labels;
  std::vector<std::string> cylinders;
  std::vector<StageReport> stages;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

// Smallest admissible window radius: every listed automorphism, every
// pairwise composition (for the defect matrix) and every cylinder fits.
inline Coord pipeline_min_radius(const PipelineConfig& cfg) {
  Coord need = 1;
  for (const auto& a : cfg.automorphisms) need = std::max(need, locality_radius(a));
  if (cfg.defect_matrix)
    for (const auto& a : cfg.automorphisms)
      for (const auto& b : cfg.automorphisms) {
        const Coord k = a.forward().memory() + b.forward().memory();
        const Coord ki = a.inverse().memory() + b.inverse().memory();
        need = std::max(need, k + std::max(k, ki));
      }
  Coord cyl = 0;
  for (const auto& c : cfg.cylinders) cyl = std::max(cyl, c.radius);
  Coord loc = 0;
  for (const auto& a : cfg.automorphisms) loc = std::max(loc, locality_radius(a));
  return std::max(need, cyl + loc);
}

inline PipelineReport theorem_pipeline(const PipelineConfig& cfg) {
  if (!cfg.family) throw InputError("pipeline: no family");
  if (cfg.stages < 1) throw InputError("pipeline: stages must be positive");
  const CAFamily& f = *cfg.family;
  const ShiftSpace& s = *f.space();
  for (const auto& a : cfg.automorphisms)
    if (a.alphabet_size() != s.alphabet().size())
      throw InputError("pipeline: automorphism '" + a.label() + "' is over a different alphabet");

  PipelineReport rep;
  rep.space = s.name();
  rep.family = f.name();
  rep.guard = entropy_guard(s, cfg.guard);
  if (!rep.guard.passed) throw GuardRefusal("refused: " + rep.guard.diagnostic);

  rep.n_min = pipeline_min_radius(cfg);
  if (rep.n_min > cfg.n_max)
    throw InputError("pipeline: n-max " + std::to_string(cfg.n_max) + " is below the required radius " +
                     std::to_string(rep.n_min));
  for (const auto& a : cfg.automorphisms) rep.labels.push_back(a.label());
  for (const auto& c : cfg.cylinders) rep.cylinders.push_back(c.name);

  std::vector<std::optional<Coord>> shift_power;
  for (const auto& a : cfg.automorphisms) shift_power.push_back(as_shift_power(a));

  // Compositions are stage independent.
  std::vector<std::vector<Automorphism>> composed;
  if (cfg.defect_matrix) {
    composed.resize(cfg.automorphisms.size());
    for (const auto& a : cfg.automorphisms)
      for (const auto& b : cfg.automorphisms) composed[&a - cfg.automorphisms.data()].push_back(compose(a, b));
  }

  for (Coord m = 1; m <= cfg.stages; ++m) {
    StageReport st;
    st.stage = m;
    const EmpiricalMeasure nu = empirical_measure(f, m, cfg.n_max, rep.n_min);
    st.selection = nu.selection();
    st.unique = nu.unique_extension();
    const std::string where = " at stage " + std::to_string(m);

    for (std::size_t i = 0; i < cfg.automorphisms.size(); ++i) {
      st.estimates.push_back(drift_estimate(nu, cfg.automorphisms[i]));
      const auto& e = st.estimates.back();
      if (shift_power[i] && e.value != Rational(*shift_power[i]))
        rep.failures.push_back("Phi(" + e.label + ") = " + format_exact(e.value) + ", expected " +
                               std::to_string(*shift_power[i]) + where);
      if (abs(e.value) > Rational(e.certificate.bound))
        rep.failures.push_back("|Phi(" + e.label + ")| exceeds the cocycle bound" + where);
    }
    if (cfg.defect_matrix) {
      const auto n = cfg.automorphisms.size();
      st.defects.assign(n, std::vector<Rational>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          st.defects[i][j] =
              abs(drift_estimate(nu, composed[i][j]).value - st.estimates[i].value - st.estimates[j].value);
    }
    const double u = st.unique.value();
    const double r = st.selection.ratio();
    for (std::size_t i = 0; i < cfg.automorphisms.size(); ++i) {
      const double b = static_cast<double>(locality_radius(cfg.automorphisms[i]));
      const double bound = 2 * (1 - u) + 2 * (r - 1) + 4 * b / static_cast<double>(2 * nu.radius() + 1);
      for (std::size_t c = 0; c < cfg.cylinders.size(); ++c) {
        const Rational d = invariance_defect(nu, cfg.automorphisms[i], cfg.cylinders[c]);
        st.invariance.push_back({i, c, d, bound});
        if (cfg.max_invariance && boost::rational_cast<double>(d) > *cfg.max_invariance)
          rep.failures.push_back("invariance defect of '" + cfg.automorphisms[i].label() + "' on '" +
                                 cfg.cylinders[c].name + "' is " + format_decimal(d) + where);
      }
    }
    if (cfg.max_ratio && r > *cfg.max_ratio)
      rep.failures.push_back("growth ratio " + format_decimal(r) + " exceeds " + format_decimal(*cfg.max_ratio) + where);
    if (cfg.min_unique && u < *cfg.min_unique)
      rep.failures.push_back("unique-extension fraction " + format_decimal(u) + " is below " +
                             format_decimal(*cfg.min_unique) + where);
    rep.stages.push_back(std::move(st));
  }
  return rep;
}

}  // namespace autdrift
