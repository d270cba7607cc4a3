#pragma once

// Word-pair windows W_n over a family of calibrated asymptotic pairs,
// representative sections, unique-extension statistics, window-sequence
// selection, stage-m empirical measures and invariance diagnostics.
//
// A CAFamily is declared through schemas that enumerate *left-agreeing*
// pairs (x_n = y_n for all n < 0, including x = y). CA(Σ) is the part of
// that set with first difference exactly at 0. Declaring the larger set
// makes products exact: the left-agreeing pairs of A×B are precisely the
// coordinatewise pairings of left-agreeing pairs of A and of B.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "autdrift/asymptotic.hpp"
#include "autdrift/automorphism.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/parallel.hpp"
#include "autdrift/rational.hpp"
#include "autdrift/shift_space.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

struct WordPair {
  Word first;
  Word second;

  Coord radius() const { return static_cast<Coord>(first.size() / 2); }
  bool differs_at_center() const { return first[first.size() / 2] != second[second.size() / 2]; }

  // Centered restriction to a smaller radius.
  WordPair restrict_to(Coord r) const {
    const auto off = static_cast<std::ptrdiff_t>(radius() - r);
    const auto len = static_cast<std::ptrdiff_t>(2 * r + 1);
    return {Word(first.begin() + off, first.begin() + off + len),
            Word(second.begin() + off, second.begin() + off + len)};
  }

  friend auto operator<=>(const WordPair&, const WordPair&) = default;
  friend bool operator==(const WordPair&, const WordPair&) = default;
};

struct PointPair {
  Point x;
  Point y;
  friend bool operator==(const PointPair&, const PointPair&) = default;
};

// π_n(x, y).
inline WordPair project(const Point& x, const Point& y, Coord n) {
  return {window(x, -n, n), window(y, -n, n)};
}
inline WordPair project(const CalibratedPair& p, Coord n) { return project(p.x(), p.y(), n); }

// ---------------------------------------------------------------------------
// Family declaration

struct ShiftRange {
  Coord lo = 0;
  std::optional<Coord> hi;  // unbounded when empty
  friend bool operator==(const ShiftRange&, const ShiftRange&) = default;
};

// σ^j(base) for j in `shifts`, or just `base`.
struct PointTemplate {
  Point base;
  std::optional<ShiftRange> shifts;
  friend bool operator==(const PointTemplate&, const PointTemplate&) = default;
};

// All (first-instance, second-instance) combinations.
struct PairSchema {
  PointTemplate first;
  PointTemplate second;
  friend bool operator==(const PairSchema&, const PairSchema&) = default;
};

// (p, p) for every point p of the space.
struct DiagonalSchema {
  friend bool operator==(const DiagonalSchema&, const DiagonalSchema&) = default;
};

using Schema = std::variant<PairSchema, DiagonalSchema>;

class CAFamily;
using CAFamilyPtr = std::shared_ptr<const CAFamily>;

class CAFamily {
 public:
  static CAFamily leaf(std::string name, ShiftSpacePtr space, std::vector<Schema> schemas) {
    if (!space) throw InputError("family needs a space");
    for (const auto& s : schemas) {
      if (const auto* ps = std::get_if<PairSchema>(&s)) {
        ShiftSpace::check_point_symbols(ps->first.base, space->alphabet());
        ShiftSpace::check_point_symbols(ps->second.base, space->alphabet());
      }
    }
    CAFamily f;
    f.name_ = std::move(name);
    f.space_ = std::move(space);
    f.schemas_ = std::move(schemas);
    return f;
  }

  static CAFamily product(std::string name, CAFamilyPtr first, CAFamilyPtr second,
                          ShiftSpacePtr space = nullptr) {
    if (!space)
      space = std::make_shared<const ShiftSpace>(
          ShiftSpace::product(first->space()->name() + "x" + second->space()->name(), first->space(),
                              second->space()));
    if (!(space->alphabet() ==
          Alphabet::product(first->space()->alphabet(), second->space()->alphabet())))
      throw InputError("product family: space alphabet is not the product of the factor alphabets");
    CAFamily f;
    f.name_ = std::move(name);
    f.space_ = std::move(space);
    f.first_ = std::move(first);
    f.second_ = std::move(second);
    return f;
  }

  const std::string& name() const noexcept { return name_; }
  const ShiftSpacePtr& space() const noexcept { return space_; }
  bool is_product() const noexcept { return first_ != nullptr; }
  const std::vector<Schema>& schemas() const noexcept { return schemas_; }
  const CAFamilyPtr& first() const noexcept { return first_; }
  const CAFamilyPtr& second() const noexcept { return second_; }

  friend bool operator==(const CAFamily& a, const CAFamily& b) {
    if (a.name_ != b.name_ || !(*a.space_ == *b.space_) || a.schemas_ != b.schemas_) return false;
    if (a.is_product() != b.is_product()) return false;
    return !a.is_product() || (*a.first_ == *b.first_ && *a.second_ == *b.second_);
  }

 private:
  CAFamily() = default;

  std::string name_;
  ShiftSpacePtr space_;
  std::vector<Schema> schemas_;
  CAFamilyPtr first_;
  CAFamilyPtr second_;
};

namespace detail {

// Instances σ^j(base) realizing every window the template can show at radius n.
inline std::vector<Point> expand_template(const PointTemplate& t, Coord n) {
  if (!t.shifts) return {t.base};
  // For j beyond n - left_bound the window lies in the left periodic region
  // and repeats with the left period.
  Coord top = std::max(t.shifts->lo, n - t.base.left_bound() + t.base.left_period());
  if (t.shifts->hi) top = std::min(top, *t.shifts->hi);
  std::vector<Point> out;
  for (Coord j = t.shifts->lo; j <= top; ++j) out.push_back(shift_point(t.base, j));
  return out;
}

inline void append_instances(const CAFamily& f, Coord n, const EnumerationCap& cap,
                             std::vector<PointPair>& out) {
  for (const auto& schema : f.schemas()) {
    if (std::holds_alternative<DiagonalSchema>(schema)) {
      for (auto& p : window_points(*f.space(), n, cap)) out.push_back({p, p});
      continue;
    }
    const auto& ps = std::get<PairSchema>(schema);
    const auto xs = expand_template(ps.first, n);
    const auto ys = expand_template(ps.second, n);
    for (const auto& x : xs) {
      for (const auto& y : ys) {
        const Difference d = first_difference(x, y);
        if (d.kind() == Difference::Kind::not_asymptotic || (d.is_index() && d.index() < 0))
          throw FamilyError("family '" + f.name() + "': instance (" +
                            format_point(x, f.space()->alphabet()) + " ; " +
                            format_point(y, f.space()->alphabet()) + ") is not left-agreeing");
        out.push_back({x, y});
      }
    }
    if (out.size() > cap.max_words) throw ResourceError("family instances exceed enumeration cap");
  }
}

}  // namespace detail

// The distinct radius-n projections of a family's left-agreeing pairs, each
// with one representative instance. Leaves are materialized; products are
// indexed implicitly (element i = (i / |second|, i % |second|)).
class PairWindows {
 public:
  using Ptr = std::shared_ptr<const PairWindows>;

  static Ptr build(const CAFamily& f, Coord n, const EnumerationCap& cap = {}) {
    if (n < 0) throw InputError("radius must be non-negative");
    auto w = std::shared_ptr<PairWindows>(new PairWindows());
    w->radius_ = n;
    w->alphabet_ = f.space()->alphabet();
    if (f.is_product()) {
      w->a_ = build(*f.first(), n, cap);
      w->b_ = build(*f.second(), n, cap);
      w->size_ = w->a_->size() * w->b_->size();
      w->center_ = w->size_ - (w->a_->size() - w->a_->center_count()) *
                                  (w->b_->size() - w->b_->center_count());
      return w;
    }
    std::vector<PointPair> inst;
    detail::append_instances(f, n, cap, inst);
    std::vector<std::pair<WordPair, std::size_t>> keyed;
    keyed.reserve(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) keyed.emplace_back(project(inst[i].x, inst[i].y, n), i);
    // First instance in generation order wins.
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (!w->proj_.empty() && keyed[i].first == w->proj_.back()) continue;
      w->cd_.push_back(keyed[i].first.differs_at_center() ? 1 : 0);
      w->proj_.push_back(std::move(keyed[i].first));
      w->inst_.push_back(inst[keyed[i].second]);
    }
    w->size_ = w->proj_.size();
    w->center_ = static_cast<std::size_t>(std::count(w->cd_.begin(), w->cd_.end(), 1));
    return w;
  }

  Coord radius() const noexcept { return radius_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  bool is_product() const noexcept { return a_ != nullptr; }
  const Ptr& first() const noexcept { return a_; }
  const Ptr& second() const noexcept { return b_; }

  // Number of left-agreeing projections.
  std::size_t size() const noexcept { return size_; }
  // |W_n|: projections that differ at the center.
  std::size_t center_count() const noexcept { return center_; }

  bool differs_at_center(std::size_t i) const {
    if (!a_) return cd_[i] != 0;
    return a_->differs_at_center(i / b_->size()) || b_->differs_at_center(i % b_->size());
  }

  WordPair word_pair(std::size_t i) const {
    if (!a_) return proj_[i];
    const WordPair pa = a_->word_pair(i / b_->size());
    const WordPair pb = b_->word_pair(i % b_->size());
    return {detail::zip_words(pa.first, pb.first, alphabet_),
            detail::zip_words(pa.second, pb.second, alphabet_)};
  }

  PointPair instance(std::size_t i) const {
    if (!a_) return inst_[i];
    const PointPair pa = a_->instance(i / b_->size());
    const PointPair pb = b_->instance(i % b_->size());
    return {zip_points(pa.x, pb.x, alphabet_), zip_points(pa.y, pb.y, alphabet_)};
  }

  // Indices of the elements of W_n, ascending.
  std::vector<std::size_t> center_indices() const {
    std::vector<std::size_t> out;
    out.reserve(center_);
    for (std::size_t i = 0; i < size_; ++i)
      if (differs_at_center(i)) out.push_back(i);
    return out;
  }

 private:
  PairWindows() = default;

  Coord radius_ = 0;
  Alphabet alphabet_;
  std::size_t size_ = 0;
  std::size_t center_ = 0;
  std::vector<WordPair> proj_;
  std::vector<PointPair> inst_;
  std::vector<char> cd_;
  Ptr a_;
  Ptr b_;
};

inline std::size_t word_pair_count(const CAFamily& f, Coord n, const EnumerationCap& cap = {}) {
  return PairWindows::build(f, n, cap)->center_count();
}

namespace detail {

inline std::vector<std::pair<WordPair, PointPair>> materialize_center(const PairWindows& w) {
  std::vector<std::pair<WordPair, PointPair>> out;
  for (std::size_t i : w.center_indices()) out.emplace_back(w.word_pair(i), w.instance(i));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace detail

// W_n, sorted.
inline std::vector<WordPair> word_pairs(const CAFamily& f, Coord n, const EnumerationCap& cap = {}) {
  auto w = PairWindows::build(f, n, cap);
  if (w->center_count() > cap.max_words) throw ResourceError("word_pairs: W_n exceeds enumeration cap");
  std::vector<WordPair> out;
  for (auto& [wp, inst] : detail::materialize_center(*w)) out.push_back(std::move(wp));
  return out;
}

// W̄_n: one calibrated pair per element of W_n, aligned with word_pairs(f, n).
inline std::vector<CalibratedPair> representatives(const CAFamily& f, Coord n, const EnumerationCap& cap = {}) {
  auto w = PairWindows::build(f, n, cap);
  if (w->center_count() > cap.max_words)
    throw ResourceError("representatives: W_n exceeds enumeration cap");
  std::vector<CalibratedPair> out;
  for (auto& [wp, inst] : detail::materialize_center(*w)) {
    if (project(inst.x, inst.y, n) != wp)
      throw FamilyError("family '" + f.name() + "' does not realize a claimed word pair");
    out.emplace_back(inst.x, inst.y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unique extensions

// Counts of left-agreeing radius-n projections by (differs at center, has a
// unique extension to radius n+m).
struct ExtensionHistogram {
  std::array<std::array<std::uint64_t, 2>, 2> count{};  // [center][unique]
};

inline ExtensionHistogram extension_histogram(const CAFamily& f, Coord n, Coord m,
                                              const EnumerationCap& cap = {}) {
  ExtensionHistogram h;
  if (f.is_product()) {
    const auto ha = extension_histogram(*f.first(), n, m, cap);
    const auto hb = extension_histogram(*f.second(), n, m, cap);
    for (int ca = 0; ca < 2; ++ca)
      for (int ua = 0; ua < 2; ++ua)
        for (int cb = 0; cb < 2; ++cb)
          for (int ub = 0; ub < 2; ++ub)
            h.count[ca | cb][ua & ub] += ha.count[ca][ua] * hb.count[cb][ub];
    return h;
  }
  auto small = PairWindows::build(f, n, cap);
  auto large = PairWindows::build(f, n + m, cap);
  std::map<WordPair, std::uint64_t> ext;
  for (std::size_t i = 0; i < large->size(); ++i) ++ext[large->word_pair(i).restrict_to(n)];
  for (std::size_t i = 0; i < small->size(); ++i) {
    auto it = ext.find(small->word_pair(i));
    const bool unique = it != ext.end() && it->second == 1;
    ++h.count[small->differs_at_center(i) ? 1 : 0][unique ? 1 : 0];
  }
  return h;
}

struct UniqueExtension {
  std::uint64_t unique = 0;
  std::uint64_t total = 0;
  Rational exact() const {
    return total == 0 ? Rational(1) : Rational(static_cast<std::int64_t>(unique), static_cast<std::int64_t>(total));
  }
  double value() const { return boost::rational_cast<double>(exact()); }
};

// Fraction of W_n whose elements are the restriction of exactly one element
// of W_{n+m} (the sets U_m).
inline UniqueExtension unique_extension_fraction(const CAFamily& f, Coord n, Coord m,
                                                 const EnumerationCap& cap = {}) {
  if (m < 0) throw InputError("margin must be non-negative");
  const auto h = extension_histogram(f, n, m, cap);
  return {h.count[1][1], h.count[1][0] + h.count[1][1]};
}

// ---------------------------------------------------------------------------
// Window sequence and empirical measures

struct WindowSelection {
  Coord radius = 0;
  std::uint64_t size = 0;           // |W_n|
  std::uint64_t extended_size = 0;  // |W_{n+m}|
  Rational ratio_exact() const {
    return Rational(static_cast<std::int64_t>(extended_size), static_cast<std::int64_t>(size));
  }
  double ratio() const { return boost::rational_cast<double>(ratio_exact()); }
};

// argmin over n in [n_min, n_max] of |W_{n+m}| / |W_n|, ties to the smallest n.
inline WindowSelection select_window_sequence(const CAFamily& f, Coord m, Coord n_max, Coord n_min = 1,
                                              const EnumerationCap& cap = {}) {
  if (m < 0) throw InputError("stage must be non-negative");
  if (n_min < 0 || n_max < n_min) throw InputError("select_window_sequence: empty radius range");
  if (n_max + m > static_cast<Coord>(cap.max_length))
    throw ResourceError("select_window_sequence: radius " + std::to_string(n_max + m) +
                        " exceeds enumeration cap");
  std::vector<std::uint64_t> counts;
  for (Coord n = n_min; n <= n_max + m; ++n) counts.push_back(word_pair_count(f, n, cap));
  std::optional<WindowSelection> best;
  for (Coord n = n_min; n <= n_max; ++n) {
    const auto a = counts[static_cast<std::size_t>(n - n_min)];
    const auto b = counts[static_cast<std::size_t>(n + m - n_min)];
    if (a == 0) continue;
    if (!best || static_cast<unsigned __int128>(b) * best->size <
                     static_cast<unsigned __int128>(best->extended_size) * a)
      best = WindowSelection{n, a, b};
  }
  if (!best) throw FamilyError("family '" + f.name() + "' has no calibrated pairs in range");
  return *best;
}

// ν_m: the uniform measure on W̄_{n_m}. The support is held as indices into
// the stage's PairWindows and materialized on demand.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(Coord stage, WindowSelection selection, PairWindows::Ptr windows,
                   UniqueExtension unique = {})
      : stage_(stage), selection_(selection), unique_(unique), windows_(std::move(windows)),
        support_(windows_->center_indices()) {
    if (support_.empty()) throw FamilyError("empirical measure with empty support");
  }

  Coord stage() const noexcept { return stage_; }
  Coord radius() const noexcept { return windows_->radius(); }
  const WindowSelection& selection() const noexcept { return selection_; }
  // Share of the support extending uniquely to radius + stage.
  const UniqueExtension& unique_extension() const noexcept { return unique_; }
  const PairWindows& windows() const noexcept { return *windows_; }
  std::size_t size() const noexcept { return support_.size(); }
  Rational weight() const { return Rational(1, static_cast<std::int64_t>(support_.size())); }
  Rational total_mass() const { return weight() * static_cast<std::int64_t>(support_.size()); }

  CalibratedPair pair(std::size_t i) const {
    PointPair p = windows_->instance(support_[i]);
    return CalibratedPair(std::move(p.x), std::move(p.y));
  }
  WordPair projection(std::size_t i) const { return windows_->word_pair(support_[i]); }

  std::vector<CalibratedPair> support() const {
    std::vector<CalibratedPair> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(pair(i));
    return out;
  }

 private:
  Coord stage_;
  WindowSelection selection_;
  UniqueExtension unique_;
  PairWindows::Ptr windows_;
  std::vector<std::size_t> support_;
};

inline EmpiricalMeasure empirical_measure(const CAFamily& f, Coord m, Coord n_max, Coord n_min = 1,
                                          const EnumerationCap& cap = {}) {
  const auto sel = select_window_sequence(f, m, n_max, n_min, cap);
  return EmpiricalMeasure(m, sel, PairWindows::build(f, sel.radius, cap),
                          unique_extension_fraction(f, sel.radius, m, cap));
}

// The clopen set π_n^{-1}(accepted) ⊆ CA(Σ).
struct Cylinder {
  std::string name;
  Coord radius = 0;
  std::set<WordPair> accepted;

  bool contains(const CalibratedPair& p) const { return accepted.count(project(p, radius)) != 0; }
  bool contains(const WordPair& w) const { return accepted.count(w.restrict_to(radius)) != 0; }
};

// |ν(φ̂^{-1}E) − ν(E)|, by direct evaluation on the support.
inline Rational invariance_defect(const EmpiricalMeasure& nu, const Automorphism& a, const Cylinder& e) {
  if (e.radius > nu.radius() - locality_radius(a))
    throw InputError("invariance_defect: cylinder radius " + std::to_string(e.radius) +
                     " exceeds measure radius minus locality radius");
  const std::int64_t diff = detail::parallel_sum(nu.size(), [&](std::size_t i) -> std::int64_t {
    const CalibratedPair p = nu.pair(i);
    const int before = e.contains(p) ? 1 : 0;
    const int after = e.contains(act(a, p)) ? 1 : 0;
    return after - before;
  });
  return abs(Rational(diff, static_cast<std::int64_t>(nu.size())));
}

// ---------------------------------------------------------------------------
// Independent window search and family validation

// Word pairs of Σ of radius n that agree left of the center and differ at
// it. Every element of W_n is among them; for the gallery spaces at n ≥ 1
// the two sets coincide.
inline std::vector<WordPair> search_word_pairs(const ShiftSpace& s, Coord n, const EnumerationCap& cap = {}) {
  const auto ws = words(s, static_cast<std::size_t>(2 * n + 1), cap);
  std::map<Word, std::vector<const Word*>> by_prefix;
  for (const auto& w : ws) by_prefix[Word(w.begin(), w.begin() + n)].push_back(&w);
  std::vector<WordPair> out;
  for (const auto& [prefix, group] : by_prefix)
    for (const Word* a : group)
      for (const Word* b : group)
        if ((*a)[static_cast<std::size_t>(n)] != (*b)[static_cast<std::size_t>(n)]) out.push_back({*a, *b});
  std::sort(out.begin(), out.end());
  return out;
}

struct FamilyValidation {
  struct Radius {
    Coord radius;
    std::size_t family_count;
    std::size_t search_count;
    bool sound;     // every family word pair is found by the search
    bool complete;  // and nothing else is
  };
  std::string family;
  std::vector<Radius> radii;
  std::vector<std::string> failures;

  bool passed() const {
    if (!failures.empty()) return false;
    for (const auto& r : radii)
      if (!r.sound || !r.complete) return false;
    return true;
  }
};

namespace detail {

inline void check_leaf_membership(const CAFamily& f, Coord n, const EnumerationCap& cap,
                                  std::vector<std::string>& failures) {
  if (f.is_product()) {
    check_leaf_membership(*f.first(), n, cap, failures);
    check_leaf_membership(*f.second(), n, cap, failures);
    return;
  }
  std::vector<PointPair> inst;
  append_instances(f, n, cap, inst);
  std::set<Point> checked;
  for (const auto& pp : inst) {
    for (const Point* p : {&pp.x, &pp.y}) {
      if (!checked.insert(*p).second) continue;
      if (!is_point_in(*f.space(), *p))
        failures.push_back("family '" + f.name() + "': instance point " +
                           format_point(*p, f.space()->alphabet()) + " is not in " + f.space()->name());
    }
  }
}

}  // namespace detail

inline FamilyValidation validate_family(const CAFamily& f, Coord max_radius, Coord min_radius = 1,
                                        const EnumerationCap& cap = {}) {
  FamilyValidation v;
  v.family = f.name();
  try {
    detail::check_leaf_membership(f, max_radius, cap, v.failures);
    for (Coord n = min_radius; n <= max_radius; ++n) {
      const auto fam = word_pairs(f, n, cap);
      const auto found = search_word_pairs(*f.space(), n, cap);
      const bool sound = std::includes(found.begin(), found.end(), fam.begin(), fam.end());
      v.radii.push_back({n, fam.size(), found.size(), sound, sound && fam.size() == found.size()});
    }
  } catch (const FamilyError& e) {
    v.failures.push_back(e.what());
  }
  return v;
}

}  // namespace autdrift
