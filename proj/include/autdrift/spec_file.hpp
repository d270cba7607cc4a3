#pragma once

// The `driftspec` text format: named spaces, orbit cocycles, automorphisms,
// CA families and runs, plus an exporter producing text that parses back to
// equal objects. The grammar is documented in README.md.

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autdrift/automorphism.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/gallery.hpp"
#include "autdrift/measure.hpp"
#include "autdrift/shift_space.hpp"
#include "autdrift/symbolic.hpp"

namespace autdrift {

inline constexpr int kSpecVersion = 1;

struct CylinderSpec {
  std::string name;
  Coord radius = 0;
  int point = 0;  // 0: x, 1: y
  Coord coord = 0;
  std::vector<std::string> symbols;
};

// {(x, y) : (x or y)_coord ∈ symbols}, as a radius-r cylinder of the family.
inline Cylinder build_cylinder(const CAFamily& f, const CylinderSpec& c) {
  if (c.radius < 0 || c.coord < -c.radius || c.coord > c.radius)
    throw InputError("cylinder '" + c.name + "': coordinate outside its radius");
  const Alphabet& a = f.space()->alphabet();
  std::set<Symbol> syms;
  for (const auto& s : c.symbols) syms.insert(a.symbol(s));
  Cylinder out{c.name, c.radius, {}};
  for (auto& wp : word_pairs(f, c.radius)) {
    const Word& w = c.point == 0 ? wp.first : wp.second;
    if (syms.count(w[static_cast<std::size_t>(c.coord + c.radius)])) out.accepted.insert(std::move(wp));
  }
  return out;
}

struct AutomorphismDef {
  enum class Kind { shift, identity, swap, permutation, blockmap, embed, compose };
  Kind kind = Kind::identity;
  std::string space;
  Coord power = 1;
  std::string cocycle;
  std::string first, second;
};

struct RunSpec {
  std::string name;
  std::string space;
  std::string family;
  std::vector<std::string> automorphisms;
  std::vector<CylinderSpec> cylinders;
  std::vector<std::pair<Point, Point>> pairs;
  std::vector<std::pair<std::string, std::string>> compositions;
  Coord stages = 3;
  Coord n_max = 12;
  double entropy_threshold = 0.05;
  std::optional<double> max_ratio;
  std::optional<double> min_unique;
  std::optional<double> max_invariance;
  std::size_t verify_length = 0;  // 0: 2(k + k′) + 3
  Coord validate_radius = 3;
  bool defect_matrix = true;
};

struct CocycleEntry {
  OrbitCocycle cocycle;
  std::string space;
};

class SpecFile {
 public:
  const ShiftSpacePtr& space(const std::string& name) const { return lookup(spaces_, name, "space"); }
  const CAFamilyPtr& family(const std::string& name) const { return lookup(families_, name, "family"); }
  const Automorphism& automorphism(const std::string& name) const {
    return lookup(automorphisms_, name, "automorphism");
  }
  const AutomorphismDef& automorphism_def(const std::string& name) const {
    return lookup(automorphism_defs_, name, "automorphism");
  }
  const CocycleEntry& cocycle(const std::string& name) const { return lookup(cocycles_, name, "cocycle"); }
  const RunSpec& run(const std::string& name) const { return lookup(runs_, name, "run"); }

  const std::vector<std::string>& space_names() const noexcept { return space_order_; }
  const std::vector<std::string>& family_names() const noexcept { return family_order_; }
  const std::vector<std::string>& automorphism_names() const noexcept { return automorphism_order_; }
  const std::vector<std::string>& cocycle_names() const noexcept { return cocycle_order_; }
  const std::vector<std::string>& run_names() const noexcept { return run_order_; }

  void add_space(const std::string& name, ShiftSpacePtr s) { insert(spaces_, space_order_, name, std::move(s), "space"); }
  void add_family(const std::string& name, CAFamilyPtr f) {
    insert(families_, family_order_, name, std::move(f), "family");
  }
  void add_cocycle(const std::string& name, CocycleEntry c) {
    space(c.space);
    insert(cocycles_, cocycle_order_, name, std::move(c), "cocycle");
  }
  void add_automorphism(const std::string& name, AutomorphismDef def);
  // Explicit block-map pair; permutations are memory-0 tables.
  void add_table_automorphism(const std::string& name, const std::string& space, BlockMap forward,
                              BlockMap inverse, bool permutation) {
    const ShiftSpacePtr& s = this->space(space);
    if (forward.alphabet_size() != s->alphabet().size() || inverse.alphabet_size() != s->alphabet().size())
      throw InputError("automorphism '" + name + "': table alphabet differs from space '" + space + "'");
    AutomorphismDef def;
    def.kind = permutation ? AutomorphismDef::Kind::permutation : AutomorphismDef::Kind::blockmap;
    def.space = space;
    insert(automorphisms_, automorphism_order_, name, Automorphism(name, std::move(forward), std::move(inverse)),
           "automorphism");
    automorphism_defs_.emplace(name, std::move(def));
  }
  void add_run(RunSpec r);

  // Name under which `s` is registered, if any.
  std::optional<std::string> name_of(const ShiftSpace* s) const {
    for (const auto& n : space_order_)
      if (spaces_.at(n).get() == s) return n;
    return std::nullopt;
  }
  std::optional<std::string> name_of(const CAFamily* f) const {
    for (const auto& n : family_order_)
      if (families_.at(n).get() == f) return n;
    return std::nullopt;
  }

 private:
  template <typename T>
  static const T& lookup(const std::map<std::string, T>& m, const std::string& name, const char* kind) {
    auto it = m.find(name);
    if (it == m.end()) throw InputError(std::string("unresolved reference: ") + kind + " '" + name + "'");
    return it->second;
  }
  template <typename T>
  static void insert(std::map<std::string, T>& m, std::vector<std::string>& order, const std::string& name, T v,
                     const char* kind) {
    if (!m.emplace(name, std::move(v)).second)
      throw InputError(std::string("duplicate ") + kind + " '" + name + "'");
    order.push_back(name);
  }

  std::map<std::string, ShiftSpacePtr> spaces_;
  std::map<std::string, CAFamilyPtr> families_;
  std::map<std::string, Automorphism> automorphisms_;
  std::map<std::string, AutomorphismDef> automorphism_defs_;
  std::map<std::string, CocycleEntry> cocycles_;
  std::map<std::string, RunSpec> runs_;
  std::vector<std::string> space_order_, family_order_, automorphism_order_, cocycle_order_, run_order_;
};

namespace detail {

// The base Σ of a space Σ × S.
inline ShiftSpacePtr embed_base(const ShiftSpace& s) {
  const auto* p = s.as_product();
  if (!p || !(p->second->alphabet() == binary_alphabet()))
    throw InputError("full-group-embed needs a space of the form base x S");
  return p->first;
}

inline Automorphism build_automorphism(const SpecFile& spec, const std::string& name, const AutomorphismDef& d) {
  using K = AutomorphismDef::Kind;
  switch (d.kind) {
    case K::shift:
      return shift_automorphism(spec.space(d.space)->alphabet(), d.power).relabeled(name);
    case K::identity:
      return identity_automorphism(spec.space(d.space)->alphabet()).relabeled(name);
    case K::swap:
      return swap_automorphism(spec.space(d.space)->alphabet()).relabeled(name);
    case K::permutation:
    case K::blockmap:
      throw InputError("table automorphisms are added with add_table_automorphism");
    case K::embed: {
      const auto& s = *spec.space(d.space);
      const auto& c = spec.cocycle(d.cocycle);
      auto a = embed_full_group(*embed_base(s), c.cocycle);
      if (a.alphabet_size() != s.alphabet().size()) throw InputError("embed: alphabet mismatch");
      return a.relabeled(name);
    }
    case K::compose:
      return compose(spec.automorphism(d.first), spec.automorphism(d.second)).relabeled(name);
  }
  throw InputError("unknown automorphism kind");
}

}  // namespace detail

inline void SpecFile::add_automorphism(const std::string& name, AutomorphismDef def) {
  using K = AutomorphismDef::Kind;
  Automorphism a = detail::build_automorphism(*this, name, def);
  if (def.kind == K::compose) def.space = automorphism_def(def.first).space;
  space(def.space);
  insert(automorphisms_, automorphism_order_, name, std::move(a), "automorphism");
  automorphism_defs_.emplace(name, std::move(def));
}

inline void SpecFile::add_run(RunSpec r) {
  space(r.space);
  const auto& f = family(r.family);
  if (!(f->space()->alphabet() == space(r.space)->alphabet()))
    throw InputError("run '" + r.name + "': family '" + r.family + "' is not over space '" + r.space + "'");
  for (const auto& a : r.automorphisms) {
    if (automorphism(a).alphabet_size() != space(r.space)->alphabet().size())
      throw InputError("run '" + r.name + "': automorphism '" + a + "' is over a different alphabet");
  }
  for (const auto& [a, b] : r.compositions) {
    automorphism(a);
    automorphism(b);
  }
  if (r.stages < 1 || r.n_max < 1) throw InputError("run '" + r.name + "': stages and n-max must be positive");
  if (!(r.entropy_threshold > 0)) throw InputError("run '" + r.name + "': thresholds must be positive");
  for (const auto* t : {&r.max_ratio, &r.min_unique, &r.max_invariance})
    if (*t && !(**t > 0)) throw InputError("run '" + r.name + "': thresholds must be positive");
  std::string name = r.name;
  insert(runs_, run_order_, name, std::move(r), "run");
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Token {
  std::string text;
  int column;
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (trim(raw).empty()) continue;
      lines_.push_back({no, raw});
    }
  }

  SpecFile parse() {
    if (lines_.empty()) throw ParseError("empty spec file (expected 'driftspec 1')", 1, 1);
    {
      const auto t = tokenize(lines_[0].text);
      if (t.size() != 2 || t[0].text != "driftspec") fail(0, t.empty() ? 1 : t[0].column, "expected header 'driftspec <version>'");
      if (t[1].text != std::to_string(kSpecVersion))
        fail(0, t[1].column, "unsupported spec version '" + t[1].text + "'");
    }
    pos_ = 1;
    while (pos_ < lines_.size()) statement();
    return std::move(spec_);
  }

 private:
  struct Line {
    int no;
    std::string text;
  };

  [[noreturn]] void fail(std::size_t line, int column, const std::string& what) const {
    throw ParseError(what, lines_[line].no, column);
  }

  // Re-raise library input errors with the current line attached.
  template <typename F>
  auto at_line(std::size_t line, int column, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError& e) {
      if (e.line() > 0) throw;
      fail(line, column, e.what());
    } catch (const InputError& e) {
      fail(line, column, e.what());
    }
  }

  void statement() {
    const std::size_t l = pos_;
    const auto t = tokenize(lines_[l].text);
    const std::string& kw = t[0].text;
    if (kw == "space") return space_stmt(l, t);
    if (kw == "cocycle") return cocycle_stmt(l, t);
    if (kw == "automorphism") return automorphism_stmt(l, t);
    if (kw == "family") return family_stmt(l, t);
    if (kw == "run") return run_stmt(l, t);
    fail(l, t[0].column, "unknown statement '" + kw + "'");
  }

  // `<kw> <name> = <kind> ...`: returns index of the kind token.
  std::size_t header(std::size_t l, const std::vector<Token>& t, const char* kw) {
    if (t.size() < 4 || t[2].text != "=")
      fail(l, t[0].column, std::string("expected '") + kw + " <name> = <definition>'");
    check_name(l, t[1]);
    return 3;
  }

  void check_name(std::size_t l, const Token& t) {
    for (char c : t.text)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '+'))
        fail(l, t.column, "invalid name '" + t.text + "' (letters, digits, _ . - + only)");
  }

  // Lines up to the matching `end`.
  std::vector<std::size_t> block() {
    const std::size_t open = pos_;
    std::vector<std::size_t> body;
    for (++pos_; pos_ < lines_.size(); ++pos_) {
      if (trim(lines_[pos_].text) == "end") {
        ++pos_;
        return body;
      }
      body.push_back(pos_);
    }
    fail(open, 1, "block is not closed with 'end'");
  }

  void expect_end_of(std::size_t l, const std::vector<Token>& t, std::size_t n) {
    if (t.size() > n) fail(l, t[n].column, "unexpected '" + t[n].text + "'");
    if (t.size() < n) fail(l, static_cast<int>(lines_[l].text.size()) + 1, "statement is incomplete");
  }

  // Text after the first `skip` tokens.
  std::string rest(std::size_t l, const std::vector<Token>& t, std::size_t skip) const {
    if (skip >= t.size()) return "";
    return lines_[l].text.substr(static_cast<std::size_t>(t[skip].column - 1));
  }

  static std::optional<std::string> call_arg(const std::string& tok, const std::string& fn) {
    if (tok.size() > fn.size() + 2 && tok.compare(0, fn.size() + 1, fn + "(") == 0 && tok.back() == ')')
      return tok.substr(fn.size() + 1, tok.size() - fn.size() - 2);
    return std::nullopt;
  }

  Coord integer(std::size_t l, const Token& t) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(t.text, &used);
      if (used == t.text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(l, t.column, "expected an integer, got '" + t.text + "'");
  }

  double real(std::size_t l, const Token& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t.text, &used);
      if (used == t.text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(l, t.column, "expected a number, got '" + t.text + "'");
  }

  // --- spaces -------------------------------------------------------------

  void space_stmt(std::size_t l, const std::vector<Token>& t) {
    const std::size_t k = header(l, t, "space");
    const std::string& name = t[1].text;
    const std::string& kind = t[k].text;
    ShiftSpacePtr s;
    if (kind == "orbit-closure" || kind == "sofic") {
      expect_end_of(l, t, k + 1);
      s = kind == "sofic" ? sofic_body(name) : orbit_body(name);
    } else if (kind == "product") {
      expect_end_of(l, t, k + 3);
      auto a = resolve_space(l, t[k + 1]);
      auto b = resolve_space(l, t[k + 2]);
      s = std::make_shared<const ShiftSpace>(ShiftSpace::product(name, a, b));
      ++pos_;
    } else if (kind == "sunny-side-up") {
      expect_end_of(l, t, k + 1);
      s = std::make_shared<const ShiftSpace>(ShiftSpace::orbit_closure(name, binary_alphabet(), {sunny_point()}));
      ++pos_;
    } else if (auto base = call_arg(kind, "product-with-s")) {
      expect_end_of(l, t, k + 1);
      auto b = resolve_space(l, {*base, t[k].column + 15});
      s = std::make_shared<const ShiftSpace>(ShiftSpace::product(name, b, sunny_side_up_space()));
      ++pos_;
    } else {
      fail(l, t[k].column, "unknown space kind '" + kind + "'");
    }
    at_line(l, t[1].column, [&] { spec_.add_space(name, s); });
  }

  ShiftSpacePtr resolve_space(std::size_t l, const Token& t) {
    return at_line(l, t.column, [&] { return spec_.space(t.text); });
  }

  std::optional<Alphabet> alphabet_line(std::size_t l, const std::vector<Token>& t) {
    if (t[0].text != "alphabet") return std::nullopt;
    if (t.size() < 2) fail(l, t[0].column, "alphabet needs at least one symbol");
    std::vector<std::string> names;
    for (std::size_t i = 1; i < t.size(); ++i) names.push_back(t[i].text);
    return at_line(l, t[1].column, [&] { return Alphabet(names); });
  }

  ShiftSpacePtr orbit_body(const std::string& name) {
    const std::size_t open = pos_;
    std::optional<Alphabet> alpha;
    std::vector<Point> gens;
    for (std::size_t l : block()) {
      const auto t = tokenize(lines_[l].text);
      if (auto a = alphabet_line(l, t)) {
        if (alpha) fail(l, t[0].column, "alphabet given twice");
        alpha = std::move(a);
      } else if (t[0].text == "point") {
        if (!alpha) fail(l, t[0].column, "'alphabet' must precede points");
        if (t.size() < 2) fail(l, t[0].column, "point needs a literal");
        gens.push_back(at_line(l, t[1].column, [&] { return parse_point(rest(l, t, 1), *alpha); }));
      } else {
        fail(l, t[0].column, "expected 'alphabet' or 'point'");
      }
    }
    if (!alpha) fail(open, 1, "orbit-closure needs an alphabet");
    return at_line(open, 1, [&] {
      return std::make_shared<const ShiftSpace>(ShiftSpace::orbit_closure(name, *alpha, gens));
    });
  }

  ShiftSpacePtr sofic_body(const std::string& name) {
    const std::size_t open = pos_;
    std::optional<Alphabet> alpha;
    SoficAutomaton aut;
    std::map<std::string, std::size_t> states;
    auto state = [&](const std::string& n) {
      auto [it, fresh] = states.emplace(n, aut.states.size());
      if (fresh) aut.states.push_back(n);
      return it->second;
    };
    for (std::size_t l : block()) {
      const auto t = tokenize(lines_[l].text);
      if (auto a = alphabet_line(l, t)) {
        if (alpha) fail(l, t[0].column, "alphabet given twice");
        alpha = std::move(a);
      } else if (t[0].text == "edge") {
        if (!alpha) fail(l, t[0].column, "'alphabet' must precede edges");
        expect_end_of(l, t, 4);
        const Symbol sym = at_line(l, t[2].column, [&] { return alpha->symbol(t[2].text); });
        const std::size_t from = state(t[1].text);
        aut.edges.push_back({from, sym, state(t[3].text)});
      } else {
        fail(l, t[0].column, "expected 'alphabet' or 'edge'");
      }
    }
    if (!alpha) fail(open, 1, "sofic needs an alphabet");
    return at_line(open, 1, [&] {
      return std::make_shared<const ShiftSpace>(ShiftSpace::sofic(name, *alpha, std::move(aut)));
    });
  }

  // --- patterns -----------------------------------------------------------

  // Comma-separated symbols or `*`; returns nullopt entries for wildcards.
  std::vector<std::optional<Symbol>> pattern(std::size_t l, const Token& t, const Alphabet& a, std::size_t len) {
    std::vector<std::optional<Symbol>> out;
    std::size_t start = 0;
    const std::string& s = t.text;
    while (true) {
      const std::size_t comma = s.find(',', start);
      const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (item == "*")
        out.push_back(std::nullopt);
      else
        out.push_back(at_line(l, t.column + static_cast<int>(start), [&] { return a.symbol(item); }));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (out.size() != len)
      fail(l, t.column, "pattern has " + std::to_string(out.size()) + " symbols, expected " + std::to_string(len));
    return out;
  }

  static bool matches(const std::vector<std::optional<Symbol>>& p, const Word& w) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] && *p[i] != w[i]) return false;
    return true;
  }

  // --- cocycles -----------------------------------------------------------

  void cocycle_stmt(std::size_t l, const std::vector<Token>& t) {
    const std::size_t k = header(l, t, "cocycle");
    const std::string& name = t[1].text;
    if (t[k].text != "rule" || t.size() != k + 5 || t[k + 1].text != "on" || t[k + 3].text != "radius")
      fail(l, t[k].column, "expected 'cocycle <name> = rule on <space> radius <r>'");
    auto s = resolve_space(l, t[k + 2]);
    const Coord r = integer(l, t[k + 4]);
    if (r < 0 || r > 4) fail(l, t[k + 4].column, "cocycle radius must be in [0, 4]");
    const std::size_t len = static_cast<std::size_t>(2 * r + 1);
    std::vector<std::pair<std::vector<std::optional<Symbol>>, int>> rules;
    for (std::size_t bl : block()) {
      const auto bt = tokenize(lines_[bl].text);
      if (bt.size() != 3 || bt[1].text != "->") fail(bl, bt[0].column, "expected '<pattern> -> <integer>'");
      rules.emplace_back(pattern(bl, bt[0], s->alphabet(), len), static_cast<int>(integer(bl, bt[2])));
    }
    auto c = at_line(l, t[1].column, [&] {
      return OrbitCocycle::from_rule(name, s->alphabet(), r, [&](std::span<const Symbol> w) {
        const Word word(w.begin(), w.end());
        for (const auto& [p, v] : rules)
          if (matches(p, word)) return v;
        return 0;
      });
    });
    at_line(l, t[1].column, [&] { spec_.add_cocycle(name, {std::move(c), t[k + 2].text}); });
  }

  // --- automorphisms ------------------------------------------------------

  void automorphism_stmt(std::size_t l, const std::vector<Token>& t) {
    using K = AutomorphismDef::Kind;
    const std::size_t k = header(l, t, "automorphism");
    const std::string& name = t[1].text;
    const std::string& kind = t[k].text;
    AutomorphismDef d;
    auto on_space = [&](std::size_t at) {
      if (t.size() != at + 2 || t[at].text != "on") fail(l, t[k].column, "expected '... on <space>'");
      resolve_space(l, t[at + 1]);
      d.space = t[at + 1].text;
    };
    if (kind == "shift") {
      if (t.size() < k + 2) fail(l, t[k].column, "expected 'shift <k> on <space>'");
      d.kind = K::shift;
      d.power = integer(l, t[k + 1]);
      on_space(k + 2);
    } else if (kind == "identity" || kind == "swap") {
      d.kind = kind == "swap" ? K::swap : K::identity;
      on_space(k + 1);
    } else if (auto c = call_arg(kind, "full-group-embed")) {
      d.kind = K::embed;
      d.cocycle = *c;
      on_space(k + 1);
    } else if (kind == "compose") {
      expect_end_of(l, t, k + 3);
      d.kind = K::compose;
      d.first = t[k + 1].text;
      d.second = t[k + 2].text;
    } else if (kind == "permutation") {
      on_space(k + 1);
      return permutation_body(l, name, d.space);
    } else if (kind == "blockmap") {
      if (t.size() != k + 7 || t[k + 1].text != "on" || t[k + 3].text != "memory" || t[k + 5].text != "inverse-memory")
        fail(l, t[k].column, "expected 'blockmap on <space> memory <k> inverse-memory <k>'");
      resolve_space(l, t[k + 2]);
      return blockmap_body(l, name, t[k + 2].text, integer(l, t[k + 4]), integer(l, t[k + 6]));
    } else {
      fail(l, t[k].column, "unknown automorphism kind '" + kind + "'");
    }
    ++pos_;
    at_line(l, t[k].column, [&] { spec_.add_automorphism(name, d); });
  }

  void permutation_body(std::size_t l, const std::string& name, const std::string& space) {
    const Alphabet& a = spec_.space(space)->alphabet();
    std::vector<std::optional<Symbol>> perm(a.size());
    for (std::size_t bl : block()) {
      const auto bt = tokenize(lines_[bl].text);
      if (bt.size() != 3 || bt[1].text != "->") fail(bl, bt[0].column, "expected '<symbol> -> <symbol>'");
      const Symbol from = at_line(bl, bt[0].column, [&] { return a.symbol(bt[0].text); });
      const Symbol to = at_line(bl, bt[2].column, [&] { return a.symbol(bt[2].text); });
      if (perm[from]) fail(bl, bt[0].column, "symbol mapped twice");
      perm[from] = to;
    }
    std::vector<Symbol> fwd;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (!perm[i]) fail(l, 1, "permutation leaves '" + a.name(static_cast<Symbol>(i)) + "' unmapped");
      fwd.push_back(*perm[i]);
    }
    at_line(l, 1, [&] {
      auto p = permutation_automorphism(a, fwd, name);
      spec_.add_table_automorphism(name, space, p.forward(), p.inverse(), true);
    });
  }

  void blockmap_body(std::size_t l, const std::string& name, const std::string& space, Coord kf, Coord ki) {
    const Alphabet& a = spec_.space(space)->alphabet();
    if (kf < 0 || ki < 0) fail(l, 1, "memory must be non-negative");
    struct Rule {
      std::vector<std::optional<Symbol>> p;
      Symbol out;
    };
    std::vector<Rule> fr, ir;
    for (std::size_t bl : block()) {
      const auto bt = tokenize(lines_[bl].text);
      if (bt.size() != 4 || (bt[0].text != "forward" && bt[0].text != "inverse") || bt[2].text != "->")
        fail(bl, bt[0].column, "expected 'forward|inverse <pattern> -> <symbol>'");
      const bool f = bt[0].text == "forward";
      const Coord m = f ? kf : ki;
      Rule r{pattern(bl, bt[1], a, static_cast<std::size_t>(2 * m + 1)),
             at_line(bl, bt[3].column, [&] { return a.symbol(bt[3].text); })};
      (f ? fr : ir).push_back(std::move(r));
    }
    auto table = [&](const std::vector<Rule>& rules, Coord m, const char* which) {
      return at_line(l, 1, [&] {
        return BlockMap::from_rule(a.size(), m, [&](std::span<const Symbol> w) {
          const Word word(w.begin(), w.end());
          for (const auto& r : rules)
            if (matches(r.p, word)) return r.out;
          throw InputError(std::string(which) + " table has no rule for window " + a.format_word(word));
        });
      });
    };
    BlockMap f = table(fr, kf, "forward");
    BlockMap i = table(ir, ki, "inverse");
    at_line(l, 1, [&] { spec_.add_table_automorphism(name, space, std::move(f), std::move(i), false); });
  }

  // --- families -----------------------------------------------------------

  void family_stmt(std::size_t l, const std::vector<Token>& t) {
    const std::size_t k = header(l, t, "family");
    const std::string& name = t[1].text;
    const std::string& kind = t[k].text;
    const bool product = kind == "product";
    const std::size_t on = product ? k + 3 : k + 1;
    if (t.size() != on + 2 || t[on].text != "on") fail(l, t[k].column, "expected '... on <space>'");
    auto space = resolve_space(l, t[on + 1]);
    CAFamilyPtr f;
    auto leaf = [&](std::vector<Schema> schemas) {
      return at_line(l, t[k].column, [&] {
        return std::make_shared<const CAFamily>(CAFamily::leaf(name, space, std::move(schemas)));
      });
    };
    if (kind == "schemas") {
      f = leaf(schema_body(space->alphabet()));
      spec_.add_family(name, f);
      return;
    }
    if (kind == "sunny-side-up") {
      f = leaf(sunny_side_up_schemas());
    } else if (kind == "two-pair") {
      const PointTemplate x{sunny_point(), std::nullopt};
      const PointTemplate z{zero_point(), std::nullopt};
      f = leaf({PairSchema{x, z}, PairSchema{z, x}});
    } else if (kind == "diagonal") {
      f = leaf({DiagonalSchema{}});
    } else if (product) {
      auto a = at_line(l, t[k + 1].column, [&] { return spec_.family(t[k + 1].text); });
      auto b = at_line(l, t[k + 2].column, [&] { return spec_.family(t[k + 2].text); });
      f = at_line(l, t[k].column,
                  [&] { return std::make_shared<const CAFamily>(CAFamily::product(name, a, b, space)); });
    } else if (auto base = call_arg(kind, "product-with-s")) {
      auto a = at_line(l, t[k].column, [&] { return spec_.family(*base); });
      f = at_line(l, t[k].column, [&] {
        return std::make_shared<const CAFamily>(CAFamily::product(name, a, sunny_side_up().family, space));
      });
    } else {
      fail(l, t[k].column, "unknown family kind '" + kind + "'");
    }
    ++pos_;
    at_line(l, t[1].column, [&] { spec_.add_family(name, f); });
  }

  PointTemplate point_template(std::size_t l, const std::string& text, int column, const Alphabet& a) {
    std::string s = trim(text);
    std::optional<ShiftRange> shifts;
    if (s.rfind("sigma^[", 0) == 0) {
      const auto close = s.find(']');
      const auto dots = s.find("..");
      if (close == std::string::npos || dots == std::string::npos || dots > close)
        fail(l, column, "expected 'sigma^[lo..hi]' with hi an integer or 'inf'");
      ShiftRange r;
      const std::string lo = s.substr(7, dots - 7), hi = s.substr(dots + 2, close - dots - 2);
      r.lo = integer(l, {lo, column});
      if (hi != "inf") r.hi = integer(l, {hi, column});
      if (r.hi && *r.hi < r.lo) fail(l, column, "empty shift range");
      shifts = r;
      s = s.substr(close + 1);
    }
    Point p = at_line(l, column, [&] { return parse_point(s, a); });
    return {std::move(p), shifts};
  }

  std::vector<Schema> schema_body(const Alphabet& a) {
    std::vector<Schema> out;
    for (std::size_t bl : block()) {
      const auto bt = tokenize(lines_[bl].text);
      if (bt[0].text == "diagonal") {
        expect_end_of(bl, bt, 1);
        out.push_back(DiagonalSchema{});
      } else if (bt[0].text == "pair") {
        const std::string body = rest(bl, bt, 1);
        const auto semi = body.find(';');
        if (semi == std::string::npos) fail(bl, bt[0].column, "expected 'pair <template> ; <template>'");
        const int col = bt.size() > 1 ? bt[1].column : bt[0].column;
        out.push_back(PairSchema{point_template(bl, body.substr(0, semi), col, a),
                                 point_template(bl, body.substr(semi + 1), col + static_cast<int>(semi) + 1, a)});
      } else {
        fail(bl, bt[0].column, "expected 'diagonal' or 'pair'");
      }
    }
    return out;
  }

  // --- runs ---------------------------------------------------------------

  void run_stmt(std::size_t l, const std::vector<Token>& t) {
    expect_end_of(l, t, 2);
    check_name(l, t[1]);
    RunSpec r;
    r.name = t[1].text;
    std::vector<std::size_t> cylinder_lines, pair_lines;
    for (std::size_t bl : block()) {
      const auto bt = tokenize(lines_[bl].text);
      const std::string& kw = bt[0].text;
      auto one = [&]() -> const Token& {
        expect_end_of(bl, bt, 2);
        return bt[1];
      };
      if (kw == "space") r.space = one().text;
      else if (kw == "family") r.family = one().text;
      else if (kw == "automorphisms") {
        for (std::size_t i = 1; i < bt.size(); ++i) r.automorphisms.push_back(bt[i].text);
      } else if (kw == "stages") r.stages = integer(bl, one());
      else if (kw == "n-max") r.n_max = integer(bl, one());
      else if (kw == "entropy-threshold") r.entropy_threshold = real(bl, one());
      else if (kw == "max-ratio") r.max_ratio = real(bl, one());
      else if (kw == "min-unique") r.min_unique = real(bl, one());
      else if (kw == "max-invariance") r.max_invariance = real(bl, one());
      else if (kw == "verify-length") r.verify_length = static_cast<std::size_t>(integer(bl, one()));
      else if (kw == "validate-radius") r.validate_radius = integer(bl, one());
      else if (kw == "defect-matrix") {
        const auto& v = one();
        if (v.text != "on" && v.text != "off") fail(bl, v.column, "expected 'on' or 'off'");
        r.defect_matrix = v.text == "on";
      } else if (kw == "compose") {
        expect_end_of(bl, bt, 3);
        r.compositions.emplace_back(bt[1].text, bt[2].text);
      } else if (kw == "cylinder") cylinder_lines.push_back(bl);
      else if (kw == "pair") pair_lines.push_back(bl);
      else fail(bl, bt[0].column, "unknown run setting '" + kw + "'");
    }
    if (r.space.empty() || r.family.empty()) fail(l, 1, "run needs 'space' and 'family'");
    auto space = at_line(l, 1, [&] { return spec_.space(r.space); });
    for (std::size_t bl : cylinder_lines) {
      const auto bt = tokenize(lines_[bl].text);
      if (bt.size() != 8 || bt[2].text != "radius" || (bt[4].text != "x" && bt[4].text != "y") || bt[6].text != "in")
        fail(bl, bt[0].column, "expected 'cylinder <name> radius <r> x|y <coord> in <symbols>'");
      CylinderSpec c{bt[1].text, integer(bl, bt[3]), bt[4].text == "x" ? 0 : 1, integer(bl, bt[5]), {}};
      std::size_t start = 0;
      const std::string& syms = bt[7].text;
      while (true) {
        const auto comma = syms.find(',', start);
        c.symbols.push_back(syms.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        at_line(bl, bt[7].column, [&] { space->alphabet().symbol(c.symbols.back()); });
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (c.coord < -c.radius || c.coord > c.radius) fail(bl, bt[5].column, "coordinate outside the cylinder radius");
      r.cylinders.push_back(std::move(c));
    }
    for (std::size_t bl : pair_lines) {
      const auto bt = tokenize(lines_[bl].text);
      const std::string body = rest(bl, bt, 1);
      const auto semi = body.find(';');
      if (semi == std::string::npos) fail(bl, bt[0].column, "expected 'pair <point> ; <point>'");
      const int col = bt.size() > 1 ? bt[1].column : 1;
      Point x = at_line(bl, col, [&] { return parse_point(body.substr(0, semi), space->alphabet()); });
      Point y = at_line(bl, col, [&] { return parse_point(body.substr(semi + 1), space->alphabet()); });
      r.pairs.emplace_back(std::move(x), std::move(y));
    }
    at_line(l, t[1].column, [&] { spec_.add_run(std::move(r)); });
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  SpecFile spec_;
};

}  // namespace detail

inline SpecFile parse_spec(std::string_view text) { return detail::SpecParser(text).parse(); }

inline SpecFile load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

// ---------------------------------------------------------------------------
// Export

namespace detail {

inline std::string format_pattern(const Word& w, const Alphabet& a) { return a.format_word(w); }

inline std::string format_template(const PointTemplate& t, const Alphabet& a) {
  std::string out;
  if (t.shifts)
    out += "sigma^[" + std::to_string(t.shifts->lo) + ".." +
           (t.shifts->hi ? std::to_string(*t.shifts->hi) : std::string("inf")) + "] ";
  return out + format_point(t.base, a);
}

inline void export_space(const SpecFile& spec, const std::string& name, std::ostream& out) {
  const ShiftSpace& s = *spec.space(name);
  auto alphabet_line = [&] {
    out << "  alphabet";
    for (const auto& n : s.alphabet().names()) out << ' ' << n;
    out << '\n';
  };
  if (const auto* oc = s.as_orbit_closure()) {
    out << "space " << name << " = orbit-closure\n";
    alphabet_line();
    for (const auto& g : oc->generators) out << "  point " << format_point(g, s.alphabet()) << '\n';
    out << "end\n";
  } else if (const auto* so = s.as_sofic()) {
    out << "space " << name << " = sofic\n";
    alphabet_line();
    for (const auto& e : so->edges)
      out << "  edge " << so->states[e.from] << ' ' << s.alphabet().name(e.label) << ' ' << so->states[e.to] << '\n';
    out << "end\n";
  } else {
    const auto* p = s.as_product();
    auto a = spec.name_of(p->first.get());
    auto b = spec.name_of(p->second.get());
    if (a && b)
      out << "space " << name << " = product " << *a << ' ' << *b << '\n';
    else if (a && *p->second == *sunny_side_up_space())
      out << "space " << name << " = product-with-s(" << *a << ")\n";
    else
      throw InputError("export: product space '" + name + "' has an unnamed component");
  }
}

inline void export_family(const SpecFile& spec, const std::string& name, std::ostream& out) {
  const CAFamily& f = *spec.family(name);
  const auto space = spec.name_of(f.space().get());
  if (!space) throw InputError("export: family '" + name + "' is over an unnamed space");
  if (f.is_product()) {
    auto a = spec.name_of(f.first().get());
    auto b = spec.name_of(f.second().get());
    if (a && b)
      out << "family " << name << " = product " << *a << ' ' << *b << " on " << *space << '\n';
    else if (a && *f.second() == *sunny_side_up().family)
      out << "family " << name << " = product-with-s(" << *a << ") on " << *space << '\n';
    else
      throw InputError("export: product family '" + name + "' has an unnamed component");
    return;
  }
  const Alphabet& a = f.space()->alphabet();
  out << "family " << name << " = schemas on " << *space << '\n';
  for (const auto& sc : f.schemas()) {
    if (std::holds_alternative<DiagonalSchema>(sc)) {
      out << "  diagonal\n";
    } else {
      const auto& ps = std::get<PairSchema>(sc);
      out << "  pair " << format_template(ps.first, a) << " ; " << format_template(ps.second, a) << '\n';
    }
  }
  out << "end\n";
}

inline void export_cocycle(const SpecFile& spec, const std::string& name, std::ostream& out) {
  const auto& c = spec.cocycle(name);
  const auto& n = c.cocycle;
  out << "cocycle " << name << " = rule on " << c.space << " radius " << n.radius() << '\n';
  Word w(static_cast<std::size_t>(2 * n.radius() + 1));
  for (std::size_t i = 0; i < n.table().size(); ++i) {
    if (n.table()[i] == 0) continue;
    BlockMap::decode(i, n.alphabet().size(), w);
    out << "  " << format_pattern(w, n.alphabet()) << " -> " << n.table()[i] << '\n';
  }
  out << "end\n";
}

inline void export_table(const BlockMap& b, const Alphabet& a, const char* which, std::ostream& out) {
  Word w(static_cast<std::size_t>(2 * b.memory() + 1));
  for (std::size_t i = 0; i < b.table().size(); ++i) {
    BlockMap::decode(i, a.size(), w);
    out << "  " << which << ' ' << format_pattern(w, a) << " -> " << a.name(b.table()[i]) << '\n';
  }
}

inline void export_automorphism(const SpecFile& spec, const std::string& name, std::ostream& out) {
  using K = AutomorphismDef::Kind;
  const auto& d = spec.automorphism_def(name);
  const auto& a = spec.automorphism(name);
  out << "automorphism " << name << " = ";
  switch (d.kind) {
    case K::shift: out << "shift " << d.power << " on " << d.space << '\n'; return;
    case K::identity: out << "identity on " << d.space << '\n'; return;
    case K::swap: out << "swap on " << d.space << '\n'; return;
    case K::embed: out << "full-group-embed(" << d.cocycle << ") on " << d.space << '\n'; return;
    case K::compose: out << "compose " << d.first << ' ' << d.second << '\n'; return;
    case K::permutation: {
      const Alphabet& al = spec.space(d.space)->alphabet();
      out << "permutation on " << d.space << '\n';
      for (std::size_t s = 0; s < al.size(); ++s)
        out << "  " << al.name(static_cast<Symbol>(s)) << " -> " << al.name(a.forward().table()[s]) << '\n';
      out << "end\n";
      return;
    }
    case K::blockmap: {
      const Alphabet& al = spec.space(d.space)->alphabet();
      out << "blockmap on " << d.space << " memory " << a.forward().memory() << " inverse-memory "
          << a.inverse().memory() << '\n';
      export_table(a.forward(), al, "forward", out);
      export_table(a.inverse(), al, "inverse", out);
      out << "end\n";
      return;
    }
  }
}

inline std::string format_real(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

inline void export_run(const SpecFile& spec, const std::string& name, std::ostream& out) {
  const RunSpec& r = spec.run(name);
  const Alphabet& a = spec.space(r.space)->alphabet();
  out << "run " << name << '\n';
  out << "  space " << r.space << '\n';
  out << "  family " << r.family << '\n';
  if (!r.automorphisms.empty()) {
    out << "  automorphisms";
    for (const auto& x : r.automorphisms) out << ' ' << x;
    out << '\n';
  }
  out << "  stages " << r.stages << '\n';
  out << "  n-max " << r.n_max << '\n';
  out << "  entropy-threshold " << format_real(r.entropy_threshold) << '\n';
  if (r.max_ratio) out << "  max-ratio " << format_real(*r.max_ratio) << '\n';
  if (r.min_unique) out << "  min-unique " << format_real(*r.min_unique) << '\n';
  if (r.max_invariance) out << "  max-invariance " << format_real(*r.max_invariance) << '\n';
  if (r.verify_length) out << "  verify-length " << r.verify_length << '\n';
  out << "  validate-radius " << r.validate_radius << '\n';
  if (!r.defect_matrix) out << "  defect-matrix off\n";
  for (const auto& c : r.cylinders) {
    out << "  cylinder " << c.name << " radius " << c.radius << ' ' << (c.point == 0 ? 'x' : 'y') << ' ' << c.coord
        << " in ";
    for (std::size_t i = 0; i < c.symbols.size(); ++i) out << (i ? "," : "") << c.symbols[i];
    out << '\n';
  }
  for (const auto& [x, y] : r.pairs) out << "  pair " << format_point(x, a) << " ; " << format_point(y, a) << '\n';
  for (const auto& [x, y] : r.compositions) out << "  compose " << x << ' ' << y << '\n';
  out << "end\n";
}

}  // namespace detail

inline std::string export_spec(const SpecFile& spec) {
  std::ostringstream out;
  out << "driftspec " << kSpecVersion << "\n";
  auto section = [&](const std::vector<std::string>& names, auto&& fn) {
    if (names.empty()) return;
    out << '\n';
    for (const auto& n : names) fn(spec, n, out);
  };
  section(spec.space_names(), detail::export_space);
  section(spec.family_names(), detail::export_family);
  section(spec.cocycle_names(), detail::export_cocycle);
  section(spec.automorphism_names(), detail::export_automorphism);
  section(spec.run_names(), detail::export_run);
  return out.str();
}

}  // namespace autdrift
