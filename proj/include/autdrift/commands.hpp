#pragma once

// The CLI commands as library functions returning their report text and
// exit status, plus the gallery spec.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "autdrift/asymptotic.hpp"
#include "autdrift/drift.hpp"
#include "autdrift/errors.hpp"
#include "autdrift/gallery.hpp"
#include "autdrift/measure.hpp"
#include "autdrift/rational.hpp"
#include "autdrift/spec_file.hpp"

namespace autdrift {

enum ExitCode : int { kExitPass = 0, kExitAssertion = 1, kExitInput = 2, kExitResource = 3 };

struct CommandOptions {
  std::string run;    // empty: every run in the spec file
  std::string space;  // complexity
  Coord n = 10;       // complexity
  std::optional<Coord> stages;
  std::optional<Coord> n_max;
  std::optional<double> entropy_threshold;
  std::string format = "csv";
  std::optional<std::string> out_dir;
};

struct CommandResult {
  int exit_code = kExitPass;
  std::string output;
  std::map<std::string, std::string> files;  // name → contents, written under --out
};

class Table {
 public:
  Table(std::string name, std::vector<std::string> headers) : name_(std::move(name)), headers_(std::move(headers)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  const std::string& name() const noexcept { return name_; }

  std::string csv() const {
    std::string out = join(headers_, ",") + "\n";
    for (const auto& r : rows_) out += join(r, ",") + "\n";
    return out;
  }

  std::string text() const {
    std::vector<std::size_t> w(headers_.size());
    for (std::size_t i = 0; i < headers_.size(); ++i) w[i] = headers_[i].size();
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    auto line = [&](const std::vector<std::string>& r) {
      std::string out;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += "  ";
        out += r[i] + std::string(w[i] - r[i].size(), ' ');
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      return out + "\n";
    };
    std::string out = line(headers_);
    std::vector<std::string> rule;
    for (auto x : w) rule.push_back(std::string(x, '-'));
    out += line(rule);
    for (const auto& r : rows_) out += line(r);
    return out;
  }

  std::string render(const std::string& format) const { return format == "text" ? text() : csv(); }

 private:
  static std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += sep;
      out += v[i];
    }
    return out;
  }

  std::string name_;
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

namespace detail {

inline void emit(CommandResult& res, const CommandOptions& opt, const std::string& title, const Table& t) {
  res.output += "# " + title + "\n" + t.render(opt.format) + "\n";
  res.files[t.name() + ".csv"] = t.csv();
}

inline std::vector<std::string> selected_runs(const SpecFile& spec, const CommandOptions& opt) {
  if (!opt.run.empty()) {
    spec.run(opt.run);
    return {opt.run};
  }
  if (spec.run_names().empty()) throw InputError("spec defines no runs");
  return spec.run_names();
}

inline RunSpec effective_run(const SpecFile& spec, const std::string& name, const CommandOptions& opt) {
  RunSpec r = spec.run(name);
  if (opt.stages) r.stages = *opt.stages;
  if (opt.n_max) r.n_max = *opt.n_max;
  if (opt.entropy_threshold) r.entropy_threshold = *opt.entropy_threshold;
  if (r.stages < 1 || r.n_max < 1) throw InputError("stages and n-max must be positive");
  if (!(r.entropy_threshold > 0)) throw InputError("entropy threshold must be positive");
  return r;
}

inline std::size_t verify_length(const Automorphism& a, std::size_t configured) {
  const auto min = static_cast<std::size_t>(2 * (a.forward().memory() + a.inverse().memory()) + 1);
  return std::max(configured ? configured : std::max<std::size_t>(min + 2, 9), min);
}

inline std::string pair_label(const Point& x, const Point& y, const Alphabet& a) {
  return "\"" + format_point(x, a) + " ; " + format_point(y, a) + "\"";
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CommandResult cmd_validate(const SpecFile& spec, const CommandOptions& opt = {}) {
  CommandResult res;
  bool ok = true;
  std::map<std::string, std::size_t> lengths;
  std::map<std::string, Coord> radii;
  std::map<std::string, double> thresholds;
  for (const auto& rn : spec.run_names()) {
    const RunSpec r = detail::effective_run(spec, rn, opt);
    for (const auto& a : r.automorphisms) lengths[a] = std::max(lengths[a], r.verify_length);
    radii[r.family] = std::max(radii[r.family], r.validate_radius);
    auto [it, fresh] = thresholds.emplace(r.space, r.entropy_threshold);
    if (!fresh) it->second = std::min(it->second, r.entropy_threshold);
  }
  for (const auto& name : spec.automorphism_names()) {
    const auto& a = spec.automorphism(name);
    const auto& space = spec.space(spec.automorphism_def(name).space);
    const auto rep = verify_automorphism(*space, a, detail::verify_length(a, lengths[name]));
    res.output += rep.render();
    ok = ok && rep.passed();
  }
  for (const auto& name : spec.family_names()) {
    const Coord r = radii.count(name) ? radii[name] : 3;
    const auto v = validate_family(*spec.family(name), r);
    res.output += "family " + name + ": " + (v.passed() ? "pass" : "FAIL") + "\n";
    for (const auto& x : v.radii)
      res.output += "  radius " + std::to_string(x.radius) + ": |W_n| = " + std::to_string(x.family_count) +
                    ", search = " + std::to_string(x.search_count) + (x.complete ? "" : x.sound ? " (incomplete)" : " (unsound)") + "\n";
    for (const auto& f : v.failures) res.output += "  failed: " + f + "\n";
    ok = ok && v.passed();
  }
  for (const auto& [space, threshold] : thresholds) {
    GuardConfig g;
    g.entropy_threshold = threshold;
    const auto rep = entropy_guard(*spec.space(space), g);
    res.output += "guard " + space + ": " + (rep.passed ? "pass" : "FAIL") + " (entropy estimate " +
                  format_decimal(rep.entropy) + " at n = " + std::to_string(rep.entropy_length) +
                  (rep.certified_zero_entropy ? ", certified zero entropy" : "") + ")\n";
    if (!rep.passed) res.output += "  " + rep.diagnostic + "\n";
    ok = ok && rep.passed;
  }
  res.output += std::string("validate: ") + (ok ? "pass" : "FAIL") + "\n";
  res.exit_code = ok ? kExitPass : kExitAssertion;
  return res;
}

inline CommandResult cmd_complexity(const SpecFile& spec, const CommandOptions& opt) {
  if (opt.space.empty()) throw InputError("complexity needs --space");
  if (opt.n < 1) throw InputError("--n must be positive");
  const auto& s = spec.space(opt.space);
  const auto rep = complexity(*s, static_cast<std::size_t>(opt.n));
  Table t("complexity_" + opt.space, {"n", "P(n)", "entropy_estimate"});
  for (const auto& [n, c] : rep.counts)
    t.add({std::to_string(n), std::to_string(c), format_decimal(rep.entropy_estimates.at(n))});
  CommandResult res;
  detail::emit(res, opt, "complexity of " + opt.space, t);
  return res;
}

inline CommandResult cmd_cocycle(const SpecFile& spec, const CommandOptions& opt) {
  CommandResult res;
  bool ok = true;
  for (const auto& rn : detail::selected_runs(spec, opt)) {
    const RunSpec r = detail::effective_run(spec, rn, opt);
    const Alphabet& a = spec.space(r.space)->alphabet();
    std::vector<CalibratedPair> pairs;
    for (const auto& [x, y] : r.pairs) pairs.push_back(calibrate(make_pair(x, y)));
    Table t(rn + ".cocycle", {"pair", "automorphism", "c", "B"});
    for (const auto& p : pairs)
      for (const auto& name : r.automorphisms) {
        const auto& au = spec.automorphism(name);
        t.add({detail::pair_label(p.x(), p.y(), a), name, std::to_string(drift_cocycle(au, p)),
               std::to_string(cocycle_bound(au))});
      }
    detail::emit(res, opt, "run " + rn + ": cocycle values", t);
    if (r.compositions.empty()) continue;
    Table rel(rn + ".cocycle_relation", {"a", "b", "pair", "c(ab,p)", "c(a,b^p)", "c(b,p)", "holds"});
    for (const auto& [an, bn] : r.compositions) {
      const auto& ua = spec.automorphism(an);
      const auto& ub = spec.automorphism(bn);
      const Automorphism ab = compose(ua, ub);
      for (const auto& p : pairs) {
        const auto [bp, cb] = act_with_cocycle(ub, p);
        const Coord cab = drift_cocycle(ab, p);
        const Coord ca = drift_cocycle(ua, bp);
        const bool holds = cab == ca + cb;
        ok = ok && holds;
        rel.add({an, bn, detail::pair_label(p.x(), p.y(), a), std::to_string(cab), std::to_string(ca),
                 std::to_string(cb), holds ? "yes" : "NO"});
      }
    }
    detail::emit(res, opt, "run " + rn + ": cocycle relation c(ab,p) = c(a,b^p) + c(b,p)", rel);
  }
  res.exit_code = ok ? kExitPass : kExitAssertion;
  return res;
}

inline CommandResult cmd_measure(const SpecFile& spec, const CommandOptions& opt) {
  CommandResult res;
  for (const auto& rn : detail::selected_runs(spec, opt)) {
    const RunSpec r = detail::effective_run(spec, rn, opt);
    const auto& f = *spec.family(r.family);
    std::vector<Automorphism> autos;
    for (const auto& n : r.automorphisms) autos.push_back(spec.automorphism(n));
    std::vector<Cylinder> cyls;
    for (const auto& c : r.cylinders) cyls.push_back(build_cylinder(f, c));
    PipelineConfig cfg;
    cfg.automorphisms = autos;
    cfg.cylinders = cyls;
    cfg.defect_matrix = false;
    const Coord n_min = pipeline_min_radius(cfg);
    if (n_min > r.n_max)
      throw InputError("run '" + rn + "': n-max " + std::to_string(r.n_max) + " is below the required radius " +
                       std::to_string(n_min));
    Table stages(rn + ".measure", {"m", "n_m", "|W_n_m|", "ratio_r_m", "unique_fraction_u_m"});
    Table defects(rn + ".invariance", {"automorphism", "cylinder", "m", "defect", "bound"});
    for (Coord m = 1; m <= r.stages; ++m) {
      const auto nu = empirical_measure(f, m, r.n_max, n_min);
      stages.add({std::to_string(m), std::to_string(nu.radius()), std::to_string(nu.size()),
                  format_decimal(nu.selection().ratio_exact()), format_decimal(nu.unique_extension().exact())});
      const double u = nu.unique_extension().value(), rr = nu.selection().ratio();
      for (std::size_t i = 0; i < autos.size(); ++i)
        for (const auto& c : cyls) {
          const Rational d = invariance_defect(nu, autos[i], c);
          const double b = static_cast<double>(locality_radius(autos[i]));
          const double bound = 2 * (1 - u) + 2 * (rr - 1) + 4 * b / static_cast<double>(2 * nu.radius() + 1);
          defects.add({r.automorphisms[i], c.name, std::to_string(m), format_decimal(d), format_decimal(bound)});
        }
    }
    detail::emit(res, opt, "run " + rn + ": window sequence", stages);
    if (!cyls.empty()) detail::emit(res, opt, "run " + rn + ": invariance defects", defects);
  }
  return res;
}

inline CommandResult cmd_drift(const SpecFile& spec, const CommandOptions& opt) {
  CommandResult res;
  bool ok = true;
  for (const auto& rn : detail::selected_runs(spec, opt)) {
    const RunSpec r = detail::effective_run(spec, rn, opt);
    PipelineConfig cfg;
    cfg.family = spec.family(r.family);
    for (const auto& n : r.automorphisms) cfg.automorphisms.push_back(spec.automorphism(n));
    for (const auto& c : r.cylinders) cfg.cylinders.push_back(build_cylinder(*cfg.family, c));
    cfg.stages = r.stages;
    cfg.n_max = r.n_max;
    cfg.guard.entropy_threshold = r.entropy_threshold;
    cfg.defect_matrix = r.defect_matrix;
    cfg.max_ratio = r.max_ratio;
    cfg.min_unique = r.min_unique;
    cfg.max_invariance = r.max_invariance;

    bool verified = true;
    for (std::size_t i = 0; i < cfg.automorphisms.size(); ++i) {
      const auto& a = cfg.automorphisms[i];
      const auto rep = verify_automorphism(*spec.space(r.space), a, detail::verify_length(a, r.verify_length));
      if (!rep.passed()) {
        res.output += rep.render();
        verified = false;
      }
    }
    if (!verified) {
      res.output += "run " + rn + ": FAIL (automorphism verification)\n\n";
      ok = false;
      continue;
    }

    PipelineReport rep;
    try {
      rep = theorem_pipeline(cfg);
    } catch (const GuardRefusal& e) {
      res.output += "run " + rn + ": " + e.what() + "\n\n";
      ok = false;
      continue;
    }
    res.output += "run " + rn + ": space " + rep.space + ", family " + rep.family + ", entropy estimate " +
                  format_decimal(rep.guard.entropy) + " at n = " + std::to_string(rep.guard.entropy_length) +
                  (rep.guard.certified_zero_entropy ? " (certified zero entropy)" : "") + ", n_min " +
                  std::to_string(rep.n_min) + "\n";
    Table est(rn + ".drift", {"automorphism", "m", "n_m", "Phi_estimate", "Phi_exact", "B", "r_m", "u_m"});
    Table mat(rn + ".defects", {"m", "a", "b", "defect"});
    Table inv(rn + ".invariance", {"automorphism", "cylinder", "m", "defect", "bound"});
    for (const auto& st : rep.stages) {
      for (const auto& e : st.estimates)
        est.add({e.label, std::to_string(st.stage), std::to_string(e.radius), format_decimal(e.value),
                 format_exact(e.value), std::to_string(e.certificate.bound), format_decimal(e.certificate.ratio),
                 format_decimal(e.certificate.unique)});
      for (std::size_t i = 0; i < st.defects.size(); ++i)
        for (std::size_t j = 0; j < st.defects[i].size(); ++j)
          mat.add({std::to_string(st.stage), rep.labels[i], rep.labels[j], format_decimal(st.defects[i][j])});
      for (const auto& x : st.invariance)
        inv.add({rep.labels[x.automorphism], rep.cylinders[x.cylinder], std::to_string(st.stage),
                 format_decimal(x.defect), format_decimal(x.bound)});
    }
    detail::emit(res, opt, "run " + rn + ": drift estimates", est);
    if (cfg.defect_matrix) detail::emit(res, opt, "run " + rn + ": additivity defects", mat);
    if (!cfg.cylinders.empty()) detail::emit(res, opt, "run " + rn + ": invariance defects", inv);
    for (const auto& f : rep.failures) res.output += "failed: " + f + "\n";
    res.output += "run " + rn + ": " + (rep.passed() ? "pass" : "FAIL") + "\n\n";
    ok = ok && rep.passed();
  }
  res.exit_code = ok ? kExitPass : kExitAssertion;
  return res;
}

// ---------------------------------------------------------------------------
// Gallery

inline SpecFile gallery_spec_file() {
  using K = AutomorphismDef::Kind;
  SpecFile g;
  auto sunny = sunny_side_up();
  auto p2 = period_two_orbit();
  g.add_space("S", sunny.space);
  g.add_space("P2", p2);
  g.add_space("full2", full_shift(binary_alphabet(), "full2"));
  auto ss = product_with_s(sunny.space, sunny.family);
  auto ps = product_with_s(p2);
  g.add_space("SxS", ss.space);
  g.add_space("P2xS", ps.space);

  g.add_family("CA_S", sunny.family);
  g.add_family("diag_P2", ps.family->first());
  g.add_family("CA_SxS", ss.family);
  g.add_family("CA_P2xS", ps.family);

  auto named = [](OrbitCocycle c, std::string name) {
    return OrbitCocycle(std::move(name), c.alphabet(), c.radius(), c.table());
  };
  g.add_cocycle("transpose", {sunny_transposition_cocycle(), "S"});
  g.add_cocycle("one_S", {named(constant_cocycle(binary_alphabet(), 1), "one_S"), "S"});
  g.add_cocycle("one_P2", {named(constant_cocycle(binary_alphabet(), 1), "one_P2"), "P2"});
  g.add_cocycle("zero_P2", {named(constant_cocycle(binary_alphabet(), 0), "zero_P2"), "P2"});
  g.add_cocycle("flip", {period_two_flip_cocycle(), "P2"});

  auto add = [&](const std::string& name, K kind, const std::string& space, Coord power = 1,
                 const std::string& cocycle = "") {
    AutomorphismDef d;
    d.kind = kind;
    d.space = space;
    d.power = power;
    d.cocycle = cocycle;
    g.add_automorphism(name, d);
  };
  add("shift_S", K::shift, "S");
  add("shift2_S", K::shift, "S", 2);
  add("shiftinv_S", K::shift, "S", -1);
  add("identity_S", K::identity, "S");
  add("shift_SxS", K::shift, "SxS");
  add("shift2_SxS", K::shift, "SxS", 2);
  add("shiftinv_SxS", K::shift, "SxS", -1);
  add("identity_SxS", K::identity, "SxS");
  add("swap", K::swap, "SxS");
  add("embed_transpose", K::embed, "SxS", 1, "transpose");
  add("embed_one_S", K::embed, "SxS", 1, "one_S");
  add("shift_P2xS", K::shift, "P2xS");
  add("embed_one_P2", K::embed, "P2xS", 1, "one_P2");
  add("embed_zero_P2", K::embed, "P2xS", 1, "zero_P2");
  add("embed_flip", K::embed, "P2xS", 1, "flip");

  RunSpec s;
  s.name = "sunny";
  s.space = "S";
  s.family = "CA_S";
  s.automorphisms = {"shift_S", "shift2_S", "shiftinv_S", "identity_S"};
  s.stages = 3;
  s.n_max = 12;
  s.cylinders.push_back({"x0_is_1", 1, 0, 0, {"1"}});
  s.pairs = {{sunny_point(), zero_point()}, {zero_point(), sunny_point()}, {sunny_point(), shift_point(sunny_point(), 2)}};
  s.compositions = {{"shift2_S", "shiftinv_S"}, {"shift_S", "shift_S"}};
  g.add_run(s);

  RunSpec p;
  p.name = "sunny_product";
  p.space = "SxS";
  p.family = "CA_SxS";
  p.automorphisms = {"shift_SxS", "swap", "embed_transpose", "embed_one_S"};
  p.stages = 3;
  p.n_max = 10;
  p.cylinders.push_back({"x0_first_is_1", 2, 0, 0, {"1:0", "1:1"}});
  const Alphabet& ssa = ss.space->alphabet();
  p.pairs = {{zip_points(sunny_point(), sunny_point(), ssa), zip_points(sunny_point(), zero_point(), ssa)},
             {zip_points(zero_point(), sunny_point(), ssa), zip_points(shift_point(sunny_point(), 1), zero_point(), ssa)}};
  p.compositions = {{"swap", "embed_transpose"}, {"embed_transpose", "embed_one_S"}};
  g.add_run(p);

  RunSpec q;
  q.name = "period_two";
  q.space = "P2xS";
  q.family = "CA_P2xS";
  q.automorphisms = {"shift_P2xS", "embed_one_P2", "embed_zero_P2", "embed_flip"};
  q.stages = 3;
  q.n_max = 10;
  const Alphabet& psa = ps.space->alphabet();
  const Point y = Point::periodic({0, 1});
  q.pairs = {{zip_points(y, sunny_point(), psa), zip_points(y, zero_point(), psa)},
             {zip_points(shift_point(y, 1), sunny_point(), psa), zip_points(shift_point(y, 1), zero_point(), psa)}};
  q.compositions = {{"embed_flip", "embed_flip"}};
  g.add_run(q);
  return g;
}

inline std::string gallery_spec() { return export_spec(gallery_spec_file()); }

inline CommandResult cmd_gallery_list(const CommandOptions& opt = {}) {
  const SpecFile g = gallery_spec_file();
  Table t("gallery", {"kind", "name", "over"});
  for (const auto& n : g.space_names()) {
    const Alphabet& a = g.space(n)->alphabet();
    Word all(a.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Symbol>(i);
    t.add({"space", n, "\"{" + a.format_word(all) + "}\""});
  }
  for (const auto& n : g.family_names()) t.add({"family", n, g.family(n)->space()->name()});
  for (const auto& n : g.cocycle_names()) t.add({"cocycle", n, g.cocycle(n).space});
  for (const auto& n : g.automorphism_names()) t.add({"automorphism", n, g.automorphism_def(n).space});
  for (const auto& n : g.run_names()) t.add({"run", n, g.run(n).space});
  CommandResult res;
  res.output = t.render(opt.format);
  res.files["gallery.csv"] = t.csv();
  return res;
}

inline CommandResult cmd_gallery_export() {
  CommandResult res;
  res.output = gallery_spec();
  res.files["gallery.spec"] = res.output;
  return res;
}

inline void write_files(const CommandResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : r.files) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw InputError("cannot write '" + name + "' under '" + dir + "'");
    out << text;
  }
}

}  // namespace autdrift
