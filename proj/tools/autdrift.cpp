// autdrift: command-line front end over the driftspec format.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "autdrift/commands.hpp"

using namespace autdrift;

namespace {

int report(const CommandResult& r, const CommandOptions& opt) {
  std::cout << r.output;
  if (opt.out_dir) write_files(r, *opt.out_dir);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autdrift: asymptotic pairs, drift cocycles and drift estimates for subshift automorphisms"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::string spec_path;
  Coord stages = 0, n_max = 0;
  double entropy = 0;

  auto common = [&](CLI::App* sub, bool needs_spec) {
    auto* o = sub->add_option("--spec", spec_path, "spec file");
    if (needs_spec) o->required();
    sub->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv", "text"}));
    sub->add_option("--out", opt.out_dir, "directory for CSV files");
  };
  auto staged = [&](CLI::App* sub) {
    sub->add_option("--run", opt.run, "run name (default: every run)");
    sub->add_option("--stages", stages, "number of stages M")->check(CLI::PositiveNumber);
    sub->add_option("--n-max", n_max, "largest window radius")->check(CLI::PositiveNumber);
    sub->add_option("--entropy-threshold", entropy, "zero-entropy guard threshold")->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "verify automorphisms, families and guards");
  common(validate, true);
  staged(validate);
  auto* complexity = app.add_subcommand("complexity", "word complexity P(n) and entropy estimates");
  common(complexity, true);
  complexity->add_option("--space", opt.space, "space name")->required();
  complexity->add_option("--n", opt.n, "largest word length")->check(CLI::PositiveNumber);
  auto* cocycle = app.add_subcommand("cocycle", "drift cocycle on listed pairs and the cocycle relation");
  common(cocycle, true);
  staged(cocycle);
  auto* measure = app.add_subcommand("measure", "window sequence, unique extensions, invariance defects");
  common(measure, true);
  staged(measure);
  auto* drift = app.add_subcommand("drift", "staged drift estimates and defect certificates");
  common(drift, true);
  staged(drift);
  auto* gallery = app.add_subcommand("gallery", "built-in examples");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "list gallery objects");
  common(glist, false);
  auto* gexport = gallery->add_subcommand("export", "print the gallery as a spec file");
  common(gexport, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }
  if (stages) opt.stages = stages;
  if (n_max) opt.n_max = n_max;
  if (entropy > 0) opt.entropy_threshold = entropy;

  try {
    if (glist->parsed()) return report(cmd_gallery_list(opt), opt);
    if (gexport->parsed()) return report(cmd_gallery_export(), opt);
    const SpecFile spec = load_spec(spec_path);
    if (validate->parsed()) return report(cmd_validate(spec, opt), opt);
    if (complexity->parsed()) return report(cmd_complexity(spec, opt), opt);
    if (cocycle->parsed()) return report(cmd_cocycle(spec, opt), opt);
    if (measure->parsed()) return report(cmd_measure(spec, opt), opt);
    if (drift->parsed()) return report(cmd_drift(spec, opt), opt);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const Error& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
