// symplattice command line: one subcommand per experiment or lattice operation.
// Keys come from an optional flat config file, then from flags.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "runner/config.hpp"
#include "runner/runner.hpp"
#include "symplattice/error.hpp"

namespace {

using symplattice::cli::Config;

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<FlagSpec> kSamplerFlags = {
    {"--d", "d", "half dimension d (lattices live in R^{2d})"},
    {"--seed", "seed", "master seed (required)"},
    {"--sampler", "sampler.kind", "chain | exact-modular | siegel-biased"},
    {"--eps", "sampler.eps", "chain step scale"},
    {"--burn-in", "sampler.burn_in", "chain burn-in steps"},
    {"--gap", "sampler.gap", "chain steps between emitted lattices"},
    {"--chains", "sampler.chains", "independent chains"},
    {"--renormalize-every", "sampler.renormalize_every", "steps between Siegel renormalizations"},
};

const std::map<std::string, std::vector<FlagSpec>> kCommandFlags = {
    {"sample", {{"--samples", "samples", "number of lattices"}}},
    {"count",
     {{"--d", "d", "half dimension"},
      {"--T", "T", "cutoff T"},
      {"--N", "N", "T = 2^N"},
      {"--mode", "mode", "direct | tessellated"},
      {"--lattice", "lattice", "matrix file (default: the standard lattice)"},
      {"--product-lo", "product_lo", "lower bound on |x||y|"},
      {"--product-hi", "product_hi", "upper bound on |x||y|"},
      {"--node-budget", "node_budget", "enumeration node budget"}}},
    {"reduce", {{"--lattice", "lattice", "matrix file"}, {"--node-budget", "node_budget", "enumeration node budget"}}},
    {"decompose", {{"--lattice", "lattice", "matrix file"}, {"--cond-limit", "cond_limit", "condition number limit"}}},
    {"alpha",
     {{"--lattice", "lattice", "matrix file"},
      {"--radius", "radius", "search radius cap"},
      {"--node-budget", "node_budget", "enumeration node budget"}}},
    {"alpha-tail",
     {{"--samples", "samples", "sampled lattices"},
      {"--L-grid", "L_grid", "comma separated L values"},
      {"--calibration-samples", "calibration_samples", "lattices for the calibration gate"}}},
    {"volume",
     {{"--d", "d", "half dimension"},
      {"--T", "T", "cutoff T"},
      {"--N", "N", "T = 2^N"},
      {"--product-lo", "product_lo", "lower bound on |x||y|"},
      {"--product-hi", "product_hi", "upper bound on |x||y|"},
      {"--mc-samples", "mc.samples", "Monte Carlo cross-check samples"},
      {"--seed", "seed", "Monte Carlo seed (required)"}}},
    {"clt",
     {{"--N-list", "N_list", "comma separated tile counts N"},
      {"--samples", "samples", "sampled lattices"},
      {"--bootstrap", "bootstrap", "bootstrap resamples"},
      {"--calibration-samples", "calibration_samples", "lattices for the calibration gate"}}},
    {"moment2",
     {{"--s", "s", "tile offset s"},
      {"--samples", "samples", "sampled lattices"},
      {"--mc-points", "mc.points", "Monte Carlo points for the right-hand side"},
      {"--explicit-j", "mc.explicit_j", "dilations summed explicitly"},
      {"--groups", "mc.groups", "median-of-means groups"},
      {"--calibration-samples", "calibration_samples", "lattices for the calibration gate"}}},
    {"decay",
     {{"--s-max", "s_max", "largest tile offset"},
      {"--samples", "samples", "sampled lattices"},
      {"--calibration-samples", "calibration_samples", "lattices for the calibration gate"}}},
    {"cover-check",
     {{"--r", "r", "cumulant order (3..5)"}, {"--gamma", "gamma", "schedule step"}, {"--grid", "grid", "grid maximum"}}},
};

bool uses_sampler(const std::string& cmd) {
  return cmd == "sample" || cmd == "alpha-tail" || cmd == "clt" || cmd == "moment2" || cmd == "decay";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random symplectic lattices: counting, reduction, heights and CLT experiments"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> values;  // command -> key -> value
  std::map<std::string, std::string> config_path, output, format, metadata, threads;
  std::map<std::string, std::vector<std::string>> sets;

  for (const auto& name : symplattice::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    auto& vals = values[name];
    std::vector<FlagSpec> flags = kCommandFlags.at(name);
    if (uses_sampler(name)) flags.insert(flags.begin(), kSamplerFlags.begin(), kSamplerFlags.end());
    for (const auto& f : flags) sub->add_option(f.flag, vals[f.key], f.help);
    sub->add_option("--config", config_path[name], "flat key = value config file");
    sub->add_option("--set", sets[name], "extra key=value override (repeatable)");
    sub->add_option("--output,-o", output[name], "report path (default: stdout)");
    sub->add_option("--format", format[name], name == "sample" ? "text | json | binary" : "json | csv");
    sub->add_option("--metadata", metadata[name], "run metadata path (default: <output>.meta.json)");
    sub->add_option("--threads", threads[name], "worker threads (default: SYMPLATTICE_THREADS or all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return symplattice::cli::kExitValidation;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommand(cmd);
  Config cfg;
  try {
    if (!config_path[cmd].empty()) symplattice::cli::load_config_file(config_path[cmd], cfg);
    // only flags actually given override the file
    for (const auto& f : kCommandFlags.at(cmd))
      if (sub->count(f.flag) > 0) cfg.set(f.key, values[cmd][f.key]);
    if (uses_sampler(cmd))
      for (const auto& f : kSamplerFlags)
        if (sub->count(f.flag) > 0) cfg.set(f.key, values[cmd][f.key]);
    if (sub->count("--output")) cfg.set("output", output[cmd]);
    if (sub->count("--format")) cfg.set("format", format[cmd]);
    if (sub->count("--metadata")) cfg.set("metadata", metadata[cmd]);
    if (sub->count("--threads")) cfg.set("threads", threads[cmd]);
    for (const auto& kv : sets[cmd]) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw symplattice::ValidationError("--set expects key=value, got " + kv, "set");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const symplattice::ValidationError& e) {
    std::cerr << "error: " << e.what() << " [key: " << e.key() << "]\n";
    return symplattice::cli::kExitValidation;
  }
  return symplattice::cli::run(cmd, cfg, std::cout, std::cerr);
}
