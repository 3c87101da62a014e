// Command-line driver: n-sweeps of simulations, cut-set bounds and
// percolation/binning statistics.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "erasure3d/errors.hpp"
#include "erasure3d/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kAllFailed = 3, kBudgetExhausted = 4 };

void write_json_file(const std::string& path, const erasure3d::Json& j) {
  std::ofstream out(path);
  if (!out) throw erasure3d::ConfigError("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace erasure3d;
  CLI::App app{"Monte Carlo throughput and cut-set bound sweeps for 3D erasure networks"};
  app.set_version_flag("--version", version());

  std::string config_path, n_text, model_text, mode_text, density_text;
  std::optional<double> lambda, mu, nu, gamma, alpha, c, kappa, w, delta;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, packets, jobs;
  std::optional<std::uint64_t> round_budget;
  std::string out, json_out, trace, instance_out, highways_out, summary_out;
  bool no_bounds = false;
  bool strict_rectangles = false;

  app.add_option("--config", config_path, "Config file with [section] key = value entries");
  app.add_option("--n", n_text, "Network sizes, e.g. 4096 or 2^12,2^13");
  app.add_option("--lambda", lambda, "Exponent of the x side length");
  app.add_option("--mu", mu, "Exponent of the y side length");
  app.add_option("--nu", nu, "Exponent of the z side length");
  app.add_option("--density", density_text, "extended or dense");
  app.add_option("--model", model_text, "exponential or polynomial");
  app.add_option("--gamma", gamma, "Exponential decay base in (0, 1)");
  app.add_option("--alpha", alpha, "Polynomial decay exponent");
  app.add_option("--c", c, "Subcube side length");
  app.add_option("--kappa", kappa, "Rectangle height constant");
  app.add_option("--delta", delta, "Highway density constant for crossing statistics");
  app.add_option("--w", w, "Slice width (0 = one slice per crossing)");
  app.add_option("--seed", seed, "Base seed; trial i uses seed + i");
  app.add_option("--trials", trials, "Seeds per network size");
  app.add_option("--packets", packets, "Packets per source");
  app.add_option("--round-budget", round_budget, "TDMA rounds allowed per phase (0 = default)");
  app.add_option("--mode", mode_text,
                 "simulate, bound, percolation_stats, binning_stats or constants");
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  app.add_option("--out", out, "CSV output path (default: stdout)");
  app.add_option("--json", json_out, "Per-trial JSON lines output path");
  app.add_option("--summary", summary_out, "Fit summary JSON output path");
  app.add_option("--trace", trace, "Slot event log (JSON lines); forces one worker");
  app.add_option("--instance-out", instance_out, "Write the first generated instance as JSON");
  app.add_option("--highways-out", highways_out, "Write the first instance's highways as JSON");
  app.add_flag("--no-bounds", no_bounds, "Skip cut-set bounds in simulate mode");
  app.add_flag("--strict-rectangles", strict_rectangles,
               "Fail trials with a crossing-free rectangle instead of borrowing a neighbour's");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    ExperimentSpec spec;
    if (!config_path.empty()) apply_config(spec, parse_config_file(config_path));
    if (!n_text.empty()) spec.n_list = parse_size_list(n_text);
    if (lambda) spec.network.lambda = *lambda;
    if (mu) spec.network.mu = *mu;
    if (nu) spec.network.nu = *nu;
    if (nu && *nu == 0.0) spec.network.allow_flat = true;
    if (!density_text.empty()) spec.network.mode = parse_density_mode(density_text);
    if (!model_text.empty()) spec.family = parse_decay_family(model_text);
    if (gamma) {
      spec.gamma = *gamma;
      if (model_text.empty() && config_path.empty()) spec.family = DecayFamily::exponential;
    }
    if (alpha) spec.alpha = *alpha;
    if (c) spec.percolation.c = *c;
    if (kappa) spec.percolation.kappa = *kappa;
    if (delta) spec.percolation.delta = *delta;
    if (w) spec.routing.w = *w;
    if (seed) spec.network.seed = *seed;
    if (trials) spec.seeds_per_n = *trials;
    if (packets) spec.routing.packets_per_source = *packets;
    if (round_budget) spec.routing.round_budget = *round_budget;
    if (!mode_text.empty()) spec.mode = parse_sweep_mode(mode_text);
    if (jobs) spec.jobs = *jobs;
    if (!out.empty()) spec.out = out;
    if (!trace.empty()) spec.trace = trace;
    if (no_bounds) spec.with_bounds = false;
    if (strict_rectangles) spec.routing.borrow_adjacent = false;
    spec.validate();

    if (!instance_out.empty() || !highways_out.empty()) {
      NetworkConfig cfg = spec.network;
      cfg.n = spec.n_list.front();
      const NetworkInstance inst = generate(cfg);
      if (!instance_out.empty()) write_json_file(instance_out, to_json(inst));
      if (!highways_out.empty()) {
        const SubcubeGrid grid = tessellate(inst, spec.percolation.c);
        write_json_file(highways_out, to_json(build_highway_system(grid, spec.percolation)));
      }
    }

    const SweepResult result = run_sweep(spec);
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << '\n';

    if (spec.out.empty()) {
      write_csv(std::cout, spec, result);
    } else {
      std::ofstream csv(spec.out);
      if (!csv) throw ConfigError("cannot write " + spec.out);
      write_csv(csv, spec, result);
    }
    if (!json_out.empty()) {
      std::ofstream js(json_out);
      if (!js) throw ConfigError("cannot write " + json_out);
      write_jsonl(js, spec, result);
    }
    const Json summary = summary_json(spec, result);
    if (!summary_out.empty()) write_json_file(summary_out, summary);
    auto print_fit = [](const char* label, const std::optional<FitResult>& f) {
      if (f)
        std::cerr << label << " exponent " << f->slope << " +/- " << f->std_error << '\n';
    };
    print_fit("throughput", result.throughput_fit);
    print_fit("bound", result.bound_fit);
    print_fit("deflated bound", result.deflated_bound_fit);

    if (!result.fit_error.empty()) {
      std::cerr << "error: " << result.fit_error << '\n';
      return kAllFailed;
    }
    if (result.budget_exhausted) {
      std::cerr << "error: slot budget exhausted in at least one trial\n";
      return kBudgetExhausted;
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const AllTrialsFailedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAllFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
