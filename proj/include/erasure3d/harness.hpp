#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "erasure3d/bounds.hpp"
#include "erasure3d/channel.hpp"
#include "erasure3d/io.hpp"
#include "erasure3d/netgen.hpp"
#include "erasure3d/percolation.hpp"
#include "erasure3d/routing.hpp"

namespace erasure3d {

enum class SweepMode { simulate, bound, percolation_stats, binning_stats, constants };

std::string_view to_string(SweepMode mode);
SweepMode parse_sweep_mode(std::string_view text);

struct ExperimentSpec {
  /// Shape exponents, density mode and base seed; n comes from n_list.
  NetworkConfig network;
  DecayFamily family = DecayFamily::polynomial;
  double gamma = 0.7;
  double alpha = 4.0;
  PercolationConfig percolation;
  RoutingConfig routing;
  std::vector<std::size_t> n_list{4096};
  int seeds_per_n = 1;
  SweepMode mode = SweepMode::simulate;
  /// Simulation mode also evaluates the cut-set bounds of each instance.
  bool with_bounds = true;
  std::string out;
  std::string trace;
  /// Worker threads for independent trials; 0 uses the hardware count.
  int jobs = 1;

  ErasureModel model() const;
  /// Throws ConfigError on invalid combinations.
  void validate() const;
  /// Canonical JSON of everything that affects results.
  Json to_json() const;
  std::uint64_t hash() const;
};

/// Flags column of the CSV: 0 ok, 1 percolation/slice failure, 2 slot
/// budget exhausted. Binning rows use a bitmask of violated granularities
/// (1 subcube, 2 slab cuboid, 4 unit cube).
struct TrialRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  SweepMode mode = SweepMode::simulate;
  double throughput = 0.0;
  std::optional<BoundReport> bounds;
  int failed = 0;
  std::optional<Phase> bottleneck;
  Json report;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope; 0 with only two points.
  double std_error = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of ln(value) on ln(n). Needs two distinct n and
/// positive values.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

/// Fit of value / (ln n)^2.
FitResult fit_exponent_deflated(const std::vector<std::pair<double, double>>& points);

struct SweepResult {
  std::vector<TrialRow> rows;
  std::optional<FitResult> throughput_fit;
  std::optional<FitResult> bound_fit;
  std::optional<FitResult> deflated_bound_fit;
  std::vector<std::string> warnings;
  /// Set when some n has no usable trial; fits are then absent.
  std::string fit_error;
  bool budget_exhausted = false;
  /// Simulated trials whose throughput exceeded their own cut-set bound.
  std::size_t dominance_violations = 0;
};

/// One trial of the sweep (n, seed); deterministic in its inputs.
TrialRow run_trial(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed,
                   std::ostream* trace = nullptr);

/// All n x seeds trials (seed_i = base + i), merged in seed order, plus the
/// exponent fits over per-n means of non-failed trials.
SweepResult run_sweep(const ExperimentSpec& spec);

/// Rows as CSV followed by one `# {...}` metadata line.
void write_csv(std::ostream& os, const ExperimentSpec& spec, const SweepResult& result);
/// One JSON object per trial followed by a final metadata object.
void write_jsonl(std::ostream& os, const ExperimentSpec& spec, const SweepResult& result);
Json summary_json(const ExperimentSpec& spec, const SweepResult& result);

/// Parsed `[section]` / `key = value` file.
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

ConfigTable parse_config_text(std::string_view text);
ConfigTable parse_config_file(const std::string& path);

/// Applies a parsed table; unknown sections or keys are ConfigErrors.
void apply_config(ExperimentSpec& spec, const ConfigTable& table);

/// Parses "4096", "2^12", "4096,8192" or "[2^12, 2^13]".
std::vector<std::size_t> parse_size_list(std::string_view text);

double parse_number(std::string_view text);

const char* version();

}  // namespace erasure3d
