#include "erasure3d/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <thread>
#include <fstream>
#include <memory>

#include "erasure3d/errors.hpp"
#include "erasure3d/series.hpp"

#ifndef ERASURE3D_VERSION
#define ERASURE3D_VERSION "0.0.0"
#endif

namespace erasure3d {

const char* version() { return ERASURE3D_VERSION; }

std::string_view to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::simulate: return "simulate";
    case SweepMode::bound: return "bound";
    case SweepMode::percolation_stats: return "percolation_stats";
    case SweepMode::binning_stats: return "binning_stats";
    case SweepMode::constants: return "constants";
  }
  return "?";
}

SweepMode parse_sweep_mode(std::string_view text) {
  if (text == "simulate") return SweepMode::simulate;
  if (text == "bound") return SweepMode::bound;
  if (text == "percolation_stats") return SweepMode::percolation_stats;
  if (text == "binning_stats") return SweepMode::binning_stats;
  if (text == "constants") return SweepMode::constants;
  throw ConfigError("unknown mode: " + std::string(text));
}

ErasureModel ExperimentSpec::model() const {
  return family == DecayFamily::exponential ? ErasureModel::exponential(gamma)
                                            : ErasureModel::polynomial(alpha);
}

void ExperimentSpec::validate() const {
  NetworkConfig probe = network;
  probe.n = n_list.empty() ? 1 : n_list.front();
  probe.validate();
  if (n_list.empty()) throw ConfigError("n list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ConfigError("n must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("n list must be strictly increasing");
  }
  if (seeds_per_n < 1) throw ConfigError("seeds per n must be >= 1");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (!(percolation.c > 0.0)) throw ConfigError("c must be positive");
  if (!(percolation.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(percolation.delta > 0.0)) throw ConfigError("delta must be positive");
  if (routing.w < 0.0) throw ConfigError("w must be >= 0");
  if (routing.packets_per_source < 1) throw ConfigError("packets per source must be >= 1");
  const ErasureModel m = model();
  if (mode == SweepMode::simulate && m.outside_proven_regime())
    throw ConfigError("simulation needs alpha > 3 for the polynomial family");
}

Json ExperimentSpec::to_json() const {
  Json j;
  j["lambda"] = network.lambda;
  j["mu"] = network.mu;
  j["nu"] = network.nu;
  j["density"] = erasure3d::to_string(network.mode);
  j["allow_flat"] = network.allow_flat;
  j["base_seed"] = network.seed;
  j["family"] = erasure3d::to_string(family);
  if (family == DecayFamily::exponential)
    j["gamma"] = gamma;
  else
    j["alpha"] = alpha;
  j["c"] = percolation.c;
  j["kappa"] = percolation.kappa;
  j["delta"] = percolation.delta;
  j["w"] = routing.w;
  j["packets"] = routing.packets_per_source;
  j["round_budget"] = routing.round_budget;
  j["borrow_adjacent"] = routing.borrow_adjacent;
  j["n_list"] = n_list;
  j["seeds"] = seeds_per_n;
  j["mode"] = erasure3d::to_string(mode);
  j["with_bounds"] = with_bounds;
  return j;
}

std::uint64_t ExperimentSpec::hash() const { return fnv1a(to_json().dump()); }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

NetworkInstance make_instance(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed) {
  NetworkConfig cfg = spec.network;
  cfg.n = n;
  cfg.seed = seed;
  return generate(cfg);
}

Json warnings_json(const std::vector<std::string>& w) { return Json(w); }

void percolation_stats(const ExperimentSpec& spec, const NetworkInstance& inst, TrialRow& row) {
  const SubcubeGrid grid = tessellate(inst, spec.percolation.c);
  const HighwaySystem h = build_highway_system(grid, spec.percolation);
  row.throughput = h.delta_hat;
  row.failed = h.failed ? 1 : 0;
  const double p = occupancy_probability(spec.percolation.c);
  Json fam = Json::object();
  for (const auto& f : h.families) {
    const int across = grid.dims()[section_axes(f.family).across];
    Json e = {{"min_crossings", f.min_crossings},
              {"delta_hat", f.delta_hat},
              {"rectangles", f.partition.rectangles.size()},
              {"epsilon_m", f.partition.epsilon_m},
              {"m_across", across},
              {"paths", f.paths.size()}};
    e["below_delta"] = f.min_crossings <= spec.percolation.delta * std::log(across);
    fam[std::string(to_string(f.family))] = std::move(e);
  }
  row.report["families"] = std::move(fam);
  row.report["p"] = p;
  row.report["dims"] = grid.dims();
  row.report["failed"] = h.failed;
  const auto& fx = h.family(HighwayFamily::x);
  if (p > 5.0 / 6.0 && p < 1.0 && grid.dims()[2] >= 2) {
    row.report["lemma1_bound"] =
        lemma1_failure_bound(p, spec.percolation.kappa, spec.percolation.delta, grid.dims()[0],
                             grid.dims()[2], fx.partition.epsilon_m);
  }
  row.report["warnings"] = warnings_json(h.warnings);
}

void binning_stats(const ExperimentSpec& spec, const NetworkInstance& inst, TrialRow& row) {
  Json arr = Json::array();
  int mask = 0;
  int bit = 1;
  for (BinGranularity g :
       {BinGranularity::subcube, BinGranularity::slab_cuboid, BinGranularity::unit_cube}) {
    const BinningReport r = binning_check(inst, g, spec.percolation.c, spec.routing.w);
    if (!r.holds) mask |= bit;
    bit <<= 1;
    arr.push_back(to_json(r));
  }
  row.failed = mask;
  row.throughput = kNaN;
  row.report["binning"] = std::move(arr);
}

void constants(const ExperimentSpec& spec, std::size_t n, TrialRow& row) {
  const ErasureModel model = spec.model();
  NetworkConfig cfg = spec.network;
  cfg.n = n;
  row.throughput = kNaN;
  row.report["cubic_root_y"] = cubic_root_y();
  row.report["theoretical_exponent"] = theoretical_exponent(cfg.lambda, cfg.mu, cfg.nu);
  row.report["occupancy_p"] = occupancy_probability(spec.percolation.c);
  row.report["highway_limited"] = highway_limited(model, cfg, spec.percolation);
  if (model.family() == DecayFamily::polynomial && model.alpha() > 3.0)
    row.report["K_alpha"] = K_alpha(model.alpha());
  if (model.family() == DecayFamily::exponential) row.report["d_star"] = model.d_star();
  if (!model.outside_proven_regime()) {
    const SubcubeGrid grid(subcube_counts(cfg, spec.percolation.c), spec.percolation.c);
    row.report["dims"] = grid.dims();
    Json sched = Json::array();
    for (const auto& s : make_schedules(model, grid, spec.percolation)) {
      Json e = to_json(s);
      e["interference_bound"] = interference_bound(model, s.k, spec.percolation.c, s.hop);
      sched.push_back(std::move(e));
    }
    row.report["schedules"] = std::move(sched);
  }
}

}  // namespace

TrialRow run_trial(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed,
                   std::ostream* trace) {
  TrialRow row;
  row.n = n;
  row.seed = seed;
  row.mode = spec.mode;
  row.report = Json::object();
  row.report["n"] = n;
  row.report["seed"] = seed;
  row.report["mode"] = to_string(spec.mode);
  if (spec.mode == SweepMode::constants) {
    constants(spec, n, row);
    return row;
  }
  const NetworkInstance inst = make_instance(spec, n, seed);
  const ErasureModel model = spec.model();
  switch (spec.mode) {
    case SweepMode::simulate: {
      TrialResult trial = simulate(inst, model, spec.percolation, spec.routing, trace);
      const SimReport& r = trial.report;
      row.throughput = r.aggregate_throughput;
      row.failed = r.percolation_failed ? 1 : (r.incomplete ? 2 : 0);
      if (!r.percolation_failed) row.bottleneck = r.bottleneck_phase;
      row.report["sim"] = to_json(r);
      Json sched = Json::array();
      for (const auto& s : trial.schedules) sched.push_back(to_json(s));
      row.report["schedules"] = std::move(sched);
      row.report["delta_hat"] = trial.highways.delta_hat;
      row.report["empty_rectangles"] = trial.highways.failed;
      row.report["borrowed_paths"] = trial.plan.borrowed;
      row.report["warnings"] = warnings_json(trial.warnings);
      if (spec.with_bounds) {
        row.bounds = evaluate_bounds(inst, model, spec.jobs == 1);
        row.report["bounds"] = to_json(*row.bounds);
      }
      break;
    }
    case SweepMode::bound:
      row.bounds = evaluate_bounds(inst, model, spec.jobs == 1);
      row.throughput = kNaN;
      row.report["bounds"] = to_json(*row.bounds);
      break;
    case SweepMode::percolation_stats:
      percolation_stats(spec, inst, row);
      break;
    case SweepMode::binning_stats:
      binning_stats(spec, inst, row);
      break;
    case SweepMode::constants:
      break;
  }
  return row;
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ConfigError("fit needs at least two points");
  std::vector<double> xs, ys;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0)) throw ConfigError("fit needs positive n");
    if (!(v > 0.0)) throw ConfigError("fit needs positive values");
    xs.push_back(std::log(n));
    ys.push_back(std::log(v));
  }
  const double N = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit needs two distinct n");
  FitResult fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (xs.size() > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      sse += r * r;
    }
    fit.std_error = std::sqrt(sse / (N - 2.0) / sxx);
  }
  return fit;
}

FitResult fit_exponent_deflated(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> scaled;
  for (const auto& [n, v] : points) {
    const double l = std::log(n);
    if (!(l > 0.0)) throw ConfigError("deflated fit needs n > 1");
    scaled.push_back({n, v / (l * l)});
  }
  return fit_exponent(scaled);
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  {
    NetworkConfig cfg = spec.network;
    cfg.n = spec.n_list.front();
    result.warnings = spec.percolation.diagnostics(cfg);
    if (!highway_limited(spec.model(), cfg, spec.percolation))
      result.warnings.push_back("access phases may dominate the highway phases");
    if (spec.model().outside_proven_regime())
      result.warnings.push_back("alpha <= 3 lies outside the proven regime");
  }
  struct Task {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t n : spec.n_list)
    for (int i = 0; i < spec.seeds_per_n; ++i)
      tasks.push_back({n, spec.network.seed + static_cast<std::uint64_t>(i)});
  result.rows.resize(tasks.size());

  std::unique_ptr<std::ofstream> trace;
  if (!spec.trace.empty()) {
    trace = std::make_unique<std::ofstream>(spec.trace);
    if (!*trace) throw ConfigError("cannot open trace file " + spec.trace);
  }
  int jobs = spec.jobs == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                            : spec.jobs;
  if (trace) jobs = 1;
  jobs = std::min<int>(jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      result.rows[i] = run_trial(spec, tasks[i].n, tasks[i].seed, trace.get());
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
            result.rows[i] = run_trial(spec, tasks[i].n, tasks[i].seed);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          next = tasks.size();
        }
      });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& row : result.rows) {
    if (row.mode == SweepMode::simulate && row.failed == 2) result.budget_exhausted = true;
    if (row.mode == SweepMode::simulate && row.failed == 0 && row.bounds &&
        row.throughput > row.bounds->min_bound)
      ++result.dominance_violations;
  }

  const bool fits_throughput = spec.mode == SweepMode::simulate;
  const bool fits_bound = spec.mode == SweepMode::bound ||
                          (spec.mode == SweepMode::simulate && spec.with_bounds);
  if (spec.n_list.size() >= 2 && (fits_throughput || fits_bound)) {
    std::vector<std::pair<double, double>> tp, bp;
    for (std::size_t n : spec.n_list) {
      double ts = 0.0, bs = 0.0;
      int tc = 0, bc = 0;
      for (const auto& row : result.rows) {
        if (row.n != n) continue;
        if (row.failed == 0 && row.throughput > 0.0) {
          ts += row.throughput;
          ++tc;
        }
        if (row.bounds && row.bounds->min_bound > 0.0) {
          bs += row.bounds->min_bound;
          ++bc;
        }
      }
      if ((fits_throughput && tc == 0) || (fits_bound && bc == 0)) {
        result.fit_error = "all trials failed at n = " + std::to_string(n);
        break;
      }
      if (fits_throughput) tp.push_back({static_cast<double>(n), ts / tc});
      if (fits_bound) bp.push_back({static_cast<double>(n), bs / bc});
    }
    if (result.fit_error.empty()) {
      if (fits_throughput) result.throughput_fit = fit_exponent(tp);
      if (fits_bound) {
        result.bound_fit = fit_exponent(bp);
        result.deflated_bound_fit = fit_exponent_deflated(bp);
      }
    }
  } else if (fits_throughput || fits_bound) {
    for (std::size_t n : spec.n_list) {
      bool any = false;
      for (const auto& row : result.rows)
        if (row.n == n && row.failed == 0) any = true;
      if (!any) result.fit_error = "all trials failed at n = " + std::to_string(n);
    }
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string metadata_line(const ExperimentSpec& spec) {
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(spec.hash()));
  Json meta = {{"tool", "erasure3d"}, {"version", version()}, {"config_hash", hex}};
  return meta.dump();
}

}  // namespace

void write_csv(std::ostream& os, const ExperimentSpec& spec, const SweepResult& result) {
  os << "n,seed,mode,throughput,bound_x,bound_y,bound_z,bound_min,failed,bottleneck_phase\n";
  for (const auto& row : result.rows) {
    os << row.n << ',' << row.seed << ',' << to_string(row.mode) << ','
       << fmt_double(row.throughput) << ',';
    if (row.bounds)
      os << fmt_double(row.bounds->T_x) << ',' << fmt_double(row.bounds->T_y) << ','
         << fmt_double(row.bounds->T_z) << ',' << fmt_double(row.bounds->min_bound) << ',';
    else
      os << ",,,,";
    os << row.failed << ',';
    if (row.bottleneck) os << to_string(*row.bottleneck);
    os << '\n';
  }
  os << "# " << metadata_line(spec) << '\n';
}

Json summary_json(const ExperimentSpec& spec, const SweepResult& result) {
  Json j;
  j["spec"] = spec.to_json();
  auto fit = [](const std::optional<FitResult>& f) -> Json {
    if (!f) return nullptr;
    return {{"slope", f->slope},
            {"intercept", f->intercept},
            {"stderr", f->std_error},
            {"points", f->points}};
  };
  j["throughput_fit"] = fit(result.throughput_fit);
  j["bound_fit"] = fit(result.bound_fit);
  j["deflated_bound_fit"] = fit(result.deflated_bound_fit);
  j["theoretical_exponent"] =
      theoretical_exponent(spec.network.lambda, spec.network.mu, spec.network.nu);
  j["fit_error"] = result.fit_error;
  j["budget_exhausted"] = result.budget_exhausted;
  j["dominance_violations"] = result.dominance_violations;
  j["warnings"] = result.warnings;
  j["rows"] = result.rows.size();
  return j;
}

void write_jsonl(std::ostream& os, const ExperimentSpec& spec, const SweepResult& result) {
  for (const auto& row : result.rows) os << row.report.dump() << '\n';
  Json meta = Json::parse(metadata_line(spec));
  os << Json{{"_meta", meta}, {"summary", summary_json(spec, result)}}.dump() << '\n';
}

}  // namespace erasure3d
