#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <unordered_map>

#include "erasure3d/errors.hpp"
#include "erasure3d/routing.hpp"

namespace erasure3d {

namespace {

struct Link {
  std::size_t tx;
  std::size_t rx;
  /// (leg, hop index of this link within the leg, packets)
  std::deque<std::array<std::size_t, 3>> queue;
  std::uint64_t pending = 0;
};

struct CellLinks {
  std::uint64_t slot;
  std::vector<std::size_t> links;
  std::size_t cursor = 0;
};

struct Transmission {
  std::size_t link;
  bool ok;
};

struct PhaseOutcome {
  std::uint64_t rounds = 0;
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  bool incomplete = false;
};

/// Runs one phase. `inject[leg]` packets start at the first hop of each leg;
/// `completed[leg]` receives the packets that reach its last node.
PhaseOutcome run_phase(const std::vector<Point>& pos, const SubcubeGrid& grid,
                       const std::vector<TrafficLeg>& legs,
                       const std::vector<std::uint64_t>& inject,
                       std::vector<std::uint64_t>& completed, const PhaseSchedule& schedule,
                       const ErasureModel& model, Rng& rng, const SimOptions& options,
                       std::uint64_t slot_offset) {
  PhaseOutcome out;
  std::vector<Link> links;
  std::unordered_map<std::uint64_t, std::size_t> link_id;
  std::vector<std::vector<std::size_t>> leg_links(legs.size());
  std::uint64_t outstanding = 0;
  const std::uint64_t n = pos.size();
  for (std::size_t l = 0; l < legs.size(); ++l) {
    const auto& nodes = legs[l].nodes;
    for (std::size_t h = 0; h + 1 < nodes.size(); ++h) {
      const std::uint64_t key = nodes[h] * n + nodes[h + 1];
      auto [it, fresh] = link_id.try_emplace(key, links.size());
      if (fresh) links.push_back({nodes[h], nodes[h + 1], {}, 0});
      leg_links[l].push_back(it->second);
    }
    if (inject[l] > 0 && !leg_links[l].empty()) {
      Link& first = links[leg_links[l][0]];
      first.queue.push_back({l, 0, inject[l]});
      first.pending += inject[l];
      outstanding += inject[l] * leg_links[l].size();
    }
  }
  if (outstanding == 0) return out;

  // Group links by transmitting subcube; subcubes by TDMA slot.
  std::unordered_map<std::size_t, std::size_t> cell_index;
  std::vector<CellLinks> cells;
  for (std::size_t k = 0; k < links.size(); ++k) {
    const Cell& cell = grid.cell_of(links[k].tx);
    auto [it, fresh] = cell_index.try_emplace(grid.flat(cell), cells.size());
    if (fresh) cells.push_back({schedule.slot_of(cell), {}, 0});
    cells[it->second].links.push_back(k);
  }
  std::sort(cells.begin(), cells.end(),
            [](const CellLinks& a, const CellLinks& b) { return a.slot < b.slot; });

  std::vector<std::size_t> active;
  std::vector<Transmission> results;
  while (outstanding > 0) {
    if (out.rounds >= options.round_budget) {
      out.incomplete = true;
      break;
    }
    for (std::size_t begin = 0; begin < cells.size();) {
      std::size_t end = begin;
      while (end < cells.size() && cells[end].slot == cells[begin].slot) ++end;
      active.clear();
      for (std::size_t ci = begin; ci < end; ++ci) {
        CellLinks& cl = cells[ci];
        for (std::size_t step = 0; step < cl.links.size(); ++step) {
          const std::size_t k = cl.links[(cl.cursor + step) % cl.links.size()];
          if (links[k].pending > 0) {
            active.push_back(k);
            cl.cursor = (cl.cursor + step + 1) % cl.links.size();
            break;
          }
        }
      }
      results.clear();
      for (std::size_t a = 0; a < active.size(); ++a) {
        const Link& link = links[active[a]];
        const Point& rx = pos[link.rx];
        // Same draw order as decode_success: intended first, then each
        // interferer; stop at the first deciding outcome.
        bool ok = rng.bernoulli(model.success_sq(squared_distance(pos[link.tx], rx)));
        for (std::size_t b = 0; ok && b < active.size(); ++b) {
          if (b == a) continue;
          const double p = model.success_sq(squared_distance(pos[links[active[b]].tx], rx));
          if (p < options.truncation) continue;
          if (rng.bernoulli(p)) ok = false;
        }
        results.push_back({active[a], ok});
      }
      const std::uint64_t slot =
          slot_offset + out.rounds * schedule.slots_per_round + cells[begin].slot + 1;
      for (const auto& r : results) {
        ++out.attempts;
        Link& link = links[r.link];
        if (options.trace) {
          *options.trace << "{\"slot\":" << slot << ",\"phase\":\"" << to_string(schedule.phase)
                         << "\",\"tx\":" << link.tx << ",\"rx\":" << link.rx
                         << ",\"ok\":" << (r.ok ? "true" : "false") << "}\n";
        }
        if (!r.ok) continue;
        ++out.successes;
        --outstanding;
        auto front = link.queue.front();
        --link.pending;
        if (--link.queue.front()[2] == 0) link.queue.pop_front();
        const std::size_t leg = front[0];
        const std::size_t next = front[1] + 1;
        if (next < leg_links[leg].size()) {
          Link& nl = links[leg_links[leg][next]];
          if (!nl.queue.empty() && nl.queue.back()[0] == leg)
            ++nl.queue.back()[2];
          else
            nl.queue.push_back({leg, next, 1});
          ++nl.pending;
        } else {
          ++completed[leg];
        }
      }
      begin = end;
    }
    ++out.rounds;
  }
  return out;
}

}  // namespace

SimReport simulate_traffic(const std::vector<Point>& positions, const SubcubeGrid& grid,
                           const TrafficPlan& traffic,
                           const std::array<PhaseSchedule, kPhaseCount>& schedules,
                           const ErasureModel& model, Rng& rng, const SimOptions& options) {
  SimReport report;
  report.nodes = positions.size();
  const std::uint64_t P = static_cast<std::uint64_t>(traffic.packets_per_pair);
  std::vector<std::uint64_t> progress(traffic.pairs, P);
  std::vector<char> routed(traffic.pairs, 0);
  SimOptions opts = options;
  if (opts.round_budget == 0) opts.round_budget = 1'000'000'000ULL;
  std::uint64_t offset = 0;
  for (Phase phase : kAllPhases) {
    const int p = static_cast<int>(phase);
    const auto& legs = traffic.legs[p];
    std::vector<std::uint64_t> inject(legs.size());
    std::vector<std::uint64_t> completed(legs.size(), 0);
    for (std::size_t l = 0; l < legs.size(); ++l) {
      inject[l] = progress[legs[l].pair];
      routed[legs[l].pair] = 1;
    }
    const auto outcome =
        run_phase(positions, grid, legs, inject, completed, schedules[p], model, rng, opts, offset);
    for (std::size_t l = 0; l < legs.size(); ++l) {
      progress[legs[l].pair] = completed[l];
      report.phase_delivered[p] += completed[l];
    }
    report.phase_slots[p] = outcome.rounds * schedules[p].slots_per_round;
    report.phase_attempts[p] = outcome.attempts;
    report.phase_successes[p] = outcome.successes;
    report.incomplete = report.incomplete || outcome.incomplete;
    offset += report.phase_slots[p];
  }
  for (std::size_t i = 0; i < traffic.pairs; ++i)
    if (routed[i]) report.delivered_symbols += progress[i];
  report.total_slots = offset;
  report.aggregate_throughput =
      report.total_slots > 0
          ? static_cast<double>(report.delivered_symbols) / static_cast<double>(report.total_slots)
          : 0.0;
  std::uint64_t worst = 0;
  for (Phase phase : kAllPhases) {
    const int p = static_cast<int>(phase);
    if (report.phase_slots[p] > 0 && report.nodes > 0)
      report.per_phase_rates[p] = static_cast<double>(report.phase_delivered[p]) /
                                  (static_cast<double>(report.phase_slots[p]) * report.nodes);
    if (report.phase_slots[p] > worst) {
      worst = report.phase_slots[p];
      report.bottleneck_phase = phase;
    }
  }
  return report;
}

TrialResult simulate(const NetworkInstance& instance, const ErasureModel& model,
                     const PercolationConfig& percolation, const RoutingConfig& routing,
                     std::ostream* trace) {
  if (model.outside_proven_regime())
    throw ConfigError("simulation needs alpha > 3 for the polynomial family");
  TrialResult trial;
  trial.report.nodes = instance.size();
  trial.warnings = percolation.diagnostics(instance.config);
  if (!highway_limited(model, instance.config, percolation))
    trial.warnings.push_back("access phases may dominate the highway phases");
  const SubcubeGrid grid = tessellate(instance, percolation.c);
  trial.highways = build_highway_system(grid, percolation);
  for (const auto& w : trial.highways.warnings) trial.warnings.push_back(w);
  trial.schedules = make_schedules(model, grid, percolation);
  if (trial.highways.failed && !routing.borrow_adjacent) {
    trial.report.percolation_failed = true;
    return trial;
  }
  trial.plan = assign_slices_and_entries(instance, grid, trial.highways, routing);
  for (const auto& w : trial.plan.warnings) trial.warnings.push_back(w);
  if (trial.plan.failed) {
    trial.report.percolation_failed = true;
    return trial;
  }
  const TrafficPlan traffic = build_traffic(trial.plan, routing.packets_per_source);
  Rng rng(mix_seed(instance.config.seed, 2));
  SimOptions options;
  options.round_budget = routing.round_budget > 0
                             ? routing.round_budget
                             : default_round_budget(instance.config, routing.packets_per_source);
  options.trace = trace;
  trial.report = simulate_traffic(instance.effective_positions(), grid, traffic,
                                  trial.schedules, model, rng, options);
  return trial;
}

}  // namespace erasure3d
