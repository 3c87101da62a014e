#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "erasure3d/channel.hpp"
#include "erasure3d/netgen.hpp"
#include "erasure3d/percolation.hpp"
#include "erasure3d/rng.hpp"

namespace erasure3d {

enum class Phase {
  drain = 0,
  x_highway = 1,
  interchange1 = 2,
  y_highway = 3,
  interchange2 = 4,
  z_highway = 5,
  deliver = 6,
};
inline constexpr int kPhaseCount = 7;
inline constexpr std::array<Phase, kPhaseCount> kAllPhases{
    Phase::drain,     Phase::x_highway,    Phase::interchange1, Phase::y_highway,
    Phase::interchange2, Phase::z_highway, Phase::deliver};

std::string_view to_string(Phase phase);
bool is_highway_phase(Phase phase);

/// Greatest real root of x^3 + 23x^2 + 29x - 1.
double cubic_root_y();

/// Smallest TDMA spacing multiplier k keeping the exponential interference
/// bound at or below one. Requires 0 < gamma < 1, c > 0, d >= 1.
double tdma_k_exponential(double c, double d, double gamma);

/// Polynomial threshold 1 + (2(13 + K_alpha))^{1/alpha} / (c(d+1)) plus a
/// 1e-6 margin. Requires alpha > 3.
double tdma_k_polynomial(double c, double d, double alpha);

double tdma_k(const ErasureModel& model, double c, double d);

/// TDMA parameters of one phase. Transmitters sharing a slot sit in
/// subcubes congruent modulo `spacing` on every axis, so t = spacing^3.
struct PhaseSchedule {
  Phase phase = Phase::drain;
  /// Hop-length bound in subcube units.
  double hop = 0.0;
  double k = 1.0;
  int spacing = 1;
  std::uint64_t slots_per_round = 1;

  /// Residue class index of a subcube, in [0, slots_per_round).
  std::uint64_t slot_of(const Cell& cell) const;
};

PhaseSchedule make_schedule(Phase phase, const ErasureModel& model, double c, double hop);

/// Schedule with a fixed reuse spacing (mainly for tests).
PhaseSchedule fixed_schedule(Phase phase, int spacing);

/// Access phases use hop kappa ln m + sqrt(2) (m = m_z for draining and
/// interchanges, m_x for delivery); highway phases use 2 sqrt(3).
std::array<PhaseSchedule, kPhaseCount> make_schedules(const ErasureModel& model,
                                                      const SubcubeGrid& grid,
                                                      const PercolationConfig& percolation);

/// sqrt(2) c kappa max(lambda, nu) / d* < min(lambda, mu, nu): the condition
/// under which highway phases rather than access phases limit the rate.
/// Always true for the polynomial family.
bool highway_limited(const ErasureModel& model, const NetworkConfig& network,
                     const PercolationConfig& percolation);

struct RoutingConfig {
  /// Slice width in effective units; 0 picks one slice per crossing.
  double w = 0.0;
  int packets_per_source = 1;
  /// TDMA rounds allowed per phase; 0 uses the default budget.
  std::uint64_t round_budget = 0;
  /// Sources whose rectangle has no crossing use the nearest crossing of
  /// the closest rectangle in the same slab instead of failing the trial.
  bool borrow_adjacent = true;
};

/// Default per-phase budget: 1e4 * packets * n^{max exponent} rounds.
std::uint64_t default_round_budget(const NetworkConfig& network, int packets_per_source);

/// Path identifier inside a HighwaySystem family.
struct PathRef {
  int slab = -1;
  int rect = -1;
  int slice = -1;
  /// Index into FamilyHighways::paths; -1 when unused.
  int index = -1;
};

struct PairRoute {
  std::size_t source = 0;
  std::size_t destination = 0;
  /// Source and destination share a subcube: only the delivery leg is used.
  bool direct = false;
  PathRef x_path, y_path, z_path;
  std::size_t entry = 0, u1 = 0, v1 = 0, u2 = 0, v2 = 0, exit = 0;
  /// Node sequence of every leg; a single node means a zero-hop leg and an
  /// empty vector means the phase is skipped.
  std::array<std::vector<std::size_t>, kPhaseCount> legs;
};

struct RoutePlan {
  std::vector<PairRoute> routes;
  bool failed = false;
  std::vector<std::string> warnings;
  /// Slices per rectangle actually requested (per family).
  std::array<int, 3> max_slices{0, 0, 0};
  /// Path choices served by a neighbouring rectangle.
  std::size_t borrowed = 0;
};

/// Maps every source to the highway of its slice and picks entry, exit and
/// interchange points by the closest-point rules. Pairs with source equal to
/// destination get no legs.
RoutePlan assign_slices_and_entries(const NetworkInstance& instance, const SubcubeGrid& grid,
                                    const HighwaySystem& highways, const RoutingConfig& config);

/// Longest single hop (effective distance) over all legs of a phase.
double max_hop_length(const NetworkInstance& instance, const RoutePlan& plan, Phase phase);

/// Largest number of distinct sources whose packets a single node relays
/// in a phase.
std::size_t max_relay_load(const RoutePlan& plan, Phase phase);

/// One multihop leg carrying `packets` packets of a pair through a phase.
struct TrafficLeg {
  std::size_t pair = 0;
  std::vector<std::size_t> nodes;
};

struct TrafficPlan {
  std::size_t pairs = 0;
  int packets_per_pair = 1;
  std::array<std::vector<TrafficLeg>, kPhaseCount> legs;
};

TrafficPlan build_traffic(const RoutePlan& plan, int packets_per_source);

struct SimReport {
  std::uint64_t delivered_symbols = 0;
  std::uint64_t total_slots = 0;
  double aggregate_throughput = 0.0;
  std::array<std::uint64_t, kPhaseCount> phase_slots{};
  std::array<std::uint64_t, kPhaseCount> phase_delivered{};
  std::array<std::uint64_t, kPhaseCount> phase_attempts{};
  std::array<std::uint64_t, kPhaseCount> phase_successes{};
  /// Packets finishing the phase per slot of the phase per node; 0 when the
  /// phase carries no traffic.
  std::array<double, kPhaseCount> per_phase_rates{};
  Phase bottleneck_phase = Phase::drain;
  bool percolation_failed = false;
  bool incomplete = false;
  std::size_t nodes = 0;
};

struct SimOptions {
  std::uint64_t round_budget = 0;
  /// Interferers whose unerased probability at the receiver falls below
  /// this are treated as erased.
  double truncation = 1e-12;
  /// Optional line-delimited JSON event log (slot, phase, tx, rx, ok).
  std::ostream* trace = nullptr;
};

/// Phase-major slot simulation. Within a phase every subcube holding queued
/// packets sends one of them per TDMA round (round robin over its links);
/// failed transmissions stay queued. Positions are effective positions.
SimReport simulate_traffic(const std::vector<Point>& positions, const SubcubeGrid& grid,
                           const TrafficPlan& traffic,
                           const std::array<PhaseSchedule, kPhaseCount>& schedules,
                           const ErasureModel& model, Rng& rng, const SimOptions& options);

/// Full pipeline on an instance: tessellate, build highways, plan, simulate.
struct TrialResult {
  SimReport report;
  HighwaySystem highways;
  RoutePlan plan;
  std::array<PhaseSchedule, kPhaseCount> schedules;
  std::vector<std::string> warnings;
};

TrialResult simulate(const NetworkInstance& instance, const ErasureModel& model,
                     const PercolationConfig& percolation, const RoutingConfig& routing,
                     std::ostream* trace = nullptr);

double measured_phase_rate(const SimReport& report, Phase phase);

}  // namespace erasure3d
