#include "erasure3d/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "erasure3d/errors.hpp"
#include "erasure3d/series.hpp"

namespace erasure3d {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::drain: return "drain";
    case Phase::x_highway: return "x_highway";
    case Phase::interchange1: return "interchange1";
    case Phase::y_highway: return "y_highway";
    case Phase::interchange2: return "interchange2";
    case Phase::z_highway: return "z_highway";
    case Phase::deliver: return "deliver";
  }
  return "?";
}

bool is_highway_phase(Phase phase) {
  return phase == Phase::x_highway || phase == Phase::y_highway || phase == Phase::z_highway;
}

double cubic_root_y() {
  // x = t - a/3 turns x^3 + a x^2 + b x + c into t^3 + p t + q.
  constexpr double a = 23.0, b = 29.0, c = -1.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0));
  double x = r * std::cos(phi / 3.0) - a / 3.0;
  for (int i = 0; i < 3; ++i) {
    const double f = ((x + a) * x + b) * x + c;
    const double df = (3.0 * x + 2.0 * a) * x + b;
    x -= f / df;
  }
  return x;
}

double tdma_k_exponential(double c, double d, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (!(d >= 1.0)) throw ConfigError("hop bound d must be >= 1");
  return 1.0 + std::log(cubic_root_y()) / (c * (d + 1.0) * std::log(gamma));
}

double tdma_k_polynomial(double c, double d, double alpha) {
  if (!(alpha > 3.0)) throw ConfigError("TDMA spacing needs alpha > 3");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (!(d >= 1.0)) throw ConfigError("hop bound d must be >= 1");
  return 1.0 + std::pow(2.0 * (13.0 + K_alpha(alpha)), 1.0 / alpha) / (c * (d + 1.0)) + 1e-6;
}

double tdma_k(const ErasureModel& model, double c, double d) {
  return model.family() == DecayFamily::exponential ? tdma_k_exponential(c, d, model.gamma())
                                                    : tdma_k_polynomial(c, d, model.alpha());
}

std::uint64_t PhaseSchedule::slot_of(const Cell& cell) const {
  const auto K = static_cast<std::uint64_t>(spacing);
  return ((cell[0] % K) * K + cell[1] % K) * K + cell[2] % K;
}

PhaseSchedule make_schedule(Phase phase, const ErasureModel& model, double c, double hop) {
  PhaseSchedule s;
  s.phase = phase;
  s.hop = hop;
  s.k = tdma_k(model, c, hop);
  s.spacing = static_cast<int>(std::ceil(s.k * (hop + 1.0) - 1e-9));
  s.spacing = std::max(1, s.spacing);
  const auto K = static_cast<std::uint64_t>(s.spacing);
  s.slots_per_round = K * K * K;
  return s;
}

PhaseSchedule fixed_schedule(Phase phase, int spacing) {
  if (spacing < 1) throw ConfigError("TDMA spacing must be >= 1");
  PhaseSchedule s;
  s.phase = phase;
  s.spacing = spacing;
  s.hop = 1.0;
  const auto K = static_cast<std::uint64_t>(spacing);
  s.slots_per_round = K * K * K;
  return s;
}

namespace {

double access_hop(int m, double kappa) {
  return kappa * std::log(static_cast<double>(std::max(m, 2))) + std::numbers::sqrt2;
}

}  // namespace

std::array<PhaseSchedule, kPhaseCount> make_schedules(const ErasureModel& model,
                                                      const SubcubeGrid& grid,
                                                      const PercolationConfig& percolation) {
  if (model.outside_proven_regime())
    throw ConfigError("TDMA schedules need alpha > 3 for the polynomial family");
  const double c = percolation.c;
  const double hop_z = access_hop(grid.dims()[2], percolation.kappa);
  const double hop_x = access_hop(grid.dims()[0], percolation.kappa);
  const double hop_h = 2.0 * std::numbers::sqrt3;
  std::array<PhaseSchedule, kPhaseCount> out;
  for (Phase phase : kAllPhases) {
    double hop = hop_z;
    if (is_highway_phase(phase)) hop = hop_h;
    if (phase == Phase::deliver) hop = hop_x;
    out[static_cast<int>(phase)] = make_schedule(phase, model, c, hop);
  }
  return out;
}

bool highway_limited(const ErasureModel& model, const NetworkConfig& network,
                     const PercolationConfig& percolation) {
  if (model.family() != DecayFamily::exponential) return true;
  const double lhs = std::numbers::sqrt2 * percolation.c * percolation.kappa *
                     std::max(network.lambda, network.nu) / model.d_star();
  return lhs < std::min({network.lambda, network.mu, network.nu});
}

std::uint64_t default_round_budget(const NetworkConfig& network, int packets_per_source) {
  const double e = std::max({network.lambda, network.mu, network.nu});
  const double rounds = 1e4 * std::max(1, packets_per_source) *
                        std::pow(static_cast<double>(network.n), e);
  return static_cast<std::uint64_t>(std::min(rounds, 1e15));
}

namespace {

struct PathChoice {
  PathRef ref;
  bool ok = false;
  bool borrowed = false;
  std::string error;
};

PathChoice choose_path(const FamilyHighways& fh, int slab, int row, double coord, double c,
                       double w, bool borrow) {
  PathChoice out;
  const auto& part = fh.partition;
  const int rect = part.row_to_rect[static_cast<std::size_t>(row)];
  const Rectangle& r = part.rectangles[static_cast<std::size_t>(rect)];
  const auto paths = fh.in_rectangle(slab, rect);
  out.ref.slab = slab;
  out.ref.rect = rect;
  const double lo = r.first_row * c;
  const double height = r.rows * c;
  int slices = 0;
  int slice = 0;
  if (w > 0.0) {
    slices = std::max(1, static_cast<int>(std::ceil(height / w - 1e-9)));
    slice = static_cast<int>(std::floor((coord - lo) / w));
  } else {
    slices = static_cast<int>(paths.size());
    if (slices > 0) slice = static_cast<int>(std::floor((coord - lo) / height * slices));
  }
  slice = std::clamp(slice, 0, std::max(0, slices - 1));
  out.ref.slice = slice;
  const std::size_t rects = part.rectangles.size();
  if (paths.empty() && borrow) {
    // Nearest rectangle of the slab with a crossing; take its crossing
    // closest to this band.
    for (int dist = 1; dist < static_cast<int>(rects); ++dist) {
      for (int side : {-1, 1}) {
        const int other = rect + side * dist;
        if (other < 0 || other >= static_cast<int>(rects)) continue;
        const auto alt = fh.in_rectangle(slab, other);
        if (alt.empty()) continue;
        out.ref.rect = other;
        out.ref.slice = side < 0 ? static_cast<int>(alt.size()) - 1 : 0;
        out.ref.index = static_cast<int>(
                            fh.offsets[static_cast<std::size_t>(slab) * rects + other]) +
                        out.ref.slice;
        out.ok = true;
        out.borrowed = true;
        return out;
      }
    }
  }
  if (paths.empty() || static_cast<int>(paths.size()) < slices) {
    std::ostringstream os;
    os << to_string(fh.family) << " slab " << slab << " rectangle " << rect << " has "
       << paths.size() << " crossings for " << slices << " slices";
    out.error = os.str();
    return out;
  }
  out.ref.index = static_cast<int>(fh.offsets[static_cast<std::size_t>(slab) * rects + rect]) +
                  slice;
  out.ok = true;
  return out;
}

double sq(double v) { return v * v; }

/// Index of the path node minimizing the distance to the line through
/// `target` parallel to `axis`.
std::size_t closest_to_line(const std::vector<std::size_t>& nodes,
                            const std::vector<Point>& pos, const Point& target, int axis) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Point& p = pos[nodes[i]];
    double d = 0.0;
    for (int a = 0; a < 3; ++a)
      if (a != axis) d += sq(p[a] - target[a]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::pair<std::size_t, std::size_t> closest_pair(const std::vector<std::size_t>& a,
                                                 const std::vector<std::size_t>& b,
                                                 const std::vector<Point>& pos) {
  std::pair<std::size_t, std::size_t> best{0, 0};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = squared_distance(pos[a[i]], pos[b[j]]);
      if (d < best_d) {
        best_d = d;
        best = {i, j};
      }
    }
  return best;
}

std::vector<std::size_t> segment(const std::vector<std::size_t>& nodes, std::size_t from,
                                 std::size_t to) {
  std::vector<std::size_t> out;
  if (from <= to) {
    out.assign(nodes.begin() + from, nodes.begin() + to + 1);
  } else {
    for (std::size_t i = from + 1; i-- > to;) out.push_back(nodes[i]);
  }
  return out;
}

std::vector<std::size_t> hop(std::size_t a, std::size_t b) {
  if (a == b) return {a};
  return {a, b};
}

}  // namespace

RoutePlan assign_slices_and_entries(const NetworkInstance& instance, const SubcubeGrid& grid,
                                    const HighwaySystem& highways, const RoutingConfig& config) {
  RoutePlan plan;
  const auto& side = grid.sides();
  const auto pos = instance.effective_positions();
  const auto& fx = highways.family(HighwayFamily::x);
  const auto& fy = highways.family(HighwayFamily::y);
  const auto& fz = highways.family(HighwayFamily::z);
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> pair_cache[2];
  auto cached_pair = [&](int which, int a, int b, const std::vector<std::size_t>& na,
                         const std::vector<std::size_t>& nb) {
    auto key = std::make_pair(a, b);
    auto it = pair_cache[which].find(key);
    if (it != pair_cache[which].end()) return it->second;
    auto result = closest_pair(na, nb, pos);
    pair_cache[which].emplace(key, result);
    return result;
  };

  plan.routes.reserve(instance.size());
  for (std::size_t s = 0; s < instance.size(); ++s) {
    PairRoute route;
    route.source = s;
    route.destination = instance.pairing[s];
    const std::size_t d = route.destination;
    if (s == d) {
      plan.routes.push_back(std::move(route));
      continue;
    }
    const Cell& cs = grid.cell_of(s);
    const Cell& cd = grid.cell_of(d);
    if (cs == cd) {
      route.direct = true;
      route.entry = route.u1 = route.v1 = route.u2 = route.v2 = route.exit = s;
      route.legs[static_cast<int>(Phase::deliver)] = {s, d};
      plan.routes.push_back(std::move(route));
      continue;
    }
    const bool b = config.borrow_adjacent;
    const auto px = choose_path(fx, cs[1], cs[2], pos[s].z, side[2], config.w, b);
    const auto py = choose_path(fy, cd[0], cs[2], pos[s].z, side[2], config.w, b);
    const auto pz = choose_path(fz, cd[1], cd[0], pos[d].x, side[0], config.w, b);
    plan.borrowed += px.borrowed + py.borrowed + pz.borrowed;
    plan.max_slices[0] = std::max(plan.max_slices[0], px.ref.slice + 1);
    plan.max_slices[1] = std::max(plan.max_slices[1], py.ref.slice + 1);
    plan.max_slices[2] = std::max(plan.max_slices[2], pz.ref.slice + 1);
    bool ok = true;
    for (const auto* choice : {&px, &py, &pz})
      if (!choice->ok) {
        ok = false;
        if (plan.warnings.size() < 16) plan.warnings.push_back(choice->error);
      }
    if (!ok) {
      plan.failed = true;
      plan.routes.push_back(std::move(route));
      continue;
    }
    route.x_path = px.ref;
    route.y_path = py.ref;
    route.z_path = pz.ref;
    const auto& xn = fx.paths[static_cast<std::size_t>(px.ref.index)].nodes;
    const auto& yn = fy.paths[static_cast<std::size_t>(py.ref.index)].nodes;
    const auto& zn = fz.paths[static_cast<std::size_t>(pz.ref.index)].nodes;

    const std::size_t ie = closest_to_line(xn, pos, pos[s], 2);
    const auto [ia, ib] = cached_pair(0, px.ref.index, py.ref.index, xn, yn);
    const auto [jb, jc] = cached_pair(1, py.ref.index, pz.ref.index, yn, zn);
    const std::size_t ix = closest_to_line(zn, pos, pos[d], 0);

    route.entry = xn[ie];
    route.u1 = xn[ia];
    route.v1 = yn[ib];
    route.u2 = yn[jb];
    route.v2 = zn[jc];
    route.exit = zn[ix];
    auto& legs = route.legs;
    legs[static_cast<int>(Phase::drain)] = hop(s, route.entry);
    legs[static_cast<int>(Phase::x_highway)] = segment(xn, ie, ia);
    legs[static_cast<int>(Phase::interchange1)] = hop(route.u1, route.v1);
    legs[static_cast<int>(Phase::y_highway)] = segment(yn, ib, jb);
    legs[static_cast<int>(Phase::interchange2)] = hop(route.u2, route.v2);
    legs[static_cast<int>(Phase::z_highway)] = segment(zn, jc, ix);
    legs[static_cast<int>(Phase::deliver)] = hop(route.exit, d);
    plan.routes.push_back(std::move(route));
  }
  return plan;
}

double max_hop_length(const NetworkInstance& instance, const RoutePlan& plan, Phase phase) {
  double best = 0.0;
  for (const auto& route : plan.routes) {
    const auto& leg = route.legs[static_cast<int>(phase)];
    for (std::size_t i = 1; i < leg.size(); ++i)
      best = std::max(best, distance(instance.effective_position(leg[i - 1]),
                                     instance.effective_position(leg[i])));
  }
  return best;
}

std::size_t max_relay_load(const RoutePlan& plan, Phase phase) {
  std::unordered_map<std::size_t, std::size_t> load;
  std::size_t best = 0;
  for (const auto& route : plan.routes) {
    const auto& leg = route.legs[static_cast<int>(phase)];
    for (std::size_t i = 0; i + 1 < leg.size(); ++i) best = std::max(best, ++load[leg[i]]);
  }
  return best;
}

TrafficPlan build_traffic(const RoutePlan& plan, int packets_per_source) {
  if (packets_per_source < 1) throw ConfigError("packets per source must be >= 1");
  TrafficPlan traffic;
  traffic.pairs = plan.routes.size();
  traffic.packets_per_pair = packets_per_source;
  for (std::size_t r = 0; r < plan.routes.size(); ++r)
    for (int p = 0; p < kPhaseCount; ++p) {
      const auto& leg = plan.routes[r].legs[p];
      if (leg.size() >= 2) traffic.legs[p].push_back({r, leg});
    }
  return traffic;
}

double measured_phase_rate(const SimReport& report, Phase phase) {
  return report.per_phase_rates[static_cast<int>(phase)];
}

}  // namespace erasure3d
