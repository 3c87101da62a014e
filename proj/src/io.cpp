#include "erasure3d/io.hpp"

#include <algorithm>

#include "erasure3d/errors.hpp"

namespace erasure3d {

Json to_json(const NetworkInstance& instance) {
  const auto& c = instance.config;
  Json j;
  j["n"] = c.n;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["nu"] = c.nu;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  Json pos = Json::array();
  for (const Point& p : instance.positions) pos.push_back({p.x, p.y, p.z});
  j["positions"] = std::move(pos);
  j["pairing"] = instance.pairing;
  return j;
}

NetworkInstance instance_from_json(const Json& j) {
  NetworkInstance inst;
  try {
    inst.config.n = j.at("n").get<std::size_t>();
    inst.config.lambda = j.at("lambda").get<double>();
    inst.config.mu = j.at("mu").get<double>();
    inst.config.nu = j.at("nu").get<double>();
    inst.config.mode = parse_density_mode(j.at("mode").get<std::string>());
    inst.config.seed = j.value("seed", std::uint64_t{0});
    inst.config.allow_flat = inst.config.nu == 0.0;
    for (const auto& p : j.at("positions")) {
      if (p.size() != 3) throw ConfigError("position must have 3 coordinates");
      inst.positions.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    inst.pairing = j.at("pairing").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed instance JSON: ") + e.what());
  }
  inst.config.validate();
  if (inst.positions.size() != inst.config.n || inst.pairing.size() != inst.config.n)
    throw ConfigError("instance size does not match n");
  std::vector<char> seen(inst.config.n, 0);
  for (std::size_t d : inst.pairing) {
    if (d >= inst.config.n || seen[d]) throw ConfigError("pairing is not a permutation");
    seen[d] = 1;
  }
  return inst;
}

Json to_json(const SimReport& r) {
  Json j;
  j["delivered_symbols"] = r.delivered_symbols;
  j["total_slots"] = r.total_slots;
  j["aggregate_throughput"] = r.aggregate_throughput;
  Json phases = Json::object();
  for (Phase p : kAllPhases) {
    const int i = static_cast<int>(p);
    phases[std::string(to_string(p))] = {{"slots", r.phase_slots[i]},
                                         {"delivered", r.phase_delivered[i]},
                                         {"attempts", r.phase_attempts[i]},
                                         {"successes", r.phase_successes[i]},
                                         {"rate", r.per_phase_rates[i]}};
  }
  j["phases"] = std::move(phases);
  j["bottleneck_phase"] = to_string(r.bottleneck_phase);
  j["percolation_failed"] = r.percolation_failed;
  j["incomplete"] = r.incomplete;
  return j;
}

Json to_json(const BoundReport& r) {
  return {{"T_x", r.T_x},         {"T_y", r.T_y},
          {"T_z", r.T_z},         {"min_bound", r.min_bound},
          {"min_axis", axis_name(r.min_axis)}, {"near_term", r.near_term},
          {"far_term", r.far_term}};
}

Json to_json(const BinningReport& r) {
  return {{"granularity", to_string(r.granularity)},
          {"bins", r.bins},
          {"max_occupancy", r.max_occupancy},
          {"threshold", r.threshold},
          {"holds", r.holds}};
}

Json to_json(const PhaseSchedule& s) {
  return {{"phase", to_string(s.phase)}, {"hop", s.hop},           {"k", s.k},
          {"spacing", s.spacing},        {"slots_per_round", s.slots_per_round}};
}

Json to_json(const HighwaySystem& h) {
  Json j;
  j["failed"] = h.failed;
  j["delta_hat"] = h.delta_hat;
  j["warnings"] = h.warnings;
  Json rects = Json::array();
  for (const auto& r : h.rectangles)
    rects.push_back({{"family", to_string(r.family)},
                     {"slab", r.slab},
                     {"rect", r.rect},
                     {"first_row", r.first_row},
                     {"rows", r.rows},
                     {"crossings", r.crossings}});
  j["rectangles"] = std::move(rects);
  Json paths = Json::array();
  for (const auto& f : h.families)
    for (const auto& p : f.paths) {
      Json cells = Json::array();
      for (const auto& c : p.cells) cells.push_back({c[0], c[1], c[2]});
      paths.push_back({{"family", to_string(p.family)},
                       {"slab", p.slab},
                       {"rect", p.rect},
                       {"order", p.order},
                       {"cells", std::move(cells)},
                       {"nodes", p.nodes}});
    }
  j["paths"] = std::move(paths);
  return j;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace erasure3d
