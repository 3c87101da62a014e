#pragma once

#include <json.hpp>

#include "erasure3d/bounds.hpp"
#include "erasure3d/netgen.hpp"
#include "erasure3d/percolation.hpp"
#include "erasure3d/routing.hpp"

namespace erasure3d {

using Json = nlohmann::ordered_json;

Json to_json(const NetworkInstance& instance);
/// Inverse of to_json; validates the configuration and the pairing.
NetworkInstance instance_from_json(const Json& j);

Json to_json(const SimReport& report);
Json to_json(const BoundReport& report);
Json to_json(const BinningReport& report);
Json to_json(const PhaseSchedule& schedule);

/// Rectangle crossing counts plus every highway as its list of cells and
/// relay nodes.
Json to_json(const HighwaySystem& highways);

/// 64-bit FNV-1a of a string.
std::uint64_t fnv1a(std::string_view text);

}  // namespace erasure3d
