#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erasure3d/netgen.hpp"

namespace erasure3d {

using Cell = std::array<int, 3>;

/// Tessellation of the cuboid into subcubes of nominal side c, in effective
/// coordinates. Each axis is cut into a whole number of cells, so the actual
/// cell side along an axis is extent / count (at least c).
class SubcubeGrid {
 public:
  SubcubeGrid() = default;
  SubcubeGrid(std::array<int, 3> dims, double c);
  SubcubeGrid(std::array<int, 3> dims, std::array<double, 3> sides);

  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<double, 3>& sides() const { return sides_; }
  std::size_t cell_count() const { return members_.size(); }

  std::size_t flat(const Cell& cell) const {
    return (static_cast<std::size_t>(cell[0]) * dims_[1] + cell[1]) * dims_[2] + cell[2];
  }
  Cell unflat(std::size_t index) const;

  bool occupied(const Cell& cell) const { return !members_[flat(cell)].empty(); }
  /// Node indices in the subcube, ascending.
  const std::vector<std::size_t>& members(const Cell& cell) const {
    return members_[flat(cell)];
  }
  const std::vector<std::size_t>& members(std::size_t flat_index) const {
    return members_[flat_index];
  }
  /// Lowest node index in an occupied subcube.
  std::size_t representative(const Cell& cell) const { return members(cell).front(); }

  const Cell& cell_of(std::size_t node) const { return node_cell_[node]; }
  std::size_t occupied_count() const;

  void assign(std::size_t node, const Cell& cell);

 private:
  std::array<int, 3> dims_{1, 1, 1};
  std::array<double, 3> sides_{1.0, 1.0, 1.0};
  std::vector<std::vector<std::size_t>> members_;
  std::vector<Cell> node_cell_;
};

/// Subcubes per axis: floor(extent / c), at least one.
std::array<int, 3> subcube_counts(const NetworkConfig& config, double c);

SubcubeGrid tessellate(const NetworkInstance& instance, double c);

/// 1 - exp(-c^3): probability that a subcube is occupied.
double occupancy_probability(double c);

/// 1 + ratio + kappa * ln(6 (1 - p)); the crossing-count guarantee needs it
/// negative, with ratio = lambda/nu for x crossings and nu/lambda for z.
double lemma1_condition(double p, double kappa, double ratio);

struct PercolationConfig {
  double c = 1.5;
  double kappa = 1.3;
  /// Highway density constant used for N <= delta ln m statistics.
  double delta = 0.1;

  /// Human-readable warnings for out-of-range occupancy or a violated
  /// crossing condition. Empty when everything is in range.
  std::vector<std::string> diagnostics(const NetworkConfig& network) const;
};

enum class HighwayFamily { x = 0, y = 1, z = 2 };

std::string_view to_string(HighwayFamily family);

/// Which grid axes a family's section lattice uses.
struct SectionAxes {
  int normal;
  int along;
  int across;
};
SectionAxes section_axes(HighwayFamily family);

/// 2D bond lattice of one subcube-thick slab. Square (i, j) carries a
/// diagonal bond, open iff the subcube is occupied; alternating diagonal
/// orientation makes the bonds a 45-degree rotated square lattice.
/// Crossings run along the first index.
class SectionLattice {
 public:
  SectionLattice(int along, int across);
  SectionLattice(int along, int across, std::vector<char> open);

  int along() const { return along_; }
  int across() const { return across_; }
  int slab_index = 0;

  bool open(int i, int j) const { return open_[index(i, j)] != 0; }
  void set_open(int i, int j, bool value) { open_[index(i, j)] = value ? 1 : 0; }
  std::size_t bond_count() const { return open_.size(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * across_ + j;
  }

 private:
  int along_;
  int across_;
  std::vector<char> open_;
};

SectionLattice section_lattice(const SubcubeGrid& grid, HighwayFamily family, int slab);

/// Band of consecutive rows (across-coordinates) crossed along its length.
struct Rectangle {
  int first_row = 0;
  int rows = 0;
};

struct RectanglePartition {
  std::vector<Rectangle> rectangles;
  /// kappa ln m - (m / count): slack between the nominal and actual height.
  double epsilon_m = 0.0;
  double raw_height = 0.0;
  /// Rectangle index per row.
  std::vector<int> row_to_rect;
};

/// Splits m_across rows into ceil(m / (kappa ln m)) bands whose integer
/// heights differ by at most one. Throws ConfigError when m_across < 2 or
/// kappa ln m_across < 1.
RectanglePartition partition_rectangles(int m_along, int m_across, double kappa);

/// Squares (along, across) visited by one crossing, in order along the
/// crossing direction.
using BondPath = std::vector<std::array<int, 2>>;

/// Maximum number of edge-disjoint open crossings of the rectangle from
/// its first column to its last (Menger via unit-capacity max flow).
int count_edge_disjoint_crossings(const SectionLattice& lattice, const Rectangle& rect);

struct CrossingExtraction {
  std::vector<BondPath> paths;
  /// quota - paths.size() when the quota exceeds the max flow.
  int shortfall = 0;
};

/// Up to `quota` pairwise edge-disjoint crossings recovered by flow
/// decomposition.
CrossingExtraction extract_crossing_paths(const SectionLattice& lattice,
                                          const Rectangle& rect, int quota);

struct HighwayPath {
  HighwayFamily family = HighwayFamily::x;
  int slab = 0;
  int rect = 0;
  /// Rank within the rectangle after ordering by mean across-coordinate;
  /// slice i of the rectangle uses the path with order i.
  int order = 0;
  std::vector<Cell> cells;
  std::vector<std::size_t> nodes;
};

struct RectangleRecord {
  HighwayFamily family;
  int slab;
  int rect;
  int first_row;
  int rows;
  int crossings;
};

struct FamilyHighways {
  HighwayFamily family = HighwayFamily::x;
  RectanglePartition partition;
  int slabs = 0;
  std::vector<HighwayPath> paths;
  /// offsets[slab * rects + rect] .. offsets[... + 1] index into paths.
  std::vector<std::size_t> offsets;
  int min_crossings = 0;
  double delta_hat = 0.0;

  std::span<const HighwayPath> in_rectangle(int slab, int rect) const;
};

struct HighwaySystem {
  std::array<FamilyHighways, 3> families;
  std::vector<RectangleRecord> rectangles;
  /// min over families of min_j C^j / ln m_across.
  double delta_hat = 0.0;
  bool failed = false;
  std::vector<std::string> warnings;

  const FamilyHighways& family(HighwayFamily f) const {
    return families[static_cast<int>(f)];
  }
  std::size_t path_count() const;
};

/// Builds x and z highways from the V_xz section of every y-slab and y
/// highways from the V_yz section of every x-slab. Any rectangle without a
/// crossing marks the system failed.
HighwaySystem build_highway_system(const SubcubeGrid& grid, const PercolationConfig& config);

/// Closed-form upper bound on Pr{N <= delta ln m_z}, clamped to [0, 1].
/// Requires 5/6 < p < 1.
double lemma1_failure_bound(double p, double kappa, double delta, int m_x, int m_z,
                            double epsilon_m);

}  // namespace erasure3d
