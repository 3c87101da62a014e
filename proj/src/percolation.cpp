#include "erasure3d/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "erasure3d/errors.hpp"
#include "erasure3d/maxflow.hpp"

namespace erasure3d {

SubcubeGrid::SubcubeGrid(std::array<int, 3> dims, double c)
    : SubcubeGrid(dims, std::array<double, 3>{c, c, c}) {}

SubcubeGrid::SubcubeGrid(std::array<int, 3> dims, std::array<double, 3> sides)
    : dims_(dims), sides_(sides),
      members_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]) {}

Cell SubcubeGrid::unflat(std::size_t index) const {
  const int iz = static_cast<int>(index % dims_[2]);
  index /= dims_[2];
  const int iy = static_cast<int>(index % dims_[1]);
  const int ix = static_cast<int>(index / dims_[1]);
  return {ix, iy, iz};
}

std::size_t SubcubeGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(
      members_.begin(), members_.end(), [](const auto& m) { return !m.empty(); }));
}

void SubcubeGrid::assign(std::size_t node, const Cell& cell) {
  if (node_cell_.size() <= node) node_cell_.resize(node + 1);
  node_cell_[node] = cell;
  members_[flat(cell)].push_back(node);
}

std::array<int, 3> subcube_counts(const NetworkConfig& config, double c) {
  const auto ext = config.effective_extent();
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a)
    dims[a] = std::max(1, static_cast<int>(std::floor(ext[a] / c + 1e-9)));
  return dims;
}

SubcubeGrid tessellate(const NetworkInstance& instance, double c) {
  if (!(c > 0.0)) throw ConfigError("subcube side c must be positive");
  const auto dims = subcube_counts(instance.config, c);
  const auto ext = instance.config.effective_extent();
  std::array<double, 3> sides{};
  for (int a = 0; a < 3; ++a) sides[a] = std::max(c, ext[a] / dims[a]);
  SubcubeGrid grid(dims, sides);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Point p = instance.effective_position(i);
    Cell cell{};
    for (int a = 0; a < 3; ++a)
      cell[a] = std::clamp(static_cast<int>(std::floor(p[a] / sides[a])), 0, dims[a] - 1);
    grid.assign(i, cell);
  }
  return grid;
}

double occupancy_probability(double c) { return -std::expm1(-c * c * c); }

double lemma1_condition(double p, double kappa, double ratio) {
  return 1.0 + ratio + kappa * std::log(6.0 * (1.0 - p));
}

std::vector<std::string> PercolationConfig::diagnostics(const NetworkConfig& network) const {
  std::vector<std::string> out;
  const double p = occupancy_probability(c);
  if (!(p > 5.0 / 6.0 && p < 1.0)) {
    std::ostringstream os;
    os << "occupancy p=" << p << " outside (5/6, 1)";
    out.push_back(os.str());
    return out;
  }
  if (network.nu > 0.0) {
    const double cx = lemma1_condition(p, kappa, network.lambda / network.nu);
    const double cz = lemma1_condition(p, kappa, network.nu / network.lambda);
    if (cx >= 0.0) {
      std::ostringstream os;
      os << "x-crossing condition 1+lambda/nu+kappa ln(6(1-p)) = " << cx << " >= 0";
      out.push_back(os.str());
    }
    if (cz >= 0.0) {
      std::ostringstream os;
      os << "z-crossing condition 1+nu/lambda+kappa ln(6(1-p)) = " << cz << " >= 0";
      out.push_back(os.str());
    }
  }
  return out;
}

std::string_view to_string(HighwayFamily family) {
  switch (family) {
    case HighwayFamily::x: return "x";
    case HighwayFamily::y: return "y";
    case HighwayFamily::z: return "z";
  }
  return "?";
}

SectionAxes section_axes(HighwayFamily family) {
  switch (family) {
    case HighwayFamily::x: return {1, 0, 2};
    case HighwayFamily::y: return {0, 1, 2};
    case HighwayFamily::z: return {1, 2, 0};
  }
  return {1, 0, 2};
}

SectionLattice::SectionLattice(int along, int across)
    : along_(along), across_(across),
      open_(static_cast<std::size_t>(along) * across, 0) {}

SectionLattice::SectionLattice(int along, int across, std::vector<char> open)
    : along_(along), across_(across), open_(std::move(open)) {
  if (open_.size() != static_cast<std::size_t>(along) * across)
    throw ConfigError("lattice pattern size mismatch");
}

SectionLattice section_lattice(const SubcubeGrid& grid, HighwayFamily family, int slab) {
  const auto axes = section_axes(family);
  const auto& dims = grid.dims();
  SectionLattice lattice(dims[axes.along], dims[axes.across]);
  lattice.slab_index = slab;
  Cell cell{};
  cell[axes.normal] = slab;
  for (int i = 0; i < dims[axes.along]; ++i)
    for (int j = 0; j < dims[axes.across]; ++j) {
      cell[axes.along] = i;
      cell[axes.across] = j;
      lattice.set_open(i, j, grid.occupied(cell));
    }
  return lattice;
}

RectanglePartition partition_rectangles(int m_along, int m_across, double kappa) {
  (void)m_along;
  if (m_across < 2) throw ConfigError("rectangle partition needs at least 2 rows");
  const double raw = kappa * std::log(static_cast<double>(m_across));
  if (raw < 1.0) throw ConfigError("kappa ln m < 1: no valid rectangle partition");
  RectanglePartition part;
  part.raw_height = raw;
  // Smallest epsilon >= 0 making m / (raw - epsilon) a positive integer.
  int count = static_cast<int>(std::ceil(m_across / raw - 1e-12));
  count = std::clamp(count, 1, m_across);
  part.epsilon_m = raw - static_cast<double>(m_across) / count;
  const int base = m_across / count;
  const int extra = m_across % count;
  int row = 0;
  part.row_to_rect.resize(static_cast<std::size_t>(m_across));
  for (int r = 0; r < count; ++r) {
    const int rows = base + (r < extra ? 1 : 0);
    part.rectangles.push_back({row, rows});
    for (int k = 0; k < rows; ++k) part.row_to_rect[row + k] = r;
    row += rows;
  }
  return part;
}

namespace {

/// Vertex graph of a rectangle: lattice corners (a, b) with a + b even,
/// a in [0, along], b in [first_row, first_row + rows].
struct RectangleGraph {
  FlowNetwork net{2};
  int source = 0;
  int sink = 1;
};

RectangleGraph build_graph(const SectionLattice& lattice, const Rectangle& rect) {
  RectangleGraph g;
  const int width = lattice.along();
  const int height = rect.rows;
  std::vector<int> id(static_cast<std::size_t>(width + 1) * (height + 1), -1);
  auto vertex = [&](int a, int b) {
    int& slot = id[static_cast<std::size_t>(a) * (height + 1) + (b - rect.first_row)];
    if (slot < 0) {
      slot = g.net.add_vertex();
      if (a == 0) g.net.add_arc(g.source, slot, height + 1);
      if (a == width) g.net.add_arc(slot, g.sink, height + 1);
    }
    return slot;
  };
  for (int i = 0; i < width; ++i)
    for (int j = rect.first_row; j < rect.first_row + height; ++j) {
      if (!lattice.open(i, j)) continue;
      int u, v;
      if ((i + j) % 2 == 0) {
        u = vertex(i, j);
        v = vertex(i + 1, j + 1);
      } else {
        u = vertex(i + 1, j);
        v = vertex(i, j + 1);
      }
      g.net.add_undirected_edge(u, v, static_cast<int>(lattice.index(i, j)));
    }
  return g;
}

void check_rect(const SectionLattice& lattice, const Rectangle& rect) {
  if (rect.rows <= 0 || rect.first_row < 0 || rect.first_row + rect.rows > lattice.across())
    throw ConfigError("rectangle outside lattice bounds");
}

}  // namespace

int count_edge_disjoint_crossings(const SectionLattice& lattice, const Rectangle& rect) {
  check_rect(lattice, rect);
  auto g = build_graph(lattice, rect);
  return g.net.max_flow(g.source, g.sink);
}

CrossingExtraction extract_crossing_paths(const SectionLattice& lattice,
                                          const Rectangle& rect, int quota) {
  check_rect(lattice, rect);
  CrossingExtraction result;
  if (quota <= 0) return result;
  auto g = build_graph(lattice, rect);
  const int flow = g.net.max_flow(g.source, g.sink, quota);
  for (const auto& tags : g.net.decompose(g.source, g.sink)) {
    BondPath path;
    path.reserve(tags.size());
    for (int t : tags)
      path.push_back({t / lattice.across(), t % lattice.across()});
    result.paths.push_back(std::move(path));
  }
  result.shortfall = quota - flow;
  return result;
}

std::span<const HighwayPath> FamilyHighways::in_rectangle(int slab, int rect) const {
  const std::size_t rects = partition.rectangles.size();
  const std::size_t k = static_cast<std::size_t>(slab) * rects + rect;
  return {paths.data() + offsets[k], offsets[k + 1] - offsets[k]};
}

std::size_t HighwaySystem::path_count() const {
  std::size_t total = 0;
  for (const auto& f : families) total += f.paths.size();
  return total;
}

namespace {

RectanglePartition partition_or_single(int m_along, int m_across, double kappa,
                                       std::vector<std::string>& warnings) {
  if (m_across >= 2 && kappa * std::log(static_cast<double>(m_across)) >= 1.0)
    return partition_rectangles(m_along, m_across, kappa);
  std::ostringstream os;
  os << "section with " << m_across << " rows too small to partition; using one rectangle";
  warnings.push_back(os.str());
  RectanglePartition part;
  part.raw_height = kappa * std::log(std::max(1.0, static_cast<double>(m_across)));
  part.epsilon_m = part.raw_height - m_across;
  part.rectangles.push_back({0, m_across});
  part.row_to_rect.assign(static_cast<std::size_t>(m_across), 0);
  return part;
}

}  // namespace

HighwaySystem build_highway_system(const SubcubeGrid& grid, const PercolationConfig& config) {
  if (grid.cell_count() == 0) throw ConfigError("empty subcube grid");
  HighwaySystem sys;
  const auto& dims = grid.dims();
  sys.delta_hat = std::numeric_limits<double>::infinity();
  for (HighwayFamily family : {HighwayFamily::x, HighwayFamily::y, HighwayFamily::z}) {
    const auto axes = section_axes(family);
    FamilyHighways& fh = sys.families[static_cast<int>(family)];
    fh.family = family;
    fh.partition = partition_or_single(dims[axes.along], dims[axes.across], config.kappa,
                                       sys.warnings);
    fh.slabs = dims[axes.normal];
    fh.offsets.push_back(0);
    fh.min_crossings = std::numeric_limits<int>::max();
    for (int slab = 0; slab < fh.slabs; ++slab) {
      const SectionLattice lattice = section_lattice(grid, family, slab);
      for (int r = 0; r < static_cast<int>(fh.partition.rectangles.size()); ++r) {
        const Rectangle& rect = fh.partition.rectangles[r];
        auto extraction = extract_crossing_paths(lattice, rect, rect.rows + 1);
        const int crossings = static_cast<int>(extraction.paths.size());
        sys.rectangles.push_back({family, slab, r, rect.first_row, rect.rows, crossings});
        fh.min_crossings = std::min(fh.min_crossings, crossings);
        if (crossings == 0) sys.failed = true;

        // Slice i (lowest rows first) gets the path lying lowest on average.
        std::vector<std::pair<double, std::size_t>> keyed;
        for (std::size_t k = 0; k < extraction.paths.size(); ++k) {
          double mean = 0.0;
          for (const auto& sq : extraction.paths[k]) mean += sq[1];
          mean /= static_cast<double>(std::max<std::size_t>(1, extraction.paths[k].size()));
          keyed.push_back({mean, k});
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t rank = 0; rank < keyed.size(); ++rank) {
          HighwayPath path;
          path.family = family;
          path.slab = slab;
          path.rect = r;
          path.order = static_cast<int>(rank);
          for (const auto& sq : extraction.paths[keyed[rank].second]) {
            Cell cell{};
            cell[axes.normal] = slab;
            cell[axes.along] = sq[0];
            cell[axes.across] = sq[1];
            path.cells.push_back(cell);
            path.nodes.push_back(grid.representative(cell));
          }
          fh.paths.push_back(std::move(path));
        }
        fh.offsets.push_back(fh.paths.size());
      }
    }
    const double m = static_cast<double>(dims[axes.across]);
    fh.delta_hat = m > 1.0 ? fh.min_crossings / std::log(m) : fh.min_crossings;
    sys.delta_hat = std::min(sys.delta_hat, fh.delta_hat);
  }
  return sys;
}

double lemma1_failure_bound(double p, double kappa, double delta, int m_x, int m_z,
                            double epsilon_m) {
  if (!(p > 5.0 / 6.0 && p < 1.0))
    throw ConfigError("failure bound requires 5/6 < p < 1");
  const double lmz = std::log(static_cast<double>(m_z));
  const double q6 = 6.0 * (1.0 - p);
  const double exponent = delta * std::log(p / (1.0 - p)) + kappa * std::log(q6);
  const double log_base = std::log(4.0 / 3.0 * (m_x + 1.0)) + exponent * lmz -
                          epsilon_m * std::log(q6);
  const double power = static_cast<double>(m_z) / (kappa * lmz - epsilon_m);
  const double log_bound = power * log_base;
  if (log_bound >= 0.0) return 1.0;
  return std::exp(log_bound);
}

}  // namespace erasure3d
