#include <doctest.h>

#include <cmath>
#include <set>

#include "erasure3d/errors.hpp"
#include "erasure3d/percolation.hpp"
#include "erasure3d/rng.hpp"
#include "oracles.hpp"

using namespace erasure3d;

namespace {

SectionLattice random_lattice(int along, int across, double p, std::uint64_t seed) {
  SectionLattice lat(along, across);
  Rng rng(seed);
  for (int i = 0; i < along; ++i)
    for (int j = 0; j < across; ++j) lat.set_open(i, j, rng.bernoulli(p));
  return lat;
}

/// The two lattice vertices joined by the bond of square (i, j).
std::array<std::array<int, 2>, 2> bond_ends(int i, int j) {
  if ((i + j) % 2 == 0) return {{{i, j}, {i + 1, j + 1}}};
  return {{{i + 1, j}, {i, j + 1}}};
}

}  // namespace

TEST_CASE("occupancy probability") {
  CHECK(occupancy_probability(1.5) == doctest::Approx(1.0 - std::exp(-3.375)));
  CHECK(occupancy_probability(1.5) == doctest::Approx(0.9657).epsilon(1e-4));
  CHECK(occupancy_probability(0.0) == 0.0);
}

TEST_CASE("tessellation assigns every node to the cell containing it") {
  NetworkConfig cfg;
  cfg.n = 2000;
  cfg.seed = 4;
  const auto inst = generate(cfg);
  const auto grid = tessellate(inst, 1.5);
  const auto dims = grid.dims();
  const auto ext = cfg.effective_extent();
  std::size_t total = 0;
  for (std::size_t f = 0; f < grid.cell_count(); ++f) total += grid.members(f).size();
  CHECK(total == inst.size());
  for (int a = 0; a < 3; ++a) {
    CHECK(dims[a] == static_cast<int>(std::floor(ext[a] / 1.5)));
    CHECK(grid.sides()[a] * dims[a] == doctest::Approx(ext[a]));
    CHECK(grid.sides()[a] >= 1.5);
  }
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Cell& cell = grid.cell_of(i);
    for (int a = 0; a < 3; ++a) {
      CHECK(inst.positions[i][a] >= cell[a] * grid.sides()[a] - 1e-9);
      CHECK(inst.positions[i][a] <= (cell[a] + 1) * grid.sides()[a] + 1e-9);
    }
    CHECK(grid.unflat(grid.flat(cell)) == cell);
  }
  CHECK(grid.occupied_count() <= grid.cell_count());
}

TEST_CASE("rectangle partition") {
  SUBCASE("heights cover all rows and differ by at most one") {
    for (int m : {2, 3, 7, 16, 22, 100, 257}) {
      for (double kappa : {1.0, 1.3, 2.0}) {
        if (kappa * std::log(m) < 1.0) {
          CHECK_THROWS_AS(partition_rectangles(m, m, kappa), ConfigError);
          continue;
        }
        const auto part = partition_rectangles(m, m, kappa);
        int sum = 0, lo = m, hi = 0;
        for (std::size_t r = 0; r < part.rectangles.size(); ++r) {
          const auto& rect = part.rectangles[r];
          CHECK(rect.first_row == sum);
          for (int k = 0; k < rect.rows; ++k) CHECK(part.row_to_rect[sum + k] == (int)r);
          sum += rect.rows;
          lo = std::min(lo, rect.rows);
          hi = std::max(hi, rect.rows);
        }
        CHECK(sum == m);
        CHECK(hi - lo <= 1);
        const double count = static_cast<double>(part.rectangles.size());
        CHECK(count == std::ceil(m / (kappa * std::log(m)) - 1e-12));
        CHECK(part.epsilon_m >= -1e-12);
        CHECK(part.epsilon_m == doctest::Approx(kappa * std::log(m) - m / count));
      }
    }
  }
  SUBCASE("two rows with kappa 2") {
    const auto part = partition_rectangles(2, 2, 2.0);
    CHECK(part.rectangles.size() == 2);
    CHECK(part.epsilon_m == doctest::Approx(2 * std::log(2.0) - 1.0));
  }
  CHECK_THROWS_AS(partition_rectangles(1, 1, 1.3), ConfigError);
}

TEST_CASE("crossing counts agree with exhaustive enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int along = 3 + static_cast<int>(seed % 3);
    const int rows = 2 + static_cast<int>(seed % 4);
    const auto lat = random_lattice(along, rows + 1, 0.6, seed);
    const Rectangle rect{1, rows};
    CHECK(count_edge_disjoint_crossings(lat, rect) ==
          oracle::brute_force_crossings(lat, rect.first_row, rect.rows));
  }
}

TEST_CASE("fully open and fully closed rectangles") {
  for (int rows = 1; rows <= 6; ++rows) {
    SectionLattice open(7, rows, std::vector<char>(7 * rows, 1));
    CHECK(count_edge_disjoint_crossings(open, {0, rows}) ==
          oracle::brute_force_crossings(open, 0, rows));
    CHECK(count_edge_disjoint_crossings(open, {0, rows}) >= 1);
    SectionLattice closed(7, rows);
    CHECK(count_edge_disjoint_crossings(closed, {0, rows}) == 0);
  }
  SectionLattice lat(4, 4);
  CHECK_THROWS_AS(count_edge_disjoint_crossings(lat, {2, 3}), ConfigError);
}

TEST_CASE("extracted crossings are valid and bond-disjoint") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto lat = random_lattice(12, 8, 0.8, 100 + seed);
    const Rectangle rect{2, 5};
    const int flow = count_edge_disjoint_crossings(lat, rect);
    const auto ex = extract_crossing_paths(lat, rect, 100);
    CHECK(static_cast<int>(ex.paths.size()) == flow);
    CHECK(ex.shortfall == 100 - flow);
    std::set<std::pair<int, int>> used;
    for (const auto& path : ex.paths) {
      REQUIRE_FALSE(path.empty());
      // Starts on the first column, ends on the last one.
      CHECK(path.front()[0] == 0);
      CHECK(path.back()[0] == lat.along() - 1);
      for (const auto& sq : path) {
        CHECK(lat.open(sq[0], sq[1]));
        CHECK(sq[1] >= rect.first_row);
        CHECK(sq[1] < rect.first_row + rect.rows);
        CHECK(used.insert({sq[0], sq[1]}).second);
      }
      // Consecutive bonds share a lattice vertex.
      for (std::size_t k = 1; k < path.size(); ++k) {
        const auto a = bond_ends(path[k - 1][0], path[k - 1][1]);
        const auto b = bond_ends(path[k][0], path[k][1]);
        bool shared = false;
        for (const auto& x : a)
          for (const auto& y : b) shared = shared || x == y;
        CHECK(shared);
      }
    }
    const auto partial = extract_crossing_paths(lat, rect, 1);
    CHECK(partial.paths.size() == (flow > 0 ? 1u : 0u));
  }
}

TEST_CASE("section axes") {
  CHECK(section_axes(HighwayFamily::x).along == 0);
  CHECK(section_axes(HighwayFamily::x).across == 2);
  CHECK(section_axes(HighwayFamily::x).normal == 1);
  CHECK(section_axes(HighwayFamily::z).along == 2);
  CHECK(section_axes(HighwayFamily::z).across == 0);
  CHECK(section_axes(HighwayFamily::y).along == 1);
  CHECK(section_axes(HighwayFamily::y).normal == 0);
}

TEST_CASE("highway system on a random cubic network") {
  NetworkConfig cfg;
  cfg.n = 8192;
  cfg.seed = 21;
  const auto inst = generate(cfg);
  PercolationConfig pc;
  const auto grid = tessellate(inst, pc.c);
  const auto hw = build_highway_system(grid, pc);
  CHECK(hw.path_count() > 0);
  int min_crossings = 1 << 30;
  for (const auto& rec : hw.rectangles) min_crossings = std::min(min_crossings, rec.crossings);
  CHECK(hw.failed == (min_crossings == 0));
  for (const auto& fam : hw.families) {
    const auto axes = section_axes(fam.family);
    CHECK(fam.slabs == grid.dims()[axes.normal]);
    CHECK(fam.offsets.size() == fam.partition.rectangles.size() * fam.slabs + 1);
    for (int slab = 0; slab < fam.slabs; ++slab)
      for (int r = 0; r < static_cast<int>(fam.partition.rectangles.size()); ++r) {
        const auto paths = fam.in_rectangle(slab, r);
        for (std::size_t k = 0; k < paths.size(); ++k) {
          const auto& p = paths[k];
          CHECK(p.order == static_cast<int>(k));
          CHECK(p.slab == slab);
          REQUIRE(p.cells.size() == p.nodes.size());
          CHECK(p.cells.front()[axes.along] == 0);
          CHECK(p.cells.back()[axes.along] == grid.dims()[axes.along] - 1);
          for (std::size_t q = 0; q < p.cells.size(); ++q) {
            CHECK(p.cells[q][axes.normal] == slab);
            CHECK(grid.cell_of(p.nodes[q]) == p.cells[q]);
          }
        }
      }
  }
  const double m = grid.dims()[2];
  CHECK(hw.delta_hat <= hw.family(HighwayFamily::x).min_crossings / std::log(m) + 1e-12);
}

TEST_CASE("crossing-count condition and failure bound") {
  const double p = occupancy_probability(1.5);
  CHECK(lemma1_condition(p, 1.3, 1.0) < 0.0);
  CHECK(lemma1_condition(0.9, 1.3, 1.0) > 0.0);
  PercolationConfig pc;
  NetworkConfig cubic;
  CHECK(pc.diagnostics(cubic).empty());
  PercolationConfig small;
  small.c = 1.0;
  CHECK_FALSE(small.diagnostics(cubic).empty());

  CHECK_THROWS_AS(lemma1_failure_bound(0.8, 1.3, 0.1, 32, 32, 0.1), ConfigError);
  double prev = 2.0;
  for (int m : {32, 64, 128, 256, 1024, 4096}) {
    const auto part = partition_rectangles(m, m, 1.3);
    const double b = lemma1_failure_bound(p, 1.3, 0.1, m, m, part.epsilon_m);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(b <= prev + 1e-12);
    prev = b;
  }
  CHECK(prev < 0.01);
}
