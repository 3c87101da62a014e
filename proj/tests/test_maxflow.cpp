#include <doctest.h>

#include <set>

#include "erasure3d/maxflow.hpp"

using namespace erasure3d;

TEST_CASE("unit-capacity undirected flow counts edge-disjoint paths") {
  // Two parallel routes 0-1-3 and 0-2-3 plus a cross edge 1-2.
  FlowNetwork g(4);
  g.add_undirected_edge(0, 1, 10);
  g.add_undirected_edge(1, 3, 11);
  g.add_undirected_edge(0, 2, 12);
  g.add_undirected_edge(2, 3, 13);
  g.add_undirected_edge(1, 2, 14);
  CHECK(g.max_flow(0, 3) == 2);
  const auto paths = g.decompose(0, 3);
  REQUIRE(paths.size() == 2);
  std::set<int> used;
  for (const auto& p : paths)
    for (int t : p) CHECK(used.insert(t).second);
}

TEST_CASE("flow limit stops augmentation early") {
  FlowNetwork g(2);
  for (int i = 0; i < 5; ++i) g.add_undirected_edge(0, 1, i);
  CHECK(g.max_flow(0, 1, 3) == 3);
}

TEST_CASE("bottleneck edge caps the flow") {
  FlowNetwork g(6);
  g.add_undirected_edge(0, 1, 0);
  g.add_undirected_edge(0, 2, 1);
  g.add_undirected_edge(1, 3, 2);
  g.add_undirected_edge(2, 3, 3);
  g.add_undirected_edge(3, 4, 4);
  g.add_undirected_edge(4, 5, 5);
  CHECK(g.max_flow(0, 5) == 1);
  const auto paths = g.decompose(0, 5);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].back() == 5);
}

TEST_CASE("disconnected terminals carry no flow") {
  FlowNetwork g(4);
  g.add_undirected_edge(0, 1, 0);
  g.add_undirected_edge(2, 3, 1);
  CHECK(g.max_flow(0, 3) == 0);
  CHECK(g.decompose(0, 3).empty());
}
