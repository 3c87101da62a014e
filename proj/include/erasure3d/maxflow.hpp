#pragma once

#include <cstddef>
#include <vector>

namespace erasure3d {

/// Small integer-capacity flow network solved with BFS augmenting paths
/// (Edmonds-Karp). With unit capacities the cost is O(F * E), where F is
/// bounded by the number of rows of the rectangle being crossed.
class FlowNetwork {
 public:
  explicit FlowNetwork(int vertices);

  int add_vertex();
  int vertex_count() const { return static_cast<int>(adj_.size()); }

  /// Undirected edge of capacity 1 in each direction. Returns the position
  /// of the new arc in u's adjacency list.
  int add_undirected_edge(int u, int v, int tag = -1);
  /// Directed arc u -> v.
  int add_arc(int u, int v, int capacity, int tag = -1);

  /// Runs max flow; stops early once `limit` units are found.
  int max_flow(int source, int sink, int limit = 1 << 30);

  /// Decomposes the current flow into source-to-sink paths. Each path is
  /// the list of tags of the edges it uses, in order; untagged arcs (tag
  /// < 0) are skipped. Cycles are removed, so paths are simple.
  std::vector<std::vector<int>> decompose(int source, int sink) const;

 private:
  struct Arc {
    int to;
    int cap;
    int rev;
    int initial;
    int tag;
  };
  std::vector<std::vector<Arc>> adj_;
};

}  // namespace erasure3d
