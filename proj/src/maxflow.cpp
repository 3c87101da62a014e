#include "erasure3d/maxflow.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace erasure3d {

FlowNetwork::FlowNetwork(int vertices) : adj_(static_cast<std::size_t>(vertices)) {}

int FlowNetwork::add_vertex() {
  adj_.emplace_back();
  return static_cast<int>(adj_.size()) - 1;
}

int FlowNetwork::add_undirected_edge(int u, int v, int tag) {
  const int iu = static_cast<int>(adj_[u].size());
  const int iv = static_cast<int>(adj_[v].size()) + (u == v ? 1 : 0);
  adj_[u].push_back({v, 1, iv, 1, tag});
  adj_[v].push_back({u, 1, iu, 1, tag});
  return iu;
}

int FlowNetwork::add_arc(int u, int v, int capacity, int tag) {
  const int iu = static_cast<int>(adj_[u].size());
  const int iv = static_cast<int>(adj_[v].size()) + (u == v ? 1 : 0);
  adj_[u].push_back({v, capacity, iv, capacity, tag});
  adj_[v].push_back({u, 0, iu, 0, tag});
  return iu;
}

int FlowNetwork::max_flow(int source, int sink, int limit) {
  if (source == sink) return 0;
  int flow = 0;
  const int n = vertex_count();
  std::vector<std::pair<int, int>> parent(static_cast<std::size_t>(n));
  while (flow < limit) {
    std::fill(parent.begin(), parent.end(), std::pair<int, int>{-1, -1});
    parent[source] = {source, -1};
    std::queue<int> frontier;
    frontier.push(source);
    while (!frontier.empty() && parent[sink].first < 0) {
      const int u = frontier.front();
      frontier.pop();
      for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i) {
        const Arc& a = adj_[u][i];
        if (a.cap > 0 && parent[a.to].first < 0) {
          parent[a.to] = {u, i};
          frontier.push(a.to);
        }
      }
    }
    if (parent[sink].first < 0) break;
    int bottleneck = limit - flow;
    for (int v = sink; v != source; v = parent[v].first) {
      const auto [u, i] = parent[v];
      bottleneck = std::min(bottleneck, adj_[u][i].cap);
    }
    for (int v = sink; v != source; v = parent[v].first) {
      const auto [u, i] = parent[v];
      Arc& a = adj_[u][i];
      a.cap -= bottleneck;
      adj_[v][a.rev].cap += bottleneck;
    }
    flow += bottleneck;
  }
  return flow;
}

std::vector<std::vector<int>> FlowNetwork::decompose(int source, int sink) const {
  // Net flow on each arc is initial - residual. For undirected unit edges
  // the two arcs mirror each other, so only the arc with positive net flow
  // carries a unit.
  struct FlowArc {
    int to;
    int tag;
    int units;
  };
  const int n = vertex_count();
  std::vector<std::vector<FlowArc>> out(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u)
    for (const Arc& a : adj_[u]) {
      const int units = a.initial - a.cap;
      if (units > 0) out[u].push_back({a.to, a.tag, units});
    }

  std::vector<std::size_t> cursor(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> paths;
  for (;;) {
    // Walk from the source along arcs that still carry flow.
    std::vector<int> verts{source};
    std::vector<int> tags;
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    pos[source] = 0;
    int u = source;
    bool stuck = false;
    while (u != sink) {
      auto& arcs = out[u];
      while (cursor[u] < arcs.size() && arcs[cursor[u]].units == 0) ++cursor[u];
      if (cursor[u] == arcs.size()) {
        stuck = true;
        break;
      }
      FlowArc& a = arcs[cursor[u]];
      --a.units;
      const int v = a.to;
      if (pos[v] >= 0) {
        // Cycle: drop it, keep the prefix up to the first visit of v.
        for (std::size_t k = static_cast<std::size_t>(pos[v]) + 1; k < verts.size(); ++k)
          pos[verts[k]] = -1;
        verts.resize(static_cast<std::size_t>(pos[v]) + 1);
        tags.resize(static_cast<std::size_t>(pos[v]));
      } else {
        pos[v] = static_cast<int>(verts.size());
        verts.push_back(v);
        tags.push_back(a.tag);
      }
      u = v;
    }
    if (stuck) break;
    std::vector<int> path;
    for (int t : tags)
      if (t >= 0) path.push_back(t);
    paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace erasure3d
