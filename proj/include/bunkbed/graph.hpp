#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bunkbed {

constexpr int kMaxVertices = 32;  // aux constructions use 2 nodes per vertex in a 64-bit mask

constexpr uint64_t bit(int i) { return uint64_t{1} << i; }

/// Finite multigraph on vertices 0..n-1. Edges are stored by id in insertion
/// order and may repeat vertex pairs; loops are rejected. Immutable after
/// construction: every structural operation returns a new graph together
/// with relabeling maps.
class MultiGraph {
 public:
  struct Edge {
    int a;
    int b;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  MultiGraph() = default;

  MultiGraph(int vertex_count, std::vector<Edge> edge_list)
      : n_(vertex_count), edges_(std::move(edge_list)) {
    if (n_ < 0) throw std::invalid_argument("negative vertex count");
    if (n_ > kMaxVertices) throw guard_error("vertex count exceeds the 32-vertex guard");
    if (edges_.size() > 64) throw guard_error("edge count exceeds the 64-edge mask guard");
    incident_.resize(n_);
    for (size_t id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      if (e.a < 0 || e.a >= n_ || e.b < 0 || e.b >= n_)
        throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.a) + " " +
                                    std::to_string(e.b));
      if (e.a == e.b) throw std::invalid_argument("loop edge rejected at vertex " + std::to_string(e.a));
      incident_[e.a].push_back(static_cast<int>(id));
      incident_[e.b].push_back(static_cast<int>(id));
    }
  }

  static MultiGraph from_pairs(int vertex_count, std::initializer_list<std::pair<int, int>> pairs) {
    std::vector<Edge> edge_list;
    edge_list.reserve(pairs.size());
    for (auto [a, b] : pairs) edge_list.push_back({a, b});
    return MultiGraph(vertex_count, std::move(edge_list));
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int id) const { return edges_.at(id); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& incident_edges(int v) const { return incident_.at(v); }
  int degree(int v) const { return static_cast<int>(incident_.at(v).size()); }

  int other_end(int edge_id, int v) const {
    const Edge& e = edge(edge_id);
    if (e.a == v) return e.b;
    if (e.b == v) return e.a;
    throw std::invalid_argument("vertex not incident to edge");
  }

  bool adjacent(int x, int y) const {
    for (int id : incident_edges(x))
      if (other_end(id, x) == y) return true;
    return false;
  }

  std::vector<int> edges_between(int x, int y) const {
    std::vector<int> ids;
    for (int id : incident_edges(x))
      if (other_end(id, x) == y) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  uint64_t all_edges_mask() const {
    return edge_count() == 64 ? ~uint64_t{0} : (bit(edge_count()) - 1);
  }

  /// Same vertex set with parallel edges collapsed to one copy each,
  /// ordered by (min endpoint, max endpoint).
  MultiGraph simplified() const {
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : edges_) pairs.emplace_back(std::min(e.a, e.b), std::max(e.a, e.b));
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<Edge> out;
    out.reserve(pairs.size());
    for (auto [a, b] : pairs) out.push_back({a, b});
    return MultiGraph(n_, std::move(out));
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

inline MultiGraph complete_graph(int n) {
  std::vector<MultiGraph::Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
  return MultiGraph(n, std::move(edges));
}

inline MultiGraph complete_bipartite(int left, int right) {
  std::vector<MultiGraph::Edge> edges;
  for (int a = 0; a < left; ++a)
    for (int b = 0; b < right; ++b) edges.push_back({a, left + b});
  return MultiGraph(left + right, std::move(edges));
}

inline MultiGraph path_graph(int n) {
  std::vector<MultiGraph::Edge> edges;
  for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  return MultiGraph(n, std::move(edges));
}

inline MultiGraph cycle_graph(int n) {
  std::vector<MultiGraph::Edge> edges;
  for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
  return MultiGraph(n, std::move(edges));
}

/// Subset of vertices carrying the vertical-edge / color-switch role.
/// Stored as a bitmask; vertices must be validated against a graph by the
/// operation using the transversal.
class Transversal {
 public:
  Transversal() = default;
  explicit Transversal(uint64_t mask) : mask_(mask) {}

  static Transversal of(std::initializer_list<int> vertices) {
    uint64_t m = 0;
    for (int v : vertices) m |= bit(v);
    return Transversal(m);
  }

  bool contains(int v) const { return (mask_ >> v) & 1; }
  uint64_t mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }

  Transversal with(int v) const { return Transversal(mask_ | bit(v)); }

  std::vector<int> to_vector() const {
    std::vector<int> out;
    for (int v = 0; v < 64; ++v)
      if (contains(v)) out.push_back(v);
    return out;
  }

  void check_against(const MultiGraph& g) const {
    if (g.vertex_count() >= 64) return;
    if (mask_ & ~(bit(g.vertex_count()) - 1))
      throw std::invalid_argument("transversal vertex out of range");
  }

  friend bool operator==(const Transversal&, const Transversal&) = default;

 private:
  uint64_t mask_ = 0;
};

/// Partition of the edge ids of a graph into disjoint nonempty blocks, each
/// inducing a connected subgraph. Blocks are the units that receive a single
/// color in the block-colored model.
class EdgePartition {
 public:
  EdgePartition() = default;

  EdgePartition(const MultiGraph& g, std::vector<std::vector<int>> blocks) {
    std::vector<uint64_t> masks;
    for (const auto& block : blocks) {
      uint64_t m = 0;
      for (int e : block) {
        if (e < 0 || e >= g.edge_count())
          throw std::invalid_argument("partition edge id out of range: " + std::to_string(e));
        m |= bit(e);
      }
      masks.push_back(m);
    }
    init(g, std::move(masks));
  }

  static EdgePartition from_masks(const MultiGraph& g, std::vector<uint64_t> masks) {
    EdgePartition p;
    p.init(g, std::move(masks));
    return p;
  }

  static EdgePartition singletons(const MultiGraph& g) {
    std::vector<uint64_t> masks;
    masks.reserve(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) masks.push_back(bit(e));
    EdgePartition p;
    p.init(g, std::move(masks));
    return p;
  }

  int block_count() const { return static_cast<int>(blocks_.size()); }
  uint64_t block_mask(int i) const { return blocks_.at(i); }
  const std::vector<uint64_t>& blocks() const { return blocks_; }
  int block_of(int edge_id) const { return block_of_.at(edge_id); }
  bool is_singleton(int edge_id) const { return std::popcount(blocks_[block_of_.at(edge_id)]) == 1; }
  bool all_singletons() const {
    for (uint64_t m : blocks_)
      if (std::popcount(m) != 1) return false;
    return true;
  }

  std::vector<int> block_edges(int i) const {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(block_of_.size()); ++e)
      if (block_of_[e] == i) out.push_back(e);
    return out;
  }

  /// Carries the partition through an edge relabeling (edge_map[old] = new
  /// id or -1 when the edge was removed). Empty blocks vanish; the result is
  /// revalidated against the new graph.
  EdgePartition restricted(const MultiGraph& new_graph, const std::vector<int>& edge_map) const {
    std::vector<uint64_t> masks;
    for (uint64_t old_mask : blocks_) {
      uint64_t m = 0;
      for (int e = 0; e < 64; ++e)
        if ((old_mask >> e) & 1 && edge_map[e] >= 0) m |= bit(edge_map[e]);
      if (m) masks.push_back(m);
    }
    EdgePartition p;
    p.init(new_graph, std::move(masks));
    return p;
  }

  /// Replaces the blocks containing the given edges with their union
  /// (the conditioning step that ties colors together).
  EdgePartition merged(const MultiGraph& g, std::initializer_list<int> edge_ids) const {
    uint64_t merged_mask = 0;
    std::vector<uint64_t> masks;
    std::vector<bool> absorb(blocks_.size(), false);
    for (int e : edge_ids) absorb[block_of_.at(e)] = true;
    for (size_t i = 0; i < blocks_.size(); ++i)
      if (absorb[i])
        merged_mask |= blocks_[i];
      else
        masks.push_back(blocks_[i]);
    masks.push_back(merged_mask);
    EdgePartition p;
    p.init(g, std::move(masks));
    return p;
  }

  friend bool operator==(const EdgePartition& x, const EdgePartition& y) {
    auto a = x.blocks_;
    auto b = y.blocks_;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

 private:
  void init(const MultiGraph& g, std::vector<uint64_t> masks) {
    if (g.edge_count() > 64) throw guard_error("edge partition limited to 64 edges");
    blocks_ = std::move(masks);
    std::sort(blocks_.begin(), blocks_.end(),
              [](uint64_t a, uint64_t b) { return std::countr_zero(a) < std::countr_zero(b); });
    block_of_.assign(g.edge_count(), -1);
    for (size_t i = 0; i < blocks_.size(); ++i) {
      uint64_t m = blocks_[i];
      if (m == 0) throw std::invalid_argument("empty partition block");
      for (int e = 0; e < g.edge_count(); ++e)
        if ((m >> e) & 1) {
          if (block_of_[e] != -1) throw std::invalid_argument("edge in two partition blocks");
          block_of_[e] = static_cast<int>(i);
        }
      if (m & ~g.all_edges_mask()) throw std::invalid_argument("partition edge id out of range");
      check_block_connected(g, m);
    }
    for (int e = 0; e < g.edge_count(); ++e)
      if (block_of_[e] == -1)
        throw std::invalid_argument("edge " + std::to_string(e) + " missing from partition");
  }

  static void check_block_connected(const MultiGraph& g, uint64_t mask) {
    std::vector<int> verts;
    for (int e = 0; e < g.edge_count(); ++e)
      if ((mask >> e) & 1) {
        verts.push_back(g.edge(e).a);
        verts.push_back(g.edge(e).b);
      }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.empty()) return;
    std::vector<int> stack{verts[0]};
    uint64_t seen = bit(verts[0]);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int id : g.incident_edges(v)) {
        if (!((mask >> id) & 1)) continue;
        int w = g.other_end(id, v);
        if (!((seen >> w) & 1)) {
          seen |= bit(w);
          stack.push_back(w);
        }
      }
    }
    for (int v : verts)
      if (!((seen >> v) & 1))
        throw std::invalid_argument("partition block does not induce a connected subgraph");
  }

  std::vector<uint64_t> blocks_;
  std::vector<int> block_of_;
};

// ---------------------------------------------------------------------------
// Connectivity helpers
// ---------------------------------------------------------------------------

/// Union-find over at most 64 elements, path-halving.
class Dsu {
 public:
  explicit Dsu(int n = 0) { reset(n); }
  void reset(int n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[y] = x;
  }
  bool same(int x, int y) { return find(x) == find(y); }

 private:
  std::vector<int> parent_;
};

inline bool is_connected(const MultiGraph& g) {
  if (g.vertex_count() <= 1) return true;
  Dsu dsu(g.vertex_count());
  for (const auto& e : g.edges()) dsu.unite(e.a, e.b);
  for (int v = 1; v < g.vertex_count(); ++v)
    if (!dsu.same(0, v)) return false;
  return true;
}

/// Connected components of the graph left after deleting the vertices in
/// removed (their edges included), listed in ascending order of their
/// smallest vertex, original vertex ids.
inline std::vector<std::vector<int>> components_after_removal(const MultiGraph& g, uint64_t removed) {
  Dsu dsu(g.vertex_count());
  for (const auto& e : g.edges())
    if (!((removed >> e.a) & 1) && !((removed >> e.b) & 1)) dsu.unite(e.a, e.b);
  std::vector<std::vector<int>> comps;
  std::vector<int> root_slot(g.vertex_count(), -1);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if ((removed >> v) & 1) continue;
    int r = dsu.find(v);
    if (root_slot[r] == -1) {
      root_slot[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[root_slot[r]].push_back(v);
  }
  return comps;
}

/// Articulation points, ascending. Parallel edges are handled: only the tree
/// edge itself is skipped when looking for back edges, so a parallel copy
/// protects its endpoints.
inline std::vector<int> cut_vertices(const MultiGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> disc(n, -1), low(n, 0), parent_edge(n, -1);
  std::vector<bool> is_cut(n, false);
  int timer = 0;

  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    // Iterative DFS: stack of (vertex, index into incident list).
    std::vector<std::pair<int, size_t>> stack;
    disc[root] = low[root] = timer++;
    stack.emplace_back(root, 0);
    int root_children = 0;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      if (idx < g.incident_edges(v).size()) {
        int edge_id = g.incident_edges(v)[idx++];
        if (edge_id == parent_edge[v]) continue;
        int w = g.other_end(edge_id, v);
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          parent_edge[w] = edge_id;
          if (v == root) ++root_children;
          stack.emplace_back(w, 0);
        } else {
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        stack.pop_back();
        if (!stack.empty()) {
          int p = stack.back().first;
          low[p] = std::min(low[p], low[v]);
          if (p != root && low[v] >= disc[p]) is_cut[p] = true;
        }
      }
    }
    if (root_children >= 2) is_cut[root] = true;
  }

  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (is_cut[v]) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Structural operations
// ---------------------------------------------------------------------------

struct ContractionResult {
  MultiGraph graph;
  Transversal transversal;
  std::vector<int> vertex_map;  // old id -> new id
  std::vector<int> edge_map;    // old id -> new id, -1 for removed edges
  int merged_vertex;            // new id of the fused endpoint pair
};

/// Contracts edge e: its endpoints fuse (the fused vertex keeps the smaller
/// endpoint's slot), the edge vanishes, edges made into loops vanish, and
/// parallel edges are kept. The fused vertex joins the transversal iff
/// either endpoint was in it.
inline ContractionResult contract_edge(const MultiGraph& g, const Transversal& t, int e) {
  if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("contract: edge id out of range");
  t.check_against(g);
  const int x = std::min(g.edge(e).a, g.edge(e).b);
  const int y = std::max(g.edge(e).a, g.edge(e).b);

  std::vector<int> vmap(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (v == y)
      vmap[v] = x;
    else
      vmap[v] = v > y ? v - 1 : v;
  }

  std::vector<MultiGraph::Edge> new_edges;
  std::vector<int> emap(g.edge_count(), -1);
  for (int id = 0; id < g.edge_count(); ++id) {
    if (id == e) continue;
    int a = vmap[g.edge(id).a];
    int b = vmap[g.edge(id).b];
    if (a == b) continue;  // collapsed to a loop
    emap[id] = static_cast<int>(new_edges.size());
    new_edges.push_back({a, b});
  }

  uint64_t tmask = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (t.contains(v)) tmask |= bit(vmap[v]);

  return {MultiGraph(g.vertex_count() - 1, std::move(new_edges)), Transversal(tmask),
          std::move(vmap), std::move(emap), x};
}

struct EdgeDeletionResult {
  MultiGraph graph;
  std::vector<int> edge_map;  // old id -> new id, -1 for the deleted edge
};

inline EdgeDeletionResult delete_edge(const MultiGraph& g, int e) {
  if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("delete: edge id out of range");
  std::vector<MultiGraph::Edge> new_edges;
  std::vector<int> emap(g.edge_count(), -1);
  for (int id = 0; id < g.edge_count(); ++id) {
    if (id == e) continue;
    emap[id] = static_cast<int>(new_edges.size());
    new_edges.push_back(g.edge(id));
  }
  return {MultiGraph(g.vertex_count(), std::move(new_edges)), std::move(emap)};
}

struct InducedSubgraphResult {
  MultiGraph graph;
  std::vector<int> vertex_map;  // old id -> new id, -1 for removed vertices
  std::vector<int> edge_map;    // old id -> new id, -1 for removed edges
};

/// Keeps exactly the vertices in keep_mask and the edges with both ends kept,
/// renumbering both densely in ascending old order.
inline InducedSubgraphResult induced_subgraph(const MultiGraph& g, uint64_t keep_mask) {
  std::vector<int> vmap(g.vertex_count(), -1);
  int next = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if ((keep_mask >> v) & 1) vmap[v] = next++;
  std::vector<MultiGraph::Edge> new_edges;
  std::vector<int> emap(g.edge_count(), -1);
  for (int id = 0; id < g.edge_count(); ++id) {
    int a = vmap[g.edge(id).a];
    int b = vmap[g.edge(id).b];
    if (a < 0 || b < 0) continue;
    emap[id] = static_cast<int>(new_edges.size());
    new_edges.push_back({a, b});
  }
  return {MultiGraph(next, std::move(new_edges)), std::move(vmap), std::move(emap)};
}

// ---------------------------------------------------------------------------
// Bunkbed construction
// ---------------------------------------------------------------------------

/// Two layered copies of a base graph plus one vertical edge slot per
/// vertex. Derived ids are fixed: vertex (v, layer) = v + layer*n; edge e of
/// the base appears as horizontal ids e (layer 0) and m+e (layer 1); the
/// vertical slot at vertex v has id 2m+v.
struct BunkbedGraph {
  enum class Slot { kHorizontal0, kHorizontal1, kVertical };
  struct Tag {
    Slot kind;
    int origin;  // base edge id for horizontals, base vertex id for verticals
  };

  MultiGraph base;
  MultiGraph derived;
  std::vector<Tag> tags;

  int node(int v, int layer) const { return v + layer * base.vertex_count(); }
  int horizontal_id(int base_edge, int layer) const { return base_edge + layer * base.edge_count(); }
  int vertical_id(int v) const { return 2 * base.edge_count() + v; }
};

inline BunkbedGraph build_bunkbed(const MultiGraph& g) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (2 * n > kMaxVertices) throw guard_error("bunkbed construction limited to 16 base vertices");
  std::vector<MultiGraph::Edge> edges;
  std::vector<BunkbedGraph::Tag> tags;
  edges.reserve(2 * m + n);
  for (int layer = 0; layer < 2; ++layer)
    for (int e = 0; e < m; ++e) {
      edges.push_back({g.edge(e).a + layer * n, g.edge(e).b + layer * n});
      tags.push_back({layer == 0 ? BunkbedGraph::Slot::kHorizontal0 : BunkbedGraph::Slot::kHorizontal1, e});
    }
  for (int v = 0; v < n; ++v) {
    edges.push_back({v, v + n});
    tags.push_back({BunkbedGraph::Slot::kVertical, v});
  }
  return {g, MultiGraph(2 * n, std::move(edges)), std::move(tags)};
}

}  // namespace bunkbed
