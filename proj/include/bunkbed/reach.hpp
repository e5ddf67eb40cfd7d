#pragma once

#include <tuple>
#include <unordered_set>
#include <vector>

#include "graph.hpp"

namespace bunkbed {

/// A (vertex, layer) pair. For the undirected layered models layer 0 is the
/// lower copy and layer 1 the upper copy; for the direction-switching walk
/// models layer 0 means travelling with the orientation and layer 1 against
/// it.
struct Endpoint {
  int vertex = 0;
  int layer = 0;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// Set of (vertex, layer) pairs over a graph with n vertices; bit v + layer*n.
class ReachSet {
 public:
  ReachSet() = default;
  ReachSet(int vertex_count, uint64_t bits) : n_(vertex_count), bits_(bits) {}

  int vertex_count() const { return n_; }
  uint64_t raw() const { return bits_; }
  bool contains(int v, int layer) const { return (bits_ >> (v + layer * n_)) & 1; }
  bool contains(const Endpoint& e) const { return contains(e.vertex, e.layer); }
  void add(int v, int layer) { bits_ |= bit(v + layer * n_); }
  int size() const { return std::popcount(bits_); }

  bool is_subset_of(const ReachSet& other) const { return (bits_ & ~other.bits_) == 0; }

  /// Swaps the two layers; used to state the mirror symmetry.
  ReachSet layers_swapped() const {
    uint64_t lower = bits_ & (bit(n_) - 1);
    uint64_t upper = bits_ >> n_;
    return ReachSet(n_, (lower << n_) | upper);
  }

  std::vector<Endpoint> to_vector() const {
    std::vector<Endpoint> out;
    for (int layer = 0; layer < 2; ++layer)
      for (int v = 0; v < n_; ++v)
        if (contains(v, layer)) out.push_back({v, layer});
    return out;
  }

  friend bool operator==(const ReachSet&, const ReachSet&) = default;

 private:
  int n_ = 0;
  uint64_t bits_ = 0;
};

/// Red/blue assignment to edge ids; bit set means blue.
struct Coloring {
  uint64_t blue = 0;
  bool is_blue(int e) const { return (blue >> e) & 1; }
  bool is_red(int e) const { return !is_blue(e); }
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// Direction assignment to edge ids; bit set means the edge points a -> b
/// as stored, otherwise b -> a.
struct Orientation {
  uint64_t forward = 0;
  bool is_forward(int e) const { return (forward >> e) & 1; }
  friend bool operator==(const Orientation&, const Orientation&) = default;
};

inline int oriented_tail(const MultiGraph& g, const Orientation& o, int e) {
  return o.is_forward(e) ? g.edge(e).a : g.edge(e).b;
}
inline int oriented_head(const MultiGraph& g, const Orientation& o, int e) {
  return o.is_forward(e) ? g.edge(e).b : g.edge(e).a;
}

namespace detail {

inline void check_start(const MultiGraph& g, const Endpoint& start) {
  if (start.vertex < 0 || start.vertex >= g.vertex_count())
    throw std::invalid_argument("start vertex out of range");
  if (start.layer != 0 && start.layer != 1)
    throw std::invalid_argument("layer must be 0 or 1");
}

}  // namespace detail

/// Vertices reachable from the start endpoint by walks that use red edges on
/// layer 0, blue edges on layer 1, and change layer only at transversal
/// vertices. Equivalently: connectivity in the auxiliary graph with two
/// copies of each vertex, red edges joining lower copies, blue edges joining
/// upper copies and a rung at each transversal vertex.
inline ReachSet colored_reach(const MultiGraph& g, const Transversal& t, const Coloring& c,
                              const Endpoint& start) {
  detail::check_start(g, start);
  t.check_against(g);
  const int n = g.vertex_count();
  Dsu dsu(2 * n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    if (c.is_blue(e))
      dsu.unite(ed.a + n, ed.b + n);
    else
      dsu.unite(ed.a, ed.b);
  }
  for (int v = 0; v < n; ++v)
    if (t.contains(v)) dsu.unite(v, v + n);
  ReachSet out(n, 0);
  const int root = dsu.find(start.vertex + start.layer * n);
  for (int v = 0; v < 2 * n; ++v)
    if (dsu.find(v) == root) out.add(v % n, v / n);
  return out;
}

/// Plain connectivity reach inside the bunkbed graph restricted to the
/// edges present in the configuration mask (bits are derived edge ids).
inline ReachSet subgraph_reach(const BunkbedGraph& bb, uint64_t present, const Endpoint& start) {
  detail::check_start(bb.base, start);
  const int n = bb.base.vertex_count();
  Dsu dsu(2 * n);
  for (int id = 0; id < bb.derived.edge_count(); ++id)
    if ((present >> id) & 1) dsu.unite(bb.derived.edge(id).a, bb.derived.edge(id).b);
  ReachSet out(n, 0);
  const int root = dsu.find(bb.node(start.vertex, start.layer));
  for (int v = 0; v < 2 * n; ++v)
    if (dsu.find(v) == root) out.add(v % n, v / n);
  return out;
}

/// Encodes a layered-model sample as a bunkbed configuration: edge e present
/// downstairs when red, upstairs when blue, verticals exactly at the
/// transversal.
inline uint64_t bunkbed_config_from_coloring(const BunkbedGraph& bb, const Coloring& c,
                                             const Transversal& t) {
  uint64_t present = 0;
  for (int e = 0; e < bb.base.edge_count(); ++e)
    present |= bit(bb.horizontal_id(e, c.is_blue(e) ? 1 : 0));
  for (int v = 0; v < bb.base.vertex_count(); ++v)
    if (t.contains(v)) present |= bit(bb.vertical_id(v));
  return present;
}

/// Vertices reachable from start by directed walks along the orientation.
inline uint64_t directed_reach(const MultiGraph& g, const Orientation& o, int start) {
  if (start < 0 || start >= g.vertex_count())
    throw std::invalid_argument("start vertex out of range");
  uint64_t seen = bit(start);
  std::vector<int> stack{start};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : g.incident_edges(v)) {
      if (oriented_tail(g, o, e) != v) continue;
      int w = oriented_head(g, o, e);
      if (!((seen >> w) & 1)) {
        seen |= bit(w);
        stack.push_back(w);
      }
    }
  }
  return seen;
}

/// States (vertex, mode) reachable by walks that traverse edges with the
/// orientation in mode 0 and against it in mode 1, and switch mode only at
/// transversal vertices. The start mode is the endpoint's layer; a start at
/// a transversal vertex may use either mode immediately.
inline ReachSet mode_reach(const MultiGraph& g, const Transversal& t, const Orientation& o,
                           const Endpoint& start) {
  detail::check_start(g, start);
  t.check_against(g);
  const int n = g.vertex_count();
  ReachSet out(n, 0);
  std::vector<Endpoint> stack;
  auto visit = [&](int v, int mode) {
    if (!out.contains(v, mode)) {
      out.add(v, mode);
      stack.push_back({v, mode});
    }
  };
  visit(start.vertex, start.layer);
  while (!stack.empty()) {
    auto [v, mode] = stack.back();
    stack.pop_back();
    if (t.contains(v)) visit(v, 1 - mode);
    for (int e : g.incident_edges(v)) {
      int from = mode == 0 ? oriented_tail(g, o, e) : oriented_head(g, o, e);
      if (from != v) continue;
      int to = g.other_end(e, v);
      visit(to, mode);
    }
  }
  return out;
}

/// Same walks as mode_reach with one extra rule: once an edge has been used
/// in one direction no later step of the walk may use it in the opposite
/// direction (repeating it in the same direction is allowed). Walk histories
/// matter, so the search runs over (vertex, mode, per-edge usage) states;
/// guarded to 12 edges.
inline ReachSet nonreversing_reach(const MultiGraph& g, const Transversal& t, const Orientation& o,
                                   const Endpoint& start) {
  detail::check_start(g, start);
  t.check_against(g);
  if (g.edge_count() > 12) throw guard_error("non-reversing walks limited to 12 edges");
  const int n = g.vertex_count();
  const int m = g.edge_count();

  // State key: usage trits in 2 bits per edge | vertex | mode.
  auto key = [m](uint64_t usage, int v, int mode) {
    return usage | (static_cast<uint64_t>(v) << (2 * m)) |
           (static_cast<uint64_t>(mode) << (2 * m + 6));
  };

  ReachSet out(n, 0);
  std::unordered_set<uint64_t> seen;
  std::vector<std::tuple<uint64_t, int, int>> stack;
  auto visit = [&](uint64_t usage, int v, int mode) {
    if (seen.insert(key(usage, v, mode)).second) {
      out.add(v, mode);
      stack.push_back({usage, v, mode});
    }
  };
  visit(0, start.vertex, start.layer);
  while (!stack.empty()) {
    auto [usage, v, mode] = stack.back();
    stack.pop_back();
    if (t.contains(v)) visit(usage, v, 1 - mode);
    for (int e : g.incident_edges(v)) {
      int from = mode == 0 ? oriented_tail(g, o, e) : oriented_head(g, o, e);
      if (from != v) continue;
      int to = g.other_end(e, v);
      // Direction code: 1 = traversed a->b as stored, 2 = traversed b->a.
      uint64_t dir = to == g.edge(e).b ? 1 : 2;
      uint64_t prev = (usage >> (2 * e)) & 3;
      if (prev != 0 && prev != dir) continue;
      uint64_t next_usage = usage | (dir << (2 * e));
      visit(next_usage, to, mode);
    }
  }
  return out;
}

/// Witness for the direction-reversal pairing: the vertices reachable from
/// the start in both travel modes, the edges spanned inside that set (kept
/// fixed), and the orientation with every other edge reversed.
struct ReversalCertificate {
  uint64_t core_vertices = 0;  // reachable both with and against the orientation
  uint64_t fixed_edges = 0;    // both endpoints inside core_vertices
  Orientation reversed;
  friend bool operator==(const ReversalCertificate&, const ReversalCertificate&) = default;
};

/// Builds the reversal pairing certificate for an orientation whose
/// mode-switching walks from the start reach the transversal. The start
/// vertex always lands in the core, and re-running the pairing on the
/// reversed orientation restores the original.
inline ReversalCertificate reversal_involution(const MultiGraph& g, const Transversal& t,
                                               const Orientation& o, int start_vertex) {
  ReachSet reach = mode_reach(g, t, o, {start_vertex, 0});
  bool touches_transversal = false;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (t.contains(v) && (reach.contains(v, 0) || reach.contains(v, 1))) {
      touches_transversal = true;
      break;
    }
  if (!touches_transversal)
    throw std::invalid_argument("reversal pairing needs a walk from the start to the transversal");

  ReversalCertificate cert;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (reach.contains(v, 0) && reach.contains(v, 1)) cert.core_vertices |= bit(v);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    if (((cert.core_vertices >> ed.a) & 1) && ((cert.core_vertices >> ed.b) & 1))
      cert.fixed_edges |= bit(e);
  }
  cert.reversed.forward = o.forward ^ (g.all_edges_mask() & ~cert.fixed_edges);
  return cert;
}

}  // namespace bunkbed
