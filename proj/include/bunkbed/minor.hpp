#pragma once

#include <set>
#include <vector>

#include "isomorphism.hpp"

namespace bunkbed {

namespace detail {

inline MultiGraph drop_isolated_vertices(const MultiGraph& g) {
  uint64_t keep = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 0) keep |= bit(v);
  if (keep == (g.vertex_count() >= 64 ? ~uint64_t{0} : bit(g.vertex_count()) - 1)) return g;
  return induced_subgraph(g, keep).graph;
}

}  // namespace detail

/// True iff h can be obtained from g by edge deletions, edge contractions
/// and vertex deletions, all read on simple graphs (parallel edges collapse
/// after each step). h must have no isolated vertices; g is guarded to 10
/// vertices. Search: branch over delete/contract per edge, memoizing visited
/// canonical forms.
inline bool minor_contains(const MultiGraph& g, const MultiGraph& h_in) {
  if (g.vertex_count() > 10) throw guard_error("minor test limited to 10 vertices");
  const MultiGraph h = h_in.simplified();
  for (int v = 0; v < h.vertex_count(); ++v)
    if (h.degree(v) == 0)
      throw std::invalid_argument("minor target must have no isolated vertices");
  if (h.edge_count() == 0) return true;

  std::set<std::vector<uint8_t>> seen;
  auto rec = [&](auto&& self, const MultiGraph& cur) -> bool {
    if (cur.vertex_count() < h.vertex_count() || cur.edge_count() < h.edge_count()) return false;
    if (!seen.insert(canonical_key(cur)).second) return false;
    if (are_isomorphic(cur, h)) return true;
    for (int e = 0; e < cur.edge_count(); ++e) {
      MultiGraph contracted = detail::drop_isolated_vertices(
          contract_edge(cur, Transversal(), e).graph.simplified());
      if (self(self, contracted)) return true;
      MultiGraph deleted = detail::drop_isolated_vertices(delete_edge(cur, e).graph);
      if (self(self, deleted)) return true;
    }
    return false;
  };
  return rec(rec, detail::drop_isolated_vertices(g.simplified()));
}

/// Outerplanarity via the forbidden-minor pair: no K_4 and no K_{2,3} minor.
/// Parallel edges are collapsed first; the graph must be connected.
inline bool is_outerplanar(const MultiGraph& g) {
  if (!is_connected(g)) throw std::invalid_argument("outerplanarity test expects a connected graph");
  MultiGraph s = g.simplified();
  if (s.vertex_count() <= 3) return true;
  return !minor_contains(s, complete_graph(4)) && !minor_contains(s, complete_bipartite(2, 3));
}

}  // namespace bunkbed
