#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"

namespace bunkbed {

/// Canonical byte key of a multigraph under vertex permutation, optionally
/// with vertex colors that the permutation must be read through. Two graphs
/// are isomorphic (colors respected) iff their keys match.
///
/// Key layout, for the placed order w_0..w_{n-1}: per position j the bytes
/// [color(w_j)] mult(w_j,w_0) .. mult(w_j,w_{j-1}); the canonical key is the
/// lexicographically smallest over all placements, found by branch and bound
/// on shared row prefixes.
inline std::vector<uint8_t> canonical_key(const MultiGraph& g,
                                          const std::vector<int>* colors = nullptr) {
  const int n = g.vertex_count();
  if (n > 12) throw guard_error("canonical labeling limited to 12 vertices");
  if (colors && static_cast<int>(colors->size()) != n)
    throw std::invalid_argument("color vector size mismatch");

  std::vector<std::vector<uint8_t>> mult(n, std::vector<uint8_t>(n, 0));
  for (const auto& e : g.edges()) {
    ++mult[e.a][e.b];
    ++mult[e.b][e.a];
  }

  // Candidates tried in ascending (color, degree) order so small keys are
  // found early and prune the rest.
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    int cx = colors ? (*colors)[x] : 0, cy = colors ? (*colors)[y] : 0;
    if (cx != cy) return cx < cy;
    if (g.degree(x) != g.degree(y)) return g.degree(x) < g.degree(y);
    return x < y;
  });

  std::vector<uint8_t> best;
  bool have_best = false;
  std::vector<uint8_t> cur;
  std::vector<int> placed;
  std::vector<bool> used(n, false);

  auto rec = [&](auto&& self, bool tied) -> void {
    const int depth = static_cast<int>(placed.size());
    if (depth == n) {
      if (!have_best || cur < best) {
        best = cur;
        have_best = true;
      }
      return;
    }
    for (int v : order) {
      if (used[v]) continue;
      const size_t mark = cur.size();
      if (colors) cur.push_back(static_cast<uint8_t>((*colors)[v]));
      for (int i = 0; i < depth; ++i) cur.push_back(mult[v][placed[i]]);
      bool child_tied = tied;
      bool prune = false;
      if (have_best && tied) {
        // Compare this row against the same span of the best key.
        for (size_t k = mark; k < cur.size(); ++k) {
          if (cur[k] < best[k]) {
            child_tied = false;
            break;
          }
          if (cur[k] > best[k]) {
            prune = true;
            break;
          }
        }
      }
      if (!prune) {
        used[v] = true;
        placed.push_back(v);
        self(self, child_tied);
        placed.pop_back();
        used[v] = false;
      }
      cur.resize(mark);
    }
  };
  rec(rec, true);
  return best;
}

inline bool are_isomorphic(const MultiGraph& g, const MultiGraph& h) {
  if (g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count()) return false;
  std::vector<int> dg, dh;
  for (int v = 0; v < g.vertex_count(); ++v) dg.push_back(g.degree(v));
  for (int v = 0; v < h.vertex_count(); ++v) dh.push_back(h.degree(v));
  std::sort(dg.begin(), dg.end());
  std::sort(dh.begin(), dh.end());
  if (dg != dh) return false;
  return canonical_key(g) == canonical_key(h);
}

inline bool are_isomorphic(const MultiGraph& g, const std::vector<int>& g_colors,
                           const MultiGraph& h, const std::vector<int>& h_colors) {
  if (g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count()) return false;
  return canonical_key(g, &g_colors) == canonical_key(h, &h_colors);
}

}  // namespace bunkbed
