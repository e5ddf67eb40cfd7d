#pragma once

#include <string>
#include <vector>

#include "models.hpp"

namespace bunkbed {

/// A block-colored instance with marked endpoints: the unit the reduction
/// operations rewrite into weighted children.
struct Triple {
  MultiGraph g;
  Transversal t;
  EdgePartition partition;
  int u = 0;
  int v = 0;

  static Triple with_singletons(MultiGraph graph, const Transversal& t, int u, int v) {
    EdgePartition part = EdgePartition::singletons(graph);
    return {std::move(graph), t, std::move(part), u, v};
  }

  void validate() const {
    t.check_against(g);
    if (u < 0 || u >= g.vertex_count() || v < 0 || v >= g.vertex_count())
      throw std::invalid_argument("marked vertex out of range");
  }

  ModelSpec model() const { return ModelSpec::e4(t, partition); }
};

struct WeightedChild {
  Triple triple;
  Rational weight;
  std::vector<int> vertex_map;  // parent vertex id -> child vertex id, -1 dropped
  std::vector<int> edge_map;    // parent edge id -> child edge id, -1 dropped
};

struct ReductionStep {
  std::string op;
  Triple parent;
  std::vector<WeightedChild> children;
  std::string note;
};

namespace detail {

inline Transversal map_transversal(const Transversal& t, const std::vector<int>& vmap) {
  uint64_t mask = 0;
  for (size_t v = 0; v < vmap.size(); ++v)
    if (t.contains(static_cast<int>(v)) && vmap[v] >= 0) mask |= bit(vmap[v]);
  return Transversal(mask);
}

/// A structural rewrite of the parent graph together with its relabel maps.
struct Rewrite {
  MultiGraph g;
  Transversal t;
  std::vector<int> vmap;
  std::vector<int> emap;
};

inline Rewrite rewrite_identity(const MultiGraph& g, const Transversal& t) {
  std::vector<int> vmap(g.vertex_count()), emap(g.edge_count());
  for (int v = 0; v < g.vertex_count(); ++v) vmap[v] = v;
  for (int e = 0; e < g.edge_count(); ++e) emap[e] = e;
  return {g, t, std::move(vmap), std::move(emap)};
}

inline Rewrite rewrite_contract(const MultiGraph& g, const Transversal& t, int e) {
  ContractionResult r = contract_edge(g, t, e);
  return {std::move(r.graph), r.transversal, std::move(r.vertex_map), std::move(r.edge_map)};
}

inline Rewrite rewrite_delete(const MultiGraph& g, const Transversal& t, int e) {
  EdgeDeletionResult r = delete_edge(g, e);
  std::vector<int> vmap(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) vmap[v] = v;
  return {std::move(r.graph), t, std::move(vmap), std::move(r.edge_map)};
}

inline Rewrite then_contract(Rewrite rw, int parent_edge) {
  int e = rw.emap.at(parent_edge);
  if (e < 0) throw std::logic_error("edge to contract was already removed");
  Rewrite second = rewrite_contract(rw.g, rw.t, e);
  for (auto& v : rw.vmap)
    if (v >= 0) v = second.vmap[v];
  for (auto& id : rw.emap)
    if (id >= 0) id = second.emap[id];
  rw.g = std::move(second.g);
  rw.t = second.t;
  return rw;
}

inline Rewrite then_delete(Rewrite rw, int parent_edge) {
  int e = rw.emap.at(parent_edge);
  if (e < 0) throw std::logic_error("edge to delete was already removed");
  Rewrite second = rewrite_delete(rw.g, rw.t, e);
  for (auto& id : rw.emap)
    if (id >= 0) id = second.emap[id];
  rw.g = std::move(second.g);
  return rw;
}

inline WeightedChild child_from_rewrite(const Triple& parent, const Rewrite& rw,
                                        const Rational& weight) {
  Triple child{rw.g, rw.t, parent.partition.restricted(rw.g, rw.emap), rw.vmap[parent.u],
               rw.vmap[parent.v]};
  if (child.u < 0 || child.v < 0)
    throw std::logic_error("marked vertex vanished during a rewrite");
  return {std::move(child), weight, rw.vmap, rw.emap};
}

inline WeightedChild child_with_partition(const Triple& parent, EdgePartition part,
                                          const Rational& weight) {
  Rewrite rw = rewrite_identity(parent.g, parent.t);
  Triple child{parent.g, parent.t, std::move(part), parent.u, parent.v};
  return {std::move(child), weight, rw.vmap, rw.emap};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reduction operations
// ---------------------------------------------------------------------------

/// Contracting an edge whose endpoints both carry rungs changes no
/// connection probability: single child of weight 1.
inline ReductionStep t_contract(const Triple& parent, int e) {
  parent.validate();
  if (e < 0 || e >= parent.g.edge_count()) throw std::invalid_argument("edge id out of range");
  const auto& ed = parent.g.edge(e);
  if (!parent.t.contains(ed.a) || !parent.t.contains(ed.b))
    throw std::invalid_argument("t-contraction needs both endpoints in the transversal");
  detail::Rewrite rw = detail::rewrite_contract(parent.g, parent.t, e);
  return {"t-contract", parent, {detail::child_from_rewrite(parent, rw, Rational(1))}, ""};
}

/// Degree-2 vertex x outside the transversal and the marked pair: its two
/// edges have the same color half the time (x passable, contract a singleton
/// incident edge) and different colors half the time (x useless, delete it).
inline ReductionStep v2_reduce(const Triple& parent, int x) {
  parent.validate();
  if (x < 0 || x >= parent.g.vertex_count()) throw std::invalid_argument("vertex id out of range");
  if (parent.g.degree(x) != 2) throw std::invalid_argument("v2 reduction needs a degree-2 vertex");
  if (parent.t.contains(x)) throw std::invalid_argument("v2 vertex must be outside the transversal");
  if (x == parent.u || x == parent.v)
    throw std::invalid_argument("v2 vertex must differ from the marked pair");
  const std::vector<int>& inc = parent.g.incident_edges(x);
  int contract_id = -1;
  for (int e : {std::min(inc[0], inc[1]), std::max(inc[0], inc[1])})
    if (parent.partition.is_singleton(e)) {
      contract_id = e;
      break;
    }
  if (contract_id < 0)
    throw std::invalid_argument("v2 reduction needs a singleton edge at the vertex");

  uint64_t keep = (bit(parent.g.vertex_count()) - 1) & ~bit(x);
  InducedSubgraphResult drop = induced_subgraph(parent.g, keep);
  detail::Rewrite drop_rw{drop.graph, detail::map_transversal(parent.t, drop.vertex_map),
                          std::move(drop.vertex_map), std::move(drop.edge_map)};
  detail::Rewrite contract_rw = detail::rewrite_contract(parent.g, parent.t, contract_id);

  ReductionStep step{"v2", parent, {}, "vertex " + std::to_string(x)};
  step.children.push_back(detail::child_from_rewrite(parent, drop_rw, Rational(1, 2)));
  step.children.push_back(detail::child_from_rewrite(parent, contract_rw, Rational(1, 2)));
  return step;
}

namespace detail {

struct TriangleSites {
  int x, y, z;  // shared endpoints: x on both exy/exz, y on exy/eyz, z on exz/eyz
};

inline TriangleSites triangle_vertices(const MultiGraph& g, int exy, int exz, int eyz) {
  auto shared = [&g](int e1, int e2) {
    const auto &a = g.edge(e1), &b = g.edge(e2);
    if (a.a == b.a || a.a == b.b) return a.a;
    if (a.b == b.a || a.b == b.b) return a.b;
    throw std::invalid_argument("edges do not form a triangle");
  };
  if (exy == exz || exy == eyz || exz == eyz)
    throw std::invalid_argument("triangle needs three distinct edges");
  TriangleSites s{shared(exy, exz), shared(exy, eyz), shared(exz, eyz)};
  if (s.x == s.y || s.x == s.z || s.y == s.z)
    throw std::invalid_argument("edges do not form a triangle on three vertices");
  return s;
}

/// Contract one triangle edge and delete the image of one of the two other
/// edges (they became parallel); the surviving copy is the lower-id one.
inline Rewrite collapse_triangle(const Triple& parent, int contract_e, int drop_e) {
  Rewrite rw = rewrite_contract(parent.g, parent.t, contract_e);
  return then_delete(std::move(rw), drop_e);
}

}  // namespace detail

/// Triangle xyz on singleton blocks: the eight colorings regroup as "one
/// corner joins" (three contractions, the doubled edge pruned) or "all three
/// colors tied" (one merged block).
inline ReductionStep delta_reduce(const Triple& parent, int exy, int exz, int eyz) {
  parent.validate();
  for (int e : {exy, exz, eyz}) {
    if (e < 0 || e >= parent.g.edge_count()) throw std::invalid_argument("edge id out of range");
    if (!parent.partition.is_singleton(e))
      throw std::invalid_argument("delta reduction needs singleton blocks");
  }
  detail::triangle_vertices(parent.g, exy, exz, eyz);

  auto child = [&](int contract_e, int a, int b) {
    return detail::child_from_rewrite(
        parent, detail::collapse_triangle(parent, contract_e, std::max(a, b)), Rational(1, 4));
  };
  ReductionStep step{"delta", parent, {}, ""};
  step.children.push_back(child(exy, exz, eyz));
  step.children.push_back(child(exz, exy, eyz));
  step.children.push_back(child(eyz, exy, exz));
  step.children.push_back(detail::child_with_partition(
      parent, parent.partition.merged(parent.g, {exy, exz, eyz}), Rational(1, 4)));
  return step;
}

/// Triangle variant for a corner edge xy already inside a larger block:
/// conditioning on the two singleton edges xz, yz relative to the block's
/// color. Weights 1/4, 1/4, 1/2.
inline ReductionStep restricted_delta_reduce(const Triple& parent, int exy, int exz, int eyz) {
  parent.validate();
  for (int e : {exy, exz, eyz})
    if (e < 0 || e >= parent.g.edge_count()) throw std::invalid_argument("edge id out of range");
  if (parent.partition.is_singleton(exy))
    throw std::invalid_argument("restricted delta expects xy inside a larger block");
  if (!parent.partition.is_singleton(exz) || !parent.partition.is_singleton(eyz))
    throw std::invalid_argument("restricted delta needs singleton blocks on xz and yz");
  detail::triangle_vertices(parent.g, exy, exz, eyz);

  ReductionStep step{"restricted-delta", parent, {}, ""};
  step.children.push_back(detail::child_from_rewrite(
      parent, detail::collapse_triangle(parent, exz, eyz), Rational(1, 4)));
  step.children.push_back(detail::child_from_rewrite(
      parent, detail::collapse_triangle(parent, eyz, exz), Rational(1, 4)));
  step.children.push_back(detail::child_with_partition(
      parent, parent.partition.merged(parent.g, {exz, eyz}), Rational(1, 2)));
  return step;
}

/// Degree-3 vertex x outside the transversal with singleton edges: either
/// exactly one edge color is odd one out (three delete+contract children) or
/// all three colors agree (merged block).
inline ReductionStep y_reduce(const Triple& parent, int x) {
  parent.validate();
  if (x < 0 || x >= parent.g.vertex_count()) throw std::invalid_argument("vertex id out of range");
  if (parent.g.degree(x) != 3) throw std::invalid_argument("y reduction needs a degree-3 vertex");
  if (parent.t.contains(x)) throw std::invalid_argument("y vertex must be outside the transversal");
  if (x == parent.u || x == parent.v)
    throw std::invalid_argument("y vertex must differ from the marked pair");
  std::vector<int> inc = parent.g.incident_edges(x);
  std::sort(inc.begin(), inc.end());
  for (int e : inc)
    if (!parent.partition.is_singleton(e))
      throw std::invalid_argument("y reduction needs singleton blocks at the vertex");

  auto child = [&](int delete_e, int contract_e) {
    detail::Rewrite rw = detail::rewrite_delete(parent.g, parent.t, delete_e);
    rw = detail::then_contract(std::move(rw), contract_e);
    return detail::child_from_rewrite(parent, rw, Rational(1, 4));
  };
  ReductionStep step{"y", parent, {}, "vertex " + std::to_string(x)};
  step.children.push_back(child(inc[0], inc[1]));
  step.children.push_back(child(inc[1], inc[2]));
  step.children.push_back(child(inc[2], inc[0]));
  step.children.push_back(detail::child_with_partition(
      parent, parent.partition.merged(parent.g, {inc[0], inc[1], inc[2]}), Rational(1, 4)));
  return step;
}

/// Two parallel singleton edges: equal colors leave one working copy,
/// opposite colors link both layers, which is exactly a contraction.
inline ReductionStep parallel_pair_reduce(const Triple& parent, int e, int f) {
  parent.validate();
  if (e < 0 || e >= parent.g.edge_count() || f < 0 || f >= parent.g.edge_count() || e == f)
    throw std::invalid_argument("parallel pair needs two distinct edge ids");
  const auto &ea = parent.g.edge(e), &eb = parent.g.edge(f);
  if (std::min(ea.a, ea.b) != std::min(eb.a, eb.b) || std::max(ea.a, ea.b) != std::max(eb.a, eb.b))
    throw std::invalid_argument("edges are not parallel");
  if (!parent.partition.is_singleton(e) || !parent.partition.is_singleton(f))
    throw std::invalid_argument("parallel pair reduction needs singleton blocks");

  ReductionStep step{"parallel-pair", parent, {}, ""};
  step.children.push_back(detail::child_from_rewrite(
      parent, detail::rewrite_delete(parent.g, parent.t, f), Rational(1, 2)));
  step.children.push_back(detail::child_from_rewrite(
      parent, detail::rewrite_contract(parent.g, parent.t, e), Rational(1, 2)));
  return step;
}

// ---------------------------------------------------------------------------
// Mirror helpers
// ---------------------------------------------------------------------------

/// Edges on the far side of a separating vertex cut, viewed from u: both
/// endpoints in v's component of G - C, or one endpoint there and one in C.
/// Errors when C does not separate u from v.
inline uint64_t mirror_edge_set(const MultiGraph& g, uint64_t cut_mask, int u, int v) {
  if (u < 0 || u >= g.vertex_count() || v < 0 || v >= g.vertex_count())
    throw std::invalid_argument("vertex out of range");
  if (((cut_mask >> u) & 1) || ((cut_mask >> v) & 1))
    throw std::invalid_argument("cut must avoid the marked vertices");
  Dsu dsu(g.vertex_count());
  for (const auto& e : g.edges())
    if (!((cut_mask >> e.a) & 1) && !((cut_mask >> e.b) & 1)) dsu.unite(e.a, e.b);
  if (dsu.same(u, v)) throw std::invalid_argument("cut does not separate the marked vertices");
  const int vroot = dsu.find(v);
  auto far_side = [&](int w) { return !((cut_mask >> w) & 1) && dsu.find(w) == vroot; };
  uint64_t edge_set = 0;
  for (int e = 0; e < g.edge_count(); ++e)
    if (far_side(g.edge(e).a) || far_side(g.edge(e).b)) edge_set |= bit(e);
  return edge_set;
}

inline Coloring mirror_coloring(const Coloring& c, uint64_t edge_set) {
  return {c.blue ^ edge_set};
}

/// Swaps the two horizontal copies of every edge in the set; verticals stay.
inline uint64_t mirror_bunkbed_config(const BunkbedGraph& bb, uint64_t config, uint64_t edge_set) {
  uint64_t out = config;
  for (int e = 0; e < bb.base.edge_count(); ++e) {
    if (!((edge_set >> e) & 1)) continue;
    const int lo = bb.horizontal_id(e, 0), hi = bb.horizontal_id(e, 1);
    const uint64_t lo_bit = (config >> lo) & 1, hi_bit = (config >> hi) & 1;
    out &= ~(bit(lo) | bit(hi));
    if (lo_bit) out |= bit(hi);
    if (hi_bit) out |= bit(lo);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

struct QueryCheck {
  Endpoint start;
  Endpoint target;
  Rational parent_value;
  Rational mixed_value;
  bool ok = false;
};

struct VerifyReport {
  bool ok = true;
  std::vector<QueryCheck> checks;
};

/// Exactly recomputes the four marked-endpoint connection probabilities on
/// the parent and on the weighted child mixture; any mismatch is a finding.
inline VerifyReport verify_reduction(const ReductionStep& step) {
  VerifyReport report;
  const Triple& p = step.parent;
  const std::array<std::pair<Endpoint, Endpoint>, 4> queries{{
      {{p.u, 0}, {p.v, 0}},
      {{p.u, 0}, {p.v, 1}},
      {{p.v, 0}, {p.u, 0}},
      {{p.v, 0}, {p.u, 1}},
  }};
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& [start, target] = queries[qi];
    QueryCheck check{start, target, 0, 0, false};
    check.parent_value = joint_prob(p.g, p.model(), start, {target});
    for (const auto& child : step.children) {
      const Triple& c = child.triple;
      Endpoint cs{start.vertex == p.u ? c.u : c.v, start.layer};
      Endpoint ct{target.vertex == p.u ? c.u : c.v, target.layer};
      check.mixed_value += child.weight * joint_prob(c.g, c.model(), cs, {ct});
    }
    check.ok = check.parent_value == check.mixed_value;
    if (!check.ok) report.ok = false;
    report.checks.push_back(std::move(check));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Two-coin conditioning (the E2 -> one-copy bridge)
// ---------------------------------------------------------------------------

/// Partly conditioned per-edge instance: each edge either still carries two
/// independent presence coins with its own probability, or is committed to
/// the exactly-one-copy fair coin.
struct HybridTriple {
  MultiGraph g;
  Transversal t;
  std::vector<std::optional<Rational>> free_prob;  // nullopt = committed
  int u = 0;
  int v = 0;
};

inline HybridTriple hybrid_from_probs(MultiGraph g, std::vector<Rational> edge_probs,
                                      const Transversal& t, int u, int v) {
  if (static_cast<int>(edge_probs.size()) != g.edge_count())
    throw std::invalid_argument("one probability per edge required");
  std::vector<std::optional<Rational>> free;
  free.reserve(edge_probs.size());
  for (auto& q : edge_probs) free.emplace_back(std::move(q));
  return {std::move(g), t, std::move(free), u, v};
}

inline Rational hybrid_prob(const HybridTriple& h, const Endpoint& start,
                            const std::vector<Endpoint>& targets) {
  detail::LayeredInstance inst;
  for (int e = 0; e < h.g.edge_count(); ++e) {
    if (h.free_prob[e]) {
      inst.free_edges.push_back(e);
      inst.free_probs.push_back(*h.free_prob[e]);
    } else {
      inst.blocks.push_back(bit(e));
    }
  }
  return detail::layered_joint_prob(h.g, h.t, inst, start, targets);
}

struct HybridChild {
  HybridTriple triple;
  Rational weight;
  std::vector<int> vertex_map;
  std::vector<int> edge_map;
};

struct HybridStep {
  HybridTriple parent;
  int edge = 0;
  std::vector<HybridChild> children;
};

/// Conditions one free edge on how many of its two copies are present:
/// both (contract, weight q^2), exactly one (commit to the fair one-copy
/// coin, weight 2q(1-q)), none (delete, weight (1-q)^2).
inline HybridStep e2_condition_edge(const HybridTriple& parent, int e) {
  if (e < 0 || e >= parent.g.edge_count()) throw std::invalid_argument("edge id out of range");
  if (!parent.free_prob[e]) throw std::invalid_argument("edge is already conditioned");
  const Rational q = *parent.free_prob[e];

  HybridStep step{parent, e, {}};

  auto remap_probs = [&](const std::vector<int>& emap, const MultiGraph& child_g) {
    std::vector<std::optional<Rational>> out(child_g.edge_count());
    for (int id = 0; id < parent.g.edge_count(); ++id)
      if (emap[id] >= 0) out[emap[id]] = parent.free_prob[id];
    return out;
  };

  {
    ContractionResult r = contract_edge(parent.g, parent.t, e);
    HybridChild child{{r.graph, r.transversal, remap_probs(r.edge_map, r.graph),
                       r.vertex_map[parent.u], r.vertex_map[parent.v]},
                      q * q,
                      r.vertex_map,
                      r.edge_map};
    step.children.push_back(std::move(child));
  }
  {
    std::vector<int> vmap(parent.g.vertex_count()), emap(parent.g.edge_count());
    for (int v = 0; v < parent.g.vertex_count(); ++v) vmap[v] = v;
    for (int id = 0; id < parent.g.edge_count(); ++id) emap[id] = id;
    auto probs = remap_probs(emap, parent.g);
    probs[e] = std::nullopt;
    HybridChild child{{parent.g, parent.t, std::move(probs), parent.u, parent.v},
                      2 * q * (1 - q),
                      std::move(vmap),
                      std::move(emap)};
    step.children.push_back(std::move(child));
  }
  {
    EdgeDeletionResult r = delete_edge(parent.g, e);
    std::vector<int> vmap(parent.g.vertex_count());
    for (int v = 0; v < parent.g.vertex_count(); ++v) vmap[v] = v;
    HybridChild child{{r.graph, parent.t, remap_probs(r.edge_map, r.graph), parent.u, parent.v},
                      (1 - q) * (1 - q),
                      std::move(vmap),
                      r.edge_map};
    step.children.push_back(std::move(child));
  }
  return step;
}

/// Exact parent == weighted children identity over the four marked-endpoint
/// queries, as in verify_reduction.
inline VerifyReport verify_hybrid(const HybridStep& step) {
  VerifyReport report;
  const HybridTriple& p = step.parent;
  const std::array<std::pair<Endpoint, Endpoint>, 4> queries{{
      {{p.u, 0}, {p.v, 0}},
      {{p.u, 0}, {p.v, 1}},
      {{p.v, 0}, {p.u, 0}},
      {{p.v, 0}, {p.u, 1}},
  }};
  for (const auto& [start, target] : queries) {
    QueryCheck check{start, target, 0, 0, false};
    check.parent_value = hybrid_prob(p, start, {target});
    for (const auto& child : step.children) {
      const HybridTriple& c = child.triple;
      Endpoint cs{start.vertex == p.u ? c.u : c.v, start.layer};
      Endpoint ct{target.vertex == p.u ? c.u : c.v, target.layer};
      check.mixed_value += child.weight * hybrid_prob(c, cs, {ct});
    }
    check.ok = check.parent_value == check.mixed_value;
    if (!check.ok) report.ok = false;
    report.checks.push_back(std::move(check));
  }
  return report;
}

}  // namespace bunkbed
