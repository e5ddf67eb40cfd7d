#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <bunkbed/errors.hpp>
#include <bunkbed/graph.hpp>
#include <bunkbed/isomorphism.hpp>
#include <bunkbed/minor.hpp>
#include <bunkbed/models.hpp>
#include <bunkbed/rational.hpp>

namespace bunkbed {

// ---------------------------------------------------------------------------
// Instance enumeration
// ---------------------------------------------------------------------------

/// Selects which graphs enumerate_graphs produces. Simple graphs are
/// generated up to 8 vertices; multigraphs up to 5 vertices and need an
/// explicit edge cap (at most 8). The outerplanar filter is only available
/// together with connected_only.
struct InstanceFilter {
  int max_vertices = 0;
  int max_edges = -1;  // negative: no cap (simple graphs only)
  bool connected_only = true;
  bool outerplanar_only = false;
  bool multigraph = false;

  void validate() const {
    if (max_vertices < 1) throw std::invalid_argument("enumeration needs at least one vertex");
    if (outerplanar_only && !connected_only)
      throw std::invalid_argument("outerplanar filtering requires connected_only");
    if (multigraph) {
      if (max_edges < 0) throw std::invalid_argument("multigraph enumeration needs an edge cap");
      if (max_vertices > 5 || max_edges > 8)
        throw guard_error("multigraph enumeration is guarded at 5 vertices and 8 edges");
    } else if (max_vertices > 8) {
      throw guard_error("graph enumeration is guarded at 8 vertices");
    }
  }
};

namespace detail {

/// All isomorphism classes of simple graphs with 1..max_n vertices and at
/// most edge_cap edges (no cap when negative), built by extending every
/// (k-1)-vertex class with one new vertex joined to each possible
/// neighbourhood. Disconnected classes are kept: they are needed as parents.
inline std::vector<MultiGraph> simple_classes(int max_n, int edge_cap) {
  std::vector<MultiGraph> all;
  std::vector<MultiGraph> current;
  current.emplace_back(1, std::vector<MultiGraph::Edge>{});
  all.push_back(current.front());
  for (int k = 2; k <= max_n; ++k) {
    std::set<std::vector<uint8_t>> seen;
    std::vector<MultiGraph> next;
    for (const MultiGraph& h : current) {
      for (uint32_t nb = 0; nb < (uint32_t{1} << (k - 1)); ++nb) {
        const int extra = std::popcount(nb);
        if (edge_cap >= 0 && h.edge_count() + extra > edge_cap) continue;
        std::vector<MultiGraph::Edge> edges;
        edges.reserve(h.edge_count() + extra);
        for (int e = 0; e < h.edge_count(); ++e) edges.push_back(h.edge(e));
        for (int v = 0; v < k - 1; ++v)
          if ((nb >> v) & 1) edges.push_back({v, k - 1});
        MultiGraph g(k, std::move(edges));
        if (seen.insert(canonical_key(g)).second) next.push_back(std::move(g));
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    current = std::move(next);
  }
  return all;
}

/// All isomorphism classes of loopless multigraphs with 1..max_n vertices
/// and at most edge_cap edges, by direct multiplicity assignment to the
/// vertex pairs in lexicographic order plus canonical deduplication.
inline std::vector<MultiGraph> multigraph_classes(int max_n, int edge_cap) {
  std::vector<MultiGraph> all;
  for (int n = 1; n <= max_n; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::set<std::vector<uint8_t>> seen;
    std::vector<int> mult(pairs.size(), 0);
    auto emit = [&]() {
      std::vector<MultiGraph::Edge> edges;
      for (size_t i = 0; i < pairs.size(); ++i)
        for (int c = 0; c < mult[i]; ++c) edges.push_back({pairs[i].first, pairs[i].second});
      MultiGraph g(n, std::move(edges));
      if (seen.insert(canonical_key(g)).second) all.push_back(std::move(g));
    };
    auto rec = [&](auto&& self, size_t idx, int budget) -> void {
      if (idx == pairs.size()) {
        emit();
        return;
      }
      for (int c = 0; c <= budget; ++c) {
        mult[idx] = c;
        self(self, idx + 1, budget - c);
      }
      mult[idx] = 0;
    };
    rec(rec, 0, edge_cap);
  }
  return all;
}

}  // namespace detail

/// Every isomorphism class passing the filter, exactly once, ordered by
/// vertex count, then edge count, then canonical code.
inline std::vector<MultiGraph> enumerate_graphs(const InstanceFilter& filter) {
  filter.validate();
  std::vector<MultiGraph> classes = filter.multigraph
                                        ? detail::multigraph_classes(filter.max_vertices, filter.max_edges)
                                        : detail::simple_classes(filter.max_vertices, filter.max_edges);
  std::vector<MultiGraph> out;
  for (MultiGraph& g : classes) {
    if (filter.max_edges >= 0 && g.edge_count() > filter.max_edges) continue;
    if (filter.connected_only && !is_connected(g)) continue;
    if (filter.outerplanar_only && !is_outerplanar(g)) continue;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const MultiGraph& a, const MultiGraph& b) {
    if (a.vertex_count() != b.vertex_count()) return a.vertex_count() < b.vertex_count();
    if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
    return canonical_key(a) < canonical_key(b);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Conjecture scanning
// ---------------------------------------------------------------------------

/// Scan configuration. The scanned quantity per instance is the minimum of
/// P(u lower -> v lower) - P(u lower -> v upper) over all ordered pairs
/// u != v and all transversals of size at most max_t_size (all sizes when
/// negative). Model parameters: p drives e1/e5, and e2 draws its per-edge
/// probabilities cyclically from p_grid (uniform p when the grid is empty).
/// For e4 every partition of the edges into connected blocks is scanned.
/// anti_correlated (e3 only) conditions each pair of distinct edges in turn
/// on receiving different colors and scans those conditional margins
/// instead.
struct ScanOptions {
  ModelKind kind = ModelKind::kE3;
  Rational p{1, 2};
  std::vector<Rational> p_grid;
  int max_t_size = -1;
  bool anti_correlated = false;
  int jobs = 1;
};

struct ScanWitness {
  Transversal t;
  int u = 0;
  int v = 0;
  std::optional<EdgePartition> partition;  // e4 scans
  int tie_a = -1;                          // anti-correlated scans
  int tie_b = -1;
};

struct ScanRow {
  int instance_id = 0;
  MultiGraph graph;
  uint64_t margins = 0;  // margins evaluated on this instance
  Rational min_margin;   // meaningful only when margins > 0
  ScanWitness witness;
  uint64_t equality_cases = 0;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  uint64_t total_instances = 0;
  uint64_t total_margins = 0;
  uint64_t equality_cases = 0;
  Rational min_margin;       // over all rows with margins
  int worst_instance = -1;   // instance_id attaining min_margin
  std::vector<int> violations;  // instance ids with min_margin < 0
};

namespace detail {

/// Shared-enumeration connection tables from every start vertex's lower
/// copy: same[u][v] = P(u lower -> v lower), other[u][v] = P(u lower -> v
/// upper). One sweep over the model's configurations serves all pairs.
struct PairTables {
  std::vector<std::vector<Rational>> same, other;
};

inline void weigh_counts(PairTables& out, int n,
                         const std::vector<std::vector<std::vector<uint64_t>>>& same_counts,
                         const std::vector<std::vector<std::vector<uint64_t>>>& other_counts,
                         const std::vector<Rational>& weights) {
  out.same.assign(n, std::vector<Rational>(n, Rational(0)));
  out.other.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (size_t b = 0; b < weights.size(); ++b) {
        if (same_counts[u][v][b]) out.same[u][v] += Rational(same_counts[u][v][b]) * weights[b];
        if (other_counts[u][v][b]) out.other[u][v] += Rational(other_counts[u][v][b]) * weights[b];
      }
}

inline PairTables layered_pair_tables(const MultiGraph& g, const Transversal& t,
                                      const LayeredInstance& inst) {
  const int k = static_cast<int>(inst.blocks.size());
  const int f = static_cast<int>(inst.free_edges.size());
  if (k + 2 * f >= 25) throw guard_error("layered enumeration exceeds the 2^24 configuration guard");
  const int n = g.vertex_count();
  Dsu dsu(2 * n);
  PairTables out;

  if (f == 0) {
    std::vector same_counts(n, std::vector(n, std::vector<uint64_t>(k + 1, 0)));
    auto other_counts = same_counts;
    for (uint64_t cm = 0; cm < (uint64_t{1} << k); ++cm) {
      layered_union(g, t, inst, cm, 0, dsu);
      const int b = std::popcount(cm);
      for (int u = 0; u < n; ++u) {
        const int root = dsu.find(u);
        for (int v = 0; v < n; ++v) {
          if (dsu.find(v) == root) ++same_counts[u][v][b];
          if (dsu.find(v + n) == root) ++other_counts[u][v][b];
        }
      }
    }
    weigh_counts(out, n, same_counts, other_counts, blue_count_weights(inst.block_red_prob, k));
    return out;
  }

  std::vector<std::array<Rational, 4>> factor(f);
  for (int i = 0; i < f; ++i) {
    const Rational& pe = inst.free_probs[i];
    factor[i] = {(1 - pe) * (1 - pe), pe * (1 - pe), (1 - pe) * pe, pe * pe};
  }
  std::vector<Rational> wblue = blue_count_weights(inst.block_red_prob, k);
  out.same.assign(n, std::vector<Rational>(n, Rational(0)));
  out.other.assign(n, std::vector<Rational>(n, Rational(0)));
  for (uint64_t cm = 0; cm < (uint64_t{1} << k); ++cm) {
    for (uint64_t fm = 0; fm < (uint64_t{1} << (2 * f)); ++fm) {
      layered_union(g, t, inst, cm, fm, dsu);
      Rational weight = wblue[std::popcount(cm)];
      for (int i = 0; i < f; ++i) weight *= factor[i][(fm >> (2 * i)) & 3];
      for (int u = 0; u < n; ++u) {
        const int root = dsu.find(u);
        for (int v = 0; v < n; ++v) {
          if (dsu.find(v) == root) out.same[u][v] += weight;
          if (dsu.find(v + n) == root) out.other[u][v] += weight;
        }
      }
    }
  }
  return out;
}

inline PairTables percolation_pair_tables(const MultiGraph& g, const Rational& p) {
  BunkbedGraph bb = build_bunkbed(g);
  const int m = bb.derived.edge_count();
  if (m >= 25) throw guard_error("subset enumeration exceeds the 2^24 configuration guard");
  const int n = g.vertex_count();
  Dsu dsu(2 * n);
  std::vector same_counts(n, std::vector(n, std::vector<uint64_t>(m + 1, 0)));
  auto other_counts = same_counts;
  for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
    dsu.reset(2 * n);
    uint64_t mm = mask;
    while (mm) {
      int e = std::countr_zero(mm);
      mm &= mm - 1;
      dsu.unite(bb.derived.edge(e).a, bb.derived.edge(e).b);
    }
    const int b = std::popcount(mask);
    for (int u = 0; u < n; ++u) {
      const int root = dsu.find(bb.node(u, 0));
      for (int v = 0; v < n; ++v) {
        if (dsu.find(bb.node(v, 0)) == root) ++same_counts[u][v][b];
        if (dsu.find(bb.node(v, 1)) == root) ++other_counts[u][v][b];
      }
    }
  }
  std::vector<Rational> weights(m + 1);
  for (int b = 0; b <= m; ++b)
    weights[b] = rational_pow(p, static_cast<unsigned>(b)) *
                 rational_pow(1 - p, static_cast<unsigned>(m - b));
  PairTables out;
  weigh_counts(out, n, same_counts, other_counts, weights);
  return out;
}

inline PairTables oriented_pair_tables(const MultiGraph& g, const Transversal& t, ModelKind kind) {
  const int m = g.edge_count();
  if (m >= 25) throw guard_error("orientation enumeration exceeds the 2^24 guard");
  const int n = g.vertex_count();
  std::vector same_counts(n, std::vector<uint64_t>(n, 0));
  auto other_counts = same_counts;
  for (uint64_t om = 0; om < (uint64_t{1} << m); ++om) {
    for (int u = 0; u < n; ++u) {
      ReachSet reach = kind == ModelKind::kD2 ? mode_reach(g, t, Orientation{om}, {u, 0})
                                              : nonreversing_reach(g, t, Orientation{om}, {u, 0});
      for (int v = 0; v < n; ++v) {
        if (reach.contains({v, 0})) ++same_counts[u][v];
        if (reach.contains({v, 1})) ++other_counts[u][v];
      }
    }
  }
  PairTables out;
  out.same.assign(n, std::vector<Rational>(n, Rational(0)));
  out.other.assign(n, std::vector<Rational>(n, Rational(0)));
  const Rational total(BigInt(1), BigInt(1) << m);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      out.same[u][v] = Rational(same_counts[u][v]) * total;
      out.other[u][v] = Rational(other_counts[u][v]) * total;
    }
  return out;
}

/// Uniform edge colorings conditioned on edges e and f getting different
/// colors (e3 semantics), all pairs at once.
inline PairTables anti_correlated_pair_tables(const MultiGraph& g, const Transversal& t, int e,
                                              int f) {
  const int m = g.edge_count();
  if (m >= 25) throw guard_error("layered enumeration exceeds the 2^24 configuration guard");
  const int n = g.vertex_count();
  LayeredInstance inst;
  for (int i = 0; i < m; ++i) inst.blocks.push_back(bit(i));
  Dsu dsu(2 * n);
  std::vector same_counts(n, std::vector<uint64_t>(n, 0));
  auto other_counts = same_counts;
  uint64_t admissible = 0;
  for (uint64_t cm = 0; cm < (uint64_t{1} << m); ++cm) {
    if ((((cm >> e) ^ (cm >> f)) & 1) == 0) continue;
    ++admissible;
    layered_union(g, t, inst, cm, 0, dsu);
    for (int u = 0; u < n; ++u) {
      const int root = dsu.find(u);
      for (int v = 0; v < n; ++v) {
        if (dsu.find(v) == root) ++same_counts[u][v];
        if (dsu.find(v + n) == root) ++other_counts[u][v];
      }
    }
  }
  PairTables out;
  out.same.assign(n, std::vector<Rational>(n, Rational(0)));
  out.other.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      out.same[u][v] = Rational(BigInt(same_counts[u][v]), BigInt(admissible));
      out.other[u][v] = Rational(BigInt(other_counts[u][v]), BigInt(admissible));
    }
  return out;
}

inline PairTables model_pair_tables(const MultiGraph& g, const ModelSpec& spec) {
  spec.validate(g);
  switch (spec.kind) {
    case ModelKind::kE1:
      return percolation_pair_tables(g, spec.p);
    case ModelKind::kE2:
    case ModelKind::kE3:
    case ModelKind::kE4:
    case ModelKind::kE5:
      return layered_pair_tables(g, spec.t, layered_from_spec(g, spec));
    case ModelKind::kD2:
    case ModelKind::kD3:
      return oriented_pair_tables(g, spec.t, spec.kind);
    case ModelKind::kD1:
      break;
  }
  throw std::invalid_argument("margins compare the two layers; d1 has no layer structure");
}

/// Every partition of the edge ids into connected blocks, by restricted
/// growth strings.
inline std::vector<EdgePartition> connected_edge_partitions(const MultiGraph& g) {
  const int m = g.edge_count();
  if (m > 8) throw guard_error("partition enumeration is guarded at 8 edges");
  std::vector<EdgePartition> out;
  std::vector<int> assign(m, 0);
  auto block_connected = [&](uint64_t mask) {
    Dsu dsu(g.vertex_count());
    int anchor = -1;
    for (int e = 0; e < m; ++e)
      if ((mask >> e) & 1) {
        dsu.unite(g.edge(e).a, g.edge(e).b);
        anchor = g.edge(e).a;
      }
    for (int e = 0; e < m; ++e)
      if ((mask >> e) & 1)
        if (!dsu.same(anchor, g.edge(e).a) || !dsu.same(anchor, g.edge(e).b)) return false;
    return true;
  };
  auto rec = [&](auto&& self, int idx, int used) -> void {
    if (idx == m) {
      std::vector<uint64_t> masks(used, 0);
      for (int e = 0; e < m; ++e) masks[assign[e]] |= bit(e);
      for (uint64_t mask : masks)
        if (!block_connected(mask)) return;
      out.push_back(EdgePartition::from_masks(g, std::move(masks)));
      return;
    }
    for (int b = 0; b <= used; ++b) {
      assign[idx] = b;
      self(self, idx + 1, std::max(used, b + 1));
    }
  };
  if (m == 0)
    out.push_back(EdgePartition::from_masks(g, {}));
  else
    rec(rec, 0, 0);
  return out;
}

inline ScanRow scan_instance(const MultiGraph& g, const ScanOptions& opt, int instance_id) {
  ScanRow row;
  row.instance_id = instance_id;
  row.graph = g;
  const int n = g.vertex_count();
  if (n < 2) return row;

  bool first = true;
  auto take = [&](const PairTables& tables, const Transversal& t,
                  const std::optional<EdgePartition>& part, int tie_a, int tie_b) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        Rational margin = tables.same[u][v] - tables.other[u][v];
        ++row.margins;
        if (margin == 0) ++row.equality_cases;
        if (first || margin < row.min_margin) {
          first = false;
          row.min_margin = margin;
          row.witness = ScanWitness{t, u, v, part, tie_a, tie_b};
        }
      }
  };

  std::vector<Transversal> transversals;
  if (opt.kind == ModelKind::kE1) {
    transversals.emplace_back();
  } else {
    for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
      if (opt.max_t_size >= 0 && std::popcount(tm) > opt.max_t_size) continue;
      transversals.emplace_back(tm);
    }
  }

  for (const Transversal& t : transversals) {
    if (opt.anti_correlated) {
      if (opt.kind != ModelKind::kE3)
        throw std::invalid_argument("anti-correlated scanning is an e3 variant");
      for (int e = 0; e < g.edge_count(); ++e)
        for (int f = e + 1; f < g.edge_count(); ++f)
          take(anti_correlated_pair_tables(g, t, e, f), t, std::nullopt, e, f);
      continue;
    }
    switch (opt.kind) {
      case ModelKind::kE1:
        take(model_pair_tables(g, ModelSpec::e1(opt.p)), t, std::nullopt, -1, -1);
        break;
      case ModelKind::kE2: {
        std::vector<Rational> probs(g.edge_count(), opt.p);
        if (!opt.p_grid.empty())
          for (int e = 0; e < g.edge_count(); ++e) probs[e] = opt.p_grid[e % opt.p_grid.size()];
        take(model_pair_tables(g, ModelSpec::e2(std::move(probs), t)), t, std::nullopt, -1, -1);
        break;
      }
      case ModelKind::kE3:
        take(model_pair_tables(g, ModelSpec::e3(t)), t, std::nullopt, -1, -1);
        break;
      case ModelKind::kE4:
        for (const EdgePartition& part : connected_edge_partitions(g))
          take(model_pair_tables(g, ModelSpec::e4(t, part)), t, part, -1, -1);
        break;
      case ModelKind::kE5:
        take(model_pair_tables(g, ModelSpec::e5(opt.p, t)), t, std::nullopt, -1, -1);
        break;
      case ModelKind::kD2:
      case ModelKind::kD3:
        take(model_pair_tables(g, opt.kind == ModelKind::kD2 ? ModelSpec::d2(t) : ModelSpec::d3(t)),
             t, std::nullopt, -1, -1);
        break;
      case ModelKind::kD1:
        throw std::invalid_argument("margins compare the two layers; d1 has no layer structure");
    }
  }
  return row;
}

}  // namespace detail

/// Exhaustive exact margins over every enumerated instance. Deterministic
/// for any job count: instances are scanned independently and merged in
/// enumeration order.
inline ScanReport scan_conjecture(const ScanOptions& opt, const InstanceFilter& filter) {
  if (opt.kind == ModelKind::kD1)
    throw std::invalid_argument("margins compare the two layers; d1 has no layer structure");
  std::vector<MultiGraph> graphs = enumerate_graphs(filter);
  std::vector<ScanRow> rows(graphs.size());

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || graphs.size() <= 1) {
    for (size_t i = 0; i < graphs.size(); ++i)
      rows[i] = detail::scan_instance(graphs[i], opt, static_cast<int>(i));
  } else {
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w]() {
        try {
          for (size_t i = w; i < graphs.size(); i += jobs)
            rows[i] = detail::scan_instance(graphs[i], opt, static_cast<int>(i));
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    for (auto& th : workers) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  ScanReport report;
  report.total_instances = graphs.size();
  bool first = true;
  for (const ScanRow& row : rows) {
    report.total_margins += row.margins;
    report.equality_cases += row.equality_cases;
    if (row.margins == 0) continue;
    if (row.min_margin < 0) report.violations.push_back(row.instance_id);
    if (first || row.min_margin < report.min_margin) {
      first = false;
      report.min_margin = row.min_margin;
      report.worst_instance = row.instance_id;
    }
  }
  report.rows = std::move(rows);
  return report;
}

inline ScanReport scan_conjecture(ModelKind kind, const InstanceFilter& filter) {
  ScanOptions opt;
  opt.kind = kind;
  return scan_conjecture(opt, filter);
}

// ---------------------------------------------------------------------------
// Reconstruction of the four-vertex, five-edge example
// ---------------------------------------------------------------------------

/// A marked multigraph on which the walk model with forbidden direction
/// reversal gives 13/16 for both layer queries while the uniform coloring
/// model gives 7/8 for both, with T = {u, v}.
struct Figure2Match {
  MultiGraph graph;
  int u = 0;
  int v = 0;
};

/// Exhaustively searches all connected 4-vertex 5-edge multigraphs and all
/// ordered marked pairs for the published value pattern. Throws when no
/// instance matches (which would mean the walk semantics are off).
inline std::vector<Figure2Match> find_figure2() {
  InstanceFilter filter;
  filter.max_vertices = 4;
  filter.max_edges = 5;
  filter.connected_only = true;
  filter.multigraph = true;
  const Rational walk_target(13, 16);
  const Rational coloring_target(7, 8);

  std::vector<Figure2Match> out;
  for (const MultiGraph& g : enumerate_graphs(filter)) {
    if (g.vertex_count() != 4 || g.edge_count() != 5) continue;
    for (int u = 0; u < 4; ++u)
      for (int v = 0; v < 4; ++v) {
        if (u == v) continue;
        const Transversal t = Transversal::of({u, v});
        detail::PairTables walk = detail::oriented_pair_tables(g, t, ModelKind::kD3);
        if (walk.same[u][v] != walk_target || walk.other[u][v] != walk_target) continue;
        detail::PairTables coloring =
            detail::layered_pair_tables(g, t, detail::layered_from_spec(g, ModelSpec::e3(t)));
        if (coloring.same[u][v] != coloring_target || coloring.other[u][v] != coloring_target)
          continue;
        out.push_back({g, u, v});
      }
  }
  if (out.empty())
    throw std::runtime_error("no four-vertex five-edge instance matches the published values");
  return out;
}

}  // namespace bunkbed
