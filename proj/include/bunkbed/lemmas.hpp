#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <bunkbed/graph.hpp>
#include <bunkbed/models.hpp>
#include <bunkbed/reach.hpp>
#include <bunkbed/reductions.hpp>
#include <bunkbed/search.hpp>

namespace bunkbed {

// ---------------------------------------------------------------------------
// Check bookkeeping
// ---------------------------------------------------------------------------

/// Tally for one verification family: how many individual identities were
/// checked, how many failed, and a description of the first failure.
struct LemmaCheck {
  uint64_t checks = 0;
  uint64_t failures = 0;
  std::string first_failure;

  void record(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) first_failure = what;
  }
  bool ok() const { return failures == 0; }
  void merge(const LemmaCheck& other) {
    checks += other.checks;
    if (failures == 0) first_failure = other.first_failure;
    failures += other.failures;
  }
};

inline std::string instance_label(const MultiGraph& g, const Transversal& t, int u, int v) {
  std::string s = "n=" + std::to_string(g.vertex_count()) + " edges=";
  for (int e = 0; e < g.edge_count(); ++e) {
    if (e) s += ",";
    s += std::to_string(g.edge(e).a) + "-" + std::to_string(g.edge(e).b);
  }
  s += " T={";
  bool first = true;
  for (int w = 0; w < g.vertex_count(); ++w)
    if (t.contains(w)) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(w);
    }
  s += "} u=" + std::to_string(u) + " v=" + std::to_string(v);
  return s;
}

namespace detail {

template <typename Fn>
inline void parallel_indices(size_t count, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&, w]() {
      try {
        for (size_t i = static_cast<size_t>(w); i < count; i += jobs) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& th : workers) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-graph verification families
// ---------------------------------------------------------------------------

/// Connection probability under p = 1/2 bond percolation on the graph
/// itself equals the probability of a directed path under a uniform random
/// orientation, for every ordered vertex pair.
inline void check_percolation_matches_orientation(const MultiGraph& g, LemmaCheck& out) {
  const ModelSpec d1 = ModelSpec::d1();
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (u == v) continue;
      const Rational perc = percolation_two_point(g, Rational(1, 2), u, v);
      const Rational orient = exact_prob(g, d1, Query{u, v, 0, {}});
      out.record(perc == orient, instance_label(g, Transversal{}, u, v) + " percolation " +
                                     to_fraction_string(perc) + " != orientation " +
                                     to_fraction_string(orient));
    }
}

/// Direction-switching walk margins are nonnegative for every transversal
/// and every ordered pair.
inline void check_switching_walk_margins(const MultiGraph& g, LemmaCheck& out) {
  const int n = g.vertex_count();
  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    const Transversal t{tm};
    detail::PairTables tables = detail::oriented_pair_tables(g, t, ModelKind::kD2);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        const Rational margin = tables.same[u][v] - tables.other[u][v];
        out.record(margin >= 0, instance_label(g, t, u, v) + " walk margin " +
                                    to_fraction_string(margin) + " < 0");
      }
  }
}

/// The orientation-reversal pairing behind the switching-walk margins:
/// reversing every edge outside the both-ways-reachable core is an
/// involution, preserves the core, and swaps the two layer events for
/// vertices outside it; summed over the orientations whose walker reaches
/// the transversal, the two layer counts agree exactly. Orientations that
/// never reach the transversal cannot switch direction at all.
inline void check_reversal_pairing(const MultiGraph& g, LemmaCheck& out) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (m >= 25) throw guard_error("orientation enumeration exceeds the 2^24 guard");
  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    const Transversal t{tm};
    for (int u = 0; u < n; ++u) {
      std::vector<uint64_t> with_count(n, 0), against_count(n, 0);
      for (uint64_t om = 0; om < (uint64_t{1} << m); ++om) {
        const Orientation o{om};
        const ReachSet reach = mode_reach(g, t, o, {u, 0});
        bool touches = false;
        for (int w = 0; w < n; ++w)
          if (t.contains(w) && (reach.contains(w, 0) || reach.contains(w, 1))) touches = true;
        const std::string label = instance_label(g, t, u, -1) + " orientation " + std::to_string(om);
        if (!touches) {
          for (int v = 0; v < n; ++v)
            out.record(!reach.contains(v, 1),
                       label + " reaches the against-mode copy of " + std::to_string(v) +
                           " without touching the transversal");
          continue;
        }
        const ReversalCertificate cert = reversal_involution(g, t, o, u);
        const ReversalCertificate back = reversal_involution(g, t, cert.reversed, u);
        out.record(back.reversed.forward == om, label + " double reversal is not the identity");
        out.record(back.core_vertices == cert.core_vertices,
                   label + " reversal changed the reachable core");
        const ReachSet mirrored = mode_reach(g, t, cert.reversed, {u, 0});
        for (int v = 0; v < n; ++v) {
          if (reach.contains(v, 0)) ++with_count[v];
          if (reach.contains(v, 1)) ++against_count[v];
          if ((cert.core_vertices >> v) & 1) {
            out.record(reach.contains(v, 0) && reach.contains(v, 1),
                       label + " core vertex " + std::to_string(v) + " missing a mode");
          } else {
            out.record(reach.contains(v, 0) == mirrored.contains(v, 1) &&
                           reach.contains(v, 1) == mirrored.contains(v, 0),
                       label + " reversal failed to swap the modes of " + std::to_string(v));
          }
        }
      }
      for (int v = 0; v < n; ++v)
        out.record(with_count[v] == against_count[v],
                   instance_label(g, t, u, v) +
                       " transversal-reaching orientation counts differ: " +
                       std::to_string(with_count[v]) + " vs " + std::to_string(against_count[v]));
    }
  }
}

/// Zero-margin cases of the coloring models: if either endpoint carries a
/// rung, or the transversal separates the endpoints, the two layer
/// probabilities agree exactly. Checked for the uniform one-copy-per-edge
/// model on every transversal, and for independent copies with a cyclic
/// probability grid on transversals of size at most two.
inline void check_coloring_cutset_equality(const MultiGraph& g, const std::vector<Rational>& grid,
                                           LemmaCheck& out) {
  const int n = g.vertex_count();
  std::vector<Rational> probs(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) probs[e] = grid[e % grid.size()];

  auto equality_case = [&](const Transversal& t, int u, int v) {
    if (t.contains(u) || t.contains(v)) return true;
    auto comps = components_after_removal(g, t.mask());
    for (const auto& comp : comps) {
      const bool has_u = std::find(comp.begin(), comp.end(), u) != comp.end();
      const bool has_v = std::find(comp.begin(), comp.end(), v) != comp.end();
      if (has_u) return !has_v;
    }
    return true;
  };

  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    const Transversal t{tm};
    bool any_case = false;
    for (int u = 0; u < n && !any_case; ++u)
      for (int v = 0; v < n && !any_case; ++v)
        if (u != v && equality_case(t, u, v)) any_case = true;
    if (!any_case) continue;

    const detail::PairTables colored =
        detail::layered_pair_tables(g, t, detail::layered_from_spec(g, ModelSpec::e3(t)));
    const bool small_t = std::popcount(tm) <= 2;
    detail::PairTables copies;
    if (small_t)
      copies = detail::layered_pair_tables(g, t,
                                           detail::layered_from_spec(g, ModelSpec::e2(probs, t)));
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v || !equality_case(t, u, v)) continue;
        const Rational m3 = colored.same[u][v] - colored.other[u][v];
        out.record(m3 == 0, instance_label(g, t, u, v) + " coloring margin " +
                                to_fraction_string(m3) + " != 0 on an equality case");
        if (small_t) {
          const Rational m2 = copies.same[u][v] - copies.other[u][v];
          out.record(m2 == 0, instance_label(g, t, u, v) + " independent-copies margin " +
                                  to_fraction_string(m2) + " != 0 on an equality case");
        }
      }
  }
}

/// Independent-copies margins are nonnegative whenever the transversal has
/// at most one vertex, with per-edge probabilities drawn cyclically from
/// the grid.
inline void check_small_transversal_margins(const MultiGraph& g, const std::vector<Rational>& grid,
                                            LemmaCheck& out) {
  const int n = g.vertex_count();
  std::vector<Rational> probs(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) probs[e] = grid[e % grid.size()];
  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    if (std::popcount(tm) > 1) continue;
    const Transversal t{tm};
    const detail::PairTables tables =
        detail::layered_pair_tables(g, t, detail::layered_from_spec(g, ModelSpec::e2(probs, t)));
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        const Rational margin = tables.same[u][v] - tables.other[u][v];
        out.record(margin >= 0, instance_label(g, t, u, v) + " independent-copies margin " +
                                    to_fraction_string(margin) + " < 0");
      }
  }
}

/// For a cut vertex x separating u from v, the margin factors exactly: the
/// six-term split over which copies of x the walker can reach equals the
/// whole-graph margin and collapses to the product of the two sides'
/// margins.
inline void check_cut_vertex_factorization(const MultiGraph& g, LemmaCheck& out) {
  const int n = g.vertex_count();
  const std::vector<int> cuts = cut_vertices(g);
  if (cuts.empty()) return;

  auto restrict_transversal = [](const Transversal& t, const std::vector<int>& vertex_map,
                                 int old_n) {
    uint64_t mask = 0;
    for (int w = 0; w < old_n; ++w)
      if (t.contains(w) && vertex_map[w] >= 0) mask |= bit(vertex_map[w]);
    return Transversal{mask};
  };

  for (int x : cuts) {
    const auto comps = components_after_removal(g, bit(x));
    std::vector<int> comp_of(n, -1);
    for (size_t c = 0; c < comps.size(); ++c)
      for (int w : comps[c]) comp_of[w] = static_cast<int>(c);

    for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
      const Transversal t{tm};
      const detail::PairTables whole =
          detail::layered_pair_tables(g, t, detail::layered_from_spec(g, ModelSpec::e3(t)));
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          if (u == v || u == x || v == x) continue;
          if (comp_of[u] == comp_of[v]) continue;

          uint64_t v_side = bit(x);
          for (int w : comps[comp_of[v]]) v_side |= bit(w);
          const uint64_t u_side = (bit(n) - 1) & ~(v_side & ~bit(x));

          const InducedSubgraphResult side_u = induced_subgraph(g, u_side);
          const InducedSubgraphResult side_v = induced_subgraph(g, v_side);
          const ModelSpec spec_u = ModelSpec::e3(restrict_transversal(t, side_u.vertex_map, n));
          const ModelSpec spec_v = ModelSpec::e3(restrict_transversal(t, side_v.vertex_map, n));
          const int xu = side_u.vertex_map[x], uu = side_u.vertex_map[u];
          const int xv = side_v.vertex_map[x], vv = side_v.vertex_map[v];

          const Rational a0 = joint_prob(side_u.graph, spec_u, {uu, 0}, {{xu, 0}});
          const Rational a1 = joint_prob(side_u.graph, spec_u, {uu, 0}, {{xu, 1}});
          const Rational ab = joint_prob(side_u.graph, spec_u, {uu, 0}, {{xu, 0}, {xu, 1}});
          const Rational b0 = joint_prob(side_v.graph, spec_v, {xv, 0}, {{vv, 0}});
          const Rational b1 = joint_prob(side_v.graph, spec_v, {xv, 1}, {{vv, 0}});
          const Rational bb = joint_prob(side_v.graph, spec_v, {vv, 0}, {{xv, 0}, {xv, 1}});
          const Rational c0 = joint_prob(side_v.graph, spec_v, {xv, 0}, {{vv, 1}});
          const Rational c1 = joint_prob(side_v.graph, spec_v, {xv, 1}, {{vv, 1}});
          const Rational cb = joint_prob(side_v.graph, spec_v, {vv, 1}, {{xv, 0}, {xv, 1}});

          const Rational margin = whole.same[u][v] - whole.other[u][v];
          const Rational six = a0 * b0 + a1 * b1 - ab * bb - (a0 * c0 + a1 * c1 - ab * cb);
          const Rational product = (a0 - a1) * (b0 - c0);
          out.record(margin == six, instance_label(g, t, u, v) + " cut " + std::to_string(x) +
                                        ": six-term split " + to_fraction_string(six) +
                                        " != margin " + to_fraction_string(margin));
          out.record(six == product, instance_label(g, t, u, v) + " cut " + std::to_string(x) +
                                         ": product form " + to_fraction_string(product) +
                                         " != split " + to_fraction_string(six));
        }
    }
  }
}

/// Every applicable rewrite site on every (transversal, marked pair)
/// instance of the graph verifies exactly: the parent's four marked-endpoint
/// probabilities equal the weighted child mixture.
inline void check_reduction_soundness(const MultiGraph& g, LemmaCheck& out) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  auto verify_site = [&](const char* op, const Triple& parent, auto&& make) {
    try {
      const ReductionStep step = make();
      const VerifyReport report = verify_reduction(step);
      out.record(report.ok, instance_label(parent.g, parent.t, parent.u, parent.v) +
                                std::string(" ") + op + " mixture mismatch");
    } catch (const std::invalid_argument&) {
      // not an applicable site
    }
  };

  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    const Transversal t{tm};
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        Triple parent;
        try {
          parent = Triple::with_singletons(g, t, u, v);
        } catch (const std::invalid_argument&) {
          continue;
        }
        for (int e = 0; e < m; ++e)
          verify_site("t-contract", parent, [&] { return t_contract(parent, e); });
        for (int x = 0; x < n; ++x)
          verify_site("v2", parent, [&] { return v2_reduce(parent, x); });
        for (int x = 0; x < n; ++x)
          verify_site("y", parent, [&] { return y_reduce(parent, x); });
        for (int e = 0; e < m; ++e)
          for (int f = e + 1; f < m; ++f)
            verify_site("parallel", parent, [&] { return parallel_pair_reduce(parent, e, f); });
        for (int e1 = 0; e1 < m; ++e1)
          for (int e2 = e1 + 1; e2 < m; ++e2)
            for (int e3 = e2 + 1; e3 < m; ++e3) {
              verify_site("delta", parent, [&] { return delta_reduce(parent, e1, e2, e3); });
              for (int tied : {e1, e2, e3})
                for (int other = 0; other < m; ++other) {
                  if (other == e1 || other == e2 || other == e3) continue;
                  verify_site("restricted-delta", parent, [&] {
                    Triple merged = parent;
                    merged.partition = parent.partition.merged(g, {tied, other});
                    const int oa = tied == e1 ? e2 : e1;
                    const int ob = tied == e3 ? e2 : e3;
                    return restricted_delta_reduce(merged, tied, oa, ob);
                  });
                }
            }
      }
  }
}

/// Conditioning one independent-copies edge on how many of its two copies
/// are present splits the instance into contract / one-fair-copy / delete
/// children whose mixture reproduces the parent exactly. Swept over every
/// edge and unordered marked pair, with the transversal empty, a singleton,
/// or everything, and per-edge probabilities drawn cyclically from the grid.
inline void check_conditioning_soundness(const MultiGraph& g, const std::vector<Rational>& grid,
                                         LemmaCheck& out) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (n < 2) return;
  std::vector<Rational> probs(m);
  for (int e = 0; e < m; ++e) probs[e] = grid[e % grid.size()];
  const std::array<Transversal, 3> transversals{Transversal{}, Transversal{bit(0)},
                                                Transversal{bit(n) - 1}};
  for (const Transversal& t : transversals)
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        for (int e = 0; e < m; ++e) {
          const HybridTriple parent = hybrid_from_probs(g, probs, t, u, v);
          const VerifyReport report = verify_hybrid(e2_condition_edge(parent, e));
          out.record(report.ok, instance_label(g, t, u, v) + " conditioning edge " +
                                    std::to_string(e) + " mixture mismatch");
        }
}

// ---------------------------------------------------------------------------
// Aggregated suite
// ---------------------------------------------------------------------------

struct LemmaSuiteOptions {
  int max_n = 4;
  bool with_figure2 = false;
  bool with_negative_control = false;
  int jobs = 1;
};

struct LemmaRow {
  std::string name;
  bool pass = false;
  uint64_t checks = 0;
  std::string detail;
};

/// Runs every verification family over all connected simple graphs with at
/// most max_n vertices and returns one row per family. The optional rows:
/// the reconstructed four-vertex five-edge example (informational model
/// disagreement, margins still nonnegative) and a deliberately corrupted
/// reduction weight, which must produce a failing row.
inline std::vector<LemmaRow> run_lemma_suite(const LemmaSuiteOptions& opt) {
  InstanceFilter filter;
  filter.max_vertices = opt.max_n;
  const std::vector<MultiGraph> corpus = enumerate_graphs(filter);
  const std::vector<Rational> grid{{1, 4}, {1, 2}, {3, 4}};

  std::vector<LemmaRow> rows;
  auto family = [&](const std::string& name, auto&& checker) {
    std::vector<LemmaCheck> partial(corpus.size());
    detail::parallel_indices(corpus.size(), opt.jobs,
                             [&](size_t i) { checker(corpus[i], partial[i]); });
    LemmaCheck total;
    for (const LemmaCheck& part : partial) total.merge(part);
    rows.push_back({name, total.ok(), total.checks, total.ok() ? "" : total.first_failure});
  };

  family("percolation matches uniform orientation at p=1/2",
         [](const MultiGraph& g, LemmaCheck& c) { check_percolation_matches_orientation(g, c); });
  family("switching-walk margins nonnegative",
         [](const MultiGraph& g, LemmaCheck& c) { check_switching_walk_margins(g, c); });
  family("orientation reversal pairing",
         [](const MultiGraph& g, LemmaCheck& c) { check_reversal_pairing(g, c); });
  family("coloring margins vanish on separating transversals",
         [&](const MultiGraph& g, LemmaCheck& c) { check_coloring_cutset_equality(g, grid, c); });
  family("independent-copies margins nonnegative for |T| <= 1",
         [&](const MultiGraph& g, LemmaCheck& c) { check_small_transversal_margins(g, grid, c); });
  family("cut-vertex factorization",
         [](const MultiGraph& g, LemmaCheck& c) { check_cut_vertex_factorization(g, c); });
  family("reduction soundness",
         [](const MultiGraph& g, LemmaCheck& c) { check_reduction_soundness(g, c); });
  family("conditioning soundness",
         [&](const MultiGraph& g, LemmaCheck& c) { check_conditioning_soundness(g, grid, c); });

  if (opt.with_figure2) {
    LemmaRow row{"four-vertex five-edge walk/coloring disagreement", false, 0, ""};
    try {
      const std::vector<Figure2Match> matches = find_figure2();
      const Figure2Match& m0 = matches.front();
      const Transversal t = Transversal::of({m0.u, m0.v});
      const detail::PairTables walk = detail::oriented_pair_tables(m0.graph, t, ModelKind::kD3);
      const detail::PairTables coloring = detail::layered_pair_tables(
          m0.graph, t, detail::layered_from_spec(m0.graph, ModelSpec::e3(t)));
      bool ok = true;
      for (int u = 0; u < m0.graph.vertex_count(); ++u)
        for (int v = 0; v < m0.graph.vertex_count(); ++v) {
          if (u == v) continue;
          ++row.checks;
          if (walk.same[u][v] - walk.other[u][v] < 0) ok = false;
          if (coloring.same[u][v] - coloring.other[u][v] < 0) ok = false;
        }
      const Rational gap = coloring.same[m0.u][m0.v] - walk.same[m0.u][m0.v];
      ++row.checks;
      if (gap != Rational(1, 16)) ok = false;
      row.pass = ok;
      row.detail = "walk " + to_fraction_string(walk.same[m0.u][m0.v]) + " vs coloring " +
                   to_fraction_string(coloring.same[m0.u][m0.v]) + " (gap " +
                   to_fraction_string(gap) + "), margins nonnegative";
    } catch (const std::exception& ex) {
      row.pass = false;
      row.detail = ex.what();
    }
    rows.push_back(std::move(row));
  }

  if (opt.with_negative_control) {
    const MultiGraph path = MultiGraph::from_pairs(3, {{0, 1}, {1, 2}});
    const Triple parent = Triple::with_singletons(path, Transversal{}, 0, 2);
    ReductionStep step = v2_reduce(parent, 1);
    step.children[1].weight += Rational(1, 100);
    const VerifyReport report = verify_reduction(step);
    rows.push_back({"negative control: corrupted weight must fail", report.ok, 4,
                    report.ok ? "corruption went undetected" : "intentional corruption detected"});
  }

  return rows;
}

}  // namespace bunkbed
