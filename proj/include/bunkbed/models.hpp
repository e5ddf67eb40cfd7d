#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "polynomial.hpp"
#include "reach.hpp"

namespace bunkbed {

// ---------------------------------------------------------------------------
// Model specification
// ---------------------------------------------------------------------------

/// The eight randomness models over a base graph G with transversal T:
///   E1  every bunkbed edge (both horizontal copies and all verticals)
///       present independently with probability p; T unused.
///   E2  verticals exactly at T; each horizontal copy of edge e present
///       independently with probability p_e.
///   E3  verticals exactly at T; every edge red or blue uniformly, red
///       serving layer 0 and blue layer 1 (exactly one copy per edge).
///   E4  E3 with colors constant on the blocks of an edge partition.
///   E5  E3 with red probability p instead of 1/2.
///   D1  uniform random orientation, plain directed reachability; T unused.
///   D2  uniform random orientation, walks travel with the orientation and
///       may flip to travelling against it (and back) only at T.
///   D3  D2 with edge re-use in opposite directions forbidden.
enum class ModelKind { kE1, kE2, kE3, kE4, kE5, kD1, kD2, kD3 };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kE1: return "e1";
    case ModelKind::kE2: return "e2";
    case ModelKind::kE3: return "e3";
    case ModelKind::kE4: return "e4";
    case ModelKind::kE5: return "e5";
    case ModelKind::kD1: return "d1";
    case ModelKind::kD2: return "d2";
    case ModelKind::kD3: return "d3";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  for (ModelKind k : {ModelKind::kE1, ModelKind::kE2, ModelKind::kE3, ModelKind::kE4,
                      ModelKind::kE5, ModelKind::kD1, ModelKind::kD2, ModelKind::kD3})
    if (s == model_kind_name(k)) return k;
  throw std::invalid_argument("unknown model '" + s + "'");
}

struct ModelSpec {
  ModelKind kind = ModelKind::kE3;
  Rational p{1, 2};                      // E1, E5
  std::vector<Rational> edge_probs;      // E2, one entry per edge id
  Transversal t;                         // E2..E5, D2, D3
  std::optional<EdgePartition> partition;  // E4

  static ModelSpec e1(const Rational& p) { return {ModelKind::kE1, p, {}, {}, {}}; }
  static ModelSpec e2(std::vector<Rational> edge_probs, const Transversal& t) {
    return {ModelKind::kE2, {1, 2}, std::move(edge_probs), t, {}};
  }
  static ModelSpec e3(const Transversal& t) { return {ModelKind::kE3, {1, 2}, {}, t, {}}; }
  static ModelSpec e4(const Transversal& t, EdgePartition part) {
    return {ModelKind::kE4, {1, 2}, {}, t, std::move(part)};
  }
  static ModelSpec e5(const Rational& p, const Transversal& t) {
    return {ModelKind::kE5, p, {}, t, {}};
  }
  static ModelSpec d1() { return {ModelKind::kD1, {1, 2}, {}, {}, {}}; }
  static ModelSpec d2(const Transversal& t) { return {ModelKind::kD2, {1, 2}, {}, t, {}}; }
  static ModelSpec d3(const Transversal& t) { return {ModelKind::kD3, {1, 2}, {}, t, {}}; }

  void validate(const MultiGraph& g) const {
    auto check_prob = [](const Rational& q, const char* what) {
      if (q < 0 || q > 1) throw std::invalid_argument(std::string(what) + " outside [0,1]");
    };
    t.check_against(g);
    switch (kind) {
      case ModelKind::kE1:
        check_prob(p, "p");
        break;
      case ModelKind::kE2:
        if (static_cast<int>(edge_probs.size()) != g.edge_count())
          throw std::invalid_argument("e2 needs one probability per edge");
        for (const auto& q : edge_probs) check_prob(q, "edge probability");
        break;
      case ModelKind::kE3:
      case ModelKind::kD2:
      case ModelKind::kD3:
      case ModelKind::kD1:
        break;
      case ModelKind::kE4:
        if (!partition) throw std::invalid_argument("e4 needs an edge partition");
        break;
      case ModelKind::kE5:
        check_prob(p, "p");
        break;
    }
  }
};

/// Connection event: from the start vertex's lower/with copy to the target
/// vertex on the given layer, optionally together with extra joint targets.
/// For D1 the layers are ignored (plain vertex reachability).
struct Query {
  int from = 0;
  int to = 0;
  int target_layer = 0;
  std::vector<Endpoint> joint;
};

// ---------------------------------------------------------------------------
// Exact engines
// ---------------------------------------------------------------------------

namespace detail {

constexpr uint64_t kConfigGuard = uint64_t{1} << 24;

inline void check_endpoints(const MultiGraph& g, const Endpoint& start,
                            const std::vector<Endpoint>& targets) {
  check_start(g, start);
  for (const auto& t : targets) check_start(g, t);
}

/// Block-colored layered sampler shared by E2..E5 and the conditioned
/// hybrids: `blocks` receive one red/blue coin each (red probability
/// block_red_prob), `free` edges get two independent presence coins (their
/// own probability per image). The transversal provides the rungs.
struct LayeredInstance {
  std::vector<uint64_t> blocks;
  Rational block_red_prob{1, 2};
  std::vector<int> free_edges;
  std::vector<Rational> free_probs;
};

inline LayeredInstance layered_from_spec(const MultiGraph& g, const ModelSpec& spec) {
  LayeredInstance inst;
  switch (spec.kind) {
    case ModelKind::kE2:
      for (int e = 0; e < g.edge_count(); ++e) inst.free_edges.push_back(e);
      inst.free_probs = spec.edge_probs;
      break;
    case ModelKind::kE3:
      for (int e = 0; e < g.edge_count(); ++e) inst.blocks.push_back(bit(e));
      break;
    case ModelKind::kE4:
      inst.blocks = spec.partition->blocks();
      break;
    case ModelKind::kE5:
      for (int e = 0; e < g.edge_count(); ++e) inst.blocks.push_back(bit(e));
      inst.block_red_prob = spec.p;
      break;
    default:
      throw std::invalid_argument("not a layered model");
  }
  return inst;
}

/// Builds the auxiliary union-find for one configuration: lower copies glued
/// by red/present-below edges, upper copies by blue/present-above edges,
/// rungs at the transversal.
inline void layered_union(const MultiGraph& g, const Transversal& t, const LayeredInstance& inst,
                          uint64_t block_blue, uint64_t free_bits, Dsu& dsu) {
  const int n = g.vertex_count();
  dsu.reset(2 * n);
  for (size_t j = 0; j < inst.blocks.size(); ++j) {
    const int shift = ((block_blue >> j) & 1) ? n : 0;
    uint64_t mask = inst.blocks[j];
    while (mask) {
      int e = std::countr_zero(mask);
      mask &= mask - 1;
      dsu.unite(g.edge(e).a + shift, g.edge(e).b + shift);
    }
  }
  for (size_t i = 0; i < inst.free_edges.size(); ++i) {
    const auto& ed = g.edge(inst.free_edges[i]);
    if ((free_bits >> (2 * i)) & 1) dsu.unite(ed.a, ed.b);
    if ((free_bits >> (2 * i + 1)) & 1) dsu.unite(ed.a + n, ed.b + n);
  }
  for (int v = 0; v < n; ++v)
    if (t.contains(v)) dsu.unite(v, v + n);
}

inline bool dsu_event(Dsu& dsu, int n, const Endpoint& start, const std::vector<Endpoint>& targets) {
  const int root = dsu.find(start.vertex + start.layer * n);
  for (const auto& tg : targets)
    if (dsu.find(tg.vertex + tg.layer * n) != root) return false;
  return true;
}

/// Red/blue weight table by blue count: w[b] = r^(k-b) (1-r)^b.
inline std::vector<Rational> blue_count_weights(const Rational& red_prob, int k) {
  std::vector<Rational> w(k + 1);
  for (int b = 0; b <= k; ++b)
    w[b] = rational_pow(red_prob, static_cast<unsigned>(k - b)) *
           rational_pow(1 - red_prob, static_cast<unsigned>(b));
  return w;
}

inline Rational layered_joint_prob(const MultiGraph& g, const Transversal& t,
                                   const LayeredInstance& inst, const Endpoint& start,
                                   const std::vector<Endpoint>& targets) {
  const int k = static_cast<int>(inst.blocks.size());
  const int f = static_cast<int>(inst.free_edges.size());
  if (k + 2 * f >= 25 || (uint64_t{1} << (k + 2 * f)) > kConfigGuard)
    throw guard_error("layered enumeration exceeds the 2^24 configuration guard");
  const int n = g.vertex_count();
  Dsu dsu(2 * n);

  if (f == 0) {
    std::vector<uint64_t> count_by_blue(k + 1, 0);
    for (uint64_t cm = 0; cm < (uint64_t{1} << k); ++cm) {
      layered_union(g, t, inst, cm, 0, dsu);
      if (dsu_event(dsu, n, start, targets)) ++count_by_blue[std::popcount(cm)];
    }
    std::vector<Rational> w = blue_count_weights(inst.block_red_prob, k);
    Rational sum = 0;
    for (int b = 0; b <= k; ++b)
      if (count_by_blue[b]) sum += Rational(count_by_blue[b]) * w[b];
    return sum;
  }

  // Per-image presence factors for each free edge and 2-bit state.
  std::vector<std::array<Rational, 4>> factor(f);
  for (int i = 0; i < f; ++i) {
    const Rational& pe = inst.free_probs[i];
    factor[i] = {(1 - pe) * (1 - pe), pe * (1 - pe), (1 - pe) * pe, pe * pe};
  }
  std::vector<Rational> wblue = blue_count_weights(inst.block_red_prob, k);

  Rational sum = 0;
  for (uint64_t cm = 0; cm < (uint64_t{1} << k); ++cm) {
    for (uint64_t fm = 0; fm < (uint64_t{1} << (2 * f)); ++fm) {
      layered_union(g, t, inst, cm, fm, dsu);
      if (!dsu_event(dsu, n, start, targets)) continue;
      Rational weight = wblue[std::popcount(cm)];
      for (int i = 0; i < f; ++i) weight *= factor[i][(fm >> (2 * i)) & 3];
      sum += weight;
    }
  }
  return sum;
}

/// Counts, by subset size, the edge subsets of g whose induced subgraph
/// connects the start vertex to every target vertex.
inline std::vector<uint64_t> subset_connection_counts(const MultiGraph& g, int start,
                                                      const std::vector<int>& targets) {
  const int m = g.edge_count();
  if (m >= 25) throw guard_error("subset enumeration exceeds the 2^24 configuration guard");
  std::vector<uint64_t> counts(m + 1, 0);
  Dsu dsu(g.vertex_count());
  for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
    dsu.reset(g.vertex_count());
    uint64_t mm = mask;
    while (mm) {
      int e = std::countr_zero(mm);
      mm &= mm - 1;
      dsu.unite(g.edge(e).a, g.edge(e).b);
    }
    bool ok = true;
    for (int tv : targets)
      if (!dsu.same(start, tv)) {
        ok = false;
        break;
      }
    if (ok) ++counts[std::popcount(mask)];
  }
  return counts;
}

inline Rational binomial_value(const std::vector<uint64_t>& counts, const Rational& p) {
  const int m = static_cast<int>(counts.size()) - 1;
  Rational sum = 0;
  for (int k = 0; k <= m; ++k)
    if (counts[k])
      sum += Rational(counts[k]) * rational_pow(p, static_cast<unsigned>(k)) *
             rational_pow(1 - p, static_cast<unsigned>(m - k));
  return sum;
}

inline UniPoly binomial_poly(const std::vector<uint64_t>& counts) {
  const int m = static_cast<int>(counts.size()) - 1;
  const UniPoly x = UniPoly::variable();
  const UniPoly one_minus_x({Rational(1), Rational(-1)});
  std::vector<UniPoly> xp(m + 1), qp(m + 1);
  xp[0] = qp[0] = UniPoly::constant(1);
  for (int k = 1; k <= m; ++k) {
    xp[k] = xp[k - 1] * x;
    qp[k] = qp[k - 1] * one_minus_x;
  }
  UniPoly sum;
  for (int k = 0; k <= m; ++k)
    if (counts[k]) sum = sum + Rational(counts[k]) * (xp[k] * qp[m - k]);
  return sum;
}

}  // namespace detail

/// Probability that, in one sample of the model, the start endpoint reaches
/// every target endpoint (layers read as travel modes for D2/D3 and ignored
/// for D1). Exact rational, full enumeration.
inline Rational joint_prob(const MultiGraph& g, const ModelSpec& spec, const Endpoint& start,
                           const std::vector<Endpoint>& targets) {
  spec.validate(g);
  detail::check_endpoints(g, start, targets);
  const int m = g.edge_count();

  switch (spec.kind) {
    case ModelKind::kE1: {
      BunkbedGraph bb = build_bunkbed(g);
      std::vector<int> derived_targets;
      for (const auto& tg : targets) derived_targets.push_back(bb.node(tg.vertex, tg.layer));
      auto counts = detail::subset_connection_counts(bb.derived, bb.node(start.vertex, start.layer),
                                                     derived_targets);
      return detail::binomial_value(counts, spec.p);
    }
    case ModelKind::kE2:
    case ModelKind::kE3:
    case ModelKind::kE4:
    case ModelKind::kE5:
      return detail::layered_joint_prob(g, spec.t, detail::layered_from_spec(g, spec), start,
                                        targets);
    case ModelKind::kD1: {
      if (m >= 25) throw guard_error("orientation enumeration exceeds the 2^24 guard");
      uint64_t hits = 0;
      for (uint64_t om = 0; om < (uint64_t{1} << m); ++om) {
        uint64_t reach = directed_reach(g, Orientation{om}, start.vertex);
        bool ok = true;
        for (const auto& tg : targets)
          if (!((reach >> tg.vertex) & 1)) {
            ok = false;
            break;
          }
        if (ok) ++hits;
      }
      return Rational(BigInt(hits), BigInt(1) << m);
    }
    case ModelKind::kD2:
    case ModelKind::kD3: {
      if (m >= 25) throw guard_error("orientation enumeration exceeds the 2^24 guard");
      uint64_t hits = 0;
      for (uint64_t om = 0; om < (uint64_t{1} << m); ++om) {
        ReachSet reach = spec.kind == ModelKind::kD2
                             ? mode_reach(g, spec.t, Orientation{om}, start)
                             : nonreversing_reach(g, spec.t, Orientation{om}, start);
        bool ok = true;
        for (const auto& tg : targets)
          if (!reach.contains(tg)) {
            ok = false;
            break;
          }
        if (ok) ++hits;
      }
      return Rational(BigInt(hits), BigInt(1) << m);
    }
  }
  throw std::logic_error("unreachable model kind");
}

inline Rational exact_prob(const MultiGraph& g, const ModelSpec& spec, const Query& q) {
  std::vector<Endpoint> targets{{q.to, q.target_layer}};
  targets.insert(targets.end(), q.joint.begin(), q.joint.end());
  return joint_prob(g, spec, {q.from, 0}, targets);
}

/// Plain bond percolation on g itself (no second layer): every edge open
/// independently with probability p; returns P(u and v connected). At
/// p = 1/2 this equals the d1 connection probability.
inline Rational percolation_two_point(const MultiGraph& g, const Rational& p, int u, int v) {
  if (p < 0 || p > 1) throw std::invalid_argument("probability out of [0, 1]");
  detail::check_start(g, {u, 0});
  detail::check_start(g, {v, 0});
  return detail::binomial_value(detail::subset_connection_counts(g, u, {v}), p);
}

/// Color tie for conditioning: the colors of the two edges (their blocks for
/// E4) are required equal or different.
struct ColorTie {
  int edge_a = 0;
  int edge_b = 0;
  bool equal = true;
};

/// exact_prob conditioned on color ties; kinds E3, E4, E5 only. Throws
/// std::domain_error when the conditioning event has probability zero.
inline Rational exact_prob_conditional(const MultiGraph& g, const ModelSpec& spec, const Query& q,
                                       const std::vector<ColorTie>& ties) {
  spec.validate(g);
  if (spec.kind != ModelKind::kE3 && spec.kind != ModelKind::kE4 && spec.kind != ModelKind::kE5)
    throw std::invalid_argument("color conditioning needs a colored model (e3, e4, e5)");
  detail::LayeredInstance inst = detail::layered_from_spec(g, spec);
  const int k = static_cast<int>(inst.blocks.size());
  if (k >= 25) throw guard_error("layered enumeration exceeds the 2^24 configuration guard");

  std::vector<int> block_of(g.edge_count());
  for (int j = 0; j < k; ++j)
    for (int e = 0; e < g.edge_count(); ++e)
      if ((inst.blocks[j] >> e) & 1) block_of[e] = j;
  for (const auto& tie : ties)
    if (tie.edge_a < 0 || tie.edge_a >= g.edge_count() || tie.edge_b < 0 ||
        tie.edge_b >= g.edge_count())
      throw std::invalid_argument("color tie edge id out of range");

  const int n = g.vertex_count();
  Dsu dsu(2 * n);
  std::vector<Endpoint> targets{{q.to, q.target_layer}};
  targets.insert(targets.end(), q.joint.begin(), q.joint.end());
  const Endpoint start{q.from, 0};
  detail::check_endpoints(g, start, targets);

  std::vector<Rational> w = detail::blue_count_weights(inst.block_red_prob, k);
  Rational numer = 0, denom = 0;
  for (uint64_t cm = 0; cm < (uint64_t{1} << k); ++cm) {
    bool admissible = true;
    for (const auto& tie : ties) {
      bool same = (((cm >> block_of[tie.edge_a]) ^ (cm >> block_of[tie.edge_b])) & 1) == 0;
      if (same != tie.equal) {
        admissible = false;
        break;
      }
    }
    if (!admissible) continue;
    const Rational& weight = w[std::popcount(cm)];
    denom += weight;
    detail::layered_union(g, spec.t, inst, cm, 0, dsu);
    if (detail::dsu_event(dsu, n, start, targets)) numer += weight;
  }
  if (denom == 0) throw std::domain_error("conditioning event has probability zero");
  return numer / denom;
}

// ---------------------------------------------------------------------------
// Polynomials in p
// ---------------------------------------------------------------------------

/// Connection probability as a polynomial in p, for the models where a
/// single p drives every coin: E1 (presence) and E5 (redness).
inline UniPoly connection_polynomial(const MultiGraph& g, ModelKind kind, const Transversal& t,
                                     const Query& q) {
  std::vector<Endpoint> targets{{q.to, q.target_layer}};
  targets.insert(targets.end(), q.joint.begin(), q.joint.end());
  const Endpoint start{q.from, 0};
  detail::check_endpoints(g, start, targets);

  if (kind == ModelKind::kE1) {
    BunkbedGraph bb = build_bunkbed(g);
    std::vector<int> derived_targets;
    for (const auto& tg : targets) derived_targets.push_back(bb.node(tg.vertex, tg.layer));
    return detail::binomial_poly(detail::subset_connection_counts(
        bb.derived, bb.node(start.vertex, start.layer), derived_targets));
  }
  if (kind != ModelKind::kE5) throw std::invalid_argument("polynomial defined for e1 and e5 only");

  const int m = g.edge_count();
  if (m >= 25) throw guard_error("layered enumeration exceeds the 2^24 configuration guard");
  t.check_against(g);
  detail::LayeredInstance inst;
  for (int e = 0; e < m; ++e) inst.blocks.push_back(bit(e));
  const int n = g.vertex_count();
  Dsu dsu(2 * n);
  std::vector<uint64_t> red_counts(m + 1, 0);  // by red count, matching p = red probability
  for (uint64_t cm = 0; cm < (uint64_t{1} << m); ++cm) {
    detail::layered_union(g, t, inst, cm, 0, dsu);
    if (detail::dsu_event(dsu, n, start, targets)) ++red_counts[m - std::popcount(cm)];
  }
  return detail::binomial_poly(red_counts);
}

// ---------------------------------------------------------------------------
// Averaging over transversals and the critical probability
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<uint64_t> avg_red_counts(const MultiGraph& g, const Query& q) {
  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (n > 16) throw guard_error("transversal averaging limited to 16 vertices");
  if (m >= 25) throw guard_error("layered enumeration exceeds the 2^24 configuration guard");
  std::vector<Endpoint> targets{{q.to, q.target_layer}};
  targets.insert(targets.end(), q.joint.begin(), q.joint.end());
  const Endpoint start{q.from, 0};
  check_endpoints(g, start, targets);

  LayeredInstance inst;
  for (int e = 0; e < m; ++e) inst.blocks.push_back(bit(e));
  Dsu dsu(2 * n);
  std::vector<uint64_t> red_counts(m + 1, 0);  // summed over all transversals
  for (uint64_t tm = 0; tm < (uint64_t{1} << n); ++tm) {
    Transversal t(tm);
    for (uint64_t cm = 0; cm < (uint64_t{1} << m); ++cm) {
      layered_union(g, t, inst, cm, 0, dsu);
      if (dsu_event(dsu, n, start, targets)) ++red_counts[m - std::popcount(cm)];
    }
  }
  return red_counts;
}

}  // namespace detail

/// Average of the E5(p) connection probability over the 2^n transversals,
/// as a polynomial in p.
inline UniPoly avg_poly_over_T(const MultiGraph& g, const Query& q) {
  auto counts = detail::avg_red_counts(g, q);
  return Rational(BigInt(1), BigInt(1) << g.vertex_count()) * detail::binomial_poly(counts);
}

inline Rational avg_prob_over_T(const MultiGraph& g, const Rational& p, const Query& q) {
  auto counts = detail::avg_red_counts(g, q);
  return Rational(BigInt(1), BigInt(1) << g.vertex_count()) * detail::binomial_value(counts, p);
}

/// Difference of the transversal-averaged connection probabilities to the
/// two layers, with every real root in [0,1] isolated to the tolerance.
struct CriticalReport {
  UniPoly same_layer;   // averaged P(u0 -> v0)(p)
  UniPoly other_layer;  // averaged P(u0 -> v1)(p)
  UniPoly difference;
  bool identically_zero = false;
  std::vector<RootInterval> roots;
};

inline CriticalReport critical_probability(const MultiGraph& g, int u, int v, const Rational& tol) {
  CriticalReport report;
  report.same_layer = avg_poly_over_T(g, Query{u, v, 0, {}});
  report.other_layer = avg_poly_over_T(g, Query{u, v, 1, {}});
  report.difference = report.same_layer - report.other_layer;
  report.identically_zero = report.difference.is_zero();
  if (!report.identically_zero)
    report.roots = isolate_roots(report.difference, Rational(0), Rational(1), tol);
  return report;
}

// ---------------------------------------------------------------------------
// Margin
// ---------------------------------------------------------------------------

/// P(start lower -> target lower) - P(start lower -> target upper); the
/// conjectures assert this is never negative. Defined for every kind except
/// D1 (which has no layers).
inline Rational bbc_margin(const MultiGraph& g, const ModelSpec& spec, int u, int v) {
  if (spec.kind == ModelKind::kD1)
    throw std::invalid_argument("margin undefined for d1 (no layers)");
  return exact_prob(g, spec, Query{u, v, 0, {}}) - exact_prob(g, spec, Query{u, v, 1, {}});
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Buffered bit stream over mt19937_64 so samples consume exactly the bits
/// they need, independent of platform distributions.
class BitSource {
 public:
  explicit BitSource(uint64_t seed) : eng_(seed) {}
  int next_bit() {
    if (avail_ == 0) {
      buf_ = eng_();
      avail_ = 64;
    }
    int b = static_cast<int>(buf_ & 1);
    buf_ >>= 1;
    --avail_;
    return b;
  }
  uint64_t next_bits(int k) {
    uint64_t out = 0;
    for (int i = 0; i < k; ++i) out |= static_cast<uint64_t>(next_bit()) << i;
    return out;
  }

 private:
  std::mt19937_64 eng_;
  uint64_t buf_ = 0;
  int avail_ = 0;
};

/// Exact Bernoulli(p) for any rational p: lazily compare a uniform bit
/// stream against the binary expansion of p; the first differing bit
/// decides. Expected two bits per draw.
inline bool bernoulli_exact(BitSource& src, const Rational& p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  BigInt num = boost::multiprecision::numerator(p);
  const BigInt& den = boost::multiprecision::denominator(p);
  while (true) {
    num <<= 1;
    int digit = 0;
    if (num >= den) {
      digit = 1;
      num -= den;
    }
    int u = src.next_bit();
    if (u != digit) return u < digit;
    if (num == 0) return false;
  }
}

}  // namespace detail

struct McResult {
  Rational estimate;
  double std_error = 0.0;
  uint64_t hits = 0;
  uint64_t samples = 0;
};

/// Fixed-seed Monte Carlo estimate of exact_prob. Samples are drawn in
/// blocks of 4096 with per-block seeding, so the result depends only on
/// (instance, spec, query, samples, seed), not on the worker count.
inline McResult mc_estimate(const MultiGraph& g, const ModelSpec& spec, const Query& q,
                            uint64_t samples, uint64_t seed, int jobs = 1) {
  spec.validate(g);
  if (samples == 0) throw std::invalid_argument("sample count must be positive");
  std::vector<Endpoint> targets{{q.to, q.target_layer}};
  targets.insert(targets.end(), q.joint.begin(), q.joint.end());
  const Endpoint start{q.from, 0};
  detail::check_endpoints(g, start, targets);

  const int n = g.vertex_count();
  const int m = g.edge_count();
  if (spec.kind == ModelKind::kD3 && m > 12)
    throw guard_error("non-reversing walks limited to 12 edges");

  std::optional<BunkbedGraph> bb;
  if (spec.kind == ModelKind::kE1) bb = build_bunkbed(g);
  detail::LayeredInstance layered;
  if (spec.kind == ModelKind::kE2 || spec.kind == ModelKind::kE3 ||
      spec.kind == ModelKind::kE4 || spec.kind == ModelKind::kE5)
    layered = detail::layered_from_spec(g, spec);
  const int k = static_cast<int>(layered.blocks.size());

  auto run_one = [&](detail::BitSource& src, Dsu& dsu) -> bool {
    switch (spec.kind) {
      case ModelKind::kE1: {
        dsu.reset(2 * n);
        for (int id = 0; id < bb->derived.edge_count(); ++id)
          if (detail::bernoulli_exact(src, spec.p))
            dsu.unite(bb->derived.edge(id).a, bb->derived.edge(id).b);
        int root = dsu.find(bb->node(start.vertex, start.layer));
        for (const auto& tg : targets)
          if (dsu.find(bb->node(tg.vertex, tg.layer)) != root) return false;
        return true;
      }
      case ModelKind::kE2: {
        uint64_t free_bits = 0;
        for (size_t i = 0; i < layered.free_edges.size(); ++i) {
          if (detail::bernoulli_exact(src, layered.free_probs[i])) free_bits |= bit(2 * i);
          if (detail::bernoulli_exact(src, layered.free_probs[i])) free_bits |= bit(2 * i + 1);
        }
        detail::layered_union(g, spec.t, layered, 0, free_bits, dsu);
        return detail::dsu_event(dsu, n, start, targets);
      }
      case ModelKind::kE3:
      case ModelKind::kE4: {
        uint64_t cm = src.next_bits(k);
        detail::layered_union(g, spec.t, layered, cm, 0, dsu);
        return detail::dsu_event(dsu, n, start, targets);
      }
      case ModelKind::kE5: {
        uint64_t cm = 0;
        for (int j = 0; j < k; ++j)
          if (!detail::bernoulli_exact(src, spec.p)) cm |= bit(j);  // bit = blue
        detail::layered_union(g, spec.t, layered, cm, 0, dsu);
        return detail::dsu_event(dsu, n, start, targets);
      }
      case ModelKind::kD1: {
        uint64_t reach = directed_reach(g, Orientation{src.next_bits(m)}, start.vertex);
        for (const auto& tg : targets)
          if (!((reach >> tg.vertex) & 1)) return false;
        return true;
      }
      case ModelKind::kD2:
      case ModelKind::kD3: {
        Orientation o{src.next_bits(m)};
        ReachSet reach = spec.kind == ModelKind::kD2 ? mode_reach(g, spec.t, o, start)
                                                     : nonreversing_reach(g, spec.t, o, start);
        for (const auto& tg : targets)
          if (!reach.contains(tg)) return false;
        return true;
      }
    }
    return false;
  };

  constexpr uint64_t kBlock = 4096;
  const uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<uint64_t> block_hits(blocks, 0);
  auto run_block = [&](uint64_t bi) {
    detail::BitSource src(detail::splitmix64(seed ^ (bi * 0x9e3779b97f4a7c15ull + 1)));
    Dsu dsu(2 * n);
    const uint64_t lo = bi * kBlock;
    const uint64_t hi = std::min(samples, lo + kBlock);
    uint64_t h = 0;
    for (uint64_t s = lo; s < hi; ++s)
      if (run_one(src, dsu)) ++h;
    block_hits[bi] = h;
  };

  if (jobs <= 1 || blocks <= 1) {
    for (uint64_t bi = 0; bi < blocks; ++bi) run_block(bi);
  } else {
    std::vector<std::thread> pool;
    std::atomic<uint64_t> next{0};
    const int workers = static_cast<int>(std::min<uint64_t>(jobs, blocks));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (uint64_t bi = next.fetch_add(1); bi < blocks; bi = next.fetch_add(1)) run_block(bi);
      });
    for (auto& th : pool) th.join();
  }

  McResult out;
  for (uint64_t h : block_hits) out.hits += h;
  out.samples = samples;
  out.estimate = Rational(BigInt(out.hits), BigInt(samples));
  const double phat = to_double(out.estimate);
  out.std_error = std::sqrt(std::max(0.0, phat * (1.0 - phat)) / static_cast<double>(samples));
  return out;
}

}  // namespace bunkbed
