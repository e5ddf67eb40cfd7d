// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Every numeric claim is checked in exact rational arithmetic except the
// stated 1e-9 interval tolerances and the Monte Carlo error bars.

#include <bunkbed/lemmas.hpp>
#include <bunkbed/search.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace bunkbed;

const Rational kTol(1, 1000000000);
const std::vector<Rational> kGrid{{1, 4}, {1, 2}, {3, 4}};

struct failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw failure(what);
}

MultiGraph path_graph(int edges) {
  std::vector<MultiGraph::Edge> list;
  for (int i = 0; i < edges; ++i) list.push_back({i, i + 1});
  return MultiGraph(edges + 1, std::move(list));
}

std::vector<MultiGraph> small_connected_corpus() {
  InstanceFilter filter;
  filter.max_vertices = 4;
  return enumerate_graphs(filter);
}

bool run_criterion(int id, const std::string& label, double budget_seconds,
                   const std::function<std::string()>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail, error;
  try {
    detail = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", elapsed);
  if (error.empty() && budget_seconds > 0 && elapsed > budget_seconds) {
    char budget[32];
    std::snprintf(budget, sizeof budget, "%.0fs", budget_seconds);
    error = std::string("finished in ") + timing + ", over the " + budget + " budget";
  }
  if (error.empty()) {
    std::cout << "PASS criterion " << id << ": " << label << " (" << detail << "; " << timing
              << ")" << std::endl;
    return true;
  }
  std::cout << "FAIL criterion " << id << ": " << label << ": " << error << std::endl;
  return false;
}

std::string criterion_single_edge_crossing() {
  const CriticalReport report = critical_probability(path_graph(1), 0, 1, kTol);
  require(!report.identically_zero, "layer curves collapsed to the same polynomial");
  require(report.roots.size() == 1,
          "expected a unique crossing, found " + std::to_string(report.roots.size()));
  const RootInterval& root = report.roots[0];
  require(root.lo <= Rational(1, 3) && Rational(1, 3) <= root.hi,
          "isolating interval misses 1/3: [" + to_fraction_string(root.lo) + ", " +
              to_fraction_string(root.hi) + "]");
  require(root.width() <= kTol, "isolating interval wider than 1e-9");
  require(root.sign_left == -1 && root.sign_right == 1, "sign pattern around the root is not -/+");
  return "unique root, interval contains 1/3, width <= 1e-9, signs -/+";
}

std::string criterion_two_edge_crossing() {
  const CriticalReport report = critical_probability(path_graph(2), 0, 2, kTol);
  require(report.roots.size() == 1,
          "expected a unique crossing, found " + std::to_string(report.roots.size()));
  const double target = std::sqrt(11.0 / 12.0) - 0.5;
  const double got = report.roots[0].approx();
  require(std::abs(got - target) < 1e-9,
          "root " + std::to_string(got) + " is not within 1e-9 of sqrt(11/12) - 1/2");
  char buf[80];
  std::snprintf(buf, sizeof buf, "root %.10f within 1e-9 of sqrt(11/12) - 1/2", got);
  return buf;
}

std::string criterion_path_monotonicity() {
  std::vector<RootInterval> roots;
  for (int k = 1; k <= 6; ++k) {
    const CriticalReport report = critical_probability(path_graph(k), 0, k, kTol);
    require(report.roots.size() == 1, "path with " + std::to_string(k) +
                                          " edges: expected a unique root, found " +
                                          std::to_string(report.roots.size()));
    roots.push_back(report.roots[0]);
  }
  for (size_t i = 0; i + 1 < roots.size(); ++i)
    require(roots[i].hi < roots[i + 1].lo,
            "roots of the paths with " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                " edges fail to increase strictly");
  for (size_t i = 0; i < roots.size(); ++i)
    require(roots[i].hi < Rational(1, 2),
            "root of the path with " + std::to_string(i + 1) + " edges is not below 1/2");
  char buf[80];
  std::snprintf(buf, sizeof buf, "six roots %.4f .. %.4f strictly increasing, all < 1/2",
                roots.front().approx(), roots.back().approx());
  return buf;
}

std::string criterion_reconstruction() {
  const std::vector<Figure2Match> matches = find_figure2();
  require(!matches.empty(), "no four-vertex five-edge instance matched");
  for (const Figure2Match& match : matches) {
    require(match.graph.vertex_count() == 4 && match.graph.edge_count() == 5,
            "match is not a four-vertex five-edge graph");
    const Transversal t = Transversal::of({match.u, match.v});
    const ModelSpec walk = ModelSpec::d3(t);
    const ModelSpec coloring = ModelSpec::e3(t);
    for (int layer : {0, 1}) {
      const Query q{match.u, match.v, layer, {}};
      require(exact_prob(match.graph, walk, q) == Rational(13, 16),
              "walk probability in layer " + std::to_string(layer) + " is not 13/16");
      require(exact_prob(match.graph, coloring, q) == Rational(7, 8),
              "coloring probability in layer " + std::to_string(layer) + " is not 7/8");
    }
  }
  return std::to_string(matches.size()) +
         " marked instances, walk 13/16 and coloring 7/8 in both layers";
}

std::string criterion_percolation_orientation() {
  std::vector<MultiGraph> corpus = small_connected_corpus();
  // Five-vertex samples with at most eight edges: wheel, K_{2,3}, bull.
  corpus.push_back(MultiGraph::from_pairs(
      5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}}));
  corpus.push_back(MultiGraph::from_pairs(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}}));
  corpus.push_back(MultiGraph::from_pairs(5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {1, 4}}));
  const ModelSpec d1 = ModelSpec::d1();
  uint64_t pairs = 0;
  for (const MultiGraph& g : corpus)
    for (int u = 0; u < g.vertex_count(); ++u)
      for (int v = 0; v < g.vertex_count(); ++v) {
        if (u == v) continue;
        const Rational perc = percolation_two_point(g, Rational(1, 2), u, v);
        const Rational orient = exact_prob(g, d1, Query{u, v, 0, {}});
        require(perc == orient,
                instance_label(g, Transversal{}, u, v) + ": percolation " +
                    to_fraction_string(perc) + " != orientation " + to_fraction_string(orient));
        ++pairs;
      }
  return std::to_string(corpus.size()) + " graphs, " + std::to_string(pairs) +
         " ordered pairs agree exactly";
}

std::string criterion_switching_walks() {
  uint64_t checks = 0;
  for (const MultiGraph& g : small_connected_corpus()) {
    LemmaCheck chk;
    check_switching_walk_margins(g, chk);
    check_reversal_pairing(g, chk);
    require(chk.ok(), chk.first_failure);
    checks += chk.checks;
  }
  return std::to_string(checks) + " margin and pairing identities hold exactly";
}

std::string criterion_cutset_and_small_transversals() {
  uint64_t checks = 0;
  for (const MultiGraph& g : small_connected_corpus()) {
    LemmaCheck chk;
    check_coloring_cutset_equality(g, kGrid, chk);
    check_small_transversal_margins(g, kGrid, chk);
    require(chk.ok(), chk.first_failure);
    checks += chk.checks;
  }
  return std::to_string(checks) + " equality and sign identities hold exactly";
}

std::string criterion_reduction_soundness() {
  std::vector<MultiGraph> corpus = small_connected_corpus();
  // Handcrafted multigraphs so parallel-edge sites actually occur.
  corpus.push_back(MultiGraph::from_pairs(2, {{0, 1}, {0, 1}}));
  corpus.push_back(MultiGraph::from_pairs(2, {{0, 1}, {0, 1}, {0, 1}}));
  corpus.push_back(MultiGraph::from_pairs(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}));
  corpus.push_back(MultiGraph::from_pairs(3, {{0, 1}, {0, 1}, {1, 2}}));
  corpus.push_back(MultiGraph::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}, {0, 2}}));
  corpus.push_back(MultiGraph::from_pairs(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}}));
  corpus.push_back(MultiGraph::from_pairs(3, {{0, 1}, {0, 1}, {0, 2}, {0, 2}}));
  corpus.push_back(MultiGraph::from_pairs(4, {{0, 1}, {1, 2}, {1, 2}, {2, 3}}));
  corpus.push_back(MultiGraph::from_pairs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}}));
  corpus.push_back(MultiGraph::from_pairs(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {2, 3}}));
  uint64_t checks = 0;
  for (const MultiGraph& g : corpus) {
    LemmaCheck chk;
    check_reduction_soundness(g, chk);
    check_conditioning_soundness(g, kGrid, chk);
    require(chk.ok(), chk.first_failure);
    checks += chk.checks;
  }
  ReductionStep corrupted =
      v2_reduce(Triple::with_singletons(path_graph(2), Transversal{}, 0, 2), 1);
  corrupted.children[1].weight += Rational(1, 100);
  require(!verify_reduction(corrupted).ok, "corrupted reduction weight went undetected");
  return std::to_string(checks) + " sites verified exactly, corrupted weight rejected";
}

std::string criterion_outerplanar_sweep() {
  ScanOptions opt;
  opt.kind = ModelKind::kE3;
  InstanceFilter filter;
  filter.max_vertices = 6;
  filter.max_edges = 8;
  filter.outerplanar_only = true;
  const ScanReport report = scan_conjecture(opt, filter);
  require(report.total_margins > 0, "sweep produced no margins");
  require(report.violations.empty(),
          std::to_string(report.violations.size()) + " instances with a negative margin, min " +
              to_fraction_string(report.min_margin));
  require(report.min_margin >= 0,
          "negative minimum margin " + to_fraction_string(report.min_margin));
  return std::to_string(report.total_instances) + " instances, " +
         std::to_string(report.total_margins) + " margins, min " +
         to_fraction_string(report.min_margin);
}

std::string criterion_forced_different_colors() {
  const MultiGraph g = path_graph(2);
  const ModelSpec spec = ModelSpec::e3(Transversal::of({1}));
  const std::vector<ColorTie> forced{{0, 1, false}};
  const Rational same = exact_prob_conditional(g, spec, Query{0, 2, 0, {}}, forced);
  const Rational other = exact_prob_conditional(g, spec, Query{0, 2, 1, {}}, forced);
  require(same == 0, "same-layer probability is " + to_fraction_string(same) + ", expected 0");
  require(other == Rational(1, 2),
          "other-layer probability is " + to_fraction_string(other) + ", expected 1/2");
  return "forced-different colors give exactly 0 versus 1/2";
}

std::string criterion_monte_carlo() {
  struct McCase {
    MultiGraph g;
    ModelSpec spec;
    Query q;
    uint64_t seed;
  };
  const MultiGraph path2 = path_graph(2);
  const MultiGraph path3 = path_graph(3);
  const MultiGraph triangle = MultiGraph::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
  const MultiGraph square = MultiGraph::from_pairs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const MultiGraph published =
      MultiGraph::from_pairs(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const MultiGraph k4 =
      MultiGraph::from_pairs(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const Transversal marked = Transversal::of({0, 1});
  const std::vector<McCase> cases{
      {path2, ModelSpec::e3(Transversal::of({1})), {0, 2, 0, {}}, 101},
      {path2, ModelSpec::e3(Transversal::of({1})), {0, 2, 1, {}}, 202},
      {triangle, ModelSpec::e1({1, 2}), {0, 1, 0, {}}, 303},
      {published, ModelSpec::d3(marked), {0, 1, 0, {}}, 404},
      {published, ModelSpec::e3(marked), {0, 1, 1, {}}, 505},
      {k4, ModelSpec::e2({{1, 4}, {1, 2}, {3, 4}, {1, 4}, {1, 2}, {3, 4}}, Transversal::of({0})),
       {0, 3, 0, {}},
       606},
      {triangle, ModelSpec::e4(Transversal::of({0}), EdgePartition(triangle, {{0, 1}, {2}})),
       {0, 2, 1, {}},
       707},
      {path3, ModelSpec::e5({1, 3}, Transversal::of({1})), {0, 3, 0, {}}, 808},
      {square, ModelSpec::d2(Transversal::of({0, 2})), {0, 2, 0, {}}, 909},
      {path_graph(1), ModelSpec::d1(), {0, 1, 0, {}}, 1010},
  };
  constexpr uint64_t kSamples = 100000;
  for (size_t i = 0; i < cases.size(); ++i) {
    const McCase& c = cases[i];
    const std::string label = "instance " + std::to_string(i + 1);
    const Rational exact = exact_prob(c.g, c.spec, c.q);
    const McResult first = mc_estimate(c.g, c.spec, c.q, kSamples, c.seed);
    const McResult again = mc_estimate(c.g, c.spec, c.q, kSamples, c.seed);
    require(first.estimate == again.estimate && first.hits == again.hits &&
                first.samples == again.samples &&
                std::memcmp(&first.std_error, &again.std_error, sizeof(double)) == 0,
            label + ": rerun with the same seed differs");
    if (first.std_error == 0) {
      require(first.estimate == exact, label + ": zero-variance estimate misses the exact value");
    } else {
      const double err = std::abs(to_double(first.estimate - exact));
      require(err <= 5 * first.std_error,
              label + ": estimate off by " + std::to_string(err) + " with standard error " +
                  std::to_string(first.std_error));
    }
  }
  return std::to_string(cases.size()) +
         " fixed-seed instances within five standard errors, reruns byte-identical";
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    double budget_seconds;
    std::string (*body)();
  };
  const std::vector<Entry> entries{
      {1, "single-edge path crossing is exactly 1/3", 1, criterion_single_edge_crossing},
      {2, "two-edge path crossing matches sqrt(11/12) - 1/2", 1, criterion_two_edge_crossing},
      {3, "path crossings increase strictly and stay below 1/2", 60,
       criterion_path_monotonicity},
      {4, "four-vertex five-edge reconstruction gives 13/16 versus 7/8", 60,
       criterion_reconstruction},
      {5, "half-probability percolation equals uniform orientation", 300,
       criterion_percolation_orientation},
      {6, "switching-walk margins nonnegative with reversal pairing", 600,
       criterion_switching_walks},
      {7, "coloring margins vanish on cuts, small transversals nonnegative", 600,
       criterion_cutset_and_small_transversals},
      {8, "every reduction site verifies exactly and corruption is caught", 600,
       criterion_reduction_soundness},
      {9, "outerplanar sweep has no negative coloring margin", 1800,
       criterion_outerplanar_sweep},
      {10, "forced-different colors give 0 versus 1/2", 0, criterion_forced_different_colors},
      {11, "fixed-seed Monte Carlo stays within five standard errors", 0,
       criterion_monte_carlo},
  };
  int failed = 0;
  for (const Entry& entry : entries)
    if (!run_criterion(entry.id, entry.label, entry.budget_seconds, entry.body)) ++failed;
  std::cout << "acceptance: " << (entries.size() - failed) << " passed, " << failed << " failed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
