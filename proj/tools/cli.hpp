#pragma once

#include <chrono>
#include <cstdio>
#include <exception>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <bunkbed/graph_io.hpp>
#include <bunkbed/lemmas.hpp>
#include <bunkbed/models.hpp>
#include <bunkbed/reductions.hpp>
#include <bunkbed/search.hpp>

#include "CLI11.hpp"
#include "json.hpp"

namespace bunkbed::cli {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

inline std::string decimal_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string value_string(const Rational& r, bool decimal) {
  std::string s = to_fraction_string(r);
  if (decimal) s += " (" + decimal_string(to_double(r)) + ")";
  return s;
}

inline std::string poly_string(const UniPoly& poly) {
  if (poly.is_zero()) return "0";
  std::string s;
  for (int k = 0; k <= poly.degree(); ++k) {
    const Rational c = poly.coefficient(k);
    if (c == 0) continue;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (s.empty())
      s += negative ? "-" : "";
    else
      s += negative ? " - " : " + ";
    const bool unit = mag == 1 && k > 0;
    if (!unit) s += to_fraction_string(mag);
    if (k == 1)
      s += unit ? "p" : " p";
    else if (k > 1)
      s += (unit ? "p^" : " p^") + std::to_string(k);
  }
  return s;
}

inline Json poly_json(const UniPoly& poly) {
  Json coeffs = Json::array();
  for (const Rational& c : poly.coefficients()) coeffs.push_back(to_fraction_string(c));
  return Json{{"degree", poly.degree()}, {"coefficients", std::move(coeffs)}};
}

inline std::string edges_string(const MultiGraph& g) {
  std::string s;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (e) s += ",";
    s += std::to_string(g.edge(e).a) + "-" + std::to_string(g.edge(e).b);
  }
  return s;
}

inline Json edges_json(const MultiGraph& g) {
  Json arr = Json::array();
  for (int e = 0; e < g.edge_count(); ++e) arr.push_back({g.edge(e).a, g.edge(e).b});
  return arr;
}

inline std::string transversal_string(const Transversal& t, int n) {
  std::string s = "{";
  bool first = true;
  for (int v = 0; v < n; ++v)
    if (t.contains(v)) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(v);
    }
  return s + "}";
}

inline Json transversal_json(const Transversal& t, int n) {
  Json arr = Json::array();
  for (int v = 0; v < n; ++v)
    if (t.contains(v)) arr.push_back(v);
  return arr;
}

inline Json partition_json(const EdgePartition& part, int m) {
  Json arr = Json::array();
  for (int b = 0; b < part.block_count(); ++b) {
    Json block = Json::array();
    for (int e = 0; e < m; ++e)
      if ((part.block_mask(b) >> e) & 1) block.push_back(e);
    arr.push_back(std::move(block));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Flag plumbing
// ---------------------------------------------------------------------------

struct CommonFlags {
  std::string format = "text";
  bool decimal = false;
  bool timing = false;
  int jobs = 1;
};

inline void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_flag("--decimal", flags.decimal, "append decimal approximations");
  cmd->add_flag("--timing", flags.timing, "report elapsed wall time on stderr");
  cmd->add_option("--jobs", flags.jobs, "worker thread count")->check(CLI::PositiveNumber);
}

inline std::vector<Rational> parse_grid(const std::string& csv) {
  std::vector<Rational> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(parse_rational(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stoi(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline std::vector<Rational> edge_probabilities(const MultiGraph& g, const std::string& p_str,
                                                const std::string& grid_str) {
  if (!grid_str.empty()) {
    const std::vector<Rational> grid = parse_grid(grid_str);
    std::vector<Rational> probs(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) probs[e] = grid[e % grid.size()];
    return probs;
  }
  return std::vector<Rational>(g.edge_count(), parse_rational(p_str));
}

inline ModelSpec build_spec(ModelKind kind, const Instance& inst, const std::string& p_str,
                            const std::string& grid_str) {
  switch (kind) {
    case ModelKind::kE1:
      return ModelSpec::e1(parse_rational(p_str));
    case ModelKind::kE2:
      return ModelSpec::e2(edge_probabilities(inst.graph, p_str, grid_str), inst.transversal);
    case ModelKind::kE3:
      return ModelSpec::e3(inst.transversal);
    case ModelKind::kE4:
      return ModelSpec::e4(inst.transversal,
                           inst.partition.value_or(EdgePartition::singletons(inst.graph)));
    case ModelKind::kE5:
      return ModelSpec::e5(parse_rational(p_str), inst.transversal);
    case ModelKind::kD1:
      return ModelSpec::d1();
    case ModelKind::kD2:
      return ModelSpec::d2(inst.transversal);
    case ModelKind::kD3:
      return ModelSpec::d3(inst.transversal);
  }
  throw std::invalid_argument("unknown model kind");
}

// ---------------------------------------------------------------------------
// Subcommand state
// ---------------------------------------------------------------------------

struct ComputeArgs {
  CommonFlags common;
  std::string model, graph, from, to, p = "1/2", p_grid;
  int layer = 0;
  std::vector<std::string> tie_equal, tie_different;
};

struct PolyArgs {
  CommonFlags common;
  std::string model, graph, from, to, p_grid;
  int layer = 0;
};

struct CriticalArgs {
  CommonFlags common;
  std::string graph, from, to, tol = "1e-9";
};

struct AverageArgs {
  CommonFlags common;
  std::string graph, from, to, p;
  int layer = 0;
};

struct EstimateArgs {
  CommonFlags common;
  std::string model, graph, from, to, p = "1/2", p_grid;
  int layer = 0;
  uint64_t samples = 100000;
  uint64_t seed = 1;
};

struct VerifyArgs {
  CommonFlags common;
  int max_n = 4;
  bool with_figure2 = false;
  bool with_negative_control = false;
};

struct ReduceArgs {
  CommonFlags common;
  std::string graph, op, from, to, p = "1/2", p_grid, edges;
  int edge = -1;
  int vertex = -1;
};

struct ScanArgs {
  CommonFlags common;
  std::string model = "e3", p = "1/2", p_grid;
  int max_n = 0;
  int max_m = -1;
  int max_t = -1;
  bool multigraph = false;
  bool outerplanar = false;
  bool disconnected = false;
  bool anti_correlated = false;
};

struct FigureArgs {
  CommonFlags common;
};

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

inline int run_compute(const ComputeArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const ModelKind kind = parse_model_kind(a.model);
  const ModelSpec spec = build_spec(kind, inst, a.p, a.p_grid);
  const Query q{inst.lookup(a.from), inst.lookup(a.to), a.layer, {}};

  std::vector<ColorTie> ties;
  for (const std::string& s : a.tie_equal) {
    const std::vector<int> ids = parse_int_list(s);
    if (ids.size() != 2) throw std::invalid_argument("a tie names exactly two edges");
    ties.push_back({ids[0], ids[1], true});
  }
  for (const std::string& s : a.tie_different) {
    const std::vector<int> ids = parse_int_list(s);
    if (ids.size() != 2) throw std::invalid_argument("a tie names exactly two edges");
    ties.push_back({ids[0], ids[1], false});
  }

  const Rational value =
      ties.empty() ? exact_prob(inst.graph, spec, q) : exact_prob_conditional(inst.graph, spec, q, ties);
  if (a.common.format == "json") {
    Json j{{"schema", 1},
           {"command", "compute"},
           {"model", model_kind_name(kind)},
           {"from", a.from},
           {"to", a.to},
           {"layer", a.layer},
           {"value", to_fraction_string(value)}};
    if (a.common.decimal) j["decimal"] = to_double(value);
    out << j.dump(2) << "\n";
  } else {
    out << value_string(value, a.common.decimal) << "\n";
  }
  return 0;
}

inline int run_poly(const PolyArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const ModelKind kind = parse_model_kind(a.model);
  const Query q{inst.lookup(a.from), inst.lookup(a.to), a.layer, {}};
  const UniPoly poly = connection_polynomial(inst.graph, kind, inst.transversal, q);
  if (a.common.format == "json") {
    Json j{{"schema", 1}, {"command", "poly"}, {"model", model_kind_name(kind)},
           {"from", a.from}, {"to", a.to},     {"layer", a.layer},
           {"poly", poly_json(poly)}};
    out << j.dump(2) << "\n";
  } else {
    out << poly_string(poly) << "\n";
  }
  return 0;
}

inline int run_critical(const CriticalArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const CriticalReport report =
      critical_probability(inst.graph, inst.lookup(a.from), inst.lookup(a.to), parse_rational(a.tol));
  if (a.common.format == "json") {
    Json roots = Json::array();
    for (const RootInterval& r : report.roots) {
      Json root{{"lo", to_fraction_string(r.lo)},
                {"hi", to_fraction_string(r.hi)},
                {"exact", r.exact},
                {"sign_left", r.sign_left},
                {"sign_right", r.sign_right}};
      if (a.common.decimal) root["approx"] = r.approx();
      roots.push_back(std::move(root));
    }
    Json j{{"schema", 1},
           {"command", "critical"},
           {"same_layer", poly_json(report.same_layer)},
           {"other_layer", poly_json(report.other_layer)},
           {"difference", poly_json(report.difference)},
           {"identically_zero", report.identically_zero},
           {"roots", std::move(roots)}};
    out << j.dump(2) << "\n";
  } else {
    out << "same-layer:  " << poly_string(report.same_layer) << "\n";
    out << "other-layer: " << poly_string(report.other_layer) << "\n";
    out << "difference:  " << poly_string(report.difference) << "\n";
    if (report.identically_zero) {
      out << "difference is identically zero; no crossing\n";
      return 0;
    }
    out << "roots in [0,1]: " << report.roots.size() << "\n";
    auto sign_char = [](int s) { return s < 0 ? '-' : (s > 0 ? '+' : '0'); };
    for (size_t i = 0; i < report.roots.size(); ++i) {
      const RootInterval& r = report.roots[i];
      out << "root " << i + 1 << ": ";
      if (r.exact)
        out << "= " << to_fraction_string(r.lo);
      else
        out << "in [" << to_fraction_string(r.lo) << ", " << to_fraction_string(r.hi) << "]";
      if (a.common.decimal) out << " (" << decimal_string(r.approx()) << ")";
      out << ", sign " << sign_char(r.sign_left) << " -> " << sign_char(r.sign_right) << "\n";
    }
  }
  return 0;
}

inline int run_average(const AverageArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const Query q{inst.lookup(a.from), inst.lookup(a.to), a.layer, {}};
  if (a.p.empty()) {
    const UniPoly poly = avg_poly_over_T(inst.graph, q);
    if (a.common.format == "json") {
      Json j{{"schema", 1}, {"command", "average"}, {"from", a.from},
             {"to", a.to},  {"layer", a.layer},     {"poly", poly_json(poly)}};
      out << j.dump(2) << "\n";
    } else {
      out << poly_string(poly) << "\n";
    }
    return 0;
  }
  const Rational value = avg_prob_over_T(inst.graph, parse_rational(a.p), q);
  if (a.common.format == "json") {
    Json j{{"schema", 1}, {"command", "average"}, {"from", a.from},
           {"to", a.to},  {"layer", a.layer},     {"p", a.p},
           {"value", to_fraction_string(value)}};
    if (a.common.decimal) j["decimal"] = to_double(value);
    out << j.dump(2) << "\n";
  } else {
    out << value_string(value, a.common.decimal) << "\n";
  }
  return 0;
}

inline int run_estimate(const EstimateArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const ModelKind kind = parse_model_kind(a.model);
  const ModelSpec spec = build_spec(kind, inst, a.p, a.p_grid);
  const Query q{inst.lookup(a.from), inst.lookup(a.to), a.layer, {}};
  const McResult result = mc_estimate(inst.graph, spec, q, a.samples, a.seed, a.common.jobs);
  if (a.common.format == "json") {
    Json j{{"schema", 1},
           {"command", "estimate"},
           {"model", model_kind_name(kind)},
           {"seed", a.seed},
           {"samples", result.samples},
           {"hits", result.hits},
           {"estimate", to_fraction_string(result.estimate)},
           {"estimate_decimal", to_double(result.estimate)},
           {"std_error", result.std_error}};
    out << j.dump(2) << "\n";
  } else {
    out << "hits: " << result.hits << "/" << result.samples << "\n";
    out << "estimate: " << to_fraction_string(result.estimate) << " ("
        << decimal_string(to_double(result.estimate)) << ")\n";
    out << "std-error: " << decimal_string(result.std_error) << "\n";
  }
  return 0;
}

inline int run_verify(const VerifyArgs& a, std::ostream& out) {
  LemmaSuiteOptions opt;
  opt.max_n = a.max_n;
  opt.with_figure2 = a.with_figure2;
  opt.with_negative_control = a.with_negative_control;
  opt.jobs = a.common.jobs;
  const std::vector<LemmaRow> rows = run_lemma_suite(opt);
  uint64_t checks = 0, failed = 0;
  for (const LemmaRow& r : rows) {
    checks += r.checks;
    if (!r.pass) ++failed;
  }
  if (a.common.format == "json") {
    Json jrows = Json::array();
    for (const LemmaRow& r : rows)
      jrows.push_back(
          Json{{"name", r.name}, {"pass", r.pass}, {"checks", r.checks}, {"detail", r.detail}});
    Json j{{"schema", 1},       {"command", "verify-lemmas"}, {"max_n", a.max_n},
           {"rows", jrows},     {"total_checks", checks},     {"failed_rows", failed}};
    out << j.dump(2) << "\n";
  } else {
    for (const LemmaRow& r : rows) {
      out << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.checks << " checks)";
      if (!r.detail.empty()) out << ": " << r.detail;
      out << "\n";
    }
    out << "summary: " << rows.size() - failed << " passed, " << failed << " failed, " << checks
        << " checks\n";
  }
  return failed == 0 ? 0 : 1;
}

inline std::string triple_string(const Triple& t) {
  std::string s = "n=" + std::to_string(t.g.vertex_count()) + " edges=" + edges_string(t.g) +
                  " T=" + transversal_string(t.t, t.g.vertex_count()) + " u=" + std::to_string(t.u) +
                  " v=" + std::to_string(t.v);
  if (!t.partition.all_singletons()) {
    s += " blocks=";
    for (int b = 0; b < t.partition.block_count(); ++b) {
      if (b) s += "|";
      bool first = true;
      for (int e = 0; e < t.g.edge_count(); ++e)
        if ((t.partition.block_mask(b) >> e) & 1) {
          if (!first) s += ",";
          first = false;
          s += std::to_string(e);
        }
    }
  }
  return s;
}

inline Json triple_json(const Triple& t) {
  return Json{{"n", t.g.vertex_count()},
              {"edges", edges_json(t.g)},
              {"t", transversal_json(t.t, t.g.vertex_count())},
              {"u", t.u},
              {"v", t.v},
              {"partition", partition_json(t.partition, t.g.edge_count())}};
}

inline int run_reduce(const ReduceArgs& a, std::ostream& out) {
  const Instance inst = parse_instance_file(a.graph);
  const int u = inst.lookup(a.from), v = inst.lookup(a.to);

  if (a.op == "e2-condition") {
    if (a.edge < 0) throw std::invalid_argument("e2-condition needs --edge");
    const HybridTriple parent = hybrid_from_probs(
        inst.graph, edge_probabilities(inst.graph, a.p, a.p_grid), inst.transversal, u, v);
    const HybridStep step = e2_condition_edge(parent, a.edge);
    const VerifyReport report = verify_hybrid(step);
    if (a.common.format == "json") {
      Json children = Json::array();
      for (const HybridChild& c : step.children)
        children.push_back(Json{{"weight", to_fraction_string(c.weight)},
                                {"n", c.triple.g.vertex_count()},
                                {"edges", edges_json(c.triple.g)},
                                {"u", c.triple.u},
                                {"v", c.triple.v}});
      Json checks = Json::array();
      for (const QueryCheck& c : report.checks)
        checks.push_back(Json{{"parent", to_fraction_string(c.parent_value)},
                              {"mixture", to_fraction_string(c.mixed_value)},
                              {"ok", c.ok}});
      Json j{{"schema", 1}, {"command", "reduce"},        {"op", a.op},
             {"edge", a.edge}, {"children", std::move(children)}, {"checks", std::move(checks)},
             {"verified", report.ok}};
      out << j.dump(2) << "\n";
    } else {
      out << "op: e2-condition at edge " << a.edge << "\n";
      for (size_t i = 0; i < step.children.size(); ++i)
        out << "child " << i << ": weight " << to_fraction_string(step.children[i].weight)
            << " n=" << step.children[i].triple.g.vertex_count()
            << " edges=" << edges_string(step.children[i].triple.g) << "\n";
      for (const QueryCheck& c : report.checks)
        out << "query (" << c.start.vertex << "," << c.start.layer << ")->(" << c.target.vertex
            << "," << c.target.layer << "): parent " << to_fraction_string(c.parent_value)
            << " vs mixture " << to_fraction_string(c.mixed_value) << "\n";
      out << "verified: " << (report.ok ? "yes" : "no") << "\n";
    }
    return report.ok ? 0 : 1;
  }

  Triple parent{inst.graph, inst.transversal,
                inst.partition.value_or(EdgePartition::singletons(inst.graph)), u, v};
  ReductionStep step;
  if (a.op == "t-contract") {
    if (a.edge < 0) throw std::invalid_argument("t-contract needs --edge");
    step = t_contract(parent, a.edge);
  } else if (a.op == "v2") {
    if (a.vertex < 0) throw std::invalid_argument("v2 needs --vertex");
    step = v2_reduce(parent, a.vertex);
  } else if (a.op == "y") {
    if (a.vertex < 0) throw std::invalid_argument("y needs --vertex");
    step = y_reduce(parent, a.vertex);
  } else if (a.op == "delta") {
    const std::vector<int> ids = parse_int_list(a.edges);
    if (ids.size() != 3) throw std::invalid_argument("delta needs --edges with three ids");
    step = delta_reduce(parent, ids[0], ids[1], ids[2]);
  } else if (a.op == "restricted-delta") {
    const std::vector<int> ids = parse_int_list(a.edges);
    if (ids.size() != 3)
      throw std::invalid_argument("restricted-delta needs --edges with three ids (tied edge first)");
    step = restricted_delta_reduce(parent, ids[0], ids[1], ids[2]);
  } else if (a.op == "parallel") {
    const std::vector<int> ids = parse_int_list(a.edges);
    if (ids.size() != 2) throw std::invalid_argument("parallel needs --edges with two ids");
    step = parallel_pair_reduce(parent, ids[0], ids[1]);
  } else {
    throw std::invalid_argument("unknown op '" + a.op + "'");
  }

  const VerifyReport report = verify_reduction(step);
  if (a.common.format == "json") {
    Json children = Json::array();
    for (const WeightedChild& c : step.children)
      children.push_back(
          Json{{"weight", to_fraction_string(c.weight)}, {"instance", triple_json(c.triple)}});
    Json checks = Json::array();
    for (const QueryCheck& c : report.checks)
      checks.push_back(Json{{"parent", to_fraction_string(c.parent_value)},
                            {"mixture", to_fraction_string(c.mixed_value)},
                            {"ok", c.ok}});
    Json j{{"schema", 1},
           {"command", "reduce"},
           {"op", step.op},
           {"note", step.note},
           {"parent", triple_json(step.parent)},
           {"children", std::move(children)},
           {"checks", std::move(checks)},
           {"verified", report.ok}};
    out << j.dump(2) << "\n";
  } else {
    out << "op: " << step.op << (step.note.empty() ? "" : " (" + step.note + ")") << "\n";
    out << "parent: " << triple_string(step.parent) << "\n";
    for (size_t i = 0; i < step.children.size(); ++i)
      out << "child " << i << ": weight " << to_fraction_string(step.children[i].weight) << " "
          << triple_string(step.children[i].triple) << "\n";
    for (const QueryCheck& c : report.checks)
      out << "query (" << c.start.vertex << "," << c.start.layer << ")->(" << c.target.vertex
          << "," << c.target.layer << "): parent " << to_fraction_string(c.parent_value)
          << " vs mixture " << to_fraction_string(c.mixed_value) << "\n";
    out << "verified: " << (report.ok ? "yes" : "no") << "\n";
  }
  return report.ok ? 0 : 1;
}

inline int run_scan(const ScanArgs& a, std::ostream& out) {
  InstanceFilter filter;
  filter.max_vertices = a.max_n;
  filter.max_edges = a.max_m;
  filter.connected_only = !a.disconnected;
  filter.outerplanar_only = a.outerplanar;
  filter.multigraph = a.multigraph;

  ScanOptions opt;
  opt.kind = parse_model_kind(a.model);
  opt.p = parse_rational(a.p);
  if (!a.p_grid.empty()) opt.p_grid = parse_grid(a.p_grid);
  opt.max_t_size = a.max_t;
  opt.anti_correlated = a.anti_correlated;
  opt.jobs = a.common.jobs;

  const ScanReport report = scan_conjecture(opt, filter);
  auto witness_string = [](const ScanRow& row) {
    std::string s = "T=" + transversal_string(row.witness.t, row.graph.vertex_count()) +
                    " u=" + std::to_string(row.witness.u) + " v=" + std::to_string(row.witness.v);
    if (row.witness.tie_a >= 0)
      s += " tie=" + std::to_string(row.witness.tie_a) + "," + std::to_string(row.witness.tie_b);
    return s;
  };

  if (a.common.format == "json") {
    Json rows = Json::array();
    for (const ScanRow& row : report.rows) {
      Json jrow{{"id", row.instance_id},
                {"n", row.graph.vertex_count()},
                {"edges", edges_json(row.graph)},
                {"margins", row.margins},
                {"equalities", row.equality_cases}};
      if (row.margins > 0) {
        jrow["min_margin"] = to_fraction_string(row.min_margin);
        Json witness{{"t", transversal_json(row.witness.t, row.graph.vertex_count())},
                     {"u", row.witness.u},
                     {"v", row.witness.v}};
        if (row.witness.partition)
          witness["partition"] = partition_json(*row.witness.partition, row.graph.edge_count());
        if (row.witness.tie_a >= 0) witness["tie"] = {row.witness.tie_a, row.witness.tie_b};
        jrow["witness"] = std::move(witness);
      }
      rows.push_back(std::move(jrow));
    }
    Json j{{"schema", 1},
           {"command", "scan"},
           {"model", model_kind_name(opt.kind)},
           {"rows", std::move(rows)},
           {"total_instances", report.total_instances},
           {"total_margins", report.total_margins},
           {"equality_cases", report.equality_cases},
           {"violations", report.violations}};
    if (report.worst_instance >= 0) {
      j["min_margin"] = to_fraction_string(report.min_margin);
      j["worst_instance"] = report.worst_instance;
    }
    out << j.dump(2) << "\n";
  } else {
    for (const ScanRow& row : report.rows) {
      out << "instance " << row.instance_id << ": n=" << row.graph.vertex_count()
          << " edges=" << edges_string(row.graph);
      if (row.margins > 0)
        out << " min=" << to_fraction_string(row.min_margin) << " at " << witness_string(row)
            << " margins=" << row.margins << " equalities=" << row.equality_cases;
      out << "\n";
    }
    out << "instances: " << report.total_instances << "  margins: " << report.total_margins
        << "  equalities: " << report.equality_cases << "\n";
    if (report.worst_instance >= 0)
      out << "min margin: " << to_fraction_string(report.min_margin) << " at instance "
          << report.worst_instance << "\n";
    if (report.violations.empty()) {
      out << "violations: none\n";
    } else {
      out << "violations:";
      for (int id : report.violations) out << " " << id;
      out << "\n";
    }
  }
  return report.violations.empty() ? 0 : 1;
}

inline int run_figure2(const FigureArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Figure2Match> matches;
  try {
    matches = find_figure2();
  } catch (const std::runtime_error& ex) {
    err << "finding: " << ex.what() << "\n";
    return 1;
  }
  if (a.common.format == "json") {
    Json arr = Json::array();
    for (const Figure2Match& m : matches)
      arr.push_back(Json{{"n", m.graph.vertex_count()},
                         {"edges", edges_json(m.graph)},
                         {"u", m.u},
                         {"v", m.v},
                         {"d3", "13/16"},
                         {"e3", "7/8"}});
    Json j{{"schema", 1}, {"command", "find-figure2"}, {"matches", std::move(arr)}};
    out << j.dump(2) << "\n";
  } else {
    for (const Figure2Match& m : matches)
      out << "match: n=" << m.graph.vertex_count() << " edges=" << edges_string(m.graph)
          << " u=" << m.u << " v=" << m.v << " T="
          << transversal_string(Transversal::of({m.u, m.v}), m.graph.vertex_count())
          << " d3=13/16 e3=7/8\n";
    out << "found " << matches.size() << " matches\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact bunkbed-style connection probabilities on small graphs"};
  app.require_subcommand(1);

  ComputeArgs compute_args;
  CLI::App* compute = app.add_subcommand("compute", "exact connection probability");
  compute->add_option("--model", compute_args.model, "model kind")->required();
  compute->add_option("--graph", compute_args.graph, "instance file")->required();
  compute->add_option("--from", compute_args.from, "start vertex")->required();
  compute->add_option("--to", compute_args.to, "target vertex")->required();
  compute->add_option("--layer", compute_args.layer, "target layer")->check(CLI::Range(0, 1));
  compute->add_option("--p", compute_args.p, "probability parameter");
  compute->add_option("--p-grid", compute_args.p_grid, "per-edge probabilities, cyclic");
  compute->add_option("--tie-equal", compute_args.tie_equal, "condition two edges on equal colors");
  compute->add_option("--tie-different", compute_args.tie_different,
                      "condition two edges on different colors");
  add_common(compute, compute_args.common);

  PolyArgs poly_args;
  CLI::App* poly = app.add_subcommand("poly", "connection probability as a polynomial in p");
  poly->add_option("--model", poly_args.model, "model kind (e1 or e5)")->required();
  poly->add_option("--graph", poly_args.graph, "instance file")->required();
  poly->add_option("--from", poly_args.from, "start vertex")->required();
  poly->add_option("--to", poly_args.to, "target vertex")->required();
  poly->add_option("--layer", poly_args.layer, "target layer")->check(CLI::Range(0, 1));
  add_common(poly, poly_args.common);

  CriticalArgs critical_args;
  CLI::App* critical = app.add_subcommand("critical", "crossing points of the layer-averaged curves");
  critical->add_option("--graph", critical_args.graph, "instance file")->required();
  critical->add_option("--from", critical_args.from, "start vertex")->required();
  critical->add_option("--to", critical_args.to, "target vertex")->required();
  critical->add_option("--tol", critical_args.tol, "isolation interval width bound");
  add_common(critical, critical_args.common);

  AverageArgs average_args;
  CLI::App* average = app.add_subcommand("average", "transversal-averaged connection probability");
  average->add_option("--graph", average_args.graph, "instance file")->required();
  average->add_option("--from", average_args.from, "start vertex")->required();
  average->add_option("--to", average_args.to, "target vertex")->required();
  average->add_option("--layer", average_args.layer, "target layer")->check(CLI::Range(0, 1));
  average->add_option("--p", average_args.p, "evaluate at this p (else print the polynomial)");
  add_common(average, average_args.common);

  EstimateArgs estimate_args;
  CLI::App* estimate = app.add_subcommand("estimate", "seeded Monte Carlo estimate");
  estimate->add_option("--model", estimate_args.model, "model kind")->required();
  estimate->add_option("--graph", estimate_args.graph, "instance file")->required();
  estimate->add_option("--from", estimate_args.from, "start vertex")->required();
  estimate->add_option("--to", estimate_args.to, "target vertex")->required();
  estimate->add_option("--layer", estimate_args.layer, "target layer")->check(CLI::Range(0, 1));
  estimate->add_option("--p", estimate_args.p, "probability parameter");
  estimate->add_option("--p-grid", estimate_args.p_grid, "per-edge probabilities, cyclic");
  estimate->add_option("--samples", estimate_args.samples, "sample count");
  estimate->add_option("--seed", estimate_args.seed, "random seed");
  add_common(estimate, estimate_args.common);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify-lemmas", "run the verification families");
  verify->add_option("--max-n", verify_args.max_n, "corpus bound: connected simple graphs up to n");
  verify->add_flag("--with-figure2", verify_args.with_figure2,
                   "add the four-vertex five-edge disagreement row");
  verify->add_flag("--with-negative-control", verify_args.with_negative_control,
                   "add the intentionally failing corrupted-weight row");
  add_common(verify, verify_args.common);

  ReduceArgs reduce_args;
  CLI::App* reduce = app.add_subcommand("reduce", "apply one rewrite and verify it");
  reduce->add_option("--graph", reduce_args.graph, "instance file")->required();
  reduce->add_option("--op", reduce_args.op,
                     "t-contract | v2 | y | delta | restricted-delta | parallel | e2-condition")
      ->required();
  reduce->add_option("--from", reduce_args.from, "marked vertex u")->required();
  reduce->add_option("--to", reduce_args.to, "marked vertex v")->required();
  reduce->add_option("--edge", reduce_args.edge, "edge id (t-contract, e2-condition)");
  reduce->add_option("--vertex", reduce_args.vertex, "vertex id (v2, y)");
  reduce->add_option("--edges", reduce_args.edges, "edge id list (delta, restricted-delta, parallel)");
  reduce->add_option("--p", reduce_args.p, "probability parameter (e2-condition)");
  reduce->add_option("--p-grid", reduce_args.p_grid, "per-edge probabilities (e2-condition)");
  add_common(reduce, reduce_args.common);

  ScanArgs scan_args;
  CLI::App* scan = app.add_subcommand("scan", "exhaustive margin scan over enumerated graphs");
  scan->add_option("--model", scan_args.model, "model kind");
  scan->add_option("--max-n", scan_args.max_n, "vertex bound")->required();
  scan->add_option("--max-m", scan_args.max_m, "edge bound");
  scan->add_option("--max-t", scan_args.max_t, "transversal size bound");
  scan->add_option("--p", scan_args.p, "probability parameter");
  scan->add_option("--p-grid", scan_args.p_grid, "per-edge probabilities, cyclic");
  scan->add_flag("--multigraph", scan_args.multigraph, "enumerate multigraphs");
  scan->add_flag("--outerplanar", scan_args.outerplanar, "outerplanar graphs only");
  scan->add_flag("--disconnected", scan_args.disconnected, "include disconnected graphs");
  scan->add_flag("--anti-correlated", scan_args.anti_correlated,
                 "condition edge pairs on different colors (e3)");
  add_common(scan, scan_args.common);

  FigureArgs figure_args;
  CLI::App* figure = app.add_subcommand("find-figure2", "reconstruct the four-vertex five-edge example");
  add_common(figure, figure_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  int status = 2;
  bool timing = false;
  try {
    if (app.got_subcommand(compute)) {
      timing = compute_args.common.timing;
      status = run_compute(compute_args, out);
    } else if (app.got_subcommand(poly)) {
      timing = poly_args.common.timing;
      status = run_poly(poly_args, out);
    } else if (app.got_subcommand(critical)) {
      timing = critical_args.common.timing;
      status = run_critical(critical_args, out);
    } else if (app.got_subcommand(average)) {
      timing = average_args.common.timing;
      status = run_average(average_args, out);
    } else if (app.got_subcommand(estimate)) {
      timing = estimate_args.common.timing;
      status = run_estimate(estimate_args, out);
    } else if (app.got_subcommand(verify)) {
      timing = verify_args.common.timing;
      status = run_verify(verify_args, out);
    } else if (app.got_subcommand(reduce)) {
      timing = reduce_args.common.timing;
      status = run_reduce(reduce_args, out);
    } else if (app.got_subcommand(scan)) {
      timing = scan_args.common.timing;
      status = run_scan(scan_args, out);
    } else if (app.got_subcommand(figure)) {
      timing = figure_args.common.timing;
      status = run_figure2(figure_args, out, err);
    }
  } catch (const guard_error& ex) {
    err << "guard: " << ex.what() << "\n";
    return 2;
  } catch (const parse_error& ex) {
    err << "parse: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
  if (timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "elapsed: %.3fs", secs);
    err << buf << "\n";
  }
  return status;
}

}  // namespace bunkbed::cli
