#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "graph.hpp"

namespace bunkbed {

/// A parsed instance file:
///
///   n m            header: vertex and edge counts
///   a b            one line per edge, in edge-id order
///   T: 1 4         optional transversal vertices (default empty)
///   U: 0 2 3       optional partition blocks, one line per block of edge
///                  ids; if any U: line appears the blocks must partition
///                  all edges (default: singletons)
///   names: u=0 v=3 optional vertex labels
struct Instance {
  MultiGraph graph;
  Transversal transversal;
  std::optional<EdgePartition> partition;
  std::vector<std::pair<std::string, int>> names;

  int lookup(const std::string& token) const {
    for (const auto& [name, v] : names)
      if (name == token) return v;
    try {
      size_t pos = 0;
      int v = std::stoi(token, &pos);
      if (pos == token.size() && v >= 0 && v < graph.vertex_count()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("unknown vertex '" + token + "'");
  }
};

inline Instance parse_instance(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      out = line;
      return true;
    }
    return false;
  };

  std::string header;
  if (!next_line(header)) throw parse_error(1, "missing header line 'n m'");
  std::istringstream hs(header);
  int n = 0, m = 0;
  std::string extra;
  if (!(hs >> n >> m) || (hs >> extra)) throw parse_error(line_no, "header must be 'n m'");
  if (n < 0 || m < 0) throw parse_error(line_no, "negative counts in header");

  std::vector<MultiGraph::Edge> edges;
  for (int e = 0; e < m; ++e) {
    std::string el;
    if (!next_line(el)) throw parse_error(line_no + 1, "missing edge line");
    std::istringstream es(el);
    int a = 0, b = 0;
    if (!(es >> a >> b) || (es >> extra)) throw parse_error(line_no, "edge line must be 'a b'");
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw parse_error(line_no, "edge endpoint out of range");
    if (a == b) throw parse_error(line_no, "loop edge rejected");
    edges.push_back({a, b});
  }
  MultiGraph graph(n, std::move(edges));

  uint64_t tmask = 0;
  std::vector<std::vector<int>> blocks;
  std::vector<std::pair<std::string, int>> names;
  bool saw_t = false, saw_names = false;

  std::string tail;
  while (next_line(tail)) {
    std::istringstream ts(tail);
    std::string tag;
    if (!(ts >> tag)) continue;  // blank line
    if (tag == "T:") {
      if (saw_t) throw parse_error(line_no, "duplicate T: line");
      saw_t = true;
      int v = 0;
      while (ts >> v) {
        if (v < 0 || v >= n) throw parse_error(line_no, "transversal vertex out of range");
        tmask |= bit(v);
      }
      if (!ts.eof()) throw parse_error(line_no, "bad token in T: line");
    } else if (tag == "U:") {
      std::vector<int> block;
      int e = 0;
      while (ts >> e) {
        if (e < 0 || e >= m) throw parse_error(line_no, "partition edge id out of range");
        block.push_back(e);
      }
      if (!ts.eof()) throw parse_error(line_no, "bad token in U: line");
      if (block.empty()) throw parse_error(line_no, "empty U: block");
      blocks.push_back(std::move(block));
    } else if (tag == "names:") {
      if (saw_names) throw parse_error(line_no, "duplicate names: line");
      saw_names = true;
      std::string pair;
      while (ts >> pair) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= pair.size())
          throw parse_error(line_no, "names: entries must look like label=id");
        std::string label = pair.substr(0, eq);
        int v = 0;
        try {
          size_t pos = 0;
          v = std::stoi(pair.substr(eq + 1), &pos);
          if (pos != pair.size() - eq - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw parse_error(line_no, "bad vertex id in names: entry '" + pair + "'");
        }
        if (v < 0 || v >= n) throw parse_error(line_no, "names: vertex id out of range");
        for (const auto& [existing, _] : names)
          if (existing == label) throw parse_error(line_no, "duplicate label '" + label + "'");
        names.emplace_back(label, v);
      }
    } else {
      throw parse_error(line_no, "unexpected line '" + tail + "'");
    }
  }

  Instance inst{std::move(graph), Transversal(tmask), std::nullopt, std::move(names)};
  if (!blocks.empty()) {
    try {
      inst.partition = EdgePartition(inst.graph, std::move(blocks));
    } catch (const std::invalid_argument& err) {
      throw parse_error(line_no, std::string("bad partition: ") + err.what());
    }
  }
  return inst;
}

inline Instance parse_instance_string(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return parse_instance(in);
}

inline std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  out << inst.graph.vertex_count() << " " << inst.graph.edge_count() << "\n";
  for (const auto& e : inst.graph.edges()) out << e.a << " " << e.b << "\n";
  if (!inst.transversal.empty()) {
    out << "T:";
    for (int v : inst.transversal.to_vector()) out << " " << v;
    out << "\n";
  }
  if (inst.partition && !inst.partition->all_singletons()) {
    for (int i = 0; i < inst.partition->block_count(); ++i) {
      out << "U:";
      for (int e : inst.partition->block_edges(i)) out << " " << e;
      out << "\n";
    }
  }
  if (!inst.names.empty()) {
    out << "names:";
    for (const auto& [label, v] : inst.names) out << " " << label << "=" << v;
    out << "\n";
  }
  return out.str();
}

}  // namespace bunkbed
