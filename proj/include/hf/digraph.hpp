#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hf/errors.hpp"

namespace hf {

// Finite binary relation on nodes 0..node_count-1. An edge (u,v) reads
// "u E v", i.e. u plays the member and v the set. This orientation is
// fixed in the file format too; transposing it silently is the classic
// collapse bug.
struct Digraph {
  std::uint32_t node_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  void validate() const {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto [u, v] : edges) {
      if (u >= node_count || v >= node_count)
        throw PreconditionError("edge endpoint out of range: " +
                                std::to_string(u) + " " + std::to_string(v));
      if (!seen.insert({u, v}).second)
        throw PreconditionError("duplicate edge: " + std::to_string(u) + " " +
                                std::to_string(v));
    }
  }

  // predecessors[v] = sorted list of u with u E v.
  std::vector<std::vector<std::uint32_t>> predecessors() const {
    std::vector<std::vector<std::uint32_t>> pred(node_count);
    for (auto [u, v] : edges) pred[v].push_back(u);
    for (auto& p : pred) std::sort(p.begin(), p.end());
    return pred;
  }
};

// Edge-list text format: optional comment lines starting with '#', a
// header "nodes N", then one "u v" pair per line meaning u E v.
inline Digraph read_edge_list(std::istream& in) {
  Digraph g;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "nodes") {
      if (have_header) throw ParseError("duplicate 'nodes' header", lineno, 1);
      if (!(ls >> g.node_count))
        throw ParseError("expected node count after 'nodes'", lineno, 1);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw ParseError("expected 'nodes N' header before edges", lineno, 1);
    std::uint32_t u, v;
    std::istringstream es(line);
    if (!(es >> u >> v)) throw ParseError("expected edge 'u v'", lineno, 1);
    std::string rest;
    if (es >> rest) throw ParseError("trailing tokens on edge line", lineno, 1);
    g.edges.emplace_back(u, v);
  }
  if (!have_header) throw ParseError("missing 'nodes N' header", lineno, 1);
  g.validate();
  return g;
}

inline void write_edge_list(std::ostream& out, const Digraph& g) {
  out << "nodes " << g.node_count << "\n";
  for (auto [u, v] : g.edges) out << u << " " << v << "\n";
}

}  // namespace hf
