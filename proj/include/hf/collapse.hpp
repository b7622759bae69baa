#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hf/digraph.hpp"
#include "hf/errors.hpp"
#include "hf/kernel.hpp"
#include "hf/rng.hpp"

namespace hf {

// A genuine E-cycle: cycle[i] E cycle[i+1], and cycle.back() E cycle[0].
// As a node subset it has no E-minimal element.
struct CycleWitness {
  std::vector<std::uint32_t> cycle;
};

// Distinct nodes with identical E-predecessor sets.
struct ExtensionalityWitness {
  std::uint32_t x = 0, y = 0;
};

// Finite well-foundedness is acyclicity. Iterated removal of E-minimal
// nodes (Kahn); a nonempty residue contains a cycle, which we walk out
// as the witness.
inline std::optional<CycleWitness> check_well_founded(const Digraph& g) {
  auto pred = g.predecessors();
  std::vector<std::vector<std::uint32_t>> succ(g.node_count);
  for (auto [u, v] : g.edges) succ[u].push_back(v);
  std::vector<std::uint32_t> in_deg(g.node_count);
  for (std::uint32_t v = 0; v < g.node_count; ++v)
    in_deg[v] = static_cast<std::uint32_t>(pred[v].size());
  std::vector<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < g.node_count; ++v)
    if (in_deg[v] == 0) queue.push_back(v);
  std::size_t removed = 0;
  while (!queue.empty()) {
    std::uint32_t v = queue.back();
    queue.pop_back();
    ++removed;
    for (std::uint32_t w : succ[v])
      if (--in_deg[w] == 0) queue.push_back(w);
  }
  if (removed == g.node_count) return std::nullopt;
  // Residual nodes all keep a residual predecessor; walk until a repeat.
  std::vector<bool> residual(g.node_count, false);
  for (std::uint32_t v = 0; v < g.node_count; ++v)
    if (in_deg[v] > 0) residual[v] = true;
  std::uint32_t start = 0;
  while (!residual[start]) ++start;
  std::vector<std::int64_t> seen_at(g.node_count, -1);
  std::vector<std::uint32_t> path;
  std::uint32_t cur = start;
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<std::int64_t>(path.size());
    path.push_back(cur);
    for (std::uint32_t p : pred[cur])
      if (residual[p]) {
        cur = p;
        break;
      }
  }
  // path walked backwards along E; reverse the loop so cycle[i] E cycle[i+1].
  std::vector<std::uint32_t> cycle(path.begin() + seen_at[cur], path.end());
  std::reverse(cycle.begin(), cycle.end());
  return CycleWitness{std::move(cycle)};
}

// Extensionality: distinct nodes must have distinct predecessor sets.
inline std::optional<ExtensionalityWitness> check_extensional(const Digraph& g) {
  auto pred = g.predecessors();
  std::map<std::vector<std::uint32_t>, std::uint32_t> first_with;
  for (std::uint32_t v = 0; v < g.node_count; ++v) {
    auto [it, fresh] = first_with.emplace(pred[v], v);
    if (!fresh) return ExtensionalityWitness{it->second, v};
  }
  return std::nullopt;
}

struct CollapseResult {
  std::vector<SetId> pi;  // node -> collapsed set
  SetId image;            // the transitive set N
};

// Unique transitive collapse of a well-founded extensional graph:
// pi(x) = { pi(z) : z E x }, evaluated in a topological order of E.
inline CollapseResult mostowski_collapse(SetStore& store, const Digraph& g) {
  g.validate();
  if (auto cyc = check_well_founded(g)) {
    std::string msg = "relation is not well-founded; cycle:";
    for (auto v : cyc->cycle) msg += " " + std::to_string(v);
    throw PreconditionError(msg);
  }
  if (auto ext = check_extensional(g)) {
    throw PreconditionError(
        "relation is not extensional; nodes " + std::to_string(ext->x) +
        " and " + std::to_string(ext->y) + " share their predecessor set");
  }
  auto pred = g.predecessors();
  std::vector<std::vector<std::uint32_t>> succ(g.node_count);
  std::vector<std::uint32_t> in_deg(g.node_count);
  for (auto [u, v] : g.edges) succ[u].push_back(v);
  for (std::uint32_t v = 0; v < g.node_count; ++v)
    in_deg[v] = static_cast<std::uint32_t>(pred[v].size());
  std::vector<std::uint32_t> order;
  for (std::uint32_t v = 0; v < g.node_count; ++v)
    if (in_deg[v] == 0) order.push_back(v);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::uint32_t w : succ[order[i]])
      if (--in_deg[w] == 0) order.push_back(w);
  CollapseResult res;
  res.pi.assign(g.node_count, store.empty_set());
  for (std::uint32_t v : order) {
    std::vector<SetId> members;
    members.reserve(pred[v].size());
    for (std::uint32_t u : pred[v]) members.push_back(res.pi[u]);
    res.pi[v] = store.make_set(std::move(members));
  }
  res.image = store.make_set(res.pi);
  return res;
}

struct EncodedGraph {
  Digraph graph;
  std::vector<SetId> node_to_set;  // the bijection f
};

// Encodes a transitive set as a membership digraph under a seeded random
// bijection node -> member. Deterministic per seed.
inline EncodedGraph encode_as_graph(SetStore& store, SetId s, std::uint64_t seed) {
  if (!store.is_transitive(s))
    throw PreconditionError(
        "encode_as_graph requires a transitive set; apply transitive_closure "
        "first");
  EncodedGraph enc;
  enc.node_to_set = store.elems(s);
  Rng rng(seed);
  rng.shuffle(enc.node_to_set);
  enc.graph.node_count = static_cast<std::uint32_t>(enc.node_to_set.size());
  std::unordered_map<SetId, std::uint32_t> node_of;
  for (std::uint32_t i = 0; i < enc.graph.node_count; ++i)
    node_of.emplace(enc.node_to_set[i], i);
  for (std::uint32_t v = 0; v < enc.graph.node_count; ++v)
    for (SetId member : store.elems(enc.node_to_set[v]))
      enc.graph.edges.emplace_back(node_of.at(member), v);
  return enc;
}

}  // namespace hf
