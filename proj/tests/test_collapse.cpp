#include <sstream>

#include "doctest.h"
#include "hf/collapse.hpp"
#include "test_util.hpp"

using namespace hf;

namespace {

// Independent witness re-verification, used instead of trusting the
// checkers' own bookkeeping.
bool is_genuine_cycle(const Digraph& g, const std::vector<std::uint32_t>& cyc) {
  if (cyc.empty()) return false;
  std::set<std::pair<std::uint32_t, std::uint32_t>> es(g.edges.begin(),
                                                       g.edges.end());
  for (std::size_t i = 0; i < cyc.size(); ++i)
    if (!es.count({cyc[i], cyc[(i + 1) % cyc.size()]})) return false;
  return true;
}

bool shares_predecessors(const Digraph& g, std::uint32_t x, std::uint32_t y) {
  auto pred = g.predecessors();
  return x != y && pred[x] == pred[y];
}

Digraph random_graph(Rng& rng, std::uint32_t max_nodes) {
  Digraph g;
  g.node_count = 1 + static_cast<std::uint32_t>(rng.below(max_nodes));
  std::set<std::pair<std::uint32_t, std::uint32_t>> es;
  std::uint64_t m = rng.below(2 * g.node_count + 1);
  for (std::uint64_t i = 0; i < m; ++i)
    es.insert({static_cast<std::uint32_t>(rng.below(g.node_count)),
               static_cast<std::uint32_t>(rng.below(g.node_count))});
  g.edges.assign(es.begin(), es.end());
  return g;
}

}  // namespace

TEST_CASE("check_well_founded") {
  Digraph self{1, {{0, 0}}};
  auto w = check_well_founded(self);
  REQUIRE(w);
  CHECK(w->cycle == std::vector<std::uint32_t>{0});

  Digraph empty3{3, {}};
  CHECK(!check_well_founded(empty3));

  Digraph chain{3, {{0, 1}, {1, 2}}};
  CHECK(!check_well_founded(chain));

  Digraph loop{3, {{0, 1}, {1, 2}, {2, 0}}};
  auto w2 = check_well_founded(loop);
  REQUIRE(w2);
  CHECK(is_genuine_cycle(loop, w2->cycle));
}

TEST_CASE("check_extensional") {
  Digraph g1{3, {{0, 2}}};
  auto w = check_extensional(g1);
  REQUIRE(w);
  CHECK(w->x == 0);
  CHECK(w->y == 1);

  Digraph g2{2, {{0, 1}}};
  CHECK(!check_extensional(g2));

  Digraph g3{1, {}};
  CHECK(!check_extensional(g3));
}

TEST_CASE("mostowski_collapse basics") {
  SetStore st;
  Digraph g{3, {{0, 1}, {0, 2}, {1, 2}}};
  auto res = mostowski_collapse(st, g);
  CHECK(st.print(res.pi[0]) == "{}");
  CHECK(st.print(res.pi[1]) == "{{}}");
  CHECK(st.print(res.pi[2]) == "{{},{{}}}");
  CHECK(st.print(res.image) == "{{},{{}},{{},{{}}}}");

  Digraph zero{0, {}};
  auto res0 = mostowski_collapse(st, zero);
  CHECK(res0.pi.empty());
  CHECK(res0.image == st.empty_set());
}

TEST_CASE("mostowski_collapse rejects bad input with witness text") {
  SetStore st;
  CHECK_THROWS_AS(mostowski_collapse(st, Digraph{1, {{0, 0}}}),
                  PreconditionError);
  CHECK_THROWS_AS(mostowski_collapse(st, Digraph{2, {}}), PreconditionError);
}

TEST_CASE("collapse is independent of edge-list order") {
  SetStore st;
  Digraph g{4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {0, 3}}};
  Digraph h = g;
  std::reverse(h.edges.begin(), h.edges.end());
  auto r1 = mostowski_collapse(st, g);
  auto r2 = mostowski_collapse(st, h);
  CHECK(r1.pi == r2.pi);
  CHECK(r1.image == r2.image);
}

TEST_CASE("defining recursion and isomorphism on accepted graphs") {
  SetStore st;
  Rng rng(41);
  int accepted = 0;
  for (int i = 0; accepted < 50 && i < 2000; ++i) {
    Digraph g = random_graph(rng, 8);
    if (check_well_founded(g) || check_extensional(g)) continue;
    ++accepted;
    auto res = mostowski_collapse(st, g);
    auto pred = g.predecessors();
    for (std::uint32_t v = 0; v < g.node_count; ++v) {
      std::vector<SetId> expect;
      for (auto u : pred[v]) expect.push_back(res.pi[u]);
      CHECK(st.make_set(expect) == res.pi[v]);
    }
    // isomorphism, exhaustively
    for (std::uint32_t u = 0; u < g.node_count; ++u)
      for (std::uint32_t v = 0; v < g.node_count; ++v) {
        bool edge = std::find(g.edges.begin(), g.edges.end(),
                              std::make_pair(u, v)) != g.edges.end();
        CHECK(edge == st.contains(res.pi[v], res.pi[u]));
      }
  }
  CHECK(accepted == 50);
}

TEST_CASE("rejection witnesses re-verify") {
  Rng rng(4242);
  int rejected = 0;
  for (int i = 0; rejected < 200 && i < 5000; ++i) {
    Digraph g = random_graph(rng, 10);
    if (auto cyc = check_well_founded(g)) {
      ++rejected;
      CHECK(is_genuine_cycle(g, cyc->cycle));
    } else if (auto ext = check_extensional(g)) {
      ++rejected;
      CHECK(shares_predecessors(g, ext->x, ext->y));
    }
  }
  CHECK(rejected == 200);
}

TEST_CASE("encode_as_graph") {
  SetStore st;
  auto enc0 = encode_as_graph(st, st.empty_set(), 1);
  CHECK(enc0.graph.node_count == 0);

  auto enc2 = encode_as_graph(st, st.v_stage(2), 9);
  CHECK(enc2.graph.node_count == 2);
  REQUIRE(enc2.graph.edges.size() == 1);
  auto [u, v] = enc2.graph.edges[0];
  CHECK(enc2.node_to_set[u] == st.empty_set());
  CHECK(enc2.node_to_set[v] == st.make_set({st.empty_set()}));

  SetId bad = st.make_set({st.make_set({st.empty_set()})});
  CHECK_THROWS_AS(encode_as_graph(st, bad, 0), PreconditionError);

  // deterministic per seed
  auto a = encode_as_graph(st, st.v_stage(4), 123);
  auto b = encode_as_graph(st, st.v_stage(4), 123);
  CHECK(a.graph.edges == b.graph.edges);
  CHECK(a.node_to_set == b.node_to_set);
}

TEST_CASE("round trip: collapse inverts encode") {
  SetStore st;
  for (unsigned n = 0; n <= 4; ++n) {
    SetId s = st.v_stage(n);
    for (std::uint64_t seed : {0ull, 1ull, 77ull}) {
      auto enc = encode_as_graph(st, s, seed);
      auto res = mostowski_collapse(st, enc.graph);
      CHECK(res.image == s);
      for (std::uint32_t i = 0; i < enc.graph.node_count; ++i)
        CHECK(res.pi[i] == enc.node_to_set[i]);
    }
  }
  // also on random transitive sets
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    SetId s = st.transitive_closure(testutil::random_hfset(st, rng, 4));
    auto enc = encode_as_graph(st, s, rng.next());
    auto res = mostowski_collapse(st, enc.graph);
    CHECK(res.image == s);
  }
}

TEST_CASE("edge list round trip") {
  Digraph g{4, {{0, 1}, {2, 3}, {1, 3}}};
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  Digraph h = read_edge_list(in);
  CHECK(h.node_count == g.node_count);
  CHECK(h.edges == g.edges);

  std::istringstream bad1("0 1\n");
  CHECK_THROWS_AS(read_edge_list(bad1), ParseError);
  std::istringstream bad2("nodes 2\n0 5\n");
  CHECK_THROWS_AS(read_edge_list(bad2), PreconditionError);
  std::istringstream ok("# comment\nnodes 2\n0 1 # trailing comment\n");
  CHECK(read_edge_list(ok).edges.size() == 1);
}
