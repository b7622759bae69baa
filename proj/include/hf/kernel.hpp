#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hf/errors.hpp"

namespace hf {

using BigNat = boost::multiprecision::cpp_int;

// Handle to an interned hereditarily finite set. Handles are only
// meaningful relative to the SetStore that issued them and must never be
// compared across stores.
using SetId = std::uint32_t;

// Interning store for hereditarily finite sets.
//
// Every set is represented once: a node holds the canonically sorted,
// duplicate-free element list (ascending Ackermann code), so structural
// equality coincides with handle equality. Nodes are immutable after
// construction and the membership DAG is acyclic because elements must be
// interned before any set containing them.
//
// The store is confined to one thread of control (no internal locking);
// parallel harnesses use one store per worker.
class SetStore {
 public:
  static constexpr std::size_t kDefaultPowersetBudget = 1u << 16;
  static constexpr unsigned kDefaultStageCap = 5;
  // Refuse Ackermann codes above this many bits (V_5's own code would
  // need 2^65536 of them).
  static constexpr std::size_t kMaxCodeBits = 1u << 20;

  SetStore() { empty_ = intern({}); }

  SetId empty_set() const { return empty_; }

  // Canonical constructor: sorts, deduplicates, interns.
  SetId make_set(std::vector<SetId> elems) {
    std::sort(elems.begin(), elems.end(),
              [this](SetId a, SetId b) { return compare(a, b) < 0; });
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return intern(std::move(elems));
  }

  const std::vector<SetId>& elems(SetId s) const { return nodes_[s].elems; }
  std::size_t card(SetId s) const { return nodes_[s].elems.size(); }
  unsigned rank(SetId s) const { return nodes_[s].rank; }
  std::size_t node_count() const { return nodes_.size(); }

  bool contains(SetId s, SetId x) const {
    const auto& es = nodes_[s].elems;
    return std::binary_search(es.begin(), es.end(), x,
                              [this](SetId a, SetId b) { return compare(a, b) < 0; });
  }

  // Total canonical order: ascending Ackermann code. Compares without
  // materializing codes; element lists are descending-exponent bit lists,
  // so the first difference from the top decides.
  int compare(SetId a, SetId b) const {
    if (a == b) return 0;
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.small_ok && nb.small_ok)
      return na.small_code < nb.small_code ? -1 : 1;
    std::size_t la = na.elems.size(), lb = nb.elems.size();
    for (std::size_t k = 1; k <= std::min(la, lb); ++k) {
      int c = compare(na.elems[la - k], nb.elems[lb - k]);
      if (c != 0) return c;
    }
    if (la == lb) return 0;  // unreachable for interned distinct sets
    return la < lb ? -1 : 1;
  }

  bool less(SetId a, SetId b) const { return compare(a, b) < 0; }

  SetId powerset(SetId s, std::size_t budget = kDefaultPowersetBudget) {
    std::size_t n = card(s);
    if (n >= 64 || (std::size_t{1} << n) > budget)
      throw CapacityError("powerset of a " + std::to_string(n) +
                          "-element set exceeds the element budget of " +
                          std::to_string(budget));
    const std::vector<SetId> es = nodes_[s].elems;
    std::vector<SetId> subsets;
    subsets.reserve(std::size_t{1} << n);
    std::vector<SetId> buf;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      buf.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::uint64_t{1} << i)) buf.push_back(es[i]);
      // buf is already canonically sorted; ascending masks give ascending
      // subset codes, so the outer list needs no sort either.
      subsets.push_back(intern(buf));
    }
    return intern(std::move(subsets));
  }

  // Finite von Neumann stage: V_0 = {}, V_{n+1} = P(V_n).
  SetId v_stage(unsigned n, unsigned cap = kDefaultStageCap) {
    if (n > cap)
      throw CapacityError("v_stage(" + std::to_string(n) +
                          ") exceeds the stage cap " + std::to_string(cap));
    while (vstages_.size() <= n) {
      if (vstages_.empty())
        vstages_.push_back(empty_);
      else
        vstages_.push_back(powerset(vstages_.back()));
    }
    return vstages_[n];
  }

  bool is_transitive(SetId s) const {
    const auto& es = nodes_[s].elems;
    std::unordered_set<SetId> members(es.begin(), es.end());
    for (SetId e : es)
      for (SetId ee : nodes_[e].elems)
        if (!members.count(ee)) return false;
    return true;
  }

  // Smallest transitive superset.
  SetId transitive_closure(SetId s) {
    std::unordered_set<SetId> seen;
    std::vector<SetId> stack(nodes_[s].elems);
    std::vector<SetId> all;
    while (!stack.empty()) {
      SetId x = stack.back();
      stack.pop_back();
      if (!seen.insert(x).second) continue;
      all.push_back(x);
      for (SetId e : nodes_[x].elems) stack.push_back(e);
    }
    return make_set(std::move(all));
  }

  // code(s) = sum over elements e of 2^code(e). Cached per node.
  const BigNat& ackermann_code(SetId s) const {
    const Node& n = nodes_[s];
    if (!n.code) {
      auto code = std::make_unique<BigNat>(0);
      for (SetId e : n.elems) {
        const BigNat& ce = ackermann_code(e);
        if (ce > kMaxCodeBits)
          throw CapacityError("Ackermann code needs more than " +
                              std::to_string(kMaxCodeBits) + " bits");
        boost::multiprecision::bit_set(*code, static_cast<unsigned>(ce));
      }
      n.code = std::move(code);
    }
    return *n.code;
  }

  SetId ackermann_decode(const BigNat& n) {
    auto it = decode_memo_.find(n);
    if (it != decode_memo_.end()) return it->second;
    std::vector<SetId> es;
    if (n > 0)
      for (unsigned pos = 0; pos <= boost::multiprecision::msb(n); ++pos)
        if (boost::multiprecision::bit_test(n, pos))
          es.push_back(ackermann_decode(BigNat{pos}));
    SetId id = make_set(std::move(es));
    decode_memo_.emplace(n, id);
    return id;
  }

  // {{a},{a,b}}
  SetId kuratowski_pair(SetId a, SetId b) {
    return make_set({make_set({a}), make_set({a, b})});
  }

  // von Neumann numeral: 0 = {}, k+1 = k u {k}.
  SetId numeral(unsigned k) {
    SetId n = empty_;
    for (unsigned i = 0; i < k; ++i) {
      std::vector<SetId> es(nodes_[n].elems);
      es.push_back(n);
      n = make_set(std::move(es));
    }
    return n;
  }

  // Canonical text: members in ascending Ackermann-code order, no
  // whitespace. That is exactly storage order.
  std::string print(SetId s) const {
    std::string out;
    print_into(s, out);
    return out;
  }

  // Set-literal grammar: set := "{" [ set { "," set } ] "}"; whitespace
  // ignored anywhere between tokens.
  SetId parse(const std::string& text) {
    std::size_t pos = 0;
    int line = 1, col = 1;
    SetId s = parse_set(text, pos, line, col);
    skip_ws(text, pos, line, col);
    if (pos != text.size())
      throw ParseError("trailing characters after set literal", line, col);
    return s;
  }

 private:
  struct Node {
    std::vector<SetId> elems;
    unsigned rank = 0;
    std::uint64_t small_code = 0;
    bool small_ok = false;
    mutable std::unique_ptr<BigNat> code;
  };

  struct VecHash {
    std::size_t operator()(const std::vector<SetId>& v) const {
      std::size_t h = v.size();
      for (SetId x : v) h ^= x + 0x9e3779b9u + (h << 6) + (h >> 2);
      return h;
    }
  };

  // elems must already be canonically sorted and duplicate-free.
  SetId intern(std::vector<SetId> elems) {
    auto it = intern_.find(elems);
    if (it != intern_.end()) return it->second;
    Node n;
    n.small_ok = true;
    for (SetId e : elems) {
      n.rank = std::max(n.rank, nodes_[e].rank + 1);
      if (nodes_[e].small_ok && nodes_[e].small_code < 64)
        n.small_code |= std::uint64_t{1} << nodes_[e].small_code;
      else
        n.small_ok = false;
    }
    if (!n.small_ok) n.small_code = 0;
    n.elems = std::move(elems);
    SetId id = static_cast<SetId>(nodes_.size());
    nodes_.push_back(std::move(n));
    intern_.emplace(nodes_.back().elems, id);
    return id;
  }

  void print_into(SetId s, std::string& out) const {
    out += '{';
    const auto& es = nodes_[s].elems;
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (i) out += ',';
      print_into(es[i], out);
    }
    out += '}';
  }

  static void skip_ws(const std::string& t, std::size_t& pos, int& line, int& col) {
    while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t' || t[pos] == '\n' ||
                              t[pos] == '\r')) {
      if (t[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  SetId parse_set(const std::string& t, std::size_t& pos, int& line, int& col) {
    skip_ws(t, pos, line, col);
    if (pos >= t.size() || t[pos] != '{')
      throw ParseError("expected '{'", line, col);
    ++pos;
    ++col;
    std::vector<SetId> es;
    skip_ws(t, pos, line, col);
    if (pos < t.size() && t[pos] == '}') {
      ++pos;
      ++col;
      return make_set(std::move(es));
    }
    for (;;) {
      es.push_back(parse_set(t, pos, line, col));
      skip_ws(t, pos, line, col);
      if (pos >= t.size()) throw ParseError("expected ',' or '}'", line, col);
      if (t[pos] == ',') {
        ++pos;
        ++col;
      } else if (t[pos] == '}') {
        ++pos;
        ++col;
        return make_set(std::move(es));
      } else {
        throw ParseError("expected ',' or '}'", line, col);
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::vector<SetId>, SetId, VecHash> intern_;
  std::map<BigNat, SetId> decode_memo_;
  std::vector<SetId> vstages_;
  SetId empty_ = 0;
};

// Prints the set named by an Ackermann code without touching a store.
// Ascending bit position is ascending member code, so the output is
// already canonical.
inline std::string print_code(const BigNat& n) {
  std::string out = "{";
  bool first = true;
  if (n > 0) {
    for (unsigned pos = 0; pos <= boost::multiprecision::msb(n); ++pos) {
      if (!boost::multiprecision::bit_test(n, pos)) continue;
      if (!first) out += ',';
      first = false;
      out += print_code(BigNat{pos});
    }
  }
  return out + "}";
}

// Parses a set literal straight to its Ackermann code (store-free;
// duplicate members collapse because codes are bit-ors).
BigNat parse_code(const std::string& text);

namespace detail {
inline BigNat parse_code_set(const std::string& t, std::size_t& pos) {
  auto ws = [&] {
    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos]))) ++pos;
  };
  ws();
  if (pos >= t.size() || t[pos] != '{') throw ParseError("expected '{'", 1, static_cast<int>(pos) + 1);
  ++pos;
  BigNat code = 0;
  ws();
  if (pos < t.size() && t[pos] == '}') {
    ++pos;
    return code;
  }
  for (;;) {
    BigNat member = parse_code_set(t, pos);
    if (member > SetStore::kMaxCodeBits)
      throw CapacityError("set literal member code too large");
    boost::multiprecision::bit_set(code, static_cast<unsigned>(member));
    ws();
    if (pos >= t.size()) throw ParseError("expected ',' or '}'", 1, static_cast<int>(pos) + 1);
    if (t[pos] == ',') {
      ++pos;
    } else if (t[pos] == '}') {
      ++pos;
      return code;
    } else {
      throw ParseError("expected ',' or '}'", 1, static_cast<int>(pos) + 1);
    }
  }
}
}  // namespace detail

inline BigNat parse_code(const std::string& text) {
  std::size_t pos = 0;
  BigNat code = detail::parse_code_set(text, pos);
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size())
    throw ParseError("trailing characters after set literal", 1, static_cast<int>(pos) + 1);
  return code;
}

}  // namespace hf
