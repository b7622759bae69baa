#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hf/errors.hpp"
#include "hf/eval.hpp"
#include "hf/formula.hpp"
#include "hf/kernel.hpp"

namespace hf {

struct DefWitness {
  FormulaPtr formula;
  // parameter name -> value; the formula, evaluated over (m, in, a&m)
  // with these bindings, carves out exactly the subset.
  std::vector<std::pair<std::string, SetId>> params;
};

// Family of definable subsets of a carrier m, as bitmasks over the
// carrier's canonically ordered elements.
struct DefReport {
  SetId carrier;
  std::vector<SetId> elements;  // canonical order; mask bit i = elements[i]
  std::vector<std::uint32_t> masks;
  std::map<std::uint32_t, DefWitness> witness;
  bool exhausted = false;
};

namespace detail {

// Definable subsets of the structure (m, in, a&m) via stable-type
// partition refinement. For each tuple arity (free variables x, v1..vr)
// the assignments are partitioned first by atomic type, then repeatedly
// refined by the set of one-variable-extension blocks, until nothing
// splits. With arity reaching |m| - 1 the stable unary blocks are
// exactly the automorphism orbits (same-type tuples extend element by
// element to a full isomorphism), so the definable-without-parameters
// family is the closure of those blocks under union; with parameters
// every atom x = $p splits the carrier to singletons immediately.
// Witness formulas come from pairwise separating formulas read off the
// refinement: an atomic difference where one exists, otherwise
// "exists v . (separated from every extension of the other side)".
class DefEngine {
 public:
  static constexpr unsigned kMaxVars = 8;  // x plus up to 7 bound variables
  static constexpr std::size_t kTupleBudget = std::size_t{1} << 25;

  DefEngine(SetStore& store, SetId m, SetId a_restricted, bool allow_params)
      : store_(store), elements_(store.elems(m)) {
    k_ = static_cast<unsigned>(elements_.size());
    for (unsigned i = 0; i < k_; ++i)
      in_a_.push_back(store_.contains(a_restricted, elements_[i]));
    mem_.assign(k_, std::vector<bool>(k_, false));
    for (unsigned i = 0; i < k_; ++i)
      for (unsigned j = 0; j < k_; ++j)
        mem_[i][j] = store_.contains(elements_[j], elements_[i]);  // e_i in e_j
    if (allow_params)
      for (unsigned i = 0; i < k_; ++i)
        params_.push_back("p" + std::to_string(i));
  }

  DefReport run(unsigned depth_budget) {
    DefReport rep;
    rep.elements = elements_;
    if (k_ == 0) {
      // only the empty subset; "false" defines it
      add_mask(rep, 0, f_false());
      rep.exhausted = true;
      return rep;
    }
    R_ = std::min<unsigned>(k_ - 1, kMaxVars - 1);
    while (R_ > 0 && table_size(R_) > kTupleBudget) --R_;
    const bool full_arity = R_ == k_ - 1;
    part_.assign(R_ + 1, {});
    nblocks_.assign(R_ + 1, 0);
    atoms_.assign(R_ + 1, {});
    atomic_partition(0);
    round_p0_.push_back(part_[0]);
    unsigned rounds = 0;
    if (nblocks_[0] == k_) {
      // already discrete: higher arities cannot matter
      R_ = 0;
      part_.resize(1);
      nblocks_.resize(1);
    } else {
      for (unsigned r = 1; r <= R_; ++r) atomic_partition(r);
      for (;;) {
        bool changed = false;
        for (unsigned r = R_; r-- > 0;) changed = refine(r) || changed;
        if (!changed) break;
        ++rounds;
        round_p0_.push_back(part_[0]);
      }
    }
    build_reps();
    // witness for each stable unary block: separated from all others
    std::vector<FormulaPtr> block_wit(nblocks_[0]);
    for (std::uint32_t b = 0; b < nblocks_[0]; ++b) {
      FormulaPtr f;
      for (std::uint32_t o = 0; o < nblocks_[0]; ++o) {
        if (o == b) continue;
        FormulaPtr s = sep(0, b, o);
        f = f ? f_and(f, s) : s;
      }
      block_wit[b] = f ? f : f_true();
    }
    // the reported partition is the one the round budget reaches;
    // coarser-round blocks are unions of stable blocks, hence definable
    const auto& p0 =
        round_p0_[std::min<std::size_t>(depth_budget, round_p0_.size() - 1)];
    std::uint32_t nb = *std::max_element(p0.begin(), p0.end()) + 1;
    std::vector<std::uint32_t> bmask(nb, 0);
    std::vector<std::vector<std::uint32_t>> fine_in(nb);
    for (unsigned e = 0; e < k_; ++e) bmask[p0[e]] |= std::uint32_t{1} << e;
    for (std::uint32_t fb = 0; fb < nblocks_[0]; ++fb)
      fine_in[p0[rep_[0][fb]]].push_back(fb);
    for (std::uint32_t sub = 0; sub < (std::uint32_t{1} << nb); ++sub) {
      std::uint32_t mask = 0;
      FormulaPtr f;
      for (std::uint32_t b = 0; b < nb; ++b)
        if (sub & (std::uint32_t{1} << b)) {
          mask |= bmask[b];
          for (std::uint32_t fb : fine_in[b])
            f = f ? f_or(f, block_wit[fb]) : block_wit[fb];
        }
      add_mask(rep, mask, f ? f : f_false());
    }
    rep.exhausted =
        depth_budget >= rounds && (nblocks_[0] == k_ || full_arity);
    std::sort(rep.masks.begin(), rep.masks.end());
    return rep;
  }

 private:
  void add_mask(DefReport& rep, std::uint32_t mask, FormulaPtr f) {
    if (rep.witness.count(mask)) return;
    rep.masks.push_back(mask);
    DefWitness w;
    w.formula = std::move(f);
    for (unsigned i = 0; i < params_.size(); ++i)
      w.params.emplace_back(params_[i], elements_[i]);
    rep.witness.emplace(mask, std::move(w));
  }

  // ---- tuple indexing --------------------------------------------------

  // Arity r has open variables x, v1..vr; assignments are indexed
  // base-k with x fastest, so the arity-(r+1) extension of tuple t by
  // element e has index e * k^(r+1) + t.
  std::size_t table_size(unsigned r) const {
    std::size_t s = 1;
    for (unsigned i = 0; i <= r; ++i) s *= k_;
    return s;
  }

  struct TermSem {
    Term term;
    int var_index;  // >= 0: open variable position; -1: constant
    unsigned const_element = 0;
  };

  std::vector<TermSem> context_terms(unsigned r) const {
    std::vector<TermSem> ts;
    ts.push_back({Term::var("x"), 0});
    for (unsigned i = 1; i <= r; ++i)
      ts.push_back({Term::var("v" + std::to_string(i)), static_cast<int>(i)});
    for (unsigned i = 0; i < params_.size(); ++i)
      ts.push_back({Term::param(params_[i]), -1, i});
    return ts;
  }

  unsigned element_at(std::size_t assignment, int var_index) const {
    for (int i = 0; i < var_index; ++i) assignment /= k_;
    return static_cast<unsigned>(assignment % k_);
  }

  unsigned value_of(const TermSem& t, std::size_t assignment) const {
    return t.var_index < 0 ? t.const_element : element_at(assignment, t.var_index);
  }

  // ---- atoms -----------------------------------------------------------

  struct Atom {
    enum Kind { PredA, Mem, Eq } kind;
    TermSem a, b;
  };

  const std::vector<Atom>& atom_list(unsigned r) {
    if (!atoms_[r].empty()) return atoms_[r];
    auto ts = context_terms(r);
    std::vector<Atom>& out = atoms_[r];
    for (const TermSem& t : ts)
      if (t.var_index >= 0) out.push_back({Atom::PredA, t, t});
    for (const TermSem& t1 : ts)
      for (const TermSem& t2 : ts) {
        if (t1.var_index < 0 && t2.var_index < 0) continue;  // constant atom
        out.push_back({Atom::Mem, t1, t2});
        if (&t1 < &t2) out.push_back({Atom::Eq, t1, t2});
      }
    return out;
  }

  bool atom_value(const Atom& a, std::size_t t) const {
    unsigned va = value_of(a.a, t), vb = value_of(a.b, t);
    switch (a.kind) {
      case Atom::PredA:
        return in_a_[va];
      case Atom::Mem:
        return mem_[va][vb];
      default:
        return va == vb;
    }
  }

  static FormulaPtr atom_formula(const Atom& a) {
    switch (a.kind) {
      case Atom::PredA:
        return f_pred_a(a.a.term);
      case Atom::Mem:
        return f_member(a.a.term, a.b.term);
      default:
        return f_equal(a.a.term, a.b.term);
    }
  }

  // ---- partition refinement -------------------------------------------

  void atomic_partition(unsigned r) {
    std::size_t n = table_size(r);
    const auto& atoms = atom_list(r);
    std::map<std::vector<char>, std::uint32_t> ids;
    auto& p = part_[r];
    p.assign(n, 0);
    std::vector<char> sig(atoms.size());
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t i = 0; i < atoms.size(); ++i)
        sig[i] = atom_value(atoms[i], t) ? 1 : 0;
      auto id = static_cast<std::uint32_t>(ids.size());
      p[t] = ids.emplace(sig, id).first->second;
    }
    nblocks_[r] = static_cast<std::uint32_t>(ids.size());
  }

  bool refine(unsigned r) {
    std::size_t n = table_size(r);
    using Key = std::pair<std::uint32_t, std::vector<std::uint32_t>>;
    std::map<Key, std::uint32_t> ids;
    std::vector<std::uint32_t> np(n);
    std::vector<std::uint32_t> reach;
    for (std::size_t t = 0; t < n; ++t) {
      reach.clear();
      for (unsigned e = 0; e < k_; ++e) reach.push_back(part_[r + 1][e * n + t]);
      std::sort(reach.begin(), reach.end());
      reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
      auto id = static_cast<std::uint32_t>(ids.size());
      np[t] = ids.emplace(Key{part_[r][t], reach}, id).first->second;
    }
    bool changed = ids.size() > nblocks_[r];
    part_[r] = std::move(np);
    nblocks_[r] = static_cast<std::uint32_t>(ids.size());
    return changed;
  }

  void build_reps() {
    rep_.assign(R_ + 1, {});
    succ_.assign(R_ + 1, {});
    for (unsigned r = 0; r <= R_; ++r) {
      rep_[r].assign(nblocks_[r], 0);
      std::vector<bool> seen(nblocks_[r], false);
      for (std::size_t t = 0; t < part_[r].size(); ++t)
        if (!seen[part_[r][t]]) {
          seen[part_[r][t]] = true;
          rep_[r][part_[r][t]] = t;
        }
      if (r == R_) continue;
      succ_[r].assign(nblocks_[r], {});
      std::size_t n = table_size(r);
      for (std::uint32_t b = 0; b < nblocks_[r]; ++b) {
        std::vector<std::uint32_t>& s = succ_[r][b];
        for (unsigned e = 0; e < k_; ++e)
          s.push_back(part_[r + 1][e * n + rep_[r][b]]);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
      }
    }
  }

  // ---- separating formulas --------------------------------------------

  // Formula (free variables x, v1..vr) true on every tuple of stable
  // block b and false on every tuple of stable block o. Blocks are
  // unions of automorphism orbits, so the extension of any formula we
  // build is constant on them; it suffices to hit the representatives.
  FormulaPtr sep(unsigned r, std::uint32_t b, std::uint32_t o) {
    auto key = std::make_tuple(r, b, o);
    auto it = sep_memo_.find(key);
    if (it != sep_memo_.end()) return it->second;
    std::size_t t = rep_[r][b], u = rep_[r][o];
    FormulaPtr out;
    for (const Atom& a : atom_list(r)) {
      bool va = atom_value(a, t), vu = atom_value(a, u);
      if (va != vu) {
        FormulaPtr f = atom_formula(a);
        out = va ? f : f_not(f);
        break;
      }
    }
    if (!out) {
      // same atomic type: stability forces the extension-block sets to
      // differ one arity up; pick a block reachable from only one side
      const auto& sb = succ_[r][b];
      const auto& so = succ_[r][o];
      std::uint32_t beta = 0;
      bool found = false;
      for (std::uint32_t x : sb)
        if (!std::binary_search(so.begin(), so.end(), x)) {
          beta = x;
          found = true;
          break;
        }
      if (!found) {
        out = f_not(sep(r, o, b));
      } else {
        FormulaPtr conj;
        for (std::uint32_t bo : so) {
          FormulaPtr c = sep(r + 1, beta, bo);
          conj = conj ? f_and(conj, c) : c;
        }
        out = f_exists("v" + std::to_string(r + 1), conj);
      }
    }
    sep_memo_.emplace(key, out);
    return out;
  }

  SetStore& store_;
  std::vector<SetId> elements_;
  unsigned k_ = 0;
  unsigned R_ = 0;
  std::vector<bool> in_a_;
  std::vector<std::vector<bool>> mem_;
  std::vector<std::string> params_;
  std::vector<std::vector<std::uint32_t>> part_;     // per arity, block per tuple
  std::vector<std::uint32_t> nblocks_;               // per arity
  std::vector<std::vector<Atom>> atoms_;             // per arity, lazy
  std::vector<std::vector<std::size_t>> rep_;        // per arity, block rep tuple
  std::vector<std::vector<std::vector<std::uint32_t>>> succ_;
  std::vector<std::vector<std::uint32_t>> round_p0_;  // unary blocks per round
  std::map<std::tuple<unsigned, std::uint32_t, std::uint32_t>, FormulaPtr>
      sep_memo_;
};

}  // namespace detail

constexpr unsigned kDefaultDefinabilityDepth = 6;
constexpr unsigned kDefinabilityCarrierCap = 16;

// All subsets of m definable over the structure (m, in, a&m), with or
// without parameters from m, up to the refinement-round budget.
inline DefReport definable_subsets(SetStore& store, SetId m, SetId a,
                                   bool allow_params,
                                   unsigned depth_budget = kDefaultDefinabilityDepth) {
  if (store.card(m) > kDefinabilityCarrierCap)
    throw CapacityError("definable_subsets carrier has " +
                        std::to_string(store.card(m)) +
                        " elements; 2^|m| exceeds the subset-family cap");
  std::vector<SetId> restricted;
  for (SetId e : store.elems(a))
    if (store.contains(m, e)) restricted.push_back(e);
  SetId a_in_m = store.make_set(std::move(restricted));
  detail::DefEngine engine(store, m, a_in_m, allow_params);
  DefReport rep = engine.run(depth_budget);
  rep.carrier = m;
  return rep;
}

inline SetId subset_of_mask(SetStore& store, const DefReport& rep,
                            std::uint32_t mask) {
  std::vector<SetId> members;
  for (unsigned i = 0; i < rep.elements.size(); ++i)
    if (mask & (std::uint32_t{1} << i)) members.push_back(rep.elements[i]);
  return store.make_set(std::move(members));
}

// One line per subset: set literal, tab, defining formula, tab,
// parameter list.
inline std::string serialize(SetStore& store, const DefReport& rep) {
  std::string out;
  for (std::uint32_t mask : rep.masks) {
    const DefWitness& w = rep.witness.at(mask);
    out += store.print(subset_of_mask(store, rep, mask));
    out += '\t';
    out += print(w.formula);
    out += '\t';
    bool first = true;
    for (const auto& [name, value] : w.params) {
      if (!first) out += ' ';
      first = false;
      out += "$" + name + "=" + store.print(value);
    }
    out += '\n';
  }
  return out;
}

// Finite constructible stage: L_0[A] = {}, L_{n+1}[A] = the definable
// (with parameters) subsets of L_n[A]. Above 8 carrier elements the
// proven parameters-imply-powerset equivalence stands in for the
// enumeration, which keeps stage 5 feasible.
inline SetId l_stage(SetStore& store, unsigned n, SetId a,
                     unsigned cap = SetStore::kDefaultStageCap) {
  if (n > cap)
    throw CapacityError("l_stage(" + std::to_string(n) +
                        ") exceeds the stage cap " + std::to_string(cap));
  SetId l = store.empty_set();
  for (unsigned i = 0; i < n; ++i) {
    if (store.card(l) > 8) {
      l = store.powerset(l);
      continue;
    }
    DefReport rep = definable_subsets(store, l, a, /*allow_params=*/true);
    std::vector<SetId> subsets;
    for (std::uint32_t mask : rep.masks)
      subsets.push_back(subset_of_mask(store, rep, mask));
    l = store.make_set(std::move(subsets));
  }
  return l;
}

// All permutations of m preserving membership (restricted to m x m) and
// A-membership; index i refers to the i-th element in canonical order.
inline std::vector<std::vector<std::uint32_t>> automorphisms(SetStore& store,
                                                             SetId m, SetId a) {
  unsigned k = static_cast<unsigned>(store.card(m));
  if (k > 16)
    throw CapacityError("automorphisms carrier cap of 16 elements exceeded");
  const auto& elems = store.elems(m);
  std::vector<std::vector<bool>> mem(k, std::vector<bool>(k, false));
  std::vector<bool> in_a(k, false);
  for (unsigned i = 0; i < k; ++i) {
    in_a[i] = store.contains(a, elems[i]);
    for (unsigned j = 0; j < k; ++j) mem[i][j] = store.contains(elems[j], elems[i]);
  }
  std::vector<std::vector<std::uint32_t>> result;
  std::vector<std::uint32_t> perm(k, 0);
  std::vector<bool> used(k, false);
  auto consistent = [&](unsigned pos, unsigned img) {
    if (in_a[pos] != in_a[img]) return false;
    for (unsigned j = 0; j < pos; ++j) {
      if (mem[pos][j] != mem[img][perm[j]]) return false;
      if (mem[j][pos] != mem[perm[j]][img]) return false;
    }
    return mem[pos][pos] == mem[img][img];
  };
  auto rec = [&](auto&& self, unsigned pos) -> void {
    if (pos == k) {
      result.push_back(perm);
      return;
    }
    for (unsigned img = 0; img < k; ++img) {
      if (used[img] || !consistent(pos, img)) continue;
      perm[pos] = img;
      used[img] = true;
      self(self, pos + 1);
      used[img] = false;
    }
  };
  rec(rec, 0);
  return result;
}

}  // namespace hf
