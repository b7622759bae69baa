#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hf/errors.hpp"
#include "hf/fol.hpp"
#include "hf/formula.hpp"
#include "hf/kernel.hpp"

namespace hf {

// ---- HF encoding of finite structures -------------------------------------

// Canonical encoding: domain elements as von Neumann numerals, tuples as
// right-nested Kuratowski pairs, each relation as its tuple set, the
// interpretation as a set of (relation index, tuple set) pairs, and the
// whole structure as the pair (domain, interpretation).
inline SetId encode_tuple(SetStore& store, const std::vector<unsigned>& t) {
  SetId acc = store.numeral(t.back());
  for (std::size_t i = t.size() - 1; i-- > 0;)
    acc = store.kuratowski_pair(store.numeral(t[i]), acc);
  return acc;
}

inline SetId encode_structure(SetStore& store, const FinStructure& m) {
  validate(m);
  if (m.size > 4)
    throw CapacityError("encode_structure domain cap is 4 elements");
  std::vector<SetId> domain;
  for (unsigned i = 0; i < m.size; ++i) domain.push_back(store.numeral(i));
  SetId d = store.make_set(std::move(domain));
  std::vector<SetId> entries;
  for (std::size_t r = 0; r < m.sig.size(); ++r) {
    std::vector<SetId> tuples;
    auto it = m.interp.find(m.sig[r].name);
    if (it != m.interp.end())
      for (const auto& t : it->second) tuples.push_back(encode_tuple(store, t));
    entries.push_back(store.kuratowski_pair(
        store.numeral(static_cast<unsigned>(r)), store.make_set(std::move(tuples))));
  }
  return store.kuratowski_pair(d, store.make_set(std::move(entries)));
}

namespace detail {

inline std::pair<SetId, SetId> kuratowski_split(SetStore& store, SetId p) {
  const auto& outer = store.elems(p);
  if (outer.size() == 1) {
    // {{a}} encodes (a, a)
    const auto& inner = store.elems(outer[0]);
    if (inner.size() != 1)
      throw PreconditionError("not a Kuratowski pair: " + store.print(p));
    return {inner[0], inner[0]};
  }
  if (outer.size() == 2) {
    SetId u = outer[0], v = outer[1];
    if (store.card(u) == 2) std::swap(u, v);
    if (store.card(u) == 1 && store.card(v) == 2) {
      SetId a = store.elems(u)[0];
      const auto& both = store.elems(v);
      if (both[0] == a) return {a, both[1]};
      if (both[1] == a) return {a, both[0]};
    }
  }
  throw PreconditionError("not a Kuratowski pair: " + store.print(p));
}

inline unsigned decode_numeral(SetStore& store, SetId v, unsigned bound) {
  for (unsigned i = 0; i < bound; ++i)
    if (store.numeral(i) == v) return i;
  throw PreconditionError("not a domain numeral: " + store.print(v));
}

inline std::vector<unsigned> decode_tuple(SetStore& store, SetId t,
                                          unsigned arity, unsigned size) {
  std::vector<unsigned> out;
  while (out.size() + 1 < arity) {
    auto [head, rest] = kuratowski_split(store, t);
    out.push_back(decode_numeral(store, head, size));
    t = rest;
  }
  out.push_back(decode_numeral(store, t, size));
  return out;
}

}  // namespace detail

// Inverse of encode_structure; the signature supplies the relation names
// and arities, which the encoding identifies by index only.
inline FinStructure decode_structure(SetStore& store, SetId s,
                                     const Signature& sig) {
  auto [d, interp] = detail::kuratowski_split(store, s);
  FinStructure m;
  m.size = static_cast<unsigned>(store.card(d));
  m.sig = sig;
  std::vector<SetId> domain;
  for (unsigned i = 0; i < m.size; ++i) domain.push_back(store.numeral(i));
  if (store.make_set(std::move(domain)) != d)
    throw PreconditionError("domain is not an initial segment of numerals");
  for (SetId entry : store.elems(interp)) {
    auto [idx, tuples] = detail::kuratowski_split(store, entry);
    unsigned r = detail::decode_numeral(store, idx,
                                        static_cast<unsigned>(sig.size()));
    auto& dst = m.interp[sig[r].name];
    for (SetId t : store.elems(tuples))
      dst.insert(detail::decode_tuple(store, t, sig[r].arity, m.size));
  }
  validate(m);
  return m;
}

// ---- satisfaction as a bounded formula ------------------------------------

namespace detail {

// Builders for the bounded pair-projection idioms. On genuine Kuratowski
// pairs p = {{a},{a,b}}: z is the first component iff z belongs to every
// member of p; z is the second iff it belongs to some member and, when it
// also belongs to every member, all members' members equal z (the a = b
// case).
class SatTranslator {
 public:
  SatTranslator(SetStore& store, const Signature& sig)
      : store_(store), sig_(sig) {}

  FormulaPtr translate(const FOFormula& phi) {
    Term m = Term::param("M");
    FormulaPtr body = go(phi);
    FormulaPtr inner =
        exists_component(m, "I", f_and(is_second(m, Term::var("I")), body));
    return exists_component(m, "D", f_and(is_first(m, Term::var("D")), inner));
  }

 private:
  std::string fresh() { return "h" + std::to_string(counter_++); }

  static std::string setvar(const std::string& fo_var) { return "x_" + fo_var; }

  FormulaPtr is_first(Term p, Term z) {
    std::string u = fresh();
    return f_bforall(u, p, f_member(z, Term::var(u)));
  }

  FormulaPtr is_second(Term p, Term z) {
    std::string u1 = fresh(), u2 = fresh(), u3 = fresh(), w = fresh();
    FormulaPtr somewhere = f_bexists(u1, p, f_member(z, Term::var(u1)));
    FormulaPtr everywhere = f_bforall(u2, p, f_member(z, Term::var(u2)));
    FormulaPtr degenerate =
        f_bforall(u3, p, f_bforall(w, Term::var(u3), f_equal(Term::var(w), z)));
    return f_and(somewhere, f_implies(everywhere, degenerate));
  }

  // exists v, bound to the named component of the pair p: v runs over
  // the members of members of p, filtered by `body` (which should pin v
  // down via is_first/is_second).
  FormulaPtr exists_component(Term p, const std::string& v, FormulaPtr body) {
    std::string u = fresh();
    return f_bexists(u, p, f_bexists(v, Term::var(u), std::move(body)));
  }

  // membership of the right-nested tuple (terms...) in the set R
  FormulaPtr tuple_member(Term r, const std::vector<Term>& terms,
                          std::size_t from) {
    if (from + 1 == terms.size()) {
      // arity-1 relations hold plain elements
      return f_member(terms[from], r);
    }
    std::string t = fresh();
    Term tv = Term::var(t);
    return f_bexists(t, r, pair_chain(tv, terms, from));
  }

  FormulaPtr pair_chain(Term p, const std::vector<Term>& terms,
                        std::size_t from) {
    if (from + 2 == terms.size())
      return f_and(is_first(p, terms[from]), is_second(p, terms[from + 1]));
    std::string rest = fresh();
    Term rv = Term::var(rest);
    FormulaPtr tail = exists_component(
        p, rest, f_and(is_second(p, rv), pair_chain(rv, terms, from + 1)));
    return f_and(is_first(p, terms[from]), tail);
  }

  FormulaPtr go(const FOFormula& f) {
    using K = FOFormula::Kind;
    switch (f.kind) {
      case K::True:
        return f_true();
      case K::False:
        return f_false();
      case K::Eq:
        return f_equal(Term::var(setvar(f.args[0])), Term::var(setvar(f.args[1])));
      case K::Rel: {
        std::size_t idx = 0;
        while (idx < sig_.size() && sig_[idx].name != f.rel) ++idx;
        Term index_lit = Term::lit(
            store_.ackermann_code(store_.numeral(static_cast<unsigned>(idx))));
        std::vector<Term> terms;
        for (const std::string& v : f.args) terms.push_back(Term::var(setvar(v)));
        std::string r = fresh();
        Term rv = Term::var(r);
        FormulaPtr with_r = exists_component(
            rv, "R",
            f_and(is_second(rv, Term::var("R")),
                  tuple_member(Term::var("R"), terms, 0)));
        return f_bexists(
            r, Term::var("I"),
            f_and(is_first(rv, index_lit), std::move(with_r)));
      }
      case K::Not:
        return f_not(go(*f.a));
      case K::And:
        return f_and(go(*f.a), go(*f.b));
      case K::Or:
        return f_or(go(*f.a), go(*f.b));
      case K::Implies:
        return f_implies(go(*f.a), go(*f.b));
      default: {
        FormulaPtr body = go(*f.a);
        Term d = Term::var("D");
        return f.kind == K::Forall ? f_bforall(setvar(f.var), d, std::move(body))
                                   : f_bexists(setvar(f.var), d, std::move(body));
      }
    }
  }

  SetStore& store_;
  const Signature& sig_;
  unsigned counter_ = 0;
};

}  // namespace detail

// Bounded set-theoretic formula sigma with the single parameter $M such
// that evaluating sigma with $M bound to encode_structure(m) — over any
// universe, the formula being bounded — equals m |= phi. The translation
// depends only on the signature, not on the particular structure.
inline FormulaPtr sat_to_bounded(SetStore& store, const FOFormula& phi,
                                 const Signature& sig) {
  fo_check_signature(phi, sig);
  if (!fo_free_vars(phi).empty())
    throw PreconditionError("sat_to_bounded requires a closed sentence");
  return detail::SatTranslator(store, sig).translate(phi);
}

inline FormulaPtr sat_to_bounded(SetStore& store, const FOFormulaPtr& phi,
                                 const Signature& sig) {
  return sat_to_bounded(store, *phi, sig);
}

// ---- completeness checking ------------------------------------------------

struct Counterexample {
  FOFormulaPtr sentence;
  FinStructure model_true;
  FinStructure model_false;
};

struct CompletenessResult {
  enum class Verdict { Complete, Incomplete, Inconsistent } verdict =
      Verdict::Complete;
  std::optional<Counterexample> counterexample;
  std::size_t models = 0;  // models of the theory within the size cap
};

// Enumerates all models of the theory with domain size <= size_cap; with
// no models the theory is inconsistent (within the cap); otherwise the
// first sentence of depth <= depth_cap true in one model and false in
// another witnesses incompleteness; with none, the theory is complete
// relative to the caps.
inline CompletenessResult check_complete_upto(const Theory& t, unsigned size_cap,
                                              unsigned depth_cap) {
  if (size_cap < 1 || size_cap > 4)
    throw PreconditionError("check_complete_upto size cap must be 1..4");
  if (depth_cap < 1 || depth_cap > 4)
    throw PreconditionError("check_complete_upto depth cap must be 1..4");
  for (const FOFormulaPtr& s : t.sentences) {
    fo_check_signature(*s, t.sig);
    if (!fo_free_vars(*s).empty())
      throw PreconditionError("theory sentences must be closed");
  }
  std::vector<FinStructure> models;
  for (unsigned n = 1; n <= size_cap; ++n)
    for (FinStructure& m : enumerate_structures(t.sig, n)) {
      bool ok = true;
      for (const FOFormulaPtr& s : t.sentences) ok = ok && fo_eval(m, s);
      if (ok) models.push_back(std::move(m));
    }
  CompletenessResult result;
  result.models = models.size();
  if (models.empty()) {
    result.verdict = CompletenessResult::Verdict::Inconsistent;
    return result;
  }
  FOEnumerator en(t.sig);
  en.for_each(depth_cap, [&](const FOFormulaPtr& f) {
    if (!fo_free_vars(*f).empty()) return true;
    const FinStructure* first_true = nullptr;
    const FinStructure* first_false = nullptr;
    for (const FinStructure& m : models) {
      (fo_eval(m, f) ? first_true : first_false) = &m;
      if (first_true && first_false) break;
    }
    if (first_true && first_false) {
      result.verdict = CompletenessResult::Verdict::Incomplete;
      result.counterexample = Counterexample{f, *first_true, *first_false};
      return false;
    }
    return true;
  });
  return result;
}

}  // namespace hf
