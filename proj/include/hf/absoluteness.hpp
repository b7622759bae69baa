#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hf/enumerate.hpp"
#include "hf/errors.hpp"
#include "hf/eval.hpp"
#include "hf/formula.hpp"
#include "hf/kernel.hpp"
#include "hf/rng.hpp"

namespace hf {

struct AbsCheck {
  bool inner_value = false;
  bool outer_value = false;
  bool agree = false;
};

struct Disagreement {
  FormulaPtr formula;
  Environment env;
  Universe inner;
  Universe outer;
  bool inner_value = false;
  bool outer_value = false;
};

struct AbsolutenessReport {
  std::uint64_t trials = 0;
  std::uint64_t agreements = 0;
  std::vector<Disagreement> disagreements;
};

struct NonAbsoluteWitness {
  FormulaPtr formula;
  bool inner_value = false;
  bool outer_value = false;
};

namespace detail {

inline void collect_literals(const Formula& f, std::vector<BigNat>& out) {
  auto term = [&](const Term& t) {
    if (t.kind == Term::Kind::Lit) out.push_back(t.code);
  };
  term(f.t1);
  term(f.t2);
  if (f.a) collect_literals(*f.a, out);
  if (f.b) collect_literals(*f.b, out);
}

// Independent re-evaluator for witness verification: same semantics as
// eval, written as a separate straight-line recursion with linear
// membership scans, so a bug in one evaluator does not hide in both.
inline bool naive_eval(SetStore& store, const Formula& f, Environment env,
                       const Universe& u) {
  auto member = [&](SetId x, SetId s) {
    for (SetId e : store.elems(s))
      if (e == x) return true;
    return false;
  };
  auto value = [&](const Term& t) -> SetId {
    if (t.kind == Term::Kind::Var) return env.vars.at(t.name);
    if (t.kind == Term::Kind::Param) return env.params.at(t.name);
    return store.ackermann_decode(t.code);
  };
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Member:
      return member(value(f.t1), value(f.t2));
    case K::Equal:
      return value(f.t1) == value(f.t2);
    case K::PredA:
      return member(value(f.t1), u.pred_a);
    case K::Not:
      return !naive_eval(store, *f.a, env, u);
    case K::And:
      return naive_eval(store, *f.a, env, u) && naive_eval(store, *f.b, env, u);
    case K::Or:
      return naive_eval(store, *f.a, env, u) || naive_eval(store, *f.b, env, u);
    case K::Implies:
      return !naive_eval(store, *f.a, env, u) || naive_eval(store, *f.b, env, u);
    default: {
      bool universal = f.kind == K::Forall || f.kind == K::BForall;
      bool bounded = f.kind == K::BForall || f.kind == K::BExists;
      SetId range = bounded ? value(f.t2) : u.carrier;
      for (SetId m : store.elems(range)) {
        Environment sub = env;
        sub.vars[f.var] = m;
        bool v = naive_eval(store, *f.a, sub, u);
        if (universal != v) return v;  // short-circuit on the deciding value
      }
      return universal;
    }
  }
}

// Random transitive subset of the elements of the (transitive) stage:
// a coin-flip sample closed downward under membership.
inline SetId random_transitive_subset(SetStore& store, Rng& rng, SetId stage) {
  std::vector<SetId> stack;
  for (SetId e : store.elems(stage))
    if (rng.chance(1, 2)) stack.push_back(e);
  std::vector<SetId> closed;
  std::unordered_set<SetId> seen;
  while (!stack.empty()) {
    SetId x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second) continue;
    closed.push_back(x);
    for (SetId m : store.elems(x)) stack.push_back(m);
  }
  return store.make_set(std::move(closed));
}

// Bounded-formula generator: atoms / connectives / quantifiers weighted
// 3:2:2, with the quantifier branch decaying as the distance from the
// root grows. Terms are scope variables and parameters only — literal
// constants could denote sets outside a small inner universe, which the
// absoluteness statement does not cover.
inline FormulaPtr random_bounded_formula(Rng& rng, unsigned depth,
                                         std::vector<std::string>& scope,
                                         unsigned level, unsigned& counter) {
  auto term = [&]() -> Term {
    std::uint64_t n = scope.size() + 3;  // params p0..p2
    std::uint64_t pick = rng.below(n);
    if (pick < scope.size()) return Term::var(scope[pick]);
    return Term::param("p" + std::to_string(pick - scope.size()));
  };
  auto atom = [&]() -> FormulaPtr {
    switch (rng.below(5)) {
      case 0:
        return f_true();
      case 1:
        return f_false();
      case 2:
        return f_pred_a(term());
      case 3:
        return f_member(term(), term());
      default:
        return f_equal(term(), term());
    }
  };
  if (depth <= 1) return atom();
  std::uint64_t roll = rng.below(7);  // 0-2 atom, 3-4 connective, 5-6 quantifier
  bool quant = roll >= 5 && rng.chance(2, 2 + level);
  if (roll < 3 && !quant) return atom();
  if (quant) {
    bool universal = rng.chance(1, 2);
    Term bound = term();
    std::string v = "b" + std::to_string(counter++);
    scope.push_back(v);
    FormulaPtr body =
        random_bounded_formula(rng, depth - 1, scope, level + 1, counter);
    scope.pop_back();
    return universal ? f_bforall(v, bound, body) : f_bexists(v, bound, body);
  }
  if (rng.chance(1, 4))
    return f_not(random_bounded_formula(rng, depth - 1, scope, level + 1, counter));
  auto kind = rng.below(3) == 0   ? Formula::Kind::And
              : rng.below(2) == 0 ? Formula::Kind::Or
                                  : Formula::Kind::Implies;
  FormulaPtr l = random_bounded_formula(rng, depth - 1, scope, level + 1, counter);
  FormulaPtr r = random_bounded_formula(rng, depth - 1, scope, level + 1, counter);
  return f_binary(kind, std::move(l), std::move(r));
}

inline FormulaPtr random_bounded_formula(Rng& rng, unsigned max_depth) {
  std::vector<std::string> scope = {"x", "y"};
  unsigned counter = 0;
  return random_bounded_formula(rng, max_depth, scope, 0, counter);
}

}  // namespace detail

// Evaluates a bounded formula in both universes and reports agreement.
// For valid inputs (transitive inner carrier contained in the outer one,
// matching predicates, environment and literals inside the inner
// carrier) the verdicts must agree — that is the absoluteness property.
inline AbsCheck check_absolute(SetStore& store, const FormulaPtr& f,
                               const Environment& env, const Universe& inner,
                               const Universe& outer) {
  if (!is_bounded(*f))
    throw PreconditionError("check_absolute requires a bounded formula: " +
                            print(f));
  if (!store.is_transitive(inner.carrier))
    throw PreconditionError("inner carrier is not transitive: " +
                            store.print(inner.carrier));
  for (SetId e : store.elems(inner.carrier))
    if (!store.contains(outer.carrier, e))
      throw PreconditionError("inner carrier is not a subset of the outer one");
  std::vector<SetId> restricted;
  for (SetId e : store.elems(outer.pred_a))
    if (store.contains(inner.carrier, e)) restricted.push_back(e);
  if (store.make_set(std::move(restricted)) != inner.pred_a)
    throw PreconditionError(
        "inner predicate differs from the outer one restricted to the inner "
        "carrier");
  auto check_value = [&](SetId v, const std::string& what) {
    if (!store.contains(inner.carrier, v))
      throw PreconditionError(what + " " + store.print(v) +
                              " escapes the inner carrier");
  };
  for (const auto& [name, v] : env.vars) check_value(v, "variable " + name + " =");
  for (const auto& [name, v] : env.params)
    check_value(v, "parameter $" + name + " =");
  std::vector<BigNat> lits;
  detail::collect_literals(*f, lits);
  for (const BigNat& code : lits)
    check_value(store.ackermann_decode(code), "literal");
  AbsCheck r;
  r.inner_value = eval(store, f, env, inner);
  r.outer_value = eval(store, f, env, outer);
  r.agree = r.inner_value == r.outer_value;
  return r;
}

// Seeded property harness for bounded absoluteness: random bounded
// formulas, random transitive inner universes (arbitrary transitive
// subsets of a stage, not only full stages), environments inside the
// inner carrier. Any disagreement is recorded in full for replay.
inline AbsolutenessReport fuzz_absoluteness(SetStore& store, std::uint64_t seed,
                                            std::uint64_t trials,
                                            unsigned max_depth,
                                            unsigned max_stage) {
  if (max_stage < 1 || max_stage > 4)
    throw PreconditionError("fuzz_absoluteness outer stage must be 1..4");
  AbsolutenessReport rep;
  for (std::uint64_t t = 0; t < trials; ++t) {
    // per-trial stream keyed by (seed, index): trial order never matters
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
    unsigned n = 1 + static_cast<unsigned>(rng.below(max_stage));
    SetId stage = store.v_stage(n);
    SetId inner_carrier = detail::random_transitive_subset(store, rng, stage);
    if (store.card(inner_carrier) == 0)
      inner_carrier = store.make_set({store.empty_set()});
    std::vector<SetId> pred;
    for (SetId e : store.elems(stage))
      if (rng.chance(1, 3)) pred.push_back(e);
    Universe outer = make_universe(store, stage, store.make_set(std::move(pred)));
    std::vector<SetId> pred_in;
    for (SetId e : store.elems(outer.pred_a))
      if (store.contains(inner_carrier, e)) pred_in.push_back(e);
    Universe inner =
        make_universe(store, inner_carrier, store.make_set(std::move(pred_in)));
    FormulaPtr f = detail::random_bounded_formula(
        rng, 1 + static_cast<unsigned>(rng.below(max_depth)));
    Environment env;
    auto pick = [&] {
      return store.elems(inner_carrier)[rng.below(store.card(inner_carrier))];
    };
    env.vars["x"] = pick();
    env.vars["y"] = pick();
    for (int p = 0; p < 3; ++p) env.params["p" + std::to_string(p)] = pick();
    AbsCheck c = check_absolute(store, f, env, inner, outer);
    ++rep.trials;
    if (c.agree) {
      ++rep.agreements;
    } else {
      rep.disagreements.push_back(
          Disagreement{f, env, inner, outer, c.inner_value, c.outer_value});
    }
  }
  return rep;
}

// Searches closed formulas in canonical enumeration order for one whose
// truth value differs between the two transitive universes. Bounded
// formulas are skipped (they cannot differ); every candidate returned
// has been confirmed by the independent re-evaluator first.
inline std::optional<NonAbsoluteWitness> find_nonabsolute(SetStore& store,
                                                          const Universe& inner,
                                                          const Universe& outer,
                                                          unsigned depth_budget) {
  if (!store.is_transitive(inner.carrier) || !store.is_transitive(outer.carrier))
    throw PreconditionError("find_nonabsolute requires transitive carriers");
  for (SetId e : store.elems(inner.carrier))
    if (!store.contains(outer.carrier, e))
      throw PreconditionError("inner carrier is not a subset of the outer one");
  if (inner.carrier == outer.carrier && inner.pred_a == outer.pred_a)
    return std::nullopt;  // identical structures never disagree
  std::optional<NonAbsoluteWitness> found;
  Environment env;
  FormulaEnumerator en({});
  en.for_each(depth_budget, [&](const FormulaPtr& f) {
    if (is_bounded(*f)) return true;
    bool vi = eval(store, f, env, inner);
    bool vo = eval(store, f, env, outer);
    if (vi == vo) return true;
    // confirm with the independent evaluator before trusting the witness
    if (detail::naive_eval(store, *f, env, inner) != vi ||
        detail::naive_eval(store, *f, env, outer) != vo)
      throw Error("evaluator disagreement on candidate witness: " + print(f));
    found = NonAbsoluteWitness{f, vi, vo};
    return false;
  });
  return found;
}

// One line per disagreement after a summary line; the summary alone is
// the non-verbose serialization.
inline std::string to_text(SetStore& store, const AbsolutenessReport& rep,
                           bool verbose = false) {
  std::string out = "trials " + std::to_string(rep.trials) + " agreements " +
                    std::to_string(rep.agreements) + " disagreements " +
                    std::to_string(rep.disagreements.size()) + "\n";
  if (!verbose) return out;
  for (const Disagreement& d : rep.disagreements) {
    out += print(d.formula) + "\tinner " + store.print(d.inner.carrier) +
           " -> " + (d.inner_value ? "true" : "false") + "\touter " +
           store.print(d.outer.carrier) + " -> " +
           (d.outer_value ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace hf
