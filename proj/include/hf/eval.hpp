#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hf/errors.hpp"
#include "hf/formula.hpp"
#include "hf/kernel.hpp"

namespace hf {

// A finite structure (U, in, A): carrier set U and a unary predicate
// A interpreted as a subset of the carrier. "Unbounded" quantifiers
// range over the carrier; that relativity is the whole point of the
// non-absoluteness demos.
struct Universe {
  SetId carrier;
  SetId pred_a;
};

inline Universe make_universe(SetStore& store, SetId carrier, SetId pred_a) {
  for (SetId x : store.elems(pred_a))
    if (!store.contains(carrier, x))
      throw PreconditionError("predicate A is not a subset of the carrier");
  return Universe{carrier, pred_a};
}

struct Environment {
  std::map<std::string, SetId> vars;
  std::map<std::string, SetId> params;
};

namespace detail {

inline SetId term_value(SetStore& store, const Term& t, const Environment& env) {
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = env.vars.find(t.name);
      if (it == env.vars.end())
        throw PreconditionError("unbound variable: " + t.name);
      return it->second;
    }
    case Term::Kind::Param: {
      auto it = env.params.find(t.name);
      if (it == env.params.end())
        throw PreconditionError("unbound parameter: $" + t.name);
      return it->second;
    }
    default:
      return store.ackermann_decode(t.code);
  }
}

inline bool eval_rec(SetStore& store, const Formula& f, Environment& env,
                     const Universe& u, bool strict) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Member:
      return store.contains(term_value(store, f.t2, env),
                            term_value(store, f.t1, env));
    case K::Equal:
      return term_value(store, f.t1, env) == term_value(store, f.t2, env);
    case K::PredA:
      return store.contains(u.pred_a, term_value(store, f.t1, env));
    case K::Not:
      return !eval_rec(store, *f.a, env, u, strict);
    case K::And:
      return eval_rec(store, *f.a, env, u, strict) &&
             eval_rec(store, *f.b, env, u, strict);
    case K::Or:
      return eval_rec(store, *f.a, env, u, strict) ||
             eval_rec(store, *f.b, env, u, strict);
    case K::Implies:
      return !eval_rec(store, *f.a, env, u, strict) ||
             eval_rec(store, *f.b, env, u, strict);
    default: {
      bool universal = f.kind == K::Forall || f.kind == K::BForall;
      bool bounded = f.kind == K::BForall || f.kind == K::BExists;
      // Bounded quantifiers iterate the true members of the bound value
      // (membership is absolute); unbounded ones iterate the carrier.
      std::vector<SetId> range;
      if (bounded) {
        SetId bound = term_value(store, f.t2, env);
        range = store.elems(bound);
        if (strict)
          for (SetId m : range)
            if (!store.contains(u.carrier, m))
              throw PreconditionError(
                  "bound value has a member outside the carrier (strict mode)");
      } else {
        range = store.elems(u.carrier);
      }
      auto saved = env.vars.find(f.var) != env.vars.end()
                       ? std::optional<SetId>(env.vars[f.var])
                       : std::nullopt;
      bool result = universal;
      for (SetId m : range) {  // canonical member order, short-circuiting
        env.vars[f.var] = m;
        bool v = eval_rec(store, *f.a, env, u, strict);
        if (universal && !v) {
          result = false;
          break;
        }
        if (!universal && v) {
          result = true;
          break;
        }
      }
      if (saved)
        env.vars[f.var] = *saved;
      else
        env.vars.erase(f.var);
      return result;
    }
  }
}

}  // namespace detail

// Tarskian truth of f over u under env. Throws PreconditionError on
// unbound variables/parameters; strict mode additionally rejects bound
// values reaching outside the carrier (transitive carriers never do).
inline bool eval(SetStore& store, const Formula& f, const Environment& env,
                 const Universe& u, bool strict = false) {
  Environment scratch = env;
  return detail::eval_rec(store, f, scratch, u, strict);
}

inline bool eval(SetStore& store, const FormulaPtr& f, const Environment& env,
                 const Universe& u, bool strict = false) {
  return eval(store, *f, env, u, strict);
}

namespace detail {
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}
inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}
}  // namespace detail

// Upper bound on atomic evaluations: product of quantifier ranges.
// Literal bounds count exactly; variable bounds are estimated by the
// carrier size.
inline std::uint64_t eval_cost(SetStore& store, const Formula& f,
                               const Universe& u) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Not:
      return eval_cost(store, *f.a, u);
    case K::And:
    case K::Or:
    case K::Implies:
      return detail::sat_add(eval_cost(store, *f.a, u),
                             eval_cost(store, *f.b, u));
    case K::Forall:
    case K::Exists:
      return detail::sat_mul(store.card(u.carrier), eval_cost(store, *f.a, u));
    case K::BForall:
    case K::BExists: {
      std::uint64_t range = f.t2.kind == Term::Kind::Lit
                                ? store.card(store.ackermann_decode(f.t2.code))
                                : store.card(u.carrier);
      return detail::sat_mul(range, eval_cost(store, *f.a, u));
    }
    default:
      return 1;
  }
}

}  // namespace hf
