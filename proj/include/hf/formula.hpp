#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>

#include "hf/kernel.hpp"

namespace hf {

// Terms of the set-theoretic language: variables, named parameters
// ("$name", resolved at evaluation time), and inline set literals.
// Literals are carried as Ackermann codes so formulas stay independent
// of any particular SetStore.
struct Term {
  enum class Kind { Var, Param, Lit };
  Kind kind = Kind::Var;
  std::string name;
  BigNat code;

  static Term var(std::string n) { return {Kind::Var, std::move(n), 0}; }
  static Term param(std::string n) { return {Kind::Param, std::move(n), 0}; }
  static Term lit(BigNat c) { return {Kind::Lit, "", std::move(c)}; }

  bool operator==(const Term& o) const {
    return kind == o.kind && name == o.name && code == o.code;
  }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Signature {in, =, A}: membership, equality, one unary predicate A.
// Quantifiers come bounded ("Q x in t . f") and unbounded ("Q x . f").
struct Formula {
  enum class Kind {
    True,
    False,
    Member,   // t1 in t2
    Equal,    // t1 = t2
    PredA,    // A(t1)
    Not,      // !a
    And,      // a & b
    Or,       // a | b
    Implies,  // a -> b
    Forall,   // forall var . a
    Exists,   // exists var . a
    BForall,  // forall var in t2 . a
    BExists,  // exists var in t2 . a
  };
  Kind kind = Kind::True;
  Term t1, t2;  // atoms; t2 doubles as the bound of BForall/BExists
  std::string var;
  FormulaPtr a, b;
};

inline FormulaPtr f_true() { return std::make_shared<Formula>(Formula{Formula::Kind::True}); }
inline FormulaPtr f_false() { return std::make_shared<Formula>(Formula{Formula::Kind::False}); }
inline FormulaPtr f_member(Term l, Term r) {
  return std::make_shared<Formula>(Formula{Formula::Kind::Member, std::move(l), std::move(r)});
}
inline FormulaPtr f_equal(Term l, Term r) {
  return std::make_shared<Formula>(Formula{Formula::Kind::Equal, std::move(l), std::move(r)});
}
inline FormulaPtr f_pred_a(Term t) {
  return std::make_shared<Formula>(Formula{Formula::Kind::PredA, std::move(t)});
}
inline FormulaPtr f_not(FormulaPtr f) {
  Formula r{Formula::Kind::Not};
  r.a = std::move(f);
  return std::make_shared<Formula>(std::move(r));
}
inline FormulaPtr f_binary(Formula::Kind k, FormulaPtr l, FormulaPtr rr) {
  Formula r{k};
  r.a = std::move(l);
  r.b = std::move(rr);
  return std::make_shared<Formula>(std::move(r));
}
inline FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
  return f_binary(Formula::Kind::And, std::move(l), std::move(r));
}
inline FormulaPtr f_or(FormulaPtr l, FormulaPtr r) {
  return f_binary(Formula::Kind::Or, std::move(l), std::move(r));
}
inline FormulaPtr f_implies(FormulaPtr l, FormulaPtr r) {
  return f_binary(Formula::Kind::Implies, std::move(l), std::move(r));
}
inline FormulaPtr f_forall(std::string v, FormulaPtr body) {
  Formula r{Formula::Kind::Forall};
  r.var = std::move(v);
  r.a = std::move(body);
  return std::make_shared<Formula>(std::move(r));
}
inline FormulaPtr f_exists(std::string v, FormulaPtr body) {
  Formula r{Formula::Kind::Exists};
  r.var = std::move(v);
  r.a = std::move(body);
  return std::make_shared<Formula>(std::move(r));
}
inline FormulaPtr f_bforall(std::string v, Term bound, FormulaPtr body) {
  Formula r{Formula::Kind::BForall};
  r.var = std::move(v);
  r.t2 = std::move(bound);
  r.a = std::move(body);
  return std::make_shared<Formula>(std::move(r));
}
inline FormulaPtr f_bexists(std::string v, Term bound, FormulaPtr body) {
  Formula r{Formula::Kind::BExists};
  r.var = std::move(v);
  r.t2 = std::move(bound);
  r.a = std::move(body);
  return std::make_shared<Formula>(std::move(r));
}

inline bool equal(const Formula& x, const Formula& y) {
  if (x.kind != y.kind || x.var != y.var || !(x.t1 == y.t1) || !(x.t2 == y.t2))
    return false;
  if (bool(x.a) != bool(y.a) || bool(x.b) != bool(y.b)) return false;
  if (x.a && !equal(*x.a, *y.a)) return false;
  if (x.b && !equal(*x.b, *y.b)) return false;
  return true;
}
inline bool equal(const FormulaPtr& x, const FormulaPtr& y) { return equal(*x, *y); }

inline unsigned depth(const Formula& f) {
  unsigned d = 0;
  if (f.a) d = std::max(d, depth(*f.a));
  if (f.b) d = std::max(d, depth(*f.b));
  return d + 1;
}

inline bool is_bounded(const Formula& f) {
  if (f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::Exists)
    return false;
  if (f.a && !is_bounded(*f.a)) return false;
  if (f.b && !is_bounded(*f.b)) return false;
  return true;
}

namespace detail {
inline void collect_vars(const Formula& f, std::set<std::string>& bound,
                         std::set<std::string>& free, std::set<std::string>& params) {
  auto term = [&](const Term& t) {
    if (t.kind == Term::Kind::Var) {
      if (!bound.count(t.name)) free.insert(t.name);
    } else if (t.kind == Term::Kind::Param) {
      params.insert(t.name);
    }
  };
  switch (f.kind) {
    case Formula::Kind::Member:
    case Formula::Kind::Equal:
      term(f.t1);
      term(f.t2);
      return;
    case Formula::Kind::PredA:
      term(f.t1);
      return;
    case Formula::Kind::BForall:
    case Formula::Kind::BExists:
      term(f.t2);  // the bound sits in the outer scope
      [[fallthrough]];
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool fresh = bound.insert(f.var).second;
      collect_vars(*f.a, bound, free, params);
      if (fresh) bound.erase(f.var);
      return;
    }
    default:
      if (f.a) collect_vars(*f.a, bound, free, params);
      if (f.b) collect_vars(*f.b, bound, free, params);
  }
}
}  // namespace detail

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound, free, params;
  detail::collect_vars(f, bound, free, params);
  return free;
}

inline std::set<std::string> param_names(const Formula& f) {
  std::set<std::string> bound, free, params;
  detail::collect_vars(f, bound, free, params);
  return params;
}

inline std::string print(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name;
    case Term::Kind::Param:
      return "$" + t.name;
    default:
      return print_code(t.code);
  }
}

namespace detail {
// Precedence floors: quant 0 < implies 1 < or 2 < and 3 < not 4 < atom 5.
inline void print_formula(const Formula& f, int floor, std::string& out) {
  auto wrap = [&](int level, auto&& body) {
    bool parens = level < floor;
    if (parens) out += '(';
    body();
    if (parens) out += ')';
  };
  switch (f.kind) {
    case Formula::Kind::True:
      out += "true";
      return;
    case Formula::Kind::False:
      out += "false";
      return;
    case Formula::Kind::PredA:
      out += "A(" + print(f.t1) + ")";
      return;
    case Formula::Kind::Member:
      out += print(f.t1) + " in " + print(f.t2);
      return;
    case Formula::Kind::Equal:
      out += print(f.t1) + " = " + print(f.t2);
      return;
    case Formula::Kind::Not:
      wrap(4, [&] {
        out += '!';
        print_formula(*f.a, 4, out);
      });
      return;
    case Formula::Kind::And:
      wrap(3, [&] {
        print_formula(*f.a, 3, out);
        out += " & ";
        print_formula(*f.b, 4, out);
      });
      return;
    case Formula::Kind::Or:
      wrap(2, [&] {
        print_formula(*f.a, 2, out);
        out += " | ";
        print_formula(*f.b, 3, out);
      });
      return;
    case Formula::Kind::Implies:
      wrap(1, [&] {
        print_formula(*f.a, 2, out);
        out += " -> ";
        print_formula(*f.b, 1, out);
      });
      return;
    default:
      wrap(0, [&] {
        bool uni = f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::BForall;
        bool bnd = f.kind == Formula::Kind::BForall || f.kind == Formula::Kind::BExists;
        out += uni ? "forall " : "exists ";
        out += f.var;
        if (bnd) out += " in " + print(f.t2);
        out += " . ";
        print_formula(*f.a, 0, out);
      });
  }
}
}  // namespace detail

inline std::string print(const Formula& f) {
  std::string out;
  detail::print_formula(f, 0, out);
  return out;
}
inline std::string print(const FormulaPtr& f) { return print(*f); }

}  // namespace hf
