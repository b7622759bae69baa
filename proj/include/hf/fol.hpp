#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hf/errors.hpp"

namespace hf {

// Relational signature: named relations with positive arities.
struct RelSym {
  std::string name;
  unsigned arity = 1;
};

using Signature = std::vector<RelSym>;

// A finite first-order structure over a relational signature: domain
// {0, ..., size-1} and, per relation, the set of tuples it holds of.
struct FinStructure {
  unsigned size = 1;
  Signature sig;
  std::map<std::string, std::set<std::vector<unsigned>>> interp;
};

inline void validate(const FinStructure& m) {
  if (m.size == 0)
    throw PreconditionError("structures have nonempty domains");
  for (const auto& [name, tuples] : m.interp) {
    auto it = std::find_if(m.sig.begin(), m.sig.end(),
                           [&](const RelSym& r) { return r.name == name; });
    if (it == m.sig.end())
      throw PreconditionError("interpretation of undeclared relation " + name);
    for (const auto& t : tuples) {
      if (t.size() != it->arity)
        throw PreconditionError("tuple arity mismatch for " + name);
      for (unsigned v : t)
        if (v >= m.size)
          throw PreconditionError("tuple element out of domain for " + name);
    }
  }
}

inline FinStructure permute_structure(const FinStructure& m,
                                      const std::vector<unsigned>& perm) {
  FinStructure out;
  out.size = m.size;
  out.sig = m.sig;
  for (const auto& [name, tuples] : m.interp) {
    auto& dst = out.interp[name];
    for (const auto& t : tuples) {
      std::vector<unsigned> u(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) u[i] = perm[t[i]];
      dst.insert(std::move(u));
    }
  }
  return out;
}

// First-order formulas over a relational signature with equality.
struct FOFormula;
using FOFormulaPtr = std::shared_ptr<const FOFormula>;

struct FOFormula {
  enum class Kind {
    True,
    False,
    Eq,       // v1 = v2
    Rel,      // R(v1, ..., vk)
    Not,
    And,
    Or,
    Implies,
    Forall,
    Exists,
  };
  Kind kind = Kind::True;
  std::string rel;                 // Rel
  std::vector<std::string> args;   // Rel arguments; Eq uses args[0], args[1]
  std::string var;                 // quantifiers
  FOFormulaPtr a, b;
};

inline FOFormulaPtr fo_true() {
  return std::make_shared<FOFormula>(FOFormula{FOFormula::Kind::True});
}
inline FOFormulaPtr fo_false() {
  return std::make_shared<FOFormula>(FOFormula{FOFormula::Kind::False});
}
inline FOFormulaPtr fo_eq(std::string x, std::string y) {
  FOFormula f{FOFormula::Kind::Eq};
  f.args = {std::move(x), std::move(y)};
  return std::make_shared<FOFormula>(std::move(f));
}
inline FOFormulaPtr fo_rel(std::string r, std::vector<std::string> args) {
  FOFormula f{FOFormula::Kind::Rel};
  f.rel = std::move(r);
  f.args = std::move(args);
  return std::make_shared<FOFormula>(std::move(f));
}
inline FOFormulaPtr fo_not(FOFormulaPtr a) {
  FOFormula f{FOFormula::Kind::Not};
  f.a = std::move(a);
  return std::make_shared<FOFormula>(std::move(f));
}
inline FOFormulaPtr fo_binary(FOFormula::Kind k, FOFormulaPtr a, FOFormulaPtr b) {
  FOFormula f{k};
  f.a = std::move(a);
  f.b = std::move(b);
  return std::make_shared<FOFormula>(std::move(f));
}
inline FOFormulaPtr fo_quant(FOFormula::Kind k, std::string v, FOFormulaPtr a) {
  FOFormula f{k};
  f.var = std::move(v);
  f.a = std::move(a);
  return std::make_shared<FOFormula>(std::move(f));
}

inline unsigned fo_depth(const FOFormula& f) {
  unsigned d = 0;
  if (f.a) d = std::max(d, fo_depth(*f.a));
  if (f.b) d = std::max(d, fo_depth(*f.b));
  return d + 1;
}

inline void fo_free_vars(const FOFormula& f, std::set<std::string>& bound,
                         std::set<std::string>& free) {
  switch (f.kind) {
    case FOFormula::Kind::Eq:
    case FOFormula::Kind::Rel:
      for (const std::string& v : f.args)
        if (!bound.count(v)) free.insert(v);
      return;
    case FOFormula::Kind::Forall:
    case FOFormula::Kind::Exists: {
      bool fresh = bound.insert(f.var).second;
      fo_free_vars(*f.a, bound, free);
      if (fresh) bound.erase(f.var);
      return;
    }
    default:
      if (f.a) fo_free_vars(*f.a, bound, free);
      if (f.b) fo_free_vars(*f.b, bound, free);
  }
}

inline std::set<std::string> fo_free_vars(const FOFormula& f) {
  std::set<std::string> bound, free;
  fo_free_vars(f, bound, free);
  return free;
}

inline void fo_check_signature(const FOFormula& f, const Signature& sig) {
  if (f.kind == FOFormula::Kind::Rel) {
    auto it = std::find_if(sig.begin(), sig.end(),
                           [&](const RelSym& r) { return r.name == f.rel; });
    if (it == sig.end())
      throw PreconditionError("relation " + f.rel + " is not in the signature");
    if (it->arity != f.args.size())
      throw PreconditionError("relation " + f.rel + " expects " +
                              std::to_string(it->arity) + " arguments");
  }
  if (f.a) fo_check_signature(*f.a, sig);
  if (f.b) fo_check_signature(*f.b, sig);
}

namespace detail {
// Same precedence floors as the set-theoretic printer.
inline void fo_print(const FOFormula& f, int floor, std::string& out) {
  auto wrap = [&](int level, auto&& body) {
    bool parens = level < floor;
    if (parens) out += '(';
    body();
    if (parens) out += ')';
  };
  switch (f.kind) {
    case FOFormula::Kind::True:
      out += "true";
      return;
    case FOFormula::Kind::False:
      out += "false";
      return;
    case FOFormula::Kind::Eq:
      out += f.args[0] + " = " + f.args[1];
      return;
    case FOFormula::Kind::Rel: {
      out += f.rel + "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += ",";
        out += f.args[i];
      }
      out += ")";
      return;
    }
    case FOFormula::Kind::Not:
      wrap(4, [&] {
        out += '!';
        fo_print(*f.a, 4, out);
      });
      return;
    case FOFormula::Kind::And:
      wrap(3, [&] {
        fo_print(*f.a, 3, out);
        out += " & ";
        fo_print(*f.b, 4, out);
      });
      return;
    case FOFormula::Kind::Or:
      wrap(2, [&] {
        fo_print(*f.a, 2, out);
        out += " | ";
        fo_print(*f.b, 3, out);
      });
      return;
    case FOFormula::Kind::Implies:
      wrap(1, [&] {
        fo_print(*f.a, 2, out);
        out += " -> ";
        fo_print(*f.b, 1, out);
      });
      return;
    default:
      wrap(0, [&] {
        out += f.kind == FOFormula::Kind::Forall ? "forall " : "exists ";
        out += f.var + " . ";
        fo_print(*f.a, 0, out);
      });
  }
}
}  // namespace detail

inline std::string print(const FOFormula& f) {
  std::string out;
  detail::fo_print(f, 0, out);
  return out;
}
inline std::string print(const FOFormulaPtr& f) { return print(*f); }

// Direct Tarskian evaluation over the structure's domain; this is the
// reference oracle the set-theoretic translation is checked against.
inline bool fo_eval(const FinStructure& m, const FOFormula& f,
                    std::map<std::string, unsigned>& env) {
  using K = FOFormula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Eq: {
      auto a = env.find(f.args[0]), b = env.find(f.args[1]);
      if (a == env.end() || b == env.end())
        throw PreconditionError("unbound variable in FO formula");
      return a->second == b->second;
    }
    case K::Rel: {
      std::vector<unsigned> t;
      for (const std::string& v : f.args) {
        auto it = env.find(v);
        if (it == env.end())
          throw PreconditionError("unbound variable in FO formula");
        t.push_back(it->second);
      }
      auto it = m.interp.find(f.rel);
      return it != m.interp.end() && it->second.count(t);
    }
    case K::Not:
      return !fo_eval(m, *f.a, env);
    case K::And:
      return fo_eval(m, *f.a, env) && fo_eval(m, *f.b, env);
    case K::Or:
      return fo_eval(m, *f.a, env) || fo_eval(m, *f.b, env);
    case K::Implies:
      return !fo_eval(m, *f.a, env) || fo_eval(m, *f.b, env);
    default: {
      bool universal = f.kind == K::Forall;
      auto saved = env.find(f.var) != env.end()
                       ? std::make_pair(true, env[f.var])
                       : std::make_pair(false, 0u);
      bool result = universal;
      for (unsigned e = 0; e < m.size; ++e) {
        env[f.var] = e;
        bool v = fo_eval(m, *f.a, env);
        if (universal != v) {
          result = v;
          break;
        }
      }
      if (saved.first)
        env[f.var] = saved.second;
      else
        env.erase(f.var);
      return result;
    }
  }
}

inline bool fo_eval(const FinStructure& m, const FOFormulaPtr& f) {
  std::map<std::string, unsigned> env;
  return fo_eval(m, *f, env);
}

// ---- parsing -------------------------------------------------------------

namespace detail {

// Recursive-descent FO parser mirroring the set-formula grammar:
// not > and > or > implies, right-associative implies, quantifier bodies
// extend maximally right; `R(x,y)` is a relation atom when R is declared,
// any other identifier is a variable.
class FOParser {
 public:
  FOParser(std::string text, const Signature* sig)
      : text_(std::move(text)), sig_(sig) {}

  FOFormulaPtr parse() {
    FOFormulaPtr f = parse_impl();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (text_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool peek_word(const std::string& w) {
    skip_ws();
    if (text_.compare(pos_, w.size(), w) != 0) return false;
    std::size_t end = pos_ + w.size();
    return end >= text_.size() ||
           !(std::isalnum(static_cast<unsigned char>(text_[end])) ||
             text_[end] == '_');
  }

  bool eat_word(const std::string& w) {
    if (!peek_word(w)) return false;
    pos_ += w.size();
    return true;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start)
      fail(pos_ >= text_.size() ? "unexpected end of input"
                                : "expected an identifier");
    return text_.substr(start, pos_ - start);
  }

  FOFormulaPtr parse_impl() { return parse_implies(); }

  FOFormulaPtr parse_implies() {
    FOFormulaPtr l = parse_or();
    if (eat("->"))
      return fo_binary(FOFormula::Kind::Implies, std::move(l), parse_implies());
    return l;
  }

  FOFormulaPtr parse_or() {
    FOFormulaPtr l = parse_and();
    while (eat("|")) l = fo_binary(FOFormula::Kind::Or, std::move(l), parse_and());
    return l;
  }

  FOFormulaPtr parse_and() {
    FOFormulaPtr l = parse_neg();
    while (eat("&")) l = fo_binary(FOFormula::Kind::And, std::move(l), parse_neg());
    return l;
  }

  FOFormulaPtr parse_neg() {
    if (eat("!")) return fo_not(parse_neg());
    return parse_atom();
  }

  FOFormulaPtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (eat_word("true")) return fo_true();
    if (eat_word("false")) return fo_false();
    bool universal = eat_word("forall");
    if (universal || eat_word("exists")) {
      std::string v = ident();
      if (!eat(".")) fail("expected '.' after the quantified variable");
      return fo_quant(universal ? FOFormula::Kind::Forall : FOFormula::Kind::Exists,
                      std::move(v), parse_impl());
    }
    if (eat("(")) {
      FOFormulaPtr f = parse_impl();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    std::string name = ident();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(' && is_relation(name)) {
      ++pos_;
      std::vector<std::string> args;
      if (!eat(")")) {
        args.push_back(ident());
        while (eat(",")) args.push_back(ident());
        if (!eat(")")) fail("expected ')' after relation arguments");
      }
      FOFormulaPtr f = fo_rel(name, std::move(args));
      if (sig_) fo_check_signature(*f, *sig_);
      return f;
    }
    if (!eat("=")) fail("expected '=' after variable " + name);
    return fo_eq(std::move(name), ident());
  }

  bool is_relation(const std::string& name) const {
    if (!sig_) return false;
    return std::any_of(sig_->begin(), sig_->end(),
                       [&](const RelSym& r) { return r.name == name; });
  }

  std::string text_;
  const Signature* sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FOFormulaPtr parse_fo_formula(const std::string& text,
                                     const Signature& sig) {
  return detail::FOParser(text, &sig).parse();
}

// ---- theories ------------------------------------------------------------

struct Theory {
  Signature sig;
  std::vector<FOFormulaPtr> sentences;
};

// Theory file: a `sig` line declaring `Name/arity` relations (possibly
// none), then one closed sentence per line. Blank lines and lines
// starting with '#' are skipped.
inline Theory parse_theory(const std::string& text) {
  Theory t;
  std::size_t pos = 0;
  int lineno = 0;
  bool have_sig = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    ++lineno;
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b != std::string::npos && line[b] != '#') {
      line = line.substr(b);
      if (!have_sig) {
        if (line.compare(0, 3, "sig") != 0)
          throw ParseError("theory files start with a 'sig' line", lineno, 1);
        std::size_t p = 3;
        while (p < line.size()) {
          while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p])))
            ++p;
          if (p >= line.size()) break;
          std::size_t slash = line.find('/', p);
          std::size_t end = line.find_first_of(" \t", p);
          if (end == std::string::npos) end = line.size();
          if (slash == std::string::npos || slash >= end)
            throw ParseError("expected Name/arity in the sig line", lineno,
                             static_cast<int>(p) + 1);
          RelSym r;
          r.name = line.substr(p, slash - p);
          try {
            r.arity = static_cast<unsigned>(
                std::stoul(line.substr(slash + 1, end - slash - 1)));
          } catch (...) {
            throw ParseError("bad arity for relation " + r.name, lineno,
                             static_cast<int>(slash) + 2);
          }
          if (r.name.empty() || r.arity == 0)
            throw ParseError("relations need a name and a positive arity",
                             lineno, static_cast<int>(p) + 1);
          t.sig.push_back(std::move(r));
          p = end;
        }
        have_sig = true;
      } else {
        FOFormulaPtr f;
        try {
          f = parse_fo_formula(line, t.sig);
        } catch (const ParseError& e) {
          throw ParseError(e.what(), lineno, e.column);
        }
        if (!fo_free_vars(*f).empty())
          throw ParseError("theory sentences must be closed", lineno, 1);
        t.sentences.push_back(std::move(f));
      }
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  if (!have_sig) throw ParseError("theory files start with a 'sig' line", 1, 1);
  return t;
}

// ---- enumeration ----------------------------------------------------------

// All structures over the signature with the exact domain size, in a
// deterministic odometer order over relation tuple sets.
inline std::vector<FinStructure> enumerate_structures(const Signature& sig,
                                                      unsigned size) {
  if (size == 0) throw PreconditionError("structures have nonempty domains");
  std::vector<std::vector<std::vector<unsigned>>> slots;  // per rel, all tuples
  double log2_total = 0;
  for (const RelSym& r : sig) {
    std::vector<std::vector<unsigned>> tuples{{}};
    for (unsigned i = 0; i < r.arity; ++i) {
      std::vector<std::vector<unsigned>> next;
      for (unsigned e = 0; e < size; ++e)
        for (auto t : tuples) {
          t.push_back(e);
          next.push_back(std::move(t));
        }
      tuples = std::move(next);
    }
    log2_total += static_cast<double>(tuples.size());
    slots.push_back(std::move(tuples));
  }
  if (log2_total > 20)
    throw CapacityError("structure enumeration would exceed 2^20 candidates");
  std::vector<FinStructure> out;
  std::vector<std::uint32_t> mask(sig.size(), 0);
  for (;;) {
    FinStructure m;
    m.size = size;
    m.sig = sig;
    for (std::size_t r = 0; r < sig.size(); ++r) {
      auto& dst = m.interp[sig[r].name];
      for (std::size_t i = 0; i < slots[r].size(); ++i)
        if (mask[r] & (std::uint32_t{1} << i)) dst.insert(slots[r][i]);
    }
    out.push_back(std::move(m));
    std::size_t r = 0;
    while (r < sig.size()) {
      if (++mask[r] < (std::uint32_t{1} << slots[r].size())) break;
      mask[r] = 0;
      ++r;
    }
    if (r == sig.size()) break;
  }
  return out;
}

// Canonical enumeration of FO formulas by exact depth, with the obvious
// Boolean normalizations (no double negation; conjunct/disjunct pairs in
// canonical order) to shrink the sentence search space. Quantifiers
// introduce fresh variables q1, q2, ...
class FOEnumerator {
 public:
  static constexpr unsigned kMaxDepthBudget = 4;

  explicit FOEnumerator(Signature sig) : sig_(std::move(sig)) {}

  void for_each(unsigned max_depth,
                const std::function<bool(const FOFormulaPtr&)>& visit) {
    if (max_depth > kMaxDepthBudget)
      throw CapacityError("FO enumeration depth " + std::to_string(max_depth) +
                          " exceeds budget " + std::to_string(kMaxDepthBudget));
    for (unsigned d = 1; d <= max_depth; ++d)
      for (const FOFormulaPtr& f : level(d, 0))
        if (!visit(f)) return;
  }

  std::vector<FOFormulaPtr> up_to_depth(unsigned max_depth) {
    std::vector<FOFormulaPtr> out;
    for_each(max_depth, [&](const FOFormulaPtr& f) {
      out.push_back(f);
      return true;
    });
    return out;
  }

 private:
  std::vector<std::string> context_vars(unsigned nv) const {
    std::vector<std::string> vs;
    for (unsigned i = 1; i <= nv; ++i) vs.push_back("q" + std::to_string(i));
    return vs;
  }

  const std::vector<FOFormulaPtr>& level(unsigned d, unsigned nv) {
    auto key = std::make_pair(d, nv);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<FOFormulaPtr> out;
    std::vector<std::string> vars = context_vars(nv);
    if (d == 1) {
      out.push_back(fo_true());
      out.push_back(fo_false());
      for (const std::string& x : vars)
        for (const std::string& y : vars) out.push_back(fo_eq(x, y));
      for (const RelSym& r : sig_) {
        std::vector<std::vector<std::string>> tuples{{}};
        for (unsigned i = 0; i < r.arity; ++i) {
          std::vector<std::vector<std::string>> next;
          for (auto t : tuples)
            for (const std::string& v : vars) {
              auto u = t;
              u.push_back(v);
              next.push_back(std::move(u));
            }
          tuples = std::move(next);
        }
        if (!vars.empty())
          for (auto& t : tuples) out.push_back(fo_rel(r.name, t));
      }
    } else {
      for (const FOFormulaPtr& f : level(d - 1, nv))
        if (f->kind != FOFormula::Kind::Not) out.push_back(fo_not(f));
      std::vector<std::pair<FOFormulaPtr, unsigned>> cum;
      for (unsigned dd = 1; dd < d; ++dd)
        for (const FOFormulaPtr& f : level(dd, nv)) cum.emplace_back(f, dd);
      for (auto kind : {FOFormula::Kind::And, FOFormula::Kind::Or})
        for (std::size_t i = 0; i < cum.size(); ++i)
          for (std::size_t j = i + 1; j < cum.size(); ++j)
            if (std::max(cum[i].second, cum[j].second) == d - 1)
              out.push_back(fo_binary(kind, cum[i].first, cum[j].first));
      for (const auto& [f, df] : cum)
        for (const auto& [g, dg] : cum)
          if (std::max(df, dg) == d - 1)
            out.push_back(fo_binary(FOFormula::Kind::Implies, f, g));
      std::string fresh = "q" + std::to_string(nv + 1);
      for (const FOFormulaPtr& body : level(d - 1, nv + 1))
        out.push_back(fo_quant(FOFormula::Kind::Forall, fresh, body));
      for (const FOFormulaPtr& body : level(d - 1, nv + 1))
        out.push_back(fo_quant(FOFormula::Kind::Exists, fresh, body));
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<unsigned, unsigned>& p) const {
      return p.first * 131u + p.second;
    }
  };

  Signature sig_;
  std::unordered_map<std::pair<unsigned, unsigned>, std::vector<FOFormulaPtr>,
                     PairHash>
      memo_;
};

}  // namespace hf
