#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hf/errors.hpp"
#include "hf/formula.hpp"

namespace hf {

// Exhaustive syntactic enumeration of formulas over {in, =, A}, by exact
// AST depth. Deterministic and syntactically duplicate-free; the stream
// at depth d is the stream at depth d-1 followed by the new level.
//
// `terms` are the ground terms allowed (free variables, parameters,
// literals); quantifiers introduce fresh variables which become usable
// inside their bodies.
class FormulaEnumerator {
 public:
  static constexpr unsigned kMaxDepthBudget = 6;

  explicit FormulaEnumerator(std::vector<Term> terms)
      : base_terms_(std::move(terms)) {
    // Pick a fresh-variable prefix no supplied name can collide with.
    prefix_ = "q";
    auto collides = [&] {
      for (const Term& t : base_terms_) {
        if (t.kind == Term::Kind::Lit) continue;
        if (t.name.size() <= prefix_.size()) continue;
        if (t.name.compare(0, prefix_.size(), prefix_) != 0) continue;
        bool digits = true;
        for (std::size_t i = prefix_.size(); i < t.name.size(); ++i)
          digits = digits && std::isdigit(static_cast<unsigned char>(t.name[i]));
        if (digits) return true;
      }
      return false;
    };
    while (collides()) prefix_ += 'q';
  }

  // Visits every formula of depth <= max_depth in canonical order.
  // The visitor returns false to stop early.
  void for_each(unsigned max_depth,
                const std::function<bool(const FormulaPtr&)>& visit) {
    if (max_depth > kMaxDepthBudget)
      throw CapacityError("formula enumeration depth " +
                          std::to_string(max_depth) + " exceeds budget " +
                          std::to_string(kMaxDepthBudget));
    for (unsigned d = 1; d <= max_depth; ++d)
      for (const FormulaPtr& f : level(d, 0))
        if (!visit(f)) return;
  }

  std::vector<FormulaPtr> up_to_depth(unsigned max_depth) {
    std::vector<FormulaPtr> out;
    for_each(max_depth, [&](const FormulaPtr& f) {
      out.push_back(f);
      return true;
    });
    return out;
  }

 private:
  std::vector<Term> context_terms(unsigned nv) const {
    std::vector<Term> ts = base_terms_;
    for (unsigned i = 1; i <= nv; ++i)
      ts.push_back(Term::var(prefix_ + std::to_string(i)));
    return ts;
  }

  // Formulas of exact depth d whose free variables may include the first
  // nv fresh variables.
  const std::vector<FormulaPtr>& level(unsigned d, unsigned nv) {
    auto key = std::make_pair(d, nv);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<FormulaPtr> out;
    std::vector<Term> terms = context_terms(nv);
    if (d == 1) {
      out.push_back(f_true());
      out.push_back(f_false());
      for (const Term& t : terms) out.push_back(f_pred_a(t));
      for (const Term& t1 : terms)
        for (const Term& t2 : terms) out.push_back(f_member(t1, t2));
      for (const Term& t1 : terms)
        for (const Term& t2 : terms) out.push_back(f_equal(t1, t2));
    } else {
      for (const FormulaPtr& f : level(d - 1, nv)) out.push_back(f_not(f));
      std::vector<std::pair<FormulaPtr, unsigned>> cum;
      for (unsigned dd = 1; dd < d; ++dd)
        for (const FormulaPtr& f : level(dd, nv)) cum.emplace_back(f, dd);
      for (auto kind :
           {Formula::Kind::And, Formula::Kind::Or, Formula::Kind::Implies})
        for (const auto& [f, df] : cum)
          for (const auto& [g, dg] : cum)
            if (std::max(df, dg) == d - 1) out.push_back(f_binary(kind, f, g));
      std::string fresh = prefix_ + std::to_string(nv + 1);
      for (const Term& bound : terms)
        for (const FormulaPtr& body : level(d - 1, nv + 1))
          out.push_back(f_bforall(fresh, bound, body));
      for (const Term& bound : terms)
        for (const FormulaPtr& body : level(d - 1, nv + 1))
          out.push_back(f_bexists(fresh, bound, body));
      for (const FormulaPtr& body : level(d - 1, nv + 1))
        out.push_back(f_forall(fresh, body));
      for (const FormulaPtr& body : level(d - 1, nv + 1))
        out.push_back(f_exists(fresh, body));
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<unsigned, unsigned>& p) const {
      return p.first * 131u + p.second;
    }
  };

  std::vector<Term> base_terms_;
  std::string prefix_;
  std::unordered_map<std::pair<unsigned, unsigned>, std::vector<FormulaPtr>, PairHash>
      memo_;
};

inline std::vector<FormulaPtr> enumerate_formulas(unsigned max_depth,
                                                  std::vector<Term> terms) {
  return FormulaEnumerator(std::move(terms)).up_to_depth(max_depth);
}

}  // namespace hf
