#pragma once

#include <cctype>
#include <string>
#include <unordered_set>
#include <vector>

#include "hf/errors.hpp"
#include "hf/formula.hpp"

namespace hf {

// Recursive-descent parser for the formula grammar:
//
//   formula := quant | impl
//   quant   := ("forall"|"exists") ident ["in" term] "." formula
//   impl    := disj ["->" impl]
//   disj    := conj {"|" conj}
//   conj    := neg {"&" neg}
//   neg     := "!" neg | atom
//   atom    := "true" | "false" | "A(" term ")"
//            | term ("in"|"=") term | "(" formula ")"
//   term    := ident | "$" ident | set-literal
//
// Binding occurrences that would shadow an enclosing binder are renamed
// to a fresh identifier at parse time, so no quantifier chain in the
// resulting AST shadows.
class FormulaParser {
 public:
  explicit FormulaParser(std::string text) : text_(std::move(text)) {
    // Collect every identifier up front so fresh names never collide.
    for (std::size_t i = 0; i < text_.size();) {
      if (is_ident_start(text_[i])) {
        std::size_t j = i;
        while (j < text_.size() && is_ident_char(text_[j])) ++j;
        used_names_.insert(text_.substr(i, j - i));
        i = j;
      } else {
        ++i;
      }
    }
  }

  FormulaPtr parse() {
    FormulaPtr f = parse_formula();
    skip_ws();
    if (pos_ != text_.size()) fail("expected end of input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    std::string found = pos_ >= text_.size()
                            ? "end of input"
                            : "'" + text_.substr(pos_, next_token_len()) + "'";
    throw ParseError(expected + ", found " + found, line_, col_);
  }

  std::size_t next_token_len() const {
    if (pos_ >= text_.size()) return 0;
    if (is_ident_start(text_[pos_])) {
      std::size_t j = pos_;
      while (j < text_.size() && is_ident_char(text_[j])) ++j;
      return j - pos_;
    }
    return 1;
  }

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance(1);
  }

  bool peek_sym(const std::string& s) {
    skip_ws();
    return text_.compare(pos_, s.size(), s) == 0;
  }

  bool eat_sym(const std::string& s) {
    if (!peek_sym(s)) return false;
    advance(s.size());
    return true;
  }

  // Keywords must not run into a longer identifier.
  bool peek_kw(const std::string& kw) {
    skip_ws();
    if (text_.compare(pos_, kw.size(), kw) != 0) return false;
    std::size_t after = pos_ + kw.size();
    return after >= text_.size() || !is_ident_char(text_[after]);
  }

  bool eat_kw(const std::string& kw) {
    if (!peek_kw(kw)) return false;
    advance(kw.size());
    return true;
  }

  std::string parse_ident() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_]))
      fail("expected identifier");
    std::size_t j = pos_;
    while (j < text_.size() && is_ident_char(text_[j])) ++j;
    std::string name = text_.substr(pos_, j - pos_);
    advance(j - pos_);
    return name;
  }

  std::string fresh_name(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string cand = base + std::to_string(k);
      if (!used_names_.count(cand)) {
        used_names_.insert(cand);
        return cand;
      }
    }
  }

  // Innermost binding for a source name, if any.
  const std::string* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  bool name_in_scope(const std::string& name) const {
    for (const auto& [src, tgt] : scope_)
      if (src == name || tgt == name) return true;
    return false;
  }

  Term parse_term() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected term (identifier, '$' or '{')");
    char c = text_[pos_];
    if (c == '$') {
      advance(1);
      return Term::param(parse_ident());
    }
    if (c == '{') {
      std::size_t start = pos_;
      BigNat code = detail::parse_code_set(text_, pos_);
      // parse_code_set advanced pos_ directly; fix up line/col.
      for (std::size_t i = start; i < pos_; ++i)
        if (text_[i] == '\n') {
          ++line_;
          col_ = 1;
        } else {
          ++col_;
        }
      return Term::lit(std::move(code));
    }
    if (is_ident_start(c)) {
      std::string name = parse_ident();
      if (const std::string* t = lookup(name)) return Term::var(*t);
      return Term::var(name);
    }
    fail("expected term (identifier, '$' or '{')");
  }

  FormulaPtr parse_formula() {
    if (peek_kw("forall") || peek_kw("exists")) return parse_quant();
    return parse_impl();
  }

  FormulaPtr parse_quant() {
    bool universal = eat_kw("forall");
    if (!universal && !eat_kw("exists")) fail("expected 'forall' or 'exists'");
    std::string src = parse_ident();
    bool bounded = false;
    Term bound;
    if (eat_kw("in")) {
      bounded = true;
      bound = parse_term();  // outer scope: before the binder is pushed
    }
    if (!eat_sym(".")) fail("expected '.' or 'in'");
    std::string tgt = name_in_scope(src) ? fresh_name(src) : src;
    scope_.emplace_back(src, tgt);
    FormulaPtr body = parse_formula();
    scope_.pop_back();
    if (bounded)
      return universal ? f_bforall(tgt, std::move(bound), std::move(body))
                       : f_bexists(tgt, std::move(bound), std::move(body));
    return universal ? f_forall(tgt, std::move(body))
                     : f_exists(tgt, std::move(body));
  }

  FormulaPtr parse_impl() {
    FormulaPtr l = parse_disj();
    if (eat_sym("->")) return f_implies(std::move(l), parse_impl());
    return l;
  }

  FormulaPtr parse_disj() {
    FormulaPtr l = parse_conj();
    while (eat_sym("|")) l = f_or(std::move(l), parse_conj());
    return l;
  }

  FormulaPtr parse_conj() {
    FormulaPtr l = parse_neg();
    while (peek_sym("&")) {
      eat_sym("&");
      l = f_and(std::move(l), parse_neg());
    }
    return l;
  }

  FormulaPtr parse_neg() {
    if (eat_sym("!")) return f_not(parse_neg());
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    skip_ws();
    if (eat_sym("(")) {
      FormulaPtr f = parse_formula();
      if (!eat_sym(")")) fail("expected ')'");
      return f;
    }
    if (eat_kw("true")) return f_true();
    if (eat_kw("false")) return f_false();
    if (peek_kw("A")) {
      // A( starts the predicate; a bare A is an ordinary variable.
      std::size_t save_pos = pos_;
      int save_line = line_, save_col = col_;
      advance(1);
      if (eat_sym("(")) {
        Term t = parse_term();
        if (!eat_sym(")")) fail("expected ')'");
        return f_pred_a(std::move(t));
      }
      pos_ = save_pos;
      line_ = save_line;
      col_ = save_col;
    }
    if (pos_ >= text_.size() ||
        (!is_ident_start(text_[pos_]) && text_[pos_] != '$' && text_[pos_] != '{'))
      fail(
          "expected formula (one of 'forall', 'exists', '!', '(', 'true', "
          "'false', 'A(', identifier, '$', '{')");
    Term l = parse_term();
    if (eat_kw("in")) return f_member(std::move(l), parse_term());
    if (eat_sym("=")) return f_equal(std::move(l), parse_term());
    fail("expected 'in' or '='");
  }

  std::string text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<std::pair<std::string, std::string>> scope_;
  std::unordered_set<std::string> used_names_;
};

inline FormulaPtr parse_formula(const std::string& text) {
  return FormulaParser(text).parse();
}

}  // namespace hf
