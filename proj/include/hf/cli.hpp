#pragma once

#include <cctype>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hf/absoluteness.hpp"
#include "hf/collapse.hpp"
#include "hf/definability.hpp"
#include "hf/digraph.hpp"
#include "hf/errors.hpp"
#include "hf/eval.hpp"
#include "hf/metatheory.hpp"
#include "hf/parser.hpp"
#include "json.hpp"

namespace hf {
namespace cli {

using nlohmann::json;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::optional<unsigned> parse_index(const std::string& s) {
  if (s.empty()) return std::nullopt;
  unsigned n = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    n = n * 10 + static_cast<unsigned>(c - '0');
    if (n > 1000) return std::nullopt;
  }
  return n;
}

// Universe mini-language: `V<n>` for von Neumann stages, `L<n>[file]` for
// constructible stages with the predicate A read from a set-literal file,
// anything else parsed as an inline set literal.
inline SetId parse_universe_spec(SetStore& store, const std::string& spec) {
  if (spec.size() >= 2 && spec[0] == 'V')
    if (auto n = parse_index(spec.substr(1))) return store.v_stage(*n);
  if (spec.size() >= 4 && spec[0] == 'L' && spec.back() == ']') {
    std::size_t open = spec.find('[');
    if (open != std::string::npos)
      if (auto n = parse_index(spec.substr(1, open - 1))) {
        std::string path = spec.substr(open + 1, spec.size() - open - 2);
        SetId a = store.parse(slurp(path));
        return l_stage(store, *n, a);
      }
  }
  return store.parse(spec);
}

// `--bind name={...}` binds a formula variable, `--bind $name={...}` a
// parameter; values are set literals.
inline void apply_bindings(SetStore& store, const std::vector<std::string>& binds,
                           Environment& env) {
  for (const std::string& b : binds) {
    std::size_t eq = b.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error("malformed --bind (expected name=literal): " + b);
    std::string name = b.substr(0, eq);
    SetId value = store.parse(b.substr(eq + 1));
    if (name[0] == '$') {
      if (name.size() == 1) throw Error("malformed --bind name: " + b);
      env.params[name.substr(1)] = value;
    } else {
      env.vars[name] = value;
    }
  }
}

inline Signature parse_signature(const std::string& text) {
  Signature sig;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::size_t slash = tok.find('/');
    auto arity = slash == std::string::npos
                     ? std::nullopt
                     : parse_index(tok.substr(slash + 1));
    if (slash == 0 || !arity || *arity == 0)
      throw Error("malformed relation symbol (expected Name/arity): " + tok);
    sig.push_back(RelSym{tok.substr(0, slash), *arity});
  }
  return sig;
}

// Structure file: `size N` then one `R i j ...` tuple per line; `#` starts
// a comment. The signature arrives separately (via --sig).
inline FinStructure parse_structure_file(const std::string& text,
                                         const Signature& sig) {
  FinStructure m;
  m.sig = sig;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (!have_size) {
      unsigned n = 0;
      if (head != "size" || !(ls >> n))
        throw ParseError("expected `size N` header", lineno, 1);
      m.size = n;
      have_size = true;
      continue;
    }
    const RelSym* rel = nullptr;
    for (const RelSym& r : sig)
      if (r.name == head) rel = &r;
    if (!rel) throw ParseError("undeclared relation " + head, lineno, 1);
    std::vector<unsigned> tuple;
    unsigned v = 0;
    while (ls >> v) tuple.push_back(v);
    if (tuple.size() != rel->arity)
      throw ParseError("arity mismatch for " + head, lineno, 1);
    m.interp[rel->name].insert(std::move(tuple));
  }
  if (!have_size) throw ParseError("missing `size N` header", lineno + 1, 1);
  for (const RelSym& r : sig) m.interp[r.name];
  validate(m);
  return m;
}

inline std::string format_structure(const FinStructure& m) {
  std::string s = "size=" + std::to_string(m.size);
  for (const RelSym& r : m.sig) {
    s += " " + r.name + "={";
    bool first = true;
    auto it = m.interp.find(r.name);
    if (it != m.interp.end())
      for (const auto& t : it->second) {
        if (!first) s += ",";
        first = false;
        s += "(";
        for (std::size_t i = 0; i < t.size(); ++i)
          s += (i ? "," : "") + std::to_string(t[i]);
        s += ")";
      }
    s += "}";
  }
  return s;
}

struct Options {
  bool json = false;
  std::string universe, pred = "{}", formula, graph, out_file;
  std::string inner, outer, theory, sig, sentence, model;
  std::vector<std::string> binds;
  std::uint64_t seed = 0, trials = 1000;
  unsigned depth = 4, stage = 4, size_cap = 4, depth_cap = 4;
  bool code = false, verbose = false;
};

inline int cmd_eval(SetStore& st, const Options& o, std::ostream& out) {
  Universe u = make_universe(st, parse_universe_spec(st, o.universe),
                             st.parse(o.pred));
  Environment env;
  apply_bindings(st, o.binds, env);
  bool value = eval(st, parse_formula(o.formula), env, u);
  if (o.json)
    out << json{{"command", "eval"}, {"value", value}}.dump() << "\n";
  else
    out << (value ? "true" : "false") << "\n";
  return 0;
}

inline int cmd_build(SetStore& st, const Options& o, std::ostream& out) {
  SetId s = parse_universe_spec(st, o.universe);
  std::string text = o.code ? st.ackermann_code(s).str() : st.print(s);
  if (o.json)
    out << json{{"command", "build"},
                {"set", st.print(s)},
                {"code", st.ackermann_code(s).str()},
                {"cardinality", st.card(s)}}
               .dump()
        << "\n";
  else
    out << text << "\n";
  return 0;
}

inline int cmd_collapse(SetStore& st, const Options& o, std::ostream& out,
                        std::ostream& err) {
  std::istringstream in(slurp(o.graph));
  Digraph g = read_edge_list(in);
  if (auto cyc = check_well_founded(g)) {
    std::string nodes;
    for (std::uint32_t v : cyc->cycle) nodes += " " + std::to_string(v);
    err << "E_PRECONDITION: graph is ill-founded; cycle witness:" << nodes
        << "\n";
    return 1;
  }
  if (auto ext = check_extensional(g)) {
    err << "E_PRECONDITION: graph is not extensional; nodes " << ext->x
        << " and " << ext->y << " share a predecessor set\n";
    return 1;
  }
  CollapseResult res = mostowski_collapse(st, g);
  if (o.json) {
    json pi = json::array();
    for (SetId s : res.pi) pi.push_back(st.print(s));
    out << json{{"command", "collapse"},
                {"pi", pi},
                {"image", st.print(res.image)}}
               .dump()
        << "\n";
  } else {
    for (std::uint32_t v = 0; v < g.node_count; ++v)
      out << "pi " << v << " " << st.print(res.pi[v]) << "\n";
    out << "image " << st.print(res.image) << "\n";
  }
  return 0;
}

inline int cmd_encode(SetStore& st, const Options& o, std::ostream& out) {
  SetId s = parse_universe_spec(st, o.universe);
  EncodedGraph enc = encode_as_graph(st, s, o.seed);
  std::ostringstream body;
  write_edge_list(body, enc.graph);
  for (std::uint32_t v = 0; v < enc.graph.node_count; ++v)
    body << "# " << v << " -> " << st.print(enc.node_to_set[v]) << "\n";
  if (!o.out_file.empty()) {
    std::ofstream f(o.out_file);
    if (!f) throw Error("cannot write file: " + o.out_file);
    f << body.str();
    out << "wrote " << o.out_file << "\n";
    return 0;
  }
  if (o.json) {
    json edges = json::array();
    for (auto [u, v] : enc.graph.edges) edges.push_back(json::array({u, v}));
    json map = json::array();
    for (SetId m : enc.node_to_set) map.push_back(st.print(m));
    out << json{{"command", "encode"},
                {"nodes", enc.graph.node_count},
                {"edges", edges},
                {"node_to_set", map}}
               .dump()
        << "\n";
  } else {
    out << body.str();
  }
  return 0;
}

inline int cmd_absolute(SetStore& st, const Options& o, std::ostream& out) {
  SetId pred = st.parse(o.pred);
  SetId inner_carrier = parse_universe_spec(st, o.inner);
  SetId outer_carrier = parse_universe_spec(st, o.outer);
  // restrict the shared predicate to each carrier
  auto restrict_pred = [&](SetId carrier) {
    std::vector<SetId> kept;
    for (SetId e : st.elems(pred))
      if (st.contains(carrier, e)) kept.push_back(e);
    return st.make_set(std::move(kept));
  };
  Universe inner = make_universe(st, inner_carrier, restrict_pred(inner_carrier));
  Universe outer = make_universe(st, outer_carrier, restrict_pred(outer_carrier));
  Environment env;
  apply_bindings(st, o.binds, env);
  AbsCheck c = check_absolute(st, parse_formula(o.formula), env, inner, outer);
  if (o.json)
    out << json{{"command", "absolute"},
                {"inner", c.inner_value},
                {"outer", c.outer_value},
                {"agree", c.agree}}
               .dump()
        << "\n";
  else
    out << "inner=" << (c.inner_value ? "true" : "false")
        << " outer=" << (c.outer_value ? "true" : "false")
        << " agree=" << (c.agree ? "yes" : "no") << "\n";
  return c.agree ? 0 : 2;
}

inline int cmd_fuzz(SetStore& st, const Options& o, std::ostream& out) {
  AbsolutenessReport rep =
      fuzz_absoluteness(st, o.seed, o.trials, o.depth, o.stage);
  if (o.json) {
    json bad = json::array();
    for (const Disagreement& d : rep.disagreements)
      bad.push_back(json{{"formula", print(d.formula)},
                         {"inner", d.inner_value},
                         {"outer", d.outer_value}});
    out << json{{"command", "fuzz"},
                {"trials", rep.trials},
                {"agreements", rep.agreements},
                {"disagreements", bad}}
               .dump()
        << "\n";
  } else {
    out << rep.agreements << "/" << rep.trials << " agree\n";
    if (o.verbose) out << to_text(st, rep, true);
  }
  return rep.disagreements.empty() ? 0 : 2;
}

inline int cmd_complete(const Options& o, std::ostream& out) {
  Theory t = parse_theory(slurp(o.theory));
  CompletenessResult r = check_complete_upto(t, o.size_cap, o.depth_cap);
  const char* verdict =
      r.verdict == CompletenessResult::Verdict::Complete     ? "complete"
      : r.verdict == CompletenessResult::Verdict::Incomplete ? "incomplete"
                                                             : "inconsistent";
  if (o.json) {
    json j{{"command", "complete"}, {"verdict", verdict}, {"models", r.models}};
    if (r.counterexample) {
      j["sentence"] = print(r.counterexample->sentence);
      j["model_true"] = format_structure(r.counterexample->model_true);
      j["model_false"] = format_structure(r.counterexample->model_false);
    }
    out << j.dump() << "\n";
  } else {
    out << verdict << " models " << r.models << "\n";
    if (r.counterexample) {
      out << "sentence " << print(r.counterexample->sentence) << "\n";
      out << "true-in " << format_structure(r.counterexample->model_true)
          << "\n";
      out << "false-in " << format_structure(r.counterexample->model_false)
          << "\n";
    }
  }
  return 0;
}

inline int cmd_translate(SetStore& st, const Options& o, std::ostream& out) {
  Signature sig = parse_signature(o.sig);
  FOFormulaPtr phi = parse_fo_formula(o.sentence, sig);
  FormulaPtr sigma = sat_to_bounded(st, phi, sig);
  std::optional<bool> value;
  if (!o.model.empty()) {
    FinStructure m = parse_structure_file(slurp(o.model), sig);
    SetId enc = encode_structure(st, m);
    Environment env;
    env.params["M"] = enc;
    Universe u = make_universe(st, st.transitive_closure(st.make_set({enc})),
                               st.empty_set());
    value = eval(st, sigma, env, u, /*strict=*/true);
  }
  if (o.json) {
    json j{{"command", "translate"},
           {"formula", print(sigma)},
           {"bounded", is_bounded(*sigma)}};
    if (value) j["value"] = *value;
    out << j.dump() << "\n";
  } else {
    out << print(sigma) << "\n";
    if (value) out << "value " << (*value ? "true" : "false") << "\n";
  }
  return 0;
}

}  // namespace cli

// Entry point shared by the hfwb binary and the test suite. Exit codes:
// 0 success/agreement, 1 usage/parse/precondition errors, 2 property
// violation (a disagreement found by `absolute` or `fuzz`).
inline int cli_run(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  using cli::Options;
  Options o;
  CLI::App app{"hfwb: a workbench for hereditarily finite set theory"};
  app.require_subcommand(1);

  auto add_json = [&](CLI::App* sub) {
    sub->add_flag("--json", o.json, "structured output with stable field names");
  };

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a formula over a universe");
  eval_cmd->add_option("--universe", o.universe, "V<n>, L<n>[file], or set literal")
      ->required();
  eval_cmd->add_option("--pred", o.pred, "predicate A as a set literal");
  eval_cmd->add_option("--formula", o.formula, "formula text")->required();
  eval_cmd->add_option("--bind", o.binds, "name=literal or $name=literal");
  add_json(eval_cmd);

  CLI::App* build_cmd = app.add_subcommand("build", "build and print a stage");
  build_cmd->add_option("--universe", o.universe, "V<n>, L<n>[file], or set literal")
      ->required();
  build_cmd->add_flag("--code", o.code, "print the Ackermann code instead");
  add_json(build_cmd);

  CLI::App* collapse_cmd =
      app.add_subcommand("collapse", "Mostowski-collapse an edge-list file");
  collapse_cmd->add_option("--graph", o.graph, "edge-list file")->required();
  add_json(collapse_cmd);

  CLI::App* encode_cmd =
      app.add_subcommand("encode", "encode a transitive set as a digraph");
  encode_cmd->add_option("--universe", o.universe, "transitive set to encode")
      ->required();
  encode_cmd->add_option("--seed", o.seed, "bijection seed");
  encode_cmd->add_option("--out", o.out_file, "write the edge list here");
  add_json(encode_cmd);

  CLI::App* abs_cmd = app.add_subcommand("absolute", "one absoluteness check");
  abs_cmd->add_option("--formula", o.formula, "bounded formula")->required();
  abs_cmd->add_option("--inner", o.inner, "inner universe spec")->required();
  abs_cmd->add_option("--outer", o.outer, "outer universe spec")->required();
  abs_cmd->add_option("--pred", o.pred, "predicate A as a set literal");
  abs_cmd->add_option("--bind", o.binds, "name=literal or $name=literal");
  add_json(abs_cmd);

  CLI::App* fuzz_cmd = app.add_subcommand("fuzz", "absoluteness fuzz harness");
  fuzz_cmd->add_option("--seed", o.seed, "fuzz seed");
  fuzz_cmd->add_option("--trials", o.trials, "number of trials");
  fuzz_cmd->add_option("--depth", o.depth, "max formula depth");
  fuzz_cmd->add_option("--stage", o.stage, "max outer stage (1..4)");
  fuzz_cmd->add_flag("--verbose", o.verbose, "one line per disagreement");
  add_json(fuzz_cmd);

  CLI::App* complete_cmd =
      app.add_subcommand("complete", "completeness check for a theory file");
  complete_cmd->add_option("--theory", o.theory, "theory file")->required();
  complete_cmd->add_option("--size-cap", o.size_cap, "model size cap (1..4)");
  complete_cmd->add_option("--depth-cap", o.depth_cap, "sentence depth cap (1..4)");
  add_json(complete_cmd);

  CLI::App* translate_cmd = app.add_subcommand(
      "translate", "FO sentence to a bounded set-theoretic formula");
  translate_cmd->add_option("--sig", o.sig, "signature, e.g. \"R/2 S/1\"")
      ->required();
  translate_cmd->add_option("--sentence", o.sentence, "closed FO sentence")
      ->required();
  translate_cmd->add_option("--model", o.model,
                            "structure file: evaluate the translation too");
  add_json(translate_cmd);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "E_USAGE: " << e.what() << "\n";
    err << app.help();
    return 1;
  }

  try {
    SetStore st;
    if (eval_cmd->parsed()) return cli::cmd_eval(st, o, out);
    if (build_cmd->parsed()) return cli::cmd_build(st, o, out);
    if (collapse_cmd->parsed()) return cli::cmd_collapse(st, o, out, err);
    if (encode_cmd->parsed()) return cli::cmd_encode(st, o, out);
    if (abs_cmd->parsed()) return cli::cmd_absolute(st, o, out);
    if (fuzz_cmd->parsed()) return cli::cmd_fuzz(st, o, out);
    if (complete_cmd->parsed()) return cli::cmd_complete(o, out);
    if (translate_cmd->parsed()) return cli::cmd_translate(st, o, out);
    err << "E_USAGE: no subcommand\n";
    return 1;
  } catch (const ParseError& e) {
    err << "E_PARSE: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "E_PRECONDITION: " << e.what() << "\n";
    return 1;
  } catch (const CapacityError& e) {
    err << "E_CAPACITY: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "E_RUNTIME: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hf
