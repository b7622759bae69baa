#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hf/cli.hpp"

using namespace hf;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli_run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// scratch file helper; files land in the test working directory
struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content)
      : path("cli_scratch_" + name) {
    std::ofstream f(path);
    f << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("eval: documented example and bindings") {
  Run r = run({"eval", "--universe", "V3", "--pred", "{}", "--formula",
               "exists x . A(x)"});
  CHECK(r.code == 0);
  CHECK(r.out == "false\n");

  Run t = run({"eval", "--universe", "V3", "--pred", "{{}}", "--formula",
               "exists x . A(x)"});
  CHECK(t.code == 0);
  CHECK(t.out == "true\n");

  Run b = run({"eval", "--universe", "V2", "--formula", "x in $a", "--bind",
               "x={}", "--bind", "$a={{}}"});
  CHECK(b.code == 0);
  CHECK(b.out == "true\n");

  Run j = run({"eval", "--universe", "V2", "--formula", "true", "--json"});
  CHECK(j.code == 0);
  CHECK(j.out == "{\"command\":\"eval\",\"value\":true}\n");
}

TEST_CASE("build: stages, codes, constructible specs, literals") {
  CHECK(run({"build", "--universe", "V2"}).out == "{{},{{}}}\n");
  CHECK(run({"build", "--universe", "V3", "--code"}).out == "15\n");
  CHECK(run({"build", "--universe", "{{},{{}}}"}).out == "{{},{{}}}\n");

  TempFile pred("pred.set", "{{}}\n");
  Run l = run({"build", "--universe", "L3[" + pred.path + "]"});
  CHECK(l.code == 0);
  CHECK(l.out == run({"build", "--universe", "V3"}).out);

  Run j = run({"build", "--universe", "V1", "--json"});
  CHECK(j.code == 0);
  CHECK(j.out.find("\"cardinality\":1") != std::string::npos);
  CHECK(j.out.find("\"code\":\"1\"") != std::string::npos);

  CHECK(run({"build", "--universe", "V6"}).code == 1);  // stage cap
}

TEST_CASE("collapse: documented chain and rejection witnesses") {
  TempFile chain("chain.edges", "nodes 3\n0 1\n0 2\n1 2\n");
  Run r = run({"collapse", "--graph", chain.path});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "pi 0 {}\n"
        "pi 1 {{}}\n"
        "pi 2 {{},{{}}}\n"
        "image {{},{{}},{{},{{}}}}\n");

  TempFile loop("loop.edges", "nodes 1\n0 0\n");
  Run c = run({"collapse", "--graph", loop.path});
  CHECK(c.code == 1);
  CHECK(c.err.find("E_PRECONDITION") != std::string::npos);
  CHECK(c.err.find("cycle") != std::string::npos);

  TempFile twin("twin.edges", "nodes 3\n0 2\n");
  Run e = run({"collapse", "--graph", twin.path});
  CHECK(e.code == 1);
  CHECK(e.err.find("extensional") != std::string::npos);

  Run missing = run({"collapse", "--graph", "no_such_file.edges"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("E_RUNTIME") != std::string::npos);
}

TEST_CASE("encode: deterministic per seed, round trips through collapse") {
  Run a = run({"encode", "--universe", "V3", "--seed", "11"});
  Run b = run({"encode", "--universe", "V3", "--seed", "11"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  TempFile sink("v3.edges", "");
  Run w = run({"encode", "--universe", "V3", "--seed", "11", "--out", sink.path});
  CHECK(w.code == 0);
  Run back = run({"collapse", "--graph", sink.path});
  CHECK(back.code == 0);
  std::string image_line = back.out.substr(back.out.rfind("image"));
  CHECK(image_line ==
        "image " + run({"build", "--universe", "V3"}).out.substr(0, std::string::npos));

  Run bad = run({"encode", "--universe", "{{{}}}", "--seed", "0"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("E_PRECONDITION") != std::string::npos);
  CHECK(bad.err.find("transitive") != std::string::npos);
}

TEST_CASE("absolute: single check") {
  Run r = run({"absolute", "--formula", "forall x in $a . x = x", "--inner",
               "V2", "--outer", "V4", "--bind", "$a={{}}"});
  CHECK(r.code == 0);
  CHECK(r.out == "inner=true outer=true agree=yes\n");

  // unbounded formulas are precondition errors, not disagreements
  Run u = run({"absolute", "--formula", "exists x . true", "--inner", "V2",
               "--outer", "V4"});
  CHECK(u.code == 1);
  CHECK(u.err.find("E_PRECONDITION") != std::string::npos);

  // the shared predicate is restricted to each carrier coherently
  Run p = run({"absolute", "--formula", "$p in $p | true", "--inner", "V2",
               "--outer", "V3", "--pred", "{{},{{}},{{{}}}}", "--bind",
               "$p={}"});
  CHECK(p.code == 0);
}

TEST_CASE("fuzz: documented harness line") {
  Run r = run({"fuzz", "--seed", "0", "--trials", "1000"});
  CHECK(r.code == 0);
  CHECK(r.out == "1000/1000 agree\n");
  CHECK(run({"fuzz", "--seed", "0", "--trials", "1000"}).out == r.out);

  Run j = run({"fuzz", "--seed", "3", "--trials", "50", "--json"});
  CHECK(j.code == 0);
  CHECK(j.out ==
        "{\"agreements\":50,\"command\":\"fuzz\",\"disagreements\":[],"
        "\"trials\":50}\n");

  CHECK(run({"fuzz", "--trials", "1", "--stage", "9"}).code == 1);
}

TEST_CASE("complete: the three verdicts") {
  TempFile one("one.thy", "sig\nexists x . forall y . y = x\n");
  Run c = run({"complete", "--theory", one.path});
  CHECK(c.code == 0);
  CHECK(c.out == "complete models 1\n");

  TempFile empty("empty.thy", "sig\n");
  Run i = run({"complete", "--theory", empty.path});
  CHECK(i.code == 0);
  CHECK(i.out.find("incomplete") == 0);
  CHECK(i.out.find("sentence ") != std::string::npos);
  CHECK(i.out.find("true-in size=") != std::string::npos);
  CHECK(i.out.find("false-in size=") != std::string::npos);

  TempFile bad("bad.thy", "sig\nfalse\n");
  Run x = run({"complete", "--theory", bad.path});
  CHECK(x.code == 0);
  CHECK(x.out == "inconsistent models 0\n");

  TempFile open("open.thy", "sig R/2\nR(x,y)\n");
  CHECK(run({"complete", "--theory", open.path}).code == 1);
}

TEST_CASE("translate: bounded formula, optional evaluation") {
  Run r = run({"translate", "--sig", "R/2", "--sentence",
               "exists v . exists w . R(v,w)"});
  CHECK(r.code == 0);
  CHECK(r.out.find("$M") != std::string::npos);

  TempFile chain("chain2.struct", "size 2\nR 0 1\n");
  Run e = run({"translate", "--sig", "R/2", "--sentence",
               "exists v . exists w . R(v,w)", "--model", chain.path});
  CHECK(e.code == 0);
  CHECK(e.out.find("value true\n") != std::string::npos);

  Run f = run({"translate", "--sig", "R/2", "--sentence",
               "forall v . exists w . R(v,w)", "--model", chain.path});
  CHECK(f.code == 0);
  CHECK(f.out.find("value false\n") != std::string::npos);

  Run j = run({"translate", "--sig", "R/2", "--sentence", "true", "--json"});
  CHECK(j.code == 0);
  CHECK(j.out.find("\"bounded\":true") != std::string::npos);

  CHECK(run({"translate", "--sig", "R/2", "--sentence", "R(x,y)"}).code == 1);
  CHECK(run({"translate", "--sig", "R/x", "--sentence", "true"}).code == 1);
}

TEST_CASE("usage and error surfaces") {
  Run none = run({});
  CHECK(none.code == 1);
  CHECK(none.err.find("E_USAGE") != std::string::npos);

  Run unknown = run({"frobnicate"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("E_USAGE") != std::string::npos);

  Run missing = run({"eval", "--universe", "V2"});
  CHECK(missing.code == 1);  // --formula is required

  Run badflag = run({"fuzz", "--wat", "1"});
  CHECK(badflag.code == 1);

  Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("eval") != std::string::npos);

  Run parse = run({"eval", "--universe", "V2", "--formula", "exists ."});
  CHECK(parse.code == 1);
  CHECK(parse.err.find("E_PARSE") != std::string::npos);
  CHECK(parse.err.find("1:") != std::string::npos);  // positioned

  Run badbind = run({"eval", "--universe", "V2", "--formula", "true", "--bind",
                     "nonsense"});
  CHECK(badbind.code == 1);
  CHECK(badbind.err.find("E_RUNTIME") != std::string::npos);
}
