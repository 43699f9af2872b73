#include "capless/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

using capless::cli::Options;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents, const std::string& name) {
    path = std::string("/tmp/capless_test_") + name + ".capless";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

struct Run {
  int exit;
  std::string out;
  std::string err;
};

template <class Fn>
Run invoke(Fn fn, const Options& opts) {
  std::ostringstream out, err;
  int code = fn(opts, out, err);
  return Run{code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("check: OK line with use-set and type") {
  TempFile f("fun (x: Top) => x", "check_ok");
  Options opts;
  opts.files = {f.path};
  auto r = invoke(capless::cli::runCheck, opts);
  CHECK(r.exit == 0);
  CHECK(r.out.find("OK  use-set={}  type=forall (x0: Top) Top^{x0}") != std::string::npos);
}

TEST_CASE("check: exit codes distinguish type, parse and io errors") {
  TempFile unbound("let x = y in x", "check_unbound");
  Options opts;
  opts.files = {unbound.path};
  auto r = invoke(capless::cli::runCheck, opts);
  CHECK(r.exit == 1);
  CHECK(r.err.find("UnboundVariable") != std::string::npos);
  CHECK(r.err.find("^") != std::string::npos);  // caret rendering

  TempFile empty("", "check_empty");
  opts.files = {empty.path};
  CHECK(invoke(capless::cli::runCheck, opts).exit == 2);

  opts.files = {"/nonexistent/nope.capless"};
  CHECK(invoke(capless::cli::runCheck, opts).exit == 3);
}

TEST_CASE("check --json emits diagnostics with the documented keys") {
  TempFile f("let x = y in x", "check_json");
  Options opts;
  opts.files = {f.path};
  opts.json = true;
  auto r = invoke(capless::cli::runCheck, opts);
  auto parsed = nlohmann::json::parse(r.out);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0]["ok"] == false);
  const auto& diag = parsed[0]["diagnostics"][0];
  for (const char* key : {"code", "message", "line", "col", "excerpt"}) CHECK(diag.contains(key));
  CHECK(diag["code"] == "UnboundVariable");
}

TEST_CASE("eval: answer, store size and exit codes") {
  TempFile f("let x = fun (y: Top) => y in\nlet r = x x in fun (z: Top) => z", "eval_ok");
  Options opts;
  opts.files = {f.path};
  auto r = invoke(capless::cli::runEval, opts);
  CHECK(r.exit == 0);
  CHECK(r.out.find("answer=fun (x0: Top) => x0") != std::string::npos);
  CHECK(r.out.find("store: 1 binding") != std::string::npos);
}

TEST_CASE("eval: location answers print like l0") {
  // needs --unchecked: the final variable mentions its binder
  TempFile f("let x = fun (y: Top) => y in x", "eval_loc");
  Options opts;
  opts.files = {f.path};
  opts.unchecked = true;
  auto r = invoke(capless::cli::runEval, opts);
  CHECK(r.exit == 0);
  CHECK(r.out.find("answer=l0") != std::string::npos);
}

TEST_CASE("eval --trace prints one line per step") {
  TempFile f("let id = fun (x: Top) => x in let r = id id in fun (z: Top) => z", "eval_trace");
  Options opts;
  opts.files = {f.path};
  opts.trace = true;
  auto r = invoke(capless::cli::runEval, opts);
  CHECK(r.exit == 0);
  CHECK(r.out.find("#0  rule=lift  lookups=[]") != std::string::npos);
  CHECK(r.out.find("#1  rule=apply  lookups=[l0]") != std::string::npos);
  CHECK(r.out.find("#2  rule=rename") != std::string::npos);
}

TEST_CASE("eval: stuck and fuel-exhausted exit codes") {
  TempFile stuck("fun (x: Top) => x x", "eval_stuck");  // x: Top is not a function
  Options opts;
  opts.files = {stuck.path};
  auto r = invoke(capless::cli::runEval, opts);
  CHECK(r.exit == 1);  // rejected by the checker first

  // --unchecked gets to the machine and sticks: type application of a
  // term lambda
  TempFile bare("let x = fun (y: Top) => y in x[Top]", "eval_bare");
  opts.files = {bare.path};
  opts.unchecked = true;
  auto r2 = invoke(capless::cli::runEval, opts);
  CHECK(r2.exit == 4);

  TempFile slow("let a = fun (x: Top) => x in let b = a a in fun (z: Top) => z", "eval_slow");
  Options fuelOpts;
  fuelOpts.files = {slow.path};
  fuelOpts.fuel = 1;
  auto r3 = invoke(capless::cli::runEval, fuelOpts);
  CHECK(r3.exit == 5);
}

TEST_CASE("soundness: corpus program passes; bad program fails with a counterexample file") {
  TempFile good("let id = fun (x: Top) => x in let r = id id in fun (z: Top) => z", "sound_ok");
  Options opts;
  opts.files = {good.path};
  auto r = invoke(capless::cli::runSoundness, opts);
  CHECK(r.exit == 0);
  CHECK(r.out.find("max steps 3") != std::string::npos);

  TempFile bad("let x = fun (y: Top) => y in x x", "sound_bad");
  opts.files = {bad.path};
  auto r2 = invoke(capless::cli::runSoundness, opts);
  CHECK(r2.exit == 1);
  std::ifstream counterexample(bad.path + ".counterexample.json");
  CHECK(counterexample.good());
  std::remove((bad.path + ".counterexample.json").c_str());
}

TEST_CASE("soundness --gen runs generated programs") {
  Options opts;
  opts.genSeed = 42;
  opts.genCount = 25;
  opts.json = true;
  auto r = invoke(capless::cli::runSoundness, opts);
  CHECK(r.exit == 0);
  // one JSON line per report
  int lines = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    auto parsed = nlohmann::json::parse(line);
    CHECK(parsed["allOk"] == true);
  }
  CHECK(lines == 25);
}

TEST_CASE("fmt canonicalizes and is idempotent; --write rewrites the file") {
  TempFile f("let  id =  fun (x : Top^{}) => x  in # comment\nfun (z: Top) => z", "fmt");
  Options opts;
  opts.files = {f.path};
  auto first = invoke(capless::cli::runFmt, opts);
  CHECK(first.exit == 0);
  CHECK(first.out == "let x0 = fun (x0: Top) => x0 in\nfun (x1: Top) => x1\n");

  opts.write = true;
  CHECK(invoke(capless::cli::runFmt, opts).exit == 0);
  opts.write = false;
  auto second = invoke(capless::cli::runFmt, opts);
  CHECK(second.out == first.out);  // idempotent
}
