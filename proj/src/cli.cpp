#include "capless/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "capless/harness.hpp"
#include "capless/surface.hpp"
#include "json.hpp"

namespace capless::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitParseError = 2;
constexpr int kExitIoError = 3;
constexpr int kExitStuck = 4;
constexpr int kExitFuel = 5;

std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json diagnosticsJson(const std::vector<Diagnostic>& diags) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : diags) {
    arr.push_back({{"code", diagCodeName(d.code)},
                   {"message", d.message},
                   {"line", d.span.line},
                   {"col", d.span.col},
                   {"excerpt", d.excerpt}});
  }
  return arr;
}

void printDiags(const std::vector<Diagnostic>& diags, const std::string& file, bool color,
                std::ostream& err) {
  for (const auto& d : diags) err << render(d, file, color);
}

surface::NameEnv envOf(const TraceNode& n) {
  return surface::NameEnv{n.termDepth, n.typeDepth, n.captDepth};
}

nlohmann::json traceJson(const TraceNode& n) {
  nlohmann::json j;
  j["rule"] = n.rule;
  j["useSet"] = surface::printCaptureSet(n.useSet, envOf(n));
  j["type"] = n.type ? surface::printExist(*n.type, envOf(n)) : "";
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : n.children) children.push_back(traceJson(c));
  j["children"] = std::move(children);
  return j;
}

struct LoadedProgram {
  TermPtr term;
  SpanIndex spans;
  std::string sourcePath;
};

struct LoadAttempt {
  std::optional<LoadedProgram> program;
  int exitCode = 0;
  std::vector<Diagnostic> diagnostics;
};

// Loads and resolves one file; on failure prints diagnostics and reports
// the exit code to use.
LoadAttempt loadFile(const std::string& path, bool color, std::ostream& err) {
  LoadAttempt attempt;
  auto text = readFile(path);
  if (!text) {
    err << "error: cannot read " << path << "\n";
    attempt.exitCode = kExitIoError;
    return attempt;
  }
  auto loaded = surface::load(*text);
  if (!loaded.ok()) {
    printDiags(loaded.diagnostics, path, color, err);
    bool parseish = false;
    for (const auto& d : loaded.diagnostics)
      if (d.code == DiagCode::LexError || d.code == DiagCode::ParseError ||
          d.code == DiagCode::DuplicateBinder)
        parseish = true;
    attempt.exitCode = parseish ? kExitParseError : kExitTypeError;
    attempt.diagnostics = std::move(loaded.diagnostics);
    return attempt;
  }
  attempt.program = LoadedProgram{loaded.term, std::move(loaded.spans), path};
  return attempt;
}

std::string answerString(const Answer& a) {
  return surface::printAnswer(a, surface::NameEnv{}, surface::PrintOptions{false, {}});
}

std::string focusString(const TermPtr& t) {
  return surface::printTerm(t, surface::NameEnv{}, surface::PrintOptions{false, {}});
}

std::string lookupsString(const std::vector<uint32_t>& lookups) {
  std::string out = "[";
  for (size_t i = 0; i < lookups.size(); ++i) {
    if (i) out += ", ";
    out += "l" + std::to_string(lookups[i]);
  }
  return out + "]";
}

}  // namespace

bool colorEnabled(bool stdoutIsTty) {
  const char* mode = std::getenv("CAPLESS_COLOR");
  if (mode && std::string(mode) == "never") return false;
  return stdoutIsTty;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int runCheck(const Options& opts, std::ostream& out, std::ostream& err) {
  int exit = kExitOk;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& path : opts.files) {
    auto loaded = loadFile(path, opts.color, err);
    if (!loaded.program) {
      exit = std::max(exit, loaded.exitCode);
      if (opts.json)
        results.push_back({{"file", path},
                           {"ok", false},
                           {"diagnostics", diagnosticsJson(loaded.diagnostics)}});
      continue;
    }
    auto& program = *loaded.program;
    CheckOptions checkOpts;
    checkOpts.collectTrace = opts.trace;
    checkOpts.spans = &program.spans;
    auto outcome = typeSynth(TypeContext{}, program.term, checkOpts);
    if (!outcome.ok()) {
      auto text = readFile(path);
      if (text) attachExcerpts(outcome.diagnostics, *text);
      printDiags(outcome.diagnostics, path, opts.color, err);
      exit = std::max(exit, kExitTypeError);
      if (opts.json)
        results.push_back(
            {{"file", path}, {"ok", false}, {"diagnostics", diagnosticsJson(outcome.diagnostics)}});
      continue;
    }
    std::string useSet = surface::printCaptureSet(outcome.result->useSet);
    std::string type = surface::printExist(outcome.result->type);
    if (opts.json) {
      nlohmann::json entry{{"file", path}, {"ok", true}, {"useSet", useSet}, {"type", type}};
      if (opts.trace) entry["trace"] = traceJson(outcome.result->trace);
      results.push_back(std::move(entry));
    } else {
      out << path << ": OK  use-set=" << useSet << "  type=" << type << "\n";
      if (opts.trace) out << traceJson(outcome.result->trace).dump(2) << "\n";
    }
  }
  if (opts.json) out << results.dump(2) << "\n";
  return exit;
}

// ---------------------------------------------------------------------------
// eval (and trace, which is eval with the step log forced on)
// ---------------------------------------------------------------------------

int runEval(const Options& opts, std::ostream& out, std::ostream& err) {
  int exit = kExitOk;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& path : opts.files) {
    auto loaded = loadFile(path, opts.color, err);
    if (!loaded.program) {
      exit = std::max(exit, loaded.exitCode);
      continue;
    }
    auto& program = *loaded.program;
    if (!opts.unchecked) {
      CheckOptions checkOpts;
      checkOpts.spans = &program.spans;
      auto outcome = typeSynth(TypeContext{}, program.term, checkOpts);
      if (!outcome.ok()) {
        auto text = readFile(path);
        if (text) attachExcerpts(outcome.diagnostics, *text);
        printDiags(outcome.diagnostics, path, opts.color, err);
        exit = std::max(exit, kExitTypeError);
        continue;
      }
    }

    RunResult result = run(Config{Store{}, program.term}, opts.fuel);
    nlohmann::json steps = nlohmann::json::array();
    for (size_t i = 0; i < result.steps.size(); ++i) {
      const auto& s = result.steps[i];
      if (opts.trace && !opts.json)
        out << "#" << i << "  rule=" << s.rule << "  lookups=" << lookupsString(s.lookups)
            << "  term=" << focusString(s.focus) << "\n";
      if (opts.json) {
        nlohmann::json lookups = nlohmann::json::array();
        for (uint32_t l : s.lookups) lookups.push_back("l" + std::to_string(l));
        steps.push_back({{"rule", s.rule}, {"lookups", lookups}, {"term", focusString(s.focus)}});
      }
    }

    std::string status;
    int fileExit = kExitOk;
    switch (result.status) {
      case RunResult::Status::Answer: status = "answer"; break;
      case RunResult::Status::Stuck:
        status = "stuck";
        fileExit = kExitStuck;
        break;
      case RunResult::Status::FuelExhausted:
        status = "fuel-exhausted";
        fileExit = kExitFuel;
        break;
    }
    exit = std::max(exit, fileExit);

    if (opts.json) {
      nlohmann::json entry{{"file", path},
                           {"status", status},
                           {"steps", std::move(steps)},
                           {"storeSize", result.final.store.size()}};
      if (result.answer) entry["answer"] = answerString(*result.answer);
      if (result.stuck) entry["reason"] = stuckReasonName(result.stuck->reason);
      results.push_back(std::move(entry));
    } else {
      if (result.answer) {
        out << path << ": answer=" << answerString(*result.answer) << "\n";
        out << path << ": store: " << result.final.store.size() << " binding"
            << (result.final.store.size() == 1 ? "" : "s") << ", " << result.steps.size()
            << " step" << (result.steps.size() == 1 ? "" : "s") << "\n";
      } else if (result.stuck) {
        out << path << ": stuck (" << stuckReasonName(result.stuck->reason)
            << "): " << result.stuck->detail << "\n";
      } else {
        out << path << ": fuel exhausted after " << opts.fuel << " steps\n";
      }
    }
  }
  if (opts.json) out << results.dump(2) << "\n";
  return exit;
}

// ---------------------------------------------------------------------------
// soundness
// ---------------------------------------------------------------------------

namespace {

void writeCounterexample(const std::string& basePath, const harness::SoundnessReport& report,
                         std::ostream& err) {
  std::string path = basePath + ".counterexample.json";
  std::ofstream out(path);
  if (!out) {
    err << "warning: cannot write " << path << "\n";
    return;
  }
  out << harness::reportToJson(report) << "\n";
}

const char* okStr(bool b) { return b ? "ok" : "FAIL"; }

}  // namespace

int runSoundness(const Options& opts, std::ostream& out, std::ostream& err) {
  std::vector<harness::SoundnessReport> reports;

  for (const auto& path : opts.files) {
    auto loaded = loadFile(path, opts.color, err);
    if (!loaded.program) {
      harness::SoundnessReport report;
      report.programId = path;
      report.typeChecked = false;
      report.counterexample = "program failed to parse or resolve";
      reports.push_back(std::move(report));
      continue;
    }
    auto& program = *loaded.program;
    auto report = harness::checkSoundness(program.term, opts.fuel, path);
    if (!report.allOk()) writeCounterexample(path, report, err);
    reports.push_back(std::move(report));
  }

  if (opts.genSeed) {
    for (uint32_t i = 0; i < opts.genCount; ++i) {
      TermPtr program = harness::genWellTyped(*opts.genSeed + i, opts.genBudget);
      std::string id = "gen:" + std::to_string(*opts.genSeed) + "/" + std::to_string(i);
      auto report = harness::checkSoundness(program, opts.fuel, id);
      if (!report.allOk())
        writeCounterexample("gen-" + std::to_string(*opts.genSeed) + "-" + std::to_string(i),
                            report, err);
      reports.push_back(std::move(report));
    }
  }

  bool allOk = true;
  uint32_t maxSteps = 0;
  for (const auto& r : reports) {
    allOk = allOk && r.allOk();
    maxSteps = std::max(maxSteps, r.terminationSteps);
  }

  if (opts.json) {
    for (const auto& r : reports) out << harness::reportToJson(r) << "\n";
  } else {
    out << "program                                   typed  prog  pres  term  mon   shrink steps\n";
    for (const auto& r : reports) {
      std::string id = r.programId;
      if (id.size() > 40) id = "..." + id.substr(id.size() - 37);
      out << id << std::string(id.size() < 42 ? 42 - id.size() : 1, ' ')
          << okStr(r.typeChecked) << "    " << okStr(r.progressOk) << "    "
          << okStr(r.preservationOk) << "    " << okStr(r.terminationOk) << "    "
          << okStr(r.monitorOk) << "    " << okStr(r.useSetShrankOk) << "     "
          << r.terminationSteps << "\n";
    }
    out << (allOk ? "all " : "FAILURES among ") << reports.size() << " programs"
        << (allOk ? " pass" : "") << ", max steps " << maxSteps << "\n";
  }
  return allOk ? kExitOk : kExitTypeError;
}

// ---------------------------------------------------------------------------
// fmt
// ---------------------------------------------------------------------------

int runFmt(const Options& opts, std::ostream& out, std::ostream& err) {
  int exit = kExitOk;
  for (const auto& path : opts.files) {
    auto loaded = loadFile(path, opts.color, err);
    if (!loaded.program) {
      exit = std::max(exit, loaded.exitCode);
      continue;
    }
    auto& program = *loaded.program;
    std::string formatted = surface::printTerm(program.term) + "\n";
    if (opts.write) {
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      if (!file) {
        err << "error: cannot write " << path << "\n";
        exit = std::max(exit, kExitIoError);
        continue;
      }
      file << formatted;
    } else {
      out << formatted;
    }
  }
  return exit;
}

}  // namespace capless::cli
