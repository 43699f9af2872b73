#include <unistd.h>

#include <iostream>

#include "CLI11.hpp"
#include "capless/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"capless: checker, evaluator and soundness harness for .capless programs"};
  app.require_subcommand(1);

  capless::cli::Options opts;
  opts.color = capless::cli::colorEnabled(isatty(fileno(stdout)) != 0);

  std::vector<uint64_t> gen;

  auto addCommon = [&](CLI::App* cmd, bool wantsFiles) {
    cmd->add_flag("--json", opts.json, "emit structured JSON instead of human output");
    cmd->add_option("--fuel", opts.fuel, "maximum number of reduction steps")
        ->check(CLI::PositiveNumber);
    if (wantsFiles)
      cmd->add_option("files", opts.files, "input .capless files")->expected(-1);
  };

  CLI::App* check = app.add_subcommand("check", "type-check programs");
  addCommon(check, true);
  check->add_flag("--trace", opts.trace, "print the typing derivation trace");

  CLI::App* eval = app.add_subcommand("eval", "evaluate programs to an answer");
  addCommon(eval, true);
  eval->add_flag("--trace", opts.trace, "print one line per reduction step");
  eval->add_flag("--unchecked", opts.unchecked, "skip type checking before evaluating");

  CLI::App* trace = app.add_subcommand("trace", "evaluate with a full step trace");
  addCommon(trace, true);
  trace->add_flag("--unchecked", opts.unchecked, "skip type checking before evaluating");

  CLI::App* soundness =
      app.add_subcommand("soundness", "progress/preservation/termination/monitor checks");
  addCommon(soundness, true);
  soundness->add_option("--gen", gen, "SEED COUNT: also check generated programs")
      ->expected(2);
  soundness->add_option("--gen-budget", opts.genBudget, "size budget for generated programs");

  CLI::App* fmt = app.add_subcommand("fmt", "re-print programs in canonical form");
  addCommon(fmt, true);
  fmt->add_flag("--write", opts.write, "rewrite the input files in place");

  CLI11_PARSE(app, argc, argv);

  if (gen.size() == 2) {
    opts.genSeed = gen[0];
    opts.genCount = static_cast<uint32_t>(gen[1]);
  }

  if (check->parsed()) return capless::cli::runCheck(opts, std::cout, std::cerr);
  if (eval->parsed()) return capless::cli::runEval(opts, std::cout, std::cerr);
  if (trace->parsed()) {
    opts.trace = true;
    return capless::cli::runEval(opts, std::cout, std::cerr);
  }
  if (soundness->parsed()) return capless::cli::runSoundness(opts, std::cout, std::cerr);
  if (fmt->parsed()) return capless::cli::runFmt(opts, std::cout, std::cerr);
  return 0;
}
