// Command implementations behind the `capless` binary, exposed as a library
// so tests can drive them directly.
//
//   capless check|eval|trace|soundness|fmt [--json] [--fuel N]
//           [--gen SEED COUNT] [--write] [--unchecked] [--trace] <files...>
//
// Exit codes: 0 success; 1 type errors / failed soundness flags; 2 parse
// errors; 3 I/O errors; 4 stuck evaluation; 5 fuel exhausted.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capless::cli {

struct Options {
  std::vector<std::string> files;
  uint32_t fuel = 10000;
  bool json = false;
  bool trace = false;
  bool write = false;
  bool unchecked = false;
  std::optional<uint64_t> genSeed;
  uint32_t genCount = 0;
  uint32_t genBudget = 24;
  bool color = false;
};

int runCheck(const Options& opts, std::ostream& out, std::ostream& err);
int runEval(const Options& opts, std::ostream& out, std::ostream& err);
int runSoundness(const Options& opts, std::ostream& out, std::ostream& err);
int runFmt(const Options& opts, std::ostream& out, std::ostream& err);

/// True when CAPLESS_COLOR (never|auto) and the tty allow color output.
bool colorEnabled(bool stdoutIsTty);

}  // namespace capless::cli
