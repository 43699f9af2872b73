// Structured errors shared by the parser, resolver, checker and CLI.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace capless {

enum class Severity { Error, Warning, Note };

enum class DiagCode {
  // lexing / parsing
  LexError,
  ParseError,
  DuplicateBinder,
  // resolution
  UnboundVariable,
  KindMismatch,
  // well-formedness
  IllFormedCaptureSet,
  IllFormedType,
  // typing
  NotAFunction,
  ArgumentTypeMismatch,
  BoundNotSatisfied,
  AvoidanceFailure,
  ExistentialEscape,
  ExpectedExistential,
  AnnotationRequired,
  SubtypeFailure,
  // runtime store typing
  StoreIllTyped,
};

const char* diagCodeName(DiagCode code);

/// Half-open source region; line and column are 1-based.
struct Span {
  uint32_t line = 0;
  uint32_t col = 0;
  uint32_t length = 0;
  uint32_t offset = 0;

  bool valid() const { return line > 0; }
};

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagCode code = DiagCode::ParseError;
  std::string message;
  Span span;             // may be invalid for errors on synthesized terms
  std::string excerpt;   // the offending source line, when known

  static Diagnostic error(DiagCode code, std::string message, Span span = {}) {
    return Diagnostic{Severity::Error, code, std::move(message), span, {}};
  }
};

/// Renders with the enclosing source line and a caret column, e.g.
///   error[UnboundVariable]: unbound variable `y`
///     --> prog.capless:3:9
///      |
///    3 | let x = y in x
///      |         ^
std::string render(const Diagnostic& d, const std::string& fileName, bool color = false);

/// Attaches source-line excerpts to diagnostics that carry spans.
void attachExcerpts(std::vector<Diagnostic>& diags, const std::string& source);

}  // namespace capless
