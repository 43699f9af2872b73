#include "capless/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace capless {

const char* diagCodeName(DiagCode code) {
  switch (code) {
    case DiagCode::LexError: return "LexError";
    case DiagCode::ParseError: return "ParseError";
    case DiagCode::DuplicateBinder: return "DuplicateBinder";
    case DiagCode::UnboundVariable: return "UnboundVariable";
    case DiagCode::KindMismatch: return "KindMismatch";
    case DiagCode::IllFormedCaptureSet: return "IllFormedCaptureSet";
    case DiagCode::IllFormedType: return "IllFormedType";
    case DiagCode::NotAFunction: return "NotAFunction";
    case DiagCode::ArgumentTypeMismatch: return "ArgumentTypeMismatch";
    case DiagCode::BoundNotSatisfied: return "BoundNotSatisfied";
    case DiagCode::AvoidanceFailure: return "AvoidanceFailure";
    case DiagCode::ExistentialEscape: return "ExistentialEscape";
    case DiagCode::ExpectedExistential: return "ExpectedExistential";
    case DiagCode::AnnotationRequired: return "AnnotationRequired";
    case DiagCode::SubtypeFailure: return "SubtypeFailure";
    case DiagCode::StoreIllTyped: return "StoreIllTyped";
  }
  return "?";
}

namespace {
const char* severityName(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "?";
}

std::string sourceLine(const std::string& source, uint32_t lineNo) {
  uint32_t line = 1;
  size_t start = 0;
  for (size_t i = 0; i <= source.size(); ++i) {
    if (i == source.size() || source[i] == '\n') {
      if (line == lineNo) return source.substr(start, i - start);
      start = i + 1;
      ++line;
    }
  }
  return {};
}
}  // namespace

void attachExcerpts(std::vector<Diagnostic>& diags, const std::string& source) {
  for (auto& d : diags)
    if (d.span.valid() && d.excerpt.empty()) d.excerpt = sourceLine(source, d.span.line);
}

std::string render(const Diagnostic& d, const std::string& fileName, bool color) {
  const char* bold = color ? "\x1b[1m" : "";
  const char* red = color ? "\x1b[31m" : "";
  const char* reset = color ? "\x1b[0m" : "";

  std::ostringstream out;
  out << bold << red << severityName(d.severity) << "[" << diagCodeName(d.code) << "]" << reset
      << bold << ": " << d.message << reset << "\n";
  if (d.span.valid()) {
    std::string lineNo = std::to_string(d.span.line);
    std::string gutter(lineNo.size() + 1, ' ');
    out << gutter << "--> " << fileName << ":" << d.span.line << ":" << d.span.col << "\n";
    if (!d.excerpt.empty()) {
      out << gutter << "|\n";
      out << " " << lineNo << " | " << d.excerpt << "\n";
      out << gutter << "| " << std::string(d.span.col > 0 ? d.span.col - 1 : 0, ' ') << red
          << std::string(std::max<uint32_t>(1, d.span.length), '^') << reset << "\n";
    }
  } else {
    out << "  --> " << fileName << "\n";
  }
  return out.str();
}

}  // namespace capless
