#include <cctype>

#include "capless/surface.hpp"

namespace capless::surface {

namespace {

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identCont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

TokKind keywordOrIdent(const std::string& text) {
  if (text == "fun") return TokKind::KwFun;
  if (text == "forall") return TokKind::KwForall;
  if (text == "exists") return TokKind::KwExists;
  if (text == "let") return TokKind::KwLet;
  if (text == "in") return TokKind::KwIn;
  if (text == "Top") return TokKind::KwTop;
  return (text[0] >= 'A' && text[0] <= 'Z') ? TokKind::UIdent : TokKind::LIdent;
}

}  // namespace

LexResult lex(const std::string& text) {
  LexResult result;
  uint32_t line = 1, col = 1;
  size_t i = 0;

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {  // line comment
      while (i < text.size() && text[i] != '\n') ++i, ++col;
      continue;
    }
    if (identStart(c)) {
      size_t start = i;
      uint32_t startCol = col;
      while (i < text.size() && identCont(text[i])) ++i, ++col;
      std::string word = text.substr(start, i - start);
      result.tokens.push_back(Token{keywordOrIdent(word), word,
                                    Span{line, startCol, static_cast<uint32_t>(word.size()),
                                         static_cast<uint32_t>(start)}});
      continue;
    }

    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    auto emit = [&](TokKind kind, uint32_t len) {
      result.tokens.push_back(Token{kind, text.substr(i, len),
                                    Span{line, col, len, static_cast<uint32_t>(i)}});
      i += len;
      col += len;
    };

    if (two('<', ':')) { emit(TokKind::SubtypeOf, 2); continue; }
    if (two('=', '>')) { emit(TokKind::FatArrow, 2); continue; }
    switch (c) {
      case '(': emit(TokKind::LParen, 1); continue;
      case ')': emit(TokKind::RParen, 1); continue;
      case '[': emit(TokKind::LBracket, 1); continue;
      case ']': emit(TokKind::RBracket, 1); continue;
      case '{': emit(TokKind::LBrace, 1); continue;
      case '}': emit(TokKind::RBrace, 1); continue;
      case '<': emit(TokKind::Lt, 1); continue;
      case '>': emit(TokKind::Gt, 1); continue;
      case ',': emit(TokKind::Comma, 1); continue;
      case '.': emit(TokKind::Dot, 1); continue;
      case ':': emit(TokKind::Colon, 1); continue;
      case '^': emit(TokKind::Caret, 1); continue;
      case '*': emit(TokKind::Star, 1); continue;
      case '=': emit(TokKind::Eq, 1); continue;
      default:
        result.diagnostics.push_back(Diagnostic::error(
            DiagCode::LexError, std::string("unexpected character `") + c + "`",
            Span{line, col, 1, static_cast<uint32_t>(i)}));
        return result;
    }
  }
  result.tokens.push_back(Token{TokKind::End, "", Span{line, col, 0, static_cast<uint32_t>(i)}});
  return result;
}

}  // namespace capless::surface
