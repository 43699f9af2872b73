// Recursive-descent parser for the .capless grammar:
//
//   program := term
//   term    := answer | ident ident | ident '[' shape ']' | ident '[' captset ']'
//            | 'let' ident '=' term 'in' term
//            | 'let' '<' ident ',' ident '>' '=' term 'in' term
//   value   := 'fun' '(' ident ':' type ')' '=>' term
//            | 'fun' '[' UIDENT '<:' shape ']' '=>' term
//            | 'fun' '[' ident '<:' bound ']' '=>' term
//            | '<' captset ',' ident '>'
//   shape   := 'Top' | UIDENT | 'forall' '(' ident ':' type ')' etype
//            | 'forall' '[' UIDENT '<:' shape ']' etype
//            | 'forall' '[' ident '<:' bound ']' etype | '(' shape ')'
//   type    := shape ['^' captset]
//   etype   := 'exists' ident '.' type | type
//   captset := '{' [ident (',' ident)*] '}'
//   bound   := '*' | captset
//
// Single-token lookahead everywhere except `x[...`, which peeks one more
// token to split capture application (brace) from type application.

#include "capless/surface.hpp"

namespace capless::surface {

namespace {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  std::optional<SurfaceProgram> program() {
    SurfaceProgram sp;
    auto main = term();
    if (!main) return std::nullopt;
    if (!at(TokKind::End)) {
      error("expected end of input after the main term");
      return std::nullopt;
    }
    sp.main = *main;
    return sp;
  }

 private:
  std::vector<Token> tokens_;
  std::vector<Diagnostic>& diags_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(TokKind k) const { return peek().kind == k; }
  Token advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  void error(std::string message, std::optional<Span> span = std::nullopt) {
    diags_.push_back(
        Diagnostic::error(DiagCode::ParseError, std::move(message), span.value_or(peek().span)));
  }

  bool expect(TokKind k, const char* what) {
    if (at(k)) {
      advance();
      return true;
    }
    error(std::string("expected ") + what);
    return false;
  }

  std::optional<Ident> expectLower(const char* what) {
    if (at(TokKind::LIdent)) {
      Token t = advance();
      return Ident{t.text, t.span};
    }
    error(std::string("expected ") + what + " (a lowercase identifier)");
    return std::nullopt;
  }

  std::optional<Ident> expectUpper(const char* what) {
    if (at(TokKind::UIdent)) {
      Token t = advance();
      return Ident{t.text, t.span};
    }
    error(std::string("expected ") + what + " (an uppercase identifier)");
    return std::nullopt;
  }

  // Any identifier token: capture sets may contain either case; the
  // resolver rejects uppercase atoms with KindMismatch.
  std::optional<Ident> anyIdent(const char* what) {
    if (at(TokKind::LIdent) || at(TokKind::UIdent)) {
      Token t = advance();
      return Ident{t.text, t.span};
    }
    error(std::string("expected ") + what);
    return std::nullopt;
  }

  std::optional<SCaptSet> captset() {
    Span start = peek().span;
    if (!expect(TokKind::LBrace, "`{`")) return std::nullopt;
    SCaptSet cs;
    cs.span = start;
    if (!at(TokKind::RBrace)) {
      for (;;) {
        auto id = anyIdent("a capture atom");
        if (!id) return std::nullopt;
        cs.atoms.push_back(*id);
        if (at(TokKind::Comma)) {
          advance();
          continue;
        }
        break;
      }
    }
    if (!expect(TokKind::RBrace, "`}`")) return std::nullopt;
    return cs;
  }

  std::optional<SBound> bound() {
    Span start = peek().span;
    if (at(TokKind::Star)) {
      advance();
      return SBound{true, {}, start};
    }
    auto cs = captset();
    if (!cs) return std::nullopt;
    return SBound{false, *cs, start};
  }

  std::optional<SType> type() {
    Span start = peek().span;
    auto s = shape();
    if (!s) return std::nullopt;
    SType t;
    t.shape = *s;
    t.span = start;
    if (at(TokKind::Caret)) {
      advance();
      auto cs = captset();
      if (!cs) return std::nullopt;
      t.captures = *cs;
    }
    return t;
  }

  std::optional<SEType> etype() {
    Span start = peek().span;
    if (at(TokKind::KwExists)) {
      advance();
      auto binder = expectLower("the existential's capture binder");
      if (!binder) return std::nullopt;
      if (!expect(TokKind::Dot, "`.`")) return std::nullopt;
      auto t = type();
      if (!t) return std::nullopt;
      return SEType{*binder, *t, start};
    }
    auto t = type();
    if (!t) return std::nullopt;
    return SEType{std::nullopt, *t, start};
  }

  std::optional<SShapePtr> shape() {
    Span start = peek().span;
    if (at(TokKind::KwTop)) {
      advance();
      return std::make_shared<const SShape>(SShape{SShape::Top{}, start});
    }
    if (at(TokKind::UIdent)) {
      Token t = advance();
      return std::make_shared<const SShape>(SShape{SShape::Var{Ident{t.text, t.span}}, start});
    }
    if (at(TokKind::LParen)) {
      advance();
      auto s = shape();
      if (!s) return std::nullopt;
      if (!expect(TokKind::RParen, "`)`")) return std::nullopt;
      return s;
    }
    if (at(TokKind::KwForall)) {
      advance();
      if (at(TokKind::LParen)) {
        advance();
        auto param = expectLower("the parameter name");
        if (!param) return std::nullopt;
        if (!expect(TokKind::Colon, "`:`")) return std::nullopt;
        auto pt = type();
        if (!pt) return std::nullopt;
        if (!expect(TokKind::RParen, "`)`")) return std::nullopt;
        auto res = etype();
        if (!res) return std::nullopt;
        return std::make_shared<const SShape>(
            SShape{SShape::FunDep{*param, *pt, *res}, start});
      }
      if (!expect(TokKind::LBracket, "`(` or `[`")) return std::nullopt;
      if (at(TokKind::UIdent)) {
        Token t = advance();
        if (!expect(TokKind::SubtypeOf, "`<:`")) return std::nullopt;
        auto b = shape();
        if (!b) return std::nullopt;
        if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
        auto res = etype();
        if (!res) return std::nullopt;
        return std::make_shared<const SShape>(
            SShape{SShape::FunTyp{Ident{t.text, t.span}, *b, *res}, start});
      }
      auto param = expectLower("a type or capture variable binder");
      if (!param) return std::nullopt;
      if (!expect(TokKind::SubtypeOf, "`<:`")) return std::nullopt;
      auto b = bound();
      if (!b) return std::nullopt;
      if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
      auto res = etype();
      if (!res) return std::nullopt;
      return std::make_shared<const SShape>(
          SShape{SShape::FunCap{*param, *b, *res}, start});
    }
    error("expected a shape type");
    return std::nullopt;
  }

  std::optional<SValue> value() {
    Span start = peek().span;
    if (at(TokKind::Lt)) {  // pack: <captset, x>
      advance();
      auto cs = captset();
      if (!cs) return std::nullopt;
      if (!expect(TokKind::Comma, "`,`")) return std::nullopt;
      auto ref = expectLower("the packed variable");
      if (!ref) return std::nullopt;
      if (!expect(TokKind::Gt, "`>`")) return std::nullopt;
      return SValue{SValue::Pack{*cs, *ref}, start};
    }
    if (!expect(TokKind::KwFun, "`fun`")) return std::nullopt;
    if (at(TokKind::LParen)) {
      advance();
      auto param = expectLower("the parameter name");
      if (!param) return std::nullopt;
      if (!expect(TokKind::Colon, "`:`")) return std::nullopt;
      auto pt = type();
      if (!pt) return std::nullopt;
      if (!expect(TokKind::RParen, "`)`")) return std::nullopt;
      if (!expect(TokKind::FatArrow, "`=>`")) return std::nullopt;
      auto body = term();
      if (!body) return std::nullopt;
      return SValue{SValue::Lam{*param, *pt, *body}, start};
    }
    if (!expect(TokKind::LBracket, "`(` or `[`")) return std::nullopt;
    if (at(TokKind::UIdent)) {
      Token t = advance();
      if (!expect(TokKind::SubtypeOf, "`<:`")) return std::nullopt;
      auto b = shape();
      if (!b) return std::nullopt;
      if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
      if (!expect(TokKind::FatArrow, "`=>`")) return std::nullopt;
      auto body = term();
      if (!body) return std::nullopt;
      return SValue{SValue::TLam{Ident{t.text, t.span}, *b, *body}, start};
    }
    auto param = expectLower("a type or capture variable binder");
    if (!param) return std::nullopt;
    if (!expect(TokKind::SubtypeOf, "`<:`")) return std::nullopt;
    auto b = bound();
    if (!b) return std::nullopt;
    if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
    if (!expect(TokKind::FatArrow, "`=>`")) return std::nullopt;
    auto body = term();
    if (!body) return std::nullopt;
    return SValue{SValue::CLam{*param, *b, *body}, start};
  }

  std::optional<STermPtr> term() {
    Span start = peek().span;
    if (at(TokKind::KwLet)) {
      advance();
      if (at(TokKind::Lt)) {  // let <c, x> = t in u
        advance();
        auto captBinder = expectLower("the capture binder");
        if (!captBinder) return std::nullopt;
        if (!expect(TokKind::Comma, "`,`")) return std::nullopt;
        auto termBinder = expectLower("the term binder");
        if (!termBinder) return std::nullopt;
        if (captBinder->text == termBinder->text) {
          diags_.push_back(Diagnostic::error(
              DiagCode::DuplicateBinder,
              "binders in `let <" + captBinder->text + ", " + termBinder->text +
                  ">` must be distinct",
              termBinder->span));
          return std::nullopt;
        }
        if (!expect(TokKind::Gt, "`>`")) return std::nullopt;
        if (!expect(TokKind::Eq, "`=`")) return std::nullopt;
        auto boundTerm = term();
        if (!boundTerm) return std::nullopt;
        if (!expect(TokKind::KwIn, "`in`")) return std::nullopt;
        auto body = term();
        if (!body) return std::nullopt;
        return std::make_shared<const STerm>(
            STerm{STerm::LetEx{*captBinder, *termBinder, *boundTerm, *body}, start});
      }
      auto binder = expectLower("the let binder");
      if (!binder) return std::nullopt;
      if (!expect(TokKind::Eq, "`=`")) return std::nullopt;
      auto boundTerm = term();
      if (!boundTerm) return std::nullopt;
      if (!expect(TokKind::KwIn, "`in`")) return std::nullopt;
      auto body = term();
      if (!body) return std::nullopt;
      return std::make_shared<const STerm>(
          STerm{STerm::Let{*binder, *boundTerm, *body}, start});
    }
    if (at(TokKind::KwFun) || at(TokKind::Lt)) {
      auto v = value();
      if (!v) return std::nullopt;
      return std::make_shared<const STerm>(STerm{STerm::Val{*v}, start});
    }
    if (at(TokKind::LIdent)) {
      Token head = advance();
      Ident fn{head.text, head.span};
      if (at(TokKind::LIdent)) {
        Token arg = advance();
        return std::make_shared<const STerm>(
            STerm{STerm::App{fn, Ident{arg.text, arg.span}}, start});
      }
      if (at(TokKind::LBracket)) {
        advance();
        if (at(TokKind::LBrace)) {  // capture application: x[{...}]
          auto cs = captset();
          if (!cs) return std::nullopt;
          if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
          return std::make_shared<const STerm>(STerm{STerm::CApp{fn, *cs}, start});
        }
        auto s = shape();
        if (!s) return std::nullopt;
        if (!expect(TokKind::RBracket, "`]`")) return std::nullopt;
        return std::make_shared<const STerm>(STerm{STerm::TApp{fn, *s}, start});
      }
      return std::make_shared<const STerm>(STerm{STerm::Var{fn}, start});
    }
    error("expected a term");
    return std::nullopt;
  }
};

}  // namespace

ParseResult parse(const std::string& text) {
  ParseResult result;
  auto lexed = lex(text);
  if (!lexed.ok()) {
    result.diagnostics = std::move(lexed.diagnostics);
    attachExcerpts(result.diagnostics, text);
    return result;
  }
  if (lexed.tokens.size() == 1) {  // only End: empty input
    result.diagnostics.push_back(
        Diagnostic::error(DiagCode::ParseError, "empty input: expected a term",
                          lexed.tokens.front().span));
    attachExcerpts(result.diagnostics, text);
    return result;
  }
  Parser parser(std::move(lexed.tokens), result.diagnostics);
  result.program = parser.program();
  attachExcerpts(result.diagnostics, text);
  return result;
}

}  // namespace capless::surface
