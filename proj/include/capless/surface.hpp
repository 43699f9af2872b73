// Concrete syntax: lexer, parser, name resolution to the de Bruijn core,
// and a pretty-printer whose output re-parses to the same core.
//
// Files use extension .capless, UTF-8, `#` line comments. Uppercase
// identifiers are type variables; lowercase identifiers are term or capture
// variables, disambiguated by the binder that introduces them.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capless/checker.hpp"
#include "capless/diagnostics.hpp"
#include "capless/syntax.hpp"

namespace capless::surface {

// --- tokens -----------------------------------------------------------------

enum class TokKind {
  LIdent,
  UIdent,
  KwFun,
  KwForall,
  KwExists,
  KwLet,
  KwIn,
  KwTop,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Lt,
  Gt,
  Comma,
  Dot,
  Colon,
  Caret,
  Star,
  Eq,
  FatArrow,
  SubtypeOf,  // <:
  End,
};

struct Token {
  TokKind kind;
  std::string text;
  Span span;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

LexResult lex(const std::string& text);

// --- surface trees ----------------------------------------------------------

struct Ident {
  std::string text;
  Span span;
  bool upper() const { return !text.empty() && text[0] >= 'A' && text[0] <= 'Z'; }
};

struct SCaptSet {
  std::vector<Ident> atoms;
  Span span;
};

struct SBound {
  bool star = true;
  SCaptSet set;  // meaningful when !star
  Span span;
};

struct SShape;
using SShapePtr = std::shared_ptr<const SShape>;

struct SType {
  SShapePtr shape;
  std::optional<SCaptSet> captures;
  Span span;
};

struct SEType {
  std::optional<Ident> binder;  // present for `exists c. T`
  SType type;
  Span span;
};

struct SShape {
  struct Top {};
  struct Var {
    Ident name;
  };
  struct FunDep {
    Ident param;
    SType paramType;
    SEType result;
  };
  struct FunTyp {
    Ident param;
    SShapePtr bound;
    SEType result;
  };
  struct FunCap {
    Ident param;
    SBound bound;
    SEType result;
  };
  std::variant<Top, Var, FunDep, FunTyp, FunCap> node;
  Span span;
};

struct STerm;
using STermPtr = std::shared_ptr<const STerm>;

struct SValue {
  struct Lam {
    Ident param;
    SType paramType;
    STermPtr body;
  };
  struct TLam {
    Ident param;
    SShapePtr bound;
    STermPtr body;
  };
  struct CLam {
    Ident param;
    SBound bound;
    STermPtr body;
  };
  struct Pack {
    SCaptSet captures;
    Ident ref;
  };
  std::variant<Lam, TLam, CLam, Pack> node;
  Span span;
};

struct STerm {
  struct Var {
    Ident name;
  };
  struct Val {
    SValue value;
  };
  struct App {
    Ident fn;
    Ident arg;
  };
  struct TApp {
    Ident fn;
    SShapePtr arg;
  };
  struct CApp {
    Ident fn;
    SCaptSet arg;
  };
  struct Let {
    Ident binder;
    STermPtr bound;
    STermPtr body;
  };
  struct LetEx {
    Ident captBinder;
    Ident termBinder;
    STermPtr bound;
    STermPtr body;
  };
  std::variant<Var, Val, App, TApp, CApp, Let, LetEx> node;
  Span span;
};

struct Decl {
  Ident name;
  STermPtr value;
};

// Declarations have no concrete syntax (the grammar defines programs as a
// single term); they exist for programmatic construction and desugar to let
// bindings around the main term during resolution.
struct SurfaceProgram {
  std::vector<Decl> decls;
  STermPtr main;
};

// --- parsing and resolution --------------------------------------------------

struct ParseResult {
  std::optional<SurfaceProgram> program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return program.has_value(); }
};

ParseResult parse(const std::string& text);

struct ResolveResult {
  TermPtr term;  // null on failure
  SpanIndex spans;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return term != nullptr; }
};

ResolveResult resolve(const SurfaceProgram& program);

/// parse + resolve, with excerpts attached to any diagnostics.
ResolveResult load(const std::string& text);

// --- printing ----------------------------------------------------------------

/// Deterministic binder names per namespace: x0,x1,... / X0,... / c0,...
/// Hints, when given, override generated term-binder names by depth.
struct PrintOptions {
  bool multiline = true;  // lets break after `in`
  std::vector<std::string> termNameHints;
};

struct NameEnv {
  uint32_t termDepth = 0, typeDepth = 0, captDepth = 0;
};

std::string printTerm(const TermPtr& t, const PrintOptions& opts = {});
std::string printTerm(const TermPtr& t, NameEnv env, const PrintOptions& opts);
std::string printValue(const Value& v, NameEnv env, const PrintOptions& opts = {});
std::string printAnswer(const Answer& a, NameEnv env = {}, const PrintOptions& opts = {});
std::string printType(const Type& t, NameEnv env = {});
std::string printExist(const ExistType& e, NameEnv env = {});
std::string printShape(const ShapePtr& s, NameEnv env = {});
std::string printCaptureSet(const CaptureSet& cs, NameEnv env = {});
std::string printBound(const Bound& b, NameEnv env = {});

}  // namespace capless::surface
