// A naive named-variable mirror of the core syntax, used only in tests as an
// independent oracle for shifting and substitution. Core terms convert to
// named trees (binders get fresh names, free indices take names from an
// environment), substitution happens textbook-style on names, and the result
// converts back to de Bruijn for structural comparison.

#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "capless/syntax.hpp"

namespace capless::testing {

using NAtom = std::variant<std::string, uint32_t>;  // free/bound name or location

struct NCaptureSet {
  std::set<NAtom> atoms;
};

struct NBound {
  bool star = true;
  NCaptureSet set;
};

struct NShape;
using NShapePtr = std::shared_ptr<const NShape>;

struct NType {
  NShapePtr shape;
  NCaptureSet captures;
};

struct NExist {
  std::optional<std::string> binder;
  NType body;
};

struct NShape {
  struct Top {};
  struct Var {
    std::string name;
  };
  struct FunDep {
    std::string param;
    NType paramType;
    NExist result;
  };
  struct FunTyp {
    std::string param;
    NShapePtr bound;
    NExist result;
  };
  struct FunCap {
    std::string param;
    NBound bound;
    NExist result;
  };
  std::variant<Top, Var, FunDep, FunTyp, FunCap> node;
};

using NRef = NAtom;

struct NTerm;
using NTermPtr = std::shared_ptr<const NTerm>;

struct NValue {
  struct Lam {
    std::string param;
    NType paramType;
    NTermPtr body;
  };
  struct TLam {
    std::string param;
    NShapePtr bound;
    NTermPtr body;
  };
  struct CLam {
    std::string param;
    NBound bound;
    NTermPtr body;
  };
  struct Pack {
    NCaptureSet captures;
    NRef ref;
  };
  std::variant<Lam, TLam, CLam, Pack> node;
};

struct NTerm {
  struct Var {
    NRef ref;
  };
  struct Val {
    NValue value;
  };
  struct App {
    NRef fn, arg;
  };
  struct TApp {
    NRef fn;
    NShapePtr arg;
  };
  struct CApp {
    NRef fn;
    NCaptureSet arg;
  };
  struct Let {
    std::string binder;
    NTermPtr bound, body;
  };
  struct LetEx {
    std::string captBinder, termBinder;
    NTermPtr bound, body;
  };
  std::variant<Var, Val, App, TApp, CApp, Let, LetEx> node;
};

/// Free-name environments, outermost first: de Bruijn index i resolves to
/// names[size-1-i]. Conversion pushes fresh binder names.
struct NameEnv {
  std::vector<std::string> term, type, capt;
  uint64_t freshCounter = 0;

  static NameEnv free(uint32_t termCount, uint32_t typeCount, uint32_t captCount);
};

NTermPtr toNamed(const TermPtr& t, NameEnv env);
NType toNamed(const Type& t, NameEnv env);
NExist toNamed(const ExistType& e, NameEnv env);
NCaptureSet toNamed(const CaptureSet& cs, const NameEnv& env);
NShapePtr toNamedShape(const ShapePtr& s, NameEnv env);

TermPtr fromNamed(const NTermPtr& t, const NameEnv& env);
Type fromNamed(const NType& t, const NameEnv& env);
ExistType fromNamed(const NExist& e, const NameEnv& env);
CaptureSet fromNamed(const NCaptureSet& cs, const NameEnv& env);

// Textbook named substitution. Binder freshness (conversion never reuses a
// free name for a binder) makes these capture-free.
NTermPtr nsubstTermVar(const NTermPtr& t, const std::string& name, const NRef& repl);
NType nsubstTermVar(const NType& t, const std::string& name, const NRef& repl);
NExist nsubstTermVar(const NExist& e, const std::string& name, const NRef& repl);
NCaptureSet nsubstTermVar(const NCaptureSet& cs, const std::string& name, const NRef& repl);

NTermPtr nsubstTypeVar(const NTermPtr& t, const std::string& name, const NShapePtr& repl);
NType nsubstTypeVar(const NType& t, const std::string& name, const NShapePtr& repl);
NExist nsubstTypeVar(const NExist& e, const std::string& name, const NShapePtr& repl);

NTermPtr nsubstCaptVar(const NTermPtr& t, const std::string& name, const NCaptureSet& repl);
NType nsubstCaptVar(const NType& t, const std::string& name, const NCaptureSet& repl);
NExist nsubstCaptVar(const NExist& e, const std::string& name, const NCaptureSet& repl);
NCaptureSet nsubstCaptVar(const NCaptureSet& cs, const std::string& name, const NCaptureSet& repl);

}  // namespace capless::testing
