// Core abstract syntax of the calculus: terms, values, shape types,
// capturing types and existential types, all in de Bruijn form with three
// independent variable namespaces (term, type, capture). Store locations are
// a separate atom kind so that runtime names never collide with indices.
//
// Everything here is an immutable value; the operations at the bottom
// (shift, substitution, free-atom computation) are pure.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace capless {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

/// Variable namespaces. Each binder binds exactly one variable in exactly
/// one namespace; shifting one namespace never disturbs the others.
enum class Ns { Term, Type, Capt };

/// Thrown when a shift would push a free index below zero.
class NegativeIndexError : public std::logic_error {
 public:
  explicit NegativeIndexError(const std::string& what) : std::logic_error(what) {}
};

// ---------------------------------------------------------------------------
// Capture atoms and capture sets
// ---------------------------------------------------------------------------

/// One atom of a capture set: a term variable, a capture variable, or a
/// store location (the runtime image of a lifted let binding).
struct Capture {
  enum class Kind : uint8_t { TermVar, CaptVar, Loc };
  Kind kind;
  uint32_t index;

  static Capture termVar(uint32_t i) { return {Kind::TermVar, i}; }
  static Capture captVar(uint32_t i) { return {Kind::CaptVar, i}; }
  static Capture loc(uint32_t l) { return {Kind::Loc, l}; }

  friend bool operator==(const Capture& a, const Capture& b) {
    return a.kind == b.kind && a.index == b.index;
  }
  friend bool operator<(const Capture& a, const Capture& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  }
};

/// A duplicate-free, canonically ordered set of capture atoms.
class CaptureSet {
 public:
  CaptureSet() = default;
  CaptureSet(std::initializer_list<Capture> atoms) {
    for (const auto& a : atoms) insert(a);
  }
  static CaptureSet fromVector(std::vector<Capture> atoms) {
    CaptureSet cs;
    for (const auto& a : atoms) cs.insert(a);
    return cs;
  }

  void insert(const Capture& a) {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end() || !(*it == a)) atoms_.insert(it, a);
  }
  bool contains(const Capture& a) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    return it != atoms_.end() && *it == a;
  }
  bool empty() const { return atoms_.empty(); }
  size_t size() const { return atoms_.size(); }
  const std::vector<Capture>& atoms() const { return atoms_; }

  CaptureSet unionWith(const CaptureSet& other) const {
    CaptureSet out = *this;
    for (const auto& a : other.atoms_) out.insert(a);
    return out;
  }
  CaptureSet minus(const Capture& a) const {
    CaptureSet out;
    for (const auto& b : atoms_)
      if (!(b == a)) out.insert(b);
    return out;
  }
  bool subsetOf(const CaptureSet& other) const {
    for (const auto& a : atoms_)
      if (!other.contains(a)) return false;
    return true;
  }

  friend bool operator==(const CaptureSet& a, const CaptureSet& b) {
    return a.atoms_ == b.atoms_;
  }
  friend bool operator<(const CaptureSet& a, const CaptureSet& b) {
    return a.atoms_ < b.atoms_;
  }

 private:
  std::vector<Capture> atoms_;  // sorted, unique
};

/// Capture bound: the universal bound `*` or a concrete capture set.
struct Bound {
  bool isStar = true;
  CaptureSet captures;  // meaningful only when !isStar

  static Bound star() { return Bound{true, {}}; }
  static Bound set(CaptureSet cs) { return Bound{false, std::move(cs)}; }

  friend bool operator==(const Bound& a, const Bound& b) {
    if (a.isStar != b.isStar) return false;
    return a.isStar || a.captures == b.captures;
  }
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct ShapeType;
using ShapePtr = std::shared_ptr<const ShapeType>;

struct ExistType;

/// Capturing type S^C. A pure type is canonically S^{}.
struct Type {
  ShapePtr shape;
  CaptureSet captures;
};

/// E ::= exists c. T | T. At most one outer existential binder by
/// construction: the body is a Type, never another ExistType.
struct ExistType {
  bool existential = false;  // binds one capture variable in body when true
  Type body;
};

struct ShapeType {
  struct Top {};
  struct TypeVar {
    uint32_t index;
  };
  /// forall (x: T) E — binds one term variable in result.
  struct FunDep {
    Type param;
    std::shared_ptr<const ExistType> result;
  };
  /// forall [X <: S] E — binds one type variable in result.
  struct FunTyp {
    ShapePtr bound;
    std::shared_ptr<const ExistType> result;
  };
  /// forall [c <: B] E — binds one capture variable in result.
  struct FunCap {
    Bound bound;
    std::shared_ptr<const ExistType> result;
  };
  std::variant<Top, TypeVar, FunDep, FunTyp, FunCap> node;
};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A variable-or-location reference, the only operand form the monadic
/// syntax allows in application and pack positions.
struct Ref {
  enum class Kind : uint8_t { Var, Loc };
  Kind kind;
  uint32_t index;

  static Ref var(uint32_t i) { return {Kind::Var, i}; }
  static Ref loc(uint32_t l) { return {Kind::Loc, l}; }
  bool isVar() const { return kind == Kind::Var; }

  Capture asCapture() const {
    return isVar() ? Capture::termVar(index) : Capture::loc(index);
  }
  friend bool operator==(const Ref& a, const Ref& b) {
    return a.kind == b.kind && a.index == b.index;
  }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Value {
  /// fun (x: T) => t
  struct Lam {
    Type param;
    TermPtr body;
  };
  /// fun [X <: S] => t
  struct TLam {
    ShapePtr bound;
    TermPtr body;
  };
  /// fun [c <: B] => t
  struct CLam {
    Bound bound;
    TermPtr body;
  };
  /// <C, x>
  struct Pack {
    CaptureSet captures;
    Ref ref;
  };
  std::variant<Lam, TLam, CLam, Pack> node;
};

struct Term {
  struct Var {
    Ref ref;
  };
  struct Val {
    Value value;
  };
  struct App {
    Ref fn;
    Ref arg;
  };
  struct TApp {
    Ref fn;
    ShapePtr arg;
  };
  struct CApp {
    Ref fn;
    CaptureSet arg;
  };
  /// let x = bound in body — binds one term variable in body.
  struct Let {
    TermPtr bound;
    TermPtr body;
  };
  /// let <c, x> = bound in body — binds one capture variable (outer) and
  /// one term variable (inner) in body.
  struct LetEx {
    TermPtr bound;
    TermPtr body;
  };
  std::variant<Var, Val, App, TApp, CApp, Let, LetEx> node;
};

/// Answers are the terms that cannot step: a reference or a value.
struct Answer {
  std::variant<Ref, Value> node;
};

bool isAnswer(const Term& t);
std::optional<Answer> asAnswer(const Term& t);

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

ShapePtr top();
ShapePtr typeVar(uint32_t index);
ShapePtr funDep(Type param, ExistType result);
ShapePtr funTyp(ShapePtr bound, ExistType result);
ShapePtr funCap(Bound bound, ExistType result);

inline Type typed(ShapePtr shape, CaptureSet cs) { return Type{std::move(shape), std::move(cs)}; }
inline Type pure(ShapePtr shape) { return Type{std::move(shape), {}}; }
inline ExistType plain(Type t) { return ExistType{false, std::move(t)}; }
inline ExistType exists(Type t) { return ExistType{true, std::move(t)}; }

TermPtr termVar(Ref r);
TermPtr termVal(Value v);
TermPtr termApp(Ref fn, Ref arg);
TermPtr termTApp(Ref fn, ShapePtr arg);
TermPtr termCApp(Ref fn, CaptureSet arg);
TermPtr termLet(TermPtr bound, TermPtr body);
TermPtr termLetEx(TermPtr bound, TermPtr body);

Value lam(Type param, TermPtr body);
Value tlam(ShapePtr bound, TermPtr body);
Value clam(Bound bound, TermPtr body);
Value pack(CaptureSet cs, Ref ref);

// Deep structural equality (alpha-equivalence in de Bruijn form).
bool equal(const ShapeType& a, const ShapeType& b);
bool equal(const Type& a, const Type& b);
bool equal(const ExistType& a, const ExistType& b);
bool equal(const Value& a, const Value& b);
bool equal(const Term& a, const Term& b);
inline bool equal(const TermPtr& a, const TermPtr& b) { return equal(*a, *b); }

// ---------------------------------------------------------------------------
// Shifting, substitution and free atoms
// ---------------------------------------------------------------------------

/// Displace every free index of `ns` that is >= cutoff by `delta`.
/// Other namespaces and locations are untouched.
CaptureSet shift(const CaptureSet& cs, Ns ns, int delta, uint32_t cutoff = 0);
Bound shift(const Bound& b, Ns ns, int delta, uint32_t cutoff = 0);
ShapePtr shift(const ShapePtr& s, Ns ns, int delta, uint32_t cutoff = 0);
Type shift(const Type& t, Ns ns, int delta, uint32_t cutoff = 0);
ExistType shift(const ExistType& e, Ns ns, int delta, uint32_t cutoff = 0);
TermPtr shift(const TermPtr& t, Ns ns, int delta, uint32_t cutoff = 0);

/// Replace every free occurrence of term variable `target` by `repl`
/// (a variable or location), both in term position and inside capture sets.
/// Does not renumber other indices.
CaptureSet substTermVar(const CaptureSet& cs, uint32_t target, Ref repl);
Type substTermVar(const Type& t, uint32_t target, Ref repl);
ExistType substTermVar(const ExistType& e, uint32_t target, Ref repl);
TermPtr substTermVar(const TermPtr& t, uint32_t target, Ref repl);

/// Replace every free occurrence of type variable `target` by the shape `repl`.
ShapePtr substTypeVar(const ShapePtr& s, uint32_t target, const ShapePtr& repl);
Type substTypeVar(const Type& t, uint32_t target, const ShapePtr& repl);
ExistType substTypeVar(const ExistType& e, uint32_t target, const ShapePtr& repl);
TermPtr substTypeVar(const TermPtr& t, uint32_t target, const ShapePtr& repl);

/// Capture-variable substitution with flattening set-union semantics:
/// ({c} u R)[c := C] = C u R in every capture set of the subject.
CaptureSet substCaptVar(const CaptureSet& cs, uint32_t target, const CaptureSet& repl);
Type substCaptVar(const Type& t, uint32_t target, const CaptureSet& repl);
ExistType substCaptVar(const ExistType& e, uint32_t target, const CaptureSet& repl);
TermPtr substCaptVar(const TermPtr& t, uint32_t target, const CaptureSet& repl);

/// Instantiate a binder: the subject sits under one binder of the given
/// namespace (index 0); the binder is consumed and all remaining indices of
/// that namespace are renumbered down by one. Built from shift + subst.
TermPtr openTermVar(const TermPtr& body, Ref repl);
ExistType openTermVar(const ExistType& body, Ref repl);
TermPtr openTypeVar(const TermPtr& body, const ShapePtr& repl);
ExistType openTypeVar(const ExistType& body, const ShapePtr& repl);
TermPtr openCaptVar(const TermPtr& body, const CaptureSet& repl);
ExistType openCaptVar(const ExistType& body, const CaptureSet& repl);
Type openCaptVar(const Type& body, const CaptureSet& repl);

/// Applies fn to every capture set inside the type, passing the binder
/// depths entered so far (term, type, capture).
Type rewriteCaptureSets(
    const Type& t,
    const std::function<CaptureSet(const CaptureSet&, uint32_t, uint32_t, uint32_t)>& fn);

/// Free indices of one namespace; locations are collected alongside and are
/// only ever populated for the term namespace.
struct FreeAtoms {
  std::set<uint32_t> indices;
  std::set<uint32_t> locations;

  bool containsIndex(uint32_t i) const { return indices.count(i) > 0; }
};

FreeAtoms freeAtoms(Ns ns, const CaptureSet& cs);
FreeAtoms freeAtoms(Ns ns, const Type& t);
FreeAtoms freeAtoms(Ns ns, const ExistType& e);
FreeAtoms freeAtoms(Ns ns, const ShapePtr& s);
FreeAtoms freeAtoms(Ns ns, const TermPtr& t);

}  // namespace capless
