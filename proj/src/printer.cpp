// Pretty-printer for core values. Output re-parses and re-resolves to a
// structurally equal core. Binder names are deterministic per namespace and
// nesting depth (x0, X0, c0, ...); locations print as l0, l1, ...

#include <sstream>

#include "capless/surface.hpp"

namespace capless::surface {

namespace {

struct Printer {
  const PrintOptions& opts;

  std::string termName(uint32_t depth) const {
    if (depth < opts.termNameHints.size() && !opts.termNameHints[depth].empty())
      return opts.termNameHints[depth];
    return "x" + std::to_string(depth);
  }
  static std::string typeName(uint32_t depth) { return "X" + std::to_string(depth); }
  static std::string captName(uint32_t depth) { return "c" + std::to_string(depth); }

  // A free index i refers to the binder at depth (env - 1 - i); indices past
  // the environment render as a deliberately unparseable placeholder.
  std::string termVarName(uint32_t index, const NameEnv& env) const {
    if (index < env.termDepth) return termName(env.termDepth - 1 - index);
    return "x?" + std::to_string(index - env.termDepth);
  }
  std::string typeVarName(uint32_t index, const NameEnv& env) const {
    if (index < env.typeDepth) return typeName(env.typeDepth - 1 - index);
    return "X?" + std::to_string(index - env.typeDepth);
  }
  std::string captVarName(uint32_t index, const NameEnv& env) const {
    if (index < env.captDepth) return captName(env.captDepth - 1 - index);
    return "c?" + std::to_string(index - env.captDepth);
  }
  static std::string locName(uint32_t id) { return "l" + std::to_string(id); }

  std::string refName(Ref r, const NameEnv& env) const {
    return r.isVar() ? termVarName(r.index, env) : locName(r.index);
  }

  std::string captureSet(const CaptureSet& cs, const NameEnv& env) const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& a : cs.atoms()) {
      if (!first) out << ", ";
      first = false;
      switch (a.kind) {
        case Capture::Kind::TermVar: out << termVarName(a.index, env); break;
        case Capture::Kind::CaptVar: out << captVarName(a.index, env); break;
        case Capture::Kind::Loc: out << locName(a.index); break;
      }
    }
    out << "}";
    return out.str();
  }

  std::string boundStr(const Bound& b, const NameEnv& env) const {
    return b.isStar ? "*" : captureSet(b.captures, env);
  }

  std::string shapeStr(const ShapeType& s, const NameEnv& env) const {
    using S = ShapeType;
    return std::visit(
        Overloaded{
            [&](const S::Top&) -> std::string { return "Top"; },
            [&](const S::TypeVar& v) { return typeVarName(v.index, env); },
            [&](const S::FunDep& f) {
              NameEnv inner = env;
              ++inner.termDepth;
              return "forall (" + termName(env.termDepth) + ": " + typeStr(f.param, env) + ") " +
                     existStr(*f.result, inner);
            },
            [&](const S::FunTyp& f) {
              NameEnv inner = env;
              ++inner.typeDepth;
              return "forall [" + typeName(env.typeDepth) + " <: " + shapeStr(*f.bound, env) +
                     "] " + existStr(*f.result, inner);
            },
            [&](const S::FunCap& f) {
              NameEnv inner = env;
              ++inner.captDepth;
              return "forall [" + captName(env.captDepth) + " <: " + boundStr(f.bound, env) +
                     "] " + existStr(*f.result, inner);
            },
        },
        s.node);
  }

  static bool needsParens(const ShapeType& s) {
    return !std::holds_alternative<ShapeType::Top>(s.node) &&
           !std::holds_alternative<ShapeType::TypeVar>(s.node);
  }

  std::string typeStr(const Type& t, const NameEnv& env) const {
    std::string shape = shapeStr(*t.shape, env);
    if (t.captures.empty()) return shape;  // pure types omit ^{}
    if (needsParens(*t.shape)) shape = "(" + shape + ")";
    return shape + "^" + captureSet(t.captures, env);
  }

  std::string existStr(const ExistType& e, const NameEnv& env) const {
    if (!e.existential) return typeStr(e.body, env);
    NameEnv inner = env;
    ++inner.captDepth;
    return "exists " + captName(env.captDepth) + ". " + typeStr(e.body, inner);
  }

  std::string valueStr(const Value& v, const NameEnv& env) const {
    using V = Value;
    return std::visit(
        Overloaded{
            [&](const V::Lam& l) {
              NameEnv inner = env;
              ++inner.termDepth;
              return "fun (" + termName(env.termDepth) + ": " + typeStr(l.param, env) + ") => " +
                     termStr(*l.body, inner);
            },
            [&](const V::TLam& l) {
              NameEnv inner = env;
              ++inner.typeDepth;
              return "fun [" + typeName(env.typeDepth) + " <: " + shapeStr(*l.bound, env) +
                     "] => " + termStr(*l.body, inner);
            },
            [&](const V::CLam& l) {
              NameEnv inner = env;
              ++inner.captDepth;
              return "fun [" + captName(env.captDepth) + " <: " + boundStr(l.bound, env) +
                     "] => " + termStr(*l.body, inner);
            },
            [&](const V::Pack& p) {
              return "<" + captureSet(p.captures, env) + ", " + refName(p.ref, env) + ">";
            },
        },
        v.node);
  }

  std::string termStr(const Term& t, const NameEnv& env) const {
    using T = Term;
    const char* sep = opts.multiline ? "\n" : " ";
    return std::visit(
        Overloaded{
            [&](const T::Var& v) { return refName(v.ref, env); },
            [&](const T::Val& v) { return valueStr(v.value, env); },
            [&](const T::App& a) { return refName(a.fn, env) + " " + refName(a.arg, env); },
            [&](const T::TApp& a) {
              return refName(a.fn, env) + "[" + shapeStr(*a.arg, env) + "]";
            },
            [&](const T::CApp& a) {
              return refName(a.fn, env) + "[" + captureSet(a.arg, env) + "]";
            },
            [&](const T::Let& l) {
              NameEnv inner = env;
              ++inner.termDepth;
              return "let " + termName(env.termDepth) + " = " + termStr(*l.bound, env) + " in" +
                     sep + termStr(*l.body, inner);
            },
            [&](const T::LetEx& l) {
              NameEnv inner = env;
              ++inner.captDepth;
              ++inner.termDepth;
              return "let <" + captName(env.captDepth) + ", " + termName(env.termDepth) + "> = " +
                     termStr(*l.bound, env) + " in" + sep + termStr(*l.body, inner);
            },
        },
        t.node);
  }
};

}  // namespace

std::string printTerm(const TermPtr& t, const PrintOptions& opts) {
  return Printer{opts}.termStr(*t, NameEnv{});
}
std::string printTerm(const TermPtr& t, NameEnv env, const PrintOptions& opts) {
  return Printer{opts}.termStr(*t, env);
}
std::string printValue(const Value& v, NameEnv env, const PrintOptions& opts) {
  return Printer{opts}.valueStr(v, env);
}
std::string printAnswer(const Answer& a, NameEnv env, const PrintOptions& opts) {
  Printer p{opts};
  if (const auto* r = std::get_if<Ref>(&a.node)) return p.refName(*r, env);
  return p.valueStr(std::get<Value>(a.node), env);
}
std::string printType(const Type& t, NameEnv env) {
  PrintOptions opts;
  return Printer{opts}.typeStr(t, env);
}
std::string printExist(const ExistType& e, NameEnv env) {
  PrintOptions opts;
  return Printer{opts}.existStr(e, env);
}
std::string printShape(const ShapePtr& s, NameEnv env) {
  PrintOptions opts;
  return Printer{opts}.shapeStr(*s, env);
}
std::string printCaptureSet(const CaptureSet& cs, NameEnv env) {
  PrintOptions opts;
  return Printer{opts}.captureSet(cs, env);
}
std::string printBound(const Bound& b, NameEnv env) {
  PrintOptions opts;
  return Printer{opts}.boundStr(b, env);
}

}  // namespace capless::surface
