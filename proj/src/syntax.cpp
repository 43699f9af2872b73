#include "capless/syntax.hpp"

#include <algorithm>
#include <functional>

namespace capless {

namespace {

// Binder depths accumulated while descending, one per namespace.
struct Depths {
  uint32_t term = 0, type = 0, capt = 0;

  uint32_t of(Ns ns) const {
    switch (ns) {
      case Ns::Term: return term;
      case Ns::Type: return type;
      case Ns::Capt: return capt;
    }
    return 0;
  }
  Depths enter(Ns ns) const {
    Depths d = *this;
    switch (ns) {
      case Ns::Term: ++d.term; break;
      case Ns::Type: ++d.type; break;
      case Ns::Capt: ++d.capt; break;
    }
    return d;
  }
};

// One traversal serves shift and all three substitutions: leaves are
// rewritten by the callbacks, binders adjust the depths.
struct Rewriter {
  std::function<CaptureSet(const CaptureSet&, const Depths&)> onSet;
  std::function<ShapePtr(uint32_t, const Depths&)> onTypeVar;
  std::function<Ref(Ref, const Depths&)> onRef;

  CaptureSet set(const CaptureSet& cs, const Depths& d) const {
    return onSet ? onSet(cs, d) : cs;
  }
  ShapePtr tyvar(uint32_t idx, const Depths& d) const {
    return onTypeVar ? onTypeVar(idx, d) : typeVar(idx);
  }
  Ref ref(Ref r, const Depths& d) const { return onRef ? onRef(r, d) : r; }
};

Bound rwBound(const Bound& b, const Rewriter& rw, Depths d);
ShapePtr rwShape(const ShapeType& s, const Rewriter& rw, Depths d);
Type rwType(const Type& t, const Rewriter& rw, Depths d);
ExistType rwExist(const ExistType& e, const Rewriter& rw, Depths d);
TermPtr rwTerm(const Term& t, const Rewriter& rw, Depths d);
Value rwValue(const Value& v, const Rewriter& rw, Depths d);

Bound rwBound(const Bound& b, const Rewriter& rw, Depths d) {
  if (b.isStar) return b;
  return Bound::set(rw.set(b.captures, d));
}

ShapePtr rwShape(const ShapeType& s, const Rewriter& rw, Depths d) {
  using S = ShapeType;
  return std::visit(
      Overloaded{
          [&](const S::Top&) { return top(); },
          [&](const S::TypeVar& v) { return rw.tyvar(v.index, d); },
          [&](const S::FunDep& f) {
            return funDep(rwType(f.param, rw, d), rwExist(*f.result, rw, d.enter(Ns::Term)));
          },
          [&](const S::FunTyp& f) {
            return funTyp(rwShape(*f.bound, rw, d), rwExist(*f.result, rw, d.enter(Ns::Type)));
          },
          [&](const S::FunCap& f) {
            return funCap(rwBound(f.bound, rw, d), rwExist(*f.result, rw, d.enter(Ns::Capt)));
          },
      },
      s.node);
}

Type rwType(const Type& t, const Rewriter& rw, Depths d) {
  return Type{rwShape(*t.shape, rw, d), rw.set(t.captures, d)};
}

ExistType rwExist(const ExistType& e, const Rewriter& rw, Depths d) {
  if (e.existential) return exists(rwType(e.body, rw, d.enter(Ns::Capt)));
  return plain(rwType(e.body, rw, d));
}

Value rwValue(const Value& v, const Rewriter& rw, Depths d) {
  using V = Value;
  return std::visit(
      Overloaded{
          [&](const V::Lam& l) {
            return lam(rwType(l.param, rw, d), rwTerm(*l.body, rw, d.enter(Ns::Term)));
          },
          [&](const V::TLam& l) {
            return tlam(rwShape(*l.bound, rw, d), rwTerm(*l.body, rw, d.enter(Ns::Type)));
          },
          [&](const V::CLam& l) {
            return clam(rwBound(l.bound, rw, d), rwTerm(*l.body, rw, d.enter(Ns::Capt)));
          },
          [&](const V::Pack& p) { return pack(rw.set(p.captures, d), rw.ref(p.ref, d)); },
      },
      v.node);
}

TermPtr rwTerm(const Term& t, const Rewriter& rw, Depths d) {
  using T = Term;
  return std::visit(
      Overloaded{
          [&](const T::Var& v) { return termVar(rw.ref(v.ref, d)); },
          [&](const T::Val& v) { return termVal(rwValue(v.value, rw, d)); },
          [&](const T::App& a) { return termApp(rw.ref(a.fn, d), rw.ref(a.arg, d)); },
          [&](const T::TApp& a) {
            return termTApp(rw.ref(a.fn, d), rwShape(*a.arg, rw, d));
          },
          [&](const T::CApp& a) {
            return termCApp(rw.ref(a.fn, d), rw.set(a.arg, d));
          },
          [&](const T::Let& l) {
            return termLet(rwTerm(*l.bound, rw, d), rwTerm(*l.body, rw, d.enter(Ns::Term)));
          },
          [&](const T::LetEx& l) {
            // capture binder outermost, term binder innermost
            return termLetEx(rwTerm(*l.bound, rw, d),
                             rwTerm(*l.body, rw, d.enter(Ns::Capt).enter(Ns::Term)));
          },
      },
      t.node);
}

uint32_t shiftedIndex(uint32_t idx, int delta, uint32_t floor) {
  if (idx < floor) return idx;
  int64_t moved = static_cast<int64_t>(idx) + delta;
  if (moved < static_cast<int64_t>(floor))
    throw NegativeIndexError("shift drops index " + std::to_string(idx) + " below cutoff");
  return static_cast<uint32_t>(moved);
}

Rewriter shiftRewriter(Ns ns, int delta, uint32_t cutoff) {
  Rewriter rw;
  rw.onSet = [ns, delta, cutoff](const CaptureSet& cs, const Depths& d) {
    CaptureSet out;
    for (const auto& a : cs.atoms()) {
      if (ns == Ns::Term && a.kind == Capture::Kind::TermVar)
        out.insert(Capture::termVar(shiftedIndex(a.index, delta, cutoff + d.term)));
      else if (ns == Ns::Capt && a.kind == Capture::Kind::CaptVar)
        out.insert(Capture::captVar(shiftedIndex(a.index, delta, cutoff + d.capt)));
      else
        out.insert(a);
    }
    return out;
  };
  if (ns == Ns::Type) {
    rw.onTypeVar = [delta, cutoff](uint32_t idx, const Depths& d) {
      return typeVar(shiftedIndex(idx, delta, cutoff + d.type));
    };
  }
  if (ns == Ns::Term) {
    rw.onRef = [delta, cutoff](Ref r, const Depths& d) {
      if (!r.isVar()) return r;
      return Ref::var(shiftedIndex(r.index, delta, cutoff + d.term));
    };
  }
  return rw;
}

// Shift a replacement into the current binder depths before splicing it in.
ShapePtr shiftShapeByDepths(const ShapePtr& s, const Depths& d) {
  ShapePtr out = s;
  if (d.term) out = shift(out, Ns::Term, static_cast<int>(d.term));
  if (d.type) out = shift(out, Ns::Type, static_cast<int>(d.type));
  if (d.capt) out = shift(out, Ns::Capt, static_cast<int>(d.capt));
  return out;
}

CaptureSet shiftSetByDepths(const CaptureSet& cs, const Depths& d) {
  CaptureSet out = cs;
  if (d.term) out = shift(out, Ns::Term, static_cast<int>(d.term));
  if (d.capt) out = shift(out, Ns::Capt, static_cast<int>(d.capt));
  return out;
}

Rewriter substTermRewriter(uint32_t target, Ref repl) {
  Rewriter rw;
  rw.onRef = [target, repl](Ref r, const Depths& d) {
    if (r.isVar() && r.index == target + d.term) {
      if (repl.isVar()) return Ref::var(repl.index + d.term);
      return repl;
    }
    return r;
  };
  rw.onSet = [target, repl](const CaptureSet& cs, const Depths& d) {
    Capture hit = Capture::termVar(target + d.term);
    if (!cs.contains(hit)) return cs;
    CaptureSet out = cs.minus(hit);
    out.insert(repl.isVar() ? Capture::termVar(repl.index + d.term)
                            : Capture::loc(repl.index));
    return out;
  };
  return rw;
}

Rewriter substTypeRewriter(uint32_t target, ShapePtr repl) {
  Rewriter rw;
  rw.onTypeVar = [target, repl](uint32_t idx, const Depths& d) {
    if (idx == target + d.type) return shiftShapeByDepths(repl, d);
    return typeVar(idx);
  };
  return rw;
}

Rewriter substCaptRewriter(uint32_t target, CaptureSet repl) {
  Rewriter rw;
  rw.onSet = [target, repl](const CaptureSet& cs, const Depths& d) {
    Capture hit = Capture::captVar(target + d.capt);
    if (!cs.contains(hit)) return cs;
    return cs.minus(hit).unionWith(shiftSetByDepths(repl, d));
  };
  return rw;
}

struct AtomCollector {
  Ns ns;
  FreeAtoms out;

  void fromSet(const CaptureSet& cs, const Depths& d) {
    for (const auto& a : cs.atoms()) {
      if (a.kind == Capture::Kind::Loc) {
        if (ns == Ns::Term) out.locations.insert(a.index);
      } else if (ns == Ns::Term && a.kind == Capture::Kind::TermVar) {
        if (a.index >= d.term) out.indices.insert(a.index - d.term);
      } else if (ns == Ns::Capt && a.kind == Capture::Kind::CaptVar) {
        if (a.index >= d.capt) out.indices.insert(a.index - d.capt);
      }
    }
  }
};

Rewriter collectRewriter(AtomCollector& col) {
  Rewriter rw;
  rw.onSet = [&col](const CaptureSet& cs, const Depths& d) {
    col.fromSet(cs, d);
    return cs;
  };
  rw.onTypeVar = [&col](uint32_t idx, const Depths& d) {
    if (col.ns == Ns::Type && idx >= d.type) col.out.indices.insert(idx - d.type);
    return typeVar(idx);
  };
  rw.onRef = [&col](Ref r, const Depths& d) {
    if (col.ns == Ns::Term) {
      if (r.isVar()) {
        if (r.index >= d.term) col.out.indices.insert(r.index - d.term);
      } else {
        col.out.locations.insert(r.index);
      }
    }
    return r;
  };
  return rw;
}

}  // namespace

// --------------------------------------------------------------------------
// Constructors and predicates
// --------------------------------------------------------------------------

ShapePtr top() { return std::make_shared<const ShapeType>(ShapeType{ShapeType::Top{}}); }
ShapePtr typeVar(uint32_t index) {
  return std::make_shared<const ShapeType>(ShapeType{ShapeType::TypeVar{index}});
}
ShapePtr funDep(Type param, ExistType result) {
  return std::make_shared<const ShapeType>(ShapeType{
      ShapeType::FunDep{std::move(param), std::make_shared<const ExistType>(std::move(result))}});
}
ShapePtr funTyp(ShapePtr bound, ExistType result) {
  return std::make_shared<const ShapeType>(ShapeType{
      ShapeType::FunTyp{std::move(bound), std::make_shared<const ExistType>(std::move(result))}});
}
ShapePtr funCap(Bound bound, ExistType result) {
  return std::make_shared<const ShapeType>(ShapeType{
      ShapeType::FunCap{std::move(bound), std::make_shared<const ExistType>(std::move(result))}});
}

TermPtr termVar(Ref r) { return std::make_shared<const Term>(Term{Term::Var{r}}); }
TermPtr termVal(Value v) { return std::make_shared<const Term>(Term{Term::Val{std::move(v)}}); }
TermPtr termApp(Ref fn, Ref arg) { return std::make_shared<const Term>(Term{Term::App{fn, arg}}); }
TermPtr termTApp(Ref fn, ShapePtr arg) {
  return std::make_shared<const Term>(Term{Term::TApp{fn, std::move(arg)}});
}
TermPtr termCApp(Ref fn, CaptureSet arg) {
  return std::make_shared<const Term>(Term{Term::CApp{fn, std::move(arg)}});
}
TermPtr termLet(TermPtr bound, TermPtr body) {
  return std::make_shared<const Term>(Term{Term::Let{std::move(bound), std::move(body)}});
}
TermPtr termLetEx(TermPtr bound, TermPtr body) {
  return std::make_shared<const Term>(Term{Term::LetEx{std::move(bound), std::move(body)}});
}

Value lam(Type param, TermPtr body) { return Value{Value::Lam{std::move(param), std::move(body)}}; }
Value tlam(ShapePtr bound, TermPtr body) {
  return Value{Value::TLam{std::move(bound), std::move(body)}};
}
Value clam(Bound bound, TermPtr body) {
  return Value{Value::CLam{std::move(bound), std::move(body)}};
}
Value pack(CaptureSet cs, Ref ref) { return Value{Value::Pack{std::move(cs), ref}}; }

bool isAnswer(const Term& t) {
  return std::holds_alternative<Term::Var>(t.node) || std::holds_alternative<Term::Val>(t.node);
}

std::optional<Answer> asAnswer(const Term& t) {
  if (const auto* v = std::get_if<Term::Var>(&t.node)) return Answer{v->ref};
  if (const auto* v = std::get_if<Term::Val>(&t.node)) return Answer{v->value};
  return std::nullopt;
}

// --------------------------------------------------------------------------
// Equality
// --------------------------------------------------------------------------

bool equal(const Type& a, const Type& b) {
  return a.captures == b.captures && equal(*a.shape, *b.shape);
}

bool equal(const ExistType& a, const ExistType& b) {
  return a.existential == b.existential && equal(a.body, b.body);
}

bool equal(const ShapeType& a, const ShapeType& b) {
  using S = ShapeType;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const S::Top&) { return true; },
          [&](const S::TypeVar& v) { return v.index == std::get<S::TypeVar>(b.node).index; },
          [&](const S::FunDep& f) {
            const auto& g = std::get<S::FunDep>(b.node);
            return equal(f.param, g.param) && equal(*f.result, *g.result);
          },
          [&](const S::FunTyp& f) {
            const auto& g = std::get<S::FunTyp>(b.node);
            return equal(*f.bound, *g.bound) && equal(*f.result, *g.result);
          },
          [&](const S::FunCap& f) {
            const auto& g = std::get<S::FunCap>(b.node);
            return f.bound == g.bound && equal(*f.result, *g.result);
          },
      },
      a.node);
}

bool equal(const Value& a, const Value& b) {
  using V = Value;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const V::Lam& l) {
            const auto& m = std::get<V::Lam>(b.node);
            return equal(l.param, m.param) && equal(*l.body, *m.body);
          },
          [&](const V::TLam& l) {
            const auto& m = std::get<V::TLam>(b.node);
            return equal(*l.bound, *m.bound) && equal(*l.body, *m.body);
          },
          [&](const V::CLam& l) {
            const auto& m = std::get<V::CLam>(b.node);
            return l.bound == m.bound && equal(*l.body, *m.body);
          },
          [&](const V::Pack& p) {
            const auto& q = std::get<V::Pack>(b.node);
            return p.captures == q.captures && p.ref == q.ref;
          },
      },
      a.node);
}

bool equal(const Term& a, const Term& b) {
  using T = Term;
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const T::Var& v) { return v.ref == std::get<T::Var>(b.node).ref; },
          [&](const T::Val& v) { return equal(v.value, std::get<T::Val>(b.node).value); },
          [&](const T::App& x) {
            const auto& y = std::get<T::App>(b.node);
            return x.fn == y.fn && x.arg == y.arg;
          },
          [&](const T::TApp& x) {
            const auto& y = std::get<T::TApp>(b.node);
            return x.fn == y.fn && equal(*x.arg, *y.arg);
          },
          [&](const T::CApp& x) {
            const auto& y = std::get<T::CApp>(b.node);
            return x.fn == y.fn && x.arg == y.arg;
          },
          [&](const T::Let& x) {
            const auto& y = std::get<T::Let>(b.node);
            return equal(*x.bound, *y.bound) && equal(*x.body, *y.body);
          },
          [&](const T::LetEx& x) {
            const auto& y = std::get<T::LetEx>(b.node);
            return equal(*x.bound, *y.bound) && equal(*x.body, *y.body);
          },
      },
      a.node);
}

// --------------------------------------------------------------------------
// Shift
// --------------------------------------------------------------------------

CaptureSet shift(const CaptureSet& cs, Ns ns, int delta, uint32_t cutoff) {
  return shiftRewriter(ns, delta, cutoff).onSet(cs, Depths{});
}
Bound shift(const Bound& b, Ns ns, int delta, uint32_t cutoff) {
  return rwBound(b, shiftRewriter(ns, delta, cutoff), Depths{});
}
ShapePtr shift(const ShapePtr& s, Ns ns, int delta, uint32_t cutoff) {
  return rwShape(*s, shiftRewriter(ns, delta, cutoff), Depths{});
}
Type shift(const Type& t, Ns ns, int delta, uint32_t cutoff) {
  return rwType(t, shiftRewriter(ns, delta, cutoff), Depths{});
}
ExistType shift(const ExistType& e, Ns ns, int delta, uint32_t cutoff) {
  return rwExist(e, shiftRewriter(ns, delta, cutoff), Depths{});
}
TermPtr shift(const TermPtr& t, Ns ns, int delta, uint32_t cutoff) {
  return rwTerm(*t, shiftRewriter(ns, delta, cutoff), Depths{});
}

// --------------------------------------------------------------------------
// Substitution
// --------------------------------------------------------------------------

CaptureSet substTermVar(const CaptureSet& cs, uint32_t target, Ref repl) {
  return substTermRewriter(target, repl).onSet(cs, Depths{});
}
Type substTermVar(const Type& t, uint32_t target, Ref repl) {
  return rwType(t, substTermRewriter(target, repl), Depths{});
}
ExistType substTermVar(const ExistType& e, uint32_t target, Ref repl) {
  return rwExist(e, substTermRewriter(target, repl), Depths{});
}
TermPtr substTermVar(const TermPtr& t, uint32_t target, Ref repl) {
  return rwTerm(*t, substTermRewriter(target, repl), Depths{});
}

ShapePtr substTypeVar(const ShapePtr& s, uint32_t target, const ShapePtr& repl) {
  return rwShape(*s, substTypeRewriter(target, repl), Depths{});
}
Type substTypeVar(const Type& t, uint32_t target, const ShapePtr& repl) {
  return rwType(t, substTypeRewriter(target, repl), Depths{});
}
ExistType substTypeVar(const ExistType& e, uint32_t target, const ShapePtr& repl) {
  return rwExist(e, substTypeRewriter(target, repl), Depths{});
}
TermPtr substTypeVar(const TermPtr& t, uint32_t target, const ShapePtr& repl) {
  return rwTerm(*t, substTypeRewriter(target, repl), Depths{});
}

CaptureSet substCaptVar(const CaptureSet& cs, uint32_t target, const CaptureSet& repl) {
  return substCaptRewriter(target, repl).onSet(cs, Depths{});
}
Type substCaptVar(const Type& t, uint32_t target, const CaptureSet& repl) {
  return rwType(t, substCaptRewriter(target, repl), Depths{});
}
ExistType substCaptVar(const ExistType& e, uint32_t target, const CaptureSet& repl) {
  return rwExist(e, substCaptRewriter(target, repl), Depths{});
}
TermPtr substCaptVar(const TermPtr& t, uint32_t target, const CaptureSet& repl) {
  return rwTerm(*t, substCaptRewriter(target, repl), Depths{});
}

// --------------------------------------------------------------------------
// Binder instantiation
// --------------------------------------------------------------------------

TermPtr openTermVar(const TermPtr& body, Ref repl) {
  Ref up = repl.isVar() ? Ref::var(repl.index + 1) : repl;
  return shift(substTermVar(body, 0, up), Ns::Term, -1);
}
ExistType openTermVar(const ExistType& body, Ref repl) {
  Ref up = repl.isVar() ? Ref::var(repl.index + 1) : repl;
  return shift(substTermVar(body, 0, up), Ns::Term, -1);
}
TermPtr openTypeVar(const TermPtr& body, const ShapePtr& repl) {
  return shift(substTypeVar(body, 0, shift(repl, Ns::Type, 1)), Ns::Type, -1);
}
ExistType openTypeVar(const ExistType& body, const ShapePtr& repl) {
  return shift(substTypeVar(body, 0, shift(repl, Ns::Type, 1)), Ns::Type, -1);
}
TermPtr openCaptVar(const TermPtr& body, const CaptureSet& repl) {
  return shift(substCaptVar(body, 0, shift(repl, Ns::Capt, 1)), Ns::Capt, -1);
}
ExistType openCaptVar(const ExistType& body, const CaptureSet& repl) {
  return shift(substCaptVar(body, 0, shift(repl, Ns::Capt, 1)), Ns::Capt, -1);
}
Type openCaptVar(const Type& body, const CaptureSet& repl) {
  return shift(substCaptVar(body, 0, shift(repl, Ns::Capt, 1)), Ns::Capt, -1);
}

Type rewriteCaptureSets(
    const Type& t,
    const std::function<CaptureSet(const CaptureSet&, uint32_t, uint32_t, uint32_t)>& fn) {
  Rewriter rw;
  rw.onSet = [&fn](const CaptureSet& cs, const Depths& d) { return fn(cs, d.term, d.type, d.capt); };
  return rwType(t, rw, Depths{});
}

// --------------------------------------------------------------------------
// Free atoms
// --------------------------------------------------------------------------

namespace {
template <class Fn>
FreeAtoms collect(Ns ns, Fn&& run) {
  AtomCollector col{ns, {}};
  Rewriter rw = collectRewriter(col);
  run(rw);
  return std::move(col.out);
}
}  // namespace

FreeAtoms freeAtoms(Ns ns, const CaptureSet& cs) {
  return collect(ns, [&](const Rewriter& rw) { rw.onSet(cs, Depths{}); });
}
FreeAtoms freeAtoms(Ns ns, const Type& t) {
  return collect(ns, [&](const Rewriter& rw) { rwType(t, rw, Depths{}); });
}
FreeAtoms freeAtoms(Ns ns, const ExistType& e) {
  return collect(ns, [&](const Rewriter& rw) { rwExist(e, rw, Depths{}); });
}
FreeAtoms freeAtoms(Ns ns, const ShapePtr& s) {
  return collect(ns, [&](const Rewriter& rw) { rwShape(*s, rw, Depths{}); });
}
FreeAtoms freeAtoms(Ns ns, const TermPtr& t) {
  return collect(ns, [&](const Rewriter& rw) { rwTerm(*t, rw, Depths{}); });
}

}  // namespace capless
