#include "capless/checker.hpp"

#include <algorithm>

namespace capless {

void RuleCoverage::merge(const RuleCoverage& other) {
  typing.insert(other.typing.begin(), other.typing.end());
  subcapture.insert(other.subcapture.begin(), other.subcapture.end());
  subtype.insert(other.subtype.begin(), other.subtype.end());
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

bool wfCaptureSet(const TypeContext& ctx, const CaptureSet& cs) {
  for (const auto& a : cs.atoms()) {
    switch (a.kind) {
      case Capture::Kind::TermVar:
        if (a.index >= ctx.termCount()) return false;
        break;
      case Capture::Kind::CaptVar:
        if (a.index >= ctx.captCount()) return false;
        break;
      case Capture::Kind::Loc:
        if (!ctx.hasLocation(a.index)) return false;
        break;
    }
  }
  return true;
}

bool wfBound(const TypeContext& ctx, const Bound& b) {
  return b.isStar || wfCaptureSet(ctx, b.captures);
}

bool wfShape(const TypeContext& ctx, const ShapePtr& s) {
  using S = ShapeType;
  return std::visit(
      Overloaded{
          [&](const S::Top&) { return true; },
          [&](const S::TypeVar& v) { return v.index < ctx.typeCount(); },
          [&](const S::FunDep& f) {
            return wfType(ctx, f.param) && wfExist(ctx.pushTerm(f.param), *f.result);
          },
          [&](const S::FunTyp& f) {
            return wfShape(ctx, f.bound) && wfExist(ctx.pushType(f.bound), *f.result);
          },
          [&](const S::FunCap& f) {
            return wfBound(ctx, f.bound) && wfExist(ctx.pushCapt(f.bound), *f.result);
          },
      },
      s->node);
}

bool wfType(const TypeContext& ctx, const Type& t) {
  return wfShape(ctx, t.shape) && wfCaptureSet(ctx, t.captures);
}

bool wfExist(const TypeContext& ctx, const ExistType& e) {
  if (e.existential) return wfType(ctx.pushCapt(Bound::star()), e.body);
  return wfType(ctx, e.body);
}

bool wfContext(const TypeContext& ctx) {
  TypeContext prefix;
  for (const auto& b : ctx.bindings()) {
    bool ok = std::visit(Overloaded{
                             [&](const TermBind& t) { return wfType(prefix, t.type); },
                             [&](const TypeBind& t) { return wfShape(prefix, t.bound); },
                             [&](const CaptBind& c) { return wfBound(prefix, c.bound); },
                         },
                         b);
    if (!ok) return false;
    std::visit(Overloaded{
                   [&](const TermBind& t) { prefix = prefix.pushTerm(t.type); },
                   [&](const TypeBind& t) { prefix = prefix.pushType(t.bound); },
                   [&](const CaptBind& c) { prefix = prefix.pushCapt(c.bound); },
               },
               b);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Subcapturing
// ---------------------------------------------------------------------------

namespace {

// Bound set of an atom under the sc-var / sc-bound reading: the capture set
// of a term variable's or location's annotation, or a capture variable's
// declared set bound. Star-bounded capture variables have none.
std::optional<CaptureSet> atomBound(const TypeContext& ctx, const Capture& a) {
  switch (a.kind) {
    case Capture::Kind::TermVar: {
      auto t = ctx.lookupTerm(a.index);
      if (!t) return std::nullopt;
      return t->captures;
    }
    case Capture::Kind::CaptVar: {
      auto b = ctx.lookupCaptBound(a.index);
      if (!b || b->isStar) return std::nullopt;
      return b->captures;
    }
    case Capture::Kind::Loc: {
      auto t = ctx.lookupLocation(a.index);
      if (!t) return std::nullopt;
      return t->captures;
    }
  }
  return std::nullopt;
}

// All atoms that could possibly enter the closure.
std::vector<Capture> contextAtoms(const TypeContext& ctx) {
  std::vector<Capture> out;
  for (uint32_t i = 0; i < ctx.termCount(); ++i) out.push_back(Capture::termVar(i));
  for (uint32_t i = 0; i < ctx.captCount(); ++i) out.push_back(Capture::captVar(i));
  for (const auto& [loc, _] : ctx.locations()) out.push_back(Capture::loc(loc));
  return out;
}

}  // namespace

bool subcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2) {
  if (c1.subsetOf(c2)) return true;
  CaptureSet closure = c2;
  const auto candidates = contextAtoms(ctx);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& a : candidates) {
      if (closure.contains(a)) continue;
      auto bound = atomBound(ctx, a);
      if (bound && bound->subsetOf(closure)) {
        closure.insert(a);
        grew = true;
      }
    }
  }
  return c1.subsetOf(closure);
}

bool subBound(const TypeContext& ctx, const Bound& b1, const Bound& b2) {
  if (b2.isStar) return true;
  if (b1.isStar) return false;
  return subcapture(ctx, b1.captures, b2.captures);
}

namespace {

// Reconstructs the declarative rules behind an accepted atom: membership is
// sc-elem, otherwise the atom's bound is chased (sc-var / sc-bound), chained
// with sc-trans when the bound is not literally the target.
void labelAtom(const TypeContext& ctx, const Capture& a, const CaptureSet& target,
               RuleCoverage& cov, std::set<std::pair<int, uint32_t>>& visiting) {
  if (target.contains(a)) {
    cov.subcapture.insert("sc-elem");
    return;
  }
  auto key = std::make_pair(static_cast<int>(a.kind), a.index);
  if (visiting.count(key)) return;
  visiting.insert(key);
  auto bound = atomBound(ctx, a);
  if (!bound) return;  // cannot happen on accepted checks
  cov.subcapture.insert(a.kind == Capture::Kind::CaptVar ? "sc-bound" : "sc-var");
  if (*bound == target) return;
  cov.subcapture.insert("sc-trans");
  if (bound->size() != 1 && !bound->subsetOf(target)) cov.subcapture.insert("sc-set");
  if (bound->subsetOf(target) && !bound->empty()) cov.subcapture.insert("sc-elem");
  for (const auto& b : bound->atoms()) labelAtom(ctx, b, target, cov, visiting);
  if (bound->empty()) cov.subcapture.insert("sc-elem");
}

}  // namespace

void labelSubcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2,
                     RuleCoverage& cov) {
  if (c1.subsetOf(c2)) {
    cov.subcapture.insert("sc-elem");
    return;
  }
  if (c1.size() != 1) cov.subcapture.insert("sc-set");
  std::set<std::pair<int, uint32_t>> visiting;
  for (const auto& a : c1.atoms()) labelAtom(ctx, a, c2, cov, visiting);
}

// ---------------------------------------------------------------------------
// Subtyping
// ---------------------------------------------------------------------------

bool subType(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2) {
  using S = ShapeType;
  if (equal(*s1, *s2)) return true;
  if (std::holds_alternative<S::Top>(s2->node)) return true;
  if (const auto* v = std::get_if<S::TypeVar>(&s1->node)) {
    auto bound = ctx.lookupTypeBound(v->index);
    if (!bound) return false;
    return subType(ctx, *bound, s2);
  }
  if (const auto* f1 = std::get_if<S::FunDep>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunDep>(&s2->node);
    if (!f2) return false;
    return subType(ctx, f2->param, f1->param) &&
           subType(ctx.pushTerm(f2->param), *f1->result, *f2->result);
  }
  if (const auto* f1 = std::get_if<S::FunTyp>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunTyp>(&s2->node);
    if (!f2) return false;
    return subType(ctx, f2->bound, f1->bound) &&
           subType(ctx.pushType(f2->bound), *f1->result, *f2->result);
  }
  if (const auto* f1 = std::get_if<S::FunCap>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunCap>(&s2->node);
    if (!f2) return false;
    return subBound(ctx, f2->bound, f1->bound) &&
           subType(ctx.pushCapt(f2->bound), *f1->result, *f2->result);
  }
  return false;
}

bool subType(const TypeContext& ctx, const Type& t1, const Type& t2) {
  if (equal(t1, t2)) return true;
  return subType(ctx, t1.shape, t2.shape) && subcapture(ctx, t1.captures, t2.captures);
}

bool subType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2) {
  if (equal(e1, e2)) return true;
  if (e1.existential != e2.existential) return false;
  if (e1.existential) return subType(ctx.pushCapt(Bound::star()), e1.body, e2.body);
  return subType(ctx, e1.body, e2.body);
}

namespace {

void labelShape(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2, RuleCoverage& cov);
void labelTypePair(const TypeContext& ctx, const Type& t1, const Type& t2, RuleCoverage& cov);
void labelExistPair(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                    RuleCoverage& cov);

void labelShape(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2, RuleCoverage& cov) {
  using S = ShapeType;
  if (equal(*s1, *s2)) {
    cov.subtype.insert("refl");
    return;
  }
  if (std::holds_alternative<S::Top>(s2->node)) {
    cov.subtype.insert("top");
    return;
  }
  if (const auto* v = std::get_if<S::TypeVar>(&s1->node)) {
    cov.subtype.insert("tvar");
    auto bound = ctx.lookupTypeBound(v->index);
    if (!bound) return;
    if (equal(**bound, *s2)) return;  // the tvar axiom alone concludes it
    cov.subtype.insert("trans");
    labelShape(ctx, *bound, s2, cov);
    return;
  }
  if (const auto* f1 = std::get_if<S::FunDep>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunDep>(&s2->node);
    if (!f2) return;
    cov.subtype.insert("fun");
    labelTypePair(ctx, f2->param, f1->param, cov);
    labelExistPair(ctx.pushTerm(f2->param), *f1->result, *f2->result, cov);
    return;
  }
  if (const auto* f1 = std::get_if<S::FunTyp>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunTyp>(&s2->node);
    if (!f2) return;
    cov.subtype.insert("tfun");
    labelShape(ctx, f2->bound, f1->bound, cov);
    labelExistPair(ctx.pushType(f2->bound), *f1->result, *f2->result, cov);
    return;
  }
  if (const auto* f1 = std::get_if<S::FunCap>(&s1->node)) {
    const auto* f2 = std::get_if<S::FunCap>(&s2->node);
    if (!f2) return;
    cov.subtype.insert("cfun");
    if (!f2->bound.isStar && !f1->bound.isStar)
      labelSubcapture(ctx, f2->bound.captures, f1->bound.captures, cov);
    labelExistPair(ctx.pushCapt(f2->bound), *f1->result, *f2->result, cov);
    return;
  }
}

void labelTypePair(const TypeContext& ctx, const Type& t1, const Type& t2, RuleCoverage& cov) {
  if (equal(t1, t2)) {
    cov.subtype.insert("refl");
    return;
  }
  cov.subtype.insert("capt");
  labelShape(ctx, t1.shape, t2.shape, cov);
  labelSubcapture(ctx, t1.captures, t2.captures, cov);
}

void labelExistPair(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                    RuleCoverage& cov) {
  if (equal(e1, e2)) {
    cov.subtype.insert("refl");
    return;
  }
  if (e1.existential != e2.existential) return;
  if (e1.existential) {
    cov.subtype.insert("exist");
    labelTypePair(ctx.pushCapt(Bound::star()), e1.body, e2.body, cov);
    return;
  }
  labelTypePair(ctx, e1.body, e2.body, cov);
}

}  // namespace

void labelSubType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                  RuleCoverage& cov) {
  labelExistPair(ctx, e1, e2, cov);
}

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

namespace {

struct Synth {
  CaptureSet useSet;
  ExistType type;
  TraceNode trace;
};

class Synthesizer {
 public:
  explicit Synthesizer(const CheckOptions& opts) : opts_(opts) {}

  std::optional<Synth> synth(const TypeContext& ctx, const Term& t);
  std::optional<Synth> check(const TypeContext& ctx, const Term& t, const ExistType& expected);

  std::vector<Diagnostic> diags;
  RuleCoverage coverage;

 private:
  const CheckOptions& opts_;

  void fail(DiagCode code, std::string message, const Term* at) {
    Span span;
    if (at && opts_.spans) {
      auto it = opts_.spans->find(at);
      if (it != opts_.spans->end()) span = it->second;
    }
    diags.push_back(Diagnostic::error(code, std::move(message), span));
  }

  TraceNode node(const TypeContext& ctx, std::string rule, const Synth* of) {
    TraceNode n;
    n.rule = std::move(rule);
    n.termDepth = ctx.termCount();
    n.typeDepth = ctx.typeCount();
    n.captDepth = ctx.captCount();
    if (of) {
      n.useSet = of->useSet;
      n.type = of->type;
    }
    return n;
  }

  Synth finish(const TypeContext& ctx, const char* rule, CaptureSet useSet, ExistType type,
               std::vector<TraceNode> children = {}) {
    coverage.typing.insert(rule);
    Synth s{std::move(useSet), std::move(type), {}};
    if (opts_.collectTrace) {
      s.trace = node(ctx, rule, &s);
      s.trace.children = std::move(children);
    }
    return s;
  }

  std::vector<TraceNode> kids(std::initializer_list<const Synth*> parts) {
    std::vector<TraceNode> out;
    if (!opts_.collectTrace) return out;
    for (const auto* p : parts)
      if (p) out.push_back(p->trace);
    return out;
  }

  // Resolves a reference to its declared type; reports when unbound.
  std::optional<Type> lookupRefType(const TypeContext& ctx, Ref r, const Term* at) {
    auto t = ctx.lookupRef(r);
    if (!t) {
      fail(DiagCode::UnboundVariable,
           r.isVar() ? "unbound term variable #" + std::to_string(r.index)
                     : "unknown store location l" + std::to_string(r.index),
           at);
    }
    return t;
  }

  // Chases type-variable bounds until a non-variable shape is reached.
  // A successful promotion corresponds to (sub) with (tvar) steps.
  std::optional<ShapePtr> promote(const TypeContext& ctx, ShapePtr shape, const Term* at) {
    uint32_t steps = 0;
    while (const auto* v = std::get_if<ShapeType::TypeVar>(&shape->node)) {
      auto bound = ctx.lookupTypeBound(v->index);
      if (!bound) {
        fail(DiagCode::UnboundVariable, "unbound type variable #" + std::to_string(v->index), at);
        return std::nullopt;
      }
      shape = *bound;
      ++steps;
      if (steps > ctx.typeCount() + 1) break;  // cycle guard; wf contexts cannot loop
    }
    if (steps > 0) {
      coverage.typing.insert("sub");
      coverage.subtype.insert("tvar");
      if (steps > 1) coverage.subtype.insert("trans");
    }
    return shape;
  }

  std::optional<Synth> synthValue(const TypeContext& ctx, const Value& v, const Term* at);
  std::optional<Synth> synthLet(const TypeContext& ctx, const Term::Let& l);
  std::optional<Synth> synthLetEx(const TypeContext& ctx, const Term::LetEx& l);
};

// Pops one term binder off a use-set: the binder's own atom is replaced by
// `replacement` (the bound term's use-set), everything else shifts down.
std::optional<CaptureSet> popTermBinder(const CaptureSet& useSet, const CaptureSet& replacement) {
  CaptureSet out = replacement;
  for (const auto& a : useSet.atoms()) {
    if (a.kind == Capture::Kind::TermVar) {
      if (a.index == 0) continue;  // replaced
      out.insert(Capture::termVar(a.index - 1));
    } else {
      out.insert(a);
    }
  }
  return out;
}

// Pops the capture binder of a let-e / cabs use-set; fails if the binder's
// own variable is still used.
std::optional<CaptureSet> popCaptBinder(const CaptureSet& useSet) {
  CaptureSet out;
  for (const auto& a : useSet.atoms()) {
    if (a.kind == Capture::Kind::CaptVar) {
      if (a.index == 0) return std::nullopt;
      out.insert(Capture::captVar(a.index - 1));
    } else {
      out.insert(a);
    }
  }
  return out;
}

// The antiderivative used to type a pack <C, x> whose payload has type U:
// every capture set D with C a subset of D is rewritten to (D \ C) u {c},
// which restores exactly U when the existential is instantiated with C.
ExistType abstractPackType(const Type& u, const CaptureSet& cs) {
  Type lifted = shift(u, Ns::Capt, 1);
  if (cs.empty()) return exists(lifted);
  Type rewritten = rewriteCaptureSets(
      lifted, [&cs](const CaptureSet& d, uint32_t termDepth, uint32_t, uint32_t captDepth) {
        CaptureSet pattern = shift(shift(cs, Ns::Capt, 1 + captDepth), Ns::Term, termDepth);
        if (!pattern.subsetOf(d)) return d;
        CaptureSet out;
        for (const auto& a : d.atoms())
          if (!pattern.contains(a)) out.insert(a);
        out.insert(Capture::captVar(captDepth));
        return out;
      });
  return exists(rewritten);
}

std::optional<Synth> Synthesizer::synthValue(const TypeContext& ctx, const Value& v,
                                             const Term* at) {
  using V = Value;
  if (const auto* l = std::get_if<V::Lam>(&v.node)) {
    if (!wfType(ctx, l->param)) {
      fail(DiagCode::IllFormedType, "parameter type is not well-formed in this context", at);
      return std::nullopt;
    }
    auto body = synth(ctx.pushTerm(l->param), *l->body);
    if (!body) return std::nullopt;
    // conclusion captures (C \ x), re-indexed outside the binder
    CaptureSet captured = shift(body->useSet.minus(Capture::termVar(0)), Ns::Term, -1);
    Type ty = typed(funDep(l->param, body->type), std::move(captured));
    return finish(ctx, "abs", {}, plain(std::move(ty)), kids({&*body}));
  }
  if (const auto* l = std::get_if<V::TLam>(&v.node)) {
    if (!wfShape(ctx, l->bound)) {
      fail(DiagCode::IllFormedType, "type-variable bound is not well-formed", at);
      return std::nullopt;
    }
    auto body = synth(ctx.pushType(l->bound), *l->body);
    if (!body) return std::nullopt;
    // a type binder binds no capture atoms, so the body's use-set already
    // lives in the outer context
    Type ty = typed(funTyp(l->bound, body->type), body->useSet);
    return finish(ctx, "tabs", {}, plain(std::move(ty)), kids({&*body}));
  }
  if (const auto* l = std::get_if<V::CLam>(&v.node)) {
    if (!wfBound(ctx, l->bound)) {
      fail(DiagCode::IllFormedCaptureSet, "capture bound is not well-formed", at);
      return std::nullopt;
    }
    auto body = synth(ctx.pushCapt(l->bound), *l->body);
    if (!body) return std::nullopt;
    auto captured = popCaptBinder(body->useSet);
    if (!captured) {
      fail(DiagCode::AvoidanceFailure,
           "capture lambda's use-set mentions its own capture parameter", at);
      return std::nullopt;
    }
    Type ty = typed(funCap(l->bound, body->type), std::move(*captured));
    return finish(ctx, "cabs", {}, plain(std::move(ty)), kids({&*body}));
  }
  const auto& p = std::get<V::Pack>(v.node);
  if (!wfCaptureSet(ctx, p.captures)) {
    fail(DiagCode::IllFormedCaptureSet, "pack capture set is not well-formed", at);
    return std::nullopt;
  }
  auto u = lookupRefType(ctx, p.ref, at);
  if (!u) return std::nullopt;
  Type payload = typed(u->shape, {p.ref.asCapture()});
  return finish(ctx, "pack", {}, abstractPackType(payload, p.captures));
}

std::optional<Synth> Synthesizer::synthLet(const TypeContext& ctx, const Term::Let& l) {
  auto bound = synth(ctx, *l.bound);
  if (!bound) return std::nullopt;
  if (bound->type.existential) {
    fail(DiagCode::ExistentialEscape,
         "let binds an existential; use `let <c, x> = ... in ...` to unpack it", l.bound.get());
    return std::nullopt;
  }
  auto body = synth(ctx.pushTerm(bound->type.body), *l.body);
  if (!body) return std::nullopt;
  if (freeAtoms(Ns::Term, body->type).containsIndex(0)) {
    fail(DiagCode::AvoidanceFailure,
         "type of the let body mentions the bound variable after it goes out of scope",
         l.body.get());
    return std::nullopt;
  }
  ExistType resultType = shift(body->type, Ns::Term, -1);
  auto useSet = popTermBinder(body->useSet, bound->useSet);
  return finish(ctx, "let", bound->useSet.unionWith(*useSet), std::move(resultType),
                kids({&*bound, &*body}));
}

std::optional<Synth> Synthesizer::synthLetEx(const TypeContext& ctx, const Term::LetEx& l) {
  auto bound = synth(ctx, *l.bound);
  if (!bound) return std::nullopt;
  if (!bound->type.existential) {
    fail(DiagCode::ExpectedExistential,
         "existential let requires the bound term to have an existential type", l.bound.get());
    return std::nullopt;
  }
  // the body of E = exists c. T is already expressed under the capture binder
  TypeContext inner = ctx.pushCapt(Bound::star()).pushTerm(bound->type.body);
  auto body = synth(inner, *l.body);
  if (!body) return std::nullopt;
  auto ftype = body->type;
  if (freeAtoms(Ns::Term, ftype).containsIndex(0) || freeAtoms(Ns::Capt, ftype).containsIndex(0)) {
    fail(DiagCode::AvoidanceFailure,
         "type of the existential-let body mentions one of the unpacked binders", l.body.get());
    return std::nullopt;
  }
  auto noTerm = popTermBinder(body->useSet, {});
  auto popped = popCaptBinder(*noTerm);
  if (!popped) {
    fail(DiagCode::AvoidanceFailure,
         "use-set of the existential-let body mentions the unpacked capture variable",
         l.body.get());
    return std::nullopt;
  }
  ExistType resultType = shift(shift(body->type, Ns::Term, -1), Ns::Capt, -1);
  return finish(ctx, "let-e", bound->useSet.unionWith(*popped), std::move(resultType),
                kids({&*bound, &*body}));
}

std::optional<Synth> Synthesizer::synth(const TypeContext& ctx, const Term& t) {
  using T = Term;
  if (const auto* v = std::get_if<T::Var>(&t.node)) {
    auto ty = lookupRefType(ctx, v->ref, &t);
    if (!ty) return std::nullopt;
    Capture self = v->ref.asCapture();
    return finish(ctx, "var", {self}, plain(typed(ty->shape, {self})));
  }
  if (const auto* v = std::get_if<T::Val>(&t.node)) return synthValue(ctx, v->value, &t);
  if (const auto* a = std::get_if<T::App>(&t.node)) {
    auto fnType = lookupRefType(ctx, a->fn, &t);
    if (!fnType) return std::nullopt;
    auto shape = promote(ctx, fnType->shape, &t);
    if (!shape) return std::nullopt;
    const auto* fd = std::get_if<ShapeType::FunDep>(&(*shape)->node);
    if (!fd) {
      fail(DiagCode::NotAFunction, "application head is not a term function", &t);
      return std::nullopt;
    }
    auto argTerm = termVar(a->arg);
    auto arg = check(ctx, *argTerm, plain(fd->param));
    if (!arg) {
      fail(DiagCode::ArgumentTypeMismatch, "argument does not match the parameter type", &t);
      return std::nullopt;
    }
    ExistType result = openTermVar(*fd->result, a->arg);
    return finish(ctx, "app", {a->fn.asCapture(), a->arg.asCapture()}, std::move(result),
                  kids({&*arg}));
  }
  if (const auto* a = std::get_if<T::TApp>(&t.node)) {
    if (!wfShape(ctx, a->arg)) {
      fail(DiagCode::IllFormedType, "type argument is not well-formed", &t);
      return std::nullopt;
    }
    auto fnType = lookupRefType(ctx, a->fn, &t);
    if (!fnType) return std::nullopt;
    auto shape = promote(ctx, fnType->shape, &t);
    if (!shape) return std::nullopt;
    const auto* ft = std::get_if<ShapeType::FunTyp>(&(*shape)->node);
    if (!ft) {
      fail(DiagCode::NotAFunction, "type-application head is not a type function", &t);
      return std::nullopt;
    }
    if (!subType(ctx, a->arg, ft->bound)) {
      fail(DiagCode::BoundNotSatisfied, "type argument is not below the declared bound", &t);
      return std::nullopt;
    }
    coverage.typing.insert("sub");
    labelShape(ctx, a->arg, ft->bound, coverage);
    ExistType result = openTypeVar(*ft->result, a->arg);
    return finish(ctx, "tapp", {a->fn.asCapture()}, std::move(result));
  }
  if (const auto* a = std::get_if<T::CApp>(&t.node)) {
    if (!wfCaptureSet(ctx, a->arg)) {
      fail(DiagCode::IllFormedCaptureSet, "capture argument is not well-formed", &t);
      return std::nullopt;
    }
    auto fnType = lookupRefType(ctx, a->fn, &t);
    if (!fnType) return std::nullopt;
    auto shape = promote(ctx, fnType->shape, &t);
    if (!shape) return std::nullopt;
    const auto* fc = std::get_if<ShapeType::FunCap>(&(*shape)->node);
    if (!fc) {
      fail(DiagCode::NotAFunction, "capture-application head is not a capture function", &t);
      return std::nullopt;
    }
    if (!subBound(ctx, Bound::set(a->arg), fc->bound)) {
      fail(DiagCode::BoundNotSatisfied, "capture argument is not below the declared bound", &t);
      return std::nullopt;
    }
    if (!fc->bound.isStar) {
      coverage.typing.insert("sub");
      labelSubcapture(ctx, a->arg, fc->bound.captures, coverage);
    }
    ExistType result = openCaptVar(*fc->result, a->arg);
    return finish(ctx, "capp", {a->fn.asCapture()}, std::move(result));
  }
  if (const auto* l = std::get_if<T::Let>(&t.node)) return synthLet(ctx, *l);
  const auto& l = std::get<T::LetEx>(t.node);
  return synthLetEx(ctx, l);
}

std::optional<Synth> Synthesizer::check(const TypeContext& ctx, const Term& t,
                                        const ExistType& expected) {
  // rule (pack): <C, x> checks against exists c. T when x checks against
  // [c := C]T; the pack's own use-set is empty.
  if (expected.existential) {
    if (const auto* v = std::get_if<Term::Val>(&t.node)) {
      if (const auto* p = std::get_if<Value::Pack>(&v->value.node)) {
        if (!wfCaptureSet(ctx, p->captures)) {
          fail(DiagCode::IllFormedCaptureSet, "pack capture set is not well-formed", &t);
          return std::nullopt;
        }
        Type instantiated = openCaptVar(expected.body, p->captures);
        auto payloadTerm = termVar(p->ref);
        auto payload = check(ctx, *payloadTerm, plain(instantiated));
        if (!payload) return std::nullopt;
        return finish(ctx, "pack", {}, expected, kids({&*payload}));
      }
    }
  }
  auto s = synth(ctx, t);
  if (!s) return std::nullopt;
  if (equal(s->type, expected)) return s;
  if (!subType(ctx, s->type, expected)) {
    fail(DiagCode::SubtypeFailure, "synthesized type is not a subtype of the expected type", &t);
    return std::nullopt;
  }
  labelSubType(ctx, s->type, expected, coverage);
  Synth out{s->useSet, expected, {}};
  if (opts_.collectTrace) {
    out.trace = node(ctx, "sub", &out);
    out.trace.children.push_back(s->trace);
  }
  coverage.typing.insert("sub");
  return out;
}

CheckOutcome runSynth(const TypeContext& ctx, const TermPtr& t, const CheckOptions& opts,
                      const ExistType* expected) {
  Synthesizer syn(opts);
  auto s = expected ? syn.check(ctx, *t, *expected) : syn.synth(ctx, *t);
  CheckOutcome out;
  out.diagnostics = std::move(syn.diags);
  out.coverage = std::move(syn.coverage);
  if (s) out.result = TypingResult{std::move(s->useSet), std::move(s->type), std::move(s->trace)};
  return out;
}

}  // namespace

CheckOutcome typeSynth(const TypeContext& ctx, const TermPtr& t, const CheckOptions& opts) {
  return runSynth(ctx, t, opts, nullptr);
}

CheckOutcome checkAgainst(const TypeContext& ctx, const TermPtr& t, const ExistType& expected,
                          const CheckOptions& opts) {
  return runSynth(ctx, t, opts, &expected);
}

}  // namespace capless
