#include "capless/eval.hpp"

namespace capless {

const char* stuckReasonName(StuckReason r) {
  switch (r) {
    case StuckReason::UnboundLocation: return "UnboundLocation";
    case StuckReason::NotAFunction: return "NotAFunction";
    case StuckReason::PackShapeMismatch: return "PackShapeMismatch";
  }
  return "?";
}

std::optional<Decomposition> decompose(const TermPtr& t) {
  if (isAnswer(*t)) return std::nullopt;
  EvalContext frames;
  TermPtr cur = t;
  for (;;) {
    if (const auto* l = std::get_if<Term::Let>(&cur->node)) {
      if (isAnswer(*l->bound)) return Decomposition{std::move(frames), cur};
      frames.push_back(Frame{Frame::Kind::Let, l->body});
      cur = l->bound;
      continue;
    }
    if (const auto* l = std::get_if<Term::LetEx>(&cur->node)) {
      if (isAnswer(*l->bound)) return Decomposition{std::move(frames), cur};
      frames.push_back(Frame{Frame::Kind::LetEx, l->body});
      cur = l->bound;
      continue;
    }
    // App / TApp / CApp: the focus itself (answers cannot occur here: the
    // loop only descends into non-answer bounds)
    return Decomposition{std::move(frames), cur};
  }
}

TermPtr plug(const EvalContext& frames, TermPtr t) {
  for (size_t i = frames.size(); i-- > 0;) {
    const Frame& f = frames[i];
    t = f.kind == Frame::Kind::Let ? termLet(std::move(t), f.body) : termLetEx(std::move(t), f.body);
  }
  return t;
}

namespace {

// Looks up an application head; a closed runtime term has only locations
// in head position, so a bare variable is stuck.
struct HeadLookup {
  const Value* value = nullptr;
  uint32_t loc = 0;
  std::optional<Stuck> stuck;
};

HeadLookup lookupHead(const Store& store, Ref head) {
  HeadLookup out;
  if (head.isVar()) {
    out.stuck = Stuck{StuckReason::UnboundLocation,
                      "application head is an unresolved variable #" + std::to_string(head.index)};
    return out;
  }
  const Value* v = store.lookup(head.index);
  if (!v) {
    out.stuck = Stuck{StuckReason::UnboundLocation,
                      "location l" + std::to_string(head.index) + " is not in the store"};
    return out;
  }
  out.value = v;
  out.loc = head.index;
  return out;
}

}  // namespace

StepOutcome stepOnce(const Config& c) {
  auto dec = decompose(c.term);
  if (!dec) return AnswerReached{*asAnswer(*c.term)};

  const Term& focus = *dec->redex;

  if (const auto* a = std::get_if<Term::App>(&focus.node)) {
    auto head = lookupHead(c.store, a->fn);
    if (head.stuck) return *head.stuck;
    const auto* fn = std::get_if<Value::Lam>(&head.value->node);
    if (!fn)
      return Stuck{StuckReason::NotAFunction,
                   "term application of a non-term-lambda at l" + std::to_string(head.loc)};
    TermPtr reduced = openTermVar(fn->body, a->arg);
    return Stepped{Config{c.store, plug(dec->frames, reduced)}, "apply", {head.loc}};
  }

  if (const auto* a = std::get_if<Term::TApp>(&focus.node)) {
    auto head = lookupHead(c.store, a->fn);
    if (head.stuck) return *head.stuck;
    const auto* fn = std::get_if<Value::TLam>(&head.value->node);
    if (!fn)
      return Stuck{StuckReason::NotAFunction,
                   "type application of a non-type-lambda at l" + std::to_string(head.loc)};
    TermPtr reduced = openTypeVar(fn->body, a->arg);
    return Stepped{Config{c.store, plug(dec->frames, reduced)}, "tapply", {head.loc}};
  }

  if (const auto* a = std::get_if<Term::CApp>(&focus.node)) {
    auto head = lookupHead(c.store, a->fn);
    if (head.stuck) return *head.stuck;
    const auto* fn = std::get_if<Value::CLam>(&head.value->node);
    if (!fn)
      return Stuck{StuckReason::NotAFunction,
                   "capture application of a non-capture-lambda at l" + std::to_string(head.loc)};
    TermPtr reduced = openCaptVar(fn->body, a->arg);
    return Stepped{Config{c.store, plug(dec->frames, reduced)}, "capply", {head.loc}};
  }

  if (const auto* l = std::get_if<Term::Let>(&focus.node)) {
    const Term& bound = *l->bound;
    if (const auto* v = std::get_if<Term::Var>(&bound.node)) {
      // (rename): let x = y in t  -->  [x := y]t
      TermPtr reduced = openTermVar(l->body, v->ref);
      return Stepped{Config{c.store, plug(dec->frames, reduced)}, "rename", {}};
    }
    // (lift): let x = v in t  -->  extend the store, continue with [x := l]t
    const auto& v = std::get<Term::Val>(bound.node);
    Store store = c.store;
    uint32_t loc = store.alloc(v.value);
    TermPtr reduced = openTermVar(l->body, Ref::loc(loc));
    return Stepped{Config{std::move(store), plug(dec->frames, reduced)}, "lift", {}};
  }

  const auto& l = std::get<Term::LetEx>(focus.node);
  const auto* v = std::get_if<Term::Val>(&l.bound->node);
  const auto* p = v ? std::get_if<Value::Pack>(&v->value.node) : nullptr;
  if (!p)
    return Stuck{StuckReason::PackShapeMismatch,
                 "existential let requires a literal pack answer on the right-hand side"};
  // (rename-e) substitutes [x:=y][c:=C]t; the inner (term) binder opens first.
  TermPtr reduced = openCaptVar(openTermVar(l.body, p->ref), p->captures);
  return Stepped{Config{c.store, plug(dec->frames, reduced)}, "rename-e", {}};
}

RunResult run(Config c, uint32_t fuel) {
  RunResult result;
  for (uint32_t i = 0; i < fuel; ++i) {
    auto dec = decompose(c.term);
    StepOutcome out = stepOnce(c);
    if (const auto* answer = std::get_if<AnswerReached>(&out)) {
      result.status = RunResult::Status::Answer;
      result.answer = answer->answer;
      result.final = std::move(c);
      return result;
    }
    if (const auto* stuck = std::get_if<Stuck>(&out)) {
      result.status = RunResult::Status::Stuck;
      result.stuck = *stuck;
      result.final = std::move(c);
      return result;
    }
    auto& stepped = std::get<Stepped>(out);
    result.steps.push_back(StepRecord{stepped.rule, stepped.lookups, dec->redex});
    c = std::move(stepped.next);
  }
  // one last decomposition: the term may have become an answer exactly at
  // the fuel boundary
  if (isAnswer(*c.term)) {
    result.status = RunResult::Status::Answer;
    result.answer = *asAnswer(*c.term);
  } else {
    result.status = RunResult::Status::FuelExhausted;
  }
  result.final = std::move(c);
  return result;
}

}  // namespace capless
