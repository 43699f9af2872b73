// Well-typed term generation: programs are let spines whose bounds are
// values, renames, applications of earlier bindings, or packs (which turn
// the link into an existential let), ending in an answer that avoids the
// spine's own binders. Candidates are validated with the checker; a seed
// deterministically fixes the output.

#include <random>

#include "capless/harness.hpp"

namespace capless::harness {

namespace {

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {}

  TermPtr program(uint32_t budget) { return chain(TypeContext{}, budget); }

  Value value(const TypeContext& ctx, uint32_t budget) { return genValue(ctx, budget); }

  uint32_t pick(uint32_t n) { return n == 0 ? 0 : static_cast<uint32_t>(rng_() % n); }
  bool coin(uint32_t percent) { return pick(100) < percent; }

 private:
  std::mt19937_64 rng_;

  CaptureSet randomWfSet(const TypeContext& ctx) {
    CaptureSet cs;
    for (uint32_t i = 0; i < ctx.termCount(); ++i)
      if (coin(20)) cs.insert(Capture::termVar(i));
    for (uint32_t i = 0; i < ctx.captCount(); ++i)
      if (coin(20)) cs.insert(Capture::captVar(i));
    return cs;
  }

  Type genParamType(const TypeContext& ctx) {
    switch (pick(8)) {
      case 0:
      case 1:
      case 2: return pure(top());
      case 3: return typed(top(), randomWfSet(ctx));
      case 4:
        if (ctx.typeCount() > 0) return pure(typeVar(pick(ctx.typeCount())));
        return pure(top());
      case 5: return pure(funDep(pure(top()), plain(pure(top()))));
      case 6: {
        // dependent: forall (x: Top) Top^{x}
        return pure(funDep(pure(top()), plain(typed(top(), {Capture::termVar(0)}))));
      }
      default: return pure(top());
    }
  }

  ShapePtr genBoundShape(const TypeContext& ctx) {
    switch (pick(4)) {
      case 0:
        if (ctx.typeCount() > 0) return typeVar(pick(ctx.typeCount()));
        return top();
      case 1: return funDep(pure(top()), plain(pure(top())));
      default: return top();
    }
  }

  Value genValue(const TypeContext& ctx, uint32_t budget) {
    uint32_t kind = pick(10);
    if (kind < 6 || budget < 2) {
      Type param = genParamType(ctx);
      TermPtr body = chain(ctx.pushTerm(param), budget / 2);
      return lam(std::move(param), std::move(body));
    }
    if (kind < 8) {
      ShapePtr bound = genBoundShape(ctx);
      TermPtr body = chain(ctx.pushType(bound), budget / 2);
      return tlam(std::move(bound), std::move(body));
    }
    Bound bound = coin(50) ? Bound::star() : Bound::set(randomWfSet(ctx));
    TermPtr body = chain(ctx.pushCapt(bound), budget / 2);
    return clam(std::move(bound), std::move(body));
  }

  // Non-existential shape of a term variable after promotion, if any.
  ShapePtr promotedShape(const TypeContext& ctx, uint32_t var) {
    auto t = ctx.lookupTerm(var);
    if (!t) return nullptr;
    ShapePtr s = t->shape;
    uint32_t guard = 0;
    while (const auto* v = std::get_if<ShapeType::TypeVar>(&s->node)) {
      auto b = ctx.lookupTypeBound(v->index);
      if (!b || ++guard > ctx.typeCount() + 1) return nullptr;
      s = *b;
    }
    return s;
  }

  // One right-hand side for a let link. May produce an existential type
  // (from a pack), in which case the caller emits an existential let.
  TermPtr genLinkBound(const TypeContext& ctx, uint32_t budget) {
    for (uint32_t attempt = 0; attempt < 4; ++attempt) {
      uint32_t kind = pick(12);
      if (kind < 4 || ctx.termCount() == 0)
        return termVal(genValue(ctx, budget));
      if (kind < 7) {  // application of an earlier binding
        std::vector<std::pair<uint32_t, uint32_t>> candidates;
        for (uint32_t f = 0; f < ctx.termCount(); ++f) {
          ShapePtr s = promotedShape(ctx, f);
          const auto* fd = s ? std::get_if<ShapeType::FunDep>(&s->node) : nullptr;
          if (!fd) continue;
          for (uint32_t a = 0; a < ctx.termCount(); ++a) {
            if (checkAgainst(ctx, termVar(Ref::var(a)), plain(fd->param)).ok())
              candidates.emplace_back(f, a);
          }
        }
        if (!candidates.empty()) {
          auto [f, a] = candidates[pick(static_cast<uint32_t>(candidates.size()))];
          return termApp(Ref::var(f), Ref::var(a));
        }
        continue;
      }
      if (kind == 7) {  // type application with the declared bound
        for (uint32_t f = 0; f < ctx.termCount(); ++f) {
          ShapePtr s = promotedShape(ctx, f);
          const auto* ft = s ? std::get_if<ShapeType::FunTyp>(&s->node) : nullptr;
          if (ft) return termTApp(Ref::var(f), ft->bound);
        }
        continue;
      }
      if (kind == 8) {  // capture application below the declared bound
        for (uint32_t f = 0; f < ctx.termCount(); ++f) {
          ShapePtr s = promotedShape(ctx, f);
          const auto* fc = s ? std::get_if<ShapeType::FunCap>(&s->node) : nullptr;
          if (!fc) continue;
          CaptureSet arg = fc->bound.isStar ? randomWfSet(ctx) : fc->bound.captures;
          return termCApp(Ref::var(f), arg);
        }
        continue;
      }
      if (kind == 9) {  // rename: let y = x in ...
        return termVar(Ref::var(pick(ctx.termCount())));
      }
      // pack: the caller will unpack it with an existential let
      uint32_t payload = pick(ctx.termCount());
      CaptureSet cs{Capture::termVar(payload)};
      if (coin(30)) cs = cs.unionWith(randomWfSet(ctx));
      return termVal(pack(std::move(cs), Ref::var(payload)));
    }
    return termVal(genValue(ctx, budget));
  }

  // The spine's final answer must avoid the spine's own binders: an outer
  // variable, a value built in the outer context and weakened across the
  // spine, or a pack over a spine variable with a closed shape.
  TermPtr genFinal(const TypeContext& startCtx, const TypeContext& ctx, uint32_t termBinders,
                   uint32_t captBinders, uint32_t budget) {
    uint32_t kind = pick(10);
    if (kind < 3 && startCtx.termCount() > 0) {
      uint32_t outer = pick(startCtx.termCount());
      return termVar(Ref::var(termBinders + outer));
    }
    if (kind == 3 && ctx.termCount() > 0) {
      uint32_t payload = pick(ctx.termCount());
      return termVal(pack(CaptureSet{Capture::termVar(payload)}, Ref::var(payload)));
    }
    TermPtr value = termVal(genValue(startCtx, budget));
    if (termBinders) value = shift(value, Ns::Term, static_cast<int>(termBinders));
    if (captBinders) value = shift(value, Ns::Capt, static_cast<int>(captBinders));
    return value;
  }

  TermPtr chain(const TypeContext& startCtx, uint32_t budget) {
    struct Link {
      bool isLetEx;
      TermPtr bound;
    };
    std::vector<Link> links;
    TypeContext ctx = startCtx;
    uint32_t termBinders = 0, captBinders = 0;
    uint32_t remaining = budget;

    while (remaining > 2 && coin(60)) {
      TermPtr bound = genLinkBound(ctx, remaining / 2);
      auto boundType = typeSynth(ctx, bound);
      if (!boundType.ok()) break;  // give up on linking; validated later anyway
      if (boundType.result->type.existential) {
        links.push_back(Link{true, bound});
        ctx = ctx.pushCapt(Bound::star()).pushTerm(boundType.result->type.body);
        ++termBinders;
        ++captBinders;
      } else {
        links.push_back(Link{false, bound});
        ctx = ctx.pushTerm(boundType.result->type.body);
        ++termBinders;
      }
      remaining = remaining > 3 ? remaining - 3 : 0;
    }

    TermPtr out = genFinal(startCtx, ctx, termBinders, captBinders, remaining);
    for (size_t i = links.size(); i-- > 0;) {
      out = links[i].isLetEx ? termLetEx(links[i].bound, out) : termLet(links[i].bound, out);
    }
    return out;
  }
};

TermPtr identityValue() { return termVal(lam(pure(top()), termVar(Ref::var(0)))); }

}  // namespace

TermPtr genWellTyped(uint64_t seed, uint32_t sizeBudget) {
  for (uint32_t attempt = 0; attempt < 8; ++attempt) {
    Generator gen(seed * 2654435761u + attempt);
    TermPtr candidate = gen.program(sizeBudget);
    if (typeSynth(TypeContext{}, candidate).ok()) return candidate;
  }
  return identityValue();
}

TermPtr genAnswer(uint64_t seed) {
  Generator gen(seed * 1099511628211u + 17);
  uint32_t kind = gen.pick(10);
  if (kind < 2) return termVar(Ref::loc(gen.pick(8)));
  if (kind < 4) return termVar(Ref::var(gen.pick(8)));
  return termVal(gen.value(TypeContext{}, 6));
}

}  // namespace capless::harness
