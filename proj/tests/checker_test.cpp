#include "capless/checker.hpp"

#include "capless/surface.hpp"
#include "doctest.h"

using namespace capless;

namespace {

Type topPure() { return pure(top()); }
Type topWith(std::initializer_list<Capture> atoms) { return typed(top(), CaptureSet(atoms)); }

// forall (x: Top) Top
ShapePtr topFn() { return funDep(topPure(), plain(topPure())); }

TermPtr parse(const std::string& text) {
  auto loaded = surface::load(text);
  REQUIRE_MESSAGE(loaded.ok(), "program must parse: " << text);
  return loaded.term;
}

bool hasCode(const CheckOutcome& outcome, DiagCode code) {
  for (const auto& d : outcome.diagnostics)
    if (d.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("well-formedness is scoping with kind agreement") {
  TypeContext empty;
  CHECK(wfCaptureSet(empty, {}));
  CHECK(!wfCaptureSet(empty, CaptureSet{Capture::captVar(0)}));
  CHECK(!wfCaptureSet(empty, CaptureSet{Capture::loc(0)}));

  TypeContext withX = empty.pushTerm(topPure());
  CHECK(wfCaptureSet(withX, CaptureSet{Capture::termVar(0)}));

  CHECK(wfType(empty, topPure()));
  // the result type of a function may mention its parameter
  CHECK(wfShape(empty, funDep(topPure(), plain(topWith({Capture::termVar(0)})))));
  CHECK(!wfType(empty, pure(typeVar(0))));
  CHECK(wfExist(empty, exists(topWith({Capture::captVar(0)}))));

  CHECK(wfContext(withX.pushCapt(Bound::set(CaptureSet{Capture::termVar(0)}))));
  TypeContext bad = empty.pushCapt(Bound::set(CaptureSet{Capture::captVar(0)}));
  CHECK(!wfContext(bad));  // a bound cannot mention its own binder
}

TEST_CASE("context lookups shift annotations into the full context") {
  // x: Top, y: Top^{x} — looking up y must renumber x past y's own binder
  TypeContext ctx = TypeContext{}.pushTerm(topPure()).pushTerm(topWith({Capture::termVar(0)}));
  auto y = ctx.lookupTerm(0);
  REQUIRE(y.has_value());
  CHECK(y->captures == CaptureSet{Capture::termVar(1)});
  auto x = ctx.lookupTerm(1);
  REQUIRE(x.has_value());
  CHECK(x->captures.empty());
  CHECK(!ctx.lookupTerm(2).has_value());
}

TEST_CASE("subcapture: element, variable and bound chasing") {
  TypeContext empty;
  CHECK(subcapture(empty, {}, {}));

  // sc-var: {x} <: C when x: S^C
  TypeContext ctx = TypeContext{}
                        .pushCapt(Bound::star())
                        .pushTerm(typed(top(), CaptureSet{Capture::captVar(0)}));
  CHECK(subcapture(ctx, CaptureSet{Capture::termVar(0)}, CaptureSet{Capture::captVar(0)}));

  // chained bounds: c2 <: {}, c1 <: {c2} gives {c1} <: {}
  TypeContext chain =
      TypeContext{}.pushCapt(Bound::set({})).pushCapt(Bound::set(CaptureSet{Capture::captVar(0)}));
  CHECK(subcapture(chain, CaptureSet{Capture::captVar(0)}, CaptureSet{}));

  // star-bounded variables only subcapture sets containing them
  TypeContext starred = TypeContext{}.pushCapt(Bound::star());
  CHECK(!subcapture(starred, CaptureSet{Capture::captVar(0)}, CaptureSet{}));
  CHECK(subcapture(starred, CaptureSet{Capture::captVar(0)}, CaptureSet{Capture::captVar(0)}));
}

TEST_CASE("subcapture is reflexive and transitive, and splits unions") {
  TypeContext ctx = TypeContext{}
                        .pushTerm(topPure())
                        .pushCapt(Bound::set(CaptureSet{Capture::termVar(0)}))
                        .pushTerm(typed(top(), CaptureSet{Capture::captVar(0)}));
  std::vector<CaptureSet> sets = {
      {},
      CaptureSet{Capture::termVar(0)},
      CaptureSet{Capture::captVar(0)},
      CaptureSet{Capture::termVar(1)},
      CaptureSet{Capture::termVar(0), Capture::captVar(0)},
      CaptureSet{Capture::termVar(0), Capture::termVar(1)},
  };
  for (const auto& c : sets) CHECK(subcapture(ctx, c, c));
  for (const auto& a : sets)
    for (const auto& b : sets)
      for (const auto& c : sets)
        if (subcapture(ctx, a, b) && subcapture(ctx, b, c)) CHECK(subcapture(ctx, a, c));
  // (sc-set) as an algebraic law
  for (const auto& a : sets)
    for (const auto& b : sets)
      for (const auto& c : sets)
        CHECK(subcapture(ctx, a.unionWith(b), c) ==
              (subcapture(ctx, a, c) && subcapture(ctx, b, c)));
}

TEST_CASE("subBound: star is strictly top") {
  TypeContext empty;
  CHECK(subBound(empty, Bound::set({}), Bound::star()));
  CHECK(!subBound(empty, Bound::star(), Bound::set({})));
  TypeContext ctx = TypeContext{}.pushTerm(topPure());
  CaptureSet x{Capture::termVar(0)};
  TypeContext cc = ctx.pushCapt(Bound::set(x));
  CHECK(subBound(cc, Bound::set(CaptureSet{Capture::captVar(0)}), Bound::set(x)));
}

TEST_CASE("subType: reflexivity, top, and type-variable promotion") {
  TypeContext empty;
  ShapePtr idShape = funDep(topPure(), plain(topPure()));
  CHECK(subType(empty, idShape, idShape));
  CHECK(subType(empty, idShape, top()));
  CHECK(!subType(empty, top(), idShape));

  TypeContext withX = TypeContext{}.pushType(top());
  CHECK(subType(withX, typeVar(0), top()));

  // chain: Y <: X <: forall (x: Top) Top
  TypeContext chain = TypeContext{}.pushType(topFn()).pushType(typeVar(0));
  CHECK(subType(chain, typeVar(0), shift(topFn(), Ns::Type, 2)));
  CHECK(subType(chain, typeVar(0), top()));
}

TEST_CASE("subType: function forms are contravariant in annotations") {
  TypeContext empty;
  ShapePtr precise = funDep(topPure(), plain(topWith({Capture::termVar(0)})));
  ShapePtr sloppy = funDep(topPure(), plain(topPure()));
  // result Top^{x} <: Top under (x: Top^{}) via the empty annotation bound,
  // and Top <: Top^{x} via the empty subset: both directions hold here
  CHECK(subType(empty, precise, sloppy));
  CHECK(subType(empty, sloppy, precise));

  // parameters compare contravariantly: widening the parameter goes one way
  ShapePtr takesFn = funDep(pure(topFn()), plain(topPure()));
  ShapePtr takesAny = funDep(topPure(), plain(topPure()));
  CHECK(subType(empty, takesAny, takesFn));   // param: fn <: Top
  CHECK(!subType(empty, takesFn, takesAny));  // param: Top is not below fn

  // capture functions compare bounds contravariantly
  ShapePtr wide = funCap(Bound::star(), plain(topPure()));
  ShapePtr narrow = funCap(Bound::set({}), plain(topPure()));
  CHECK(subType(empty, wide, narrow));
  CHECK(!subType(empty, narrow, wide));

  // existentials compare bodies under c <: *
  ExistType e1 = exists(topWith({Capture::captVar(0)}));
  ExistType e2 = exists(typed(top(), CaptureSet{Capture::captVar(0), Capture::termVar(0)}));
  TypeContext withTerm = TypeContext{}.pushTerm(topPure());
  CHECK(subType(withTerm, e1, e2));
  CHECK(!subType(withTerm, plain(topPure()), e1));  // no rule relates plain to exists
}

TEST_CASE("typeSynth: variable rule") {
  TypeContext ctx = TypeContext{}.pushTerm(topPure());
  auto outcome = typeSynth(ctx, termVar(Ref::var(0)));
  REQUIRE(outcome.ok());
  CHECK(outcome.result->useSet == CaptureSet{Capture::termVar(0)});
  CHECK(equal(outcome.result->type, plain(topWith({Capture::termVar(0)}))));
  CHECK(outcome.coverage.typing.count("var"));

  CHECK(hasCode(typeSynth(ctx, termVar(Ref::var(3))), DiagCode::UnboundVariable));
}

TEST_CASE("typeSynth: values have empty use-sets") {
  auto id = parse("fun (x: Top) => x");
  auto outcome = typeSynth(TypeContext{}, id);
  REQUIRE(outcome.ok());
  CHECK(outcome.result->useSet.empty());
  CHECK(equal(outcome.result->type,
              plain(pure(funDep(topPure(), plain(topWith({Capture::termVar(0)})))))));

  for (const char* text : {
           "fun (x: Top) => x",
           "fun [X <: Top] => fun (x: X) => x",
           "fun [c <: *] => fun (x: Top^{c}) => x",
           "fun (io: Top) => fun (f: Top^{io}) => f",
       }) {
    auto v = typeSynth(TypeContext{}, parse(text));
    CAPTURE(text);
    REQUIRE(v.ok());
    CHECK(v.result->useSet.empty());
  }
}

TEST_CASE("typeSynth: abs captures the body's use-set minus the parameter") {
  auto t = parse("fun (io: Top) => let g = fun (q: Top^{io}) => q in g io");
  auto outcome = typeSynth(TypeContext{}, t);
  REQUIRE(outcome.ok());
  CHECK(outcome.result->useSet.empty());
  // dependent result: forall (io: Top) Top^{io}
  ExistType expected = plain(pure(funDep(topPure(), plain(topWith({Capture::termVar(0)})))));
  CHECK(equal(outcome.result->type, expected));
  CHECK(outcome.coverage.typing.count("let"));
  CHECK(outcome.coverage.typing.count("app"));
}

TEST_CASE("typeSynth: application substitutes the argument") {
  // f: forall (z: Top) Top^{z}, a: Top |- f a : Top^{a}
  TypeContext ctx = TypeContext{}
                        .pushTerm(pure(funDep(topPure(), plain(topWith({Capture::termVar(0)})))))
                        .pushTerm(topPure());
  auto outcome = typeSynth(ctx, termApp(Ref::var(1), Ref::var(0)));
  REQUIRE(outcome.ok());
  CHECK(equal(outcome.result->type, plain(topWith({Capture::termVar(0)}))));
  CHECK(outcome.result->useSet == CaptureSet({Capture::termVar(0), Capture::termVar(1)}));
}

TEST_CASE("typeSynth: promotion through type-variable bounds") {
  // X <: (forall (x: Top) Top), f: X, a: Top |- f a  types via promotion
  TypeContext ctx =
      TypeContext{}.pushType(topFn()).pushTerm(pure(typeVar(0))).pushTerm(topPure());
  auto outcome = typeSynth(ctx, termApp(Ref::var(1), Ref::var(0)));
  REQUIRE(outcome.ok());
  CHECK(outcome.coverage.subtype.count("tvar"));

  // promotion to Top is not a function
  TypeContext topCtx = TypeContext{}.pushType(top()).pushTerm(pure(typeVar(0)));
  auto bad = typeSynth(topCtx, termApp(Ref::var(0), Ref::var(0)));
  CHECK(!bad.ok());
  CHECK(hasCode(bad, DiagCode::NotAFunction));
}

TEST_CASE("typeSynth: type and capture application check bounds") {
  auto good = typeSynth(TypeContext{},
                        parse("let f = fun [X <: Top] => fun (x: Top) => x in\n"
                              "let g = f[forall (q: Top) Top] in fun (z: Top) => z"));
  CHECK(good.ok());

  // applying above a narrower declared bound fails
  TypeContext ctx = TypeContext{}.pushTerm(pure(funTyp(topFn(), plain(topPure()))));
  auto bad = typeSynth(ctx, termTApp(Ref::var(0), top()));
  CHECK(!bad.ok());
  CHECK(hasCode(bad, DiagCode::BoundNotSatisfied));

  auto capGood = typeSynth(TypeContext{}, parse("let h = fun [c <: *] => fun (x: Top^{c}) => x in\n"
                                                "let k = h[{}] in fun (z: Top) => z"));
  CHECK(capGood.ok());

  // x's annotation mentions a star-bounded capture variable, so {x} cannot
  // be promoted below the declared empty bound
  TypeContext capCtx = TypeContext{}
                           .pushCapt(Bound::star())
                           .pushTerm(typed(top(), CaptureSet{Capture::captVar(0)}))
                           .pushTerm(pure(funCap(Bound::set({}), plain(topPure()))));
  auto capBad = typeSynth(capCtx, termCApp(Ref::var(0), CaptureSet{Capture::termVar(1)}));
  CHECK(!capBad.ok());
  CHECK(hasCode(capBad, DiagCode::BoundNotSatisfied));
}

TEST_CASE("typeSynth: let avoidance is checked, never inferred") {
  // the documented error path: let x = (fun (y: Top) => y) in x x
  auto t = parse("let x = fun (y: Top) => y in x x");
  auto outcome = typeSynth(TypeContext{}, t);
  CHECK(!outcome.ok());
  CHECK(hasCode(outcome, DiagCode::AvoidanceFailure));

  // ending in a closed value avoids the binder
  auto ok = typeSynth(TypeContext{}, parse("let x = fun (y: Top) => y in\n"
                                           "let r = x x in fun (z: Top) => z"));
  CHECK(ok.ok());
}

TEST_CASE("typeSynth: existential escape and expected existential") {
  auto escape = typeSynth(
      TypeContext{}, parse("let v = fun (x: Top) => x in let p = <{v}, v> in fun (z: Top) => z"));
  CHECK(!escape.ok());
  CHECK(hasCode(escape, DiagCode::ExistentialEscape));

  auto notEx = typeSynth(
      TypeContext{}, parse("let v = fun (x: Top) => x in let <c, y> = v in fun (z: Top) => z"));
  CHECK(!notEx.ok());
  CHECK(hasCode(notEx, DiagCode::ExpectedExistential));
}

TEST_CASE("typeSynth: packs synthesize abstracted existentials") {
  // let w = v in <{w}, w> hides w behind the existential
  auto t = parse("let w = fun (x: Top) => x in <{w}, w>");
  auto outcome = typeSynth(TypeContext{}, t);
  REQUIRE(outcome.ok());
  REQUIRE(outcome.result->type.existential);
  CHECK(outcome.coverage.typing.count("pack"));
  // exists c. (forall (x: Top) Top^{x})^{c}
  ExistType expected = exists(typed(funDep(topPure(), plain(topWith({Capture::termVar(0)}))),
                                    CaptureSet{Capture::captVar(0)}));
  CHECK(equal(outcome.result->type, expected));
}

TEST_CASE("typeSynth: existential let unpacks and re-checks avoidance") {
  auto ok = typeSynth(TypeContext{}, parse("let v = fun (x: Top) => x in\n"
                                           "let <c, y> = <{v}, v> in fun (z: Top) => z"));
  REQUIRE(ok.ok());
  CHECK(ok.coverage.typing.count("let-e"));
  CHECK(ok.coverage.typing.count("pack"));

  // the unpacked capture variable must not escape in the body's type
  auto escape = typeSynth(TypeContext{}, parse("let v = fun (x: Top) => x in\n"
                                               "let <c, y> = <{v}, v> in fun (z: Top^{c}) => z"));
  CHECK(!escape.ok());
  CHECK(hasCode(escape, DiagCode::AvoidanceFailure));
}

TEST_CASE("checkAgainst: packs against expected existentials") {
  // x: Top, y: Top^{x}: pack <{x}, y> against exists c. Top^{c} has use-set {}
  TypeContext ctx = TypeContext{}.pushTerm(topPure()).pushTerm(topWith({Capture::termVar(0)}));
  ExistType expected = exists(topWith({Capture::captVar(0)}));
  auto outcome =
      checkAgainst(ctx, termVal(pack(CaptureSet{Capture::termVar(1)}, Ref::var(0))), expected);
  REQUIRE(outcome.ok());
  CHECK(outcome.result->useSet.empty());
  CHECK(outcome.coverage.typing.count("pack"));
}

TEST_CASE("checkAgainst: synthesized type must be below the expected one") {
  TypeContext ctx = TypeContext{}.pushTerm(topPure());
  auto same = checkAgainst(ctx, termVar(Ref::var(0)), plain(topWith({Capture::termVar(0)})));
  REQUIRE(same.ok());
  CHECK(same.result->useSet == CaptureSet{Capture::termVar(0)});

  auto widened = checkAgainst(ctx, termVar(Ref::var(0)), plain(topPure()));
  REQUIRE(widened.ok());  // {x} <: {} via the empty annotation bound
  CHECK(widened.coverage.typing.count("sub"));

  auto mismatch = checkAgainst(ctx, termVar(Ref::var(0)), plain(pure(topFn())));
  CHECK(!mismatch.ok());
  CHECK(hasCode(mismatch, DiagCode::SubtypeFailure));
}

TEST_CASE("typeSynth is self-consistent: checkAgainst accepts its own result") {
  for (const char* text : {
           "fun (x: Top) => x",
           "let id = fun (x: Top) => x in let r = id id in fun (z: Top) => z",
           "let v = fun (x: Top) => x in let <c, y> = <{v}, v> in fun (z: Top) => z",
           "fun (a: Top) => fun (w: Top^{a}) => let g = fun (q: Top) => q in g w",
       }) {
    CAPTURE(text);
    auto t = parse(text);
    auto synth = typeSynth(TypeContext{}, t);
    REQUIRE(synth.ok());
    CHECK(wfCaptureSet(TypeContext{}, synth.result->useSet));
    CHECK(wfExist(TypeContext{}, synth.result->type));
    CHECK(checkAgainst(TypeContext{}, t, synth.result->type).ok());
  }
}

TEST_CASE("derivation traces name the applied rules") {
  CheckOptions opts;
  opts.collectTrace = true;
  auto outcome = typeSynth(
      TypeContext{}, parse("let id = fun (x: Top) => x in let r = id id in fun (z: Top) => z"),
      opts);
  REQUIRE(outcome.ok());
  CHECK(outcome.result->trace.rule == "let");
  REQUIRE(outcome.result->trace.children.size() == 2);
  CHECK(outcome.result->trace.children[0].rule == "abs");
  CHECK(outcome.coverage.typing.count("app"));
  CHECK(outcome.coverage.typing.count("sub"));
  CHECK(outcome.coverage.subtype.count("top"));
  CHECK(outcome.coverage.subcapture.count("sc-var"));
}
