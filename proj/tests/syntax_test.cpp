#include "capless/syntax.hpp"

#include "doctest.h"
#include "random_syntax.hpp"

using namespace capless;

namespace {
TermPtr identityLam() { return termVal(lam(pure(top()), termVar(Ref::var(0)))); }
}  // namespace

TEST_CASE("capture sets are duplicate-free and order-insensitive") {
  CaptureSet a{Capture::termVar(1), Capture::captVar(0), Capture::termVar(1)};
  CaptureSet b{Capture::captVar(0), Capture::termVar(1)};
  CHECK(a == b);
  CHECK(a.size() == 2);
  CHECK(CaptureSet{}.empty());
}

TEST_CASE("capture set algebra: union, minus, subset") {
  CaptureSet x{Capture::termVar(0)};
  CaptureSet xc{Capture::termVar(0), Capture::captVar(0)};
  CHECK(x.unionWith(xc) == xc);  // idempotent union
  CHECK(xc.minus(Capture::termVar(0)) == CaptureSet{Capture::captVar(0)});
  CHECK(CaptureSet{}.subsetOf(x));
  CHECK(!xc.subsetOf(x));
}

TEST_CASE("shift displaces only the requested namespace") {
  CaptureSet cs{Capture::termVar(0)};
  CHECK(shift(cs, Ns::Term, 1) == CaptureSet{Capture::termVar(1)});

  // namespaces are independent: a type shift leaves term refs alone
  TermPtr app = termApp(Ref::var(0), Ref::var(1));
  CHECK(equal(shift(app, Ns::Type, 1), app));

  // locations never shift
  CaptureSet loc{Capture::loc(3)};
  CHECK(shift(loc, Ns::Term, 5) == loc);
}

TEST_CASE("shift respects the cutoff under binders") {
  // fun (x: Top) => x0 with a free occurrence bumped only above the cutoff
  TermPtr lamFree = termVal(lam(pure(top()), termVar(Ref::var(1))));  // body mentions outer #0
  TermPtr shifted = shift(lamFree, Ns::Term, 1, 0);
  // bound var stays 0-relative; the free one moves
  TermPtr expected = termVal(lam(pure(top()), termVar(Ref::var(2))));
  CHECK(equal(shifted, expected));

  TermPtr bound = identityLam();
  CHECK(equal(shift(bound, Ns::Term, 1, 0), bound));
}

TEST_CASE("shift below zero raises NegativeIndex") {
  CaptureSet cs{Capture::termVar(0)};
  CHECK_THROWS_AS(shift(cs, Ns::Term, -1), NegativeIndexError);
}

TEST_CASE("shift round-trip is the identity") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    testing::RandomSyntax gen(seed, testing::FreeCounts{3, 2, 2, 2});
    TermPtr t = gen.term({}, 8);
    int amount = static_cast<int>(seed % 3) + 1;
    for (Ns ns : {Ns::Term, Ns::Type, Ns::Capt}) {
      CAPTURE(seed);
      CHECK(equal(shift(shift(t, ns, amount, 1), ns, -amount, 1), t));
    }
  }
}

TEST_CASE("substTermVar replaces the target in term and capture positions") {
  // direct hit
  CHECK(equal(substTermVar(termVar(Ref::var(0)), 0, Ref::var(7)), termVar(Ref::var(7))));

  // run-time replacement by a store location inside a capture set
  Type t = typed(top(), {Capture::termVar(0)});
  Type expected = typed(top(), {Capture::loc(3)});
  CHECK(equal(substTermVar(t, 0, Ref::loc(3)), expected));

  // under a binder the target and a variable replacement both move
  TermPtr subject = termVal(lam(typed(top(), {Capture::termVar(0)}), termVar(Ref::var(0))));
  TermPtr result = substTermVar(subject, 0, Ref::var(1));
  TermPtr expectedTerm =
      termVal(lam(typed(top(), {Capture::termVar(1)}), termVar(Ref::var(0))));
  CHECK(equal(result, expectedTerm));
}

TEST_CASE("substTypeVar instantiates shapes") {
  CHECK(equal(substTypeVar(pure(typeVar(0)), 0, top()), pure(top())));

  TermPtr tapp = termTApp(Ref::var(0), typeVar(0));
  CHECK(equal(substTypeVar(tapp, 0, top()), termTApp(Ref::var(0), top())));

  // X0^{c0} with X0 := forall (x: Top) Top keeps the capture decoration
  ShapePtr fn = funDep(pure(top()), plain(pure(top())));
  Type subject = typed(typeVar(0), {Capture::captVar(0)});
  Type result = substTypeVar(subject, 0, fn);
  CHECK(equal(result, typed(fn, {Capture::captVar(0)})));
}

TEST_CASE("substCaptVar uses flattening set-union semantics") {
  CHECK(substCaptVar(CaptureSet{Capture::captVar(0)}, 0, CaptureSet{}) == CaptureSet{});

  CaptureSet subject{Capture::captVar(0), Capture::termVar(2)};
  CaptureSet repl{Capture::termVar(0), Capture::termVar(1)};
  CaptureSet expected{Capture::termVar(0), Capture::termVar(1), Capture::termVar(2)};
  CHECK(substCaptVar(subject, 0, repl) == expected);

  // self-substitution is the identity on any subject
  for (uint64_t seed = 0; seed < 100; ++seed) {
    testing::RandomSyntax gen(seed, testing::FreeCounts{2, 1, 3, 1});
    TermPtr t = gen.term({}, 8);
    CHECK(equal(substCaptVar(t, 1, CaptureSet{Capture::captVar(1)}), t));
  }
}

TEST_CASE("substCaptVar shifts the replacement under binders") {
  // exists c. Top^{c1} — the free c0 sits under one existential binder
  ExistType subject = exists(typed(top(), {Capture::captVar(1)}));
  ExistType result = substCaptVar(subject, 0, CaptureSet{Capture::termVar(0)});
  CHECK(equal(result, exists(typed(top(), {Capture::termVar(0)}))));
}

TEST_CASE("freeAtoms per namespace") {
  // bound variables are not free
  CHECK(freeAtoms(Ns::Term, identityLam()).indices.empty());

  ExistType hidden = exists(typed(top(), {Capture::captVar(0)}));
  CHECK(freeAtoms(Ns::Capt, hidden).indices.empty());

  Type mixed = typed(top(), {Capture::termVar(2), Capture::loc(1)});
  auto free = freeAtoms(Ns::Term, mixed);
  CHECK(free.indices == std::set<uint32_t>{2});
  CHECK(free.locations == std::set<uint32_t>{1});
}

TEST_CASE("freeAtoms after substTermVar never mentions the target") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    testing::RandomSyntax gen(seed, testing::FreeCounts{3, 2, 2, 1});
    TermPtr t = gen.term({}, 10);
    TermPtr substituted = substTermVar(t, 1, Ref::var(2));
    CAPTURE(seed);
    CHECK(!freeAtoms(Ns::Term, substituted).containsIndex(1));
  }
}

TEST_CASE("answers are exactly variables and values") {
  CHECK(isAnswer(*termVar(Ref::var(0))));
  CHECK(isAnswer(*termVar(Ref::loc(4))));
  CHECK(isAnswer(*identityLam()));
  CHECK(!isAnswer(*termApp(Ref::var(0), Ref::var(0))));
  CHECK(!isAnswer(*termLet(identityLam(), termVar(Ref::var(0)))));
  CHECK(asAnswer(*termVar(Ref::var(3))).has_value());
  CHECK(!asAnswer(*termApp(Ref::var(0), Ref::var(1))).has_value());
}

TEST_CASE("structural equality is de Bruijn alpha-equivalence") {
  // two surface-distinct identities resolve to the same core
  TermPtr a = termVal(lam(pure(top()), termVar(Ref::var(0))));
  TermPtr b = termVal(lam(pure(top()), termVar(Ref::var(0))));
  CHECK(equal(a, b));
  CHECK(!equal(a, termVal(lam(pure(top()), termVar(Ref::var(1))))));
}
