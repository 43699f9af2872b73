// Randomized agreement between the de Bruijn operations and the named-
// variable oracle. The acceptance suite reruns these laws at 10k cases per
// namespace; here a smaller count keeps the unit run quick.

#include "capless/syntax.hpp"
#include "doctest.h"
#include "named_oracle.hpp"
#include "random_syntax.hpp"

using namespace capless;
using namespace capless::testing;

namespace {

constexpr FreeCounts kFree{3, 2, 3, 2};

NameEnv baseEnv() { return NameEnv::free(kFree.term, kFree.type, kFree.capt); }

}  // namespace

TEST_CASE("named conversion round-trips") {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 10);
    CAPTURE(seed);
    CHECK(equal(fromNamed(toNamed(t, baseEnv()), baseEnv()), t));
  }
}

TEST_CASE("shift agrees with context weakening in the named view") {
  // Shifting inserts unused names below the free ones: the named tree is
  // unchanged, so converting back along the extended environment recovers
  // the shifted term.
  for (uint64_t seed = 0; seed < 300; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 10);
    CAPTURE(seed);

    NameEnv extended = baseEnv();
    extended.term.push_back("fresh0");
    extended.term.push_back("fresh1");
    // indices >= 0 move by 2: names stay, two unused names enter innermost
    CHECK(equal(shift(t, Ns::Term, 2, 0), fromNamed(toNamed(t, baseEnv()), extended)));

    NameEnv extendedCapt = baseEnv();
    extendedCapt.capt.push_back("freshC");
    CHECK(equal(shift(t, Ns::Capt, 1, 0), fromNamed(toNamed(t, baseEnv()), extendedCapt)));
  }
}

TEST_CASE("substTermVar agrees with the named oracle") {
  for (uint64_t seed = 0; seed < 400; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 10);
    uint32_t target = gen.pick(kFree.term);
    bool useLoc = gen.coin(30);
    Ref repl = useLoc ? Ref::loc(gen.pick(kFree.locs)) : Ref::var(gen.pick(kFree.term));

    NameEnv env = baseEnv();
    std::string targetName = env.term[env.term.size() - 1 - target];
    NRef namedRepl = useLoc ? NRef{repl.index}
                            : NRef{env.term[env.term.size() - 1 - repl.index]};

    TermPtr viaCore = substTermVar(t, target, repl);
    TermPtr viaOracle = fromNamed(nsubstTermVar(toNamed(t, env), targetName, namedRepl), env);
    CAPTURE(seed);
    CHECK(equal(viaCore, viaOracle));
  }
}

TEST_CASE("substTypeVar agrees with the named oracle") {
  for (uint64_t seed = 0; seed < 400; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 10);
    ShapePtr repl = gen.shape({}, 4);
    uint32_t target = gen.pick(kFree.type);

    NameEnv env = baseEnv();
    std::string targetName = env.type[env.type.size() - 1 - target];
    NShapePtr namedRepl = toNamedShape(repl, env);

    TermPtr viaCore = substTypeVar(t, target, repl);
    TermPtr viaOracle = fromNamed(nsubstTypeVar(toNamed(t, env), targetName, namedRepl), env);
    CAPTURE(seed);
    CHECK(equal(viaCore, viaOracle));
  }
}

TEST_CASE("substCaptVar agrees with the named oracle") {
  for (uint64_t seed = 0; seed < 400; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 10);
    CaptureSet repl = gen.captureSet({});
    uint32_t target = gen.pick(kFree.capt);

    NameEnv env = baseEnv();
    std::string targetName = env.capt[env.capt.size() - 1 - target];
    NCaptureSet namedRepl = toNamed(repl, env);

    TermPtr viaCore = substCaptVar(t, target, repl);
    TermPtr viaOracle = fromNamed(nsubstCaptVar(toNamed(t, env), targetName, namedRepl), env);
    CAPTURE(seed);
    CHECK(equal(viaCore, viaOracle));
  }
}

TEST_CASE("substitution commutes with shift past the cutoff") {
  // the standard substitution lemma, randomized: substituting below a
  // binder-free shift window commutes
  for (uint64_t seed = 0; seed < 300; ++seed) {
    RandomSyntax gen(seed, kFree);
    TermPtr t = gen.term({}, 8);
    // shift with cutoff above every free index, then substitute; equals
    // substitute then shift (the shift cannot touch the replaced atom)
    uint32_t target = gen.pick(kFree.term);
    Ref repl = Ref::var(gen.pick(kFree.term));
    uint32_t cutoff = kFree.term + 4;
    TermPtr a = substTermVar(shift(t, Ns::Term, 1, cutoff), target, repl);
    TermPtr b = shift(substTermVar(t, target, repl), Ns::Term, 1, cutoff);
    CAPTURE(seed);
    CHECK(equal(a, b));
  }
}
