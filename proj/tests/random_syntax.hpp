// Random well-scoped (not necessarily well-typed) syntax for property tests.
// Indices are drawn within the declared free counts plus the binders crossed,
// so every generated tree is closed relative to its free environment.

#pragma once

#include <random>

#include "capless/syntax.hpp"

namespace capless::testing {

struct FreeCounts {
  uint32_t term = 0, type = 0, capt = 0, locs = 0;
};

class RandomSyntax {
 public:
  RandomSyntax(uint64_t seed, FreeCounts free) : rng_(seed), free_(free) {}

  uint32_t pick(uint32_t n) { return n == 0 ? 0 : static_cast<uint32_t>(rng_() % n); }
  bool coin(uint32_t percent) { return pick(100) < percent; }

  CaptureSet captureSet(FreeCounts depth) {
    CaptureSet cs;
    uint32_t n = pick(4);
    for (uint32_t i = 0; i < n; ++i) {
      switch (pick(3)) {
        case 0:
          if (free_.term + depth.term > 0)
            cs.insert(Capture::termVar(pick(free_.term + depth.term)));
          break;
        case 1:
          if (free_.capt + depth.capt > 0)
            cs.insert(Capture::captVar(pick(free_.capt + depth.capt)));
          break;
        default:
          if (free_.locs > 0) cs.insert(Capture::loc(pick(free_.locs)));
          break;
      }
    }
    return cs;
  }

  bool refConstructible(FreeCounts depth) const {
    return free_.term + depth.term > 0 || free_.locs > 0;
  }

  Ref ref(FreeCounts depth) {
    uint32_t n = free_.term + depth.term;
    if (free_.locs > 0 && (n == 0 || coin(20))) return Ref::loc(pick(free_.locs));
    return Ref::var(pick(n));
  }

  Bound bound(FreeCounts depth) {
    if (coin(40)) return Bound::star();
    return Bound::set(captureSet(depth));
  }

  ShapePtr shape(FreeCounts depth, uint32_t size) {
    if (size == 0 || coin(35)) {
      if (free_.type + depth.type > 0 && coin(40))
        return typeVar(pick(free_.type + depth.type));
      return top();
    }
    switch (pick(3)) {
      case 0: {
        Type param = type(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.term;
        return funDep(std::move(param), existType(inner, size / 2));
      }
      case 1: {
        ShapePtr b = shape(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.type;
        return funTyp(std::move(b), existType(inner, size / 2));
      }
      default: {
        Bound b = bound(depth);
        FreeCounts inner = depth;
        ++inner.capt;
        return funCap(std::move(b), existType(inner, size / 2));
      }
    }
  }

  Type type(FreeCounts depth, uint32_t size) {
    return typed(shape(depth, size), captureSet(depth));
  }

  ExistType existType(FreeCounts depth, uint32_t size) {
    if (coin(25)) {
      FreeCounts inner = depth;
      ++inner.capt;
      return exists(type(inner, size));
    }
    return plain(type(depth, size));
  }

  Value value(FreeCounts depth, uint32_t size) {
    switch (refConstructible(depth) ? pick(4) : pick(3)) {
      case 0: {
        Type param = type(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.term;
        return lam(std::move(param), term(inner, size / 2));
      }
      case 1: {
        ShapePtr b = shape(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.type;
        return tlam(std::move(b), term(inner, size / 2));
      }
      case 2: {
        Bound b = bound(depth);
        FreeCounts inner = depth;
        ++inner.capt;
        return clam(std::move(b), term(inner, size / 2));
      }
      default: return pack(captureSet(depth), ref(depth));
    }
  }

  TermPtr term(FreeCounts depth, uint32_t size) {
    bool refOk = refConstructible(depth);
    if (size == 0 || coin(30)) {
      if (refOk && coin(50)) return termVar(ref(depth));
      return termVal(value(depth, size));
    }
    switch (refOk ? pick(5) : 3 + pick(2)) {
      case 0: return termApp(ref(depth), ref(depth));
      case 1: return termTApp(ref(depth), shape(depth, size / 2));
      case 2: return termCApp(ref(depth), captureSet(depth));
      case 3: {
        TermPtr b = term(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.term;
        return termLet(std::move(b), term(inner, size / 2));
      }
      default: {
        TermPtr b = term(depth, size / 2);
        FreeCounts inner = depth;
        ++inner.capt;
        ++inner.term;
        return termLetEx(std::move(b), term(inner, size / 2));
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  FreeCounts free_;
};

}  // namespace capless::testing
