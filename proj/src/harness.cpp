#include "capless/harness.hpp"

#include <algorithm>
#include <sstream>

#include "capless/surface.hpp"
#include "json.hpp"

namespace capless::harness {

// ---------------------------------------------------------------------------
// Subcapturing oracle
// ---------------------------------------------------------------------------

namespace {

std::vector<Capture> oracleAtomUniverse(const TypeContext& ctx, const CaptureSet& c1,
                                        const CaptureSet& c2) {
  CaptureSet atoms = c1.unionWith(c2);
  for (uint32_t i = 0; i < ctx.termCount(); ++i) {
    atoms.insert(Capture::termVar(i));
    if (auto t = ctx.lookupTerm(i)) atoms = atoms.unionWith(t->captures);
  }
  for (uint32_t i = 0; i < ctx.captCount(); ++i) {
    atoms.insert(Capture::captVar(i));
    if (auto b = ctx.lookupCaptBound(i); b && !b->isStar) atoms = atoms.unionWith(b->captures);
  }
  for (const auto& [loc, t] : ctx.locations()) {
    atoms.insert(Capture::loc(loc));
    atoms = atoms.unionWith(t.captures);
  }
  return atoms.atoms();
}

class SubcaptureOracle {
 public:
  SubcaptureOracle(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2)
      : ctx_(ctx), atoms_(oracleAtomUniverse(ctx, c1, c2)) {
    if (atoms_.size() > 12)
      throw BudgetExceeded("subcapture oracle limited to 12 atoms, got " +
                           std::to_string(atoms_.size()));
  }

  bool derivable(const CaptureSet& c1, const CaptureSet& c2, uint32_t depth) {
    if (depth == 0) return false;
    auto key = std::make_tuple(keyOf(c1), keyOf(c2), depth);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) return hit->second;
    memo_[key] = false;  // cycle cut while computing
    bool out = search(c1, c2, depth);
    memo_[key] = out;
    return out;
  }

 private:
  const TypeContext& ctx_;
  std::vector<Capture> atoms_;
  std::map<std::tuple<std::string, std::string, uint32_t>, bool> memo_;

  static std::string keyOf(const CaptureSet& cs) {
    std::string k;
    for (const auto& a : cs.atoms())
      k += std::to_string(static_cast<int>(a.kind)) + ":" + std::to_string(a.index) + ",";
    return k;
  }

  std::optional<CaptureSet> declaredBound(const Capture& a) const {
    switch (a.kind) {
      case Capture::Kind::TermVar:
        if (auto t = ctx_.lookupTerm(a.index)) return t->captures;
        return std::nullopt;
      case Capture::Kind::CaptVar:
        if (auto b = ctx_.lookupCaptBound(a.index); b && !b->isStar) return b->captures;
        return std::nullopt;
      case Capture::Kind::Loc:
        if (auto t = ctx_.lookupLocation(a.index)) return t->captures;
        return std::nullopt;
    }
    return std::nullopt;
  }

  bool search(const CaptureSet& c1, const CaptureSet& c2, uint32_t depth) {
    // (sc-elem)
    if (c1.subsetOf(c2)) return true;
    // (sc-var) / (sc-bound): singleton premise, conclusion is the bound itself
    if (c1.size() == 1) {
      if (auto b = declaredBound(c1.atoms().front()); b && *b == c2) return true;
    }
    if (depth == 1) return false;
    // (sc-set): binary decompositions of c1
    if (c1.size() >= 2) {
      const auto& as = c1.atoms();
      size_t n = as.size();
      for (size_t mask = 1; mask + 1 < (size_t{1} << n); ++mask) {
        CaptureSet left, right;
        for (size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? left : right).insert(as[i]);
        if (derivable(left, c2, depth - 1) && derivable(right, c2, depth - 1)) return true;
      }
    }
    // (sc-trans): intermediates from the powerset of the atom universe
    size_t n = atoms_.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
      CaptureSet mid;
      for (size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1) mid.insert(atoms_[i]);
      if (mid == c1 || mid == c2) continue;
      if (derivable(c1, mid, depth - 1) && derivable(mid, c2, depth - 1)) return true;
    }
    return false;
  }
};

}  // namespace

bool oracleSubcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2,
                      uint32_t depth) {
  return SubcaptureOracle(ctx, c1, c2).derivable(c1, c2, depth);
}

// ---------------------------------------------------------------------------
// Subtyping oracle
// ---------------------------------------------------------------------------

namespace {

class SubtypeOracle {
 public:
  SubtypeOracle(const TypeUniverse& universe) : universe_(universe) {}

  bool derivE(const TypeContext& ctx, const ExistType& e1, const ExistType& e2, uint32_t depth) {
    if (depth == 0) return false;
    std::string key = "E|" + ctxKey(ctx) + "|" + surface::printExist(e1, envOf(ctx)) + "|" +
                      surface::printExist(e2, envOf(ctx)) + "|" + std::to_string(depth);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) return hit->second;
    memo_[key] = false;
    bool out = searchE(ctx, e1, e2, depth);
    memo_[key] = out;
    return out;
  }

  bool derivS(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2, uint32_t depth) {
    if (depth == 0) return false;
    std::string key = "S|" + ctxKey(ctx) + "|" + surface::printShape(s1, envOf(ctx)) + "|" +
                      surface::printShape(s2, envOf(ctx)) + "|" + std::to_string(depth);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) return hit->second;
    memo_[key] = false;
    bool out = searchS(ctx, s1, s2, depth);
    memo_[key] = out;
    return out;
  }

 private:
  const TypeUniverse& universe_;
  std::map<std::string, bool> memo_;

  static surface::NameEnv envOf(const TypeContext& ctx) {
    return surface::NameEnv{ctx.termCount(), ctx.typeCount(), ctx.captCount()};
  }

  static std::string ctxKey(const TypeContext& ctx) {
    std::string k;
    for (const auto& b : ctx.bindings()) {
      std::visit(Overloaded{
                     [&](const TermBind& t) { k += "x:" + surface::printType(t.type) + ";"; },
                     [&](const TypeBind& t) { k += "X:" + surface::printShape(t.bound) + ";"; },
                     [&](const CaptBind& c) { k += "c:" + surface::printBound(c.bound) + ";"; },
                 },
                 b);
    }
    return k;
  }

  bool derivT(const TypeContext& ctx, const Type& t1, const Type& t2, uint32_t depth) {
    if (depth == 0) return false;
    // (refl)
    if (equal(t1, t2)) return true;
    // (capt): split into shape subtyping and subcapturing
    if (derivS(ctx, t1.shape, t2.shape, depth - 1) &&
        oracleSubcapture(ctx, t1.captures, t2.captures, 8))
      return true;
    // (trans) at the type level via the plain-type part of the universe
    for (const auto& m : universe_.etypes(ctx)) {
      if (m.existential) continue;
      if (equal(m.body, t1) || equal(m.body, t2)) continue;
      if (derivT(ctx, t1, m.body, depth - 1) && derivT(ctx, m.body, t2, depth - 1)) return true;
    }
    return false;
  }

  bool searchE(const TypeContext& ctx, const ExistType& e1, const ExistType& e2, uint32_t depth) {
    // (refl)
    if (equal(e1, e2)) return true;
    // (exist)
    if (e1.existential && e2.existential)
      if (derivT(ctx.pushCapt(Bound::star()), e1.body, e2.body, depth - 1)) return true;
    if (!e1.existential && !e2.existential)
      if (derivT(ctx, e1.body, e2.body, depth - 1)) return true;
    // (trans)
    for (const auto& m : universe_.etypes(ctx)) {
      if (equal(m, e1) || equal(m, e2)) continue;
      if (derivE(ctx, e1, m, depth - 1) && derivE(ctx, m, e2, depth - 1)) return true;
    }
    return false;
  }

  bool searchS(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2, uint32_t depth) {
    using S = ShapeType;
    // (refl)
    if (equal(*s1, *s2)) return true;
    // (top)
    if (std::holds_alternative<S::Top>(s2->node)) return true;
    // (tvar): X <: its declared bound, exactly
    if (const auto* v = std::get_if<S::TypeVar>(&s1->node)) {
      auto bound = ctx.lookupTypeBound(v->index);
      if (bound && equal(**bound, *s2)) return true;
    }
    // (fun) / (tfun) / (cfun)
    if (const auto* f1 = std::get_if<S::FunDep>(&s1->node)) {
      if (const auto* f2 = std::get_if<S::FunDep>(&s2->node)) {
        if (derivT(ctx, f2->param, f1->param, depth - 1) &&
            derivE(ctx.pushTerm(f2->param), *f1->result, *f2->result, depth - 1))
          return true;
      }
    }
    if (const auto* f1 = std::get_if<S::FunTyp>(&s1->node)) {
      if (const auto* f2 = std::get_if<S::FunTyp>(&s2->node)) {
        if (derivS(ctx, f2->bound, f1->bound, depth - 1) &&
            derivE(ctx.pushType(f2->bound), *f1->result, *f2->result, depth - 1))
          return true;
      }
    }
    if (const auto* f1 = std::get_if<S::FunCap>(&s1->node)) {
      if (const auto* f2 = std::get_if<S::FunCap>(&s2->node)) {
        bool boundOk = f1->bound.isStar ||
                       (!f2->bound.isStar &&
                        oracleSubcapture(ctx, f2->bound.captures, f1->bound.captures, 8));
        if (boundOk &&
            derivE(ctx.pushCapt(f2->bound), *f1->result, *f2->result, depth - 1))
          return true;
      }
    }
    // (trans) over the shape universe
    for (const auto& m : universe_.shapes(ctx)) {
      if (equal(*m, *s1) || equal(*m, *s2)) continue;
      if (derivS(ctx, s1, m, depth - 1) && derivS(ctx, m, s2, depth - 1)) return true;
    }
    return false;
  }
};

}  // namespace

bool oracleSubType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                   uint32_t depth, const TypeUniverse& universe) {
  return SubtypeOracle(universe).derivE(ctx, e1, e2, depth);
}

// ---------------------------------------------------------------------------
// Store typing
// ---------------------------------------------------------------------------

TypeContext contextWithLocations(const LocationContext& locs) {
  TypeContext ctx;
  for (const auto& [loc, t] : locs) ctx = ctx.withLocation(loc, t);
  return ctx;
}

CheckOutcome typeConfig(const LocationContext& locs, const Store& store, const TermPtr& term) {
  CheckOutcome out;
  // store consistency: each value checks against its annotation under the
  // earlier entries only
  LocationContext earlier;
  for (const auto& [loc, value] : store.bindings()) {
    auto annot = locs.find(loc);
    if (annot == locs.end()) {
      out.diagnostics.push_back(Diagnostic::error(
          DiagCode::StoreIllTyped, "location l" + std::to_string(loc) + " has no annotation"));
      return out;
    }
    TypeContext ctx = contextWithLocations(earlier);
    auto valueCheck =
        checkAgainst(ctx, termVal(value), plain(annot->second));
    if (!valueCheck.ok()) {
      out.diagnostics.push_back(Diagnostic::error(
          DiagCode::StoreIllTyped,
          "stored value at l" + std::to_string(loc) + " does not match its annotation"));
      for (auto& d : valueCheck.diagnostics) out.diagnostics.push_back(std::move(d));
      return out;
    }
    out.coverage.merge(valueCheck.coverage);
    earlier.emplace(loc, annot->second);
  }
  auto synth = typeSynth(contextWithLocations(locs), term);
  out.coverage.merge(synth.coverage);
  for (auto& d : synth.diagnostics) out.diagnostics.push_back(std::move(d));
  out.result = std::move(synth.result);
  return out;
}

// ---------------------------------------------------------------------------
// Soundness pipeline
// ---------------------------------------------------------------------------

namespace {

std::string describeConfig(const Config& c) {
  std::ostringstream out;
  out << "store{";
  bool first = true;
  for (const auto& [loc, v] : c.store.bindings()) {
    if (!first) out << ", ";
    first = false;
    out << "l" << loc << " -> " << surface::printValue(v, surface::NameEnv{},
                                                       surface::PrintOptions{false, {}});
  }
  out << "} | "
      << surface::printTerm(c.term, surface::NameEnv{}, surface::PrintOptions{false, {}});
  return out.str();
}

}  // namespace

SoundnessReport checkSoundness(const TermPtr& program, uint32_t fuel,
                               const std::string& programId) {
  SoundnessReport report;
  report.programId = programId;

  auto initial = typeSynth(TypeContext{}, program);
  if (!initial.ok()) {
    report.typeChecked = false;
    report.counterexample = "program rejected by the checker before stepping";
    return report;
  }
  report.typeChecked = true;
  const CaptureSet originalUse = initial.result->useSet;
  const ExistType originalType = initial.result->type;

  auto note = [&](const std::string& detail, const Config& c) {
    if (!report.counterexample) report.counterexample = detail + " at <" + describeConfig(c) + ">";
  };

  Config config{Store{}, program};
  LocationContext locations;
  std::optional<CaptureSet> previousUse;

  for (uint32_t step = 0;; ++step) {
    if (step >= fuel) {
      report.terminationOk = false;
      if (!report.counterexample)
        report.counterexample = "fuel exhausted after " + std::to_string(fuel) + " steps";
      break;
    }

    // type the current configuration
    TypeContext ctx = contextWithLocations(locations);
    auto current = typeConfig(locations, config.store, config.term);
    StepCheck check;
    if (!current.ok()) {
      report.preservationOk = check.preservationOk = false;
      note("configuration no longer re-types", config);
    } else {
      const auto& useSet = current.result->useSet;
      const auto& type = current.result->type;
      if (step > 0) {
        if (!subType(ctx, type, originalType) || !subcapture(ctx, useSet, originalUse)) {
          report.preservationOk = check.preservationOk = false;
          note("configuration types above the original type", config);
        }
        if (previousUse && !subcapture(ctx, useSet, *previousUse)) {
          report.useSetShrankOk = check.useSetShrankOk = false;
          note("use-set grew across a step", config);
        }
      }
      previousUse = useSet;
    }

    StepOutcome outcome = stepOnce(config);
    if (std::get_if<AnswerReached>(&outcome)) {
      report.terminationSteps = step;
      break;
    }
    if (const auto* stuck = std::get_if<Stuck>(&outcome)) {
      check.rule = "(stuck)";
      report.progressOk = false;
      note("well-typed configuration is stuck (" + stuck->detail + ")", config);
      report.perStep.push_back(check);
      break;
    }

    auto& stepped = std::get<Stepped>(outcome);
    check.rule = stepped.rule;

    // capture monitor: each location the rule looked up must be predicted
    // by the current configuration's use-set
    if (current.ok()) {
      for (uint32_t loc : stepped.lookups) {
        if (!subcapture(ctx, CaptureSet{Capture::loc(loc)}, current.result->useSet)) {
          report.monitorOk = check.monitorOk = false;
          note("lookup of l" + std::to_string(loc) + " is not covered by the use-set", config);
        }
      }
    }

    // store monotonicity: old bindings survive unchanged
    for (const auto& [loc, value] : config.store.bindings()) {
      const Value* after = stepped.next.store.lookup(loc);
      if (!after || !equal(*after, value)) {
        report.storeMonotonicOk = false;
        note("store binding changed across a step", config);
        break;
      }
    }

    // a lift extends the location context with the stored value's type
    if (stepped.rule == "lift") {
      uint32_t newLoc = stepped.next.store.nextLocation() - 1;
      const Value* stored = stepped.next.store.lookup(newLoc);
      auto storedType = typeSynth(ctx, termVal(*stored));
      if (!storedType.ok() || storedType.result->type.existential) {
        report.preservationOk = check.preservationOk = false;
        note("lifted value has no plain type", config);
        locations.emplace(newLoc, pure(top()));  // placeholder so later steps proceed
      } else {
        locations.emplace(newLoc, storedType.result->type.body);
      }
    }

    report.perStep.push_back(check);
    config = std::move(stepped.next);
  }

  return report;
}

std::string reportToJson(const SoundnessReport& report) {
  nlohmann::json j;
  j["program"] = report.programId;
  j["typeChecked"] = report.typeChecked;
  j["progressOk"] = report.progressOk;
  j["preservationOk"] = report.preservationOk;
  j["terminationOk"] = report.terminationOk;
  j["monitorOk"] = report.monitorOk;
  j["useSetShrankOk"] = report.useSetShrankOk;
  j["storeMonotonicOk"] = report.storeMonotonicOk;
  j["terminationSteps"] = report.terminationSteps;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.perStep) {
    steps.push_back({{"rule", s.rule},
                     {"preservationOk", s.preservationOk},
                     {"useSetShrankOk", s.useSetShrankOk},
                     {"monitorOk", s.monitorOk}});
  }
  j["steps"] = std::move(steps);
  if (report.counterexample) j["counterexample"] = *report.counterexample;
  j["allOk"] = report.allOk();
  return j.dump();
}

}  // namespace capless::harness
