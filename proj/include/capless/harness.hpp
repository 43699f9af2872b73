// Soundness and oracle infrastructure: brute-force declarative-derivation
// oracles for subcapturing and subtyping, store/config typing, the empirical
// progress/preservation/termination/capture-monitor pipeline, and a
// well-typed-term generator.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "capless/checker.hpp"
#include "capless/eval.hpp"
#include "capless/syntax.hpp"

namespace capless::harness {

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// --- declarative oracles ----------------------------------------------------

/// True iff a declarative subcapturing derivation of depth <= depth exists,
/// searching sc-trans with intermediate sets drawn from the powerset of the
/// atoms present in the context and the two sets. Exponential by design;
/// throws BudgetExceeded past ~12 atoms.
bool oracleSubcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2,
                      uint32_t depth);

/// Candidate intermediates for the subtyping oracle's explicit (trans),
/// re-enumerated for extended contexts as binders are pushed.
struct TypeUniverse {
  std::function<std::vector<ExistType>(const TypeContext&)> etypes;
  std::function<std::vector<ShapePtr>(const TypeContext&)> shapes;
};

/// Declarative subtyping derivation search (top/refl/trans/tvar/capt/exist/
/// fun/tfun/cfun) with explicit (trans) over the given universe. Capture
/// premises use oracleSubcapture.
bool oracleSubType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                   uint32_t depth, const TypeUniverse& universe);

// --- store typing -------------------------------------------------------------

/// Typing annotations for store locations. Annotations are index-closed:
/// they may mention only locations allocated earlier.
using LocationContext = std::map<uint32_t, Type>;

TypeContext contextWithLocations(const LocationContext& locs);

/// Extends typing to runtime configurations: every stored value must check
/// against its annotation under the earlier part of the store, then the term
/// is synthesized with locations standing in for term bindings.
CheckOutcome typeConfig(const LocationContext& locs, const Store& store, const TermPtr& term);

// --- soundness pipeline --------------------------------------------------------

struct StepCheck {
  std::string rule;
  bool preservationOk = true;
  bool useSetShrankOk = true;
  bool monitorOk = true;
};

struct SoundnessReport {
  std::string programId;
  bool typeChecked = false;  // precondition; false means rejected before stepping
  bool progressOk = true;
  bool preservationOk = true;
  bool terminationOk = true;
  bool monitorOk = true;
  bool useSetShrankOk = true;
  bool storeMonotonicOk = true;
  uint32_t terminationSteps = 0;
  std::vector<StepCheck> perStep;
  std::optional<std::string> counterexample;  // human-readable payload, set iff a flag is false

  bool allOk() const {
    return typeChecked && progressOk && preservationOk && terminationOk && monitorOk &&
           useSetShrankOk && storeMonotonicOk;
  }
};

/// Drives the evaluator step by step over a closed, well-typed program:
///  - preservation: each configuration re-types below the original type,
///    with its use-set subcaptured by the original one;
///  - progress: no intermediate configuration is stuck;
///  - termination: an answer is reached within the fuel;
///  - capture monitor: every location the machine looks up is subcaptured
///    (as a singleton) by the current configuration's synthesized use-set.
SoundnessReport checkSoundness(const TermPtr& program, uint32_t fuel,
                               const std::string& programId = "");

std::string reportToJson(const SoundnessReport& report);

// --- generator ------------------------------------------------------------------

/// Deterministic well-typed program generator: builds let spines whose
/// bounds are values, renames, applications of earlier bindings, and packs
/// under existential lets, always ending in a binder-avoiding answer.
/// Every emitted term satisfies typeSynth on the empty context.
TermPtr genWellTyped(uint64_t seed, uint32_t sizeBudget);

/// Closed answers (values and location references) for inertness tests.
TermPtr genAnswer(uint64_t seed);

}  // namespace capless::harness
