// Well-formedness, algorithmic subcapturing, bound subtyping, subtyping,
// and use-set-synthesizing typing.
//
// The typing judgement synthesized here is C;G |- t : E where C is the
// use-set of the term: an over-approximation of the capabilities the term
// may use while evaluating to an answer. Subsumption is not a standing
// rule; it is folded into checkAgainst and into type-variable promotion at
// elimination forms, so synthesis always returns the minimal use-set and a
// minimal type.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "capless/context.hpp"
#include "capless/diagnostics.hpp"
#include "capless/syntax.hpp"

namespace capless {

/// Names of the declarative rules an algorithmic run corresponds to,
/// grouped per judgement. Collected on successful derivations only.
struct RuleCoverage {
  std::set<std::string> typing;
  std::set<std::string> subcapture;
  std::set<std::string> subtype;

  void merge(const RuleCoverage& other);
};

/// One node of a derivation trace: the rule applied, the synthesized
/// use-set and type, and the binder depths (for rendering names).
struct TraceNode {
  std::string rule;
  CaptureSet useSet;
  std::optional<ExistType> type;
  uint32_t termDepth = 0, typeDepth = 0, captDepth = 0;
  std::vector<TraceNode> children;
};

struct TypingResult {
  CaptureSet useSet;
  ExistType type;
  TraceNode trace;
};

using SpanIndex = std::map<const Term*, Span>;

struct CheckOptions {
  bool collectTrace = false;
  const SpanIndex* spans = nullptr;  // source positions for diagnostics
};

struct CheckOutcome {
  std::optional<TypingResult> result;
  std::vector<Diagnostic> diagnostics;
  RuleCoverage coverage;

  bool ok() const { return result.has_value(); }
};

// --- well-formedness: scoping with namespace-kind agreement ---------------

bool wfCaptureSet(const TypeContext& ctx, const CaptureSet& cs);
bool wfBound(const TypeContext& ctx, const Bound& b);
bool wfShape(const TypeContext& ctx, const ShapePtr& s);
bool wfType(const TypeContext& ctx, const Type& t);
bool wfExist(const TypeContext& ctx, const ExistType& e);
bool wfContext(const TypeContext& ctx);

// --- subcapturing and subtyping --------------------------------------------
// Precondition: both sides well-formed in ctx. Decision procedures; the
// declarative-search oracles in the harness validate them exhaustively.

/// True iff C1 <: C2: computes the upward closure of C2 under variable and
/// location bounds by fixpoint iteration and tests inclusion.
bool subcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2);

/// B2 = * accepts anything; two sets compare by subcapturing.
bool subBound(const TypeContext& ctx, const Bound& b1, const Bound& b2);

bool subType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2);
bool subType(const TypeContext& ctx, const Type& t1, const Type& t2);
bool subType(const TypeContext& ctx, const ShapePtr& s1, const ShapePtr& s2);

/// Coverage-labelling variants: record which declarative rules justify a
/// successful check (callable only when the plain check returned true).
void labelSubcapture(const TypeContext& ctx, const CaptureSet& c1, const CaptureSet& c2,
                     RuleCoverage& cov);
void labelSubType(const TypeContext& ctx, const ExistType& e1, const ExistType& e2,
                  RuleCoverage& cov);

// --- typing -----------------------------------------------------------------

/// Synthesizes the minimal use-set and type of t in ctx.
CheckOutcome typeSynth(const TypeContext& ctx, const TermPtr& t, const CheckOptions& opts = {});

/// Checking mode: packs check against an expected existential; everything
/// else synthesizes and then requires the synthesized type below `expected`.
CheckOutcome checkAgainst(const TypeContext& ctx, const TermPtr& t, const ExistType& expected,
                          const CheckOptions& opts = {});

}  // namespace capless
