// Small-step machine for configurations <Sigma | t>: evaluation-context
// decomposition, the six reduction rules (apply, tapply, capply, rename,
// rename-e, lift), and a fuel-bounded driver with an instrumented lookup log.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "capless/syntax.hpp"

namespace capless {

/// Runtime heap: append-only value bindings addressed by location.
class Store {
 public:
  uint32_t alloc(Value v) {
    uint32_t loc = next_++;
    values_.emplace(loc, std::move(v));
    return loc;
  }
  const Value* lookup(uint32_t loc) const {
    auto it = values_.find(loc);
    return it == values_.end() ? nullptr : &it->second;
  }
  size_t size() const { return values_.size(); }
  const std::map<uint32_t, Value>& bindings() const { return values_; }
  uint32_t nextLocation() const { return next_; }

 private:
  std::map<uint32_t, Value> values_;
  uint32_t next_ = 0;
};

struct Config {
  Store store;
  TermPtr term;
};

/// One frame of the evaluation context Psi, outermost first: the body of a
/// let (or existential let) whose bound term is in focus.
struct Frame {
  enum class Kind : uint8_t { Let, LetEx };
  Kind kind;
  TermPtr body;
};

using EvalContext = std::vector<Frame>;

struct Decomposition {
  EvalContext frames;
  TermPtr redex;  // App/TApp/CApp, or a Let/LetEx whose bound is an answer
};

/// Unique decomposition t = Psi[redex], or nullopt when t is an answer.
std::optional<Decomposition> decompose(const TermPtr& t);

/// Inverse of decompose: wraps the term back into the frames.
TermPtr plug(const EvalContext& frames, TermPtr t);

enum class StuckReason {
  UnboundLocation,    // application head is a missing location or a bare variable
  NotAFunction,       // stored value has the wrong lambda kind for the form
  PackShapeMismatch,  // existential-let bound answer is not a pack
};

const char* stuckReasonName(StuckReason r);

struct Stepped {
  Config next;
  std::string rule;               // apply | tapply | capply | rename | rename-e | lift
  std::vector<uint32_t> lookups;  // store locations resolved by the rule
};
struct AnswerReached {
  Answer answer;
};
struct Stuck {
  StuckReason reason;
  std::string detail;
};

using StepOutcome = std::variant<Stepped, AnswerReached, Stuck>;

/// Fires the unique applicable rule, if any. Deterministic: at most one
/// rule matches any decomposed focus.
StepOutcome stepOnce(const Config& c);

struct StepRecord {
  std::string rule;
  std::vector<uint32_t> lookups;
  TermPtr focus;  // the redex before the step
};

struct RunResult {
  enum class Status { Answer, Stuck, FuelExhausted };
  Status status;
  std::optional<Answer> answer;
  std::optional<Stuck> stuck;
  Config final;
  std::vector<StepRecord> steps;
};

/// Iterates stepOnce up to `fuel` times, collecting the step trace.
RunResult run(Config c, uint32_t fuel);

}  // namespace capless
