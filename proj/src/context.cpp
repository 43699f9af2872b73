#include "capless/context.hpp"

namespace capless {

namespace {

// Per-namespace binding counts in the suffix [pos, end); an annotation
// written at position pos must be displaced by these to live in the full
// context.
struct SuffixCounts {
  int term = 0, type = 0, capt = 0;
};

SuffixCounts suffixCounts(const std::vector<ContextBinding>& bindings, size_t pos) {
  SuffixCounts s;
  for (size_t i = pos; i < bindings.size(); ++i) {
    if (std::holds_alternative<TermBind>(bindings[i])) ++s.term;
    else if (std::holds_alternative<TypeBind>(bindings[i])) ++s.type;
    else ++s.capt;
  }
  return s;
}

template <class T>
T shiftBySuffix(const T& subject, const SuffixCounts& s) {
  T out = subject;
  if (s.term) out = shift(out, Ns::Term, s.term);
  if (s.type) out = shift(out, Ns::Type, s.type);
  if (s.capt) out = shift(out, Ns::Capt, s.capt);
  return out;
}

}  // namespace

TypeContext TypeContext::pushTerm(Type t) const {
  TypeContext out = *this;
  out.bindings_.push_back(TermBind{std::move(t)});
  ++out.counts_[0];
  return out;
}

TypeContext TypeContext::pushType(ShapePtr bound) const {
  TypeContext out = *this;
  out.bindings_.push_back(TypeBind{std::move(bound)});
  ++out.counts_[1];
  return out;
}

TypeContext TypeContext::pushCapt(Bound bound) const {
  TypeContext out = *this;
  out.bindings_.push_back(CaptBind{std::move(bound)});
  ++out.counts_[2];
  return out;
}

TypeContext TypeContext::withLocation(uint32_t loc, Type t) const {
  TypeContext out = *this;
  out.locations_[loc] = std::move(t);
  return out;
}

namespace {
// Position of the idx-th most recent binding matching the predicate.
template <class Pred>
std::optional<size_t> findBinding(const std::vector<ContextBinding>& bs, uint32_t idx, Pred pred) {
  uint32_t seen = 0;
  for (size_t i = bs.size(); i-- > 0;) {
    if (pred(bs[i])) {
      if (seen == idx) return i;
      ++seen;
    }
  }
  return std::nullopt;
}
}  // namespace

std::optional<Type> TypeContext::lookupTerm(uint32_t idx) const {
  auto pos = findBinding(bindings_, idx,
                         [](const ContextBinding& b) { return std::holds_alternative<TermBind>(b); });
  if (!pos) return std::nullopt;
  return shiftBySuffix(std::get<TermBind>(bindings_[*pos]).type, suffixCounts(bindings_, *pos));
}

std::optional<ShapePtr> TypeContext::lookupTypeBound(uint32_t idx) const {
  auto pos = findBinding(bindings_, idx,
                         [](const ContextBinding& b) { return std::holds_alternative<TypeBind>(b); });
  if (!pos) return std::nullopt;
  return shiftBySuffix(std::get<TypeBind>(bindings_[*pos]).bound, suffixCounts(bindings_, *pos));
}

std::optional<Bound> TypeContext::lookupCaptBound(uint32_t idx) const {
  auto pos = findBinding(bindings_, idx,
                         [](const ContextBinding& b) { return std::holds_alternative<CaptBind>(b); });
  if (!pos) return std::nullopt;
  return shiftBySuffix(std::get<CaptBind>(bindings_[*pos]).bound, suffixCounts(bindings_, *pos));
}

std::optional<Type> TypeContext::lookupLocation(uint32_t loc) const {
  auto it = locations_.find(loc);
  if (it == locations_.end()) return std::nullopt;
  return it->second;
}

std::optional<Type> TypeContext::lookupRef(Ref r) const {
  return r.isVar() ? lookupTerm(r.index) : lookupLocation(r.index);
}

}  // namespace capless
