// Typing contexts: ordered term/type/capture bindings plus an optional
// location typing for runtime configurations.

#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "capless/syntax.hpp"

namespace capless {

struct TermBind {
  Type type;
};
struct TypeBind {
  ShapePtr bound;
};
struct CaptBind {
  Bound bound;
};

using ContextBinding = std::variant<TermBind, TypeBind, CaptBind>;

/// Gamma: an ordered sequence of bindings, innermost last. Lookups return
/// annotations shifted into the full context. Locations are typed by a
/// side map whose annotations are index-closed (they may mention only
/// locations), so they need no shifting.
class TypeContext {
 public:
  TypeContext() = default;

  TypeContext pushTerm(Type t) const;
  TypeContext pushType(ShapePtr bound) const;
  TypeContext pushCapt(Bound bound) const;
  TypeContext withLocation(uint32_t loc, Type t) const;

  size_t size() const { return bindings_.size(); }
  uint32_t termCount() const { return counts_[0]; }
  uint32_t typeCount() const { return counts_[1]; }
  uint32_t captCount() const { return counts_[2]; }

  /// Annotation of the idx-th most recent term binding, shifted into the
  /// full context, or nullopt when out of range.
  std::optional<Type> lookupTerm(uint32_t idx) const;
  std::optional<ShapePtr> lookupTypeBound(uint32_t idx) const;
  std::optional<Bound> lookupCaptBound(uint32_t idx) const;
  std::optional<Type> lookupLocation(uint32_t loc) const;
  bool hasLocation(uint32_t loc) const { return locations_.count(loc) > 0; }

  /// Uniform lookup of a reference's type: variable or location.
  std::optional<Type> lookupRef(Ref r) const;

  const std::vector<ContextBinding>& bindings() const { return bindings_; }
  const std::map<uint32_t, Type>& locations() const { return locations_; }

 private:
  std::vector<ContextBinding> bindings_;  // innermost last
  std::map<uint32_t, Type> locations_;
  uint32_t counts_[3] = {0, 0, 0};  // term, type, capture
};

}  // namespace capless
