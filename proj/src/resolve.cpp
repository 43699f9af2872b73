// Name resolution: surface trees to de Bruijn core. One scope holds all
// three namespaces; a use resolves to the innermost binder with the same
// name and must agree with it in kind. Each produced core term node is
// recorded in a span index for later diagnostics.

#include "capless/surface.hpp"

namespace capless::surface {

namespace {

class Resolver {
 public:
  ResolveResult run(const SurfaceProgram& sp) {
    // def declarations desugar to a chain of lets around the main term
    std::vector<TermPtr> bounds;
    for (const auto& d : sp.decls) {
      bounds.push_back(term(*d.value));
      scope_.emplace_back(d.name.text, Ns::Term);
    }
    TermPtr core = term(*sp.main);
    for (size_t i = sp.decls.size(); i-- > 0;) {
      scope_.pop_back();
      core = termLet(bounds[i], core);
      note(core, sp.decls[i].name.span);
    }
    ResolveResult result;
    result.diagnostics = std::move(diags_);
    if (result.diagnostics.empty()) {
      result.term = core;
      result.spans = std::move(spans_);
    }
    return result;
  }

 private:
  std::vector<std::pair<std::string, Ns>> scope_;  // innermost last
  std::vector<Diagnostic> diags_;
  SpanIndex spans_;

  void fail(DiagCode code, std::string message, Span span) {
    diags_.push_back(Diagnostic::error(code, std::move(message), span));
  }

  void note(const TermPtr& t, Span span) { spans_[t.get()] = span; }

  struct Hit {
    Ns ns;
    uint32_t index;
  };

  std::optional<Hit> lookup(const std::string& name) const {
    uint32_t counts[3] = {0, 0, 0};
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return Hit{it->second, counts[static_cast<int>(it->second)]};
      ++counts[static_cast<int>(it->second)];
    }
    return std::nullopt;
  }

  static const char* nsName(Ns ns) {
    switch (ns) {
      case Ns::Term: return "term";
      case Ns::Type: return "type";
      case Ns::Capt: return "capture";
    }
    return "?";
  }

  Ref termRef(const Ident& id) {
    auto hit = lookup(id.text);
    if (!hit) {
      fail(DiagCode::UnboundVariable, "unbound variable `" + id.text + "`", id.span);
      return Ref::var(0);
    }
    if (hit->ns != Ns::Term) {
      fail(DiagCode::KindMismatch,
           "`" + id.text + "` is a " + std::string(nsName(hit->ns)) +
               " variable but a term variable is required here",
           id.span);
      return Ref::var(0);
    }
    return Ref::var(hit->index);
  }

  uint32_t typeRef(const Ident& id) {
    auto hit = lookup(id.text);
    if (!hit) {
      fail(DiagCode::UnboundVariable, "unbound type variable `" + id.text + "`", id.span);
      return 0;
    }
    if (hit->ns != Ns::Type) {
      fail(DiagCode::KindMismatch,
           "`" + id.text + "` is a " + std::string(nsName(hit->ns)) +
               " variable but a type variable is required here",
           id.span);
      return 0;
    }
    return hit->index;
  }

  CaptureSet captset(const SCaptSet& cs) {
    CaptureSet out;
    for (const auto& id : cs.atoms) {
      if (id.upper()) {
        fail(DiagCode::KindMismatch,
             "type variable `" + id.text + "` cannot appear in a capture set", id.span);
        continue;
      }
      auto hit = lookup(id.text);
      if (!hit) {
        fail(DiagCode::UnboundVariable, "unbound variable `" + id.text + "` in capture set",
             id.span);
        continue;
      }
      if (hit->ns == Ns::Term) {
        out.insert(Capture::termVar(hit->index));
      } else if (hit->ns == Ns::Capt) {
        out.insert(Capture::captVar(hit->index));
      } else {
        fail(DiagCode::KindMismatch,
             "`" + id.text + "` names a type binder; capture sets hold term or capture variables",
             id.span);
      }
    }
    return out;
  }

  Bound boundOf(const SBound& b) {
    if (b.star) return Bound::star();
    return Bound::set(captset(b.set));
  }

  Type type(const SType& t) {
    ShapePtr s = shape(*t.shape);
    CaptureSet cs = t.captures ? captset(*t.captures) : CaptureSet{};
    return typed(std::move(s), std::move(cs));
  }

  ExistType etype(const SEType& e) {
    if (e.binder) {
      scope_.emplace_back(e.binder->text, Ns::Capt);
      Type t = type(e.type);
      scope_.pop_back();
      return exists(std::move(t));
    }
    return plain(type(e.type));
  }

  ShapePtr shape(const SShape& s) {
    using SS = SShape;
    return std::visit(
        Overloaded{
            [&](const SS::Top&) { return top(); },
            [&](const SS::Var& v) { return typeVar(typeRef(v.name)); },
            [&](const SS::FunDep& f) {
              Type pt = type(f.paramType);
              scope_.emplace_back(f.param.text, Ns::Term);
              ExistType res = etype(f.result);
              scope_.pop_back();
              return funDep(std::move(pt), std::move(res));
            },
            [&](const SS::FunTyp& f) {
              ShapePtr b = shape(*f.bound);
              scope_.emplace_back(f.param.text, Ns::Type);
              ExistType res = etype(f.result);
              scope_.pop_back();
              return funTyp(std::move(b), std::move(res));
            },
            [&](const SS::FunCap& f) {
              Bound b = boundOf(f.bound);
              scope_.emplace_back(f.param.text, Ns::Capt);
              ExistType res = etype(f.result);
              scope_.pop_back();
              return funCap(std::move(b), std::move(res));
            },
        },
        s.node);
  }

  Value value(const SValue& v) {
    using SV = SValue;
    return std::visit(
        Overloaded{
            [&](const SV::Lam& l) {
              Type pt = type(l.paramType);
              scope_.emplace_back(l.param.text, Ns::Term);
              TermPtr body = term(*l.body);
              scope_.pop_back();
              return lam(std::move(pt), std::move(body));
            },
            [&](const SV::TLam& l) {
              ShapePtr b = shape(*l.bound);
              scope_.emplace_back(l.param.text, Ns::Type);
              TermPtr body = term(*l.body);
              scope_.pop_back();
              return tlam(std::move(b), std::move(body));
            },
            [&](const SV::CLam& l) {
              Bound b = boundOf(l.bound);
              scope_.emplace_back(l.param.text, Ns::Capt);
              TermPtr body = term(*l.body);
              scope_.pop_back();
              return clam(std::move(b), std::move(body));
            },
            [&](const SV::Pack& p) { return pack(captset(p.captures), termRef(p.ref)); },
        },
        v.node);
  }

  TermPtr term(const STerm& t) {
    using ST = STerm;
    TermPtr out = std::visit(
        Overloaded{
            [&](const ST::Var& v) { return termVar(termRef(v.name)); },
            [&](const ST::Val& v) { return termVal(value(v.value)); },
            [&](const ST::App& a) { return termApp(termRef(a.fn), termRef(a.arg)); },
            [&](const ST::TApp& a) { return termTApp(termRef(a.fn), shape(*a.arg)); },
            [&](const ST::CApp& a) { return termCApp(termRef(a.fn), captset(a.arg)); },
            [&](const ST::Let& l) {
              TermPtr bound = term(*l.bound);
              scope_.emplace_back(l.binder.text, Ns::Term);
              TermPtr body = term(*l.body);
              scope_.pop_back();
              return termLet(std::move(bound), std::move(body));
            },
            [&](const ST::LetEx& l) {
              TermPtr bound = term(*l.bound);
              // capture binder outermost, term binder innermost
              scope_.emplace_back(l.captBinder.text, Ns::Capt);
              scope_.emplace_back(l.termBinder.text, Ns::Term);
              TermPtr body = term(*l.body);
              scope_.pop_back();
              scope_.pop_back();
              return termLetEx(std::move(bound), std::move(body));
            },
        },
        t.node);
    note(out, t.span);
    return out;
  }
};

}  // namespace

ResolveResult resolve(const SurfaceProgram& program) { return Resolver{}.run(program); }

ResolveResult load(const std::string& text) {
  auto parsed = parse(text);
  if (!parsed.ok()) {
    ResolveResult out;
    out.diagnostics = std::move(parsed.diagnostics);
    return out;
  }
  auto resolved = resolve(*parsed.program);
  attachExcerpts(resolved.diagnostics, text);
  return resolved;
}

}  // namespace capless::surface
