#include "s4sem/interp.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace s4sem {

namespace {

template <class T>
Partial<T> undefined(std::string reason, std::vector<std::string> ext = {}) {
  Partial<T> p;
  p.reason = std::move(reason);
  p.extensions = std::move(ext);
  return p;
}

template <class T>
Partial<T> defined(T value, std::vector<std::string> ext = {}) {
  Partial<T> p;
  p.value = std::move(value);
  p.extensions = std::move(ext);
  return p;
}

void add_ext(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& e : from)
    if (std::find(into.begin(), into.end(), e) == into.end()) into.push_back(e);
}

std::string key(const Telescope& t) { return "[" + print(t) + "]"; }

}  // namespace

Interpretation::Interpretation(ComonadPtr w, Signature sig, SemanticSignature sem)
    : w_(std::move(w)),
      checker_(std::move(sig)),
      sem_(std::move(sem)),
      terminal_(terminal_coalgebra(*w_)) {}

void Interpretation::clear_cache() {
  contexts_.clear();
  types_.clear();
}

Partial<Coalgebra> Interpretation::modal_context(const std::vector<Entry>& delta) {
  auto c = context(Telescope{delta, {}});
  if (!c.defined()) return undefined<Coalgebra>(c.reason, c.extensions);
  return defined(c->modal, c.extensions);
}

Partial<SemanticContext> Interpretation::context(const Telescope& t) {
  std::string k = key(t);
  auto it = contexts_.find(k);
  if (it != contexts_.end()) return it->second;
  auto r = context_uncached(t);
  contexts_.emplace(k, r);
  return r;
}

Partial<SemanticContext> Interpretation::context_uncached(const Telescope& t) {
  try {
    if (!t.ordinary.empty()) {
      Telescope prefix{t.modal, {t.ordinary.begin(), t.ordinary.end() - 1}};
      auto p = context(prefix);
      if (!p.defined()) return p;
      auto b = type(prefix, t.ordinary.back().type);
      if (!b.defined()) return undefined<SemanticContext>(b.reason, b.extensions);
      SemanticContext out = *p;
      out.tele = t;
      Comprehension comp = comprehension(*b);
      out.object = comp.object;
      out.to_modal = compose(p->to_modal, comp.proj);
      out.ordinary_steps.push_back(std::move(comp));
      auto ext = p.extensions;
      add_ext(ext, b.extensions);
      return defined(std::move(out), ext);
    }
    if (!t.modal.empty()) {
      Telescope prefix{{t.modal.begin(), t.modal.end() - 1}, {}};
      auto p = context(prefix);
      if (!p.defined()) return p;
      auto a = type(prefix, t.modal.back().type);
      if (!a.defined()) return undefined<SemanticContext>(a.reason, a.extensions);
      SemanticContext out = *p;
      out.tele = t;
      CoalgebraType f = induced_right_adjoint(w_, p->modal, *a);
      out.modal = coalgebra_comprehension(w_, f);
      out.object = out.modal.carrier;
      out.modal_steps.push_back(comprehension(f.type));
      out.modal_types.push_back(std::move(f));
      out.modal_prefixes.push_back(out.modal);
      out.to_modal = identity_map(out.object);
      auto ext = p.extensions;
      add_ext(ext, a.extensions);
      return defined(std::move(out), ext);
    }
    SemanticContext out;
    out.modal = terminal_;
    out.object = terminal_.carrier;
    out.modal_prefixes = {terminal_};
    out.to_modal = identity_map(out.object);
    return defined(std::move(out));
  } catch (const Error& e) {
    return undefined<SemanticContext>(std::string("context ") + print(t) + ": " + e.what());
  }
}

PresheafMap Interpretation::modal_projection(const SemanticContext& c, std::size_t n) const {
  PresheafMap acc = c.to_modal;
  for (std::size_t j = c.modal_steps.size(); j-- > n;) acc = compose(c.modal_steps[j].proj, acc);
  return acc;
}

PresheafMap Interpretation::ordinary_projection(const SemanticContext& c, std::size_t n) const {
  PresheafMap acc = identity_map(c.object);
  for (std::size_t i = c.ordinary_steps.size(); i-- > n;)
    acc = compose(c.ordinary_steps[i].proj, acc);
  return acc;
}

Partial<TypePtr> Interpretation::type(const Telescope& t, const Ty& b) {
  std::string k = key(t) + print(b);
  auto it = types_.find(k);
  if (it != types_.end()) return it->second;
  auto r = type_uncached(t, b);
  types_.emplace(k, r);
  return r;
}

Partial<TypePtr> Interpretation::type_uncached(const Telescope& t, const Ty& b) {
  auto c = context(t);
  if (!c.defined()) return undefined<TypePtr>(c.reason, c.extensions);
  try {
    if (b->kind == TypeExpr::Kind::Base) {
      auto q = sem_.types.find(b->name);
      if (q == sem_.types.end())
        return undefined<TypePtr>("no interpretation for base type " + b->name, c.extensions);
      return defined(constant_type(c->object, q->second), c.extensions);
    }
    if (t.ordinary.empty()) {
      auto inner = type(t, b->inner);
      if (!inner.defined()) return inner;
      auto ext = c.extensions;
      add_ext(ext, inner.extensions);
      return defined(InducedComonad(w_, c->modal).apply(*inner), ext);
    }
    auto boxed = type(t.modal_only(), b);
    if (!boxed.defined()) return boxed;
    auto ext = c.extensions;
    add_ext(ext, boxed.extensions);
    add_ext(ext, {"weakening: □-Form under an ordinary context"});
    return defined(subst(*boxed, c->to_modal), ext);
  } catch (const Error& e) {
    return undefined<TypePtr>("type " + print(b) + ": " + e.what(), c.extensions);
  }
}

Partial<TermOverContext> Interpretation::term(const Telescope& t, const Tm& tm) {
  try {
    return term_impl(t, tm);
  } catch (const Error& e) {
    return undefined<TermOverContext>("term " + print(tm) + ": " + e.what());
  }
}

Partial<TermOverContext> Interpretation::term_impl(const Telescope& t, const Tm& tm) {
  auto c = context(t);
  if (!c.defined()) return undefined<TermOverContext>(c.reason, c.extensions);
  auto ext = c.extensions;
  auto fail = [&](const std::string& why) { return undefined<TermOverContext>(why, ext); };
  auto done = [&](TermOverContext v) { return defined(std::move(v), ext); };
  auto absorb = [&](const auto& p) { add_ext(ext, p.extensions); };

  switch (tm->kind) {
    case TermExpr::Kind::Var: {
      const std::string& n = tm->name;
      for (std::size_t i = 0; i < t.ordinary.size(); ++i) {
        if (t.ordinary[i].name != n) continue;
        const TermOverContext& v = c->ordinary_steps[i].generic;
        if (i + 1 == t.ordinary.size()) return done(v);
        add_ext(ext, {"weakening: ordinary variable"});
        return done(subst(v, ordinary_projection(*c, i + 1)));
      }
      for (std::size_t j = 0; j < t.modal.size(); ++j) {
        if (t.modal[j].name != n) continue;
        Telescope prefix{{t.modal.begin(), t.modal.begin() + static_cast<long>(j)}, {}};
        auto a = type(prefix, t.modal[j].type);
        if (!a.defined()) return fail(a.reason);
        absorb(a);
        // (ε at ⟦A⟧)[U p_𝔽] applied to U v_𝔽
        TypeMap eps = InducedComonad(w_, c->modal_prefixes[j]).counit(*a);
        const Comprehension& step = c->modal_steps[j];
        if (!(*eps.source == *c->modal_types[j].type))
          return fail("𝔽" + print(t.modal[j].type) + " is not 𝔹" + print(t.modal[j].type));
        TermOverContext v = apply(subst(eps, step.proj), step.generic);
        if (j + 1 == t.modal.size() && t.ordinary.empty()) return done(v);
        add_ext(ext, {"weakening: modal variable"});
        return done(subst(v, modal_projection(*c, j + 1)));
      }
      auto pick = sem_.constants.find(n);
      const Entry* decl = checker_.signature().constant(n);
      if (pick == sem_.constants.end() || !decl) return fail("unbound name " + n);
      auto a = type({}, decl->type);
      if (!a.defined()) return fail(a.reason);
      TermOverContext global{*a, pick->second};
      return done(subst(global, modal_projection(*c, 0)));
    }
    case TermExpr::Kind::Shut: {
      if (!t.ordinary.empty()) {
        auto boxed = term(t.modal_only(), tm);
        if (!boxed.defined()) return fail(boxed.reason);
        absorb(boxed);
        add_ext(ext, {"weakening: □-Intro under an ordinary context"});
        return done(subst(*boxed, c->to_modal));
      }
      auto inner = term(t, tm->first);
      if (!inner.defined()) return fail(inner.reason);
      absorb(inner);
      return done(InducedComonad(w_, c->modal).apply(*inner));
    }
    case TermExpr::Kind::LetBox: {
      Derivation d;
      try {
        d = checker_.infer(t, tm);
      } catch (const CheckError& e) {
        return fail(std::string("let is ill-typed: ") + e.what());
      }
      const Tm& let = d.judgment.term;
      const Ty a = d.premises[1].judgment.type->inner;
      auto s = term(t, let->first);
      if (!s.defined()) return fail(s.reason);
      absorb(s);
      Telescope tu = t;
      tu.modal.push_back({let->name, a});
      auto body = term(tu, let->second);
      if (!body.defined()) return fail(body.reason);
      absorb(body);
      auto cu = context(tu);
      if (!cu.defined()) return fail(cu.reason);
      if (t.ordinary.empty()) return done(subst(*body, bar(*s)));
      // γ = (δ, g₁, …, gₙ) ↦ ((δ, s(γ)), g₁, …, gₙ)
      add_ext(ext, {"let under an ordinary context"});
      const Comprehension& mstep = cu->modal_steps.back();
      PresheafMap sigma{c->object, cu->object, {}};
      std::size_t n = t.ordinary.size();
      for (std::size_t i = 0; i < c->object->sizes.size(); ++i) {
        int o = static_cast<int>(i);
        std::vector<int> comp;
        for (int e = 0; e < c->object->size(o); ++e) {
          std::vector<int> gs(n);
          int cur = e;
          for (std::size_t k = n; k-- > 0;) {
            auto [prev, g] = c->ordinary_steps[k].element(o, cur);
            gs[k] = g;
            cur = prev;
          }
          int val = s->pick[i][e];
          if (val >= mstep.type->size(o, cur)) return fail("scrutinee leaves the fiber of 𝔹A");
          int img = mstep.index(o, cur, val);
          for (std::size_t k = 0; k < n; ++k) {
            const Comprehension& st = cu->ordinary_steps[k];
            if (gs[k] >= st.type->size(o, img))
              return fail("ordinary fibers differ after inserting u");
            img = st.index(o, img, gs[k]);
          }
          comp.push_back(img);
        }
        sigma.components.push_back(std::move(comp));
      }
      if (!validate_map(sigma).ok()) return fail("the substitution for u is not natural");
      return done(subst(*body, sigma));
    }
  }
  return fail("unknown term");
}

std::vector<SemanticSignature> valuations(const ComonadPtr& w, const Signature& sig, int bound,
                                          const Ceiling& ceiling) {
  std::vector<PresheafPtr> carriers;
  for (auto& p : enumerate_presheaves(w->base(), bound, ceiling)) carriers.push_back(share(std::move(p)));
  std::vector<SemanticSignature> out;
  std::vector<std::size_t> choice(sig.types.size(), 0);
  std::function<void(std::size_t, SemanticSignature&)> types = [&](std::size_t i,
                                                                   SemanticSignature& s) {
    if (i < sig.types.size()) {
      for (const auto& q : carriers) {
        s.types[sig.types[i]] = q;
        types(i + 1, s);
      }
      return;
    }
    Interpretation probe(w, sig, s);
    std::vector<std::vector<TermOverContext>> globals;
    for (const auto& c : sig.constants) {
      auto a = probe.type({}, c.type);
      if (!a.defined()) return;
      globals.push_back(enumerate_terms(*a, ceiling));
      if (globals.back().empty()) return;
    }
    std::function<void(std::size_t, SemanticSignature&)> consts = [&](std::size_t j,
                                                                      SemanticSignature& v) {
      if (j == sig.constants.size()) {
        ceiling.check(static_cast<long long>(out.size()) + 1, "valuations");
        out.push_back(v);
        return;
      }
      for (const auto& g : globals[j]) {
        v.constants[sig.constants[j].name] = g.pick;
        consts(j + 1, v);
      }
    };
    SemanticSignature v = s;
    consts(0, v);
  };
  SemanticSignature s;
  types(0, s);
  return out;
}

bool SoundnessReport::ok() const { return failures() == 0; }

std::size_t SoundnessReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.ok ? 0 : 1;
  return n;
}

std::size_t SoundnessReport::count(const std::string& clause) const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.clause == clause ? 1 : 0;
  return n;
}

std::size_t SoundnessReport::extended() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.extensions.empty() ? 0 : 1;
  return n;
}

SoundnessReport soundness_harness(const ModuleResult& checked, Interpretation& interp) {
  SoundnessReport rep;
  std::set<std::string> seen;
  auto record = [&](const std::string& clause, const Judgment& j, bool ok, std::string witness,
                    std::vector<std::string> ext) {
    rep.records.push_back({clause, print(j), ok, ok ? std::string() : std::move(witness),
                           std::move(ext)});
  };
  std::function<void(const Derivation&)> visit = [&](const Derivation& d) {
    for (const auto& p : d.premises) visit(p);
    const Judgment& j = d.judgment;
    if (!seen.insert(print(j)).second) return;
    switch (j.kind) {
      case Judgment::Kind::ModalContext: {
        auto r = interp.modal_context(j.tele.modal);
        bool ok = r.defined() && validate_coalgebra(interp.comonad(), *r).ok();
        record("modal context", j, ok, r.defined() ? "not a coalgebra" : r.reason, r.extensions);
        break;
      }
      case Judgment::Kind::Context: {
        auto r = interp.context(j.tele);
        bool ok = r.defined() && validate_presheaf(*r->object).ok();
        record("context", j, ok, r.defined() ? "not a presheaf" : r.reason, r.extensions);
        break;
      }
      case Judgment::Kind::Type: {
        auto c = interp.context(j.tele);
        auto r = interp.type(j.tele, j.type);
        bool ok = c.defined() && r.defined() && validate_type(**r).ok() &&
                  *(*r)->context == *c->object;
        record("type", j, ok, r.defined() ? "not a type over the context" : r.reason,
               r.extensions);
        break;
      }
      case Judgment::Kind::Term: {
        auto c = interp.context(j.tele);
        auto r = interp.term(j.tele, j.term);
        auto b = interp.type(j.tele, j.type);
        bool ok = c.defined() && r.defined() && validate_term(*r).ok() &&
                  *r->type->context == *c->object;
        record("term", j, ok, r.defined() ? "not a term over the context" : r.reason,
               r.extensions);
        bool eq = ok && b.defined() && *r->type == **b;
        std::string why = !r.defined() ? r.reason : !b.defined() ? b.reason : "p∘⟦t⟧ differs from ⟦B⟧";
        record("typing equation", j, eq, why, r.defined() ? r.extensions : b.extensions);
        break;
      }
      case Judgment::Kind::TermEq: {
        auto l = interp.term(j.tele, j.term);
        auto r = interp.term(j.tele, j.term2);
        bool ok = l.defined() && r.defined() && *l == *r;
        std::string why = !l.defined() ? l.reason : !r.defined() ? r.reason : "interpretations differ";
        auto ext = l.extensions;
        add_ext(ext, r.extensions);
        record("term equality", j, ok, why, ext);
        break;
      }
    }
  };
  for (const auto& res : checked.results)
    if (res.derivation) visit(*res.derivation);
  return rep;
}

}  // namespace s4sem
