#include "s4sem/coalg.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace s4sem {

namespace {

bool same(const PresheafMap& a, const PresheafMap& b) { return a.components == b.components; }

bool same(const TypeMap& a, const TypeMap& b) {
  return a.fn == b.fn && *a.source == *b.source && *a.target == *b.target;
}

// Reads a map Γ.A → Γ.B over Γ as a type map A → B.
TypeMap as_type_map(const TypePtr& a, const TypePtr& b, const PresheafMap& f) {
  Comprehension ca = comprehension_shape(a), cb = comprehension_shape(b);
  TypeMap out{a, b, {}};
  for (std::size_t i = 0; i < a->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::vector<std::vector<int>> row;
    for (std::size_t g = 0; g < a->fiber[i].size(); ++g) {
      std::vector<int> fn;
      for (int x = 0; x < a->fiber[i][g]; ++x) {
        auto [g2, y] = cb.element(o, f(o, ca.index(o, static_cast<int>(g), x)));
        if (g2 != static_cast<int>(g))
          throw Error(ErrorKind::Rejected, "map of comprehensions is not over the context");
        fn.push_back(y);
      }
      row.push_back(std::move(fn));
    }
    out.fn.push_back(std::move(row));
  }
  return out;
}

// Preimage table of an injective map, -1 where nothing maps.
std::vector<std::vector<int>> preimages(const PresheafMap& m) {
  std::vector<std::vector<int>> pre(m.components.size());
  for (std::size_t o = 0; o < m.components.size(); ++o) {
    pre[o].assign(m.target->size(static_cast<int>(o)), -1);
    for (std::size_t x = 0; x < m.components[o].size(); ++x)
      pre[o][m.components[o][x]] = static_cast<int>(x);
  }
  return pre;
}

// Factors m through an injective map, throwing when it does not land inside.
PresheafMap factor_through(const PresheafMap& m, const PresheafMap& mono, const char* what) {
  auto pre = preimages(mono);
  PresheafMap out{m.source, mono.source, {}};
  for (std::size_t o = 0; o < m.components.size(); ++o) {
    std::vector<int> comp;
    for (int v : m.components[o]) {
      if (pre[o][v] < 0) throw Error(ErrorKind::Rejected, what);
      comp.push_back(pre[o][v]);
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

// The sub-type of a on the members of `keep`, with its inclusion.
std::pair<TypePtr, TypeMap> subtype(const TypePtr& a,
                                    const std::vector<std::vector<std::vector<bool>>>& keep) {
  const FinCat& c = *a->context->base;
  std::vector<std::vector<std::vector<int>>> index(c.num_objects()), members(c.num_objects());
  TypeOverContext sub{a->context, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> row;
    for (int g = 0; g < a->context->size(i); ++g) {
      std::vector<int> idx(a->size(i, g), -1), mem;
      for (int x = 0; x < a->size(i, g); ++x)
        if (keep[i][g][x]) {
          idx[x] = static_cast<int>(mem.size());
          mem.push_back(x);
        }
      row.push_back(static_cast<int>(mem.size()));
      index[i].push_back(std::move(idx));
      members[i].push_back(std::move(mem));
    }
    sub.fiber.push_back(std::move(row));
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int i = c.dst(f);
    std::vector<std::vector<int>> row;
    for (int g = 0; g < a->context->size(i); ++g) {
      int h = a->context->act(f, g);
      std::vector<int> act;
      for (int x : members[i][g]) {
        int y = index[c.src(f)][h][a->act(f, g, x)];
        if (y < 0) throw Error(ErrorKind::Rejected, "subtype not closed under restriction");
        act.push_back(y);
      }
      row.push_back(std::move(act));
    }
    sub.restrict.push_back(std::move(row));
  }
  TypePtr s = share(std::move(sub));
  TypeMap incl{s, a, members};
  return {s, incl};
}

std::string describe_coalgebra(const Coalgebra& c) { return describe(*c.carrier); }

}  // namespace

// ---- comonads ----

TypePtr NaturalModelComonad::type_action(const TypePtr& a) const {
  return fiber_type(apply(comprehension_shape(a).proj));
}

PresheafMap NaturalModelComonad::tau(const TypePtr& a) const {
  return fiber_iso(apply(comprehension_shape(a).proj));
}

TermOverContext NaturalModelComonad::term_action(const TermOverContext& t) const {
  PresheafMap s = compose(tau(t.type), apply(bar(t)));
  return section_term(type_action(t.type), s);
}

AdjunctionComonad::AdjunctionComonad(std::shared_ptr<const KanAdjunction> adj)
    : adj_(std::move(adj)) {}

PresheafPtr AdjunctionComonad::apply(const PresheafPtr& p) const {
  return adj_->restrict(adj_->extend(p));
}

PresheafMap AdjunctionComonad::apply(const PresheafMap& m) const {
  return adj_->restrict(adj_->extend(m));
}

PresheafMap AdjunctionComonad::counit(const PresheafPtr& p) const { return adj_->counit(p); }

PresheafMap AdjunctionComonad::comult(const PresheafPtr& p) const {
  return adj_->restrict(adj_->unit(adj_->extend(p)));
}

std::string AdjunctionComonad::name() const {
  if (is_identity()) return "identity";
  return "u*u_* along " + std::to_string(adj_->small()->num_objects()) + " -> " +
         std::to_string(adj_->large()->num_objects()) + " objects";
}

TypePtr AdjunctionComonad::type_action_by_components(const TypePtr& a) const {
  TypePtr x = fiber_type(adj_->extend(comprehension_shape(a).proj));
  return fiber_type(adj_->restrict(comprehension_shape(x).proj));
}

Verdict left_adjoint_check(const KanAdjunction& adj, const std::vector<PresheafPtr>& suite,
                           int bound) {
  Verdict v;
  CatPtr c = adj.large();
  PresheafPtr one = share(terminal_presheaf(c));
  PresheafPtr r = adj.restrict(one);
  for (int s : r->sizes)
    if (s != 1) v.fail("u* does not preserve the terminal object");
  NaturalModelInstance m{adj.small(), bound, {}};
  NaturalModelInstance big{c, bound, {}};
  std::vector<PresheafMap> maps;
  for (const auto& p : suite)
    for (const auto& q : suite)
      for (const auto& f : enumerate_maps(p, q)) {
        maps.push_back(f);
        if (is_display(big, f) && !is_display(m, adj.restrict(f)))
          v.fail("u* does not preserve a display map out of " + describe(*p));
      }
  for (std::size_t a = 0; a < maps.size() && a < 24; ++a)
    for (std::size_t b = 0; b < maps.size() && b < 24; ++b) {
      if (!(*maps[a].target == *maps[b].target)) continue;
      Pullback pb = pullback(maps[a], maps[b]);
      Pullback small = pullback(adj.restrict(maps[a]), adj.restrict(maps[b]));
      PresheafMap cmp = small.pairing(adj.restrict(pb.fst), adj.restrict(pb.snd));
      if (!is_iso(cmp)) v.fail("u* does not preserve a pullback over " + describe(*maps[a].target));
    }
  return v;
}

ComonadPtr comonad_from_adjunction(std::shared_ptr<const KanAdjunction> adj) {
  if (!validate_diagram(adj->functor()).ok())
    throw Error(ErrorKind::Rejected, "comonad: u is not a functor");
  std::vector<PresheafPtr> suite;
  for (auto& p : enumerate_presheaves(adj->large(), 1)) suite.push_back(share(std::move(p)));
  Verdict v = left_adjoint_check(*adj, suite);
  if (!v.ok) throw Error(ErrorKind::Rejected, "comonad: " + v.failures.front());
  return std::make_shared<const AdjunctionComonad>(std::move(adj));
}

ComonadPtr identity_comonad(CatPtr c) {
  return std::make_shared<const AdjunctionComonad>(
      std::make_shared<const KanAdjunction>(identity_functor(std::move(c))));
}

ComonadPtr monoid_comonad(CatPtr monoid) {
  if (monoid->num_objects() != 1) throw Error(ErrorKind::Rejected, "monoid comonad: not a monoid");
  return comonad_from_adjunction(
      std::make_shared<const KanAdjunction>(constant_functor(terminal_category(), monoid, 0)));
}

ValidationReport validate_comonad(const NaturalModelComonad& w,
                                  const std::vector<PresheafPtr>& suite) {
  ValidationReport r;
  PresheafPtr one = share(terminal_presheaf(w.base()));
  PresheafPtr box_one = w.apply(one);
  for (int s : box_one->sizes)
    if (s != 1) r.add("terminal object not preserved", describe(*box_one));
  std::vector<PresheafMap> maps;
  for (const auto& p : suite) {
    std::string at = describe(*p);
    PresheafPtr bp = w.apply(p);
    PresheafMap d = w.comult(p);
    if (!validate_map(w.counit(p)).ok() || !validate_map(d).ok()) {
      r.add("structure map not natural", at);
      continue;
    }
    if (!same(w.apply(identity_map(p)), identity_map(bp))) r.add("identity not preserved", at);
    if (!same(compose(w.counit(bp), d), identity_map(bp))) r.add("left counit law", at);
    if (!same(compose(w.apply(w.counit(p)), d), identity_map(bp))) r.add("right counit law", at);
    if (!same(compose(w.comult(bp), d), compose(w.apply(d), d))) r.add("coassociativity", at);
    for (const auto& a : enumerate_types(p, 1)) {
      PresheafMap t = w.tau(a);
      Comprehension ca = comprehension_shape(a);
      if (!is_iso(t) || !same(compose(comprehension_shape(w.type_action(a)).proj, t), w.apply(ca.proj)))
        r.add("tau is not an isomorphism over the box of the context", at);
    }
    for (const auto& q : suite) {
      auto hs = enumerate_maps(p, q);
      for (std::size_t k = 0; k < hs.size() && k < 8; ++k) maps.push_back(hs[k]);
    }
  }
  for (const auto& h : maps) {
    std::string at = describe(*h.source) + " -> " + describe(*h.target);
    PresheafMap bh = w.apply(h);
    if (!validate_map(bh).ok()) {
      r.add("box of a map is not natural", at);
      continue;
    }
    if (!same(compose(w.counit(h.target), bh), compose(h, w.counit(h.source))))
      r.add("counit not natural", at);
    if (!same(compose(w.comult(h.target), bh), compose(w.apply(bh), w.comult(h.source))))
      r.add("comultiplication not natural", at);
  }
  for (std::size_t a = 0; a < maps.size() && a < 16; ++a)
    for (std::size_t b = 0; b < maps.size() && b < 16; ++b) {
      const PresheafMap& f = maps[a];
      const PresheafMap& g = maps[b];
      if (*f.target == *g.source &&
          !same(w.apply(compose(g, f)), compose(w.apply(g), w.apply(f))))
        r.add("composition not preserved", describe(*f.source));
      if (*f.target == *g.target) {
        Pullback pb = pullback(f, g);
        Pullback boxed = pullback(w.apply(f), w.apply(g));
        if (!is_iso(boxed.pairing(w.apply(pb.fst), w.apply(pb.snd))))
          r.add("pullback not preserved", describe(*f.target));
      }
    }
  return r;
}

// ---- coalgebras ----

bool Coalgebra::operator==(const Coalgebra& other) const {
  return *carrier == *other.carrier && structure.components == other.structure.components;
}

ValidationReport validate_coalgebra(const NaturalModelComonad& w, const Coalgebra& c) {
  ValidationReport r;
  std::string at = describe_coalgebra(c);
  if (!(*c.structure.source == *c.carrier) || !(*c.structure.target == *w.apply(c.carrier))) {
    r.add("structure map has the wrong type", at);
    return r;
  }
  if (!validate_map(c.structure).ok()) {
    r.add("structure map is not natural", at);
    return r;
  }
  const PresheafMap& g = c.structure;
  if (!same(compose(w.counit(c.carrier), g), identity_map(c.carrier))) r.add("counit law", at);
  if (!same(compose(w.comult(c.carrier), g), compose(w.apply(g), g))) r.add("coassociativity", at);
  return r;
}

bool is_coalgebra_map(const NaturalModelComonad& w, const Coalgebra& from, const Coalgebra& to,
                      const PresheafMap& h) {
  return same(compose(to.structure, h), compose(w.apply(h), from.structure));
}

std::vector<PresheafMap> coalgebra_maps(const NaturalModelComonad& w, const Coalgebra& from,
                                        const Coalgebra& to, const Ceiling& ceiling) {
  std::vector<PresheafMap> out;
  for_each_map(from.carrier, to.carrier, [&](const PresheafMap& h) {
    if (is_coalgebra_map(w, from, to, h)) out.push_back(h);
    return true;
  }, ceiling);
  return out;
}

Coalgebra terminal_coalgebra(const NaturalModelComonad& w) {
  PresheafPtr one = share(terminal_presheaf(w.base()));
  PresheafPtr box = w.apply(one);
  for (int s : box->sizes)
    if (s != 1) throw Error(ErrorKind::Rejected, "box of the terminal presheaf is not terminal");
  return {one, {one, box, std::vector<std::vector<int>>(one->sizes.size(), {0})}};
}

std::pair<Coalgebra, PresheafMap> subcoalgebra(const NaturalModelComonad& w, const Coalgebra& c,
                                               const Subpresheaf& s) {
  PresheafMap incl = inclusion(c.carrier, s);
  PresheafMap box_incl = w.apply(incl);
  PresheafMap structure =
      factor_through(compose(c.structure, incl), box_incl, "not a sub-coalgebra");
  return {{incl.source, structure}, incl};
}

Coalgebra cofree(const NaturalModelComonad& w, const PresheafPtr& q) {
  return {w.apply(q), w.comult(q)};
}

PresheafMap cofree_transpose(const NaturalModelComonad& w, const Coalgebra& x,
                             const PresheafMap& h) {
  return compose(w.apply(h), x.structure);
}

std::vector<Coalgebra> enumerate_coalgebras(const NaturalModelComonad& w, int bound,
                                            const Ceiling& ceiling) {
  std::vector<Coalgebra> out;
  for (auto& p : enumerate_presheaves(w.base(), bound, ceiling)) {
    PresheafPtr carrier = share(std::move(p));
    PresheafPtr box = w.apply(carrier);
    PresheafMap eps = w.counit(carrier);
    PresheafMap d = w.comult(carrier);
    for_each_map(carrier, box, [&](const PresheafMap& g) {
      if (!same(compose(eps, g), identity_map(carrier))) return true;
      if (same(compose(d, g), compose(w.apply(g), g))) out.push_back({carrier, g});
      return true;
    }, ceiling);
    ceiling.check(static_cast<long long>(out.size()), "coalgebras");
  }
  return out;
}

Verdict forgetful_adjunction_check(const NaturalModelComonad& w,
                                   const std::vector<Coalgebra>& coalgebras,
                                   const std::vector<PresheafPtr>& presheaves,
                                   const Ceiling& ceiling) {
  Verdict v;
  for (const auto& q : presheaves)
    if (!same(compose(w.apply(w.counit(q)), w.comult(q)), identity_map(w.apply(q))))
      v.fail("triangle F eps . eta F fails at " + describe(*q));
  for (const auto& x : coalgebras) {
    if (!same(compose(w.counit(x.carrier), x.structure), identity_map(x.carrier)))
      v.fail("triangle eps U . U eta fails at " + describe_coalgebra(x));
    if (!is_coalgebra_map(w, x, cofree(w, x.carrier), x.structure))
      v.fail("unit is not a coalgebra map at " + describe_coalgebra(x));
    for (const auto& q : presheaves) {
      Coalgebra fq = cofree(w, q);
      auto plain = enumerate_maps(x.carrier, q, ceiling);
      auto coalg = coalgebra_maps(w, x, fq, ceiling);
      std::string at = describe_coalgebra(x) + " and " + describe(*q);
      if (plain.size() != coalg.size()) {
        v.fail("hom-set sizes differ at " + at + ": " + std::to_string(plain.size()) + " vs " +
               std::to_string(coalg.size()));
        continue;
      }
      for (const auto& h : plain) {
        PresheafMap t = cofree_transpose(w, x, h);
        if (!is_coalgebra_map(w, x, fq, t) || !same(compose(w.counit(q), t), h))
          v.fail("transpose does not round-trip at " + at);
      }
    }
  }
  v.note(std::to_string(coalgebras.size()) + " coalgebras against " +
         std::to_string(presheaves.size()) + " presheaves");
  return v;
}

// ---- the induced comonad on types ----

InducedComonad::InducedComonad(ComonadPtr w, Coalgebra at) : w_(std::move(w)), at_(std::move(at)) {}

TypePtr InducedComonad::apply(const TypePtr& a) const {
  return subst(w_->type_action(a), at_.structure);
}

TypeMap InducedComonad::apply(const TypeMap& m) const {
  TypePtr ta = w_->type_action(m.source), tb = w_->type_action(m.target);
  PresheafMap boxed = w_->apply(comprehension_map(m));
  PresheafMap over = compose(w_->tau(m.target), compose(boxed, inverse(w_->tau(m.source))));
  return subst(as_type_map(ta, tb, over), at_.structure);
}

std::function<TypeMap(const TypeMap&)> InducedComonad::map_action(const TypePtr& source,
                                                                  const TypePtr& target) const {
  TypePtr ta = w_->type_action(source), tb = w_->type_action(target);
  PresheafMap tau_t = w_->tau(target);
  PresheafMap tau_s_inv = inverse(w_->tau(source));
  auto cs = std::make_shared<const Comprehension>(comprehension_shape(source));
  auto ct = std::make_shared<const Comprehension>(comprehension_shape(target));
  ComonadPtr w = w_;
  PresheafMap structure = at_.structure;
  return [=](const TypeMap& m) {
    PresheafMap cm{cs->object, ct->object, {}};
    for (std::size_t i = 0; i < cs->pairs.size(); ++i) {
      std::vector<int> comp;
      comp.reserve(cs->pairs[i].size());
      for (auto [g, v] : cs->pairs[i])
        comp.push_back(ct->index(static_cast<int>(i), g, m.fn[i][g][v]));
      cm.components.push_back(std::move(comp));
    }
    PresheafMap over = compose(tau_t, compose(w->apply(cm), tau_s_inv));
    return subst(as_type_map(ta, tb, over), structure);
  };
}

TermOverContext InducedComonad::apply(const TermOverContext& t) const {
  return subst(w_->term_action(t), at_.structure);
}

TypeMap InducedComonad::counit(const TypePtr& a) const {
  TypePtr ta = w_->type_action(a);
  Comprehension cta = comprehension_shape(ta), ca = comprehension_shape(a);
  PresheafMap tinv = inverse(w_->tau(a));
  PresheafMap eps = w_->counit(ca.object);
  TypeMap out{apply(a), a, {}};
  const PresheafMap& g = at_.structure;
  for (std::size_t i = 0; i < a->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::vector<std::vector<int>> row;
    for (int x = 0; x < at_.carrier->size(o); ++x) {
      std::vector<int> fn;
      for (int b = 0; b < ta->size(o, g(o, x)); ++b) {
        auto [x2, v] = ca.element(o, eps(o, tinv(o, cta.index(o, g(o, x), b))));
        if (x2 != x) throw Error(ErrorKind::Rejected, "counit law fails for the coalgebra");
        fn.push_back(v);
      }
      row.push_back(std::move(fn));
    }
    out.fn.push_back(std::move(row));
  }
  return out;
}

TypeMap InducedComonad::comult(const TypePtr& a) const {
  const PresheafMap& g = at_.structure;
  TypePtr ta = w_->type_action(a);
  TypePtr ba = apply(a);
  TypePtr ta2 = w_->type_action(ba);
  Comprehension ca = comprehension_shape(a), cta = comprehension_shape(ta), cba = comprehension_shape(ba),
                cta2 = comprehension_shape(ta2);
  PresheafMap tinv = inverse(w_->tau(a));
  PresheafMap tau2 = w_->tau(ba);
  // q : Γ.𝔹A → □(Γ.A), (x, b) ↦ τ⁻¹(γx, b)
  PresheafMap q{cba.object, tinv.target, {}};
  for (std::size_t i = 0; i < a->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::vector<int> comp;
    for (int e = 0; e < cba.object->size(o); ++e) {
      auto [x, b] = cba.element(o, e);
      comp.push_back(tinv(o, cta.index(o, g(o, x), b)));
    }
    q.components.push_back(std::move(comp));
  }
  PresheafMap box_q = w_->apply(q);
  PresheafMap box_p = w_->apply(cba.proj);
  PresheafMap d = w_->comult(ca.object);
  TypeMap out{ba, subst(ta2, g), {}};
  for (std::size_t i = 0; i < a->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::map<std::pair<int, int>, int> lift;
    for (int e = 0; e < box_q.source->size(o); ++e) lift[{box_q(o, e), box_p(o, e)}] = e;
    std::vector<std::vector<int>> row;
    for (int x = 0; x < at_.carrier->size(o); ++x) {
      std::vector<int> fn;
      for (int b = 0; b < ba->size(o, x); ++b) {
        auto it = lift.find({d(o, q(o, cba.index(o, x, b))), g(o, x)});
        if (it == lift.end()) throw Error(ErrorKind::Rejected, "box does not preserve the pullback");
        auto [x2, v] = cta2.element(o, tau2(o, it->second));
        (void)x2;
        fn.push_back(v);
      }
      row.push_back(std::move(fn));
    }
    out.fn.push_back(std::move(row));
  }
  return out;
}

ValidationReport InducedComonad::check_laws(const TypePtr& a) const {
  ValidationReport r;
  TypePtr ba = apply(a);
  TypeMap eps = counit(a), d = comult(a);
  std::string at = "over " + describe(*at_.carrier);
  if (!validate_type_map(eps).ok() || !validate_type_map(d).ok()) {
    r.add("structure maps are not natural", at);
    return r;
  }
  if (!same(compose(counit(ba), d), identity_type_map(ba))) r.add("left counit law", at);
  if (!same(compose(apply(eps), d), identity_type_map(ba))) r.add("right counit law", at);
  if (!same(compose(comult(ba), d), compose(apply(d), d))) r.add("coassociativity", at);
  return r;
}

// ---- coalgebra types ----

ValidationReport validate_coalgebra_type(const ComonadPtr& w, const CoalgebraType& x) {
  ValidationReport r;
  InducedComonad b(w, x.context);
  TypePtr bx = b.apply(x.type);
  std::string at = "over " + describe_coalgebra(x.context);
  if (!(*x.theta.source == *x.type) || !(*x.theta.target == *bx)) {
    r.add("structure map has the wrong type", at);
    return r;
  }
  if (!validate_type_map(x.theta).ok()) {
    r.add("structure map is not natural", at);
    return r;
  }
  if (!same(compose(b.counit(x.type), x.theta), identity_type_map(x.type))) r.add("counit law", at);
  if (!same(compose(b.comult(x.type), x.theta), compose(b.apply(x.theta), x.theta)))
    r.add("coassociativity", at);
  return r;
}

bool is_coalgebra_type_map(const ComonadPtr& w, const CoalgebraType& from,
                           const CoalgebraType& to, const TypeMap& m) {
  InducedComonad b(w, from.context);
  return compose(to.theta, m).fn == compose(b.apply(m), from.theta).fn;
}

std::vector<TypeMap> coalgebra_type_maps(const ComonadPtr& w, const CoalgebraType& from,
                                         const CoalgebraType& to, const Ceiling& ceiling) {
  std::vector<TypeMap> out;
  auto boxed = InducedComonad(w, from.context).map_action(from.type, to.type);
  for_each_type_map(from.type, to.type, [&](const TypeMap& m) {
    if (compose(to.theta, m).fn == compose(boxed(m), from.theta).fn) out.push_back(m);
    return true;
  }, ceiling);
  return out;
}

std::vector<CoalgebraType> enumerate_coalgebra_types(const ComonadPtr& w, const Coalgebra& at,
                                                     int max_fiber, const Ceiling& ceiling) {
  InducedComonad b(w, at);
  std::vector<CoalgebraType> out;
  for (const auto& a : enumerate_types(at.carrier, max_fiber, ceiling)) {
    TypePtr ba = b.apply(a);
    TypeMap eps = b.counit(a), d = b.comult(a);
    auto id = identity_type_map(a).fn;
    auto boxed = b.map_action(a, ba);
    for_each_type_map(a, ba, [&](const TypeMap& theta) {
      if (compose(eps, theta).fn != id) return true;
      if (compose(d, theta).fn == compose(boxed(theta), theta).fn)
        out.push_back({at, a, theta});
      return true;
    }, ceiling);
  }
  return out;
}

Coalgebra coalgebra_comprehension(const ComonadPtr& w, const CoalgebraType& x) {
  Comprehension c = comprehension_shape(x.type);
  TypePtr ta = w->type_action(x.type);
  Comprehension cta = comprehension_shape(ta);
  PresheafMap tinv = inverse(w->tau(x.type));
  const PresheafMap& g = x.context.structure;
  PresheafMap xi{c.object, tinv.target, {}};
  for (std::size_t i = 0; i < x.type->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::vector<int> comp;
    for (int e = 0; e < c.object->size(o); ++e) {
      auto [gx, a] = c.element(o, e);
      comp.push_back(tinv(o, cta.index(o, g(o, gx), x.theta(o, gx, a))));
    }
    xi.components.push_back(std::move(comp));
  }
  return {c.object, xi};
}

CoalgebraType subst(const ComonadPtr& w, const CoalgebraType& x, const Coalgebra& delta,
                    const PresheafMap& h) {
  TypePtr a = subst(x.type, h);
  InducedComonad b(w, delta);
  TypePtr ba = b.apply(a);
  TypeMap theta = subst(x.theta, h);
  if (!(*theta.target == *ba))
    throw Error(ErrorKind::Rejected, "induced comonad is not strictly stable under substitution");
  theta.source = a;
  theta.target = ba;
  return {delta, a, theta};
}

CoalgebraType strictify_coalgebra(const ComonadPtr& w, const Coalgebra& e, const Coalgebra& b,
                                  const PresheafMap& f) {
  TypePtr x = fiber_type(f);
  PresheafMap iso = fiber_iso(f);
  PresheafMap iso_inv = inverse(iso);
  PresheafMap box_iso = w->apply(iso);
  Comprehension cx = comprehension_shape(x);
  TypePtr tx = w->type_action(x);
  Comprehension ctx = comprehension_shape(tx);
  PresheafMap tau = w->tau(x);
  InducedComonad ind(w, b);
  TypeMap theta{x, ind.apply(x), {}};
  for (std::size_t i = 0; i < x->fiber.size(); ++i) {
    int o = static_cast<int>(i);
    std::vector<std::vector<int>> row;
    for (int y = 0; y < b.carrier->size(o); ++y) {
      std::vector<int> fn;
      for (int k = 0; k < x->size(o, y); ++k) {
        int el = iso_inv(o, cx.index(o, y, k));
        auto [by, v] = ctx.element(o, tau(o, box_iso(o, e.structure(o, el))));
        if (by != b.structure(o, y)) throw Error(ErrorKind::Rejected, "strictify: not a coalgebra map");
        fn.push_back(v);
      }
      row.push_back(std::move(fn));
    }
    theta.fn.push_back(std::move(row));
  }
  return {b, x, theta};
}

CoalgebraType cofree_type(const ComonadPtr& w, const Coalgebra& at, const TypePtr& a) {
  InducedComonad b(w, at);
  return {at, b.apply(a), b.comult(a)};
}

CoalgebraType induced_right_adjoint(const ComonadPtr& w, const Coalgebra& at, const TypePtr& a) {
  Comprehension c = comprehension_shape(a);
  Coalgebra fg = cofree(*w, at.carrier);
  Coalgebra fe = cofree(*w, c.object);
  CoalgebraType over_free = strictify_coalgebra(w, fe, fg, w->apply(c.proj));
  return subst(w, over_free, at, at.structure);
}

CoalgebraType coalgebra_sigma(const ComonadPtr& w, const CoalgebraType& a,
                              const CoalgebraType& b) {
  Coalgebra ga = coalgebra_comprehension(w, a);
  if (!(b.context == ga)) throw Error(ErrorKind::ContextMismatch, "sigma: B is not over Γ.A");
  Coalgebra gab = coalgebra_comprehension(w, b);
  PresheafMap proj = compose(comprehension_shape(a.type).proj, comprehension_shape(b.type).proj);
  return strictify_coalgebra(w, gab, a.context, proj);
}

CoalgebraPi coalgebra_pi(const ComonadPtr& w, const CoalgebraType& a, const CoalgebraType& b,
                         const Ceiling& ceiling) {
  Coalgebra ga = coalgebra_comprehension(w, a);
  if (!(b.context == ga)) throw Error(ErrorKind::ContextMismatch, "pi: B is not over Γ.A");
  PresheafMap pa = comprehension_shape(a.type).proj;
  const Coalgebra& g = a.context;
  InducedComonad bg(w, g), bga(w, ga);
  PiType pi = pi_type(a.type, b.type, ceiling);
  CoalgebraType free = cofree_type(w, g, pi.type);
  // ev' : (𝔹Π)[p_A] → B
  TypeMap ev = compose(pi_eval(pi), subst(bg.counit(pi.type), pa));
  CoalgebraType pulled = subst(w, free, ga, pa);
  TypeMap lhs = compose(b.theta, ev);
  TypeMap rhs = compose(bga.apply(ev), pulled.theta);
  const FinCat& c = *g.carrier->base;
  Comprehension cga = comprehension_shape(a.type);
  std::vector<std::vector<std::vector<bool>>> keep(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i)
    for (int x = 0; x < g.carrier->size(i); ++x) {
      std::vector<bool> row(free.type->size(i, x), true);
      for (int t = 0; t < free.type->size(i, x); ++t)
        for (int v = 0; v < a.type->size(i, x) && row[t]; ++v) {
          int e = cga.index(i, x, v);
          if (lhs(i, e, t) != rhs(i, e, t)) row[t] = false;
        }
      keep[i].push_back(std::move(row));
    }
  // greatest sub-coalgebra inside the good elements
  for (bool changed = true; changed;) {
    changed = false;
    for (int f = 0; f < c.num_morphisms(); ++f) {
      int i = c.dst(f), j = c.src(f);
      for (int x = 0; x < g.carrier->size(i); ++x)
        for (int t = 0; t < free.type->size(i, x); ++t)
          if (keep[i][x][t] && !keep[j][g.carrier->act(f, x)][free.type->act(f, x, t)]) {
            keep[i][x][t] = false;
            changed = true;
          }
    }
    if (changed) continue;
    auto [sub, incl] = subtype(free.type, keep);
    TypeMap boxed = bg.apply(incl);
    for (int i = 0; i < c.num_objects(); ++i)
      for (int x = 0; x < g.carrier->size(i); ++x) {
        const auto& hit = boxed.fn[i][x];
        for (int t = 0; t < free.type->size(i, x); ++t)
          if (keep[i][x][t] &&
              std::find(hit.begin(), hit.end(), free.theta(i, x, t)) == hit.end()) {
            keep[i][x][t] = false;
            changed = true;
          }
      }
  }
  auto [sub, incl] = subtype(free.type, keep);
  TypeMap boxed = bg.apply(incl);
  TypeMap theta{sub, bg.apply(sub), {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<std::vector<int>> row;
    for (int x = 0; x < g.carrier->size(i); ++x) {
      const auto& hit = boxed.fn[i][x];
      std::vector<int> fn;
      for (int s = 0; s < sub->size(i, x); ++s) {
        int target = free.theta(i, x, incl(i, x, s));
        fn.push_back(static_cast<int>(std::find(hit.begin(), hit.end(), target) - hit.begin()));
      }
      row.push_back(std::move(fn));
    }
    theta.fn.push_back(std::move(row));
  }
  CoalgebraPi out{{g, sub, theta}, a, b, pi, incl, compose(ev, subst(incl, pa))};
  return out;
}

TypeMap coalgebra_lambda(const ComonadPtr& w, const CoalgebraPi& pi, const CoalgebraType& r,
                         const TypeMap& h) {
  InducedComonad bg(w, pi.type.context);
  TypeMap l = pi_lambda(pi.pi, r.type, h);
  TypeMap sharp = compose(bg.apply(l), r.theta);
  TypeMap out{r.type, pi.type.type, {}};
  for (std::size_t i = 0; i < sharp.fn.size(); ++i) {
    std::vector<std::vector<int>> row;
    for (std::size_t x = 0; x < sharp.fn[i].size(); ++x) {
      const auto& members = pi.inclusion.fn[i][x];
      std::vector<int> fn;
      for (int t : sharp.fn[i][x]) {
        auto it = std::find(members.begin(), members.end(), t);
        if (it == members.end()) throw Error(ErrorKind::Rejected, "lambda: map is not coalgebraic");
        fn.push_back(static_cast<int>(it - members.begin()));
      }
      row.push_back(std::move(fn));
    }
    out.fn.push_back(std::move(row));
  }
  return out;
}

CoalgebraPi coalgebra_exponential(const ComonadPtr& w, const CoalgebraType& a,
                                  const CoalgebraType& b, const Ceiling& ceiling) {
  Coalgebra ga = coalgebra_comprehension(w, a);
  CoalgebraType pulled = subst(w, b, ga, comprehension_shape(a.type).proj);
  return coalgebra_pi(w, a, pulled, ceiling);
}

// ---- Kock–Wraith ----

std::vector<Subpresheaf> subcoalgebras(const NaturalModelComonad& w, const Coalgebra& c,
                                       const Ceiling& ceiling) {
  std::vector<Subpresheaf> out;
  for (const auto& s : enumerate_subpresheaves(*c.carrier, ceiling)) {
    PresheafMap incl = inclusion(c.carrier, s);
    auto hit = image(w.apply(incl));
    PresheafMap path = compose(c.structure, incl);
    bool ok = true;
    for (std::size_t o = 0; o < path.components.size() && ok; ++o)
      for (int v : path.components[o]) ok = ok && hit[o][v];
    if (ok) out.push_back(s);
  }
  return out;
}

PresheafMap KockWraith::classify(const ComonadPtr& w, const Coalgebra& c,
                                 const Subpresheaf& s) const {
  PresheafMap chi = omega.characteristic(c.carrier, s);
  return factor_through(compose(w->apply(chi), c.structure), inclusion,
                        "classifying map leaves the fixed points");
}

KockWraith kock_wraith(const ComonadPtr& w) {
  KockWraith kw;
  kw.omega = subobject_classifier(w->base());
  const PresheafPtr& om = kw.omega.omega;
  kw.box_omega = w->apply(om);
  PresheafMap box_top = w->apply(kw.omega.top);
  kw.sigma = kw.omega.characteristic(kw.box_omega, image(box_top));
  kw.k = compose(w->apply(kw.sigma), w->comult(om));
  Subpresheaf fixed(om->sizes.size());
  for (std::size_t o = 0; o < fixed.size(); ++o)
    for (int x = 0; x < kw.box_omega->size(static_cast<int>(o)); ++x)
      fixed[o].push_back(kw.k(static_cast<int>(o), x) == x);
  auto [coalg, incl] = subcoalgebra(*w, cofree(*w, om), fixed);
  kw.fixed = coalg;
  kw.inclusion = incl;
  kw.top = factor_through(box_top, incl, "box of true is not a fixed point");
  Product sq = product(om, om);
  Subpresheaf le(om->sizes.size());
  for (std::size_t o = 0; o < le.size(); ++o) {
    int i = static_cast<int>(o);
    for (int x = 0; x < om->size(i); ++x)
      for (int y = 0; y < om->size(i); ++y) {
        const Sieve& a = kw.omega.sieves[i][x];
        const Sieve& b = kw.omega.sieves[i][y];
        le[o].push_back(std::includes(b.begin(), b.end(), a.begin(), a.end()));
      }
  }
  auto box_le = image(w->apply(inclusion(sq.object, le)));
  PresheafMap bf = w->apply(sq.fst), bs = w->apply(sq.snd);
  for (std::size_t o = 0; o < le.size(); ++o) {
    int i = static_cast<int>(o);
    std::map<std::pair<int, int>, int> pairs;
    for (int z = 0; z < bf.source->size(i); ++z) pairs[{bf(i, z), bs(i, z)}] = z;
    std::vector<std::pair<int, int>> rel;
    for (int x = 0; x < coalg.carrier->size(i); ++x)
      for (int y = 0; y < coalg.carrier->size(i); ++y) {
        auto it = pairs.find({incl(i, x), incl(i, y)});
        if (it != pairs.end() && box_le[o][it->second]) rel.push_back({x, y});
      }
    kw.order.push_back(std::move(rel));
  }
  return kw;
}

Verdict kock_wraith_check(const ComonadPtr& w, const KockWraith& kw,
                          const std::vector<Coalgebra>& coalgebras, const Ceiling& ceiling) {
  Verdict v;
  if (!same(compose(kw.k, kw.k), kw.k)) v.fail("k is not idempotent");
  if (!validate_coalgebra(*w, kw.fixed).ok()) v.fail("fixed points do not form a coalgebra");
  for (const auto& c : coalgebras) {
    std::string at = describe_coalgebra(c);
    auto subs = subcoalgebras(*w, c, ceiling);
    auto maps = coalgebra_maps(*w, c, kw.fixed, ceiling);
    if (subs.size() != maps.size()) {
      v.fail(at + ": " + std::to_string(subs.size()) + " sub-coalgebras but " +
             std::to_string(maps.size()) + " maps into the classifier");
      continue;
    }
    std::set<std::vector<std::vector<int>>> seen;
    for (const auto& s : subs) {
      PresheafMap phi = kw.classify(w, c, s);
      if (!is_coalgebra_map(*w, c, kw.fixed, phi)) v.fail(at + ": classifying map is not coalgebraic");
      if (!seen.insert(phi.components).second) v.fail(at + ": two sub-coalgebras share a map");
      Subpresheaf back(s.size());
      for (std::size_t o = 0; o < s.size(); ++o)
        for (int x = 0; x < c.carrier->size(static_cast<int>(o)); ++x)
          back[o].push_back(phi(static_cast<int>(o), x) == kw.top(static_cast<int>(o), 0));
      if (back != s) v.fail(at + ": pulling back true does not recover the sub-coalgebra");
    }
  }
  Coalgebra one = terminal_coalgebra(*w);
  v.note("global points of Omega_G: " + std::to_string(coalgebra_maps(*w, one, kw.fixed).size()));
  return v;
}

// ---- the coalgebra classifier ----

CoalgebraType CoalgebraClassifier::decode(const Coalgebra& at, const PresheafMap& code) const {
  PresheafMap z = compose(object_inclusion, code);
  PresheafMap pair = compose(comonad->counit(ob_mor.object), z);
  PresheafMap c = compose(ob_mor.fst, pair), mu = compose(ob_mor.snd, pair);
  TypePtr a = s4sem::decode(*universe, c);
  TypeMap theta = decode_map(*cat, mu);
  InducedComonad b(comonad, at);
  TypePtr ba = b.apply(a);
  if (!(*theta.target == *ba))
    throw Error(ErrorKind::Rejected, "decoded structure does not land in the induced comonad");
  theta.source = a;
  theta.target = ba;
  return {at, a, theta};
}

PresheafMap CoalgebraClassifier::encode(const CoalgebraType& x) const {
  PresheafMap c = encode_type(*universe, x.type);
  PresheafMap mu = encode_map(*cat, x.theta);
  PresheafMap pair = ob_mor.pairing(c, mu);
  return factor_through(compose(comonad->apply(pair), x.context.structure), object_inclusion,
                        "encoded coalgebra type is not a beta-coalgebra");
}

CoalgebraClassifier coalgebra_classifier(const ComonadPtr& w, int bound, const Ceiling& ceiling) {
  CoalgebraClassifier cls;
  cls.comonad = w;
  auto u = std::make_shared<HSUniverse>(hs_universe({w->base(), bound, ceiling}));
  cls.universe = u;
  cls.cat = std::make_shared<const UniverseCategory>(universe_category(*u));
  const UniverseCategory& cat = *cls.cat;
  const PresheafPtr& U = u->U;
  const PresheafPtr& mor = cat.mor;
  cls.box_u = w->apply(U);
  cls.box_mor = w->apply(mor);
  Coalgebra fu = cofree(*w, U), fmor = cofree(*w, mor);
  InducedComonad bu(w, fu), bmor(w, fmor);
  TypePtr generic = s4sem::decode(*u, w->counit(U));
  auto transpose = [&](const Coalgebra& x, const PresheafMap& h) { return cofree_transpose(*w, x, h); };
  TypePtr bgen = bu.apply(generic);
  if (bgen->max_fiber() > bound)
    throw Error(ErrorKind::NotDisplay, "induced comonad leaves the bound " + std::to_string(bound) +
                                           " (fiber " + std::to_string(bgen->max_fiber()) + ")");
  if (bu.apply(bgen)->max_fiber() > bound)
    throw Error(ErrorKind::NotDisplay, "iterated induced comonad leaves the bound " +
                                           std::to_string(bound));
  cls.beta_ob = transpose(fu, encode_type(*u, bgen));
  cls.eps_beta = transpose(fu, encode_map(cat, bu.counit(generic)));
  cls.delta_beta = transpose(fu, encode_map(cat, bu.comult(generic)));
  TypeMap generic_map = decode_map(cat, w->counit(mor));
  cls.beta_mor = transpose(fmor, encode_map(cat, bmor.apply(generic_map)));

  PresheafMap box_src = w->apply(cat.src), box_tgt = w->apply(cat.tgt), box_id = w->apply(cat.ident);
  PresheafMap box_fst = w->apply(cat.composable.fst), box_snd = w->apply(cat.composable.snd);
  cls.box_comp = w->apply(cat.comp);
  cls.ob_mor = product(U, mor);
  cls.box_ob_mor = w->apply(cls.ob_mor.object);
  PresheafMap bo = w->apply(cls.ob_mor.fst), bm = w->apply(cls.ob_mor.snd);
  const FinCat& c = *w->base();
  cls.objects.assign(c.num_objects(), {});
  for (int i = 0; i < c.num_objects(); ++i) {
    std::map<std::pair<int, int>, int> composable;
    for (int z = 0; z < box_fst.source->size(i); ++z) composable[{box_fst(i, z), box_snd(i, z)}] = z;
    auto comp = [&](int g, int f) {
      auto it = composable.find({g, f});
      return it == composable.end() ? -1 : cls.box_comp(i, it->second);
    };
    for (int z = 0; z < cls.box_ob_mor->size(i); ++z) {
      int o = bo(i, z), m = bm(i, z);
      bool ok = box_src(i, m) == o && box_tgt(i, m) == cls.beta_ob(i, o);
      if (ok) ok = comp(cls.eps_beta(i, o), m) == box_id(i, o);
      if (ok) {
        int lhs = comp(cls.beta_mor(i, m), m);
        ok = lhs >= 0 && lhs == comp(cls.delta_beta(i, o), m);
      }
      cls.objects[i].push_back(ok);
    }
  }
  auto [coalg, incl] = subcoalgebra(*w, cofree(*w, cls.ob_mor.object), cls.objects);
  cls.object_coalgebra = coalg;
  cls.object_inclusion = incl;
  return cls;
}

Verdict classifier_externalization_check(const CoalgebraClassifier& cls,
                                         const std::vector<Coalgebra>& coalgebras,
                                         const Ceiling& ceiling) {
  Verdict v;
  const ComonadPtr& w = cls.comonad;
  int bound = cls.universe->model.bound;
  auto same_type = [](const CoalgebraType& a, const CoalgebraType& b) {
    return *a.type == *b.type && a.theta.fn == b.theta.fn;
  };
  std::vector<std::vector<PresheafMap>> codes;
  for (const auto& x : coalgebras) {
    std::string at = describe_coalgebra(x);
    auto types = enumerate_coalgebra_types(w, x, bound, ceiling);
    codes.push_back(coalgebra_maps(*w, x, cls.object_coalgebra, ceiling));
    const auto& cs = codes.back();
    if (types.size() != cs.size()) {
      v.fail(at + ": " + std::to_string(cs.size()) + " codes but " + std::to_string(types.size()) +
             " coalgebra types");
      continue;
    }
    std::vector<bool> hit(types.size(), false);
    for (const auto& code : cs) {
      CoalgebraType t = cls.decode(x, code);
      auto it = std::find_if(types.begin(), types.end(),
                             [&](const CoalgebraType& y) { return same_type(y, t); });
      if (it == types.end()) {
        v.fail(at + ": a code decodes outside the coalgebra types");
        continue;
      }
      std::size_t pos = static_cast<std::size_t>(it - types.begin());
      if (hit[pos]) v.fail(at + ": two codes decode to the same coalgebra type");
      hit[pos] = true;
      if (!same(cls.encode(t), code)) v.fail(at + ": encode does not invert decode");
    }
    v.note(at + ": " + std::to_string(cs.size()) + " coalgebra types");
  }
  long long squares = 0;
  for (std::size_t a = 0; a < coalgebras.size(); ++a)
    for (std::size_t b = 0; b < coalgebras.size(); ++b)
      for (const auto& h : coalgebra_maps(*w, coalgebras[a], coalgebras[b], ceiling))
        for (const auto& code : codes[b]) {
          ceiling.check(++squares, "naturality squares");
          CoalgebraType lhs = cls.decode(coalgebras[a], compose(code, h));
          CoalgebraType rhs = subst(w, cls.decode(coalgebras[b], code), coalgebras[a], h);
          if (!same_type(lhs, rhs))
            v.fail("naturality fails along a map " + describe_coalgebra(coalgebras[a]) + " -> " +
                   describe_coalgebra(coalgebras[b]));
        }
  v.note(std::to_string(squares) + " naturality squares");
  return v;
}

Verdict coalgebra_realignment_check(const CoalgebraClassifier& cls,
                                    const std::vector<Coalgebra>& coalgebras,
                                    const Ceiling& ceiling) {
  const ComonadPtr& w = cls.comonad;
  struct Ctx {
    Coalgebra coalgebra;
    std::vector<PresheafMap> codes;
  };
  std::vector<Ctx> ctxs;
  std::vector<PresheafMap> incl;
  RealignmentProblem p;
  auto add_context = [&](const Coalgebra& x) {
    ctxs.push_back({x, coalgebra_maps(*w, x, cls.object_coalgebra, ceiling)});
    p.contexts.push_back(describe_coalgebra(x));
    return static_cast<int>(ctxs.size()) - 1;
  };
  for (const auto& x : coalgebras) {
    int to = add_context(x);
    for (const auto& s : subcoalgebras(*w, x, ceiling)) {
      auto [sub, m] = subcoalgebra(*w, x, s);
      int from = add_context(sub);
      incl.push_back(m);
      p.monos.push_back({from, to, "into " + describe_coalgebra(x) + " from " + describe_coalgebra(sub)});
    }
  }
  auto mono_map = [&](const RealignmentProblem::Mono& m) -> const PresheafMap& {
    for (std::size_t k = 0; k < p.monos.size(); ++k)
      if (p.monos[k].from == m.from && p.monos[k].to == m.to) return incl[k];
    throw Error(ErrorKind::UnknownId, "unknown mono");
  };
  p.num_codes = [&](int ctx) { return static_cast<int>(ctxs[ctx].codes.size()); };
  p.restrict_code = [&](const RealignmentProblem::Mono& m, int code) {
    PresheafMap r = compose(ctxs[m.to].codes[code], mono_map(m));
    const auto& cs = ctxs[m.from].codes;
    for (std::size_t k = 0; k < cs.size(); ++k)
      if (cs[k].components == r.components) return static_cast<int>(k);
    throw Error(ErrorKind::UnknownId, "restricted code not enumerated");
  };
  p.isos = [&](int ctx, int x, int y) {
    CoalgebraType a = cls.decode(ctxs[ctx].coalgebra, ctxs[ctx].codes[x]);
    CoalgebraType b = cls.decode(ctxs[ctx].coalgebra, ctxs[ctx].codes[y]);
    std::vector<RealignmentProblem::Iso> out;
    for (const auto& t : coalgebra_type_maps(w, a, b, ceiling))
      if (is_iso(t)) out.push_back(flatten(t));
    return out;
  };
  p.restrict_iso = [&](const RealignmentProblem::Mono& m, const RealignmentProblem::Iso& iso) {
    const PresheafMap& inc = mono_map(m);
    auto fn = unflatten(iso);
    RealignmentProblem::Iso out;
    for (std::size_t i = 0; i < inc.components.size(); ++i) {
      out.push_back(static_cast<int>(inc.components[i].size()));
      for (int g : inc.components[i]) {
        out.push_back(static_cast<int>(fn[i][g].size()));
        out.insert(out.end(), fn[i][g].begin(), fn[i][g].end());
      }
    }
    return out;
  };
  return realignment_search(p, ceiling);
}

// ---- comparison ----

Verdict comparison_check(const std::shared_ptr<const KanAdjunction>& adj, int bound,
                         const Ceiling& ceiling) {
  Verdict v;
  ComonadPtr w = comonad_from_adjunction(adj);
  std::vector<PresheafPtr> xs;
  std::vector<Coalgebra> ks;
  for (auto& p : enumerate_presheaves(adj->large(), bound, ceiling)) {
    PresheafPtr x = share(std::move(p));
    Coalgebra k{adj->restrict(x), adj->restrict(adj->unit(x))};
    if (!validate_coalgebra(*w, k).ok()) v.fail("K(" + describe(*x) + ") is not a coalgebra");
    xs.push_back(x);
    ks.push_back(k);
  }
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < xs.size(); ++b) {
      auto plain = enumerate_maps(xs[a], xs[b], ceiling);
      auto coalg = coalgebra_maps(*w, ks[a], ks[b], ceiling);
      std::string at = describe(*xs[a]) + " -> " + describe(*xs[b]);
      std::set<std::vector<std::vector<int>>> images;
      for (const auto& h : plain) {
        PresheafMap kh = adj->restrict(h);
        if (!is_coalgebra_map(*w, ks[a], ks[b], kh)) v.fail("K(h) is not coalgebraic at " + at);
        images.insert(kh.components);
      }
      if (images.size() != plain.size()) v.fail("K is not faithful at " + at);
      if (images.size() != coalg.size())
        v.fail("K is not full at " + at + ": " + std::to_string(images.size()) + " of " +
               std::to_string(coalg.size()) + " coalgebra maps");
    }
  auto all = enumerate_coalgebras(*w, bound, ceiling);
  for (const auto& c : all) {
    bool found = false;
    for (std::size_t a = 0; a < ks.size() && !found; ++a) {
      if (ks[a].carrier->sizes != c.carrier->sizes) continue;
      for (const auto& h : coalgebra_maps(*w, c, ks[a], ceiling))
        if (is_iso(h)) {
          found = true;
          break;
        }
    }
    if (!found) v.fail("coalgebra on " + describe_coalgebra(c) + " is not in the image of K");
  }
  v.note(std::to_string(xs.size()) + " presheaves, " + std::to_string(all.size()) + " coalgebras");
  return v;
}

Verdict faithfulness_check(const KanAdjunction& adj, const std::vector<PresheafPtr>& suite,
                           const Ceiling& ceiling) {
  Verdict v;
  for (const auto& p : suite)
    for (const auto& q : suite) {
      std::map<std::vector<std::vector<int>>, std::vector<std::vector<int>>> seen;
      for (const auto& h : enumerate_maps(p, q, ceiling)) {
        auto key = adj.restrict(h).components;
        auto [it, fresh] = seen.emplace(key, h.components);
        if (!fresh) {
          std::string w = describe(*p) + " -> " + describe(*q) + ": maps differ but restrict equally";
          v.fail(w);
          break;
        }
      }
    }
  return v;
}

}  // namespace s4sem
