#include "s4sem/natmodel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "csp.hpp"

namespace s4sem {

namespace {

void require_same_context(const PresheafPtr& a, const PresheafPtr& b, const char* what) {
  if (a != b && !(*a == *b)) throw Error(ErrorKind::ContextMismatch, what);
}

}  // namespace

// Self-delimiting: per object a count of context elements, then per element
// the fiber length followed by the values.
std::vector<int> flatten(const TypeMap& m) {
  std::vector<int> out;
  for (const auto& per_object : m.fn) {
    out.push_back(static_cast<int>(per_object.size()));
    for (const auto& per_elem : per_object) {
      out.push_back(static_cast<int>(per_elem.size()));
      out.insert(out.end(), per_elem.begin(), per_elem.end());
    }
  }
  return out;
}

std::vector<std::vector<std::vector<int>>> unflatten(const std::vector<int>& flat) {
  std::vector<std::vector<std::vector<int>>> fn;
  std::size_t k = 0;
  while (k < flat.size()) {
    int n = flat[k++];
    std::vector<std::vector<int>> per_object;
    for (int g = 0; g < n; ++g) {
      int len = flat[k++];
      per_object.emplace_back(flat.begin() + k, flat.begin() + k + len);
      k += len;
    }
    fn.push_back(std::move(per_object));
  }
  return fn;
}

int TypeOverContext::max_fiber() const {
  int n = 0;
  for (const auto& row : fiber)
    for (int s : row) n = std::max(n, s);
  return n;
}

bool TypeOverContext::operator==(const TypeOverContext& other) const {
  return fiber == other.fiber && restrict == other.restrict &&
         (context == other.context || *context == *other.context);
}

bool TermOverContext::operator==(const TermOverContext& other) const {
  return pick == other.pick && *type == *other.type;
}

bool TypeMap::operator==(const TypeMap& other) const {
  return fn == other.fn && *source == *other.source && *target == *other.target;
}

void Verdict::merge(const Verdict& other, const std::string& prefix) {
  if (!other.ok) ok = false;
  for (const auto& n : other.notes) notes.push_back(prefix + n);
  for (const auto& f : other.failures) failures.push_back(prefix + f);
}

Presheaf type_as_presheaf(const TypeOverContext& a, const Elements& el) {
  Presheaf p{el.cat, {}, {}};
  for (auto [i, g] : el.element) p.sizes.push_back(a.fiber[i][g]);
  for (const auto& per_f : a.restrict)
    for (const auto& fn : per_f) p.action.push_back(fn);
  return p;
}

TypePtr presheaf_as_type(const PresheafPtr& context, const Elements& el, const Presheaf& p) {
  const FinCat& c = *context->base;
  TypeOverContext a{context, {}, {}};
  a.fiber.resize(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i)
    for (int g = 0; g < context->size(i); ++g) a.fiber[i].push_back(p.size(el.object_of[i][g]));
  int m = 0;
  a.restrict.resize(c.num_morphisms());
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int g = 0; g < context->size(c.dst(f)); ++g) a.restrict[f].push_back(p.action[m++]);
  return share(std::move(a));
}

PresheafMap type_map_as_presheaf_map(const TypeMap& m, const Elements& el,
                                     const PresheafPtr& src, const PresheafPtr& dst) {
  PresheafMap out{src, dst, {}};
  for (auto [i, g] : el.element) out.components.push_back(m.fn[i][g]);
  return out;
}

ValidationReport validate_type(const TypeOverContext& a) {
  const FinCat& c = *a.context->base;
  if (static_cast<int>(a.fiber.size()) != c.num_objects() ||
      static_cast<int>(a.restrict.size()) != c.num_morphisms())
    throw Error(ErrorKind::Shape, "type tables do not match the context's base");
  for (int i = 0; i < c.num_objects(); ++i)
    if (static_cast<int>(a.fiber[i].size()) != a.context->size(i))
      throw Error(ErrorKind::Shape, "type fibers not given for every context element");
  for (int f = 0; f < c.num_morphisms(); ++f)
    if (static_cast<int>(a.restrict[f].size()) != a.context->size(c.dst(f)))
      throw Error(ErrorKind::Shape, "type restriction not given for every context element");
  Elements el = category_of_elements(*a.context);
  return validate_presheaf(type_as_presheaf(a, el));
}

ValidationReport validate_term(const TermOverContext& t) {
  ValidationReport r = validate_type(*t.type);
  if (!r.ok()) return r;
  const TypeOverContext& a = *t.type;
  const FinCat& c = *a.context->base;
  for (int i = 0; i < c.num_objects(); ++i)
    for (int g = 0; g < a.context->size(i); ++g)
      if (t.pick[i][g] < 0 || t.pick[i][g] >= a.size(i, g))
        throw Error(ErrorKind::Shape, "term picks outside its fiber");
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int g = 0; g < a.context->size(c.dst(f)); ++g)
      if (a.act(f, g, t.pick[c.dst(f)][g]) != t.pick[c.src(f)][a.context->act(f, g)])
        r.add("term naturality", c.morphism_name(f) + " at context element " + std::to_string(g));
  return r;
}

ValidationReport validate_type_map(const TypeMap& m) {
  require_same_context(m.source->context, m.target->context, "type map between different contexts");
  ValidationReport r;
  const TypeOverContext& a = *m.source;
  const TypeOverContext& b = *m.target;
  const FinCat& c = *a.context->base;
  for (int i = 0; i < c.num_objects(); ++i)
    for (int g = 0; g < a.context->size(i); ++g) {
      if (static_cast<int>(m.fn[i][g].size()) != a.size(i, g))
        throw Error(ErrorKind::Shape, "type map not total on a fiber");
      for (int v : m.fn[i][g])
        if (v < 0 || v >= b.size(i, g)) throw Error(ErrorKind::Shape, "type map leaves its target");
    }
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int g = 0; g < a.context->size(c.dst(f)); ++g) {
      int gf = a.context->act(f, g);
      for (int x = 0; x < a.size(c.dst(f), g); ++x)
        if (m(c.src(f), gf, a.act(f, g, x)) != b.act(f, g, m(c.dst(f), g, x))) {
          r.add("fiberwise naturality", c.morphism_name(f) + " at context element " +
                                            std::to_string(g));
          break;
        }
    }
  return r;
}

TypePtr unit_type(const PresheafPtr& context) {
  const FinCat& c = *context->base;
  TypeOverContext a{context, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) a.fiber.emplace_back(context->size(i), 1);
  for (int f = 0; f < c.num_morphisms(); ++f)
    a.restrict.emplace_back(context->size(c.dst(f)), std::vector<int>{0});
  return share(std::move(a));
}

TypePtr constant_type(const PresheafPtr& context, const PresheafPtr& q) {
  const FinCat& c = *context->base;
  TypeOverContext a{context, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) a.fiber.emplace_back(context->size(i), q->size(i));
  for (int f = 0; f < c.num_morphisms(); ++f)
    a.restrict.emplace_back(context->size(c.dst(f)), q->action[f]);
  return share(std::move(a));
}

TypeMap identity_type_map(const TypePtr& a) {
  TypeMap m{a, a, {}};
  for (const auto& row : a->fiber) {
    std::vector<std::vector<int>> per;
    for (int s : row) {
      std::vector<int> id(s);
      for (int x = 0; x < s; ++x) id[x] = x;
      per.push_back(std::move(id));
    }
    m.fn.push_back(std::move(per));
  }
  return m;
}

TypeMap compose(const TypeMap& g, const TypeMap& f) {
  if (!(*f.target == *g.source))
    throw Error(ErrorKind::ContextMismatch, "type map composition: types differ");
  TypeMap h{f.source, g.target, f.fn};
  for (std::size_t i = 0; i < h.fn.size(); ++i)
    for (std::size_t e = 0; e < h.fn[i].size(); ++e)
      for (auto& v : h.fn[i][e]) v = g.fn[i][e][v];
  return h;
}

bool is_iso(const TypeMap& m) {
  for (std::size_t i = 0; i < m.fn.size(); ++i)
    for (std::size_t e = 0; e < m.fn[i].size(); ++e) {
      const auto& comp = m.fn[i][e];
      if (static_cast<int>(comp.size()) != m.target->fiber[i][e]) return false;
      std::set<int> seen(comp.begin(), comp.end());
      if (seen.size() != comp.size()) return false;
    }
  return true;
}

TypeMap inverse(const TypeMap& iso) {
  if (!is_iso(iso)) throw Error(ErrorKind::Rejected, "inverse of a non-isomorphism of types");
  TypeMap inv{iso.target, iso.source, iso.fn};
  for (std::size_t i = 0; i < iso.fn.size(); ++i)
    for (std::size_t e = 0; e < iso.fn[i].size(); ++e)
      for (std::size_t x = 0; x < iso.fn[i][e].size(); ++x)
        inv.fn[i][e][iso.fn[i][e][x]] = static_cast<int>(x);
  return inv;
}

std::vector<TypePtr> enumerate_types(const PresheafPtr& context, int max_fiber,
                                     const Ceiling& ceiling) {
  Elements el = category_of_elements(*context);
  std::vector<TypePtr> out;
  for (const auto& p : enumerate_presheaves(el.cat, max_fiber, ceiling))
    out.push_back(presheaf_as_type(context, el, p));
  return out;
}

void for_each_type_map(const TypePtr& a, const TypePtr& b,
                       const std::function<bool(const TypeMap&)>& visit, const Ceiling& ceiling) {
  require_same_context(a->context, b->context, "type maps between different contexts");
  Elements el = category_of_elements(*a->context);
  auto pa = share(type_as_presheaf(*a, el));
  auto pb = share(type_as_presheaf(*b, el));
  const FinCat& c = *a->context->base;
  for_each_map(pa, pb, [&](const PresheafMap& m) {
    TypeMap t{a, b, {}};
    t.fn.resize(c.num_objects());
    for (int i = 0; i < c.num_objects(); ++i)
      for (int g = 0; g < a->context->size(i); ++g) t.fn[i].push_back(m.components[el.object_of[i][g]]);
    return visit(t);
  }, ceiling);
}

std::vector<TypeMap> enumerate_type_maps(const TypePtr& a, const TypePtr& b,
                                         const Ceiling& ceiling) {
  std::vector<TypeMap> out;
  for_each_type_map(a, b, [&](const TypeMap& m) {
    out.push_back(m);
    return true;
  }, ceiling);
  return out;
}

std::vector<TermOverContext> enumerate_terms(const TypePtr& a, const Ceiling& ceiling) {
  std::vector<TermOverContext> out;
  for_each_type_map(unit_type(a->context), a, [&](const TypeMap& m) {
    TermOverContext t{a, {}};
    for (const auto& row : m.fn) {
      std::vector<int> pick;
      for (const auto& fn : row) pick.push_back(fn[0]);
      t.pick.push_back(std::move(pick));
    }
    out.push_back(std::move(t));
    return true;
  }, ceiling);
  return out;
}

TypePtr subst(const TypePtr& a, const PresheafMap& alpha) {
  require_same_context(alpha.target, a->context, "substitution: context mismatch");
  const FinCat& c = *alpha.source->base;
  TypeOverContext out{alpha.source, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> row;
    for (int d = 0; d < alpha.source->size(i); ++d) row.push_back(a->fiber[i][alpha(i, d)]);
    out.fiber.push_back(std::move(row));
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    std::vector<std::vector<int>> row;
    for (int d = 0; d < alpha.source->size(c.dst(f)); ++d)
      row.push_back(a->restrict[f][alpha(c.dst(f), d)]);
    out.restrict.push_back(std::move(row));
  }
  return share(std::move(out));
}

TermOverContext subst(const TermOverContext& t, const PresheafMap& alpha) {
  TermOverContext out{subst(t.type, alpha), {}};
  for (std::size_t i = 0; i < alpha.components.size(); ++i) {
    std::vector<int> row;
    for (int v : alpha.components[i]) row.push_back(t.pick[i][v]);
    out.pick.push_back(std::move(row));
  }
  return out;
}

TypeMap subst(const TypeMap& m, const PresheafMap& alpha) {
  TypeMap out{subst(m.source, alpha), subst(m.target, alpha), {}};
  for (std::size_t i = 0; i < alpha.components.size(); ++i) {
    std::vector<std::vector<int>> row;
    for (int v : alpha.components[i]) row.push_back(m.fn[i][v]);
    out.fn.push_back(std::move(row));
  }
  return out;
}

Comprehension comprehension_shape(const TypePtr& a) {
  const PresheafPtr& g = a->context;
  const FinCat& c = *g->base;
  Comprehension out;
  out.type = a;
  out.offset.resize(c.num_objects());
  out.pairs.resize(c.num_objects());
  Presheaf obj{g->base, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    int n = 0;
    for (int x = 0; x < g->size(i); ++x) {
      out.offset[i].push_back(n);
      for (int v = 0; v < a->size(i, x); ++v) out.pairs[i].emplace_back(x, v);
      n += a->size(i, x);
    }
    obj.sizes.push_back(n);
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    std::vector<int> act;
    for (auto [x, v] : out.pairs[c.dst(f)])
      act.push_back(out.index(c.src(f), g->act(f, x), a->act(f, x, v)));
    obj.action.push_back(std::move(act));
  }
  out.object = share(std::move(obj));
  out.proj = {out.object, g, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> comp;
    for (auto [x, v] : out.pairs[i]) comp.push_back(x);
    out.proj.components.push_back(std::move(comp));
  }
  return out;
}

Comprehension comprehension(const TypePtr& a) {
  Comprehension out = comprehension_shape(a);
  out.generic.type = subst(a, out.proj);
  for (const auto& row : out.pairs) {
    std::vector<int> pick;
    for (auto [x, v] : row) pick.push_back(v);
    out.generic.pick.push_back(std::move(pick));
  }
  return out;
}

PresheafMap q_map(const TypePtr& a, const PresheafMap& alpha) {
  Comprehension lower = comprehension_shape(subst(a, alpha));
  Comprehension upper = comprehension_shape(a);
  PresheafMap m{lower.object, upper.object, {}};
  for (std::size_t i = 0; i < lower.pairs.size(); ++i) {
    std::vector<int> comp;
    for (auto [d, v] : lower.pairs[i])
      comp.push_back(upper.index(static_cast<int>(i), alpha(static_cast<int>(i), d), v));
    m.components.push_back(std::move(comp));
  }
  return m;
}

PresheafMap bar(const TermOverContext& t) {
  Comprehension cx = comprehension_shape(t.type);
  PresheafMap m{t.type->context, cx.object, {}};
  for (std::size_t i = 0; i < t.pick.size(); ++i) {
    std::vector<int> comp;
    for (std::size_t x = 0; x < t.pick[i].size(); ++x)
      comp.push_back(cx.index(static_cast<int>(i), static_cast<int>(x), t.pick[i][x]));
    m.components.push_back(std::move(comp));
  }
  return m;
}

TermOverContext section_term(const TypePtr& a, const PresheafMap& s) {
  Comprehension cx = comprehension_shape(a);
  TermOverContext t{a, {}};
  for (std::size_t i = 0; i < s.components.size(); ++i) {
    std::vector<int> pick;
    for (std::size_t x = 0; x < s.components[i].size(); ++x) {
      auto [g, v] = cx.element(static_cast<int>(i), s.components[i][x]);
      if (g != static_cast<int>(x)) throw Error(ErrorKind::Rejected, "not a section of p_A");
      pick.push_back(v);
    }
    t.pick.push_back(std::move(pick));
  }
  return t;
}

TermOverContext apply(const TypeMap& m, const TermOverContext& t) {
  if (!(*m.source == *t.type)) throw Error(ErrorKind::ContextMismatch, "apply: type mismatch");
  TermOverContext out{m.target, t.pick};
  for (std::size_t i = 0; i < out.pick.size(); ++i)
    for (std::size_t x = 0; x < out.pick[i].size(); ++x) out.pick[i][x] = m.fn[i][x][t.pick[i][x]];
  return out;
}

PresheafMap comprehension_map(const TypeMap& m) {
  Comprehension a = comprehension_shape(m.source);
  Comprehension b = comprehension_shape(m.target);
  PresheafMap out{a.object, b.object, {}};
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    std::vector<int> comp;
    for (auto [g, v] : a.pairs[i])
      comp.push_back(b.index(static_cast<int>(i), g, m.fn[i][g][v]));
    out.components.push_back(std::move(comp));
  }
  return out;
}

bool is_display(const NaturalModelInstance& m, const PresheafMap& f) {
  for (std::size_t i = 0; i < f.components.size(); ++i) {
    std::vector<int> count(f.target->size(static_cast<int>(i)), 0);
    for (int v : f.components[i])
      if (++count[v] > m.bound) return false;
  }
  return true;
}

TypePtr fiber_type(const PresheafMap& f) {
  const FinCat& c = *f.source->base;
  std::vector<std::vector<int>> rank(c.num_objects());
  TypeOverContext a{f.target, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> count(f.target->size(i), 0);
    for (int v : f.components[i]) rank[i].push_back(count[v]++);
    a.fiber.push_back(std::move(count));
  }
  a.restrict.resize(c.num_morphisms());
  for (int g = 0; g < c.num_morphisms(); ++g) {
    int i = c.dst(g), j = c.src(g);
    a.restrict[g].resize(f.target->size(i));
    for (int x = 0; x < f.target->size(i); ++x) a.restrict[g][x].resize(a.fiber[i][x]);
    for (int e = 0; e < f.source->size(i); ++e)
      a.restrict[g][f(i, e)][rank[i][e]] = rank[j][f.source->act(g, e)];
  }
  return share(std::move(a));
}

PresheafMap fiber_iso(const PresheafMap& f) {
  Comprehension cx = comprehension_shape(fiber_type(f));
  PresheafMap m{f.source, cx.object, {}};
  for (std::size_t i = 0; i < f.components.size(); ++i) {
    std::vector<int> count(f.target->size(static_cast<int>(i)), 0);
    std::vector<int> comp;
    for (int v : f.components[i]) comp.push_back(cx.index(static_cast<int>(i), v, count[v]++));
    m.components.push_back(std::move(comp));
  }
  return m;
}

SigmaType sigma_type(const TypePtr& a, const TypePtr& b) {
  Comprehension ca = comprehension_shape(a);
  require_same_context(b->context, ca.object, "sigma: second type not over the comprehension");
  const PresheafPtr& g = a->context;
  const FinCat& c = *g->base;
  SigmaType s;
  s.first = a;
  s.second = b;
  s.pairs.resize(c.num_objects());
  s.index.resize(c.num_objects());
  TypeOverContext t{g, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> row;
    for (int x = 0; x < g->size(i); ++x) {
      std::vector<std::pair<int, int>> ps;
      std::map<std::pair<int, int>, int> idx;
      for (int v = 0; v < a->size(i, x); ++v)
        for (int w = 0; w < b->size(i, ca.index(i, x, v)); ++w) {
          idx[{v, w}] = static_cast<int>(ps.size());
          ps.emplace_back(v, w);
        }
      row.push_back(static_cast<int>(ps.size()));
      s.pairs[i].push_back(std::move(ps));
      s.index[i].push_back(std::move(idx));
    }
    t.fiber.push_back(std::move(row));
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int i = c.dst(f), j = c.src(f);
    std::vector<std::vector<int>> row;
    for (int x = 0; x < g->size(i); ++x) {
      int xf = g->act(f, x);
      std::vector<int> fn;
      for (auto [v, w] : s.pairs[i][x]) {
        int vf = a->act(f, x, v);
        int wf = b->act(f, ca.index(i, x, v), w);
        fn.push_back(s.index[j][xf].at({vf, wf}));
      }
      row.push_back(std::move(fn));
    }
    t.restrict.push_back(std::move(row));
  }
  s.type = share(std::move(t));
  return s;
}

PresheafMap sigma_iso(const SigmaType& s) {
  Comprehension ca = comprehension_shape(s.first);
  Comprehension cb = comprehension_shape(s.second);
  Comprehension cs = comprehension_shape(s.type);
  PresheafMap m{cb.object, cs.object, {}};
  for (std::size_t i = 0; i < cb.pairs.size(); ++i) {
    std::vector<int> comp;
    for (auto [e, w] : cb.pairs[i]) {
      auto [x, v] = ca.element(static_cast<int>(i), e);
      comp.push_back(cs.index(static_cast<int>(i), x, s.index[i][x].at({v, w})));
    }
    m.components.push_back(std::move(comp));
  }
  return m;
}

int PiType::slot_of(int object, int g, int arrow, int a) const {
  const auto& sl = slots[object][g];
  for (std::size_t s = 0; s < sl.size(); ++s)
    if (sl[s].arrow == arrow && sl[s].a == a) return static_cast<int>(s);
  throw Error(ErrorKind::UnknownId, "pi: no such slot");
}

int PiType::apply(int object, int g, int k, int a) const {
  return families[object][g][k][slot_of(object, g, domain->context->base->identity(object), a)];
}

PiType pi_type(const TypePtr& a, const TypePtr& b, const Ceiling& ceiling) {
  Comprehension ca = comprehension_shape(a);
  require_same_context(b->context, ca.object, "pi: codomain not over the comprehension");
  const PresheafPtr& g = a->context;
  const FinCat& c = *g->base;
  PiType pi;
  pi.domain = a;
  pi.codomain = b;
  pi.slots.resize(c.num_objects());
  pi.families.resize(c.num_objects());
  pi.index.resize(c.num_objects());
  TypeOverContext t{g, {}, {}};
  t.fiber.resize(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i)
    for (int x = 0; x < g->size(i); ++x) {
      std::vector<PiType::Slot> sl;
      std::map<std::pair<int, int>, int> slot_index;
      for (int j = 0; j < c.num_objects(); ++j)
        for (int f : c.hom(j, i))
          for (int v = 0; v < a->size(j, g->act(f, x)); ++v) {
            slot_index[{f, v}] = static_cast<int>(sl.size());
            sl.push_back({j, f, v});
          }
      detail::Csp csp;
      for (const auto& s : sl) csp.add_variable(b->size(s.object, ca.index(s.object, g->act(s.arrow, x), s.a)));
      for (int s = 0; s < static_cast<int>(sl.size()); ++s) {
        int j = sl[s].object;
        int xf = g->act(sl[s].arrow, x);
        int e = ca.index(j, xf, sl[s].a);
        for (int h : c.arrows_into(j)) {
          int t2 = slot_index.at({c.compose(sl[s].arrow, h), a->act(h, xf, sl[s].a)});
          const auto* bh = &b->restrict[h][e];
          csp.add_check(std::max(s, t2), [s, t2, bh](const detail::Csp::Assignment& val) {
            return val[t2] == (*bh)[val[s]];
          });
        }
      }
      std::vector<std::vector<int>> fams;
      std::map<std::vector<int>, int> idx;
      csp.solve(
          [&](const detail::Csp::Assignment& val) {
            idx[val] = static_cast<int>(fams.size());
            fams.push_back(val);
            return true;
          },
          ceiling, "dependent product");
      t.fiber[i].push_back(static_cast<int>(fams.size()));
      pi.slots[i].push_back(std::move(sl));
      pi.families[i].push_back(std::move(fams));
      pi.index[i].push_back(std::move(idx));
    }
  for (int h = 0; h < c.num_morphisms(); ++h) {
    int i = c.dst(h), ip = c.src(h);
    std::vector<std::vector<int>> row;
    for (int x = 0; x < g->size(i); ++x) {
      int xh = g->act(h, x);
      std::vector<int> fn;
      for (const auto& fam : pi.families[i][x]) {
        std::vector<int> moved;
        for (const auto& s : pi.slots[ip][xh])
          moved.push_back(fam[pi.slot_of(i, x, c.compose(h, s.arrow), s.a)]);
        fn.push_back(pi.index[ip][xh].at(moved));
      }
      row.push_back(std::move(fn));
    }
    t.restrict.push_back(std::move(row));
  }
  pi.type = share(std::move(t));
  return pi;
}

TypeMap pi_eval(const PiType& pi) {
  Comprehension ca = comprehension_shape(pi.domain);
  TypeMap m{subst(pi.type, ca.proj), pi.codomain, {}};
  for (std::size_t i = 0; i < ca.pairs.size(); ++i) {
    std::vector<std::vector<int>> row;
    for (auto [x, v] : ca.pairs[i]) {
      std::vector<int> fn;
      for (int k = 0; k < pi.type->size(static_cast<int>(i), x); ++k)
        fn.push_back(pi.apply(static_cast<int>(i), x, k, v));
      row.push_back(std::move(fn));
    }
    m.fn.push_back(std::move(row));
  }
  return m;
}

TypeMap pi_lambda(const PiType& pi, const TypePtr& r, const TypeMap& h) {
  Comprehension ca = comprehension_shape(pi.domain);
  const PresheafPtr& g = pi.domain->context;
  const FinCat& c = *g->base;
  TypeMap m{r, pi.type, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<std::vector<int>> row;
    for (int x = 0; x < g->size(i); ++x) {
      std::vector<int> fn;
      for (int y = 0; y < r->size(i, x); ++y) {
        std::vector<int> fam;
        for (const auto& s : pi.slots[i][x]) {
          int xf = g->act(s.arrow, x);
          fam.push_back(h(s.object, ca.index(s.object, xf, s.a), r->act(s.arrow, x, y)));
        }
        fn.push_back(pi.index[i][x].at(fam));
      }
      row.push_back(std::move(fn));
    }
    m.fn.push_back(std::move(row));
  }
  return m;
}

int slice_morphism(const Slice& s, int from, int to, int arrow) {
  const FinCat& c = *s.cat;
  for (int m : c.hom(from, to))
    if (s.morphism_arrow[m] == arrow) return m;
  return -1;
}

Presheaf restrict_along(const Slice& upper, const Slice& lower, int f, const Presheaf& x) {
  const FinCat& base = *upper.projection.target;
  const FinCat& lc = *lower.cat;
  Presheaf out{lower.cat, {}, {}};
  std::vector<int> image(lc.num_objects());
  for (int o = 0; o < lc.num_objects(); ++o) {
    image[o] = upper.object_of_arrow[base.compose(f, lower.object_arrow[o])];
    out.sizes.push_back(x.size(image[o]));
  }
  for (int m = 0; m < lc.num_morphisms(); ++m) {
    int um = slice_morphism(upper, image[lc.src(m)], image[lc.dst(m)], lower.morphism_arrow[m]);
    out.action.push_back(x.action[um]);
  }
  return out;
}

int HSUniverse::index_of(int object, const Presheaf& code) const {
  auto it = code_index[object].find(code);
  if (it == code_index[object].end())
    throw Error(ErrorKind::NotDisplay, "code outside the bounded universe");
  return it->second;
}

Presheaf HSUniverse::restrict_code(int f, const Presheaf& code) const {
  const FinCat& c = *model.base;
  return restrict_along(slices[c.dst(f)], slices[c.src(f)], f, code);
}

HSUniverse hs_universe(const NaturalModelInstance& m) {
  const CatPtr& c = m.base;
  HSUniverse u;
  u.model = m;
  Presheaf uu{c, {}, {}};
  for (int i = 0; i < c->num_objects(); ++i) {
    u.slices.push_back(slice(c, i));
    u.codes.push_back(enumerate_presheaves(u.slices[i].cat, m.bound, m.ceiling));
    m.ceiling.check(static_cast<long long>(u.codes[i].size()), "universe level");
    std::map<Presheaf, int> idx;
    for (std::size_t k = 0; k < u.codes[i].size(); ++k) idx[u.codes[i][k]] = static_cast<int>(k);
    u.code_index.push_back(std::move(idx));
    uu.sizes.push_back(static_cast<int>(u.codes[i].size()));
  }
  for (int f = 0; f < c->num_morphisms(); ++f) {
    std::vector<int> act;
    for (const auto& x : u.codes[c->dst(f)]) act.push_back(u.index_of(c->src(f), u.restrict_code(f, x)));
    uu.action.push_back(std::move(act));
  }
  u.U = share(std::move(uu));
  // Upt: (code, element at id_I), code-major
  Presheaf pt{c, {}, {}};
  std::vector<std::vector<int>> offset(c->num_objects());
  for (int i = 0; i < c->num_objects(); ++i) {
    int n = 0;
    for (const auto& x : u.codes[i]) {
      offset[i].push_back(n);
      n += x.size(u.slices[i].id_object());
    }
    pt.sizes.push_back(n);
  }
  for (int f = 0; f < c->num_morphisms(); ++f) {
    int i = c->dst(f), j = c->src(f);
    const Slice& s = u.slices[i];
    int along = slice_morphism(s, s.object_of_arrow[f], s.id_object(), f);
    std::vector<int> act;
    for (std::size_t k = 0; k < u.codes[i].size(); ++k)
      for (int x = 0; x < u.codes[i][k].size(s.id_object()); ++x)
        act.push_back(offset[j][u.U->act(f, static_cast<int>(k))] + u.codes[i][k].act(along, x));
    pt.action.push_back(std::move(act));
  }
  u.Upt = share(std::move(pt));
  u.proj = {u.Upt, u.U, {}};
  for (int i = 0; i < c->num_objects(); ++i) {
    std::vector<int> comp;
    for (std::size_t k = 0; k < u.codes[i].size(); ++k)
      for (int x = 0; x < u.codes[i][k].size(u.slices[i].id_object()); ++x)
        comp.push_back(static_cast<int>(k));
    u.proj.components.push_back(std::move(comp));
  }
  return u;
}

TypePtr decode(const HSUniverse& u, const PresheafMap& code) {
  require_same_context(code.target, u.U, "decode: not a map into the universe");
  const FinCat& c = *u.model.base;
  const PresheafPtr& g = code.source;
  TypeOverContext a{g, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> row;
    for (int x = 0; x < g->size(i); ++x)
      row.push_back(u.codes[i][code(i, x)].size(u.slices[i].id_object()));
    a.fiber.push_back(std::move(row));
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int i = c.dst(f);
    const Slice& s = u.slices[i];
    int along = slice_morphism(s, s.object_of_arrow[f], s.id_object(), f);
    std::vector<std::vector<int>> row;
    for (int x = 0; x < g->size(i); ++x) row.push_back(u.codes[i][code(i, x)].action[along]);
    a.restrict.push_back(std::move(row));
  }
  return share(std::move(a));
}

PresheafMap encode(const HSUniverse& u, const PresheafMap& display) {
  if (!is_display(u.model, display))
    throw Error(ErrorKind::NotDisplay, "encode: a fiber exceeds the bound " +
                                           std::to_string(u.model.bound));
  const FinCat& c = *u.model.base;
  const PresheafPtr& e = display.source;
  const PresheafPtr& g = display.target;
  // rank of each element of E within its fiber
  std::vector<std::vector<int>> rank(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> count(g->size(i), 0);
    for (int v : display.components[i]) rank[i].push_back(count[v]++);
  }
  PresheafMap out{g, u.U, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    const Slice& s = u.slices[i];
    const FinCat& sc = *s.cat;
    std::vector<int> comp;
    for (int x = 0; x < g->size(i); ++x) {
      Presheaf code{s.cat, {}, {}};
      std::vector<std::vector<int>> members(sc.num_objects());
      for (int o = 0; o < sc.num_objects(); ++o) {
        int arrow = s.object_arrow[o];
        int over = g->act(arrow, x);
        for (int y = 0; y < e->size(c.src(arrow)); ++y)
          if (display(c.src(arrow), y) == over) members[o].push_back(y);
        code.sizes.push_back(static_cast<int>(members[o].size()));
      }
      for (int m = 0; m < sc.num_morphisms(); ++m) {
        int h = s.morphism_arrow[m];
        std::vector<int> act;
        for (int y : members[sc.dst(m)]) act.push_back(rank[c.src(h)][e->act(h, y)]);
        code.action.push_back(std::move(act));
      }
      comp.push_back(u.index_of(i, code));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

PresheafMap encode_type(const HSUniverse& u, const TypePtr& a) {
  return encode(u, comprehension_shape(a).proj);
}

int UniverseCategory::index_of(int object, const Arrow& a) const {
  auto it = arrow_index[object].find({a.from, a.to, a.components});
  if (it == arrow_index[object].end())
    throw Error(ErrorKind::UnknownId, "arrow outside the universe category");
  return it->second;
}

UniverseCategory universe_category(const HSUniverse& u) {
  const CatPtr& c = u.model.base;
  UniverseCategory cat;
  cat.universe = &u;
  Presheaf mor{c, {}, {}};
  long long total = 0;
  for (int i = 0; i < c->num_objects(); ++i) {
    std::vector<UniverseCategory::Arrow> row;
    std::vector<PresheafPtr> shared;
    for (const auto& x : u.codes[i]) shared.push_back(share(x));
    for (std::size_t x = 0; x < shared.size(); ++x)
      for (std::size_t y = 0; y < shared.size(); ++y)
        for_each_map(shared[x], shared[y], [&](const PresheafMap& phi) {
          u.model.ceiling.check(++total, "universe arrows");
          row.push_back({static_cast<int>(x), static_cast<int>(y), phi.components});
          return true;
        }, u.model.ceiling);
    std::map<std::tuple<int, int, std::vector<std::vector<int>>>, int> idx;
    for (std::size_t k = 0; k < row.size(); ++k)
      idx[{row[k].from, row[k].to, row[k].components}] = static_cast<int>(k);
    mor.sizes.push_back(static_cast<int>(row.size()));
    cat.arrows.push_back(std::move(row));
    cat.arrow_index.push_back(std::move(idx));
  }
  for (int f = 0; f < c->num_morphisms(); ++f) {
    int i = c->dst(f), j = c->src(f);
    const Slice& upper = u.slices[i];
    const Slice& lower = u.slices[j];
    std::vector<int> image;
    for (int o = 0; o < lower.cat->num_objects(); ++o)
      image.push_back(upper.object_of_arrow[c->compose(f, lower.object_arrow[o])]);
    std::vector<int> act;
    for (const auto& a : cat.arrows[i]) {
      UniverseCategory::Arrow r{u.U->act(f, a.from), u.U->act(f, a.to), {}};
      for (int o = 0; o < lower.cat->num_objects(); ++o) r.components.push_back(a.components[image[o]]);
      act.push_back(cat.index_of(j, r));
    }
    mor.action.push_back(std::move(act));
  }
  cat.mor = share(std::move(mor));
  cat.src = {cat.mor, u.U, {}};
  cat.tgt = {cat.mor, u.U, {}};
  cat.ident = {u.U, cat.mor, {}};
  for (int i = 0; i < c->num_objects(); ++i) {
    std::vector<int> s, t, id;
    for (const auto& a : cat.arrows[i]) {
      s.push_back(a.from);
      t.push_back(a.to);
    }
    for (int k = 0; k < u.U->size(i); ++k) {
      UniverseCategory::Arrow a{k, k, {}};
      for (int o = 0; o < u.slices[i].cat->num_objects(); ++o) {
        std::vector<int> ident(u.codes[i][k].size(o));
        for (std::size_t e = 0; e < ident.size(); ++e) ident[e] = static_cast<int>(e);
        a.components.push_back(std::move(ident));
      }
      id.push_back(cat.index_of(i, a));
    }
    cat.src.components.push_back(std::move(s));
    cat.tgt.components.push_back(std::move(t));
    cat.ident.components.push_back(std::move(id));
  }
  cat.composable = pullback(cat.src, cat.tgt);
  cat.comp = {cat.composable.object, cat.mor, {}};
  for (int i = 0; i < c->num_objects(); ++i) {
    std::vector<int> comp;
    for (int e = 0; e < cat.composable.object->size(i); ++e) {
      const auto& g = cat.arrows[i][cat.composable.fst(i, e)];
      const auto& f = cat.arrows[i][cat.composable.snd(i, e)];
      UniverseCategory::Arrow a{f.from, g.to, {}};
      for (std::size_t o = 0; o < f.components.size(); ++o) {
        std::vector<int> row;
        for (int v : f.components[o]) row.push_back(g.components[o][v]);
        a.components.push_back(std::move(row));
      }
      comp.push_back(cat.index_of(i, a));
    }
    cat.comp.components.push_back(std::move(comp));
  }
  return cat;
}

TypeMap decode_map(const UniverseCategory& cat, const PresheafMap& mu) {
  require_same_context(mu.target, cat.mor, "decode_map: not a map into Mor");
  const HSUniverse& u = *cat.universe;
  TypeMap out{decode(u, compose(cat.src, mu)), decode(u, compose(cat.tgt, mu)), {}};
  for (int i = 0; i < u.model.base->num_objects(); ++i) {
    std::vector<std::vector<int>> row;
    for (int x = 0; x < mu.source->size(i); ++x)
      row.push_back(cat.arrows[i][mu(i, x)].components[u.slices[i].id_object()]);
    out.fn.push_back(std::move(row));
  }
  return out;
}

PresheafMap encode_map(const UniverseCategory& cat, const TypeMap& m) {
  const HSUniverse& u = *cat.universe;
  const FinCat& c = *u.model.base;
  const PresheafPtr& g = m.source->context;
  PresheafMap from = encode_type(u, m.source), to = encode_type(u, m.target);
  PresheafMap out{g, cat.mor, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    const Slice& s = u.slices[i];
    std::vector<int> comp;
    for (int x = 0; x < g->size(i); ++x) {
      UniverseCategory::Arrow a{from(i, x), to(i, x), {}};
      for (int o = 0; o < s.cat->num_objects(); ++o) {
        int h = s.object_arrow[o];
        a.components.push_back(m.fn[c.src(h)][g->act(h, x)]);
      }
      comp.push_back(cat.index_of(i, a));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

Verdict typing_check(const NaturalModelInstance& m, const std::vector<PresheafPtr>& contexts) {
  Verdict v;
  const FinCat& c = *m.base;
  for (std::size_t n = 0; n < contexts.size(); ++n) {
    const PresheafPtr& g = contexts[n];
    std::string where = "context " + std::to_string(n) + " (" + describe(*g) + ")";
    // essential surjectivity onto bounded display maps
    std::vector<int> max_size;
    for (int i = 0; i < c.num_objects(); ++i) max_size.push_back(g->size(i) * m.bound);
    long long displays = 0;
    for (const auto& e : enumerate_presheaves(m.base, max_size, m.ceiling)) {
      auto ep = share(e);
      for_each_map(ep, g, [&](const PresheafMap& f) {
        if (!is_display(m, f)) return true;
        ++displays;
        TypePtr a = fiber_type(f);
        PresheafMap iso = fiber_iso(f);
        Comprehension cx = comprehension_shape(a);
        if (!validate_type(*a).ok() || !validate_map(iso).ok() || !is_iso(iso) ||
            !(compose(cx.proj, iso) == f))
          v.fail(where + ": display map over " + describe(*ep) +
                 " is not isomorphic to a comprehension projection");
        return true;
      }, m.ceiling);
    }
    // full faithfulness
    auto types = enumerate_types(g, m.bound, m.ceiling);
    long long pairs = 0;
    for (const auto& a : types)
      for (const auto& b : types) {
        Comprehension ca = comprehension_shape(a), cb = comprehension_shape(b);
        std::set<std::vector<std::vector<int>>> images;
        long long type_maps = 0;
        for_each_type_map(a, b, [&](const TypeMap& t) {
          ++type_maps;
          PresheafMap h = comprehension_map(t);
          if (!(compose(cb.proj, h) == ca.proj)) v.fail(where + ": comprehension map not over Γ");
          images.insert(h.components);
          return true;
        }, m.ceiling);
        long long over = 0;
        for_each_map(ca.object, cb.object, [&](const PresheafMap& h) {
          if (compose(cb.proj, h) == ca.proj) {
            ++over;
            if (!images.count(h.components))
              v.fail(where + ": map over Γ not induced by a type map");
          }
          return true;
        }, m.ceiling);
        if (over != type_maps || static_cast<long long>(images.size()) != type_maps)
          v.fail(where + ": hom-set sizes differ (" + std::to_string(type_maps) + " type maps, " +
                 std::to_string(over) + " maps over the context)");
        ++pairs;
      }
    v.note(where + ": " + std::to_string(displays) + " display maps, " +
           std::to_string(types.size()) + " types, " + std::to_string(pairs) + " hom-set pairs");
  }
  return v;
}

Verdict classifier_check(const HSUniverse& u) {
  Verdict v;
  const CatPtr& c = u.model.base;
  std::vector<PresheafPtr> y;
  std::vector<std::vector<TypePtr>> types;
  for (int i = 0; i < c->num_objects(); ++i) {
    y.push_back(share(yoneda(c, i)));
    types.push_back(enumerate_types(y[i], u.model.bound, u.model.ceiling));
    std::string where = "object " + c->object_name(i);
    int n = u.U->size(i);
    if (static_cast<int>(types[i].size()) != n)
      v.fail(where + ": |U| = " + std::to_string(n) + " but |Tp(y)| = " +
             std::to_string(types[i].size()));
    std::vector<bool> hit(types[i].size(), false);
    for (int k = 0; k < n; ++k) {
      TypePtr a = decode(u, yoneda_map(y[i], i, u.U, k));
      auto it = std::find_if(types[i].begin(), types[i].end(),
                             [&](const TypePtr& t) { return *t == *a; });
      if (it == types[i].end()) {
        v.fail(where + ": code " + std::to_string(k) + " decodes outside Tp(y)");
        continue;
      }
      int pos = static_cast<int>(it - types[i].begin());
      if (hit[pos]) v.fail(where + ": two codes decode to the same type");
      hit[pos] = true;
      if (encode_type(u, a)(i, yoneda_index(*c, i, c->identity(i))) != k)
        v.fail(where + ": encode does not invert decode at code " + std::to_string(k));
    }
    v.note(where + ": |U| = " + std::to_string(n) + ", |Tp(y)| = " + std::to_string(types[i].size()));
  }
  // naturality: for f : J → I, code(A[yf]) = U(f)(code(A))
  for (int f = 0; f < c->num_morphisms(); ++f) {
    int i = c->dst(f), j = c->src(f);
    PresheafMap yf = yoneda_map(y[j], j, y[i], yoneda_index(*c, i, f));
    int id_i = yoneda_index(*c, i, c->identity(i));
    int id_j = yoneda_index(*c, j, c->identity(j));
    for (const auto& a : types[i]) {
      int k = encode_type(u, a)(i, id_i);
      int kf = encode_type(u, subst(a, yf))(j, id_j);
      if (u.U->act(f, k) != kf)
        v.fail("naturality square fails at " + c->morphism_name(f) + " for code " + std::to_string(k));
    }
  }
  return v;
}

Verdict display_topos_check(const NaturalModelInstance& m) {
  Verdict v;
  SubobjectClassifier omega = subobject_classifier(m.base);
  for (int i = 0; i < m.base->num_objects(); ++i) {
    int n = omega.omega->size(i);
    if (n > m.bound)
      v.fail("|Omega(" + m.base->object_name(i) + ")| = " + std::to_string(n) + " > " +
             std::to_string(m.bound) + ": Omega -> 1 is not display");
  }
  v.note("monos have fibers of size <= 1 <= bound");
  return v;
}

Verdict realignment_search(const RealignmentProblem& p, const Ceiling& ceiling) {
  Verdict v;
  long long cases = 0;
  for (const auto& m : p.monos) {
    int na = p.num_codes(m.from), nb = p.num_codes(m.to);
    std::vector<int> restricted(nb);
    for (int b = 0; b < nb; ++b) restricted[b] = p.restrict_code(m, b);
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < nb; ++b)
        for (const auto& phi : p.isos(m.from, a, restricted[b])) {
          ceiling.check(++cases, "realignment cases");
          bool found = false;
          for (int bp = 0; bp < nb && !found; ++bp) {
            if (restricted[bp] != a) continue;
            for (const auto& phip : p.isos(m.to, bp, b))
              if (p.restrict_iso(m, phip) == phi) {
                found = true;
                break;
              }
          }
          if (!found)
            v.fail("mono " + m.name + ", code A=" + std::to_string(a) + ", code B=" +
                   std::to_string(b) + ": no realigned B' with matching isomorphism");
        }
  }
  v.note(std::to_string(p.monos.size()) + " monos, " + std::to_string(cases) + " (A, B, phi) cases");
  return v;
}

Verdict realignment_check(const HSUniverse& u, const std::vector<PresheafPtr>& contexts) {
  struct Ctx {
    PresheafPtr presheaf;
    std::vector<PresheafMap> codes;
  };
  std::vector<Ctx> ctxs;
  std::vector<PresheafMap> incl;
  RealignmentProblem p;
  auto add_context = [&](const PresheafPtr& g) {
    ctxs.push_back({g, enumerate_maps(g, u.U, u.model.ceiling)});
    p.contexts.push_back(describe(*g));
    return static_cast<int>(ctxs.size()) - 1;
  };
  for (const auto& g : contexts) {
    int to = add_context(g);
    for (const auto& s : enumerate_subpresheaves(*g, u.model.ceiling)) {
      PresheafMap m = inclusion(g, s);
      int from = add_context(m.source);
      incl.push_back(m);
      p.monos.push_back({from, to, "into context " + std::to_string(to) + " from " + describe(*m.source)});
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
    std::vector<RealignmentProblem::Iso> out;
    for_each_type_map(decode(u, ctxs[ctx].codes[x]), decode(u, ctxs[ctx].codes[y]),
                      [&](const TypeMap& t) {
                        if (is_iso(t)) out.push_back(flatten(t));
                        return true;
                      }, u.model.ceiling);
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
  return realignment_search(p, u.model.ceiling);
}

Site slice_site(const Site& site, const Slice& s) {
  const FinCat& c = *site.cat;
  Site out{s.cat, {}, site.topology_mode};
  for (int o = 0; o < s.cat->num_objects(); ++o) {
    int w = s.object_arrow[o];
    std::vector<Sieve> covers;
    for (const auto& r : site.covers[c.src(w)]) {
      Sieve sv;
      for (int f : r) sv.push_back(slice_morphism(s, s.object_of_arrow[c.compose(w, f)], o, f));
      std::sort(sv.begin(), sv.end());
      covers.push_back(std::move(sv));
    }
    out.covers.push_back(std::move(covers));
  }
  return out;
}

namespace {

void subsets_of_size(int pool, int size, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (int a = from; a < pool; ++a) {
      cur.push_back(a);
      rec(a + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace

NaiveUniverse naive_sheaf_universe(const Site& site, int bound, const Ceiling& ceiling) {
  const CatPtr& c = site.cat;
  NaiveUniverse u;
  u.site = site;
  const int pool = bound + 1;
  std::vector<std::map<NaiveUniverse::Entry, int>> index(c->num_objects());
  for (int v = 0; v < c->num_objects(); ++v) {
    u.slices.push_back(slice(c, v));
    u.local_sites.push_back(slice_site(site, u.slices[v]));
    std::vector<NaiveUniverse::Entry> entries;
    for (const auto& p : enumerate_presheaves(u.slices[v].cat, bound, ceiling)) {
      if (!sheaf_check(u.local_sites[v], p, false, ceiling).is_sheaf) continue;
      std::vector<std::vector<std::vector<int>>> choices;
      for (int s : p.sizes) {
        std::vector<std::vector<int>> ch;
        subsets_of_size(pool, s, ch);
        choices.push_back(std::move(ch));
      }
      std::vector<std::size_t> pick(choices.size(), 0);
      for (;;) {
        NaiveUniverse::Entry e{p, {}};
        for (std::size_t o = 0; o < choices.size(); ++o) e.labels.push_back(choices[o][pick[o]]);
        index[v][e] = static_cast<int>(entries.size());
        entries.push_back(std::move(e));
        ceiling.check(static_cast<long long>(entries.size()), "naive universe");
        std::size_t o = choices.size();
        while (o > 0 && pick[o - 1] + 1 == choices[o - 1].size()) pick[--o] = 0;
        if (o == 0) break;
        ++pick[o - 1];
      }
    }
    u.entries.push_back(std::move(entries));
  }
  Presheaf nu{c, {}, {}};
  for (int v = 0; v < c->num_objects(); ++v) nu.sizes.push_back(static_cast<int>(u.entries[v].size()));
  for (int f = 0; f < c->num_morphisms(); ++f) {
    int v = c->dst(f), w = c->src(f);
    std::vector<int> act;
    for (const auto& e : u.entries[v]) {
      NaiveUniverse::Entry r{restrict_along(u.slices[v], u.slices[w], f, e.sheaf), {}};
      for (int o = 0; o < u.slices[w].cat->num_objects(); ++o)
        r.labels.push_back(e.labels[u.slices[v].object_of_arrow[c->compose(f, u.slices[w].object_arrow[o])]]);
      act.push_back(index[w].at(r));
    }
    nu.action.push_back(std::move(act));
  }
  u.presheaf = share(std::move(nu));
  return u;
}

std::string NaiveUniverse::describe_entry(int open, int k) const {
  const Entry& e = entries[open][k];
  const Slice& s = slices[open];
  const FinCat& c = *site.cat;
  std::ostringstream os;
  os << "{";
  for (int o = 0; o < s.cat->num_objects(); ++o) {
    os << (o ? ", " : "") << c.object_name(c.src(s.object_arrow[o])) << ": {";
    for (std::size_t a = 0; a < e.labels[o].size(); ++a) os << (a ? "," : "") << e.labels[o][a];
    os << "}";
  }
  os << "}";
  return os.str();
}

}  // namespace s4sem
