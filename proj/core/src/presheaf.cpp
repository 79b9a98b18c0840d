#include "s4sem/presheaf.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "csp.hpp"

namespace s4sem {

long long Presheaf::total() const {
  long long n = 0;
  for (int s : sizes) n += s;
  return n;
}

bool Presheaf::operator==(const Presheaf& other) const {
  return sizes == other.sizes && action == other.action &&
         (base == other.base || *base == *other.base);
}

bool Presheaf::operator<(const Presheaf& other) const {
  if (sizes != other.sizes) return sizes < other.sizes;
  return action < other.action;
}

ValidationReport validate_presheaf(const Presheaf& p) {
  ValidationReport r;
  const FinCat& c = *p.base;
  if (static_cast<int>(p.sizes.size()) != c.num_objects() ||
      static_cast<int>(p.action.size()) != c.num_morphisms())
    throw Error(ErrorKind::Shape, "presheaf tables do not match its base");
  for (int f = 0; f < c.num_morphisms(); ++f) {
    const auto& a = p.action[f];
    if (static_cast<int>(a.size()) != p.size(c.dst(f))) {
      r.add("action has wrong domain", c.morphism_name(f));
      continue;
    }
    for (int v : a)
      if (v < 0 || v >= p.size(c.src(f))) {
        r.add("action leaves carrier", c.morphism_name(f));
        break;
      }
  }
  if (!r.ok()) return r;
  for (int o = 0; o < c.num_objects(); ++o) {
    const auto& a = p.action[c.identity(o)];
    for (int x = 0; x < p.size(o); ++x)
      if (a[x] != x) {
        r.add("identity acts non-trivially", c.object_name(o) + " element " + std::to_string(x));
        break;
      }
  }
  for (int g = 0; g < c.num_morphisms(); ++g)
    for (int f = 0; f < c.num_morphisms(); ++f) {
      int gf = c.compose(g, f);
      if (gf < 0) continue;
      for (int y = 0; y < p.size(c.dst(g)); ++y)
        if (p.act(gf, y) != p.act(f, p.act(g, y))) {
          r.add("contravariant functoriality",
                "(" + c.morphism_name(g) + "," + c.morphism_name(f) + ") at " +
                    std::to_string(y));
          break;
        }
    }
  return r;
}

bool PresheafMap::operator==(const PresheafMap& other) const {
  return components == other.components && *source == *other.source &&
         *target == *other.target;
}

ValidationReport validate_map(const PresheafMap& m) {
  ValidationReport r;
  const FinCat& c = *m.source->base;
  if (static_cast<int>(m.components.size()) != c.num_objects())
    throw Error(ErrorKind::Shape, "map components not given per object");
  for (int o = 0; o < c.num_objects(); ++o) {
    if (static_cast<int>(m.components[o].size()) != m.source->size(o))
      throw Error(ErrorKind::Shape, "map component at " + c.object_name(o) + " not total");
    for (int v : m.components[o])
      if (v < 0 || v >= m.target->size(o))
        throw Error(ErrorKind::Shape, "map component at " + c.object_name(o) + " leaves target");
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int i = c.src(f), j = c.dst(f);
    for (int x = 0; x < m.source->size(j); ++x)
      if (m(i, m.source->act(f, x)) != m.target->act(f, m(j, x))) {
        r.add("naturality", c.morphism_name(f) + " at element " + std::to_string(x));
        break;
      }
  }
  return r;
}

PresheafMap identity_map(const PresheafPtr& p) {
  PresheafMap m{p, p, {}};
  for (int o = 0; o < p->base->num_objects(); ++o) {
    std::vector<int> comp(p->size(o));
    for (int x = 0; x < p->size(o); ++x) comp[x] = x;
    m.components.push_back(std::move(comp));
  }
  return m;
}

PresheafMap compose(const PresheafMap& g, const PresheafMap& f) {
  if (!(*f.target == *g.source))
    throw Error(ErrorKind::ContextMismatch, "presheaf map composition: codomain/domain differ");
  PresheafMap h{f.source, g.target, {}};
  for (std::size_t o = 0; o < f.components.size(); ++o) {
    std::vector<int> comp;
    for (int v : f.components[o]) comp.push_back(g.components[o][v]);
    h.components.push_back(std::move(comp));
  }
  return h;
}

bool is_mono(const PresheafMap& m) {
  for (std::size_t o = 0; o < m.components.size(); ++o) {
    std::vector<char> seen(m.target->size(static_cast<int>(o)), 0);
    for (int v : m.components[o])
      if (seen[v]++) return false;
  }
  return true;
}

bool is_iso(const PresheafMap& m) {
  if (!is_mono(m)) return false;
  for (std::size_t o = 0; o < m.components.size(); ++o)
    if (static_cast<int>(m.components[o].size()) != m.target->size(static_cast<int>(o)))
      return false;
  return true;
}

PresheafMap inverse(const PresheafMap& iso) {
  if (!is_iso(iso)) throw Error(ErrorKind::Rejected, "inverse of a non-isomorphism");
  PresheafMap inv{iso.target, iso.source, {}};
  for (const auto& comp : iso.components) {
    std::vector<int> back(comp.size());
    for (std::size_t x = 0; x < comp.size(); ++x) back[comp[x]] = static_cast<int>(x);
    inv.components.push_back(std::move(back));
  }
  return inv;
}

Presheaf terminal_presheaf(CatPtr c) {
  Presheaf p{c, std::vector<int>(c->num_objects(), 1), {}};
  p.action.assign(c->num_morphisms(), std::vector<int>{0});
  return p;
}

Presheaf empty_presheaf(CatPtr c) {
  Presheaf p{c, std::vector<int>(c->num_objects(), 0), {}};
  p.action.assign(c->num_morphisms(), std::vector<int>{});
  return p;
}

PresheafMap to_terminal(const PresheafPtr& p) {
  PresheafMap m{p, share(terminal_presheaf(p->base)), {}};
  for (int o = 0; o < p->base->num_objects(); ++o)
    m.components.emplace_back(p->size(o), 0);
  return m;
}

Presheaf yoneda(CatPtr c, int i) {
  if (i < 0 || i >= c->num_objects()) throw Error(ErrorKind::UnknownId, "yoneda: unknown object");
  Presheaf p{c, {}, {}};
  for (int j = 0; j < c->num_objects(); ++j) p.sizes.push_back(static_cast<int>(c->hom(j, i).size()));
  for (int f = 0; f < c->num_morphisms(); ++f) {
    // f : K → J acts yI(J) → yI(K) by h ↦ h∘f
    std::vector<int> act;
    for (int h : c->hom(c->dst(f), i)) act.push_back(yoneda_index(*c, i, c->compose(h, f)));
    p.action.push_back(std::move(act));
  }
  return p;
}

int yoneda_index(const FinCat& c, int i, int f) {
  auto hom = c.hom(c.src(f), i);
  auto it = std::find(hom.begin(), hom.end(), f);
  if (it == hom.end()) throw Error(ErrorKind::UnknownId, "yoneda_index: arrow not into object");
  return static_cast<int>(it - hom.begin());
}

PresheafMap yoneda_map(const PresheafPtr& yI, int i, const PresheafPtr& p, int x) {
  const FinCat& c = *p->base;
  PresheafMap m{yI, p, {}};
  for (int j = 0; j < c.num_objects(); ++j) {
    std::vector<int> comp;
    for (int h : c.hom(j, i)) comp.push_back(p->act(h, x));
    m.components.push_back(std::move(comp));
  }
  return m;
}

namespace {

struct SlotTable {
  std::vector<std::vector<int>> var;  // [object][element] -> variable
  std::vector<std::pair<int, int>> slot;
};

SlotTable slot_table(const Presheaf& p) {
  SlotTable t;
  t.var.resize(p.sizes.size());
  for (std::size_t o = 0; o < p.sizes.size(); ++o)
    for (int x = 0; x < p.sizes[o]; ++x) {
      t.var[o].push_back(static_cast<int>(t.slot.size()));
      t.slot.emplace_back(static_cast<int>(o), x);
    }
  return t;
}

}  // namespace

void for_each_map(const PresheafPtr& p, const PresheafPtr& q,
                  const std::function<bool(const PresheafMap&)>& visit, const Ceiling& ceiling) {
  const FinCat& c = *p->base;
  SlotTable t = slot_table(*p);
  detail::Csp csp;
  for (auto [o, x] : t.slot) csp.add_variable(q->size(o));
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int i = c.src(f), j = c.dst(f);
    for (int x = 0; x < p->size(j); ++x) {
      int a = t.var[j][x];
      int b = t.var[i][p->act(f, x)];
      const auto* qa = &q->action[f];
      csp.add_check(std::max(a, b), [a, b, qa](const detail::Csp::Assignment& v) {
        return v[b] == (*qa)[v[a]];
      });
    }
  }
  csp.solve(
      [&](const detail::Csp::Assignment& v) {
        PresheafMap m{p, q, {}};
        m.components.resize(c.num_objects());
        for (std::size_t s = 0; s < t.slot.size(); ++s)
          m.components[t.slot[s].first].push_back(v[s]);
        for (int o = 0; o < c.num_objects(); ++o)
          if (p->size(o) == 0) m.components[o].clear();
        return visit(m);
      },
      ceiling, "natural map enumeration");
}

std::vector<PresheafMap> enumerate_maps(const PresheafPtr& p, const PresheafPtr& q,
                                        const Ceiling& ceiling) {
  std::vector<PresheafMap> out;
  for_each_map(p, q, [&](const PresheafMap& m) {
    out.push_back(m);
    return true;
  }, ceiling);
  return out;
}

long long count_maps(const PresheafPtr& p, const PresheafPtr& q, const Ceiling& ceiling) {
  long long n = 0;
  for_each_map(p, q, [&](const PresheafMap&) {
    ++n;
    return true;
  }, ceiling);
  return n;
}

std::optional<PresheafMap> find_isomorphism(const PresheafPtr& p, const PresheafPtr& q) {
  if (p->sizes != q->sizes) return std::nullopt;
  std::optional<PresheafMap> found;
  for_each_map(p, q, [&](const PresheafMap& m) {
    if (is_iso(m)) {
      found = m;
      return false;
    }
    return true;
  });
  return found;
}

std::vector<Presheaf> enumerate_presheaves(CatPtr c, const std::vector<int>& max_size,
                                           const Ceiling& ceiling) {
  const int no = c->num_objects();
  const int nm = c->num_morphisms();
  std::vector<Presheaf> out;
  std::vector<int> sizes(no, 0);
  // non-identity morphisms become CSP variables whose value encodes a function
  std::vector<int> var_of(nm, -1);
  std::vector<int> mor_of;
  for (int f = 0; f < nm; ++f)
    if (!c->is_identity(f)) {
      var_of[f] = static_cast<int>(mor_of.size());
      mor_of.push_back(f);
    }
  for (;;) {
    // decode functions from integers: digit d of value is image of element d
    auto decode = [&](int f, int value) {
      int from = sizes[c->dst(f)], to = sizes[c->src(f)];
      std::vector<int> fn(from);
      for (int d = 0; d < from; ++d) {
        fn[d] = value % to;
        value /= to;
      }
      return fn;
    };
    detail::Csp csp;
    bool impossible = false;
    for (int f : mor_of) {
      int from = sizes[c->dst(f)], to = sizes[c->src(f)];
      long long count = 1;
      for (int d = 0; d < from; ++d) count *= to;
      ceiling.check(count, "function space in presheaf enumeration");
      if (count == 0) impossible = true;
      csp.add_variable(static_cast<int>(count));
    }
    if (!impossible) {
      auto fn_of = [&](int f, const detail::Csp::Assignment& a) {
        if (var_of[f] < 0) {
          std::vector<int> id(sizes[c->src(f)]);
          for (int x = 0; x < static_cast<int>(id.size()); ++x) id[x] = x;
          return id;
        }
        return decode(f, a[var_of[f]]);
      };
      for (int g = 0; g < nm; ++g)
        for (int f = 0; f < nm; ++f) {
          int gf = c->compose(g, f);
          if (gf < 0) continue;
          int last = std::max({var_of[g], var_of[f], var_of[gf]});
          if (last < 0) continue;
          csp.add_check(last, [=, &fn_of](const detail::Csp::Assignment& a) {
            auto ag = fn_of(g, a), af = fn_of(f, a), agf = fn_of(gf, a);
            for (std::size_t y = 0; y < ag.size(); ++y)
              if (agf[y] != af[ag[y]]) return false;
            return true;
          });
        }
      csp.solve(
          [&](const detail::Csp::Assignment& a) {
            Presheaf p{c, sizes, {}};
            for (int f = 0; f < nm; ++f) p.action.push_back(fn_of(f, a));
            out.push_back(std::move(p));
            ceiling.check(static_cast<long long>(out.size()), "presheaf enumeration");
            return true;
          },
          ceiling, "presheaf enumeration");
    }
    int o = no - 1;
    while (o >= 0 && sizes[o] == max_size[o]) sizes[o--] = 0;
    if (o < 0) break;
    ++sizes[o];
  }
  return out;
}

std::vector<Presheaf> enumerate_presheaves(CatPtr c, int max_size, const Ceiling& ceiling) {
  return enumerate_presheaves(c, std::vector<int>(c->num_objects(), max_size), ceiling);
}

Product product(const PresheafPtr& p, const PresheafPtr& q) {
  const FinCat& c = *p->base;
  Presheaf pq{p->base, {}, {}};
  for (int o = 0; o < c.num_objects(); ++o) pq.sizes.push_back(p->size(o) * q->size(o));
  for (int f = 0; f < c.num_morphisms(); ++f) {
    int j = c.dst(f), i = c.src(f);
    std::vector<int> act;
    for (int x = 0; x < p->size(j); ++x)
      for (int y = 0; y < q->size(j); ++y)
        act.push_back(p->act(f, x) * q->size(i) + q->act(f, y));
    pq.action.push_back(std::move(act));
  }
  Product out;
  out.object = share(std::move(pq));
  out.fst = {out.object, p, {}};
  out.snd = {out.object, q, {}};
  for (int o = 0; o < c.num_objects(); ++o) {
    std::vector<int> a, b;
    for (int x = 0; x < p->size(o); ++x)
      for (int y = 0; y < q->size(o); ++y) {
        a.push_back(x);
        b.push_back(y);
      }
    out.fst.components.push_back(std::move(a));
    out.snd.components.push_back(std::move(b));
  }
  return out;
}

PresheafMap Product::pairing(const PresheafMap& f, const PresheafMap& g) const {
  PresheafMap m{f.source, object, {}};
  for (std::size_t o = 0; o < f.components.size(); ++o) {
    std::vector<int> comp;
    for (std::size_t x = 0; x < f.components[o].size(); ++x)
      comp.push_back(pair(static_cast<int>(o), f.components[o][x], g.components[o][x]));
    m.components.push_back(std::move(comp));
  }
  return m;
}

int Pullback::pair(int o, int x, int y) const {
  auto it = index[o].find({x, y});
  if (it == index[o].end()) throw Error(ErrorKind::Rejected, "pullback: pair does not commute");
  return it->second;
}

PresheafMap Pullback::pairing(const PresheafMap& a, const PresheafMap& b) const {
  PresheafMap m{a.source, object, {}};
  for (std::size_t o = 0; o < a.components.size(); ++o) {
    std::vector<int> comp;
    for (std::size_t x = 0; x < a.components[o].size(); ++x)
      comp.push_back(pair(static_cast<int>(o), a.components[o][x], b.components[o][x]));
    m.components.push_back(std::move(comp));
  }
  return m;
}

Pullback pullback(const PresheafMap& f, const PresheafMap& g) {
  if (!(*f.target == *g.target))
    throw Error(ErrorKind::ContextMismatch, "pullback: maps have different codomains");
  const FinCat& c = *f.source->base;
  Pullback out;
  Presheaf pb{f.source->base, {}, {}};
  std::vector<std::vector<std::pair<int, int>>> elems(c.num_objects());
  out.index.resize(c.num_objects());
  for (int o = 0; o < c.num_objects(); ++o) {
    for (int x = 0; x < f.source->size(o); ++x)
      for (int y = 0; y < g.source->size(o); ++y)
        if (f(o, x) == g(o, y)) {
          out.index[o][{x, y}] = static_cast<int>(elems[o].size());
          elems[o].emplace_back(x, y);
        }
    pb.sizes.push_back(static_cast<int>(elems[o].size()));
  }
  for (int m = 0; m < c.num_morphisms(); ++m) {
    std::vector<int> act;
    for (auto [x, y] : elems[c.dst(m)])
      act.push_back(out.index[c.src(m)].at({f.source->act(m, x), g.source->act(m, y)}));
    pb.action.push_back(std::move(act));
  }
  out.object = share(std::move(pb));
  out.fst = {out.object, f.source, {}};
  out.snd = {out.object, g.source, {}};
  for (int o = 0; o < c.num_objects(); ++o) {
    std::vector<int> a, b;
    for (auto [x, y] : elems[o]) {
      a.push_back(x);
      b.push_back(y);
    }
    out.fst.components.push_back(std::move(a));
    out.snd.components.push_back(std::move(b));
  }
  return out;
}

Exponential exponential(const PresheafPtr& p, const PresheafPtr& q, const Ceiling& ceiling) {
  CatPtr c = p->base;
  const int no = c->num_objects();
  Exponential e;
  e.exponent = p;
  e.codomain = q;
  e.elements.resize(no);
  e.lookup.resize(no);
  for (int i = 0; i < no; ++i) {
    e.representables.push_back(share(yoneda(c, i)));
    e.yi_times_p.push_back(product(e.representables[i], p));
    for_each_map(e.yi_times_p[i].object, q, [&](const PresheafMap& m) {
      e.lookup[i][m.components] = static_cast<int>(e.elements[i].size());
      e.elements[i].push_back(m);
      return true;
    }, ceiling);
  }
  Presheaf obj{c, {}, {}};
  for (int i = 0; i < no; ++i) obj.sizes.push_back(static_cast<int>(e.elements[i].size()));
  for (int f = 0; f < c->num_morphisms(); ++f) {
    int j = c->src(f), i = c->dst(f);
    std::vector<int> act;
    for (const auto& theta : e.elements[i]) {
      // θ ∘ (yf × P) : yJ × P → Q
      std::vector<std::vector<int>> comps(no);
      for (int k = 0; k < no; ++k) {
        auto hom = c->hom(k, j);
        for (int gi = 0; gi < static_cast<int>(hom.size()); ++gi)
          for (int x = 0; x < p->size(k); ++x) {
            int fg = c->compose(f, hom[gi]);
            comps[k].push_back(
                theta(k, e.yi_times_p[i].pair(k, yoneda_index(*c, i, fg), x)));
          }
      }
      act.push_back(e.lookup[j].at(comps));
    }
    obj.action.push_back(std::move(act));
  }
  e.object = share(std::move(obj));
  e.with_exponent = product(e.object, p);
  e.eval = {e.with_exponent.object, q, {}};
  for (int i = 0; i < no; ++i) {
    std::vector<int> comp;
    int id = yoneda_index(*c, i, c->identity(i));
    for (int k = 0; k < e.object->size(i); ++k)
      for (int x = 0; x < p->size(i); ++x)
        comp.push_back(e.elements[i][k](i, e.yi_times_p[i].pair(i, id, x)));
    e.eval.components.push_back(std::move(comp));
  }
  return e;
}

int Exponential::index_of(int object, const PresheafMap& element) const {
  auto it = lookup[object].find(element.components);
  if (it == lookup[object].end()) throw Error(ErrorKind::UnknownId, "not an exponential element");
  return it->second;
}

PresheafMap Exponential::curry(const Product& r_times_p, const PresheafMap& h) const {
  const PresheafPtr& r = r_times_p.fst.target;
  const FinCat& c = *r->base;
  PresheafMap out{r, object, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> comp;
    for (int rx = 0; rx < r->size(i); ++rx) {
      std::vector<std::vector<int>> comps(c.num_objects());
      for (int k = 0; k < c.num_objects(); ++k)
        for (int g : c.hom(k, i))
          for (int x = 0; x < exponent->size(k); ++x)
            comps[k].push_back(h(k, r_times_p.pair(k, r->act(g, rx), x)));
      comp.push_back(lookup[i].at(comps));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

bool is_subpresheaf(const Presheaf& p, const Subpresheaf& s) {
  const FinCat& c = *p.base;
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int x = 0; x < p.size(c.dst(f)); ++x)
      if (s[c.dst(f)][x] && !s[c.src(f)][p.act(f, x)]) return false;
  return true;
}

std::vector<Subpresheaf> enumerate_subpresheaves(const Presheaf& p, const Ceiling& ceiling) {
  const FinCat& c = *p.base;
  SlotTable t = slot_table(p);
  detail::Csp csp;
  for (std::size_t s = 0; s < t.slot.size(); ++s) csp.add_variable(2);
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int x = 0; x < p.size(c.dst(f)); ++x) {
      int a = t.var[c.dst(f)][x];
      int b = t.var[c.src(f)][p.act(f, x)];
      csp.add_check(std::max(a, b), [a, b](const detail::Csp::Assignment& v) {
        return !(v[a] && !v[b]);
      });
    }
  std::vector<Subpresheaf> out;
  csp.solve(
      [&](const detail::Csp::Assignment& v) {
        Subpresheaf s(p.sizes.size());
        for (std::size_t o = 0; o < p.sizes.size(); ++o) s[o].assign(p.sizes[o], false);
        for (std::size_t k = 0; k < t.slot.size(); ++k)
          s[t.slot[k].first][t.slot[k].second] = v[k] != 0;
        out.push_back(std::move(s));
        return true;
      },
      ceiling, "subpresheaf enumeration");
  return out;
}

PresheafMap inclusion(const PresheafPtr& p, const Subpresheaf& s) {
  if (!is_subpresheaf(*p, s)) throw Error(ErrorKind::Rejected, "inclusion: not a subpresheaf");
  const FinCat& c = *p->base;
  std::vector<std::vector<int>> index(c.num_objects()), members(c.num_objects());
  Presheaf sub{p->base, {}, {}};
  for (int o = 0; o < c.num_objects(); ++o) {
    index[o].assign(p->size(o), -1);
    for (int x = 0; x < p->size(o); ++x)
      if (s[o][x]) {
        index[o][x] = static_cast<int>(members[o].size());
        members[o].push_back(x);
      }
    sub.sizes.push_back(static_cast<int>(members[o].size()));
  }
  for (int f = 0; f < c.num_morphisms(); ++f) {
    std::vector<int> act;
    for (int x : members[c.dst(f)]) act.push_back(index[c.src(f)][p->act(f, x)]);
    sub.action.push_back(std::move(act));
  }
  return {share(std::move(sub)), p, members};
}

Subpresheaf image(const PresheafMap& m) {
  Subpresheaf s(m.components.size());
  for (std::size_t o = 0; o < m.components.size(); ++o) {
    s[o].assign(m.target->size(static_cast<int>(o)), false);
    for (int v : m.components[o]) s[o][v] = true;
  }
  return s;
}

int SubobjectClassifier::index_of(int object, const Sieve& s) const {
  const auto& all = sieves[object];
  auto it = std::find(all.begin(), all.end(), s);
  if (it == all.end()) throw Error(ErrorKind::UnknownId, "not a sieve");
  return static_cast<int>(it - all.begin());
}

PresheafMap SubobjectClassifier::characteristic(const PresheafPtr& p, const Subpresheaf& s) const {
  const FinCat& c = *p->base;
  PresheafMap chi{p, omega, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> comp;
    for (int x = 0; x < p->size(i); ++x) {
      Sieve sv;
      for (int f : c.arrows_into(i))
        if (s[c.src(f)][p->act(f, x)]) sv.push_back(f);
      comp.push_back(index_of(i, sv));
    }
    chi.components.push_back(std::move(comp));
  }
  return chi;
}

Subpresheaf SubobjectClassifier::classified(const PresheafMap& chi) const {
  Subpresheaf s(chi.components.size());
  for (std::size_t o = 0; o < chi.components.size(); ++o)
    for (int v : chi.components[o]) s[o].push_back(v == top(static_cast<int>(o), 0));
  return s;
}

SubobjectClassifier subobject_classifier(CatPtr c) {
  SubobjectClassifier out;
  Presheaf omega{c, {}, {}};
  for (int i = 0; i < c->num_objects(); ++i) {
    out.sieves.push_back(all_sieves(*c, i));
    omega.sizes.push_back(static_cast<int>(out.sieves[i].size()));
  }
  for (int f = 0; f < c->num_morphisms(); ++f) {
    std::vector<int> act;
    for (const auto& s : out.sieves[c->dst(f)]) {
      Sieve pulled = pullback_sieve(*c, s, f);
      const auto& all = out.sieves[c->src(f)];
      act.push_back(static_cast<int>(std::find(all.begin(), all.end(), pulled) - all.begin()));
    }
    omega.action.push_back(std::move(act));
  }
  out.omega = share(std::move(omega));
  out.top = {share(terminal_presheaf(c)), out.omega, {}};
  for (int i = 0; i < c->num_objects(); ++i)
    out.top.components.push_back({out.index_of(i, maximal_sieve(*c, i))});
  return out;
}

Elements category_of_elements(const Presheaf& p) {
  const FinCat& c = *p.base;
  Elements e;
  FinCat el;
  e.object_of.resize(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i)
    for (int x = 0; x < p.size(i); ++x) {
      e.object_of[i].push_back(el.add_object(c.object_name(i) + "." + std::to_string(x)));
      e.element.emplace_back(i, x);
    }
  // morphism over f ending at (dst f, x)
  std::vector<std::vector<int>> mor(c.num_morphisms());
  std::vector<int> under;
  for (int f = 0; f < c.num_morphisms(); ++f)
    for (int x = 0; x < p.size(c.dst(f)); ++x) {
      int m = el.add_morphism(c.morphism_name(f) + "@" + std::to_string(x),
                              e.object_of[c.src(f)][p.act(f, x)], e.object_of[c.dst(f)][x]);
      mor[f].push_back(m);
      under.push_back(f);
      if (c.is_identity(f)) el.set_identity(e.object_of[c.dst(f)][x], m);
    }
  for (int g = 0; g < c.num_morphisms(); ++g)
    for (int f = 0; f < c.num_morphisms(); ++f) {
      int gf = c.compose(g, f);
      if (gf < 0) continue;
      for (int x = 0; x < p.size(c.dst(g)); ++x)
        el.set_composite(mor[g][x], mor[f][p.act(g, x)], mor[gf][x]);
    }
  e.cat = std::make_shared<const FinCat>(std::move(el));
  e.projection.source = e.cat;
  e.projection.target = p.base;
  for (auto [i, x] : e.element) e.projection.on_objects.push_back(i);
  e.projection.on_morphisms = under;
  return e;
}

int elements_morphism(const Elements& e, const Presheaf& p, int f, int x) {
  const FinCat& c = *p.base;
  int base = 0;
  for (int g = 0; g < f; ++g) base += p.size(c.dst(g));
  (void)e;
  return base + x;
}

KanAdjunction::KanAdjunction(Functor u, Ceiling ceiling)
    : u_(std::move(u)), ceiling_(ceiling) {
  if (!validate_diagram(u_).ok()) throw Error(ErrorKind::Rejected, "kan_adjunction: not a functor");
  identity_ = is_identity_functor(u_);
  const FinCat& a = *u_.source;
  const FinCat& c = *u_.target;
  slots_.resize(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i)
    for (int j = 0; j < a.num_objects(); ++j)
      for (int f : c.hom(u_.obj(j), i)) slots_[i].push_back({j, f});
}

PresheafPtr KanAdjunction::restrict(const PresheafPtr& p) const {
  if (identity_) return p;
  Presheaf r{u_.source, {}, {}};
  for (int j : u_.on_objects) r.sizes.push_back(p->size(j));
  for (int g : u_.on_morphisms) r.action.push_back(p->action[g]);
  return share(std::move(r));
}

PresheafMap KanAdjunction::restrict(const PresheafMap& m) const {
  if (identity_) return m;
  PresheafMap r{restrict(m.source), restrict(m.target), {}};
  for (int j : u_.on_objects) r.components.push_back(m.components[j]);
  return r;
}

KanAdjunction::Extension KanAdjunction::build_extension(const PresheafPtr& q) const {
  const FinCat& a = *u_.source;
  const FinCat& c = *u_.target;
  Extension ext;
  ext.families.resize(c.num_objects());
  ext.index.resize(c.num_objects());
  for (int i = 0; i < c.num_objects(); ++i) {
    const auto& sl = slots_[i];
    std::map<std::pair<int, int>, int> slot_of;
    for (int s = 0; s < static_cast<int>(sl.size()); ++s) slot_of[{sl[s].object, sl[s].arrow}] = s;
    detail::Csp csp;
    for (const auto& s : sl) csp.add_variable(q->size(s.object));
    for (int s = 0; s < static_cast<int>(sl.size()); ++s)
      for (int g : a.arrows_into(sl[s].object)) {
        int t = slot_of.at({a.src(g), c.compose(sl[s].arrow, u_.mor(g))});
        const auto* qg = &q->action[g];
        csp.add_check(std::max(s, t), [s, t, qg](const detail::Csp::Assignment& v) {
          return v[t] == (*qg)[v[s]];
        });
      }
    csp.solve(
        [&](const detail::Csp::Assignment& v) {
          ext.index[i][v] = static_cast<int>(ext.families[i].size());
          ext.families[i].push_back(v);
          return true;
        },
        ceiling_, "right Kan extension");
  }
  Presheaf obj{u_.target, {}, {}};
  for (int i = 0; i < c.num_objects(); ++i)
    obj.sizes.push_back(static_cast<int>(ext.families[i].size()));
  for (int h = 0; h < c.num_morphisms(); ++h) {
    int ip = c.src(h), i = c.dst(h);
    std::map<std::pair<int, int>, int> slot_of;
    for (int s = 0; s < static_cast<int>(slots_[i].size()); ++s)
      slot_of[{slots_[i][s].object, slots_[i][s].arrow}] = s;
    std::vector<int> act;
    for (const auto& fam : ext.families[i]) {
      std::vector<int> moved;
      for (const auto& s : slots_[ip])
        moved.push_back(fam[slot_of.at({s.object, c.compose(h, s.arrow)})]);
      act.push_back(ext.index[ip].at(moved));
    }
    obj.action.push_back(std::move(act));
  }
  ext.object = share(std::move(obj));
  return ext;
}

const KanAdjunction::Extension& KanAdjunction::extension(const PresheafPtr& q) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(*q);
  if (it != cache_.end()) return *it->second;
  auto ext = std::make_shared<const Extension>(build_extension(q));
  return *cache_.emplace(*q, std::move(ext)).first->second;
}

PresheafPtr KanAdjunction::extend(const PresheafPtr& q) const {
  if (identity_) return q;
  return extension(q).object;
}

const std::vector<int>& KanAdjunction::family(const PresheafPtr& q, int i, int x) const {
  if (identity_) throw Error(ErrorKind::Rejected, "identity extension has no stored families");
  return extension(q).families[i][x];
}

int KanAdjunction::family_index(const PresheafPtr& q, int i, const std::vector<int>& fam) const {
  return extension(q).index[i].at(fam);
}

PresheafMap KanAdjunction::extend(const PresheafMap& m) const {
  if (identity_) return m;
  const auto& src = extension(m.source);
  const auto& dst = extension(m.target);
  const FinCat& c = *u_.target;
  PresheafMap out{src.object, dst.object, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> comp;
    std::vector<int> image;
    comp.reserve(src.families[i].size());
    for (const auto& fam : src.families[i]) {
      image.clear();
      for (std::size_t s = 0; s < fam.size(); ++s) image.push_back(m(slots_[i][s].object, fam[s]));
      comp.push_back(dst.index[i].at(image));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

PresheafMap KanAdjunction::unit(const PresheafPtr& p) const {
  if (identity_) return identity_map(p);
  PresheafPtr up = restrict(p);
  const auto& ext = extension(up);
  const FinCat& c = *u_.target;
  PresheafMap out{p, ext.object, {}};
  for (int i = 0; i < c.num_objects(); ++i) {
    std::vector<int> comp;
    for (int x = 0; x < p->size(i); ++x) {
      std::vector<int> fam;
      for (const auto& s : slots_[i]) fam.push_back(p->act(s.arrow, x));
      comp.push_back(ext.index[i].at(fam));
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

PresheafMap KanAdjunction::counit(const PresheafPtr& q) const {
  if (identity_) return identity_map(q);
  const auto& ext = extension(q);
  const FinCat& a = *u_.source;
  const FinCat& c = *u_.target;
  PresheafMap out{restrict(ext.object), q, {}};
  for (int j = 0; j < a.num_objects(); ++j) {
    int i = u_.obj(j);
    int slot = -1;
    for (int s = 0; s < static_cast<int>(slots_[i].size()); ++s)
      if (slots_[i][s].object == j && slots_[i][s].arrow == c.identity(i)) slot = s;
    std::vector<int> comp;
    for (const auto& fam : ext.families[i]) comp.push_back(fam[slot]);
    out.components.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::vector<int>> matching_families(const Presheaf& p, int object, const Sieve& cover,
                                                const Ceiling& ceiling) {
  const FinCat& c = *p.base;
  (void)object;
  std::map<int, int> slot_of;
  for (int s = 0; s < static_cast<int>(cover.size()); ++s) slot_of[cover[s]] = s;
  detail::Csp csp;
  for (int f : cover) csp.add_variable(p.size(c.src(f)));
  for (int s = 0; s < static_cast<int>(cover.size()); ++s)
    for (int g : c.arrows_into(c.src(cover[s]))) {
      int t = slot_of.at(c.compose(cover[s], g));
      const auto* pg = &p.action[g];
      csp.add_check(std::max(s, t), [s, t, pg](const detail::Csp::Assignment& v) {
        return v[t] == (*pg)[v[s]];
      });
    }
  std::vector<std::vector<int>> out;
  csp.solve(
      [&](const detail::Csp::Assignment& v) {
        out.push_back(v);
        return true;
      },
      ceiling, "matching families");
  return out;
}

SheafVerdict sheaf_check(const Site& site, const Presheaf& p, bool all_failures,
                         const Ceiling& ceiling) {
  if (!(*site.cat == *p.base))
    throw Error(ErrorKind::ContextMismatch, "sheaf_check: presheaf not over the site");
  const FinCat& c = *p.base;
  SheafVerdict v;
  for (int i = 0; i < c.num_objects(); ++i)
    for (const auto& cover : site.covers[i])
      for (const auto& fam : matching_families(p, i, cover, ceiling)) {
        int count = 0;
        for (int x = 0; x < p.size(i); ++x) {
          bool ok = true;
          for (std::size_t s = 0; s < cover.size() && ok; ++s)
            ok = p.act(cover[s], x) == fam[s];
          if (ok) ++count;
        }
        if (count == 1) continue;
        v.is_sheaf = false;
        v.failures.push_back({i, cover, fam,
                              count == 0 ? SheafWitness::Failure::Existence
                                         : SheafWitness::Failure::Uniqueness,
                              count});
        if (!all_failures) return v;
      }
  return v;
}

std::string describe(const Site& site, const SheafWitness& w) {
  const FinCat& c = *site.cat;
  std::ostringstream os;
  os << (w.failure == SheafWitness::Failure::Existence ? "existence failure"
                                                       : "uniqueness failure")
     << " at " << c.object_name(w.object) << ": cover " << describe_sieve(c, w.cover)
     << ", family [";
  for (std::size_t s = 0; s < w.family.size(); ++s) os << (s ? "," : "") << w.family[s];
  os << "] has " << w.amalgamations << " amalgamation" << (w.amalgamations == 1 ? "" : "s");
  return os.str();
}

ElementsSite elements_coverage(const Site& site, const PresheafPtr& sheaf) {
  if (!sheaf_check(site, *sheaf).is_sheaf)
    throw Error(ErrorKind::Rejected, "elements_coverage: input is not a sheaf");
  const FinCat& c = *site.cat;
  ElementsSite out{category_of_elements(*sheaf), {}};
  out.site.cat = out.elements.cat;
  out.site.topology_mode = site.topology_mode;
  out.site.covers.resize(out.elements.cat->num_objects());
  for (int obj = 0; obj < out.elements.cat->num_objects(); ++obj) {
    auto [i, e] = out.elements.element[obj];
    for (const auto& cover : site.covers[i]) {
      // the family (e·f)_{f ∈ R} amalgamates to e; its induced sieve on (I, e)
      Sieve induced;
      for (int f : cover) induced.push_back(elements_morphism(out.elements, *sheaf, f, e));
      std::sort(induced.begin(), induced.end());
      out.site.covers[obj].push_back(std::move(induced));
    }
  }
  (void)c;
  return out;
}

std::string describe(const Presheaf& p) {
  std::ostringstream os;
  const FinCat& c = *p.base;
  os << "sizes {";
  for (int o = 0; o < c.num_objects(); ++o)
    os << (o ? ", " : "") << c.object_name(o) << ": " << p.size(o);
  os << "}";
  return os.str();
}

}  // namespace s4sem
