#include "s4sem/fincat.hpp"

#include <algorithm>
#include <set>

namespace s4sem {

int FinCat::add_object(std::string name) {
  if (object_index_.count(name))
    throw Error(ErrorKind::Shape, "duplicate object '" + name + "'");
  int id = num_objects();
  object_index_.emplace(name, id);
  objects_.push_back(std::move(name));
  identity_.push_back(-1);
  return id;
}

int FinCat::add_morphism(std::string name, int src, int dst) {
  if (morphism_index_.count(name))
    throw Error(ErrorKind::Shape, "duplicate morphism '" + name + "'");
  if (src < 0 || src >= num_objects() || dst < 0 || dst >= num_objects())
    throw Error(ErrorKind::UnknownId, "morphism '" + name + "' has unknown endpoint");
  int id = num_morphisms();
  morphism_index_.emplace(name, id);
  morphisms_.push_back({std::move(name), src, dst});
  for (auto& row : compose_) row.push_back(-1);
  compose_.emplace_back(morphisms_.size(), -1);
  return id;
}

void FinCat::set_identity(int object, int morphism) {
  identity_.at(object) = morphism;
}

void FinCat::set_composite(int g, int f, int gf) {
  compose_.at(g).at(f) = gf;
}

void FinCat::erase_composite(int g, int f) { compose_.at(g).at(f) = -1; }

void FinCat::fill_identity_composites() {
  for (int f = 0; f < num_morphisms(); ++f) {
    int is = identity_[src(f)];
    int it = identity_[dst(f)];
    if (is >= 0) compose_[f][is] = f;
    if (it >= 0) compose_[it][f] = f;
  }
}

int FinCat::object(std::string_view name) const {
  auto it = object_index_.find(std::string(name));
  if (it == object_index_.end())
    throw Error(ErrorKind::UnknownId, "unknown object '" + std::string(name) + "'");
  return it->second;
}

int FinCat::morphism_id(std::string_view name) const {
  auto it = morphism_index_.find(std::string(name));
  if (it == morphism_index_.end())
    throw Error(ErrorKind::UnknownId, "unknown morphism '" + std::string(name) + "'");
  return it->second;
}

bool FinCat::has_object(std::string_view name) const {
  return object_index_.count(std::string(name)) > 0;
}

std::vector<int> FinCat::hom(int a, int b) const {
  std::vector<int> out;
  for (int f = 0; f < num_morphisms(); ++f)
    if (src(f) == a && dst(f) == b) out.push_back(f);
  return out;
}

std::vector<int> FinCat::arrows_into(int b) const {
  std::vector<int> out;
  for (int f = 0; f < num_morphisms(); ++f)
    if (dst(f) == b) out.push_back(f);
  return out;
}

std::vector<int> FinCat::arrows_from(int a) const {
  std::vector<int> out;
  for (int f = 0; f < num_morphisms(); ++f)
    if (src(f) == a) out.push_back(f);
  return out;
}

bool FinCat::operator==(const FinCat& other) const {
  if (objects_ != other.objects_ || identity_ != other.identity_ ||
      compose_ != other.compose_ || morphisms_.size() != other.morphisms_.size())
    return false;
  for (std::size_t i = 0; i < morphisms_.size(); ++i) {
    const auto& m = morphisms_[i];
    const auto& n = other.morphisms_[i];
    if (m.name != n.name || m.src != n.src || m.dst != n.dst) return false;
  }
  return true;
}

ValidationReport validate_category(const FinCat& c) {
  ValidationReport r;
  const int nm = c.num_morphisms();
  for (int o = 0; o < c.num_objects(); ++o) {
    int id = c.identity(o);
    if (id < 0) {
      r.add("missing identity", c.object_name(o));
    } else if (c.src(id) != o || c.dst(id) != o) {
      r.add("identity has wrong endpoints", c.object_name(o));
    }
  }
  if (!r.ok()) return r;

  for (int g = 0; g < nm; ++g) {
    for (int f = 0; f < nm; ++f) {
      int gf = c.compose(g, f);
      std::string pair = "(" + c.morphism_name(g) + "," + c.morphism_name(f) + ")";
      if (c.dst(f) != c.src(g)) {
        if (gf >= 0) r.add("composite defined on non-composable pair", pair);
        continue;
      }
      if (gf < 0) {
        r.add("missing composite", pair);
        continue;
      }
      if (c.src(gf) != c.src(f) || c.dst(gf) != c.dst(g))
        r.add("composite has wrong endpoints", pair);
    }
  }
  for (int f = 0; f < nm; ++f) {
    int is = c.identity(c.src(f));
    int it = c.identity(c.dst(f));
    if (c.compose(f, is) != f)
      r.add("right unit law", c.morphism_name(f));
    if (c.compose(it, f) != f)
      r.add("left unit law", c.morphism_name(f));
  }
  if (!r.ok()) return r;

  for (int h = 0; h < nm; ++h)
    for (int g = 0; g < nm; ++g) {
      if (c.dst(g) != c.src(h)) continue;
      int hg = c.compose(h, g);
      for (int f = 0; f < nm; ++f) {
        if (c.dst(f) != c.src(g)) continue;
        int gf = c.compose(g, f);
        if (c.compose(h, gf) != c.compose(hg, f))
          r.add("associativity at (h,g,f)",
                "(" + c.morphism_name(h) + "," + c.morphism_name(g) + "," +
                    c.morphism_name(f) + ")");
      }
    }
  return r;
}

FinCat opposite(const FinCat& c) {
  FinCat op;
  for (int o = 0; o < c.num_objects(); ++o) op.add_object(c.object_name(o));
  for (int f = 0; f < c.num_morphisms(); ++f)
    op.add_morphism(c.morphism_name(f), c.dst(f), c.src(f));
  for (int o = 0; o < c.num_objects(); ++o)
    if (c.identity(o) >= 0) op.set_identity(o, c.identity(o));
  for (int g = 0; g < c.num_morphisms(); ++g)
    for (int f = 0; f < c.num_morphisms(); ++f) {
      int fg = c.compose(f, g);
      if (fg >= 0) op.set_composite(g, f, fg);
    }
  return op;
}

CatPtr terminal_category() {
  FinCat c;
  c.add_object("*");
  c.set_identity(0, c.add_morphism("id*", 0, 0));
  c.fill_identity_composites();
  return std::make_shared<const FinCat>(std::move(c));
}

CatPtr walking_arrow() {
  FinCat c;
  c.add_object("0");
  c.add_object("1");
  c.set_identity(0, c.add_morphism("id0", 0, 0));
  c.set_identity(1, c.add_morphism("id1", 1, 1));
  c.add_morphism("a", 0, 1);
  c.fill_identity_composites();
  return std::make_shared<const FinCat>(std::move(c));
}

CatPtr chain_category(int n) {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (int j = i; j < n; ++j) leq[i][j] = true;
  }
  return poset_category(names, leq);
}

CatPtr discrete_category(int n) {
  FinCat c;
  for (int i = 0; i < n; ++i) {
    c.add_object(std::to_string(i));
    c.set_identity(i, c.add_morphism("id" + std::to_string(i), i, i));
  }
  c.fill_identity_composites();
  return std::make_shared<const FinCat>(std::move(c));
}

CatPtr poset_category(const std::vector<std::string>& names,
                      const std::vector<std::vector<bool>>& leq) {
  const int n = static_cast<int>(names.size());
  FinCat c;
  for (const auto& name : names) c.add_object(name);
  std::vector<std::vector<int>> arrow(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i) {
    arrow[i][i] = c.add_morphism("id" + names[i], i, i);
    c.set_identity(i, arrow[i][i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && leq[i][j])
        arrow[i][j] = c.add_morphism(names[i] + "<=" + names[j], i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (arrow[i][j] >= 0 && arrow[j][k] >= 0 && arrow[i][k] >= 0)
          c.set_composite(arrow[j][k], arrow[i][j], arrow[i][k]);
  return std::make_shared<const FinCat>(std::move(c));
}

CatPtr monoid_category(const std::vector<std::string>& elements,
                       const std::vector<std::vector<int>>& mult) {
  FinCat c;
  c.add_object("*");
  for (const auto& e : elements) c.add_morphism(e, 0, 0);
  c.set_identity(0, 0);
  for (std::size_t g = 0; g < elements.size(); ++g)
    for (std::size_t f = 0; f < elements.size(); ++f)
      c.set_composite(static_cast<int>(g), static_cast<int>(f), mult[g][f]);
  return std::make_shared<const FinCat>(std::move(c));
}

bool Functor::operator==(const Functor& other) const {
  return on_objects == other.on_objects && on_morphisms == other.on_morphisms &&
         *source == *other.source && *target == *other.target;
}

Functor identity_functor(CatPtr c) {
  Functor f{c, c, {}, {}};
  for (int o = 0; o < c->num_objects(); ++o) f.on_objects.push_back(o);
  for (int m = 0; m < c->num_morphisms(); ++m) f.on_morphisms.push_back(m);
  return f;
}

Functor constant_functor(CatPtr source, CatPtr target, int object) {
  Functor f{source, target, {}, {}};
  f.on_objects.assign(source->num_objects(), object);
  f.on_morphisms.assign(source->num_morphisms(), target->identity(object));
  return f;
}

Functor compose(const Functor& g, const Functor& f) {
  if (!(*f.target == *g.source))
    throw Error(ErrorKind::ContextMismatch, "functor composition: categories differ");
  Functor h{f.source, g.target, {}, {}};
  for (int o : f.on_objects) h.on_objects.push_back(g.obj(o));
  for (int m : f.on_morphisms) h.on_morphisms.push_back(g.mor(m));
  return h;
}

bool is_identity_functor(const Functor& f) {
  if (!(*f.source == *f.target)) return false;
  for (int o = 0; o < static_cast<int>(f.on_objects.size()); ++o)
    if (f.on_objects[o] != o) return false;
  for (int m = 0; m < static_cast<int>(f.on_morphisms.size()); ++m)
    if (f.on_morphisms[m] != m) return false;
  return true;
}

namespace {

void require_total(const Functor& f) {
  if (static_cast<int>(f.on_objects.size()) != f.source->num_objects() ||
      static_cast<int>(f.on_morphisms.size()) != f.source->num_morphisms())
    throw Error(ErrorKind::Shape, "functor maps are not total");
  for (int o : f.on_objects)
    if (o < 0 || o >= f.target->num_objects())
      throw Error(ErrorKind::Shape, "functor object map leaves target");
  for (int m : f.on_morphisms)
    if (m < 0 || m >= f.target->num_morphisms())
      throw Error(ErrorKind::Shape, "functor morphism map leaves target");
}

}  // namespace

ValidationReport validate_diagram(const Functor& f) {
  require_total(f);
  ValidationReport r;
  const FinCat& s = *f.source;
  const FinCat& t = *f.target;
  for (int m = 0; m < s.num_morphisms(); ++m) {
    int fm = f.mor(m);
    if (t.src(fm) != f.obj(s.src(m)) || t.dst(fm) != f.obj(s.dst(m)))
      r.add("source/target mismatch", s.morphism_name(m));
  }
  for (int o = 0; o < s.num_objects(); ++o)
    if (f.mor(s.identity(o)) != t.identity(f.obj(o)))
      r.add("identity not preserved", s.object_name(o));
  for (int g = 0; g < s.num_morphisms(); ++g)
    for (int h = 0; h < s.num_morphisms(); ++h) {
      int gh = s.compose(g, h);
      if (gh < 0) continue;
      if (t.compose(f.mor(g), f.mor(h)) != f.mor(gh))
        r.add("composition not preserved",
              "(" + s.morphism_name(g) + "," + s.morphism_name(h) + ")");
    }
  return r;
}

ValidationReport validate_diagram(const NatTrans& t) {
  require_total(t.source);
  require_total(t.target);
  const FinCat& s = *t.source.source;
  const FinCat& d = *t.source.target;
  if (!(s == *t.target.source) || !(d == *t.target.target))
    throw Error(ErrorKind::Shape, "natural transformation between non-parallel functors");
  if (static_cast<int>(t.components.size()) != s.num_objects())
    throw Error(ErrorKind::Shape, "natural transformation components not total");
  ValidationReport r;
  for (int o = 0; o < s.num_objects(); ++o) {
    int c = t.components[o];
    if (d.src(c) != t.source.obj(o) || d.dst(c) != t.target.obj(o))
      r.add("component has wrong endpoints", s.object_name(o));
  }
  if (!r.ok()) return r;
  for (int m = 0; m < s.num_morphisms(); ++m) {
    int lhs = d.compose(t.target.mor(m), t.components[s.src(m)]);
    int rhs = d.compose(t.components[s.dst(m)], t.source.mor(m));
    if (lhs != rhs) r.add("naturality square", s.morphism_name(m));
  }
  return r;
}

int Slice::id_object() const {
  return object_of_arrow[projection.target->identity(base_object)];
}

Slice slice(CatPtr c, int i) {
  if (i < 0 || i >= c->num_objects())
    throw Error(ErrorKind::UnknownId, "slice: unknown object");
  Slice out;
  out.base_object = i;
  out.object_of_arrow.assign(c->num_morphisms(), -1);
  FinCat s;
  for (int f : c->arrows_into(i)) {
    out.object_of_arrow[f] = s.add_object(c->morphism_name(f));
    out.object_arrow.push_back(f);
  }
  const int n = s.num_objects();
  // morphisms h : f → g with g∘h = f
  std::vector<std::vector<std::vector<int>>> between(n, std::vector<std::vector<int>>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int f = out.object_arrow[a];
      int g = out.object_arrow[b];
      for (int h : c->hom(c->src(f), c->src(g))) {
        if (c->compose(g, h) != f) continue;
        std::string name = c->morphism_name(h) + ":" + c->morphism_name(f) + "->" +
                           c->morphism_name(g);
        int m = s.add_morphism(name, a, b);
        out.morphism_arrow.push_back(h);
        between[a][b].push_back(m);
        if (c->is_identity(h) && a == b) s.set_identity(a, m);
      }
    }
  auto find = [&](int a, int b, int h) {
    for (int m : between[a][b])
      if (out.morphism_arrow[m] == h) return m;
    return -1;
  };
  for (int k = 0; k < s.num_morphisms(); ++k)
    for (int m = 0; m < s.num_morphisms(); ++m) {
      if (s.dst(m) != s.src(k)) continue;
      int h = c->compose(out.morphism_arrow[k], out.morphism_arrow[m]);
      s.set_composite(k, m, find(s.src(m), s.dst(k), h));
    }
  out.cat = std::make_shared<const FinCat>(std::move(s));
  out.projection.source = out.cat;
  out.projection.target = c;
  for (int a = 0; a < n; ++a) out.projection.on_objects.push_back(c->src(out.object_arrow[a]));
  out.projection.on_morphisms = out.morphism_arrow;
  return out;
}

DiscreteInclusion discrete_subcategory(CatPtr c) {
  FinCat d;
  Functor inc;
  for (int o = 0; o < c->num_objects(); ++o) {
    d.add_object(c->object_name(o));
    int id = d.add_morphism(c->morphism_name(c->identity(o)), o, o);
    d.set_identity(o, id);
    inc.on_objects.push_back(o);
    inc.on_morphisms.push_back(c->identity(o));
  }
  d.fill_identity_composites();
  DiscreteInclusion out;
  out.cat = std::make_shared<const FinCat>(std::move(d));
  inc.source = out.cat;
  inc.target = c;
  out.inclusion = std::move(inc);
  return out;
}

bool is_sieve(const FinCat& c, int target, const Sieve& s) {
  std::set<int> members(s.begin(), s.end());
  for (int f : s) {
    if (c.dst(f) != target) return false;
    for (int g : c.arrows_into(c.src(f)))
      if (!members.count(c.compose(f, g))) return false;
  }
  return true;
}

Sieve maximal_sieve(const FinCat& c, int target) { return c.arrows_into(target); }

Sieve pullback_sieve(const FinCat& c, const Sieve& s, int f) {
  std::set<int> members(s.begin(), s.end());
  Sieve out;
  for (int g : c.arrows_into(c.src(f)))
    if (members.count(c.compose(f, g))) out.push_back(g);
  return out;
}

std::vector<Sieve> all_sieves(const FinCat& c, int target) {
  std::vector<int> arrows = c.arrows_into(target);
  const int n = static_cast<int>(arrows.size());
  if (n > 20) throw Error(ErrorKind::CeilingExceeded, "too many arrows for sieve enumeration");
  std::vector<Sieve> out;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    Sieve s;
    for (int j = 0; j < n; ++j)
      if (mask & (1ul << j)) s.push_back(arrows[j]);
    if (is_sieve(c, target, s)) out.push_back(std::move(s));
  }
  return out;
}

ValidationReport validate_site(const Site& site) {
  ValidationReport r;
  const FinCat& c = *site.cat;
  if (static_cast<int>(site.covers.size()) != c.num_objects())
    throw Error(ErrorKind::Shape, "site covers not given per object");
  for (int o = 0; o < c.num_objects(); ++o)
    for (const auto& s : site.covers[o])
      if (!is_sieve(c, o, s)) r.add("cover is not a sieve", describe_sieve(c, s));
  if (!site.topology_mode || !r.ok()) return r;
  auto covers = [&](int o, const Sieve& s) {
    for (const auto& t : site.covers[o])
      if (t == s) return true;
    return false;
  };
  for (int o = 0; o < c.num_objects(); ++o) {
    if (!covers(o, maximal_sieve(c, o)))
      r.add("maximal sieve does not cover", c.object_name(o));
    for (const auto& s : site.covers[o])
      for (int f : c.arrows_into(o))
        if (!covers(c.src(f), pullback_sieve(c, s, f)))
          r.add("cover not stable under pullback",
                describe_sieve(c, s) + " along " + c.morphism_name(f));
  }
  return r;
}

Site opens_site(CatPtr opens, const std::vector<std::vector<int>>& points_of) {
  Site site{opens, {}, true};
  for (int u = 0; u < opens->num_objects(); ++u) {
    std::set<int> want(points_of[u].begin(), points_of[u].end());
    std::vector<Sieve> covers;
    for (auto& s : all_sieves(*opens, u)) {
      std::set<int> got;
      for (int f : s)
        for (int p : points_of[opens->src(f)]) got.insert(p);
      if (got == want) covers.push_back(s);
    }
    site.covers.push_back(std::move(covers));
  }
  return site;
}

std::string describe_sieve(const FinCat& c, const Sieve& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += c.morphism_name(s[i]);
  }
  return out + "}";
}

}  // namespace s4sem
