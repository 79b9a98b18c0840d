#include "s4sem/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace s4sem {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::Malformed, "model: " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) malformed(where + ": missing '" + key + "'");
  return j.at(key);
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) malformed(where + ": expected a string");
  return j.get<std::string>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) malformed(where + ": expected an integer");
  return j.get<int>();
}

int object_named(const FinCat& c, const std::string& name, const std::string& where) {
  if (!c.has_object(name)) malformed(where + ": unknown object '" + name + "'");
  return c.object(name);
}

int morphism_named(const FinCat& c, const std::string& name, const std::string& where) {
  for (int f = 0; f < c.num_morphisms(); ++f)
    if (c.morphism_name(f) == name) return f;
  malformed(where + ": unknown morphism '" + name + "'");
}

CatPtr parse_category(const json& j, const std::string& where) {
  if (!j.is_object()) malformed(where + ": expected an object");
  FinCat c;
  const json& objects = field(j, "objects", where);
  if (!objects.is_array() || objects.empty()) malformed(where + ".objects: expected a nonempty array");
  for (const auto& o : objects) {
    std::string name = text(o, where + ".objects");
    if (c.has_object(name)) malformed(where + ".objects: duplicate '" + name + "'");
    c.add_object(name);
  }
  std::set<std::string> seen;
  const json& morphisms = field(j, "morphisms", where);
  if (!morphisms.is_array()) malformed(where + ".morphisms: expected an array");
  for (const auto& m : morphisms) {
    std::string name = text(field(m, "name", where + ".morphisms"), where + ".morphisms");
    if (!seen.insert(name).second) malformed(where + ".morphisms: duplicate '" + name + "'");
    int s = object_named(c, text(field(m, "src", name), name), name);
    int d = object_named(c, text(field(m, "dst", name), name), name);
    c.add_morphism(name, s, d);
  }
  const json& ids = field(j, "identities", where);
  if (!ids.is_object()) malformed(where + ".identities: expected an object");
  for (const auto& [obj, mor] : ids.items()) {
    int o = object_named(c, obj, where + ".identities");
    c.set_identity(o, morphism_named(c, text(mor, where + ".identities"), where + ".identities"));
  }
  const json& comp = j.contains("composition") ? j.at("composition") : json::array();
  if (!comp.is_array()) malformed(where + ".composition: expected an array");
  for (const auto& t : comp) {
    if (!t.is_array() || t.size() != 3)
      malformed(where + ".composition: expected triples [g, f, gf]");
    std::string w = where + ".composition";
    int g = morphism_named(c, text(t[0], w), w);
    int f = morphism_named(c, text(t[1], w), w);
    int gf = morphism_named(c, text(t[2], w), w);
    c.set_composite(g, f, gf);
  }
  for (int o = 0; o < c.num_objects(); ++o)
    if (c.identity(o) < 0) malformed(where + ": no identity for '" + c.object_name(o) + "'");
  c.fill_identity_composites();
  return std::make_shared<const FinCat>(std::move(c));
}

PresheafPtr parse_presheaf(const CatPtr& c, const json& j, const std::string& name) {
  Presheaf p{c, std::vector<int>(c->num_objects(), -1), {}};
  const json& sizes = field(j, "sizes", name);
  if (sizes.is_array()) {
    if (static_cast<int>(sizes.size()) != c->num_objects())
      malformed(name + ".sizes: one entry per object");
    for (int o = 0; o < c->num_objects(); ++o) p.sizes[o] = integer(sizes[o], name + ".sizes");
  } else if (sizes.is_object()) {
    for (const auto& [obj, n] : sizes.items())
      p.sizes[object_named(*c, obj, name + ".sizes")] = integer(n, name + ".sizes");
  } else {
    malformed(name + ".sizes: expected an array or object");
  }
  for (int o = 0; o < c->num_objects(); ++o)
    if (p.sizes[o] < 0) malformed(name + ".sizes: missing or negative at '" + c->object_name(o) + "'");
  p.action.assign(c->num_morphisms(), {});
  std::vector<bool> given(c->num_morphisms(), false);
  if (j.contains("actions")) {
    const json& actions = j.at("actions");
    if (!actions.is_object()) malformed(name + ".actions: expected an object");
    for (const auto& [mor, table] : actions.items()) {
      int f = morphism_named(*c, mor, name + ".actions");
      if (!table.is_array()) malformed(name + ".actions." + mor + ": expected an array");
      int from = p.sizes[c->dst(f)], to = p.sizes[c->src(f)];
      if (static_cast<int>(table.size()) != from)
        malformed(name + ".actions." + mor + ": expected " + std::to_string(from) + " entries");
      for (const auto& x : table) {
        int v = integer(x, name + ".actions." + mor);
        if (v < 0 || v >= to) malformed(name + ".actions." + mor + ": index out of range");
        p.action[f].push_back(v);
      }
      given[f] = true;
    }
  }
  for (int f = 0; f < c->num_morphisms(); ++f) {
    if (given[f]) continue;
    if (!c->is_identity(f)) malformed(name + ".actions: missing '" + c->morphism_name(f) + "'");
    for (int x = 0; x < p.sizes[c->src(f)]; ++x) p.action[f].push_back(x);
  }
  return share(std::move(p));
}

Site parse_site(const CatPtr& c, const json& j) {
  if (!j.is_object()) malformed("site: expected an object");
  if (j.contains("points")) {
    std::vector<std::vector<int>> points(c->num_objects());
    std::vector<bool> given(c->num_objects(), false);
    for (const auto& [obj, pts] : j.at("points").items()) {
      int o = object_named(*c, obj, "site.points");
      if (!pts.is_array()) malformed("site.points." + obj + ": expected an array");
      for (const auto& x : pts) points[o].push_back(integer(x, "site.points." + obj));
      std::sort(points[o].begin(), points[o].end());
      given[o] = true;
    }
    for (int o = 0; o < c->num_objects(); ++o)
      if (!given[o]) malformed("site.points: missing '" + c->object_name(o) + "'");
    return opens_site(c, points);
  }
  Site s{c, std::vector<std::vector<Sieve>>(c->num_objects()), false};
  if (j.contains("topology")) {
    if (!j.at("topology").is_boolean()) malformed("site.topology: expected a boolean");
    s.topology_mode = j.at("topology").get<bool>();
  }
  const json& covers = field(j, "covers", "site");
  if (!covers.is_object()) malformed("site.covers: expected an object");
  for (const auto& [obj, list] : covers.items()) {
    int o = object_named(*c, obj, "site.covers");
    if (!list.is_array()) malformed("site.covers." + obj + ": expected an array of sieves");
    for (const auto& sieve : list) {
      if (!sieve.is_array()) malformed("site.covers." + obj + ": expected morphism lists");
      Sieve s_;
      for (const auto& f : sieve)
        s_.push_back(morphism_named(*c, text(f, "site.covers." + obj), "site.covers." + obj));
      std::sort(s_.begin(), s_.end());
      s_.erase(std::unique(s_.begin(), s_.end()), s_.end());
      s.covers[o].push_back(std::move(s_));
    }
  }
  return s;
}

ComonadSpec parse_comonad(const CatPtr& c, const json& j) {
  if (!j.is_object()) malformed("comonad: expected an object");
  ComonadSpec spec;
  auto flag = [&](const char* key) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_boolean()) malformed(std::string("comonad.") + key + ": expected a boolean");
    return j.at(key).get<bool>();
  };
  if (flag("from_points")) {
    spec.kind = ComonadSpec::Kind::FromPoints;
    return spec;
  }
  if (flag("identity")) return spec;
  if (!j.contains("explicit")) malformed("comonad: expected from_points, identity or explicit");
  const json& e = j.at("explicit");
  spec.kind = ComonadSpec::Kind::Explicit;
  spec.small = parse_category(field(e, "category", "comonad.explicit"), "comonad.explicit.category");
  const FinCat& a = *spec.small;
  spec.on_objects.assign(a.num_objects(), -1);
  spec.on_morphisms.assign(a.num_morphisms(), -1);
  for (const auto& [k, v] : field(e, "objects", "comonad.explicit").items())
    spec.on_objects[object_named(a, k, "comonad.explicit.objects")] =
        object_named(*c, text(v, "comonad.explicit.objects"), "comonad.explicit.objects");
  for (const auto& [k, v] : field(e, "morphisms", "comonad.explicit").items())
    spec.on_morphisms[morphism_named(a, k, "comonad.explicit.morphisms")] =
        morphism_named(*c, text(v, "comonad.explicit.morphisms"), "comonad.explicit.morphisms");
  for (int o = 0; o < a.num_objects(); ++o)
    if (spec.on_objects[o] < 0) malformed("comonad.explicit.objects: missing '" + a.object_name(o) + "'");
  for (int f = 0; f < a.num_morphisms(); ++f) {
    if (spec.on_morphisms[f] >= 0) continue;
    if (!a.is_identity(f)) malformed("comonad.explicit.morphisms: missing '" + a.morphism_name(f) + "'");
    spec.on_morphisms[f] = c->identity(spec.on_objects[a.src(f)]);
  }
  return spec;
}

}  // namespace

Model parse_model(const std::string& source, const std::string& name) {
  json j;
  try {
    j = json::parse(source);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "category" && key != "presheaves" && key != "site" && key != "comonad" &&
        key != "bound" && key != "name")
      malformed("unknown key '" + key + "'");
  Model m;
  m.name = j.contains("name") ? text(j.at("name"), "name") : name;
  m.cat = parse_category(field(j, "category", "model"), "category");
  if (j.contains("bound")) m.bound = integer(j.at("bound"), "bound");
  if (m.bound < 0) malformed("bound: must be nonnegative");
  if (j.contains("presheaves")) {
    const json& ps = j.at("presheaves");
    if (!ps.is_object()) malformed("presheaves: expected an object");
    for (const auto& [pname, pj] : ps.items())
      m.presheaves.emplace_back(pname, parse_presheaf(m.cat, pj, pname));
  }
  if (j.contains("site")) m.site = parse_site(m.cat, j.at("site"));
  if (j.contains("comonad")) m.comonad = parse_comonad(m.cat, j.at("comonad"));
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_model(ss.str(), name);
}

std::shared_ptr<const KanAdjunction> model_adjunction(const Model& m) {
  if (!m.comonad) throw Error(ErrorKind::Rejected, m.name + ": no comonad declared");
  Functor u;
  switch (m.comonad->kind) {
    case ComonadSpec::Kind::Identity:
      u = identity_functor(m.cat);
      break;
    case ComonadSpec::Kind::FromPoints:
      u = discrete_subcategory(m.cat).inclusion;
      break;
    case ComonadSpec::Kind::Explicit:
      u = Functor{m.comonad->small, m.cat, m.comonad->on_objects, m.comonad->on_morphisms};
      break;
  }
  return std::make_shared<const KanAdjunction>(std::move(u));
}

ComonadPtr model_comonad(const Model& m) {
  if (m.comonad && m.comonad->kind == ComonadSpec::Kind::Identity) return identity_comonad(m.cat);
  return comonad_from_adjunction(model_adjunction(m));
}

std::vector<PresheafPtr> bounded_presheaves(const CatPtr& c, int bound, const Ceiling& ceiling) {
  std::vector<PresheafPtr> out;
  for (auto& p : enumerate_presheaves(c, bound, ceiling)) out.push_back(share(std::move(p)));
  return out;
}

Verdict model_laws(const Model& m, const Ceiling& ceiling) {
  Verdict v;
  const CatPtr& c = m.cat;
  auto report = [&](const std::string& what, const ValidationReport& r) {
    for (const auto& x : r.violations) v.fail(what + ": " + x.law + " " + x.witness);
    return r.ok();
  };
  v.note("category: " + std::to_string(c->num_objects()) + " objects, " +
         std::to_string(c->num_morphisms()) + " morphisms");
  if (!report("category", validate_category(*c))) return v;

  FinCat op = opposite(*c);
  report("opposite", validate_category(op));
  if (!(opposite(op) == *c)) v.fail("opposite: not an involution");
  for (int i = 0; i < c->num_objects(); ++i) {
    Slice s = slice(c, i);
    report("slice over " + c->object_name(i), validate_category(*s.cat));
    report("slice projection over " + c->object_name(i), validate_diagram(s.projection));
  }
  if (m.site) report("site", validate_site(*m.site));

  std::vector<std::pair<std::string, PresheafPtr>> suite;
  for (const auto& [name, p] : m.presheaves)
    if (report("presheaf " + name, validate_presheaf(*p))) suite.emplace_back(name, p);
  for (const auto& p : bounded_presheaves(c, m.bound, ceiling)) {
    if (report("enumerated presheaf", validate_presheaf(*p))) suite.emplace_back("", p);
  }
  v.note("suite: " + std::to_string(suite.size()) + " presheaves with bound " +
         std::to_string(m.bound));

  auto label = [&](std::size_t k) {
    return suite[k].first.empty() ? "suite#" + std::to_string(k) : suite[k].first;
  };
  SubobjectClassifier omega = subobject_classifier(c);
  report("omega", validate_presheaf(*omega.omega));
  std::vector<PresheafPtr> reps;
  for (int i = 0; i < c->num_objects(); ++i) reps.push_back(share(yoneda(c, i)));

  long long checks = 0;
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const PresheafPtr& p = suite[k].second;
    for (int i = 0; i < c->num_objects(); ++i, ++checks)
      if (count_maps(reps[i], p, ceiling) != p->size(i))
        v.fail("yoneda: |Nat(y" + c->object_name(i) + ", " + label(k) + ")| != |" + label(k) +
               "(" + c->object_name(i) + ")|");
    Elements el = category_of_elements(*p);
    report("elements of " + label(k), validate_category(*el.cat));
    report("elements projection of " + label(k), validate_diagram(el.projection));
    auto subs = enumerate_subpresheaves(*p, ceiling);
    ++checks;
    if (static_cast<long long>(subs.size()) != count_maps(p, omega.omega, ceiling))
      v.fail("subobject classifier: |Sub(" + label(k) + ")| != |Nat(" + label(k) + ", Ω)|");
    for (const auto& s : subs) {
      ++checks;
      if (omega.classified(omega.characteristic(p, s)) != s)
        v.fail("subobject classifier: characteristic map does not classify a subobject of " +
               label(k));
    }
  }

  // Product and exponential adjunctions over every triple of the suite.
  for (std::size_t a = 0; a < suite.size(); ++a)
    for (std::size_t b = 0; b < suite.size(); ++b) {
      const PresheafPtr& p = suite[a].second;
      const PresheafPtr& q = suite[b].second;
      Product pq = product(p, q);
      report("product", validate_map(pq.fst));
      report("product", validate_map(pq.snd));
      Exponential e = exponential(p, q, ceiling);
      report("exponential", validate_presheaf(*e.object));
      report("evaluation", validate_map(e.eval));
      for (std::size_t r = 0; r < suite.size(); ++r) {
        const PresheafPtr& x = suite[r].second;
        ++checks;
        if (count_maps(x, pq.object, ceiling) != count_maps(x, p, ceiling) * count_maps(x, q, ceiling))
          v.fail("product: Nat(" + label(r) + ", " + label(a) + "×" + label(b) + ")");
        Product xp = product(x, p);
        ++checks;
        if (count_maps(xp.object, q, ceiling) != count_maps(x, e.object, ceiling))
          v.fail("exponential: Nat(" + label(r) + "×" + label(a) + ", " + label(b) + ")");
      }
    }

  if (m.comonad) {
    ComonadPtr w = model_comonad(m);
    std::vector<PresheafPtr> ps;
    for (const auto& s : suite) ps.push_back(s.second);
    report("comonad " + w->name(), validate_comonad(*w, ps));
    v.note("comonad: " + w->name());
  }
  v.note("checks: " + std::to_string(checks));
  return v;
}

}  // namespace s4sem
