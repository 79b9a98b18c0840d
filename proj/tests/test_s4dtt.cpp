#include <doctest.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "s4sem/s4dtt.hpp"

using namespace s4sem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Module golden() { return parse_module(slurp(std::string(S4SEM_CORPUS_DIR) + "/golden.s4")); }

const char* kPrelude = "type A; type B; const a : A; const b : B; const c : Box A;\n";

ModuleResult run(const std::string& body) { return check_module(parse_module(kPrelude + body)); }

Signature prelude_signature() { return run("").signature; }

std::vector<const Decl*> checks(const Module& m) {
  std::vector<const Decl*> out;
  for (const auto& d : m.decls)
    if (d.kind == Decl::Kind::Check) out.push_back(&d);
  return out;
}

bool derivable(const Checker& k, const Telescope& t, const Tm& tm, const Ty& b) {
  try {
    k.type(t, b);
    k.check(t, tm, b);
    return true;
  } catch (const CheckError&) {
    return false;
  }
}

// All raw terms of height ≤ h over the given names and binders.
std::vector<Tm> raw_terms(int h, const std::vector<std::string>& names,
                          const std::vector<std::string>& binders) {
  std::vector<Tm> out;
  for (const auto& n : names) out.push_back(var(n));
  if (h == 0) return out;
  auto smaller = raw_terms(h - 1, names, binders);
  for (const auto& t : smaller) out.push_back(shut(t));
  for (const auto& u : binders)
    for (const auto& s : smaller)
      for (const auto& t : smaller) out.push_back(let_box(u, s, t));
  return out;
}

struct Typed {
  Tm term;
  Ty type;
};

// Well-typed terms of height ≤ 2 in u :: A | x : Box A with constants a, c.
std::vector<Typed> typed_pool(const Checker& k, const Telescope& t) {
  std::vector<Typed> out;
  for (const auto& tm : raw_terms(2, {"u", "x", "a", "c"}, {"v", "u"})) {
    try {
      out.push_back({tm, k.infer(t, tm).judgment.type});
    } catch (const CheckError&) {
    }
  }
  return out;
}

Telescope pool_tele() { return {{{"u", base_type("A")}}, {{"x", box_type(base_type("A"))}}}; }

}  // namespace

TEST_SUITE("s4dtt") {
  TEST_CASE("grammar examples") {
    Tm t = parse_term("let box u := s in t");
    REQUIRE(t->kind == TermExpr::Kind::LetBox);
    CHECK(t->name == "u");
    CHECK(t->first->name == "s");
    CHECK(t->second->name == "t");
    Tm b = parse_term("box(u)");
    REQUIRE(b->kind == TermExpr::Kind::Shut);
    CHECK(b->first->kind == TermExpr::Kind::Var);
    CHECK(print(parse_type("Box Box A")) == "Box Box A");
    Module m = parse_module("check | x : Box A |- x : Box A;");
    REQUIRE(m.decls.size() == 1);
    CHECK(m.decls[0].tele.modal.empty());
    CHECK(m.decls[0].tele.ordinary.size() == 1);
    Module e = parse_module("check |- a : A; -- trailing comment\n");
    CHECK(e.decls[0].tele.names().empty());
  }

  TEST_CASE("syntax errors carry positions") {
    try {
      parse_module("type A;\ncheck u :: A |- box(u : Box A;");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 23);
      CHECK(e.kind() == ErrorKind::Malformed);
    }
    CHECK_THROWS_AS(parse_module("type A"), ParseError);
    CHECK_THROWS_AS(parse_term("let u := a in a"), ParseError);
    CHECK_THROWS_AS(parse_module("check |- a # b : A;"), ParseError);
  }

  TEST_CASE("print then parse is the identity on the corpus") {
    Module m = golden();
    std::string once = print(m);
    Module again = parse_module(once);
    CHECK(print(again) == once);
    REQUIRE(again.decls.size() == m.decls.size());
    for (std::size_t i = 0; i < m.decls.size(); ++i) {
      const auto& d = m.decls[i];
      const auto& e = again.decls[i];
      CHECK(d.kind == e.kind);
      if (d.term) CHECK(canonical(d.term) == canonical(e.term));
      if (d.term2) CHECK(canonical(d.term2) == canonical(e.term2));
      if (d.type) CHECK(same_type(d.type, e.type));
    }
    for (const auto& tm : raw_terms(2, {"u", "x"}, {"v"}))
      CHECK(canonical(parse_term(print(tm))) == canonical(tm));
  }

  TEST_CASE("substitution") {
    Tm t = parse_term("let box u := x in u");
    CHECK(alpha_equal(substitute(t, "x", var("s")), parse_term("let box u := s in u")));
    // y := u would be captured by the binder; the binder is renamed.
    Tm cap = substitute(parse_term("let box u := x in y"), "y", var("u"));
    CHECK(alpha_equal(cap, parse_term("let box w := x in u")));
    CHECK_FALSE(alpha_equal(cap, parse_term("let box u := x in u")));
    CHECK(free_vars(cap) == std::set<std::string>{"x", "u"});
    // shadowed occurrences are untouched
    CHECK(alpha_equal(substitute(parse_term("let box u := u in u"), "u", var("a")),
                      parse_term("let box w := a in w")));
    CHECK_THROWS_AS(substitute(parse_term("box(x)"), "x", var("a"), SubstMode::Ordinary), Error);
    CHECK(alpha_equal(substitute(parse_term("box(x)"), "x", var("a")), parse_term("box(a)")));
    Ty b = parse_type("Box A");
    CHECK(same_type(substitute(b, "x", shut(var("u"))), b));
  }

  TEST_CASE("substitution commutes with the term formers") {
    Tm s = parse_term("let box v := c in v");
    for (const auto& tm : raw_terms(2, {"u", "x", "v"}, {"v", "u"})) {
      Tm r = substitute(tm, "u", s);
      CHECK(free_vars(r).count("u") == 0);
      if (tm->kind == TermExpr::Kind::Shut)
        CHECK(alpha_equal(r, shut(substitute(tm->first, "u", s))));
      if (!free_vars(tm).count("u")) CHECK(alpha_equal(r, tm));
    }
  }

  TEST_CASE("the golden corpus checks and every derivation rechecks") {
    ModuleResult r = check_module(golden());
    if (r.failure) MESSAGE(std::string(print(r.failure->judgment) + " " + r.failure->rule + " " + r.failure->gap));
    REQUIRE(r.ok());
    CHECK(r.results.size() == 17);
    for (const auto& d : r.results) {
      REQUIRE(d.derivation);
      ValidationReport rep = recheck(*d.derivation, r.signature);
      for (const auto& v : rep.violations) MESSAGE(std::string(v.law + ": " + v.witness));
      CHECK(rep.ok());
    }
  }

  TEST_CASE("Var.□, T and 4 derivations") {
    ModuleResult r = run(
        "check u :: A |- u : A;\n"
        "check | x : Box A |- let box u := x in u : A;\n"
        "check | x : Box A |- let box u := x in box(box(u)) : Box Box A;\n");
    REQUIRE(r.ok());
    const Derivation& var_box = *r.results[0].derivation;
    CHECK(var_box.rule == "Var.□");
    CHECK(var_box.premises[0].rule == "Emp.");
    CHECK(var_box.premises[0].premises[0].rule == "Ext.□");
    const Derivation& t = *r.results[1].derivation;
    CHECK(t.rule == "□-Elim");
    CHECK(t.premises[2].rule == "Var.□");
    CHECK(print(t.premises[0].judgment) == ". | x : Box A, x1 : Box A |- A type");
    const Derivation& four = *r.results[2].derivation;
    CHECK(four.premises[2].rule == "□-Intro");
    CHECK(four.premises[2].premises[0].rule == "□-Intro");
    CHECK(print(four.premises[2].premises[0].premises[0].judgment) == "u :: A | . |- u : A");
  }

  TEST_CASE("binders colliding with the telescope are renamed") {
    ModuleResult r = run("check u :: Box A |- let box u := u in box(u) : Box A;");
    REQUIRE(r.ok());
    const Derivation& d = *r.results[0].derivation;
    CHECK(d.premises[2].judgment.tele.modal.back().name == "u1");
    CHECK(recheck(d, r.signature).ok());
  }

  TEST_CASE("seeded ill-typed variants are rejected with the right rule") {
    struct Case {
      const char* src;
      const char* rule;
      const char* gap;
    };
    const Case cases[] = {
        {"check | x : Box A |- y : A;", "Var.", "unbound variable y"},
        {"check | x : A |- box(x) : Box A;", "□-Intro", "ordinary variable x occurs under box"},
        {"check | x : A |- let box u := x in u : A;", "□-Elim", "not a □ type"},
        {"check u :: A |- u : B;", "Var.□", "expected B"},
        {"check | x : Box A |- let box u := x in u : Box A;", "Var.□", "expected Box A"},
        {"check | x : C |- x : C;", "Base", "undeclared base type C"},
        {"check u :: A, u :: A |- u : A;", "Ext.□", "already bound"},
        {"check | x : Box A |- box(let box u := x in u) : Box A;", "□-Intro", "ordinary variable x"},
        {"check |- c : B;", "Const", "expected B"},
        {"check u :: A |- box(u) : A;", "□-Intro", "not a □ type"},
    };
    for (const auto& c : cases) {
      CAPTURE(c.src);
      ModuleResult r = run(c.src);
      REQUIRE_FALSE(r.ok());
      CHECK(r.failure->rule == c.rule);
      CHECK(r.failure->gap.find(c.gap) != std::string::npos);
      CHECK(r.failure->line == 2);
    }
  }

  TEST_CASE("checking stops at the first failure") {
    ModuleResult r = run("check |- a : A;\ncheck |- a : B;\ncheck |- b : B;");
    CHECK_FALSE(r.ok());
    CHECK(r.results.size() == 2);
    CHECK(r.results[0].ok());
    CHECK(r.failure->line == 3);
  }

  TEST_CASE("β and η are decided as holding") {
    Checker k(prelude_signature());
    Telescope none;
    auto beta = defeq(k, none, parse_term("let box u := box(a) in u"), var("a"), base_type("A"));
    CHECK(beta.equal);
    REQUIRE(beta.derivation);
    CHECK(recheck(*beta.derivation, k.signature()).ok());
    Telescope x{{}, {{"x", box_type(base_type("A"))}}};
    auto eta = defeq(k, x, parse_term("let box u := x in box(u)"), var("x"), parse_type("Box A"));
    CHECK(eta.equal);
    REQUIRE(eta.derivation);
    CHECK(recheck(*eta.derivation, k.signature()).ok());
    auto rules = [](const Derivation& d) {
      std::set<std::string> out;
      std::function<void(const Derivation&)> go = [&](const Derivation& n) {
        out.insert(n.rule);
        for (const auto& p : n.premises) go(p);
      };
      go(d);
      return out;
    };
    CHECK(rules(*beta.derivation).count("□-β-Conv"));
    CHECK(rules(*eta.derivation).count("□-η-Conv"));
    Telescope xy{{}, {{"x", box_type(base_type("A"))}, {"y", box_type(base_type("A"))}}};
    CHECK_FALSE(defeq(k, xy, var("x"), var("y"), parse_type("Box A")).equal);
    CHECK_THROWS_AS(defeq(k, xy, var("x"), var("a"), parse_type("Box A")), CheckError);
    ModuleResult r = run("equal | x : Box A, y : Box A |- x == y : Box A;");
    CHECK(r.failure->rule == "≡");
  }

  TEST_CASE("the general β and η schemas") {
    // let box u := box(s) in t ≡ t[s/u] and let box u := s in t[box(u)/x] ≡ t[s/x]
    Checker k(prelude_signature());
    Telescope tele = pool_tele();
    auto pool = typed_pool(k, tele);
    int betas = 0, etas = 0;
    for (const auto& s : pool) {
      if (!derivable(k, tele.modal_only(), s.term, s.type)) continue;
      Telescope inner = tele;
      inner.modal.push_back({"w", s.type});
      for (const auto& t : pool) {
        if (t.term->kind == TermExpr::Kind::LetBox || !derivable(k, inner, t.term, t.type)) continue;
        Tm lhs = let_box("w", shut(s.term), t.term);
        auto v = defeq(k, tele, lhs, substitute(t.term, "w", s.term), t.type);
        CHECK(v.equal);
        ++betas;
      }
    }
    for (const auto& s : pool) {
      if (s.type->kind != TypeExpr::Kind::Box) continue;
      Telescope ext = tele;
      ext.ordinary.push_back({"z", s.type});
      for (const auto& tm : raw_terms(1, {"u", "z", "a"}, {"v"})) {
        Ty b;
        try {
          b = k.infer(ext, tm).judgment.type;
        } catch (const CheckError&) {
          continue;
        }
        Tm lhs = let_box("w", s.term, substitute(tm, "z", shut(var("w"))));
        auto v = defeq(k, tele, lhs, substitute(tm, "z", s.term, SubstMode::Ordinary), b);
        CHECK(v.equal);
        if (v.derivation) CHECK(recheck(*v.derivation, k.signature()).ok());
        ++etas;
      }
    }
    CHECK(betas > 20);
    CHECK(etas > 20);
  }

  TEST_CASE("substitution lemma on the corpus") {
    Module m = golden();
    ModuleResult r = check_module(m);
    Checker k(r.signature);
    std::vector<Tm> candidates = {var("a"), var("b"), var("c"), parse_term("box(a)"),
                                  parse_term("let box w := c in w"), parse_term("box(box(a))")};
    int instances = 0;
    for (const Decl* d : checks(m)) {
      for (std::size_t i = 0; i < d->tele.modal.size(); ++i) {
        const Entry& u = d->tele.modal[i];
        Telescope rest = d->tele;
        rest.modal.erase(rest.modal.begin() + static_cast<long>(i));
        std::vector<Tm> pool = candidates;
        for (const auto& e : rest.modal) pool.push_back(var(e.name));
        for (const Tm& s : pool) {
          if (!derivable(k, rest.modal_only(), s, u.type)) continue;
          CAPTURE(print(*d));
          CAPTURE(print(s));
          CHECK(derivable(k, rest, substitute(d->term, u.name, s), d->type));
          ++instances;
        }
      }
    }
    CHECK(instances >= 6);
  }

  TEST_CASE("weakening on the corpus") {
    Module m = golden();
    Checker k(check_module(m).signature);
    for (const Decl* d : checks(m)) {
      CAPTURE(print(*d));
      for (std::size_t i = 0; i <= d->tele.modal.size(); ++i) {
        Telescope t = d->tele;
        t.modal.insert(t.modal.begin() + static_cast<long>(i), {"w0", parse_type("Box B")});
        CHECK(derivable(k, t, d->term, d->type));
      }
      for (std::size_t i = 0; i <= d->tele.ordinary.size(); ++i) {
        Telescope t = d->tele;
        t.ordinary.insert(t.ordinary.begin() + static_cast<long>(i), {"y0", parse_type("A")});
        CHECK(derivable(k, t, d->term, d->type));
      }
    }
  }

  TEST_CASE("β reduction terminates and is confluent") {
    Checker k(prelude_signature());
    std::vector<Tm> terms;
    for (const auto& t : typed_pool(k, pool_tele())) terms.push_back(t.term);
    for (const Decl& d : golden().decls)
      for (const Tm& t : {d.term, d.term2})
        if (t) terms.push_back(t);
    int with_redex = 0;
    for (const Tm& t : terms) {
      // explore every reduction order
      std::map<std::string, Tm> seen{{canonical(t), t}};
      std::vector<Tm> frontier{t};
      std::set<std::string> normal;
      bool decreasing = true;
      while (!frontier.empty()) {
        Tm cur = frontier.back();
        frontier.pop_back();
        auto next = beta_reducts(cur);
        if (next.empty()) normal.insert(canonical(cur));
        for (const Tm& n : next) {
          if (count_redexes(n) >= count_redexes(cur)) decreasing = false;
          if (seen.emplace(canonical(n), n).second) frontier.push_back(n);
        }
        REQUIRE(seen.size() < 10000);
      }
      CAPTURE(print(t));
      CHECK(normal.size() == 1);
      CHECK(decreasing);
      CHECK(*normal.begin() == canonical(beta_normalize(t)));
      if (count_redexes(t) > 0) ++with_redex;
    }
    CHECK(with_redex > 50);
  }

  TEST_CASE("defeq is an equivalence and a congruence") {
    Checker k(prelude_signature());
    Telescope tele = pool_tele();
    auto pool = typed_pool(k, tele);
    std::map<std::string, std::vector<Tm>> by_type;
    for (const auto& t : pool) by_type[print(t.type)].push_back(t.term);
    long pairs = 0;
    for (const auto& [ty, terms] : by_type) {
      Ty b = parse_type(ty);
      std::size_t n = std::min<std::size_t>(terms.size(), 40);
      std::vector<std::vector<bool>> eq(n, std::vector<bool>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) eq[i][j] = defeq(k, tele, terms[i], terms[j], b).equal;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(eq[i][i]);
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(eq[i][j] == eq[j][i]);
          for (std::size_t l = 0; l < n; ++l)
            if (eq[i][j] && eq[j][l]) CHECK(eq[i][l]);
          if (!eq[i][j] || i == j) continue;
          ++pairs;
          // congruence under box (modal terms only) and as a let scrutinee / body
          if (derivable(k, tele.modal_only(), terms[i], b) &&
              derivable(k, tele.modal_only(), terms[j], b))
            CHECK(defeq(k, tele, shut(terms[i]), shut(terms[j]), box_type(b)).equal);
          if (b->kind == TypeExpr::Kind::Box)
            CHECK(defeq(k, tele, let_box("w", terms[i], shut(var("w"))),
                        let_box("w", terms[j], shut(var("w"))), b)
                      .equal);
          CHECK(defeq(k, tele, let_box("w", var("c"), terms[i]), let_box("w", var("c"), terms[j]), b)
                    .equal);
        }
      }
    }
    CHECK(pairs > 10);
  }

  TEST_CASE("equality derivations recheck") {
    Checker k(prelude_signature());
    Telescope tele = pool_tele();
    int n = 0;
    for (const auto& t : typed_pool(k, tele)) {
      auto v = defeq(k, tele, t.term, normalize(t.term), t.type);
      REQUIRE(v.equal);
      REQUIRE(v.derivation);
      ValidationReport rep = recheck(*v.derivation, k.signature());
      CAPTURE(print(t.term));
      for (const auto& x : rep.violations) MESSAGE(std::string(x.law + ": " + x.witness));
      CHECK(rep.ok());
      ++n;
    }
    CHECK(n > 100);
  }

  TEST_CASE("the rechecker rejects doctored derivations") {
    ModuleResult r = run("check | x : Box A |- let box u := x in u : A;");
    REQUIRE(r.ok());
    Derivation d = *r.results[0].derivation;
    Derivation wrong_rule = d;
    wrong_rule.premises[2].rule = "Var.";
    CHECK_FALSE(recheck(wrong_rule, r.signature).ok());
    Derivation wrong_type = d;
    wrong_type.judgment.type = parse_type("B");
    CHECK(recheck(wrong_type, r.signature).mentions("□-Elim"));
    Derivation leaked = d;
    leaked.premises[2].judgment.tele.modal.clear();
    CHECK_FALSE(recheck(leaked, r.signature).ok());
    Derivation intro = *run("check u :: A |- box(u) : Box A;").results[0].derivation;
    intro.premises[0].judgment.tele.ordinary.push_back({"x", parse_type("A")});
    CHECK(recheck(intro, r.signature).mentions("□-Intro"));
  }
}
