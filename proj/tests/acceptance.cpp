// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "s4sem/interp.hpp"
#include "s4sem/model.hpp"

using namespace s4sem;

namespace {

constexpr double kLawBudgetSeconds = 10.0;
constexpr double kHarnessBudgetSeconds = 60.0;
constexpr int kCoalgebraFiber = 3;  // criterion 6 fiber bound
constexpr int kDependentFiber = 2;  // B over Γ.A in dependent Σ

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

ComonadPtr flagship() {
  return comonad_from_adjunction(
      std::make_shared<const KanAdjunction>(discrete_subcategory(walking_arrow()).inclusion));
}

bool mentions(const Verdict& v, const std::string& s) {
  for (const auto& n : v.notes)
    if (n.find(s) != std::string::npos) return true;
  return false;
}

std::string first_failure(const Verdict& v) {
  return v.failures.empty() ? "failed" : v.failures.front();
}

// Presheaves on a finite category with values ≤ k, counted from the
// composition table alone.
long long count_functors(const FinCat& c, int k) {
  const int n = c.num_objects(), m = c.num_morphisms();
  std::vector<int> sizes(n, 0);
  long long total = 0;
  std::vector<std::vector<int>> act(m);
  std::function<bool(int)> assign = [&](int f) -> bool {
    if (f == m) {
      for (int g = 0; g < m; ++g)
        for (int h = 0; h < m; ++h) {
          if (c.dst(h) != c.src(g)) continue;
          int gh = c.compose(g, h);
          // P(g∘h) = P(h)∘P(g)
          for (int x = 0; x < sizes[c.dst(g)]; ++x)
            if (act[gh][x] != act[h][act[g][x]]) return false;
        }
      ++total;
      return true;
    }
    int from = sizes[c.dst(f)], to = sizes[c.src(f)];
    if (c.is_identity(f)) {
      act[f].resize(from);
      for (int x = 0; x < from; ++x) act[f][x] = x;
      assign(f + 1);
      return true;
    }
    if (from > 0 && to == 0) return true;
    std::vector<int> table(from, 0);
    for (;;) {
      act[f] = table;
      assign(f + 1);
      int p = 0;
      while (p < from && ++table[p] == to) table[p++] = 0;
      if (p == from) break;
    }
    return true;
  };
  for (;;) {
    assign(0);
    int p = 0;
    while (p < n && ++sizes[p] > k) sizes[p++] = 0;
    if (p == n) break;
  }
  return total;
}

Outcome law_suites() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  int models = 0;
  for (const char* f : {"one", "two", "chain3", "sierpinski", "discrete2"}) {
    Model m = load_model(std::string(S4SEM_MODELS_DIR) + "/" + f + ".model");
    Verdict v = model_laws(m);
    o.require(v.ok, std::string(f) + ": " + first_failure(v));
    ++models;
  }
  double t = seconds_since(t0);
  o.require(t < kLawBudgetSeconds, "runtime " + fmt(t));
  if (o.pass) o.detail = std::to_string(models) + " models, " + fmt(t) + " < 10 s";
  return o;
}

Outcome universe_classifier() {
  Outcome o;
  HSUniverse u = hs_universe({walking_arrow(), 1, {}});
  o.require(u.U->size(0) == 2 && u.U->size(1) == 3,
            "|U(0)|, |U(1)| = " + std::to_string(u.U->size(0)) + ", " + std::to_string(u.U->size(1)));
  for (int i = 0; i < 2; ++i) {
    Slice s = slice(walking_arrow(), i);
    long long oracle = count_functors(*s.cat, 1);
    o.require(oracle == u.U->size(i), "oracle count at " + std::to_string(i) + " is " +
                                          std::to_string(oracle));
  }
  Verdict cls = classifier_check(u);
  o.require(cls.ok, "U ≅ Tp(y-): " + first_failure(cls));
  for (int k = 1; k <= 3; ++k) {
    NaturalModelInstance m{terminal_category(), k, {}};
    Verdict typing = typing_check(m, bounded_presheaves(m.base, 2));
    o.require(typing.ok, "typing on 1, k = " + std::to_string(k) + ": " + first_failure(typing));
    HSUniverse u1 = hs_universe(m);
    o.require(count_functors(*terminal_category(), k) == u1.U->size(0), "oracle on 1");
    o.require(classifier_check(u1).ok, "classifier on 1, k = " + std::to_string(k));
  }
  if (o.pass) o.detail = "|U(0)| = 2, |U(1)| = 3, U ≅ Tp(y-); typing on 1 for k = 1..3";
  return o;
}

Outcome stack_failure() {
  Outcome o;
  Verdict v = cli::stack_failure_demo();
  o.require(v.ok, first_failure(v));
  std::string line;
  for (const auto& n : v.notes)
    if (n.rfind("uniqueness failure", 0) == 0) line = n;
  o.require(!line.empty(), "no uniqueness failure reported");
  int amalgamations = 0;
  if (auto p = line.find(" has "); p != std::string::npos)
    amalgamations = std::stoi(line.substr(p + 5));
  o.require(amalgamations >= 2, "amalgamations: " + std::to_string(amalgamations));
  if (o.pass) o.detail = line;
  return o;
}

Outcome sheaves_as_coalgebras() {
  Outcome o;
  Verdict v = cli::sheaves_as_coalgebras_demo(2);
  o.require(v.ok, first_failure(v));
  std::string classes, homs;
  for (const auto& n : v.notes) {
    if (n.rfind("isomorphism classes", 0) == 0) classes = n;
    if (n.rfind("hom-sets", 0) == 0) homs = n;
  }
  o.require(!classes.empty() && !homs.empty(), "counts missing");
  if (o.pass) o.detail = classes + "; " + homs;
  return o;
}

Outcome coalgebra_classifier_criterion() {
  Outcome o;
  ComonadPtr w = flagship();
  CoalgebraClassifier cls = coalgebra_classifier(w, 1);
  o.require(validate_coalgebra(*w, cls.object_coalgebra).ok(), "classifier is not a coalgebra");
  auto cs = enumerate_coalgebras(*w, 2);
  Verdict ext = classifier_externalization_check(cls, cs);
  o.require(ext.ok, "externalization: " + first_failure(ext));
  ComonadPtr id = identity_comonad(walking_arrow());
  CoalgebraClassifier icls = coalgebra_classifier(id, 1);
  o.require(*icls.object_coalgebra.carrier == *icls.universe->U, "identity case is not U");
  o.require(icls.object_coalgebra.structure == identity_map(icls.universe->U),
            "identity case structure is not the identity");
  if (o.pass)
    o.detail = std::to_string(cs.size()) + " coalgebras with carrier <= 2; identity case is U on the nose";
  return o;
}

Outcome closure_and_sigma() {
  Outcome o;
  ComonadPtr w = flagship();
  long long exp_cases = 0, sigma_cases = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& g : enumerate_coalgebras(*w, 1)) {
    auto small = enumerate_coalgebra_types(w, g, 1);
    auto types = enumerate_coalgebra_types(w, g, kCoalgebraFiber);
    for (const auto& a : types) {
      Coalgebra ga = coalgebra_comprehension(w, a);
      PresheafMap pa = comprehension(a.type).proj;
      std::vector<CoalgebraType> pulled_small;
      for (const auto& r : small) pulled_small.push_back(subst(w, r, ga, pa));
      // B^A for B over Γ: Hom(R, B^A) ≅ Hom(R[p_A], B[p_A]) and ev∘λ(h) = h
      for (const auto& b : types) {
        CoalgebraPi e = coalgebra_exponential(w, a, b);
        o.require(validate_coalgebra_type(w, e.type).ok(), "exponential is not a coalgebra type");
        for (std::size_t r = 0; r < small.size(); ++r, ++exp_cases) {
          auto into = coalgebra_type_maps(w, small[r], e.type);
          auto pulled = coalgebra_type_maps(w, pulled_small[r], e.codomain);
          o.require(into.size() == pulled.size(), "exponential hom-set counts differ");
          for (const auto& h : pulled) {
            TypeMap l = coalgebra_lambda(w, e, small[r], h);
            o.require(compose(e.eval, subst(l, pa)).fn == h.fn, "ev∘λ(h) != h");
          }
        }
      }
      // Σ A B for B over Γ.A: Hom(ΣAB, R) ≅ Hom(B, R[p_A])
      auto sigma_check = [&](const CoalgebraType& b) {
        CoalgebraType s = coalgebra_sigma(w, a, b);
        o.require(validate_coalgebra_type(w, s).ok(), "Σ is not a coalgebra type");
        for (std::size_t r = 0; r < small.size(); ++r, ++sigma_cases)
          o.require(coalgebra_type_maps(w, s, small[r]).size() ==
                        coalgebra_type_maps(w, b, pulled_small[r]).size(),
                    "Σ hom-set counts differ");
      };
      for (const auto& b : types) sigma_check(subst(w, b, ga, pa));
      for (const auto& b : enumerate_coalgebra_types(w, ga, kDependentFiber)) sigma_check(b);
    }
  }
  if (o.pass)
    o.detail = std::to_string(exp_cases) + " exponential and " + std::to_string(sigma_cases) +
               " Σ cases, fibers <= 3 (dependent B <= 2), " + fmt(seconds_since(t0));
  return o;
}

Outcome kock_wraith_criterion() {
  Outcome o;
  ComonadPtr w = flagship();
  KockWraith kw = kock_wraith(w);
  auto cs = enumerate_coalgebras(*w, 2);
  Verdict v = kock_wraith_check(w, kw, cs);
  o.require(v.ok, first_failure(v));
  if (o.pass) o.detail = std::to_string(cs.size()) + " coalgebras with carrier <= 2";
  return o;
}

bool has_rule(const Derivation& d, const std::string& rule) {
  if (d.rule == rule) return true;
  for (const auto& p : d.premises)
    if (has_rule(p, rule)) return true;
  return false;
}

bool nested_elim(const Derivation& d) {
  if (d.rule == "□-Elim")
    for (const auto& p : d.premises)
      if (has_rule(p, "□-Elim")) return true;
  for (const auto& p : d.premises)
    if (nested_elim(p)) return true;
  return false;
}

ModuleResult golden() {
  std::ifstream in(std::string(S4SEM_CORPUS_DIR) + "/golden.s4");
  std::stringstream ss;
  ss << in.rdbuf();
  return check_module(parse_module(ss.str()));
}

Outcome kernel() {
  Outcome o;
  ModuleResult r = golden();
  o.require(r.ok(), "golden corpus rejected");
  bool var_box = false, t = false, four = false, nested = false, beta = false, eta = false;
  int equalities = 0;
  for (const auto& d : r.results) {
    if (!d.ok()) continue;
    o.require(recheck(*d.derivation, r.signature).ok(), "recheck failed at line " + std::to_string(d.line));
    var_box = var_box || has_rule(*d.derivation, "Var.□");
    nested = nested || nested_elim(*d.derivation);
    t = t || d.text == "check | x : Box A |- let box u := x in u : A;";
    four = four || d.text == "check | x : Box A |- let box u := x in box(box(u)) : Box Box A;";
    if (d.derivation->judgment.kind == Judgment::Kind::TermEq) {
      ++equalities;
      beta = beta || has_rule(*d.derivation, "□-β-Conv");
      eta = eta || has_rule(*d.derivation, "□-η-Conv");
    }
  }
  o.require(var_box && t && four && nested, "corpus is missing Var.□, T, 4 or a nested elimination");
  o.require(beta && eta && equalities > 0, "β or η not decided as holding");
  struct Seeded {
    const char* src;
    const char* rule;
  };
  const Seeded seeded[] = {
      {"check | x : Box A |- y : A;", "Var."},
      {"check | x : A |- box(x) : Box A;", "□-Intro"},
      {"check | x : A |- let box u := x in u : A;", "□-Elim"},
      {"check u :: A |- u : B;", "Var.□"},
      {"check | x : Box A |- let box u := x in u : Box A;", "Var.□"},
      {"check | x : C |- x : C;", "Base"},
      {"check u :: A, u :: A |- u : A;", "Ext.□"},
      {"check | x : Box A |- box(let box u := x in u) : Box A;", "□-Intro"},
      {"check |- c : B;", "Const"},
      {"check u :: A |- box(u) : A;", "□-Intro"},
  };
  const std::string prelude = "type A; type B; const a : A; const b : B; const c : Box A;\n";
  int rejected = 0;
  for (const auto& s : seeded) {
    ModuleResult bad = check_module(parse_module(prelude + s.src));
    bool ok = !bad.ok() && bad.failure->rule == s.rule;
    o.require(ok, std::string("seeded variant not rejected at ") + s.rule + ": " + s.src);
    rejected += ok;
  }
  if (o.pass)
    o.detail = std::to_string(r.results.size()) + " directives, " + std::to_string(equalities) +
               " equalities, " + std::to_string(rejected) + "/10 seeded variants rejected";
  return o;
}

Outcome soundness() {
  Outcome o;
  ModuleResult r = golden();
  o.require(r.ok(), "golden corpus rejected");
  auto t0 = std::chrono::steady_clock::now();
  std::size_t records = 0, valuations_run = 0;
  for (const ComonadPtr& w : {identity_comonad(walking_arrow()), flagship()})
    for (int k : {1, 2})
      for (const auto& v : valuations(w, r.signature, k)) {
        Interpretation in(w, r.signature, v);
        SoundnessReport rep = soundness_harness(r, in);
        records += rep.records.size();
        ++valuations_run;
        for (const auto& x : rep.records)
          o.require(x.ok, w->name() + ": " + x.clause + " " + x.judgment + ": " + x.witness);
        o.require(rep.count("term equality") > 0, "no equality clauses checked");
      }
  double t = seconds_since(t0);
  o.require(t < kHarnessBudgetSeconds, "runtime " + fmt(t));
  if (o.pass)
    o.detail = std::to_string(valuations_run) + " valuations, " + std::to_string(records) +
               " records, " + fmt(t) + " < 60 s";
  return o;
}

Outcome realignment() {
  Outcome o;
  HSUniverse u = hs_universe({terminal_category(), 1, {}});
  Verdict base = realignment_check(u, bounded_presheaves(terminal_category(), 2));
  o.require(base.ok, "base: " + first_failure(base));
  ComonadPtr w = identity_comonad(terminal_category());
  CoalgebraClassifier cls = coalgebra_classifier(w, 1);
  Verdict coalg = coalgebra_realignment_check(cls, enumerate_coalgebras(*w, 2));
  o.require(coalg.ok, "coalgebra classifier: " + first_failure(coalg));
  if (o.pass) o.detail = "base model and coalgebra classifier on 1, k = 1";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"law suites on the shipped models", law_suites},
      {"universe classifier", universe_classifier},
      {"stack failure of the naive universe", stack_failure},
      {"sheaves as coalgebras", sheaves_as_coalgebras},
      {"coalgebra classifier", coalgebra_classifier_criterion},
      {"exponentials and Σ in coalgebras", closure_and_sigma},
      {"Kock-Wraith classifier", kock_wraith_criterion},
      {"kernel golden corpus", kernel},
      {"interpretation soundness instances", soundness},
      {"realignment", realignment},
  };
  int failed = 0, n = 0;
  for (const auto& c : criteria) {
    ++n;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d. %s: %s\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
