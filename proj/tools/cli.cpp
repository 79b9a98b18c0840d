#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "s4sem/interp.hpp"

namespace s4sem::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Malformed, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_report(Verdict& v, const std::string& what, const ValidationReport& r) {
  for (const auto& x : r.violations) v.fail(what + ": " + x.law + " " + x.witness);
}

ModuleResult checked_module(const std::string& path, Verdict& v) {
  ModuleResult r = check_module(parse_module(read_file(path)));
  for (const auto& d : r.results) {
    if (!d.ok()) continue;
    ValidationReport rc = recheck(*d.derivation, r.signature);
    add_report(v, "line " + std::to_string(d.line) + " recheck", rc);
    v.note("line " + std::to_string(d.line) + " ok: " + d.text + " (" +
           std::to_string(d.derivation->size()) + " nodes)");
  }
  if (r.failure) {
    const CheckFailure& f = *r.failure;
    v.fail("line " + std::to_string(f.line) + ": " + f.rule + ": " + f.gap + " in " +
           print(f.judgment));
  }
  return r;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Class index of each item under an isomorphism test, in first-seen order.
template <class T, class Iso>
std::vector<int> classes(const std::vector<T>& items, Iso iso, int& count) {
  std::vector<int> cls(items.size(), -1);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t r = 0; r < reps.size() && cls[i] < 0; ++r)
      if (iso(items[reps[r]], items[i])) cls[i] = static_cast<int>(r);
    if (cls[i] < 0) {
      cls[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }
  count = static_cast<int>(reps.size());
  return cls;
}

bool coalgebras_isomorphic(const NaturalModelComonad& w, const Coalgebra& a, const Coalgebra& b,
                           const Ceiling& ceiling) {
  if (a.carrier->sizes != b.carrier->sizes) return false;
  for (const auto& h : coalgebra_maps(w, a, b, ceiling))
    if (is_iso(h)) return true;
  return false;
}

std::shared_ptr<const KanAdjunction> points_of_arrow() {
  return std::make_shared<const KanAdjunction>(discrete_subcategory(walking_arrow()).inclusion);
}

nlohmann::json to_json(const std::string& command, const Verdict& v, int code) {
  return {{"command", command}, {"ok", v.ok}, {"exit", code}, {"notes", v.notes},
          {"failures", v.failures}};
}

}  // namespace

Ceiling ceiling_from_env(Ceiling fallback) {
  if (const char* s = std::getenv("S4SEM_CEILING")) {
    char* end = nullptr;
    long long n = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0' || n <= 0)
      throw Error(ErrorKind::Malformed, "S4SEM_CEILING must be a positive integer");
    fallback.limit = n;
  }
  return fallback;
}

Verdict check_file(const std::string& path) {
  Verdict v;
  ModuleResult r = checked_module(path, v);
  v.note(std::to_string(r.results.size()) + " directives");
  return v;
}

Verdict interpret_file(const std::string& path, const Model& m, int bound, const Ceiling& ceiling) {
  Verdict v;
  ModuleResult r = checked_module(path, v);
  if (!v.ok) return v;
  v.notes.clear();
  ComonadPtr w = m.comonad ? model_comonad(m) : identity_comonad(m.cat);
  v.note("target: " + w->name() + " on " + m.name);
  auto vals = valuations(w, r.signature, bound, ceiling);
  v.note("valuations with values <= " + std::to_string(bound) + ": " + std::to_string(vals.size()));
  std::map<std::string, std::pair<std::size_t, std::size_t>> clauses;  // passed, total
  std::size_t extended = 0, shown = 0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    Interpretation in(w, r.signature, vals[k]);
    SoundnessReport rep = soundness_harness(r, in);
    extended += rep.extended();
    for (const auto& x : rep.records) {
      auto& c = clauses[x.clause];
      ++c.second;
      if (x.ok) {
        ++c.first;
      } else if (shown++ < 20) {
        v.fail("valuation " + std::to_string(k) + ": " + x.clause + " " + x.judgment + ": " +
               x.witness);
      } else {
        v.ok = false;
      }
    }
  }
  for (const auto& [name, c] : clauses)
    v.note(name + ": " + std::to_string(c.first) + "/" + std::to_string(c.second));
  v.note("records using extension clauses: " + std::to_string(extended));
  return v;
}

Verdict universe_report(const Model& m, int bound, int contexts_bound, const Ceiling& ceiling) {
  Verdict v;
  const CatPtr& c = m.cat;
  add_report(v, "category", validate_category(*c));
  if (!v.ok) return v;
  HSUniverse u = hs_universe({c, bound, ceiling});
  add_report(v, "U", validate_presheaf(*u.U));
  add_report(v, "p : Upt -> U", validate_map(u.proj));
  for (int i = 0; i < c->num_objects(); ++i)
    v.note("|U(" + c->object_name(i) + ")| = " + std::to_string(u.U->size(i)));
  v.merge(classifier_check(u), "classifier: ");
  auto contexts = bounded_presheaves(c, contexts_bound, ceiling);
  v.note("contexts: " + std::to_string(contexts.size()) + " presheaves with values <= " +
         std::to_string(contexts_bound));
  v.merge(typing_check(u.model, contexts), "typing: ");
  v.merge(realignment_check(u, contexts), "realignment: ");
  return v;
}

Verdict coalgebras_report(const Model& m, int bound, const Ceiling& ceiling) {
  Verdict v;
  if (!m.comonad) throw Error(ErrorKind::Malformed, m.name + ": no comonad declared");
  add_report(v, "category", validate_category(*m.cat));
  if (!v.ok) return v;
  ComonadPtr w = model_comonad(m);
  v.note("comonad: " + w->name());
  auto cs = enumerate_coalgebras(*w, bound, ceiling);
  for (std::size_t k = 0; k < cs.size(); ++k)
    add_report(v, "coalgebra " + std::to_string(k), validate_coalgebra(*w, cs[k]));
  v.note("coalgebras with carrier <= " + std::to_string(bound) + ": " + std::to_string(cs.size()));
  v.merge(comparison_check(model_adjunction(m), bound, ceiling), "comparison: ");
  CoalgebraClassifier cls = coalgebra_classifier(w, 1, ceiling);
  add_report(v, "classifier object", validate_coalgebra(*w, cls.object_coalgebra));
  v.note("classifier at k = 1: " + describe(*cls.object_coalgebra.carrier));
  v.merge(classifier_externalization_check(cls, cs, ceiling), "externalization: ");
  KockWraith kw = kock_wraith(w);
  v.merge(kock_wraith_check(w, kw, cs, ceiling), "kock-wraith: ");
  return v;
}

Verdict stack_failure_demo(const Ceiling& ceiling) {
  Verdict v;
  std::vector<std::vector<bool>> leq = {{true, true, true, true},
                                        {false, true, false, true},
                                        {false, false, true, true},
                                        {false, false, false, true}};
  CatPtr opens = poset_category({"empty", "a", "b", "X"}, leq);
  Site site = opens_site(opens, {{}, {0}, {1}, {0, 1}});
  add_report(v, "site", validate_site(site));
  const int bound = 1;
  NaiveUniverse nu = naive_sheaf_universe(site, bound, ceiling);
  add_report(v, "naive universe", validate_presheaf(*nu.presheaf));
  v.note("naive universe sizes: " + describe(*nu.presheaf));
  SheafVerdict sv = sheaf_check(site, *nu.presheaf, true, ceiling);
  const FinCat& c = *opens;
  int x = c.object("X"), a = c.object("a"), b = c.object("b");
  int fa = c.hom(a, x)[0], fb = c.hom(b, x)[0];
  auto contains = [](const Sieve& s, int f) { return std::find(s.begin(), s.end(), f) != s.end(); };
  const SheafWitness* witness = nullptr;
  for (const auto& w : sv.failures)
    if (w.object == x && w.failure == SheafWitness::Failure::Uniqueness && w.amalgamations >= 2 &&
        contains(w.cover, fa) && contains(w.cover, fb) && !contains(w.cover, c.identity(x)))
      witness = &w;
  if (sv.is_sheaf || !witness) {
    v.fail("no non-unique amalgamation over the cover {a, b} of X");
    return v;
  }
  v.note(describe(site, *witness));
  int sa = -1, sb = -1;
  for (std::size_t s = 0; s < witness->cover.size(); ++s) {
    if (witness->cover[s] == fa) sa = witness->family[s];
    if (witness->cover[s] == fb) sb = witness->family[s];
  }
  v.note("family at a: " + nu.describe_entry(a, sa));
  v.note("family at b: " + nu.describe_entry(b, sb));
  int found = 0;
  for (int k = 0; k < nu.presheaf->size(x); ++k)
    if (nu.presheaf->act(fa, k) == sa && nu.presheaf->act(fb, k) == sb) {
      v.note("amalgamation " + std::to_string(found++) + ": " + nu.describe_entry(x, k));
    }
  // A sheaf on O(X) is determined by its values at a and b; only the labels
  // of F(X), drawn from the atom pool, are free.
  const auto& ea = nu.entries[a][sa];
  const auto& eb = nu.entries[b][sb];
  int size_x = ea.sheaf.size(nu.slices[a].id_object()) * eb.sheaf.size(nu.slices[b].id_object());
  long long expected = binomial(bound + 1, size_x);
  v.note("labellings of F(X) over the atom pool: " + std::to_string(expected));
  if (found != witness->amalgamations || found != expected)
    v.fail("amalgamation count " + std::to_string(found) + " disagrees with " +
           std::to_string(expected) + " labellings");
  return v;
}

Verdict sheaves_as_coalgebras_demo(int bound, const Ceiling& ceiling) {
  Verdict v;
  auto adj = points_of_arrow();
  ComonadPtr w = comonad_from_adjunction(adj);
  v.note("comonad: " + w->name());
  v.merge(comparison_check(adj, bound, ceiling), "comparison: ");

  auto xs = bounded_presheaves(walking_arrow(), bound, ceiling);
  std::vector<Coalgebra> ks;
  for (const auto& x : xs) ks.push_back({adj->restrict(x), adj->restrict(adj->unit(x))});
  auto cs = enumerate_coalgebras(*w, bound, ceiling);

  int n_pre = 0, n_coalg = 0;
  auto pre_cls = classes(
      xs, [](const PresheafPtr& p, const PresheafPtr& q) { return find_isomorphism(p, q).has_value(); },
      n_pre);
  auto coalg_iso = [&](const Coalgebra& p, const Coalgebra& q) {
    return coalgebras_isomorphic(*w, p, q, ceiling);
  };
  auto coalg_cls = classes(cs, coalg_iso, n_coalg);
  v.note("isomorphism classes: " + std::to_string(n_pre) + " presheaves, " +
         std::to_string(n_coalg) + " coalgebras");
  if (n_pre != n_coalg) v.fail("class counts differ");

  // K on classes: the class of K(x) among enumerated coalgebras.
  std::vector<int> image(n_pre, -1);
  std::vector<int> hit(n_coalg, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    int target = -1;
    for (std::size_t j = 0; j < cs.size() && target < 0; ++j)
      if (coalg_iso(ks[i], cs[j])) target = coalg_cls[j];
    if (target < 0) {
      v.fail("K(" + describe(*xs[i]) + ") has no enumerated counterpart");
      continue;
    }
    int& img = image[pre_cls[i]];
    if (img >= 0 && img != target) v.fail("K does not respect isomorphism at " + describe(*xs[i]));
    if (img < 0) {
      img = target;
      ++hit[target];
    }
  }
  for (int k = 0; k < n_coalg; ++k)
    if (hit[k] != 1)
      v.fail("coalgebra class " + std::to_string(k) + " is hit " + std::to_string(hit[k]) + " times");

  long long homs_pre = 0, homs_coalg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      homs_pre += count_maps(xs[i], xs[j], ceiling);
      homs_coalg += static_cast<long long>(coalgebra_maps(*w, ks[i], ks[j], ceiling).size());
    }
  v.note("hom-sets: " + std::to_string(homs_pre) + " natural maps, " + std::to_string(homs_coalg) +
         " coalgebra maps");
  if (homs_pre != homs_coalg) v.fail("hom-set totals differ");
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"s4sem: S4 type theory kernel and categorical semantics"};
  app.require_subcommand(1);
  std::string out_path;
  long long ceiling_flag = 0;
  bool as_json = false;
  app.add_option("--out", out_path, "write a JSON report to this path");
  app.add_option("--ceiling", ceiling_flag, "enumeration ceiling (overrides S4SEM_CEILING)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json", as_json, "print the JSON report instead of text");

  std::string file, model_path;
  int bound = -1, contexts_bound = 1;

  auto* check = app.add_subcommand("check", "type-check an S4 module");
  check->add_option("file", file)->required();

  auto* interpret = app.add_subcommand("interpret", "interpret a module and check soundness");
  interpret->add_option("file", file)->required();
  interpret->add_option("--model", model_path)->required();
  interpret->add_option("--bound", bound, "size bound for base type valuations (default 2)");

  auto* model = app.add_subcommand("model", "model file checks");
  model->require_subcommand(1);
  auto* laws = model->add_subcommand("laws", "category, presheaf, site and comonad laws");
  laws->add_option("model", model_path)->required();
  auto* universe = model->add_subcommand("universe", "Hofmann-Streicher universe checks");
  universe->add_option("model", model_path)->required();
  universe->add_option("--bound", bound, "universe bound (default: the model's)");
  universe->add_option("--contexts", contexts_bound, "value bound for test contexts");
  auto* coalgebras = model->add_subcommand("coalgebras", "coalgebra model checks");
  coalgebras->add_option("model", model_path)->required();
  coalgebras->add_option("--bound", bound, "carrier bound (default: the model's)");

  auto* demo = app.add_subcommand("demo", "built-in demonstrations");
  demo->require_subcommand(1);
  auto* stack = demo->add_subcommand("stack-failure", "naive universe of sheaves is not a sheaf");
  auto* sheaves = demo->add_subcommand("sheaves-as-coalgebras", "presheaves on 2 as coalgebras");
  sheaves->add_option("--bound", bound, "carrier bound (default 2)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    std::ostringstream msg;
    app.exit(e, help, msg);
    err << msg.str();
    return kMalformed;
  }

  std::string command;
  Verdict v;
  int code = kOk;
  try {
    Ceiling ceiling = ceiling_from_env();
    if (ceiling_flag > 0) ceiling.limit = ceiling_flag;
    auto model_bound = [&](const Model& m) { return bound >= 0 ? bound : m.bound; };
    if (*check) {
      command = "check";
      v = check_file(file);
    } else if (*interpret) {
      command = "interpret";
      v = interpret_file(file, load_model(model_path), bound >= 0 ? bound : 2, ceiling);
    } else if (*laws) {
      command = "model laws";
      v = model_laws(load_model(model_path), ceiling);
    } else if (*universe) {
      command = "model universe";
      Model m = load_model(model_path);
      v = universe_report(m, model_bound(m), contexts_bound, ceiling);
    } else if (*coalgebras) {
      command = "model coalgebras";
      Model m = load_model(model_path);
      v = coalgebras_report(m, model_bound(m), ceiling);
    } else if (*stack) {
      command = "demo stack-failure";
      v = stack_failure_demo(ceiling);
    } else if (*sheaves) {
      command = "demo sheaves-as-coalgebras";
      v = sheaves_as_coalgebras_demo(bound >= 0 ? bound : 2, ceiling);
    }
    code = v.ok ? kOk : kCheckFailed;
  } catch (const Error& e) {
    v.fail(e.what());
    code = e.kind() == ErrorKind::CeilingExceeded ? kCeiling : kMalformed;
  } catch (const std::exception& e) {
    v.fail(e.what());
    code = kMalformed;
  }

  nlohmann::json report = to_json(command, v, code);
  if (as_json) {
    out << report.dump(2) << "\n";
  } else {
    for (const auto& n : v.notes) out << n << "\n";
    for (const auto& f : v.failures) out << "FAIL " << f << "\n";
    out << command << ": " << (code == kOk ? "ok" : "failed") << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      err << "cannot write " << out_path << "\n";
      return kMalformed;
    }
    f << report.dump(2) << "\n";
  }
  return code;
}

}  // namespace s4sem::cli
