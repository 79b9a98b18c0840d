#include "s4sem/s4dtt.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace s4sem {

Ty base_type(std::string name) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Base;
  t->name = std::move(name);
  return t;
}

Ty box_type(Ty inner) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeExpr::Kind::Box;
  t->inner = std::move(inner);
  return t;
}

bool same_type(const Ty& a, const Ty& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind == TypeExpr::Kind::Base) return a->name == b->name;
  return same_type(a->inner, b->inner);
}

Tm var(std::string name) {
  auto t = std::make_shared<TermExpr>();
  t->kind = TermExpr::Kind::Var;
  t->name = std::move(name);
  return t;
}

Tm shut(Tm body) {
  auto t = std::make_shared<TermExpr>();
  t->kind = TermExpr::Kind::Shut;
  t->first = std::move(body);
  return t;
}

Tm let_box(std::string binder, Tm scrutinee, Tm body) {
  auto t = std::make_shared<TermExpr>();
  t->kind = TermExpr::Kind::LetBox;
  t->name = std::move(binder);
  t->first = std::move(scrutinee);
  t->second = std::move(body);
  return t;
}

namespace {

void canonical_into(const Tm& t, std::vector<std::string>& bound, std::string& out) {
  switch (t->kind) {
    case TermExpr::Kind::Var: {
      for (std::size_t i = bound.size(); i-- > 0;)
        if (bound[i] == t->name) {
          out += "#" + std::to_string(bound.size() - 1 - i);
          return;
        }
      out += t->name;
      return;
    }
    case TermExpr::Kind::Shut:
      out += "box(";
      canonical_into(t->first, bound, out);
      out += ")";
      return;
    case TermExpr::Kind::LetBox:
      out += "let(";
      canonical_into(t->first, bound, out);
      out += ",";
      bound.push_back(t->name);
      canonical_into(t->second, bound, out);
      bound.pop_back();
      out += ")";
      return;
  }
}

void free_into(const Tm& t, std::multiset<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case TermExpr::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TermExpr::Kind::Shut:
      free_into(t->first, bound, out);
      return;
    case TermExpr::Kind::LetBox: {
      free_into(t->first, bound, out);
      auto it = bound.insert(t->name);
      free_into(t->second, bound, out);
      bound.erase(it);
      return;
    }
  }
}

void names_into(const Tm& t, std::set<std::string>& out) {
  out.insert(t->name);
  if (t->first) names_into(t->first, out);
  if (t->second) names_into(t->second, out);
}

}  // namespace

std::string canonical(const Tm& t) {
  std::vector<std::string> bound;
  std::string out;
  canonical_into(t, bound, out);
  return out;
}

bool alpha_equal(const Tm& a, const Tm& b) {
  if (!a || !b) return a == b;
  return canonical(a) == canonical(b);
}

std::set<std::string> free_vars(const Tm& t) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  free_into(t, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  for (int i = 1;; ++i) {
    std::string c = stem + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

Tm substitute(const Tm& t, const std::string& x, const Tm& s, SubstMode mode) {
  switch (t->kind) {
    case TermExpr::Kind::Var:
      return t->name == x ? s : t;
    case TermExpr::Kind::Shut:
      if (mode == SubstMode::Ordinary && free_vars(t->first).count(x))
        throw Error(ErrorKind::Rejected,
                    "ordinary variable " + x + " occurs under box in " + print(t));
      return shut(substitute(t->first, x, s, mode));
    case TermExpr::Kind::LetBox: {
      Tm scrut = substitute(t->first, x, s, mode);
      if (t->name == x) return let_box(t->name, scrut, t->second);
      auto body_free = free_vars(t->second);
      if (!body_free.count(x)) return let_box(t->name, scrut, t->second);
      std::string u = t->name;
      Tm body = t->second;
      auto sf = free_vars(s);
      if (sf.count(u)) {
        std::set<std::string> avoid = sf;
        avoid.insert(body_free.begin(), body_free.end());
        avoid.insert(x);
        names_into(body, avoid);
        std::string fresh = fresh_name(u, avoid);
        body = substitute(body, u, var(fresh));
        u = fresh;
      }
      return let_box(u, scrut, substitute(body, x, s, mode));
    }
  }
  return t;
}

Ty substitute(const Ty& b, const std::string&, const Tm&) { return b; }

std::set<std::string> Telescope::names() const {
  std::set<std::string> out;
  for (const auto& e : modal) out.insert(e.name);
  for (const auto& e : ordinary) out.insert(e.name);
  return out;
}

std::string print(const Ty& a) {
  if (a->kind == TypeExpr::Kind::Base) return a->name;
  return "Box " + print(a->inner);
}

std::string print(const Tm& t) {
  switch (t->kind) {
    case TermExpr::Kind::Var:
      return t->name;
    case TermExpr::Kind::Shut:
      return "box(" + print(t->first) + ")";
    case TermExpr::Kind::LetBox:
      return "let box " + t->name + " := " + print(t->first) + " in " + print(t->second);
  }
  return {};
}

namespace {

std::string join_entries(const std::vector<Entry>& es, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += ", ";
    out += es[i].name + sep + print(es[i].type);
  }
  return out;
}

}  // namespace

std::string print(const Telescope& t) {
  std::string out = join_entries(t.modal, " :: ");
  if (!t.ordinary.empty()) {
    if (!out.empty()) out += " ";
    out += "| " + join_entries(t.ordinary, " : ");
  }
  return out;
}

bool Signature::has_type(const std::string& name) const {
  return std::find(types.begin(), types.end(), name) != types.end();
}

const Entry* Signature::constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

std::string print(const Decl& d) {
  auto tele = [&] {
    std::string s = print(d.tele);
    return s.empty() ? std::string() : s + " ";
  };
  switch (d.kind) {
    case Decl::Kind::Type:
      return "type " + d.name + ";";
    case Decl::Kind::Const:
      return "const " + d.name + " : " + print(d.type) + ";";
    case Decl::Kind::Check:
      return "check " + tele() + "|- " + print(d.term) + " : " + print(d.type) + ";";
    case Decl::Kind::Equal:
      return "equal " + tele() + "|- " + print(d.term) + " == " + print(d.term2) + " : " +
             print(d.type) + ";";
  }
  return {};
}

std::string print(const Module& m) {
  std::string out;
  for (const auto& d : m.decls) out += print(d) + "\n";
  return out;
}

ParseError::ParseError(int line, int column, const std::string& what)
    : Error(ErrorKind::Malformed,
            std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum class Kind { Ident, Keyword, Symbol, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

const std::set<std::string> kKeywords = {"type", "const", "check", "equal",
                                         "let",  "box",   "in",    "Box"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word(src.substr(i, j - i));
      out.push_back({kKeywords.count(word) ? Token::Kind::Keyword : Token::Kind::Ident, word, l, cl});
      advance(j - i);
      continue;
    }
    static const char* two[] = {"|-", "::", ":=", "=="};
    bool matched = false;
    for (const char* sym : two)
      if (src.substr(i, 2) == sym) {
        out.push_back({Token::Kind::Symbol, sym, l, cl});
        advance(2);
        matched = true;
        break;
      }
    if (matched) continue;
    if (std::string("|:;,()").find(c) != std::string::npos) {
      out.push_back({Token::Kind::Symbol, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(l, cl, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Module module() {
    Module m;
    while (peek().kind != Token::Kind::End) m.decls.push_back(decl());
    return m;
  }

  Ty type_expr() {
    if (is("Box")) {
      next();
      return box_type(type_expr());
    }
    return base_type(ident("type"));
  }

  Tm term() {
    if (is("box")) {
      next();
      expect("(");
      Tm body = term();
      expect(")");
      return shut(body);
    }
    if (is("let")) {
      next();
      expect("box");
      std::string u = ident("binder");
      expect(":=");
      Tm s = term();
      expect("in");
      Tm t = term();
      return let_box(u, s, t);
    }
    return var(ident("term"));
  }

  void end() {
    if (peek().kind != Token::Kind::End) fail("trailing input '" + peek().text + "'");
  }

 private:
  Decl decl() {
    Decl d;
    d.line = peek().line;
    if (is("type")) {
      next();
      d.kind = Decl::Kind::Type;
      d.name = ident("type name");
    } else if (is("const")) {
      next();
      d.kind = Decl::Kind::Const;
      d.name = ident("constant name");
      expect(":");
      d.type = type_expr();
    } else if (is("check") || is("equal")) {
      d.kind = is("check") ? Decl::Kind::Check : Decl::Kind::Equal;
      next();
      d.tele = telescope();
      expect("|-");
      d.term = term();
      if (d.kind == Decl::Kind::Equal) {
        expect("==");
        d.term2 = term();
      }
      expect(":");
      d.type = type_expr();
    } else {
      fail("expected a declaration, found '" + peek().text + "'");
    }
    expect(";");
    return d;
  }

  Telescope telescope() {
    Telescope t;
    if (peek().kind == Token::Kind::Ident) t.modal = entries("::");
    if (is("|")) {
      next();
      if (peek().kind == Token::Kind::Ident) t.ordinary = entries(":");
    }
    return t;
  }

  std::vector<Entry> entries(const char* sep) {
    std::vector<Entry> out;
    for (;;) {
      std::string name = ident("variable");
      expect(sep);
      out.push_back({name, type_expr()});
      if (!is(",")) return out;
      next();
    }
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is(const std::string& text) const {
    return peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::End &&
           peek().text == text;
  }
  void expect(const std::string& text) {
    if (!is(text)) fail("expected '" + text + "', found '" + describe() + "'");
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident)
      fail(std::string("expected ") + what + ", found '" + describe() + "'");
    return next().text;
  }
  std::string describe() const {
    return peek().kind == Token::Kind::End ? "end of input" : peek().text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(peek().line, peek().column, msg);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Module parse_module(std::string_view text) { return Parser(text).module(); }

Ty parse_type(std::string_view text) {
  Parser p(text);
  Ty t = p.type_expr();
  p.end();
  return t;
}

Tm parse_term(std::string_view text) {
  Parser p(text);
  Tm t = p.term();
  p.end();
  return t;
}

std::string print(const Judgment& j) {
  auto ty = [](const Ty& t) { return t ? print(t) : std::string("?"); };
  std::string delta = j.tele.modal.empty() ? "." : join_entries(j.tele.modal, " :: ");
  std::string gamma = j.tele.ordinary.empty() ? "." : join_entries(j.tele.ordinary, " : ");
  switch (j.kind) {
    case Judgment::Kind::ModalContext:
      return delta + " |- ok";
    case Judgment::Kind::Context:
      return delta + " | " + gamma + " |- ok";
    case Judgment::Kind::Type:
      return delta + " | " + gamma + " |- " + ty(j.type) + " type";
    case Judgment::Kind::Term:
      return delta + " | " + gamma + " |- " + print(j.term) + " : " + ty(j.type);
    case Judgment::Kind::TermEq:
      return delta + " | " + gamma + " |- " + print(j.term) + " == " + print(j.term2) + " : " +
             ty(j.type);
  }
  return {};
}

std::size_t Derivation::size() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

std::string dump(const Derivation& d, int indent) {
  std::string out(static_cast<std::size_t>(indent) * 2, ' ');
  out += "[" + d.rule + "] " + print(d.judgment) + "\n";
  for (const auto& p : d.premises) out += dump(p, indent + 1);
  return out;
}

CheckError::CheckError(CheckFailure f)
    : Error(ErrorKind::Rejected, f.rule + ": " + f.gap + " in " + print(f.judgment)),
      failure_(std::move(f)) {}

namespace {

Judgment judge(Judgment::Kind kind, const Telescope& t, Ty type = nullptr, Tm term = nullptr,
               Tm term2 = nullptr) {
  return {kind, t, std::move(type), std::move(term), std::move(term2)};
}

[[noreturn]] void reject(Judgment j, std::string rule, std::string gap) {
  throw CheckError({std::move(j), std::move(rule), std::move(gap), 0});
}

const Entry* find(const std::vector<Entry>& es, const std::string& name) {
  for (const auto& e : es)
    if (e.name == name) return &e;
  return nullptr;
}

std::set<std::string> term_names(const Tm& t) {
  std::set<std::string> out;
  names_into(t, out);
  return out;
}

}  // namespace

Derivation Checker::modal_context(const std::vector<Entry>& delta) const {
  Telescope t{delta, {}};
  Judgment j = judge(Judgment::Kind::ModalContext, t);
  if (delta.empty()) return {j, "Emp.□", {}};
  std::vector<Entry> prefix(delta.begin(), delta.end() - 1);
  const Entry& last = delta.back();
  if (find(prefix, last.name)) reject(j, "Ext.□", "name " + last.name + " already bound");
  return {j, "Ext.□", {type(Telescope{prefix, {}}, last.type)}};
}

Derivation Checker::context(const Telescope& t) const {
  Judgment j = judge(Judgment::Kind::Context, t);
  if (t.ordinary.empty()) return {j, "Emp.", {modal_context(t.modal)}};
  Telescope prefix{t.modal, {t.ordinary.begin(), t.ordinary.end() - 1}};
  const Entry& last = t.ordinary.back();
  if (prefix.names().count(last.name)) reject(j, "Ext.", "name " + last.name + " already bound");
  return {j, "Ext.", {type(prefix, last.type)}};
}

Derivation Checker::type(const Telescope& t, const Ty& b) const {
  Judgment j = judge(Judgment::Kind::Type, t, b);
  if (b->kind == TypeExpr::Kind::Base) {
    if (!sig_.has_type(b->name)) reject(j, "Base", "undeclared base type " + b->name);
    return {j, "Base", {context(t)}};
  }
  return {j, "□-Form", {type(t.modal_only(), b->inner)}};
}

Derivation Checker::infer(const Telescope& t, const Tm& term) const {
  switch (term->kind) {
    case TermExpr::Kind::Var: {
      const std::string& n = term->name;
      if (const Entry* e = find(t.ordinary, n))
        return {judge(Judgment::Kind::Term, t, e->type, term), "Var.", {context(t)}};
      if (const Entry* e = find(t.modal, n))
        return {judge(Judgment::Kind::Term, t, e->type, term), "Var.□", {context(t)}};
      if (const Entry* c = sig_.constant(n))
        return {judge(Judgment::Kind::Term, t, c->type, term), "Const", {context(t)}};
      reject(judge(Judgment::Kind::Term, t, nullptr, term), "Var.", "unbound variable " + n);
    }
    case TermExpr::Kind::Shut: {
      for (const auto& e : t.ordinary)
        if (free_vars(term->first).count(e.name))
          reject(judge(Judgment::Kind::Term, t, nullptr, term), "□-Intro",
                 "ordinary variable " + e.name + " occurs under box; the premise must be Δ | ·");
      Derivation body = infer(t.modal_only(), term->first);
      Ty b = body.judgment.type;
      return {judge(Judgment::Kind::Term, t, box_type(b), term), "□-Intro", {std::move(body)}};
    }
    case TermExpr::Kind::LetBox: {
      Derivation scrut = infer(t, term->first);
      const Ty& sa = scrut.judgment.type;
      if (sa->kind != TypeExpr::Kind::Box)
        reject(judge(Judgment::Kind::Term, t, nullptr, term), "□-Elim",
               "scrutinee " + print(term->first) + " has type " + print(sa) + ", not a □ type");
      auto avoid = t.names();
      for (const auto& c : sig_.constants) avoid.insert(c.name);
      std::string u = term->name;
      Tm body = term->second;
      if (t.names().count(u)) {
        auto all = avoid;
        auto tn = term_names(body);
        all.insert(tn.begin(), tn.end());
        std::string fresh = fresh_name(u, all);
        body = substitute(body, u, var(fresh));
        u = fresh;
      }
      Telescope inner = t;
      inner.modal.push_back({u, sa->inner});
      Derivation bd = infer(inner, body);
      Ty b = bd.judgment.type;
      auto names = t.names();
      auto tn = term_names(term);
      names.insert(tn.begin(), tn.end());
      Telescope motive = t;
      motive.ordinary.push_back({fresh_name("x", names), sa});
      Derivation md;
      try {
        md = type(motive, b);
      } catch (const CheckError& e) {
        reject(e.failure().judgment, "□-Elim", "ill-formed motive: " + e.failure().gap);
      }
      return {judge(Judgment::Kind::Term, t, b, let_box(u, term->first, body)),
              "□-Elim",
              {std::move(md), std::move(scrut), std::move(bd)}};
    }
  }
  throw Error(ErrorKind::Shape, "unknown term");
}

Derivation Checker::check(const Telescope& t, const Tm& term, const Ty& b) const {
  if (term->kind == TermExpr::Kind::Shut && b->kind != TypeExpr::Kind::Box)
    reject(judge(Judgment::Kind::Term, t, b, term), "□-Intro",
           "conclusion type " + print(b) + " is not a □ type");
  Derivation d = infer(t, term);
  if (!same_type(d.judgment.type, b)) {
    // Report the deepest node whose conclusion disagrees: the let body for □-Elim.
    const Derivation* at = &d;
    while (at->rule == "□-Elim") at = &at->premises[2];
    reject(judge(Judgment::Kind::Term, at->judgment.tele, b, at->judgment.term), at->rule,
           print(at->judgment.term) + " has type " + print(at->judgment.type) + ", expected " +
               print(b));
  }
  return d;
}

namespace {

bool same_entries(const std::vector<Entry>& a, const std::vector<Entry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !same_type(a[i].type, b[i].type)) return false;
  return true;
}

bool same_tele(const Telescope& a, const Telescope& b) {
  return same_entries(a.modal, b.modal) && same_entries(a.ordinary, b.ordinary);
}

struct Rechecker {
  const Signature& sig;
  ValidationReport report;

  void bad(const Derivation& d, const std::string& why) {
    report.add(d.rule + " instance", why + " at " + print(d.judgment));
  }

  bool kind(const Derivation& d, Judgment::Kind k, std::size_t premises) {
    if (d.judgment.kind != k) {
      bad(d, "wrong judgment form");
      return false;
    }
    if (d.premises.size() != premises) {
      bad(d, "expected " + std::to_string(premises) + " premises");
      return false;
    }
    return true;
  }

  bool premise(const Derivation& d, std::size_t i, Judgment::Kind k) {
    if (d.premises[i].judgment.kind != k) {
      bad(d, "premise " + std::to_string(i) + " has the wrong form");
      return false;
    }
    return true;
  }

  void expect(const Derivation& d, bool cond, const std::string& why) {
    if (!cond) bad(d, why);
  }

  void visit(const Derivation& d) {
    for (const auto& p : d.premises) visit(p);
    const Judgment& j = d.judgment;
    const Telescope& t = j.tele;
    using K = Judgment::Kind;
    const std::string& r = d.rule;
    if (r == "Emp.□") {
      if (kind(d, K::ModalContext, 0)) expect(d, t.modal.empty() && t.ordinary.empty(), "nonempty");
    } else if (r == "Ext.□") {
      if (!kind(d, K::ModalContext, 1) || !premise(d, 0, K::Type)) return;
      expect(d, t.ordinary.empty() && !t.modal.empty(), "shape");
      if (t.modal.empty()) return;
      std::vector<Entry> prefix(t.modal.begin(), t.modal.end() - 1);
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, Telescope{prefix, {}}), "premise context is not Δ | ·");
      expect(d, same_type(p.type, t.modal.back().type), "premise type differs");
      expect(d, !find(prefix, t.modal.back().name), "name not fresh");
    } else if (r == "Emp.") {
      if (!kind(d, K::Context, 1) || !premise(d, 0, K::ModalContext)) return;
      expect(d, t.ordinary.empty(), "ordinary part nonempty");
      expect(d, same_entries(d.premises[0].judgment.tele.modal, t.modal), "modal part differs");
    } else if (r == "Ext.") {
      if (!kind(d, K::Context, 1) || !premise(d, 0, K::Type)) return;
      if (t.ordinary.empty()) return bad(d, "ordinary part empty");
      Telescope prefix{t.modal, {t.ordinary.begin(), t.ordinary.end() - 1}};
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, prefix), "premise context differs");
      expect(d, same_type(p.type, t.ordinary.back().type), "premise type differs");
      expect(d, !prefix.names().count(t.ordinary.back().name), "name not fresh");
    } else if (r == "Base") {
      if (!kind(d, K::Type, 1) || !premise(d, 0, K::Context)) return;
      expect(d, j.type->kind == TypeExpr::Kind::Base && sig.has_type(j.type->name),
             "undeclared base type");
      expect(d, same_tele(d.premises[0].judgment.tele, t), "context differs");
    } else if (r == "□-Form") {
      if (!kind(d, K::Type, 1) || !premise(d, 0, K::Type)) return;
      if (j.type->kind != TypeExpr::Kind::Box) return bad(d, "not a □ type");
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, t.modal_only()), "premise context is not Δ | ·");
      expect(d, same_type(p.type, j.type->inner), "premise type differs");
    } else if (r == "Var." || r == "Var.□" || r == "Const") {
      if (!kind(d, K::Term, 1) || !premise(d, 0, K::Context)) return;
      expect(d, same_tele(d.premises[0].judgment.tele, t), "context differs");
      if (j.term->kind != TermExpr::Kind::Var) return bad(d, "not a variable");
      const Entry* e = r == "Var."    ? find(t.ordinary, j.term->name)
                       : r == "Var.□" ? find(t.modal, j.term->name)
                                      : (t.names().count(j.term->name) ? nullptr
                                                                       : sig.constant(j.term->name));
      if (!e) return bad(d, "name not in scope for this rule");
      expect(d, same_type(e->type, j.type), "declared type differs");
    } else if (r == "□-Intro") {
      if (!kind(d, K::Term, 1) || !premise(d, 0, K::Term)) return;
      if (j.term->kind != TermExpr::Kind::Shut || j.type->kind != TypeExpr::Kind::Box)
        return bad(d, "conclusion is not box(t) : □B");
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, t.modal_only()), "premise context is not Δ | ·");
      expect(d, alpha_equal(p.term, j.term->first), "premise term differs");
      expect(d, same_type(p.type, j.type->inner), "premise type differs");
    } else if (r == "□-Elim") {
      if (!kind(d, K::Term, 3) || !premise(d, 0, K::Type) || !premise(d, 1, K::Term) ||
          !premise(d, 2, K::Term))
        return;
      if (j.term->kind != TermExpr::Kind::LetBox) return bad(d, "not a let");
      const Judgment& m = d.premises[0].judgment;
      const Judgment& s = d.premises[1].judgment;
      const Judgment& b = d.premises[2].judgment;
      if (s.type->kind != TypeExpr::Kind::Box) return bad(d, "scrutinee type is not □A");
      const Ty& a = s.type->inner;
      expect(d, same_tele(s.tele, t) && alpha_equal(s.term, j.term->first), "scrutinee premise");
      Telescope motive = t;
      if (m.tele.ordinary.empty()) return bad(d, "motive context");
      motive.ordinary.push_back({m.tele.ordinary.back().name, s.type});
      expect(d, same_tele(m.tele, motive) && !t.names().count(motive.ordinary.back().name),
             "motive is not formed in Γ, x : □A");
      Telescope inner = t;
      if (b.tele.modal.empty()) return bad(d, "body context");
      const std::string& u = b.tele.modal.back().name;
      inner.modal.push_back({u, a});
      expect(d, same_tele(b.tele, inner) && !t.names().count(u), "body is not in Δ, u :: A | Γ");
      expect(d, alpha_equal(j.term, let_box(u, s.term, b.term)), "conclusion term differs");
      expect(d, same_type(b.type, m.type), "body type is not the motive");
      expect(d, same_type(j.type, substitute(m.type, motive.ordinary.back().name, s.term)),
             "conclusion type is not B[s/x]");
    } else if (r == "≡-Refl") {
      if (!kind(d, K::TermEq, 1) || !premise(d, 0, K::Term)) return;
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, t) && same_type(p.type, j.type), "premise differs");
      expect(d, alpha_equal(p.term, j.term) && alpha_equal(j.term, j.term2), "not reflexive");
    } else if (r == "≡-Sym") {
      if (!kind(d, K::TermEq, 1) || !premise(d, 0, K::TermEq)) return;
      const Judgment& p = d.premises[0].judgment;
      expect(d, same_tele(p.tele, t) && same_type(p.type, j.type), "premise differs");
      expect(d, alpha_equal(p.term, j.term2) && alpha_equal(p.term2, j.term), "not symmetric");
    } else if (r == "≡-Trans") {
      if (!kind(d, K::TermEq, 2) || !premise(d, 0, K::TermEq) || !premise(d, 1, K::TermEq)) return;
      const Judgment& p = d.premises[0].judgment;
      const Judgment& q = d.premises[1].judgment;
      expect(d, same_tele(p.tele, t) && same_tele(q.tele, t), "contexts differ");
      expect(d, same_type(p.type, j.type) && same_type(q.type, j.type), "types differ");
      expect(d, alpha_equal(p.term, j.term) && alpha_equal(p.term2, q.term) &&
                    alpha_equal(q.term2, j.term2),
             "terms do not chain");
    } else if (r == "≡-Shut") {
      if (!kind(d, K::TermEq, 1) || !premise(d, 0, K::TermEq)) return;
      const Judgment& p = d.premises[0].judgment;
      if (j.type->kind != TypeExpr::Kind::Box) return bad(d, "not a □ type");
      expect(d, same_tele(p.tele, t.modal_only()), "premise context is not Δ | ·");
      expect(d, same_type(p.type, j.type->inner), "premise type differs");
      expect(d, alpha_equal(j.term, shut(p.term)) && alpha_equal(j.term2, shut(p.term2)),
             "conclusion is not box congruence");
    } else if (r == "≡-Let.s") {
      if (!kind(d, K::TermEq, 2) || !premise(d, 0, K::TermEq) || !premise(d, 1, K::Term)) return;
      const Judgment& p = d.premises[0].judgment;
      const Judgment& b = d.premises[1].judgment;
      if (p.type->kind != TypeExpr::Kind::Box || b.tele.modal.empty())
        return bad(d, "premise shape");
      const std::string& u = b.tele.modal.back().name;
      Telescope inner = t;
      inner.modal.push_back({u, p.type->inner});
      expect(d, same_tele(p.tele, t) && same_tele(b.tele, inner) && !t.names().count(u),
             "contexts differ");
      expect(d, same_type(b.type, j.type), "body type differs");
      expect(d, alpha_equal(j.term, let_box(u, p.term, b.term)) &&
                    alpha_equal(j.term2, let_box(u, p.term2, b.term)),
             "conclusion is not scrutinee congruence");
    } else if (r == "≡-Let.t") {
      if (!kind(d, K::TermEq, 2) || !premise(d, 0, K::Term) || !premise(d, 1, K::TermEq)) return;
      const Judgment& s = d.premises[0].judgment;
      const Judgment& b = d.premises[1].judgment;
      if (s.type->kind != TypeExpr::Kind::Box || b.tele.modal.empty())
        return bad(d, "premise shape");
      const std::string& u = b.tele.modal.back().name;
      Telescope inner = t;
      inner.modal.push_back({u, s.type->inner});
      expect(d, same_tele(s.tele, t) && same_tele(b.tele, inner) && !t.names().count(u),
             "contexts differ");
      expect(d, same_type(b.type, j.type), "body type differs");
      expect(d, alpha_equal(j.term, let_box(u, s.term, b.term)) &&
                    alpha_equal(j.term2, let_box(u, s.term, b.term2)),
             "conclusion is not body congruence");
    } else if (r == "□-β-Conv") {
      if (!kind(d, K::TermEq, 3) || !premise(d, 0, K::Type) || !premise(d, 1, K::Term) ||
          !premise(d, 2, K::Term))
        return;
      const Judgment& m = d.premises[0].judgment;
      const Judgment& s = d.premises[1].judgment;
      const Judgment& b = d.premises[2].judgment;
      if (m.tele.ordinary.empty() || b.tele.modal.empty()) return bad(d, "premise shape");
      const Ty& a = s.type;
      Telescope motive = t;
      motive.ordinary.push_back({m.tele.ordinary.back().name, box_type(a)});
      expect(d, same_tele(m.tele, motive) && !t.names().count(motive.ordinary.back().name),
             "motive is not formed in Γ, x : □A");
      expect(d, same_tele(s.tele, t.modal_only()), "s is not checked in Δ | ·");
      const std::string& u = b.tele.modal.back().name;
      Telescope inner = t;
      inner.modal.push_back({u, a});
      expect(d, same_tele(b.tele, inner) && !t.names().count(u), "body is not in Δ, u :: A | Γ");
      expect(d, same_type(b.type, m.type), "body type is not the motive");
      expect(d, same_type(j.type, substitute(m.type, motive.ordinary.back().name, shut(s.term))),
             "type is not B[s□/x]");
      expect(d, alpha_equal(j.term, let_box(u, shut(s.term), b.term)), "left side differs");
      expect(d, alpha_equal(j.term2, substitute(b.term, u, s.term)), "right side is not t[s/u]");
    } else if (r == "□-η-Conv") {
      if (!kind(d, K::TermEq, 3) || !premise(d, 0, K::Type) || !premise(d, 1, K::Term) ||
          !premise(d, 2, K::Term))
        return;
      const Judgment& m = d.premises[0].judgment;
      const Judgment& s = d.premises[1].judgment;
      const Judgment& b = d.premises[2].judgment;
      if (s.type->kind != TypeExpr::Kind::Box || b.tele.ordinary.empty())
        return bad(d, "premise shape");
      const std::string& x = b.tele.ordinary.back().name;
      Telescope ext = t;
      ext.ordinary.push_back({x, s.type});
      expect(d, same_tele(s.tele, t), "s context differs");
      expect(d, same_tele(b.tele, ext) && !t.names().count(x), "t is not in Γ, x : □A");
      expect(d, same_tele(m.tele, ext) && same_type(m.type, b.type), "motive differs");
      expect(d, same_type(j.type, substitute(m.type, x, s.term)), "type is not B[s/x]");
      if (j.term->kind != TermExpr::Kind::LetBox) return bad(d, "left side is not a let");
      const std::string& u = j.term->name;
      expect(d, !t.names().count(u) && !free_vars(b.term).count(u), "binder not fresh");
      expect(d, alpha_equal(j.term, let_box(u, s.term, substitute(b.term, x, shut(var(u))))),
             "left side is not let u := s in t[u□/x]");
      Tm rhs;
      try {
        rhs = substitute(b.term, x, s.term, SubstMode::Ordinary);
      } catch (const Error&) {
        return bad(d, "x occurs under box");
      }
      expect(d, alpha_equal(j.term2, rhs), "right side is not t[s/x]");
    } else {
      bad(d, "unknown rule");
    }
  }
};

}  // namespace

ValidationReport recheck(const Derivation& d, const Signature& sig) {
  Rechecker r{sig, {}};
  r.visit(d);
  return r.report;
}

namespace {

Tm with_child(const Tm& t, int i, Tm child) {
  if (t->kind == TermExpr::Kind::Shut) return shut(std::move(child));
  return i == 0 ? let_box(t->name, std::move(child), t->second)
                : let_box(t->name, t->first, std::move(child));
}

bool is_beta_redex(const Tm& t) {
  return t->kind == TermExpr::Kind::LetBox && t->first->kind == TermExpr::Kind::Shut;
}

// Every free u must occur as box(u) outside any other box.
bool eta_shape(const Tm& t, const std::string& u, bool under_box) {
  switch (t->kind) {
    case TermExpr::Kind::Var:
      return t->name != u;
    case TermExpr::Kind::Shut:
      if (t->first->kind == TermExpr::Kind::Var && t->first->name == u) return !under_box;
      return eta_shape(t->first, u, true);
    case TermExpr::Kind::LetBox:
      if (!eta_shape(t->first, u, under_box)) return false;
      return t->name == u || eta_shape(t->second, u, under_box);
  }
  return false;
}

Tm abstract_box(const Tm& t, const std::string& u, const std::string& x) {
  switch (t->kind) {
    case TermExpr::Kind::Var:
      return t;
    case TermExpr::Kind::Shut:
      if (t->first->kind == TermExpr::Kind::Var && t->first->name == u) return var(x);
      return shut(abstract_box(t->first, u, x));
    case TermExpr::Kind::LetBox:
      return let_box(t->name, abstract_box(t->first, u, x),
                     t->name == u ? t->second : abstract_box(t->second, u, x));
  }
  return t;
}

struct EtaParts {
  std::string x;
  Tm body;  // t with box(u) replaced by x
};

EtaParts eta_parts(const Tm& redex, const std::set<std::string>& avoid) {
  auto names = avoid;
  auto tn = term_names(redex);
  names.insert(tn.begin(), tn.end());
  std::string x = fresh_name("x", names);
  return {x, abstract_box(redex->second, redex->name, x)};
}

Tm eta_contract(const Tm& redex) {
  EtaParts p = eta_parts(redex, {});
  return substitute(p.body, p.x, redex->first, SubstMode::Ordinary);
}

using Finder = std::function<std::optional<Tm>(const Tm&)>;

std::optional<RewriteStep> first_step(const Tm& t, const Finder& at_root, const std::string& rule) {
  if (auto r = at_root(t)) return RewriteStep{t, *r, rule, {}};
  int children = t->kind == TermExpr::Kind::Var ? 0 : t->kind == TermExpr::Kind::Shut ? 1 : 2;
  for (int i = 0; i < children; ++i) {
    const Tm& c = i == 0 ? t->first : t->second;
    if (auto s = first_step(c, at_root, rule)) {
      s->path.insert(s->path.begin(), i);
      s->before = t;
      s->after = with_child(t, i, s->after);
      return s;
    }
  }
  return std::nullopt;
}

std::optional<Tm> beta_at_root(const Tm& t) {
  if (!is_beta_redex(t)) return std::nullopt;
  return substitute(t->second, t->name, t->first->first);
}

std::optional<Tm> eta_at_root(const Tm& t) {
  if (t->kind != TermExpr::Kind::LetBox || is_beta_redex(t)) return std::nullopt;
  if (!eta_shape(t->second, t->name, false)) return std::nullopt;
  return eta_contract(t);
}

}  // namespace

std::optional<RewriteStep> beta_step(const Tm& t) { return first_step(t, beta_at_root, "beta"); }

std::optional<RewriteStep> eta_step(const Tm& t) { return first_step(t, eta_at_root, "eta"); }

std::vector<Tm> beta_reducts(const Tm& t) {
  std::vector<Tm> out;
  if (auto r = beta_at_root(t)) out.push_back(*r);
  if (t->kind == TermExpr::Kind::Var) return out;
  for (const Tm& c : beta_reducts(t->first)) out.push_back(with_child(t, 0, c));
  if (t->kind == TermExpr::Kind::LetBox)
    for (const Tm& c : beta_reducts(t->second)) out.push_back(with_child(t, 1, c));
  return out;
}

int count_redexes(const Tm& t) {
  int n = is_beta_redex(t) ? 1 : 0;
  if (t->first) n += count_redexes(t->first);
  if (t->second) n += count_redexes(t->second);
  return n;
}

Tm beta_normalize(const Tm& t, int max_steps) {
  Tm cur = t;
  for (int i = 0; i < max_steps; ++i) {
    auto s = beta_step(cur);
    if (!s) return cur;
    cur = s->after;
  }
  throw Error(ErrorKind::CeilingExceeded, "β-normalization exceeded step bound on " + print(t));
}

Tm normalize(const Tm& t, std::vector<RewriteStep>* steps, int max_steps) {
  Tm cur = t;
  for (int i = 0; i < max_steps; ++i) {
    auto s = beta_step(cur);
    if (!s) s = eta_step(cur);
    if (!s) return cur;
    if (steps) steps->push_back(*s);
    cur = s->after;
  }
  throw Error(ErrorKind::CeilingExceeded, "normalization exceeded step bound on " + print(t));
}

namespace {

struct EqBuilder {
  const Checker& k;

  Telescope motive(const Telescope& t, const Tm& term, const Ty& boxed) const {
    auto names = t.names();
    auto tn = term_names(term);
    names.insert(tn.begin(), tn.end());
    Telescope m = t;
    m.ordinary.push_back({fresh_name("x", names), boxed});
    return m;
  }

  // Renames the let binder away from the telescope; returns (binder, body).
  std::pair<std::string, Tm> open(const Telescope& t, const Tm& let, const Tm* other_body) const {
    std::string u = let->name;
    if (!t.names().count(u)) return {u, let->second};
    auto avoid = t.names();
    auto tn = term_names(let);
    avoid.insert(tn.begin(), tn.end());
    if (other_body) {
      auto on = term_names(*other_body);
      avoid.insert(on.begin(), on.end());
    }
    std::string fresh = fresh_name(u, avoid);
    return {fresh, substitute(let->second, u, var(fresh))};
  }

  Derivation step(const Telescope& t, const Tm& before, const Tm& after, const Ty& b,
                  const std::vector<int>& path, std::size_t depth, const std::string& rule) const {
    Judgment j = judge(Judgment::Kind::TermEq, t, b, before, after);
    if (depth == path.size()) return rule == "beta" ? beta(t, before, after, b) : eta(t, before, after, b);
    if (before->kind == TermExpr::Kind::Shut)
      return {j, "≡-Shut",
              {step(t.modal_only(), before->first, after->first, b->inner, path, depth + 1, rule)}};
    if (path[depth] == 0) {
      Derivation sd = step(t, before->first, after->first, k.infer(t, before->first).judgment.type,
                           path, depth + 1, rule);
      Ty a = sd.judgment.type->inner;
      auto [u, body] = open(t, before, nullptr);
      Telescope inner = t;
      inner.modal.push_back({u, a});
      Judgment jj = judge(Judgment::Kind::TermEq, t, b, let_box(u, before->first, body),
                          let_box(u, after->first, body));
      return {jj, "≡-Let.s", {std::move(sd), k.check(inner, body, b)}};
    }
    Derivation sd = k.infer(t, before->first);
    Ty a = sd.judgment.type->inner;
    std::string u = before->name;
    Tm bb = before->second, ab = after->second;
    if (t.names().count(u)) {
      auto avoid = t.names();
      for (const Tm& x : {before, after}) {
        auto tn = term_names(x);
        avoid.insert(tn.begin(), tn.end());
      }
      std::string fresh = fresh_name(u, avoid);
      bb = substitute(bb, u, var(fresh));
      ab = substitute(ab, u, var(fresh));
      u = fresh;
    }
    Telescope inner = t;
    inner.modal.push_back({u, a});
    Judgment jj = judge(Judgment::Kind::TermEq, t, b, let_box(u, before->first, bb),
                        let_box(u, after->first, ab));
    return {jj, "≡-Let.t", {std::move(sd), step(inner, bb, ab, b, path, depth + 1, rule)}};
  }

  Derivation beta(const Telescope& t, const Tm& before, const Tm&, const Ty& b) const {
    const Tm& s = before->first->first;
    Derivation sd = k.infer(t.modal_only(), s);
    Ty a = sd.judgment.type;
    auto [u, body] = open(t, before, nullptr);
    Telescope inner = t;
    inner.modal.push_back({u, a});
    Tm lhs = let_box(u, before->first, body);
    Derivation md = k.type(motive(t, lhs, box_type(a)), b);
    Judgment j = judge(Judgment::Kind::TermEq, t, b, lhs, substitute(body, u, s));
    return {j, "□-β-Conv", {std::move(md), std::move(sd), k.check(inner, body, b)}};
  }

  Derivation eta(const Telescope& t, const Tm& before, const Tm& after, const Ty& b) const {
    const Tm& s = before->first;
    Derivation sd = k.infer(t, s);
    auto avoid = t.names();
    for (const auto& c : k.signature().constants) avoid.insert(c.name);
    Tm lhs = before;
    if (t.names().count(before->name)) {
      auto [u, body] = open(t, before, nullptr);
      lhs = let_box(u, s, body);
    }
    EtaParts p = eta_parts(lhs, avoid);
    Telescope ext = t;
    ext.ordinary.push_back({p.x, sd.judgment.type});
    Derivation md = k.type(ext, b);
    Judgment j = judge(Judgment::Kind::TermEq, t, b, lhs, after);
    return {j, "□-η-Conv", {std::move(md), std::move(sd), k.check(ext, p.body, b)}};
  }

  Derivation chain(const Telescope& t, const Tm& start, const std::vector<RewriteStep>& steps,
                   const Ty& b) const {
    if (steps.empty())
      return {judge(Judgment::Kind::TermEq, t, b, start, start), "≡-Refl", {k.check(t, start, b)}};
    Derivation acc = step(t, steps[0].before, steps[0].after, b, steps[0].path, 0, steps[0].rule);
    for (std::size_t i = 1; i < steps.size(); ++i) {
      Derivation next = step(t, steps[i].before, steps[i].after, b, steps[i].path, 0, steps[i].rule);
      Judgment j = judge(Judgment::Kind::TermEq, t, b, acc.judgment.term, next.judgment.term2);
      acc = {j, "≡-Trans", {std::move(acc), std::move(next)}};
    }
    return acc;
  }
};

}  // namespace

DefeqVerdict defeq(const Checker& k, const Telescope& t, const Tm& t1, const Tm& t2, const Ty& b) {
  k.type(t, b);
  k.check(t, t1, b);
  k.check(t, t2, b);
  DefeqVerdict v;
  std::vector<RewriteStep> s1, s2;
  v.normal1 = normalize(t1, &s1);
  v.normal2 = normalize(t2, &s2);
  v.equal = alpha_equal(v.normal1, v.normal2);
  if (!v.equal) return v;
  EqBuilder eb{k};
  Derivation left = eb.chain(t, t1, s1, b);
  if (s2.empty() && alpha_equal(t1, t2) && s1.empty()) {
    v.derivation = std::move(left);
    return v;
  }
  Derivation right = eb.chain(t, t2, s2, b);
  Derivation back{judge(Judgment::Kind::TermEq, t, b, right.judgment.term2, right.judgment.term),
                  "≡-Sym",
                  {std::move(right)}};
  Judgment j = judge(Judgment::Kind::TermEq, t, b, left.judgment.term, back.judgment.term2);
  v.derivation = Derivation{j, "≡-Trans", {std::move(left), std::move(back)}};
  return v;
}

ModuleResult check_module(const Module& m) {
  ModuleResult out;
  for (const Decl& d : m.decls) {
    auto fail = [&](CheckFailure f) {
      f.line = d.line;
      out.results.push_back({d.line, print(d), std::nullopt, f});
      out.failure = std::move(f);
    };
    Checker k(out.signature);
    try {
      switch (d.kind) {
        case Decl::Kind::Type:
          if (out.signature.has_type(d.name) || out.signature.constant(d.name))
            reject(judge(Judgment::Kind::Type, {}, base_type(d.name)), "Base",
                   "duplicate declaration of " + d.name);
          out.signature.types.push_back(d.name);
          break;
        case Decl::Kind::Const:
          if (out.signature.constant(d.name) || out.signature.has_type(d.name))
            reject(judge(Judgment::Kind::Term, {}, d.type, var(d.name)), "Const",
                   "duplicate declaration of " + d.name);
          k.type({}, d.type);
          out.signature.constants.push_back({d.name, d.type});
          break;
        case Decl::Kind::Check: {
          k.type(d.tele, d.type);
          out.results.push_back({d.line, print(d), k.check(d.tele, d.term, d.type), std::nullopt});
          break;
        }
        case Decl::Kind::Equal: {
          k.type(d.tele, d.type);
          DefeqVerdict v = defeq(k, d.tele, d.term, d.term2, d.type);
          if (!v.equal)
            reject(judge(Judgment::Kind::TermEq, d.tele, d.type, d.term, d.term2), "≡",
                   "normal forms differ: " + print(v.normal1) + " vs " + print(v.normal2));
          out.results.push_back({d.line, print(d), std::move(v.derivation), std::nullopt});
          break;
        }
      }
    } catch (const CheckError& e) {
      fail(e.failure());
      return out;
    }
  }
  return out;
}

}  // namespace s4sem
