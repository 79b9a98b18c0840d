#pragma once

// Kernel for S4 dependent type theory: syntax, parser and printer, the
// context/variable rules and the □ rules, substitution and definitional
// equality.
//
// Types are base constants or □B; terms are variables, signature constants,
// box(t) and let box u := s in t.  Contexts are two-zone telescopes Δ | Γ.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "s4sem/error.hpp"

namespace s4sem {

struct TypeExpr;
using Ty = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  enum class Kind { Base, Box };
  Kind kind = Kind::Base;
  std::string name;  // Base
  Ty inner;          // Box
};

Ty base_type(std::string name);
Ty box_type(Ty inner);
bool same_type(const Ty& a, const Ty& b);

struct TermExpr;
using Tm = std::shared_ptr<const TermExpr>;

struct TermExpr {
  enum class Kind { Var, Shut, LetBox };
  Kind kind = Kind::Var;
  std::string name;  // variable, constant, or the let binder
  Tm first;          // Shut body / let scrutinee
  Tm second;         // let body
};

Tm var(std::string name);
Tm shut(Tm body);
Tm let_box(std::string binder, Tm scrutinee, Tm body);

/// Binders replaced by de Bruijn indices; free names kept.
std::string canonical(const Tm& t);
bool alpha_equal(const Tm& a, const Tm& b);
std::set<std::string> free_vars(const Tm& t);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

enum class SubstMode { Modal, Ordinary };

/// Capture-avoiding t[s/x].  Ordinary substitution throws Rejected when x
/// occurs under box, where no ordinary variable can be in scope.
Tm substitute(const Tm& t, const std::string& x, const Tm& s, SubstMode mode = SubstMode::Modal);
/// Types mention no term variables, so B[s/x] = B.
Ty substitute(const Ty& b, const std::string& x, const Tm& s);

struct Entry {
  std::string name;
  Ty type;
};

struct Telescope {
  std::vector<Entry> modal;     // u :: A
  std::vector<Entry> ordinary;  // x : A

  std::set<std::string> names() const;
  Telescope modal_only() const { return {modal, {}}; }
};

std::string print(const Ty& a);
std::string print(const Tm& t);
std::string print(const Telescope& t);

struct Signature {
  std::vector<std::string> types;
  std::vector<Entry> constants;

  bool has_type(const std::string& name) const;
  const Entry* constant(const std::string& name) const;
};

struct Decl {
  enum class Kind { Type, Const, Check, Equal };
  Kind kind = Kind::Type;
  std::string name;  // Type, Const
  Ty type;           // Const, Check, Equal
  Telescope tele;    // Check, Equal
  Tm term;
  Tm term2;          // Equal
  int line = 0;
};

struct Module {
  std::vector<Decl> decls;
};

std::string print(const Decl& d);
std::string print(const Module& m);

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

Module parse_module(std::string_view text);
Ty parse_type(std::string_view text);
Tm parse_term(std::string_view text);

struct Judgment {
  enum class Kind { ModalContext, Context, Type, Term, TermEq };
  Kind kind = Kind::Context;
  Telescope tele;
  Ty type;
  Tm term;
  Tm term2;
};

std::string print(const Judgment& j);

struct Derivation {
  Judgment judgment;
  std::string rule;
  std::vector<Derivation> premises;

  std::size_t size() const;
};

std::string dump(const Derivation& d, int indent = 0);

struct CheckFailure {
  Judgment judgment;
  std::string rule;
  std::string gap;
  int line = 0;
};

class CheckError : public Error {
 public:
  explicit CheckError(CheckFailure f);
  const CheckFailure& failure() const { return failure_; }

 private:
  CheckFailure failure_;
};

/// Bidirectional checker producing derivations.  Let binders that collide
/// with names in scope are renamed, so the derivation mentions α-variants
/// of the input.
class Checker {
 public:
  explicit Checker(Signature sig) : sig_(std::move(sig)) {}

  const Signature& signature() const { return sig_; }
  Derivation modal_context(const std::vector<Entry>& delta) const;
  Derivation context(const Telescope& t) const;
  Derivation type(const Telescope& t, const Ty& b) const;
  Derivation infer(const Telescope& t, const Tm& term) const;
  Derivation check(const Telescope& t, const Tm& term, const Ty& b) const;

 private:
  Signature sig_;
};

/// Re-validates every node as an instance of its rule, without the checker.
ValidationReport recheck(const Derivation& d, const Signature& sig);

/// Leftmost-outermost reduction steps; a path lists child positions (0 for
/// the box body or let scrutinee, 1 for the let body).
struct RewriteStep {
  Tm before;
  Tm after;
  std::string rule;  // "beta" or "eta"
  std::vector<int> path;
};

std::optional<RewriteStep> beta_step(const Tm& t);
std::optional<RewriteStep> eta_step(const Tm& t);
/// All one-step β reducts, for confluence checks.
std::vector<Tm> beta_reducts(const Tm& t);
int count_redexes(const Tm& t);
Tm beta_normalize(const Tm& t, int max_steps = 10000);
/// β-normal form followed by η-contraction, repeated to a fixed point.
Tm normalize(const Tm& t, std::vector<RewriteStep>* steps = nullptr, int max_steps = 10000);

struct DefeqVerdict {
  bool equal = false;
  Tm normal1;
  Tm normal2;
  std::optional<Derivation> derivation;
};

/// Decides t1 ≡ t2 : B by comparing βη-normal forms; throws CheckError when
/// either term does not check.
DefeqVerdict defeq(const Checker& k, const Telescope& t, const Tm& t1, const Tm& t2, const Ty& b);

struct DirectiveResult {
  int line = 0;
  std::string text;  // the directive as printed
  std::optional<Derivation> derivation;
  std::optional<CheckFailure> failure;

  bool ok() const { return derivation.has_value(); }
};

struct ModuleResult {
  Signature signature;
  std::vector<DirectiveResult> results;
  std::optional<CheckFailure> failure;  // first failure; checking stops there

  bool ok() const { return !failure.has_value(); }
};

ModuleResult check_module(const Module& m);

}  // namespace s4sem
