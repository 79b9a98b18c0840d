#pragma once

// Partial interpretation of the S4 kernel into a comonad of natural models,
// and a harness checking the soundness clauses on checked derivations.
//
// Modal contexts go to coalgebras, ordinary contexts to presheaves, types and
// terms to types and terms over those presheaves.  Clauses outside the
// displayed ones (weakening, let under a nonempty Γ) are reported in
// `extensions`.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s4sem/coalg.hpp"
#include "s4sem/s4dtt.hpp"

namespace s4sem {

template <class T>
struct Partial {
  std::optional<T> value;
  std::string reason;  // why undefined
  std::vector<std::string> extensions;

  bool defined() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

/// Base types as presheaves on the base, constants as global elements of
/// their interpreted type over the terminal context: pick[I][0].
struct SemanticSignature {
  std::map<std::string, PresheafPtr> types;
  std::map<std::string, std::vector<std::vector<int>>> constants;
};

struct SemanticContext {
  Telescope tele;
  Coalgebra modal;                          // ⟦Δ⟧
  PresheafPtr object;                       // ⟦Δ | Γ⟧
  std::vector<CoalgebraType> modal_types;   // 𝔽⟦Δ_<j | · ; A_j⟧
  std::vector<Comprehension> modal_steps;   // U-comprehensions of the 𝔽-types
  std::vector<Coalgebra> modal_prefixes;    // ⟦Δ_<j⟧, then ⟦Δ⟧
  std::vector<Comprehension> ordinary_steps;
  PresheafMap to_modal;                     // ⟦Δ | Γ⟧ → U⟦Δ⟧
};

class Interpretation {
 public:
  Interpretation(ComonadPtr w, Signature sig, SemanticSignature sem);

  const NaturalModelComonad& comonad() const { return *w_; }
  const ComonadPtr& comonad_ptr() const { return w_; }

  Partial<Coalgebra> modal_context(const std::vector<Entry>& delta);
  Partial<SemanticContext> context(const Telescope& t);
  Partial<TypePtr> type(const Telescope& t, const Ty& b);
  Partial<TermOverContext> term(const Telescope& t, const Tm& term);

  /// The projection ⟦Δ | Γ⟧ → ⟦Δ_<n | ·⟧ onto the first n modal entries.
  PresheafMap modal_projection(const SemanticContext& c, std::size_t n) const;
  /// The projection ⟦Δ | Γ⟧ → ⟦Δ | Γ_<n⟧.
  PresheafMap ordinary_projection(const SemanticContext& c, std::size_t n) const;

  void clear_cache();

 private:
  Partial<SemanticContext> context_uncached(const Telescope& t);
  Partial<TypePtr> type_uncached(const Telescope& t, const Ty& b);
  Partial<TermOverContext> term_impl(const Telescope& t, const Tm& term);

  ComonadPtr w_;
  Checker checker_;
  SemanticSignature sem_;
  Coalgebra terminal_;
  std::map<std::string, Partial<SemanticContext>> contexts_;
  std::map<std::string, Partial<TypePtr>> types_;
};

/// Every assignment of base types to presheaves with values of size ≤ bound,
/// with every choice of global elements for the constants.
std::vector<SemanticSignature> valuations(const ComonadPtr& w, const Signature& sig, int bound,
                                          const Ceiling& ceiling = {});

struct SoundnessRecord {
  std::string clause;
  std::string judgment;
  bool ok = true;
  std::string witness;
  std::vector<std::string> extensions;
};

struct SoundnessReport {
  std::vector<SoundnessRecord> records;

  bool ok() const;
  std::size_t failures() const;
  std::size_t count(const std::string& clause) const;
  std::size_t extended() const;
};

/// Checks every node of every derivation against the clause for its judgment
/// form: contexts, types and terms are defined and valid, p∘⟦t⟧ = ⟦B⟧, and
/// ≡-judgments interpret to equal terms.
SoundnessReport soundness_harness(const ModuleResult& checked, Interpretation& interp);

}  // namespace s4sem
