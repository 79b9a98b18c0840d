#pragma once

// Natural model comonads and the coalgebra model.
//
// A comonad □ on presheaves over a base category is given by its action on
// presheaves and maps with counit ε and comultiplication δ.  Its type action
// strictifies □p_A into a type over □Γ.  Coalgebras (Γ, γ) form a new
// natural model whose types carry a structure θ : A → 𝔹A for the induced
// fiberwise comonad 𝔹A = Tp_□(A)[γ].

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s4sem/natmodel.hpp"

namespace s4sem {

class NaturalModelComonad {
 public:
  virtual ~NaturalModelComonad() = default;

  virtual CatPtr base() const = 0;
  virtual PresheafPtr apply(const PresheafPtr& p) const = 0;
  virtual PresheafMap apply(const PresheafMap& m) const = 0;
  virtual PresheafMap counit(const PresheafPtr& p) const = 0;   // □P → P
  virtual PresheafMap comult(const PresheafPtr& p) const = 0;   // □P → □□P
  virtual bool is_identity() const { return false; }
  virtual std::string name() const = 0;

  /// Tp_□(A): the fibers of □p_A as a type over □Γ.
  virtual TypePtr type_action(const TypePtr& a) const;
  /// τ_A : □(Γ.A) ≅ □Γ.Tp_□(A) over □Γ.
  PresheafMap tau(const TypePtr& a) const;
  /// Tm_□(a): the section τ∘□ā read as a term of Tp_□(A).
  TermOverContext term_action(const TermOverContext& t) const;
};

using ComonadPtr = std::shared_ptr<const NaturalModelComonad>;

/// □ = u* u_* for u : A → C.  The base of the comonad is A.
class AdjunctionComonad : public NaturalModelComonad {
 public:
  explicit AdjunctionComonad(std::shared_ptr<const KanAdjunction> adj);

  CatPtr base() const override { return adj_->small(); }
  PresheafPtr apply(const PresheafPtr& p) const override;
  PresheafMap apply(const PresheafMap& m) const override;
  PresheafMap counit(const PresheafPtr& p) const override;
  PresheafMap comult(const PresheafPtr& p) const override;
  bool is_identity() const override { return adj_->is_identity(); }
  std::string name() const override;

  const KanAdjunction& adjunction() const { return *adj_; }
  std::shared_ptr<const KanAdjunction> adjunction_ptr() const { return adj_; }
  /// Tp_{u*}(Tp_{u_*}(A)), strictifying one functor at a time.
  TypePtr type_action_by_components(const TypePtr& a) const;

 private:
  std::shared_ptr<const KanAdjunction> adj_;
};

/// u* preserves the terminal object, pullbacks and display maps on the
/// suite of presheaves over C.
Verdict left_adjoint_check(const KanAdjunction& adj, const std::vector<PresheafPtr>& suite,
                           int bound = 1);
/// Builds □ = u* u_*, rejecting u if left_adjoint_check fails on presheaves
/// over C with values of size ≤ 1.
ComonadPtr comonad_from_adjunction(std::shared_ptr<const KanAdjunction> adj);
ComonadPtr identity_comonad(CatPtr c);
/// The comonad u* u_* for the functor 𝟙 → M of a one-object category.
ComonadPtr monoid_comonad(CatPtr monoid);

/// Functoriality, naturality of ε and δ, the comonad laws, preservation of
/// the terminal object and pullbacks, and τ on every suite object.
ValidationReport validate_comonad(const NaturalModelComonad& w,
                                  const std::vector<PresheafPtr>& suite);

struct Coalgebra {
  PresheafPtr carrier;
  PresheafMap structure;  // carrier → □carrier

  bool operator==(const Coalgebra& other) const;
};

ValidationReport validate_coalgebra(const NaturalModelComonad& w, const Coalgebra& c);
bool is_coalgebra_map(const NaturalModelComonad& w, const Coalgebra& from, const Coalgebra& to,
                      const PresheafMap& h);
std::vector<PresheafMap> coalgebra_maps(const NaturalModelComonad& w, const Coalgebra& from,
                                        const Coalgebra& to, const Ceiling& ceiling = {});
/// The terminal coalgebra (1, 1 → □1).
Coalgebra terminal_coalgebra(const NaturalModelComonad& w);
/// The sub-coalgebra on s with its inclusion; throws Rejected unless γ
/// restricts to s.
std::pair<Coalgebra, PresheafMap> subcoalgebra(const NaturalModelComonad& w, const Coalgebra& c,
                                               const Subpresheaf& s);
/// (□Q, δ_Q), the right adjoint F of the forgetful functor.
Coalgebra cofree(const NaturalModelComonad& w, const PresheafPtr& q);
/// h : UX → Q ↦ □h ∘ γ : X → FQ.
PresheafMap cofree_transpose(const NaturalModelComonad& w, const Coalgebra& x,
                             const PresheafMap& h);
/// All coalgebras whose carrier has values of size ≤ bound.
std::vector<Coalgebra> enumerate_coalgebras(const NaturalModelComonad& w, int bound,
                                            const Ceiling& ceiling = {});
/// Triangle identities of U ⊣ F and |Hom(UX, Q)| = |Hom(X, FQ)| over the
/// given coalgebras and presheaves.
Verdict forgetful_adjunction_check(const NaturalModelComonad& w,
                                   const std::vector<Coalgebra>& coalgebras,
                                   const std::vector<PresheafPtr>& presheaves,
                                   const Ceiling& ceiling = {});

/// The fiberwise comonad 𝔹 over a coalgebra (Γ, γ).
class InducedComonad {
 public:
  InducedComonad(ComonadPtr w, Coalgebra at);

  const Coalgebra& context() const { return at_; }
  const NaturalModelComonad& comonad() const { return *w_; }
  TypePtr apply(const TypePtr& a) const;
  TypeMap apply(const TypeMap& m) const;
  /// `apply` on maps source → target, with the per-type data computed once.
  std::function<TypeMap(const TypeMap&)> map_action(const TypePtr& source,
                                                    const TypePtr& target) const;
  TermOverContext apply(const TermOverContext& t) const;
  TypeMap counit(const TypePtr& a) const;   // 𝔹A → A
  TypeMap comult(const TypePtr& a) const;   // 𝔹A → 𝔹𝔹A
  ValidationReport check_laws(const TypePtr& a) const;

 private:
  ComonadPtr w_;
  Coalgebra at_;
};

struct CoalgebraType {
  Coalgebra context;
  TypePtr type;
  TypeMap theta;  // type → 𝔹type
};

ValidationReport validate_coalgebra_type(const ComonadPtr& w, const CoalgebraType& x);
bool is_coalgebra_type_map(const ComonadPtr& w, const CoalgebraType& from,
                           const CoalgebraType& to, const TypeMap& m);
std::vector<TypeMap> coalgebra_type_maps(const ComonadPtr& w, const CoalgebraType& from,
                                         const CoalgebraType& to, const Ceiling& ceiling = {});
/// Every coalgebra type over `at` with fibers of size ≤ max_fiber.
std::vector<CoalgebraType> enumerate_coalgebra_types(const ComonadPtr& w, const Coalgebra& at,
                                                     int max_fiber, const Ceiling& ceiling = {});

/// (Γ, γ).(A, θ) = (Γ.A, ξ) with ξ(γ, a) = τ⁻¹(γ(γ), θ(a)).
Coalgebra coalgebra_comprehension(const ComonadPtr& w, const CoalgebraType& x);
/// Substitution along a coalgebra map h : Δ → Γ.
CoalgebraType subst(const ComonadPtr& w, const CoalgebraType& x, const Coalgebra& delta,
                    const PresheafMap& h);
/// The type of fibers of a coalgebra map f : E → B, with its structure.
CoalgebraType strictify_coalgebra(const ComonadPtr& w, const Coalgebra& e, const Coalgebra& b,
                                  const PresheafMap& f);
/// The cofree coalgebra type (𝔹A, δ^𝔹_A).
CoalgebraType cofree_type(const ComonadPtr& w, const Coalgebra& at, const TypePtr& a);
/// 𝔽A = Tp_F(A)[γ], computed through F(p_A) and the unit γ : (Γ,γ) → FΓ.
CoalgebraType induced_right_adjoint(const ComonadPtr& w, const Coalgebra& at, const TypePtr& a);

/// Σ for B over the comprehension of A.
CoalgebraType coalgebra_sigma(const ComonadPtr& w, const CoalgebraType& a,
                              const CoalgebraType& b);

struct CoalgebraPi {
  CoalgebraType type;     // the largest sub-coalgebra of 𝔹(Π A B) on which ev is coalgebraic
  CoalgebraType domain;
  CoalgebraType codomain;
  PiType pi;
  TypeMap inclusion;      // type → 𝔹(Π A B)
  TypeMap eval;           // type[p_A] → B over Γ.A
};

CoalgebraPi coalgebra_pi(const ComonadPtr& w, const CoalgebraType& a, const CoalgebraType& b,
                         const Ceiling& ceiling = {});
/// h : R[p_A] → B coalgebraic ↦ the coalgebra type map R → Π.
TypeMap coalgebra_lambda(const ComonadPtr& w, const CoalgebraPi& pi, const CoalgebraType& r,
                         const TypeMap& h);
/// B^A = Π_A (B[p_A]).
CoalgebraPi coalgebra_exponential(const ComonadPtr& w, const CoalgebraType& a,
                                  const CoalgebraType& b, const Ceiling& ceiling = {});

/// Ω_G: the fixed points of k = □σ∘δ_Ω on □Ω, where σ classifies □⊤.
struct KockWraith {
  SubobjectClassifier omega;
  PresheafPtr box_omega;
  PresheafMap sigma;       // □Ω → Ω
  PresheafMap k;           // □Ω → □Ω, idempotent
  Coalgebra fixed;         // Ω_G with the restricted cofree structure
  PresheafMap inclusion;   // Ω_G → □Ω
  PresheafMap top;         // 1 → Ω_G
  /// Internal order: pairs (x, y) of Ω_G(I) with ε(x) ⊆ ε(y) as sieves.
  std::vector<std::vector<std::pair<int, int>>> order;

  PresheafMap classify(const ComonadPtr& w, const Coalgebra& c, const Subpresheaf& s) const;
};

KockWraith kock_wraith(const ComonadPtr& w);
std::vector<Subpresheaf> subcoalgebras(const NaturalModelComonad& w, const Coalgebra& c,
                                       const Ceiling& ceiling = {});
/// Sub-coalgebras of each coalgebra correspond to coalgebra maps into Ω_G,
/// and k is idempotent.
Verdict kock_wraith_check(const ComonadPtr& w, const KockWraith& kw,
                          const std::vector<Coalgebra>& coalgebras, const Ceiling& ceiling = {});

/// (F𝒰)^β: the internal category of β-coalgebras in the cofree F𝒰, where β
/// internalises 𝔹.  Objects at I are pairs (o, m) in □U × □Mor with
/// m : o → β(o) satisfying the coalgebra laws, stored as a subpresheaf of
/// □(U × Mor).
struct CoalgebraClassifier {
  ComonadPtr comonad;
  std::shared_ptr<const HSUniverse> universe;
  std::shared_ptr<const UniverseCategory> cat;
  Product ob_mor;            // U × Mor
  PresheafPtr box_ob_mor;    // □(U × Mor)
  PresheafPtr box_u, box_mor;
  PresheafMap beta_ob;       // □U → □U
  PresheafMap beta_mor;      // □Mor → □Mor
  PresheafMap eps_beta;      // □U → □Mor, ε^𝔹 internalised
  PresheafMap delta_beta;    // □U → □Mor, δ^𝔹 internalised
  PresheafMap box_comp;      // □(composable) → □Mor
  Subpresheaf objects;       // inside □(U × Mor)
  Coalgebra object_coalgebra;
  PresheafMap object_inclusion;

  /// The coalgebra type named by a coalgebra map (Γ, γ) → Ob.
  CoalgebraType decode(const Coalgebra& at, const PresheafMap& code) const;
  /// The coalgebra map naming a coalgebra type.
  PresheafMap encode(const CoalgebraType& x) const;
};

/// Throws NotDisplay when 𝔹 or 𝔹𝔹 of the generic type leaves the bound.
CoalgebraClassifier coalgebra_classifier(const ComonadPtr& w, int bound,
                                         const Ceiling& ceiling = {});
/// Hom((Γ, γ), Ob) ≅ Tp_{C□}(Γ, γ) for each coalgebra, naturally along
/// coalgebra maps between them.
Verdict classifier_externalization_check(const CoalgebraClassifier& cls,
                                         const std::vector<Coalgebra>& coalgebras,
                                         const Ceiling& ceiling = {});
/// Realignment over sub-coalgebra inclusions of the given coalgebras.
Verdict coalgebra_realignment_check(const CoalgebraClassifier& cls,
                                    const std::vector<Coalgebra>& coalgebras,
                                    const Ceiling& ceiling = {});

/// The comparison K(X) = (u*X, u*η_X) from presheaves on C to coalgebras:
/// every K(X) is a coalgebra, K is fully faithful on the bounded fragment,
/// and every coalgebra with values ≤ bound is isomorphic to some K(X).
Verdict comparison_check(const std::shared_ptr<const KanAdjunction>& adj, int bound,
                         const Ceiling& ceiling = {});
/// u* is faithful on maps between the given presheaves; otherwise a witness
/// pair of distinct maps with equal restrictions is reported.
Verdict faithfulness_check(const KanAdjunction& adj, const std::vector<PresheafPtr>& suite,
                           const Ceiling& ceiling = {});

}  // namespace s4sem
