#pragma once

// The logic functor L_T = P T S on finite Boolean algebras, the transpose
// δ* : T S -> S L and its inverse h, complex algebras of coalgebras, and the
// Jónsson-Tarski coalgebra on the ultrafilters of an L-algebra.

#include "coalog/semantics.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace coalog {

/// P(T(S A)); atom t is the index of a T-value over the atoms of A.
FinBA l_on_ba(const FunctorExpr& t, const FinBA& a);
/// L f, dually T(S f).
BAHom l_on_hom(const FunctorExpr& t, const BAHom& f);

/// δ_X : L P X -> P T X, the hom with dual T(ε_X).
BAHom delta_hom(const FunctorExpr& t, const FinSet& x);

/// T S A -> S L A as the chain ε_{TSA}, then S δ_{SA}, then S L ι_A.
FinFn delta_star(const FunctorExpr& t, const FinBA& a);
/// S L A -> T S A, the chain of inverses. Throws NotInvertible if a link
/// of the chain is not a bijection.
FinFn h_generic(const FunctorExpr& t, const FinBA& a);

struct TransposeData {
  FinFn delta_star;
  FinFn h;
};
/// Both directions; throws InvariantViolation unless they are inverse.
TransposeData transpose_data(const FunctorExpr& t, const FinBA& a);

/// v ↦ {u ∈ S A | □a ∈ v ⇒ u ∈ a for all a}, as a Pow value.
FinFn h_explicit_pow(const FinBA& a);
/// v ↦ {a ⊆ S A | □a ∈ v}, as a Nbhd value.
FinFn h_explicit_nbhd(const FinBA& a);

class LAlgebra {
public:
  /// Throws InvariantViolation unless alpha : l_on_ba(t, a) -> a.
  LAlgebra(FunctorExpr t, FinBA a, BAHom alpha);

  /// From the dual of alpha, a function S A -> T(S A).
  static LAlgebra from_dual(FunctorExpr t, FinBA a, const std::vector<TValue>& dual);
  /// From a forward table indexed by element mask of L A; a table that is
  /// not a homomorphism is rejected with InvariantViolation.
  static LAlgebra from_forward(FunctorExpr t, FinBA a, const std::vector<Subset>& images);

  const FunctorExpr& functor() const { return t_; }
  const FinBA& carrier() const { return a_; }
  const BAHom& alpha() const { return alpha_; }
  /// |T(S A)|, the atom count of L A.
  std::size_t l_atoms() const { return alpha_.src().atom_count(); }
  /// Value of alpha's dual at an atom of A.
  TValue dual_value(std::size_t atom) const;

  /// α applied to the denotation in L A of a one-step term whose variables
  /// are bound to elements of A.
  Subset op(const Formula& term, const std::map<std::string, Subset>& env) const;

private:
  FunctorExpr t_;
  FinBA a_;
  BAHom alpha_;
};

LAlgebra random_lalgebra(const FunctorExpr& t, std::size_t atoms, std::mt19937_64& rng, double density = 0.4);
/// Every L-algebra on the algebra with `atoms` atoms, in order of the dual
/// tables (atom 0 slowest). The callback returns false to stop.
void for_each_lalgebra(const FunctorExpr& t, std::size_t atoms, const std::function<bool(const LAlgebra&)>& f);

/// (P X, P ξ ∘ δ_X).
LAlgebra complex_algebra(const Coalgebra& c);

/// Coalgebra on S A with ξ = h_A ∘ S α.
Coalgebra jt_coalgebra(const LAlgebra& alg);

/// Successor sets of the T = Pow Jónsson-Tarski frame through h_explicit_pow.
std::vector<Subset> r_box(const LAlgebra& alg);
/// x R y iff y ∈ a whenever x ∈ α(□a), by enumeration of A.
std::vector<Subset> r_box_by_filters(const LAlgebra& alg);

struct JtReport {
  bool ok = true;
  bool all_elements = false;  // every element of L A was checked, not only atoms
  std::optional<Subset> witness;  // first offending element of L A
  std::string reason;
};

/// ι_A ∘ α = P ξ_jt ∘ δ_{SA} ∘ L ι_A pointwise, and ι_A bijective. Both sides
/// are homomorphisms, so agreement on atoms decides it; all elements are
/// checked as well when L A has at most `element_limit` atoms.
JtReport verify_jt_embedding(const LAlgebra& alg, std::size_t element_limit = 12);

/// jt_coalgebra(complex_algebra(c)) and c related by ε_X both ways.
bool round_trip(const Coalgebra& c);

} // namespace coalog
