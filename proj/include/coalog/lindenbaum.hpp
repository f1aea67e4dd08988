#pragma once

// Finite stages of the free algebra of the logic over a variable set V,
// derivability by evaluation in a stage, equational derivations, and
// bounded countermodel search for global consequence.
//
// Z_0 = free_ba(V), Z_{n+1} = free_ba(V) ⊕ P(T(atoms Z_n)); an atom of
// Z_{n+1} is a pair (w, t) of a valuation and a T-value over the atoms of
// Z_n, indexed w * |T(atoms Z_n)| + t.

#include "coalog/semantics.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace coalog {

struct FreeStage {
  std::size_t index = 0;
  FinBA algebra;
  std::optional<BAHom> embedding;  // j : Z_{n-1} -> Z_n
  std::size_t valuations = 1;  // 2^|V|
  std::optional<Carrier> values;  // T(atoms Z_{n-1}), n > 0

  std::size_t valuation(std::size_t atom) const;
  TValue value(std::size_t atom) const;
};

class Lindenbaum {
public:
  Lindenbaum(FunctorExpr t, std::vector<std::string> vars);

  const FunctorExpr& functor() const { return t_; }
  const std::vector<std::string>& vars() const { return vars_; }

  /// Builds Z_0..Z_n as needed.
  const FreeStage& stage(std::size_t n);

  /// Denotation of a state formula in Z_n; ShapeError if it is deeper than n
  /// or mentions a variable outside V.
  Subset eval(std::size_t n, const Formula& f);

  /// A formula denoting exactly {atom} in Z_n.
  Formula atom_formula(std::size_t n, std::size_t atom);
  /// A formula denoting `e` in Z_n: the join of its atoms or the complement
  /// of the join of the others, whichever is smaller.
  Formula element_formula(std::size_t n, const Subset& e);

private:
  Subset var_set(std::size_t n, std::size_t var);
  Formula valuation_formula(std::size_t w) const;
  Formula value_formula(std::size_t n, const Layer& layer, const TValue& v);

  FunctorExpr t_;
  std::vector<std::string> vars_;
  std::vector<FreeStage> stages_;
};

FreeStage build_stage(const FunctorExpr& t, const std::vector<std::string>& vars, std::size_t n);
Subset eval_in_stage(Lindenbaum& z, std::size_t n, const Formula& f);

/// Equality of both sides in Z_n for n the larger modal depth.
bool decide_equation(const FunctorExpr& t, const std::vector<std::string>& vars, const Formula& lhs,
                     const Formula& rhs);
/// φ ≲ ψ as the equation φ ∧ ψ = φ.
bool decide_sequent(const FunctorExpr& t, const std::vector<std::string>& vars, const Sequent& s);

// ---------------------------------------------------------------- derivations

struct DerivationStep {
  enum class Rule { Axiom, Refl, Sym, Trans, Cong, Subst };
  std::size_t label = 0;
  Rule rule = Rule::Refl;
  std::string name;  // axiom name; operator for Cong
  std::vector<std::size_t> premises;  // step labels
  Substitution subst;
  std::optional<Formula> term;  // Refl
  std::optional<Equation> claim;  // optional stated conclusion
};

struct Derivation {
  std::vector<DerivationStep> steps;
};

/// One step per line; blank lines and '#' comments are skipped:
///   k: axiom NAME [with x := PHI, ...]
///   k: refl PHI
///   k: sym j
///   k: trans i j
///   k: cong OP (i1, ..., im)      OP is box, [k1], [k2], [p1], [p2], ~, &, |, ->
///   k: subst j with x := PHI, ...
/// each optionally followed by `: LHS = RHS`, the conclusion it must reach.
Derivation parse_derivation(std::string_view text);

/// The Boolean axioms, over x, y, z, by name.
const std::map<std::string, Equation>& boolean_axioms();

struct DerivationResult {
  bool ok = true;
  std::size_t failed_step = 0;  // label of the first invalid step
  std::string reason;
  std::vector<Equation> conclusions;  // one per step checked
};

DerivationResult check_derivation(const FunctorExpr& t, const Derivation& d);

// ---------------------------------------------------------------- countermodels

struct Countermodel {
  Coalgebra model;
  Valuation valuation;
  std::size_t state;
};

/// First model (by size, then structure table, then valuation codes) that
/// globally satisfies every assumption and refutes the goal at some state;
/// the witness is the least refuting state. With `prune`, only valuations
/// whose per-state codes are nondecreasing are tried (every model is
/// isomorphic to one of those).
std::optional<Countermodel> countermodel_search(const FunctorExpr& t, const std::vector<Sequent>& assumptions,
                                                const Sequent& goal, std::size_t max_size,
                                                const std::vector<std::string>& vars, bool prune = true);

} // namespace coalog
