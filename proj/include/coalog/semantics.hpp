#pragma once

// One-step semantics, coalgebraic model checking, the finite check that the
// derived presentation presents the functor, and logical equivalence.

#include "coalog/gkpf.hpp"
#include "coalog/logic.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

namespace coalog {

/// Variable name -> subset of the set the variable ranges over.
using VarEnv = std::map<std::string, Subset>;
using Valuation = VarEnv;

/// Resolves a state-layer formula (a variable not in the env, or a nested
/// modal formula) to a subset of the states.
using LeafEval = std::function<Subset(const Formula&)>;

/// Denotation of `f` at `layer` as a subset of the layer's set over states
/// {0..x-1}. Boolean connectives are set operations at every layer;
///   Const 'c       {c}
///   [k1] t         left-injection image
///   [p1] t         S × B
///   box over Pow   {b | b ⊆ S}
///   box over Nbhd  {N | S ∈ N}
/// and Comp layers resolve their inner layer first.
Subset eval_layer(const FunctorExpr& t, const Layer& layer, std::size_t x, const Formula& f, const VarEnv& env,
                  const LeafEval& leaf);

/// δ at X = {0..x-1}: a one-step term whose state-layer arguments are all
/// variables bound in `env`, as a subset of T(X).
Subset one_step(const FunctorExpr& t, std::size_t x, const Formula& term, const VarEnv& env);

/// Whether the T-layer value `v` satisfies `f` at `layer`; state-layer
/// subformulas are answered by `leaf(formula, state)`.
using LeafHolds = std::function<bool(const Formula&, std::size_t)>;
bool holds(const FunctorExpr& t, const Layer& layer, std::size_t x, const Formula& f, const TValue& v,
           const LeafHolds& leaf);

/// Evaluates state formulas over one model, sharing work across common
/// subformulas (memoized by node identity).
class ModelChecker {
public:
  ModelChecker(const Coalgebra& c, const Valuation& h);

  const Subset& eval(const Formula& f);
  bool holds_at(const Formula& f, std::size_t x) { return eval(f).test(x); }

private:
  const Coalgebra& c_;
  const Valuation& h_;
  std::unordered_map<const void*, Subset> memo_;
  std::vector<Formula> keep_;  // pins memoized nodes
};

/// Typechecks, then evaluates. Throws ShapeError for a missing variable.
Subset model_check(const Coalgebra& c, const Valuation& h, const Formula& f);

/// x ∈ result iff T(χ)(ξ(x)) ∈ λ, with χ : X -> 2^n the tuple of the
/// characteristic maps of the argument denotations.
Subset model_check_lifting(const Coalgebra& c, const Valuation& h, const CanonicalLifting& lambda,
                           const std::vector<Formula>& args);

/// The algebra presented by the derived operators and axioms over P(X),
/// together with the dual of its evaluation into P(T X).
struct PresentedAlgebra {
  FinBA algebra;
  /// Dual of the evaluation hom T(X) -> atoms; absent when the evaluation
  /// violates an axiom (it is then not a homomorphism).
  std::optional<FinFn> dual;
  std::uint64_t target_atoms = 0;  // |T(X)|
  bool reduced = false;  // some layer used a reduced generator set
  std::string failure;

  bool iso() const { return dual && algebra.atom_count() == target_atoms && dual->bijective(); }
};

/// Child algebras with more than `full_limit` atoms (capped at 6) get a
/// basis of generators instead of one per element.
PresentedAlgebra presented_algebra(const FunctorExpr& t, std::size_t x, std::size_t full_limit = 6);

struct DeltaIsoReport {
  bool ok;
  std::string detail;
};
DeltaIsoReport check_delta_iso(const FunctorExpr& t, std::size_t x);

/// Partition of the states by the formulas they satisfy: blocks start from
/// the seed (or one block) and are refined by one-step formulas over the
/// current blocks until stable.
Partition logical_partition(const Coalgebra& c, const std::optional<Valuation>& seed = std::nullopt);

} // namespace coalog
