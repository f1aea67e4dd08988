#pragma once

// The modal language of a functor: layer discipline for formulas, the
// derived signature and rank-1 axioms, soundness checking and canonical
// predicate liftings.
//
// A formula position sits at a layer: the stack of functor layers still to
// be crossed before the state layer is reached (back() is the current one;
// empty means the state layer). A modal operator at the state layer starts a
// fresh T-layer. Sum layers read [k1]/[k2], Prod layers [p1]/[p2], Pow and
// Nbhd layers box, Const layers the atoms 'c; Id layers are transparent and
// a Comp layer is its outer layer followed by its inner one. Boolean
// connectives are allowed at every layer.

#include "coalog/finstone.hpp"
#include "coalog/formula.hpp"
#include "coalog/functor.hpp"
#include "coalog/tvalue.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coalog {

using Layer = std::vector<FunctorExpr>;

/// Expands Comp and drops Id at the top until a real constructor (or the
/// state layer) is current.
Layer normalize(Layer layer);
std::string show_layer(const Layer& layer);
/// The set a layer ranges over when the states are {0..x-1}.
Carrier layer_carrier(const Layer& layer, std::size_t x);
/// Every normalized layer reachable from the state layer of T, state first.
std::vector<Layer> all_layers(const FunctorExpr& t);

using VarLayers = std::map<std::string, Layer>;

/// Throws ShapeError naming the offending operator and the expected layer.
/// Variables are only allowed at the state layer.
void typecheck(const FunctorExpr& t, const Formula& f);
bool typecheck_formula(const FunctorExpr& t, const Formula& f);
Formula parse_formula(const FunctorExpr& t, std::string_view text);
Sequent parse_sequent(const FunctorExpr& t, std::string_view text);

/// Open typechecking: variables may stand at any layer; their layers are
/// recorded in (and must agree with) `vars`.
void typecheck_at(const FunctorExpr& t, const Formula& f, const Layer& layer, VarLayers& vars);
/// Finds the first layer of T at which both sides typecheck together.
Layer typecheck_equation(const FunctorExpr& t, const Equation& e, VarLayers& vars);

/// Number of complete T-layers crossed; 0 for propositional formulas.
std::size_t modal_depth(const FunctorExpr& t, const Formula& f);

/// One constructor occurrence of T.
struct Occurrence {
  FunctorExpr node;  // Const, Sum, Prod, Pow or Nbhd
  std::vector<ModalOp> prefix;  // a representative operator path from the state layer
  Layer layer;  // layer at which this occurrence's operators are read

  /// "box.p1" style; empty at the top.
  std::string path() const;
  /// Argument layer of the i-th operator (Sum/Prod: 0 or 1; Pow/Nbhd: 0).
  Layer child(std::size_t i) const;
  std::vector<ModalOp> ops() const;
  /// One line per operator: "box [p1] _", "box [p1] 'a", ...
  std::vector<std::string> descriptors() const;
  /// Wraps a formula at this occurrence's layer in the prefix.
  Formula wrap(const Formula& f) const;
};

struct Signature {
  FunctorExpr functor;
  std::vector<Occurrence> occurrences;

  std::vector<std::string> operators() const;
};

Signature derive_signature(const FunctorExpr& t);

struct RankOneEquation {
  std::string name;
  std::size_t occurrence;
  Layer layer;
  Equation eq;
  VarLayers vars;
};

std::vector<RankOneEquation> derive_axioms(const FunctorExpr& t);
std::vector<RankOneEquation> derive_axioms(const Signature& sig);
/// Instantiates a scheme-level equation at an occurrence, inferring the
/// variable layers; throws ShapeError if it does not fit.
RankOneEquation rank_one_at(const Signature& sig, std::size_t occurrence, std::string name, Equation eq);
std::string show(const RankOneEquation& e);

struct SoundnessWitness {
  std::size_t base_size;
  std::map<std::string, Subset> assignment;  // over each variable's layer set
  TValue value;  // in exactly one side's denotation
  bool in_lhs;
  std::string describe(const FunctorExpr& t, const RankOneEquation& e) const;
};

/// Compares the one-step denotations of both sides over every base set of
/// size ≤ max_size and every assignment of the variables to subsets of
/// their layer sets.
std::optional<SoundnessWitness> check_soundness(const FunctorExpr& t, const RankOneEquation& e, std::size_t max_size);

/// An operator with formal arguments at the state layer, e.g. "box a",
/// "[k1] 'a", "box box a".
struct OperatorTerm {
  std::string descriptor;
  Formula term;
  std::vector<std::string> args;
};
/// One term per operator descriptor (duplicates removed), completing
/// non-state argument layers along a representative path.
std::vector<OperatorTerm> operator_terms(const FunctorExpr& t);

/// A subset of T(2^n). Element w of 2^n has bit i set iff argument i+1 holds.
struct CanonicalLifting {
  std::size_t arity;
  Subset extent;
};

CanonicalLifting operator_as_lifting(const FunctorExpr& t, const OperatorTerm& op);
/// 2^|T(2^n)|, saturating.
std::uint64_t lifting_count(const FunctorExpr& t, std::size_t n);
std::vector<CanonicalLifting> canonical_liftings(const FunctorExpr& t, std::size_t n);
/// Streams the liftings in order; stop by returning false.
void for_each_lifting(const FunctorExpr& t, std::size_t n, const std::function<bool(const CanonicalLifting&)>& f);

} // namespace coalog
