#pragma once

// Finite Boolean algebras in atom form and their duality with finite sets.
//
// Every finite BA is stored as the powerset of its atoms: elements are atom
// subsets, top is the full set, meet is intersection. Homomorphisms are kept
// dually as maps between atom sets and act forward by preimage, so the
// homomorphism laws hold by construction.

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coalog {

using Subset = boost::dynamic_bitset<>;

Subset full_subset(std::size_t size);
Subset singleton(std::size_t size, std::size_t index);
/// Subset of {0..size-1} from the low bits of a mask.
Subset subset_from_mask(std::size_t size, std::uint64_t mask);
std::uint64_t subset_mask(const Subset& s);
std::vector<std::size_t> members(const Subset& s);

class FinSet {
public:
  FinSet() = default;
  explicit FinSet(std::size_t size) : size_(size) {}
  explicit FinSet(std::vector<std::string> labels);

  std::size_t size() const { return size_; }
  bool has_labels() const { return labels_ != nullptr; }
  /// Display label; unlabeled elements print as their index.
  std::string label(std::size_t i) const;
  std::optional<std::size_t> find(std::string_view label) const;

  friend bool operator==(const FinSet& a, const FinSet& b);

private:
  std::size_t size_ = 0;
  std::shared_ptr<const std::vector<std::string>> labels_;
};

class FinFn {
public:
  FinFn() = default;
  FinFn(FinSet dom, FinSet cod, std::vector<std::size_t> table);

  static FinFn identity(const FinSet& set);

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  const std::vector<std::size_t>& table() const { return table_; }
  std::size_t operator()(std::size_t x) const { return table_[x]; }

  bool injective() const;
  bool surjective() const;
  bool bijective() const { return injective() && surjective(); }
  /// Throws NotInvertible unless bijective.
  FinFn inverse() const;
  /// Preimage of a subset of the codomain.
  Subset preimage(const Subset& s) const;
  Subset image(const Subset& s) const;

  /// Tables and sizes; labels are ignored.
  friend bool operator==(const FinFn& a, const FinFn& b);

private:
  FinSet dom_;
  FinSet cod_;
  std::vector<std::size_t> table_;
};

/// g ∘ f
FinFn compose(const FinFn& g, const FinFn& f);

class FinBA {
public:
  /// The trivial one-element algebra (no atoms).
  FinBA() = default;
  explicit FinBA(FinSet atoms) : atoms_(std::move(atoms)) {}

  const FinSet& atoms() const { return atoms_; }
  std::size_t atom_count() const { return atoms_.size(); }
  /// 2^atoms, saturating.
  std::uint64_t element_count() const;

  Subset top() const { return full_subset(atoms_.size()); }
  Subset bottom() const { return Subset(atoms_.size()); }
  Subset atom(std::size_t i) const { return singleton(atoms_.size(), i); }
  /// Element with the given atom mask; requires at most 64 atoms.
  Subset element(std::uint64_t mask) const { return subset_from_mask(atoms_.size(), mask); }
  bool contains(const Subset& e) const { return e.size() == atoms_.size(); }

  std::string show(const Subset& e) const;

  /// Structural: atom counts only.
  friend bool operator==(const FinBA& a, const FinBA& b) { return a.atom_count() == b.atom_count(); }

private:
  FinSet atoms_;
};

class BAElem {
public:
  BAElem(FinBA algebra, Subset atoms);

  const FinBA& algebra() const { return algebra_; }
  const Subset& atoms() const { return atoms_; }

  BAElem operator&(const BAElem& o) const;
  BAElem operator|(const BAElem& o) const;
  BAElem operator~() const;
  bool leq(const BAElem& o) const;
  friend bool operator==(const BAElem& a, const BAElem& b);

private:
  FinBA algebra_;
  Subset atoms_;
};

class BAHom {
public:
  BAHom() = default;
  /// `dual` maps atoms(dst) to atoms(src).
  BAHom(FinBA src, FinBA dst, FinFn dual);

  static BAHom identity(const FinBA& a);
  /// Recovers the dual of a forward element table. `images[m]` is the image of
  /// the element with atom mask m. Throws InvariantViolation if the table is
  /// not a homomorphism.
  static BAHom from_forward(const FinBA& src, const FinBA& dst, std::span<const Subset> images);

  const FinBA& src() const { return src_; }
  const FinBA& dst() const { return dst_; }
  const FinFn& dual() const { return dual_; }

  Subset apply(const Subset& e) const { return dual_.preimage(e); }
  BAElem apply(const BAElem& e) const;

  bool injective() const { return dual_.surjective(); }
  bool surjective() const { return dual_.injective(); }
  bool bijective() const { return dual_.bijective(); }

  friend bool operator==(const BAHom& a, const BAHom& b) { return a.dual_ == b.dual_; }

private:
  FinBA src_;
  FinBA dst_;
  FinFn dual_;
};

/// g ∘ f as homomorphisms; the dual is f.dual ∘ g.dual.
BAHom compose(const BAHom& g, const BAHom& f);

FinBA powerset_algebra(const FinSet& x);
/// P(f) : P(cod f) -> P(dom f), acting by preimage.
BAHom powerset_map(const FinFn& f);
/// Ultrafilters of a finite BA are the principal filters at atoms.
FinSet spec(const FinBA& a);
FinFn spec_map(const BAHom& h);

/// ι_A : A -> P(S(A)), e ↦ {ultrafilters containing e}.
BAHom unit_iota(const FinBA& a);
/// ε_X : X -> S(P(X)), x ↦ principal ultrafilter at {x}.
FinFn counit_eps(const FinSet& x);

/// Atoms are the 2^|vars| valuations; bit i of an atom index is the value of vars[i].
FinBA free_ba(const std::vector<std::string>& vars);
Subset free_var(const std::vector<std::string>& vars, std::size_t i);

struct Coproduct {
  FinBA algebra;
  BAHom inj_a;
  BAHom inj_b;
};
/// Atoms are pairs; the pair (a, b) has index a * |atoms(B)| + b.
Coproduct ba_coproduct(const FinBA& a, const FinBA& b);

struct Quotient {
  FinBA algebra;
  BAHom surjection;
};
Quotient quotient_by(const FinBA& a, std::span<const std::pair<Subset, Subset>> pairs);

// Boolean terms over numbered generators, used to state defining equations
// of presented algebras.
class BoolTerm {
public:
  enum class Kind { Gen, Top, Bot, Not, And, Or };

  static BoolTerm gen(std::size_t i);
  static BoolTerm top();
  static BoolTerm bot();
  BoolTerm operator~() const;
  BoolTerm operator&(const BoolTerm& o) const;
  BoolTerm operator|(const BoolTerm& o) const;

  Kind kind() const;
  /// Largest generator index occurring, if any.
  std::optional<std::size_t> max_gen() const { return max_gen_; }
  bool eval(const Subset& valuation) const;
  /// Value in free_ba over `generators` generators, bit i ↔ generator i.
  Subset eval_free(std::size_t generators) const;

private:
  struct Node;
  explicit BoolTerm(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
  std::optional<std::size_t> max_gen_;
};

using BoolEquation = std::pair<BoolTerm, BoolTerm>;

struct PresentedBA {
  FinBA algebra;
  /// valuations[atom] is the generator valuation the atom stands for.
  std::vector<Subset> valuations;
  std::optional<std::size_t> find(const Subset& valuation) const;
};

/// Quotient of the free BA on `generators` generators by the congruence the
/// equations generate. Atoms are the satisfying valuations; they are found by
/// extending partial valuations one generator at a time and pruning every
/// equation as soon as its generators are assigned, so the free algebra is
/// never materialised. Atoms come out in increasing valuation order
/// (generator 0 least significant).
PresentedBA presented_ba(std::size_t generators, std::span<const BoolEquation> equations);

} // namespace coalog
