#pragma once

// Elements of T(X) as structured terms, and finite sets of such terms
// enumerated in a fixed canonical order.
//
// Canonical order (the index of a value in T(X)):
//   Id      the element index
//   Const   position of the name in the Const list
//   Sum     all left injections, then all right injections
//   Prod    lexicographic, first component major
//   Pow     a subset S of the base set has index sum_{s in S} 2^index(s)
//   Nbhd    a neighbourhood N has index sum_{S in N} 2^index_Pow(S)
//   Comp    the outer functor enumerated over the enumeration of the inner one
//
// For Comp(outer, inner) a value is an outer value whose leaves are inner
// values. Set-valued constructors keep their elements sorted and
// deduplicated, so structural equality is semantic equality.

#include "coalog/finstone.hpp"
#include "coalog/functor.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace coalog {

class TValue {
public:
  enum class Kind { Leaf, Const, InL, InR, Pair, Set, Nbhd };

  static TValue leaf(std::size_t index);
  static TValue constant(std::size_t index, std::string name);
  static TValue inl(TValue v);
  static TValue inr(TValue v);
  static TValue pair(TValue a, TValue b);
  static TValue set(std::vector<TValue> elements);
  static TValue nbhd(std::vector<std::vector<TValue>> neighbourhoods);

  Kind kind() const;
  std::size_t index() const;  // Leaf, Const
  const std::string& name() const;  // Const
  const TValue& child() const;  // InL, InR
  const TValue& first() const;  // Pair
  const TValue& second() const;  // Pair
  const std::vector<TValue>& elements() const;  // Set
  const std::vector<std::vector<TValue>>& neighbourhoods() const;  // Nbhd

  friend std::strong_ordering operator<=>(const TValue& a, const TValue& b);
  friend bool operator==(const TValue& a, const TValue& b) { return (a <=> b) == 0; }

private:
  struct Node;
  explicit TValue(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// A finite set whose elements are T-values: either a plain base set of
/// leaves, or F applied to another carrier. Cheap to copy.
class Carrier {
public:
  static Carrier base(std::uint64_t size);
  static Carrier apply(const FunctorExpr& f, const Carrier& inner);

  /// Saturating; UINT64_MAX means "too big to index".
  std::uint64_t size() const;
  TValue decode(std::uint64_t index) const;
  std::uint64_t encode(const TValue& v) const;
  /// Throws ShapeError unless v is a canonical element of this set.
  void validate(const TValue& v) const;
  TValue random(std::mt19937_64& rng, double density) const;
  /// All elements in canonical order; throws ResourceLimit when too many.
  std::vector<TValue> enumerate(const std::string& what) const;

private:
  struct Impl;
  explicit Carrier(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// |F(X)| for |X| = n, saturating.
std::uint64_t card(const FunctorExpr& f, std::uint64_t n);

/// F-values over `base` (the layer-level counterparts of Carrier members).
std::uint64_t encode_in(const FunctorExpr& f, const Carrier& base, const TValue& v);
TValue decode_in(const FunctorExpr& f, const Carrier& base, std::uint64_t index);
void validate_in(const FunctorExpr& f, const Carrier& base, const TValue& v);
TValue random_in(const FunctorExpr& f, const Carrier& base, std::mt19937_64& rng, double density);

/// Text form: leaves print as base labels, constants as 'c, injections as
/// inl(v)/inr(v), pairs as (v, w), sets as {v, ...}.
std::string show_value(const TValue& v, const FinSet& base);

/// Parses the text form against the shape of F over `base`; leaf names are
/// resolved through the base labels (or indices when unlabeled).
TValue parse_value(const FunctorExpr& f, const FinSet& base, std::string_view text);

} // namespace coalog
