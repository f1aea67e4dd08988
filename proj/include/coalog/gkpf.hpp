#pragma once

// Functor action on finite sets and maps, finite coalgebras, and
// behavioural equivalence by partition refinement.

#include "coalog/finstone.hpp"
#include "coalog/functor.hpp"
#include "coalog/tvalue.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace coalog {

/// T(X) as an enumerated set. Elements are indices in canonical order.
struct TSet {
  FinSet base;
  Carrier carrier;
  FinSet set;  // unlabeled; size = |T(X)|

  std::size_t size() const { return set.size(); }
  TValue value(std::size_t i) const { return carrier.decode(i); }
  std::size_t index(const TValue& v) const { return carrier.encode(v); }
  std::string label(std::size_t i) const { return show_value(value(i), base); }
};

/// Throws ResourceLimit when |T(X)| exceeds the bound.
TSet apply_obj(const FunctorExpr& t, const FinSet& x);

using LeafMap = std::function<TValue(const TValue&)>;

/// T(f) on a single value, where `f` acts on the Id-leaves of `v` (elements
/// of `dom`) and produces elements of `cod`. Only Nbhd layers enumerate.
TValue map_value(const FunctorExpr& t, const Carrier& dom, const Carrier& cod, const LeafMap& f, const TValue& v);
TValue map_value(const FunctorExpr& t, const FinFn& f, const TValue& v);

/// T(f) : T(dom f) -> T(cod f) as a table over the canonical enumerations.
FinFn apply_fn(const FunctorExpr& t, const FinFn& f);

class Coalgebra {
public:
  /// Validates every structure entry against T over the carrier.
  Coalgebra(FunctorExpr t, FinSet carrier, std::vector<TValue> structure);

  const FunctorExpr& functor() const { return functor_; }
  const FinSet& carrier() const { return carrier_; }
  std::size_t size() const { return carrier_.size(); }
  const std::vector<TValue>& structure() const { return structure_; }
  const TValue& operator()(std::size_t x) const { return structure_[x]; }
  Carrier base() const { return Carrier::base(carrier_.size()); }

private:
  FunctorExpr functor_;
  FinSet carrier_;
  std::vector<TValue> structure_;
};

/// Model-file text (functor, states, one transition line per state).
std::string show_coalgebra(const Coalgebra& c);

Coalgebra random_coalgebra(const FunctorExpr& t, std::size_t states, std::mt19937_64& rng, double density = 0.4);

class Partition {
public:
  Partition() = default;
  /// Renumbers keys into block ids by first occurrence.
  template <class Key>
  static Partition from_keys(FinSet carrier, const std::vector<Key>& keys);

  const FinSet& carrier() const { return carrier_; }
  std::size_t block_count() const { return count_; }
  std::size_t block(std::size_t x) const { return block_[x]; }
  const std::vector<std::size_t>& blocks() const { return block_; }
  bool same(std::size_t x, std::size_t y) const { return block_[x] == block_[y]; }
  std::vector<std::vector<std::size_t>> classes() const;
  /// Carrier -> blocks.
  FinFn quotient_map() const;

  /// Equality as equivalence relations (block ids are canonical, so this is
  /// equality of the id lists).
  friend bool operator==(const Partition& a, const Partition& b) { return a.block_ == b.block_; }

private:
  FinSet carrier_;
  std::vector<std::size_t> block_;
  std::size_t count_ = 0;
};

template <class Key>
Partition Partition::from_keys(FinSet carrier, const std::vector<Key>& keys) {
  Partition p;
  p.carrier_ = std::move(carrier);
  std::vector<Key> seen;
  for (const auto& k : keys) {
    std::size_t id = 0;
    while (id < seen.size() && !(seen[id] == k)) ++id;
    if (id == seen.size()) seen.push_back(k);
    p.block_.push_back(id);
  }
  p.count_ = seen.size();
  return p;
}

/// Same-block printing: one line per block, `{x, y}`.
std::string show_partition(const Partition& p);

struct CoproductCoalgebra {
  Coalgebra sum;
  FinFn in1;
  FinFn in2;
};
/// Carrier is the disjoint union; states are tagged m1:/m2:.
CoproductCoalgebra coproduct_coalgebra(const Coalgebra& c1, const Coalgebra& c2);

/// T f ∘ ξ = ξ' ∘ f. Throws ShapeError on functor or carrier mismatch.
bool is_morphism(const Coalgebra& src, const Coalgebra& dst, const FinFn& f);

struct BehaviouralQuotient {
  Partition partition;
  Coalgebra quotient;
  FinFn map;
};

/// Greatest fixpoint of π ↦ π ∧ ker(T(q_π) ∘ ξ), starting from one block.
BehaviouralQuotient behavioural_quotient(const Coalgebra& c);
Partition behavioural_partition(const Coalgebra& c);

} // namespace coalog
