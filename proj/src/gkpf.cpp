#include "coalog/gkpf.hpp"

#include "coalog/error.hpp"

#include <algorithm>
#include <utility>

namespace coalog {

TSet apply_obj(const FunctorExpr& t, const FinSet& x) {
  Carrier c = Carrier::apply(t, Carrier::base(x.size()));
  check_card(c.size(), "T(X) for T = " + t.str());
  return TSet{x, c, FinSet(c.size())};
}

TValue map_value(const FunctorExpr& t, const Carrier& dom, const Carrier& cod, const LeafMap& f, const TValue& v) {
  switch (t.kind()) {
  case FunctorExpr::Kind::Id: return f(v);
  case FunctorExpr::Kind::Const: return v;
  case FunctorExpr::Kind::Sum:
    if (v.kind() == TValue::Kind::InL) return TValue::inl(map_value(t.left(), dom, cod, f, v.child()));
    if (v.kind() == TValue::Kind::InR) return TValue::inr(map_value(t.right(), dom, cod, f, v.child()));
    throw ShapeError("map_value: expected an injection");
  case FunctorExpr::Kind::Prod:
    if (v.kind() != TValue::Kind::Pair) throw ShapeError("map_value: expected a pair");
    return TValue::pair(map_value(t.left(), dom, cod, f, v.first()), map_value(t.right(), dom, cod, f, v.second()));
  case FunctorExpr::Kind::Comp: {
    LeafMap inner = [&](const TValue& x) { return map_value(t.inner(), dom, cod, f, x); };
    return map_value(t.outer(), Carrier::apply(t.inner(), dom), Carrier::apply(t.inner(), cod), inner, v);
  }
  case FunctorExpr::Kind::Pow: {
    if (v.kind() != TValue::Kind::Set) throw ShapeError("map_value: expected a set");
    std::vector<TValue> image;
    image.reserve(v.elements().size());
    for (const auto& x : v.elements()) image.push_back(f(x));
    return TValue::set(std::move(image));
  }
  case FunctorExpr::Kind::Nbhd: {
    if (v.kind() != TValue::Kind::Nbhd) throw ShapeError("map_value: expected a neighbourhood system");
    // H f (N) = { b ⊆ cod | f⁻¹(b) ∈ N }
    if (cod.size() > 20) throw ResourceLimit("Nbhd map over a large codomain", sat_pow2(cod.size()));
    const auto dom_elems = dom.enumerate("Nbhd map domain");
    std::vector<std::uint64_t> image_index;
    image_index.reserve(dom_elems.size());
    for (const auto& x : dom_elems) image_index.push_back(cod.encode(f(x)));
    const auto cod_elems = cod.enumerate("Nbhd map codomain");
    const std::uint64_t subsets = std::uint64_t{1} << cod_elems.size();
    check_card(subsets, "Nbhd map codomain subsets");
    std::vector<std::vector<TValue>> hoods;
    for (std::uint64_t b = 0; b < subsets; ++b) {
      std::vector<TValue> pre;
      for (std::size_t i = 0; i < dom_elems.size(); ++i)
        if ((b >> image_index[i]) & 1u) pre.push_back(dom_elems[i]);
      std::sort(pre.begin(), pre.end());
      if (std::binary_search(v.neighbourhoods().begin(), v.neighbourhoods().end(), pre)) {
        std::vector<TValue> bs;
        for (std::size_t j = 0; j < cod_elems.size(); ++j)
          if ((b >> j) & 1u) bs.push_back(cod_elems[j]);
        hoods.push_back(std::move(bs));
      }
    }
    return TValue::nbhd(std::move(hoods));
  }
  }
  throw InvariantViolation("map_value: unknown functor kind");
}

TValue map_value(const FunctorExpr& t, const FinFn& f, const TValue& v) {
  LeafMap leaf = [&](const TValue& x) {
    if (x.kind() != TValue::Kind::Leaf || x.index() >= f.dom().size()) throw ShapeError("map_value: leaf outside domain");
    return TValue::leaf(f(x.index()));
  };
  return map_value(t, Carrier::base(f.dom().size()), Carrier::base(f.cod().size()), leaf, v);
}

FinFn apply_fn(const FunctorExpr& t, const FinFn& f) {
  const TSet dom = apply_obj(t, f.dom());
  const TSet cod = apply_obj(t, f.cod());
  std::vector<std::size_t> table(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) table[i] = cod.index(map_value(t, f, dom.value(i)));
  return FinFn(dom.set, cod.set, std::move(table));
}

// ---------------------------------------------------------------- coalgebras

Coalgebra::Coalgebra(FunctorExpr t, FinSet carrier, std::vector<TValue> structure)
    : functor_(std::move(t)), carrier_(std::move(carrier)), structure_(std::move(structure)) {
  if (structure_.size() != carrier_.size()) throw InvariantViolation("coalgebra structure has the wrong length");
  const Carrier b = base();
  for (std::size_t x = 0; x < structure_.size(); ++x) {
    try {
      validate_in(functor_, b, structure_[x]);
    } catch (const ShapeError& e) {
      throw ShapeError("state " + carrier_.label(x) + ": " + e.what());
    }
  }
}

std::string show_coalgebra(const Coalgebra& c) {
  std::string out = "functor: " + c.functor().str() + "\nstates:";
  for (std::size_t x = 0; x < c.size(); ++x) out += " " + c.carrier().label(x);
  out += "\n";
  for (std::size_t x = 0; x < c.size(); ++x)
    out += c.carrier().label(x) + " -> " + show_value(c(x), c.carrier()) + "\n";
  return out;
}

Coalgebra random_coalgebra(const FunctorExpr& t, std::size_t states, std::mt19937_64& rng, double density) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < states; ++i) labels.push_back("x" + std::to_string(i));
  const Carrier b = Carrier::base(states);
  std::vector<TValue> xi;
  for (std::size_t i = 0; i < states; ++i) xi.push_back(random_in(t, b, rng, density));
  return Coalgebra(t, FinSet(std::move(labels)), std::move(xi));
}

std::vector<std::vector<std::size_t>> Partition::classes() const {
  std::vector<std::vector<std::size_t>> out(count_);
  for (std::size_t x = 0; x < block_.size(); ++x) out[block_[x]].push_back(x);
  return out;
}

FinFn Partition::quotient_map() const { return FinFn(carrier_, FinSet(count_), block_); }

std::string show_partition(const Partition& p) {
  std::string out;
  for (const auto& cls : p.classes()) {
    out += "{";
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i) out += ", ";
      out += p.carrier().label(cls[i]);
    }
    out += "}\n";
  }
  return out;
}

CoproductCoalgebra coproduct_coalgebra(const Coalgebra& c1, const Coalgebra& c2) {
  if (!(c1.functor() == c2.functor()))
    throw ShapeError("coproduct of coalgebras for different functors: " + c1.functor().str() + " vs " +
                     c2.functor().str());
  const std::size_t m = c1.size(), n = c2.size();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < m; ++i) labels.push_back("m1:" + c1.carrier().label(i));
  for (std::size_t i = 0; i < n; ++i) labels.push_back("m2:" + c2.carrier().label(i));
  FinSet sum(std::move(labels));
  std::vector<std::size_t> t1(m), t2(n);
  for (std::size_t i = 0; i < m; ++i) t1[i] = i;
  for (std::size_t i = 0; i < n; ++i) t2[i] = m + i;
  FinFn in1(c1.carrier(), sum, t1), in2(c2.carrier(), sum, t2);
  std::vector<TValue> xi;
  for (std::size_t i = 0; i < m; ++i) xi.push_back(map_value(c1.functor(), in1, c1(i)));
  for (std::size_t i = 0; i < n; ++i) xi.push_back(map_value(c2.functor(), in2, c2(i)));
  return {Coalgebra(c1.functor(), sum, std::move(xi)), in1, in2};
}

bool is_morphism(const Coalgebra& src, const Coalgebra& dst, const FinFn& f) {
  if (!(src.functor() == dst.functor())) throw ShapeError("is_morphism: functors differ");
  if (f.dom().size() != src.size() || f.cod().size() != dst.size())
    throw ShapeError("is_morphism: map does not go between the carriers");
  for (std::size_t x = 0; x < src.size(); ++x)
    if (!(map_value(src.functor(), f, src(x)) == dst(f(x)))) return false;
  return true;
}

BehaviouralQuotient behavioural_quotient(const Coalgebra& c) {
  const FunctorExpr& t = c.functor();
  Partition p = Partition::from_keys(c.carrier(), std::vector<int>(c.size(), 0));
  while (true) {
    const FinFn q = p.quotient_map();
    std::vector<std::pair<std::size_t, TValue>> keys;
    keys.reserve(c.size());
    for (std::size_t x = 0; x < c.size(); ++x) keys.emplace_back(p.block(x), map_value(t, q, c(x)));
    Partition next = Partition::from_keys(c.carrier(), keys);
    const bool stable = next.block_count() == p.block_count();
    p = std::move(next);
    if (stable) break;
  }
  const FinFn q = p.quotient_map();
  std::vector<std::string> labels;
  std::vector<TValue> xi;
  for (const auto& cls : p.classes()) {
    std::string l = "[";
    for (std::size_t i = 0; i < cls.size(); ++i) l += (i ? "," : "") + c.carrier().label(cls[i]);
    labels.push_back(l + "]");
    xi.push_back(map_value(t, q, c(cls.front())));
  }
  FinSet qs(std::move(labels));
  FinFn map(c.carrier(), qs, p.blocks());
  return {p, Coalgebra(t, qs, std::move(xi)), map};
}

Partition behavioural_partition(const Coalgebra& c) { return behavioural_quotient(c).partition; }

} // namespace coalog
