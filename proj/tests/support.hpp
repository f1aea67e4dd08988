#pragma once

// Shared generators for the property tests.

#include "coalog/semantics.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace coalog;

// All maps {0..m-1} -> {0..n-1} as value tables.
inline std::vector<std::vector<std::size_t>> all_tables(std::size_t m, std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  if (n == 0 && m > 0) return out;
  std::vector<std::size_t> t(m, 0);
  while (true) {
    out.push_back(t);
    std::size_t i = 0;
    while (i < m && ++t[i] == n) t[i++] = 0;
    if (i == m) break;
  }
  return out;
}

inline std::vector<FunctorExpr> covering_functors_with_extras() {
  auto out = covering_functors();
  for (const char* s : {"Const{a,b} + Id", "Id * Id", "Pow . (Id + Id)", "(Const{a} + Id) . Pow", "Nbhd . (Const{a} + Id)"})
    out.push_back(parse_functor(s));
  return out;
}

inline bool has_nbhd(const FunctorExpr& t) { return t.contains(FunctorExpr::Kind::Nbhd); }

// A well-formed state formula over `vars`, with at most `budget` nested
// T-layers.
class FormulaGen {
public:
  FormulaGen(FunctorExpr t, std::vector<std::string> vars, std::mt19937_64& rng)
      : t_(std::move(t)), vars_(std::move(vars)), rng_(rng) {}

  Formula state(int budget) { return at(Layer{}, budget, 3); }

  Formula at(Layer layer, int budget, int size) {
    layer = normalize(std::move(layer));
    if (size > 0 && pick(3) == 0) {
      switch (pick(4)) {
      case 0: return ~at(layer, budget, size - 1);
      case 1: return at(layer, budget, size - 1) & at(layer, budget, size - 1);
      case 2: return at(layer, budget, size - 1) | at(layer, budget, size - 1);
      default: return at(layer, budget, size - 1).implies(at(layer, budget, size - 1));
      }
    }
    if (layer.empty()) {
      const bool modal = budget > 0 && !normalize(Layer{t_}).empty() && pick(2) == 0;
      if (modal) return at(Layer{t_}, budget - 1, size);
      const auto k = pick(vars_.size() + 2);
      if (k == vars_.size()) return Formula::top();
      if (k == vars_.size() + 1) return Formula::bot();
      return Formula::var(vars_[k]);
    }
    const FunctorExpr top = layer.back();
    Layer rest = layer;
    rest.pop_back();
    auto with = [&](const FunctorExpr& f) {
      Layer l = rest;
      l.push_back(f);
      return l;
    };
    switch (top.kind()) {
    case FunctorExpr::Kind::Const: return Formula::constant(top.names()[pick(top.names().size())]);
    case FunctorExpr::Kind::Sum:
      if (pick(2) == 0) return Formula::modal(ModalOp::K1, at(with(top.left()), budget, size - 1));
      return Formula::modal(ModalOp::K2, at(with(top.right()), budget, size - 1));
    case FunctorExpr::Kind::Prod:
      if (pick(2) == 0) return Formula::modal(ModalOp::P1, at(with(top.left()), budget, size - 1));
      return Formula::modal(ModalOp::P2, at(with(top.right()), budget, size - 1));
    default: return Formula::modal(ModalOp::Box, at(rest, budget, size - 1));
    }
  }

private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  FunctorExpr t_;
  std::vector<std::string> vars_;
  std::mt19937_64& rng_;
};

inline Valuation random_valuation(std::size_t n, const std::vector<std::string>& vars, std::mt19937_64& rng) {
  Valuation h;
  for (const auto& v : vars) {
    Subset s(n);
    for (std::size_t x = 0; x < n; ++x)
      if (rng() & 1u) s.set(x);
    h[v] = s;
  }
  return h;
}

// Every coalgebra structure on {0..n-1}.
inline void for_each_coalgebra(const FunctorExpr& t, std::size_t n, const std::function<void(const Coalgebra&)>& f) {
  const FinSet x(n);
  const Carrier tx = Carrier::apply(t, Carrier::base(n));
  const auto values = tx.enumerate("test coalgebra values");
  for (const auto& table : all_tables(n, values.size())) {
    std::vector<TValue> xi;
    for (auto i : table) xi.push_back(values[i]);
    f(Coalgebra(t, x, xi));
  }
}

} // namespace testsupport
