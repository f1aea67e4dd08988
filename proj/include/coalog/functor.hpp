#pragma once

// Generalised Kripke polynomial functors:
//   T ::= Id | Const{c1,...} | T + T | T * T | T . T | Pow | Nbhd
// with "." binding tighter than "*" and "*" tighter than "+", all
// left-associative. Nbhd is the double contravariant powerset 2^(2^-).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coalog {

class FunctorExpr {
public:
  enum class Kind { Id, Const, Sum, Prod, Comp, Pow, Nbhd };

  static FunctorExpr id();
  static FunctorExpr constant(std::vector<std::string> names);
  static FunctorExpr sum(FunctorExpr l, FunctorExpr r);
  static FunctorExpr prod(FunctorExpr l, FunctorExpr r);
  static FunctorExpr comp(FunctorExpr outer, FunctorExpr inner);
  static FunctorExpr pow();
  static FunctorExpr nbhd();

  Kind kind() const;
  /// Constant names (Const only).
  const std::vector<std::string>& names() const;
  std::optional<std::size_t> const_index(std::string_view name) const;
  /// Sum/Prod operands; for Comp, left() is the outer and right() the inner functor.
  const FunctorExpr& left() const;
  const FunctorExpr& right() const;
  const FunctorExpr& outer() const { return left(); }
  const FunctorExpr& inner() const { return right(); }

  bool contains(Kind k) const;
  std::string str() const;

  friend bool operator==(const FunctorExpr& a, const FunctorExpr& b);

private:
  struct Node;
  explicit FunctorExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

FunctorExpr parse_functor(std::string_view text);

/// The functors every verification suite runs over.
std::vector<FunctorExpr> covering_functors();

} // namespace coalog
