#pragma once

// Modal formulas: Boolean connectives over variables, constants 'c and the
// one-step operators [k1] [k2] [p1] [p2] box.
//
//   phi ::= true | false | ident | 'ident | ~phi | phi & phi | phi | phi
//         | phi -> phi | [k1] phi | [k2] phi | [p1] phi | [p2] phi | box phi
//
// Prefix operators bind tightest, then &, |, -> (right-associative).

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace coalog {

enum class ModalOp { K1, K2, P1, P2, Box };

std::string op_name(ModalOp op);  // "[k1]", ..., "box"
std::string op_path_name(ModalOp op);  // "k1", ..., "box"

class Formula {
public:
  enum class Kind { True, False, Var, Const, Not, And, Or, Imp, Modal };

  static Formula top();
  static Formula bot();
  static Formula var(std::string name);
  static Formula constant(std::string name);
  static Formula modal(ModalOp op, Formula arg);

  Formula operator~() const;
  Formula operator&(const Formula& o) const;
  Formula operator|(const Formula& o) const;
  Formula implies(const Formula& o) const;

  Kind kind() const;
  const std::string& name() const;  // Var, Const
  ModalOp op() const;  // Modal
  const Formula& arg() const;  // Not, Modal
  const Formula& left() const;  // And, Or, Imp
  const Formula& right() const;

  /// Node identity, stable while any copy is alive (for memo tables).
  const void* id() const { return node_.get(); }
  std::size_t size() const;

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Formula big_and(const std::vector<Formula>& fs);  // empty: true
Formula big_or(const std::vector<Formula>& fs);  // empty: false

std::string show(const Formula& f);
Formula parse_formula(std::string_view text);

/// Variables in order of first occurrence.
std::vector<std::string> variables(const Formula& f);

using Substitution = std::map<std::string, Formula>;
Formula substitute(const Formula& f, const Substitution& s);

/// φ ≲ ψ
struct Sequent {
  Formula lhs;
  Formula rhs;
};
/// `PHI <= PSI`, or a bare `PHI` meaning `true <= PHI`.
Sequent parse_sequent(std::string_view text);
std::string show(const Sequent& s);

struct Equation {
  Formula lhs;
  Formula rhs;
  friend bool operator==(const Equation&, const Equation&) = default;
};
std::string show(const Equation& e);
/// `PHI = PSI`
Equation parse_equation(std::string_view text);

} // namespace coalog
