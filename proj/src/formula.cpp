#include "coalog/formula.hpp"

#include "coalog/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace coalog {

std::string op_name(ModalOp op) {
  switch (op) {
  case ModalOp::K1: return "[k1]";
  case ModalOp::K2: return "[k2]";
  case ModalOp::P1: return "[p1]";
  case ModalOp::P2: return "[p2]";
  case ModalOp::Box: return "box";
  }
  return "?";
}

std::string op_path_name(ModalOp op) {
  switch (op) {
  case ModalOp::K1: return "k1";
  case ModalOp::K2: return "k2";
  case ModalOp::P1: return "p1";
  case ModalOp::P2: return "p2";
  case ModalOp::Box: return "box";
  }
  return "?";
}

struct Formula::Node {
  Kind kind;
  std::string name;
  ModalOp op = ModalOp::Box;
  std::vector<Formula> args;
  std::size_t size = 1;
};

namespace {
std::size_t sum_sizes(const std::vector<Formula>& xs) {
  std::size_t n = 1;
  for (const auto& x : xs) n += x.size();
  return n;
}
} // namespace

Formula Formula::top() {
  static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, ModalOp::Box, {}, 1}));
  return t;
}
Formula Formula::bot() {
  static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, ModalOp::Box, {}, 1}));
  return f;
}
Formula Formula::var(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Kind::Var, std::move(name), ModalOp::Box, {}, 1}));
}
Formula Formula::constant(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Kind::Const, std::move(name), ModalOp::Box, {}, 1}));
}
Formula Formula::modal(ModalOp op, Formula arg) {
  const std::size_t n = 1 + arg.size();
  return Formula(std::make_shared<const Node>(Node{Kind::Modal, {}, op, {std::move(arg)}, n}));
}
Formula Formula::operator~() const {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, ModalOp::Box, {*this}, 1 + size()}));
}
Formula Formula::operator&(const Formula& o) const {
  std::vector<Formula> a{*this, o};
  const auto n = sum_sizes(a);
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, ModalOp::Box, std::move(a), n}));
}
Formula Formula::operator|(const Formula& o) const {
  std::vector<Formula> a{*this, o};
  const auto n = sum_sizes(a);
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, ModalOp::Box, std::move(a), n}));
}
Formula Formula::implies(const Formula& o) const {
  std::vector<Formula> a{*this, o};
  const auto n = sum_sizes(a);
  return Formula(std::make_shared<const Node>(Node{Kind::Imp, {}, ModalOp::Box, std::move(a), n}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
ModalOp Formula::op() const { return node_->op; }
const Formula& Formula::arg() const { return node_->args.at(0); }
const Formula& Formula::left() const { return node_->args.at(0); }
const Formula& Formula::right() const { return node_->args.at(1); }
std::size_t Formula::size() const { return node_->size; }

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->op <=> b.node_->op; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->args.begin(), a.node_->args.end(), b.node_->args.begin(),
                                                b.node_->args.end());
}

Formula big_and(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = out & fs[i];
  return out;
}

Formula big_or(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::bot();
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = out | fs[i];
  return out;
}

// ---------------------------------------------------------------- printing

namespace {

int prec(Formula::Kind k) {
  switch (k) {
  case Formula::Kind::Imp: return 1;
  case Formula::Kind::Or: return 2;
  case Formula::Kind::And: return 3;
  case Formula::Kind::Not:
  case Formula::Kind::Modal: return 4;
  default: return 5;
  }
}

void print(const Formula& f, int min, std::string& out) {
  const bool parens = prec(f.kind()) < min;
  if (parens) out += "(";
  switch (f.kind()) {
  case Formula::Kind::True: out += "true"; break;
  case Formula::Kind::False: out += "false"; break;
  case Formula::Kind::Var: out += f.name(); break;
  case Formula::Kind::Const: out += "'" + f.name(); break;
  case Formula::Kind::Not:
    out += "~";
    print(f.arg(), 4, out);
    break;
  case Formula::Kind::Modal:
    out += op_name(f.op()) + " ";
    print(f.arg(), 4, out);
    break;
  case Formula::Kind::And:
    print(f.left(), 3, out);
    out += " & ";
    print(f.right(), 4, out);
    break;
  case Formula::Kind::Or:
    print(f.left(), 2, out);
    out += " | ";
    print(f.right(), 3, out);
    break;
  case Formula::Kind::Imp:
    print(f.left(), 2, out);
    out += " -> ";
    print(f.right(), 1, out);
    break;
  }
  if (parens) out += ")";
}

} // namespace

std::string show(const Formula& f) {
  std::string out;
  print(f, 0, out);
  return out;
}

std::string show(const Sequent& s) { return show(s.lhs) + " <= " + show(s.rhs); }
std::string show(const Equation& e) { return show(e.lhs) + " = " + show(e.rhs); }

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
public:
  explicit Parser(std::string_view t) : t_(t) {}

  Formula formula() { return imp(); }

  void ws() {
    while (p_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[p_]))) ++p_;
  }
  bool at_end() {
    ws();
    return p_ == t_.size();
  }
  bool eat(std::string_view s) {
    ws();
    if (t_.substr(p_, s.size()) != s) return false;
    p_ += s.size();
    return true;
  }
  std::size_t pos() const { return p_; }
  void finish() {
    if (!at_end()) throw ParseError("unexpected '" + std::string(1, t_[p_]) + "' in formula", p_);
  }

private:
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  bool peek_word(std::string_view w) {
    ws();
    if (t_.substr(p_, w.size()) != w) return false;
    const auto end = p_ + w.size();
    return end >= t_.size() || !ident_char(t_[end]);
  }

  std::string ident() {
    ws();
    const auto s = p_;
    if (p_ < t_.size() && (std::isalpha(static_cast<unsigned char>(t_[p_])) || t_[p_] == '_')) {
      ++p_;
      while (p_ < t_.size() && ident_char(t_[p_])) ++p_;
    }
    if (s == p_) {
      if (p_ >= t_.size()) throw ParseError("unexpected end of formula", p_);
      throw ParseError("unexpected '" + std::string(1, t_[p_]) + "' in formula", p_);
    }
    return std::string(t_.substr(s, p_ - s));
  }

  Formula imp() {
    Formula l = disj();
    // "->" but not part of "<=": a bare '-' is never valid
    if (eat("->")) return l.implies(imp());
    return l;
  }

  Formula disj() {
    Formula l = conj();
    while (eat("|")) l = l | conj();
    return l;
  }

  Formula conj() {
    Formula l = unary();
    while (eat("&")) l = l & unary();
    return l;
  }

  Formula unary() {
    ws();
    if (eat("~")) return ~unary();
    if (peek_word("box")) {
      p_ += 3;
      return Formula::modal(ModalOp::Box, unary());
    }
    const auto at = p_;
    if (eat("[")) {
      std::string w = ident();
      if (!eat("]")) throw ParseError("expected ']' after modal operator", p_);
      ModalOp op;
      if (w == "k1") op = ModalOp::K1;
      else if (w == "k2") op = ModalOp::K2;
      else if (w == "p1") op = ModalOp::P1;
      else if (w == "p2") op = ModalOp::P2;
      else throw ParseError("unknown modal operator [" + w + "]", at);
      return Formula::modal(op, unary());
    }
    return atom();
  }

  Formula atom() {
    ws();
    if (eat("(")) {
      Formula f = imp();
      if (!eat(")")) throw ParseError("expected ')' in formula", p_);
      return f;
    }
    if (eat("'")) return Formula::constant(ident());
    const auto at = p_;
    std::string w = ident();
    if (w == "true") return Formula::top();
    if (w == "false") return Formula::bot();
    if (w == "box") throw ParseError("'box' needs an argument", at);
    return Formula::var(std::move(w));
  }

  std::string_view t_;
  std::size_t p_ = 0;
};

} // namespace

Formula parse_formula(std::string_view text) {
  Parser p(text);
  Formula f = p.formula();
  p.finish();
  return f;
}

Sequent parse_sequent(std::string_view text) {
  Parser p(text);
  Formula a = p.formula();
  if (p.eat("<=")) {
    Formula b = p.formula();
    p.finish();
    return {a, b};
  }
  p.finish();
  return {Formula::top(), a};
}

Equation parse_equation(std::string_view text) {
  Parser p(text);
  Formula a = p.formula();
  if (!p.eat("=")) throw ParseError("expected '=' in equation", p.pos());
  Formula b = p.formula();
  p.finish();
  return {a, b};
}

// ---------------------------------------------------------------- utilities

namespace {
void collect_vars(const Formula& f, std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (f.kind()) {
  case Formula::Kind::Var:
    if (seen.insert(f.name()).second) out.push_back(f.name());
    return;
  case Formula::Kind::Not:
  case Formula::Kind::Modal: collect_vars(f.arg(), out, seen); return;
  case Formula::Kind::And:
  case Formula::Kind::Or:
  case Formula::Kind::Imp:
    collect_vars(f.left(), out, seen);
    collect_vars(f.right(), out, seen);
    return;
  default: return;
  }
}
} // namespace

std::vector<std::string> variables(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(f, out, seen);
  return out;
}

Formula substitute(const Formula& f, const Substitution& s) {
  switch (f.kind()) {
  case Formula::Kind::Var: {
    auto it = s.find(f.name());
    return it == s.end() ? f : it->second;
  }
  case Formula::Kind::Not: return ~substitute(f.arg(), s);
  case Formula::Kind::Modal: return Formula::modal(f.op(), substitute(f.arg(), s));
  case Formula::Kind::And: return substitute(f.left(), s) & substitute(f.right(), s);
  case Formula::Kind::Or: return substitute(f.left(), s) | substitute(f.right(), s);
  case Formula::Kind::Imp: return substitute(f.left(), s).implies(substitute(f.right(), s));
  default: return f;
  }
}

} // namespace coalog
