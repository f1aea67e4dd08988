#include "coalog/functor.hpp"

#include "coalog/error.hpp"

#include <cctype>
#include <set>

namespace coalog {

struct FunctorExpr::Node {
  Kind kind;
  std::vector<std::string> names;
  std::vector<FunctorExpr> args;
};

FunctorExpr FunctorExpr::id() { return FunctorExpr(std::make_shared<const Node>(Node{Kind::Id, {}, {}})); }
FunctorExpr FunctorExpr::pow() { return FunctorExpr(std::make_shared<const Node>(Node{Kind::Pow, {}, {}})); }
FunctorExpr FunctorExpr::nbhd() { return FunctorExpr(std::make_shared<const Node>(Node{Kind::Nbhd, {}, {}})); }

FunctorExpr FunctorExpr::constant(std::vector<std::string> names) {
  if (names.empty()) throw ParseError("empty constant set");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw ParseError("duplicate constant name '" + n + "'");
  return FunctorExpr(std::make_shared<const Node>(Node{Kind::Const, std::move(names), {}}));
}

FunctorExpr FunctorExpr::sum(FunctorExpr l, FunctorExpr r) {
  return FunctorExpr(std::make_shared<const Node>(Node{Kind::Sum, {}, {std::move(l), std::move(r)}}));
}
FunctorExpr FunctorExpr::prod(FunctorExpr l, FunctorExpr r) {
  return FunctorExpr(std::make_shared<const Node>(Node{Kind::Prod, {}, {std::move(l), std::move(r)}}));
}
FunctorExpr FunctorExpr::comp(FunctorExpr outer, FunctorExpr inner) {
  return FunctorExpr(std::make_shared<const Node>(Node{Kind::Comp, {}, {std::move(outer), std::move(inner)}}));
}

FunctorExpr::Kind FunctorExpr::kind() const { return node_->kind; }
const std::vector<std::string>& FunctorExpr::names() const { return node_->names; }

std::optional<std::size_t> FunctorExpr::const_index(std::string_view name) const {
  for (std::size_t i = 0; i < node_->names.size(); ++i)
    if (node_->names[i] == name) return i;
  return std::nullopt;
}

const FunctorExpr& FunctorExpr::left() const { return node_->args.at(0); }
const FunctorExpr& FunctorExpr::right() const { return node_->args.at(1); }

bool FunctorExpr::contains(Kind k) const {
  if (node_->kind == k) return true;
  for (const auto& a : node_->args)
    if (a.contains(k)) return true;
  return false;
}

bool operator==(const FunctorExpr& a, const FunctorExpr& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->names == b.node_->names && a.node_->args == b.node_->args;
}

namespace {

int precedence(FunctorExpr::Kind k) {
  switch (k) {
  case FunctorExpr::Kind::Sum: return 1;
  case FunctorExpr::Kind::Prod: return 2;
  case FunctorExpr::Kind::Comp: return 3;
  default: return 4;
  }
}

void print(const FunctorExpr& e, int min_prec, std::string& out) {
  const int p = precedence(e.kind());
  const bool parens = p < min_prec;
  if (parens) out += "(";
  switch (e.kind()) {
  case FunctorExpr::Kind::Id: out += "Id"; break;
  case FunctorExpr::Kind::Pow: out += "Pow"; break;
  case FunctorExpr::Kind::Nbhd: out += "Nbhd"; break;
  case FunctorExpr::Kind::Const: {
    out += "Const{";
    for (std::size_t i = 0; i < e.names().size(); ++i) {
      if (i) out += ",";
      out += e.names()[i];
    }
    out += "}";
    break;
  }
  case FunctorExpr::Kind::Sum:
  case FunctorExpr::Kind::Prod:
  case FunctorExpr::Kind::Comp: {
    const char* op = e.kind() == FunctorExpr::Kind::Sum ? " + " : e.kind() == FunctorExpr::Kind::Prod ? " * " : " . ";
    print(e.left(), p, out);
    out += op;
    print(e.right(), p + 1, out);
    break;
  }
  }
  if (parens) out += ")";
}

class FunctorParser {
public:
  explicit FunctorParser(std::string_view text) : text_(text) {}

  FunctorExpr parse() {
    FunctorExpr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "' in functor", pos_);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  std::string name() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) throw ParseError("expected constant name", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  FunctorExpr parse_sum() {
    FunctorExpr e = parse_prod();
    while (eat('+')) e = FunctorExpr::sum(e, parse_prod());
    return e;
  }

  FunctorExpr parse_prod() {
    FunctorExpr e = parse_comp();
    while (eat('*')) e = FunctorExpr::prod(e, parse_comp());
    return e;
  }

  FunctorExpr parse_comp() {
    FunctorExpr e = parse_atom();
    while (eat('.')) e = FunctorExpr::comp(e, parse_atom());
    return e;
  }

  FunctorExpr parse_atom() {
    skip_ws();
    const std::size_t at = pos_;
    if (eat('(')) {
      FunctorExpr e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')' in functor", pos_);
      return e;
    }
    if (eat_word("Id")) return FunctorExpr::id();
    if (eat_word("Pow")) return FunctorExpr::pow();
    if (eat_word("Nbhd")) return FunctorExpr::nbhd();
    if (eat_word("Const")) {
      if (!eat('{')) throw ParseError("expected '{' after Const", pos_);
      std::vector<std::string> names;
      if (eat('}')) throw ParseError("empty constant set", at);
      do {
        names.push_back(name());
      } while (eat(','));
      if (!eat('}')) throw ParseError("expected '}' closing constant set", pos_);
      std::set<std::string> seen;
      for (const auto& n : names)
        if (!seen.insert(n).second) throw ParseError("duplicate constant name '" + n + "'", at);
      return FunctorExpr::constant(std::move(names));
    }
    if (pos_ >= text_.size()) throw ParseError("unexpected end of functor", pos_);
    throw ParseError("expected functor expression", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

std::string FunctorExpr::str() const {
  std::string out;
  print(*this, 0, out);
  return out;
}

FunctorExpr parse_functor(std::string_view text) { return FunctorParser(text).parse(); }

std::vector<FunctorExpr> covering_functors() {
  std::vector<FunctorExpr> out;
  for (const char* t : {"Id", "Const{a,b}", "Id + Id", "Const{a} * Id", "Pow", "Nbhd", "Pow . (Const{a,b} * Id)",
                        "Pow . Pow"})
    out.push_back(parse_functor(t));
  return out;
}

} // namespace coalog
