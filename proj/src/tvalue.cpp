#include "coalog/tvalue.hpp"

#include "coalog/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>

namespace coalog {

// ---------------------------------------------------------------- TValue

struct TValue::Node {
  Kind kind;
  std::size_t index = 0;
  std::string name;
  std::vector<TValue> children;
  std::vector<std::vector<TValue>> hoods;
};

namespace {
void canonicalize(std::vector<TValue>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}
} // namespace

TValue TValue::leaf(std::size_t index) { return TValue(std::make_shared<const Node>(Node{Kind::Leaf, index, {}, {}, {}})); }

TValue TValue::constant(std::size_t index, std::string name) {
  return TValue(std::make_shared<const Node>(Node{Kind::Const, index, std::move(name), {}, {}}));
}

TValue TValue::inl(TValue v) { return TValue(std::make_shared<const Node>(Node{Kind::InL, 0, {}, {std::move(v)}, {}})); }
TValue TValue::inr(TValue v) { return TValue(std::make_shared<const Node>(Node{Kind::InR, 0, {}, {std::move(v)}, {}})); }

TValue TValue::pair(TValue a, TValue b) {
  return TValue(std::make_shared<const Node>(Node{Kind::Pair, 0, {}, {std::move(a), std::move(b)}, {}}));
}

TValue TValue::set(std::vector<TValue> elements) {
  canonicalize(elements);
  return TValue(std::make_shared<const Node>(Node{Kind::Set, 0, {}, std::move(elements), {}}));
}

TValue TValue::nbhd(std::vector<std::vector<TValue>> hoods) {
  for (auto& h : hoods) canonicalize(h);
  std::sort(hoods.begin(), hoods.end());
  hoods.erase(std::unique(hoods.begin(), hoods.end()), hoods.end());
  return TValue(std::make_shared<const Node>(Node{Kind::Nbhd, 0, {}, {}, std::move(hoods)}));
}

TValue::Kind TValue::kind() const { return node_->kind; }
std::size_t TValue::index() const { return node_->index; }
const std::string& TValue::name() const { return node_->name; }
const TValue& TValue::child() const { return node_->children.at(0); }
const TValue& TValue::first() const { return node_->children.at(0); }
const TValue& TValue::second() const { return node_->children.at(1); }
const std::vector<TValue>& TValue::elements() const { return node_->children; }
const std::vector<std::vector<TValue>>& TValue::neighbourhoods() const { return node_->hoods; }

std::strong_ordering operator<=>(const TValue& a, const TValue& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  switch (a.node_->kind) {
  case TValue::Kind::Leaf:
  case TValue::Kind::Const: return a.node_->index <=> b.node_->index;
  case TValue::Kind::Nbhd:
    return std::lexicographical_compare_three_way(a.node_->hoods.begin(), a.node_->hoods.end(),
                                                  b.node_->hoods.begin(), b.node_->hoods.end(),
                                                  [](const auto& x, const auto& y) {
                                                    return std::lexicographical_compare_three_way(
                                                        x.begin(), x.end(), y.begin(), y.end());
                                                  });
  default:
    return std::lexicographical_compare_three_way(a.node_->children.begin(), a.node_->children.end(),
                                                  b.node_->children.begin(), b.node_->children.end());
  }
}

// ---------------------------------------------------------------- Carrier

struct Carrier::Impl {
  std::uint64_t size;
  std::optional<FunctorExpr> functor;
  std::shared_ptr<const Impl> inner;
};

Carrier Carrier::base(std::uint64_t size) { return Carrier(std::make_shared<const Impl>(Impl{size, std::nullopt, nullptr})); }

Carrier Carrier::apply(const FunctorExpr& f, const Carrier& inner) {
  if (f.kind() == FunctorExpr::Kind::Id) return inner;
  return Carrier(std::make_shared<const Impl>(Impl{card(f, inner.size()), f, inner.impl_}));
}

std::uint64_t Carrier::size() const { return impl_->size; }

TValue Carrier::decode(std::uint64_t index) const {
  if (index >= impl_->size) throw InvariantViolation("Carrier::decode: index out of range");
  if (!impl_->functor) return TValue::leaf(index);
  return decode_in(*impl_->functor, Carrier(impl_->inner), index);
}

std::uint64_t Carrier::encode(const TValue& v) const {
  if (!impl_->functor) {
    if (v.kind() != TValue::Kind::Leaf || v.index() >= impl_->size)
      throw ShapeError("value is not an element of the base set");
    return v.index();
  }
  return encode_in(*impl_->functor, Carrier(impl_->inner), v);
}

void Carrier::validate(const TValue& v) const {
  if (!impl_->functor) {
    if (v.kind() != TValue::Kind::Leaf) throw ShapeError("expected a state/base element");
    if (v.index() >= impl_->size) throw ShapeError("base element index out of range");
    return;
  }
  validate_in(*impl_->functor, Carrier(impl_->inner), v);
}

TValue Carrier::random(std::mt19937_64& rng, double density) const {
  if (!impl_->functor) {
    if (impl_->size == 0) throw InvariantViolation("Carrier::random: empty set");
    return TValue::leaf(std::uniform_int_distribution<std::uint64_t>(0, impl_->size - 1)(rng));
  }
  return random_in(*impl_->functor, Carrier(impl_->inner), rng, density);
}

std::vector<TValue> Carrier::enumerate(const std::string& what) const {
  check_card(impl_->size, what);
  std::vector<TValue> out;
  out.reserve(impl_->size);
  for (std::uint64_t i = 0; i < impl_->size; ++i) out.push_back(decode(i));
  return out;
}

// ---------------------------------------------------------------- arithmetic

std::uint64_t card(const FunctorExpr& f, std::uint64_t n) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return n;
  case FunctorExpr::Kind::Const: return f.names().size();
  case FunctorExpr::Kind::Sum: return sat_add(card(f.left(), n), card(f.right(), n));
  case FunctorExpr::Kind::Prod: return sat_mul(card(f.left(), n), card(f.right(), n));
  case FunctorExpr::Kind::Comp: return card(f.outer(), card(f.inner(), n));
  case FunctorExpr::Kind::Pow: return sat_pow2(n);
  case FunctorExpr::Kind::Nbhd: return sat_pow2(sat_pow2(n));
  }
  return 0;
}

namespace {

void need_kind(const TValue& v, TValue::Kind k, const char* what) {
  if (v.kind() != k) throw ShapeError(std::string("expected ") + what);
}

std::uint64_t subset_code(const Carrier& base, const std::vector<TValue>& xs) {
  if (base.size() > 63) throw ResourceLimit("subset index over a large base", sat_pow2(base.size()));
  std::uint64_t m = 0;
  for (const auto& x : xs) m |= std::uint64_t{1} << base.encode(x);
  return m;
}

std::vector<TValue> subset_decode(const Carrier& base, std::uint64_t mask) {
  std::vector<TValue> out;
  for (std::uint64_t i = 0; i < base.size() && i < 64; ++i)
    if ((mask >> i) & 1u) out.push_back(base.decode(i));
  return out;
}

} // namespace

std::uint64_t encode_in(const FunctorExpr& f, const Carrier& base, const TValue& v) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return base.encode(v);
  case FunctorExpr::Kind::Const:
    need_kind(v, TValue::Kind::Const, "a constant");
    return v.index();
  case FunctorExpr::Kind::Sum:
    if (v.kind() == TValue::Kind::InL) return encode_in(f.left(), base, v.child());
    need_kind(v, TValue::Kind::InR, "inl(...) or inr(...)");
    return sat_add(card(f.left(), base.size()), encode_in(f.right(), base, v.child()));
  case FunctorExpr::Kind::Prod:
    need_kind(v, TValue::Kind::Pair, "a pair");
    return sat_add(sat_mul(encode_in(f.left(), base, v.first()), card(f.right(), base.size())),
                   encode_in(f.right(), base, v.second()));
  case FunctorExpr::Kind::Comp: return encode_in(f.outer(), Carrier::apply(f.inner(), base), v);
  case FunctorExpr::Kind::Pow:
    need_kind(v, TValue::Kind::Set, "a set");
    return subset_code(base, v.elements());
  case FunctorExpr::Kind::Nbhd: {
    need_kind(v, TValue::Kind::Nbhd, "a set of subsets");
    if (base.size() > 6) throw ResourceLimit("neighbourhood index over a large base", card(f, base.size()));
    std::uint64_t m = 0;
    for (const auto& s : v.neighbourhoods()) m |= std::uint64_t{1} << subset_code(base, s);
    return m;
  }
  }
  return 0;
}

TValue decode_in(const FunctorExpr& f, const Carrier& base, std::uint64_t index) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return base.decode(index);
  case FunctorExpr::Kind::Const: return TValue::constant(index, f.names().at(index));
  case FunctorExpr::Kind::Sum: {
    const auto nl = card(f.left(), base.size());
    if (index < nl) return TValue::inl(decode_in(f.left(), base, index));
    return TValue::inr(decode_in(f.right(), base, index - nl));
  }
  case FunctorExpr::Kind::Prod: {
    const auto nr = card(f.right(), base.size());
    return TValue::pair(decode_in(f.left(), base, index / nr), decode_in(f.right(), base, index % nr));
  }
  case FunctorExpr::Kind::Comp: return decode_in(f.outer(), Carrier::apply(f.inner(), base), index);
  case FunctorExpr::Kind::Pow: return TValue::set(subset_decode(base, index));
  case FunctorExpr::Kind::Nbhd: {
    std::vector<std::vector<TValue>> hoods;
    const std::uint64_t subsets = sat_pow2(base.size());
    for (std::uint64_t s = 0; s < subsets && s < 64; ++s)
      if ((index >> s) & 1u) hoods.push_back(subset_decode(base, s));
    return TValue::nbhd(std::move(hoods));
  }
  }
  throw InvariantViolation("decode_in: unknown functor kind");
}

void validate_in(const FunctorExpr& f, const Carrier& base, const TValue& v) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: base.validate(v); return;
  case FunctorExpr::Kind::Const:
    need_kind(v, TValue::Kind::Const, "a constant");
    if (v.index() >= f.names().size() || f.names()[v.index()] != v.name())
      throw ShapeError("constant '" + v.name() + "' does not belong to " + f.str());
    return;
  case FunctorExpr::Kind::Sum:
    if (v.kind() == TValue::Kind::InL) return validate_in(f.left(), base, v.child());
    if (v.kind() == TValue::Kind::InR) return validate_in(f.right(), base, v.child());
    throw ShapeError("expected inl(...) or inr(...) for " + f.str());
  case FunctorExpr::Kind::Prod:
    need_kind(v, TValue::Kind::Pair, "a pair");
    validate_in(f.left(), base, v.first());
    validate_in(f.right(), base, v.second());
    return;
  case FunctorExpr::Kind::Comp: validate_in(f.outer(), Carrier::apply(f.inner(), base), v); return;
  case FunctorExpr::Kind::Pow:
    need_kind(v, TValue::Kind::Set, "a set");
    for (const auto& x : v.elements()) base.validate(x);
    return;
  case FunctorExpr::Kind::Nbhd:
    need_kind(v, TValue::Kind::Nbhd, "a set of subsets");
    for (const auto& s : v.neighbourhoods())
      for (const auto& x : s) base.validate(x);
    return;
  }
}

TValue random_in(const FunctorExpr& f, const Carrier& base, std::mt19937_64& rng, double density) {
  std::bernoulli_distribution coin(0.5), keep(density);
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return base.random(rng, density);
  case FunctorExpr::Kind::Const: {
    const auto i = std::uniform_int_distribution<std::size_t>(0, f.names().size() - 1)(rng);
    return TValue::constant(i, f.names()[i]);
  }
  case FunctorExpr::Kind::Sum:
    return coin(rng) ? TValue::inl(random_in(f.left(), base, rng, density))
                     : TValue::inr(random_in(f.right(), base, rng, density));
  case FunctorExpr::Kind::Prod:
    return TValue::pair(random_in(f.left(), base, rng, density), random_in(f.right(), base, rng, density));
  case FunctorExpr::Kind::Comp: return random_in(f.outer(), Carrier::apply(f.inner(), base), rng, density);
  case FunctorExpr::Kind::Pow: {
    std::vector<TValue> xs;
    if (base.size() <= 4096) {
      for (std::uint64_t i = 0; i < base.size(); ++i)
        if (keep(rng)) xs.push_back(base.decode(i));
    } else {
      for (int k = 0; k < 8; ++k) xs.push_back(base.random(rng, density));
    }
    return TValue::set(std::move(xs));
  }
  case FunctorExpr::Kind::Nbhd: {
    std::vector<std::vector<TValue>> hoods;
    if (base.size() <= 12) {
      const auto elems = base.enumerate("neighbourhood base");
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << elems.size()); ++m) {
        if (!keep(rng)) continue;
        std::vector<TValue> s;
        for (std::size_t i = 0; i < elems.size(); ++i)
          if ((m >> i) & 1u) s.push_back(elems[i]);
        hoods.push_back(std::move(s));
      }
    } else {
      for (int k = 0; k < 8; ++k) {
        std::vector<TValue> s;
        for (int j = 0; j < 4; ++j)
          if (keep(rng)) s.push_back(base.random(rng, density));
        hoods.push_back(std::move(s));
      }
    }
    return TValue::nbhd(std::move(hoods));
  }
  }
  throw InvariantViolation("random_in: unknown functor kind");
}

// ---------------------------------------------------------------- text form

namespace {

void show(const TValue& v, const FinSet& base, std::string& out) {
  auto list = [&](const std::vector<TValue>& xs) {
    out += "{";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      show(xs[i], base, out);
    }
    out += "}";
  };
  switch (v.kind()) {
  case TValue::Kind::Leaf: out += base.label(v.index()); break;
  case TValue::Kind::Const: out += "'" + v.name(); break;
  case TValue::Kind::InL:
  case TValue::Kind::InR:
    out += v.kind() == TValue::Kind::InL ? "inl(" : "inr(";
    show(v.child(), base, out);
    out += ")";
    break;
  case TValue::Kind::Pair:
    out += "(";
    show(v.first(), base, out);
    out += ", ";
    show(v.second(), base, out);
    out += ")";
    break;
  case TValue::Kind::Set: list(v.elements()); break;
  case TValue::Kind::Nbhd:
    out += "{";
    for (std::size_t i = 0; i < v.neighbourhoods().size(); ++i) {
      if (i) out += ", ";
      list(v.neighbourhoods()[i]);
    }
    out += "}";
    break;
  }
}

// Untyped syntax of value text; typed against a functor afterwards.
struct Syn {
  enum class Kind { Name, Quote, Inl, Inr, Tuple, Set } kind;
  std::string text;
  std::vector<Syn> items;
  std::size_t pos;
};

class ValueParser {
public:
  explicit ValueParser(std::string_view t) : t_(t) {}

  Syn parse() {
    Syn s = value();
    ws();
    if (p_ != t_.size()) throw ParseError("trailing input in value", p_);
    return s;
  }

private:
  void ws() {
    while (p_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[p_]))) ++p_;
  }
  bool eat(char c) {
    ws();
    if (p_ < t_.size() && t_[p_] == c) return ++p_, true;
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw ParseError(std::string("expected '") + c + "' in value", p_);
  }
  std::string ident() {
    ws();
    const auto s = p_;
    while (p_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[p_])) || t_[p_] == '_')) ++p_;
    if (s == p_) throw ParseError("expected a name in value", p_);
    return std::string(t_.substr(s, p_ - s));
  }

  Syn value() {
    ws();
    const auto at = p_;
    if (eat('\'')) return {Syn::Kind::Quote, ident(), {}, at};
    if (eat('(')) {
      Syn a = value();
      expect(',');
      Syn b = value();
      expect(')');
      return {Syn::Kind::Tuple, {}, {std::move(a), std::move(b)}, at};
    }
    if (eat('{')) {
      Syn s{Syn::Kind::Set, {}, {}, at};
      if (eat('}')) return s;
      do {
        s.items.push_back(value());
      } while (eat(','));
      expect('}');
      return s;
    }
    std::string name = ident();
    ws();
    if ((name == "inl" || name == "inr") && p_ < t_.size() && t_[p_] == '(') {
      ++p_;
      Syn inner = value();
      expect(')');
      return {name == "inl" ? Syn::Kind::Inl : Syn::Kind::Inr, {}, {std::move(inner)}, at};
    }
    return {Syn::Kind::Name, std::move(name), {}, at};
  }

  std::string_view t_;
  std::size_t p_ = 0;
};

using LeafConv = std::function<TValue(const Syn&)>;

TValue convert(const FunctorExpr& f, const Syn& s, const LeafConv& leaf) {
  auto fail = [&](const std::string& what) {
    return ShapeError("value at position " + std::to_string(s.pos) + ": expected " + what + " for " + f.str());
  };
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return leaf(s);
  case FunctorExpr::Kind::Const: {
    if (s.kind != Syn::Kind::Quote) throw fail("a constant 'c");
    auto i = f.const_index(s.text);
    if (!i) throw fail("one of its constants (got '" + s.text + ")");
    return TValue::constant(*i, s.text);
  }
  case FunctorExpr::Kind::Sum:
    if (s.kind == Syn::Kind::Inl) return TValue::inl(convert(f.left(), s.items[0], leaf));
    if (s.kind == Syn::Kind::Inr) return TValue::inr(convert(f.right(), s.items[0], leaf));
    throw fail("inl(...) or inr(...)");
  case FunctorExpr::Kind::Prod:
    if (s.kind != Syn::Kind::Tuple) throw fail("a pair (v, w)");
    return TValue::pair(convert(f.left(), s.items[0], leaf), convert(f.right(), s.items[1], leaf));
  case FunctorExpr::Kind::Comp: {
    LeafConv inner = [&](const Syn& x) { return convert(f.inner(), x, leaf); };
    return convert(f.outer(), s, inner);
  }
  case FunctorExpr::Kind::Pow: {
    if (s.kind != Syn::Kind::Set) throw fail("a set {v, ...}");
    std::vector<TValue> xs;
    for (const auto& it : s.items) xs.push_back(leaf(it));
    return TValue::set(std::move(xs));
  }
  case FunctorExpr::Kind::Nbhd: {
    if (s.kind != Syn::Kind::Set) throw fail("a set of subsets {{...}, ...}");
    std::vector<std::vector<TValue>> hoods;
    for (const auto& it : s.items) {
      if (it.kind != Syn::Kind::Set) throw fail("a set of subsets {{...}, ...}");
      std::vector<TValue> xs;
      for (const auto& y : it.items) xs.push_back(leaf(y));
      hoods.push_back(std::move(xs));
    }
    return TValue::nbhd(std::move(hoods));
  }
  }
  throw InvariantViolation("convert: unknown functor kind");
}

} // namespace

std::string show_value(const TValue& v, const FinSet& base) {
  std::string out;
  show(v, base, out);
  return out;
}

TValue parse_value(const FunctorExpr& f, const FinSet& base, std::string_view text) {
  Syn s = ValueParser(text).parse();
  LeafConv leaf = [&](const Syn& x) -> TValue {
    if (x.kind != Syn::Kind::Name) throw ShapeError("value at position " + std::to_string(x.pos) + ": expected a state name");
    if (auto i = base.find(x.text)) return TValue::leaf(*i);
    throw ShapeError("unknown state '" + x.text + "'");
  };
  return convert(f, s, leaf);
}

} // namespace coalog
