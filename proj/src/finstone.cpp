#include "coalog/finstone.hpp"

#include "coalog/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace coalog {

Subset full_subset(std::size_t size) {
  Subset s(size);
  s.set();
  return s;
}

Subset singleton(std::size_t size, std::size_t index) {
  Subset s(size);
  s.set(index);
  return s;
}

Subset subset_from_mask(std::size_t size, std::uint64_t mask) {
  Subset s(size);
  for (std::size_t i = 0; i < size && i < 64; ++i)
    if ((mask >> i) & 1u) s.set(i);
  return s;
}

std::uint64_t subset_mask(const Subset& s) {
  std::uint64_t m = 0;
  for (auto i = s.find_first(); i != Subset::npos; i = s.find_next(i)) {
    if (i >= 64) throw InvariantViolation("subset_mask: element index beyond 63");
    m |= std::uint64_t{1} << i;
  }
  return m;
}

std::vector<std::size_t> members(const Subset& s) {
  std::vector<std::size_t> out;
  out.reserve(s.count());
  for (auto i = s.find_first(); i != Subset::npos; i = s.find_next(i)) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------- FinSet

FinSet::FinSet(std::vector<std::string> labels) : size_(labels.size()) {
  std::set<std::string_view> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw InvariantViolation("FinSet: duplicate label '" + l + "'");
  labels_ = std::make_shared<const std::vector<std::string>>(std::move(labels));
}

std::string FinSet::label(std::size_t i) const {
  if (labels_) return (*labels_)[i];
  return std::to_string(i);
}

std::optional<std::size_t> FinSet::find(std::string_view label) const {
  for (std::size_t i = 0; i < size_; ++i)
    if (this->label(i) == label) return i;
  return std::nullopt;
}

bool operator==(const FinSet& a, const FinSet& b) {
  if (a.size_ != b.size_) return false;
  if (a.has_labels() != b.has_labels()) return false;
  return !a.has_labels() || *a.labels_ == *b.labels_;
}

// ---------------------------------------------------------------- FinFn

FinFn::FinFn(FinSet dom, FinSet cod, std::vector<std::size_t> table)
    : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
  if (table_.size() != dom_.size()) throw InvariantViolation("FinFn: table length differs from domain size");
  for (auto y : table_)
    if (y >= cod_.size()) throw InvariantViolation("FinFn: table entry outside codomain");
}

FinFn FinFn::identity(const FinSet& set) {
  std::vector<std::size_t> t(set.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
  return FinFn(set, set, std::move(t));
}

bool FinFn::injective() const {
  std::vector<char> hit(cod_.size(), 0);
  for (auto y : table_) {
    if (hit[y]) return false;
    hit[y] = 1;
  }
  return true;
}

bool FinFn::surjective() const {
  std::vector<char> hit(cod_.size(), 0);
  std::size_t n = 0;
  for (auto y : table_)
    if (!hit[y]) hit[y] = 1, ++n;
  return n == cod_.size();
}

FinFn FinFn::inverse() const {
  if (!bijective()) throw NotInvertible("FinFn::inverse: map is not a bijection");
  std::vector<std::size_t> inv(cod_.size());
  for (std::size_t x = 0; x < table_.size(); ++x) inv[table_[x]] = x;
  return FinFn(cod_, dom_, std::move(inv));
}

Subset FinFn::preimage(const Subset& s) const {
  Subset out(dom_.size());
  for (std::size_t x = 0; x < table_.size(); ++x)
    if (s.test(table_[x])) out.set(x);
  return out;
}

Subset FinFn::image(const Subset& s) const {
  Subset out(cod_.size());
  for (auto x = s.find_first(); x != Subset::npos; x = s.find_next(x)) out.set(table_[x]);
  return out;
}

bool operator==(const FinFn& a, const FinFn& b) {
  return a.dom_.size() == b.dom_.size() && a.cod_.size() == b.cod_.size() && a.table_ == b.table_;
}

FinFn compose(const FinFn& g, const FinFn& f) {
  if (f.cod().size() != g.dom().size()) throw InvariantViolation("compose: codomain/domain mismatch");
  std::vector<std::size_t> t(f.dom().size());
  for (std::size_t x = 0; x < t.size(); ++x) t[x] = g(f(x));
  return FinFn(f.dom(), g.cod(), std::move(t));
}

// ---------------------------------------------------------------- FinBA

std::uint64_t FinBA::element_count() const { return sat_pow2(atoms_.size()); }

std::string FinBA::show(const Subset& e) const {
  std::string out = "{";
  bool first = true;
  for (auto i = e.find_first(); i != Subset::npos; i = e.find_next(i)) {
    if (!first) out += ", ";
    out += atoms_.label(i);
    first = false;
  }
  return out + "}";
}

BAElem::BAElem(FinBA algebra, Subset atoms) : algebra_(std::move(algebra)), atoms_(std::move(atoms)) {
  if (!algebra_.contains(atoms_)) throw InvariantViolation("BAElem: atom set does not belong to the algebra");
}

namespace {
void same_algebra(const BAElem& a, const BAElem& b) {
  if (!(a.algebra() == b.algebra())) throw InvariantViolation("BAElem: operands from different algebras");
}
} // namespace

BAElem BAElem::operator&(const BAElem& o) const {
  same_algebra(*this, o);
  return BAElem(algebra_, atoms_ & o.atoms_);
}

BAElem BAElem::operator|(const BAElem& o) const {
  same_algebra(*this, o);
  return BAElem(algebra_, atoms_ | o.atoms_);
}

BAElem BAElem::operator~() const { return BAElem(algebra_, ~atoms_); }

bool BAElem::leq(const BAElem& o) const {
  same_algebra(*this, o);
  return atoms_.is_subset_of(o.atoms_);
}

bool operator==(const BAElem& a, const BAElem& b) {
  return a.algebra_ == b.algebra_ && a.atoms_ == b.atoms_;
}

// ---------------------------------------------------------------- BAHom

BAHom::BAHom(FinBA src, FinBA dst, FinFn dual) : src_(std::move(src)), dst_(std::move(dst)), dual_(std::move(dual)) {
  if (dual_.dom().size() != dst_.atom_count() || dual_.cod().size() != src_.atom_count())
    throw InvariantViolation("BAHom: dual map does not go from atoms(dst) to atoms(src)");
}

BAHom BAHom::identity(const FinBA& a) { return BAHom(a, a, FinFn::identity(a.atoms())); }

BAHom BAHom::from_forward(const FinBA& src, const FinBA& dst, std::span<const Subset> images) {
  const std::size_t n = src.atom_count();
  if (n > 20) throw ResourceLimit("BAHom::from_forward element table", src.element_count());
  const std::uint64_t count = std::uint64_t{1} << n;
  if (images.size() != count) throw InvariantViolation("BAHom::from_forward: table must list every element");
  for (const auto& img : images)
    if (!dst.contains(img)) throw InvariantViolation("BAHom::from_forward: image outside target algebra");
  const std::uint64_t top = count - 1;
  if (images[top] != dst.top()) throw InvariantViolation("BAHom::from_forward: top not preserved");
  for (std::uint64_t a = 0; a < count; ++a) {
    if (images[top & ~a] != ~images[a]) throw InvariantViolation("BAHom::from_forward: complement not preserved");
    for (std::uint64_t b = a; b < count; ++b)
      if (images[a & b] != (images[a] & images[b]))
        throw InvariantViolation("BAHom::from_forward: meet not preserved");
  }
  // Each target atom lies below the image of exactly one source atom.
  std::vector<std::size_t> dual(dst.atom_count());
  for (std::size_t d = 0; d < dst.atom_count(); ++d) {
    std::optional<std::size_t> owner;
    for (std::size_t s = 0; s < n; ++s)
      if (images[std::uint64_t{1} << s].test(d)) owner = s;
    if (!owner) throw InvariantViolation("BAHom::from_forward: target atom not covered");
    dual[d] = *owner;
  }
  return BAHom(src, dst, FinFn(dst.atoms(), src.atoms(), std::move(dual)));
}

BAElem BAHom::apply(const BAElem& e) const {
  if (!(e.algebra() == src_)) throw InvariantViolation("BAHom::apply: element from a different algebra");
  return BAElem(dst_, apply(e.atoms()));
}

BAHom compose(const BAHom& g, const BAHom& f) {
  if (!(f.dst() == g.src())) throw InvariantViolation("compose: homomorphisms do not chain");
  return BAHom(f.src(), g.dst(), compose(f.dual(), g.dual()));
}

// ---------------------------------------------------------------- duality

FinBA powerset_algebra(const FinSet& x) { return FinBA(x); }

BAHom powerset_map(const FinFn& f) { return BAHom(FinBA(f.cod()), FinBA(f.dom()), f); }

FinSet spec(const FinBA& a) { return a.atoms(); }

FinFn spec_map(const BAHom& h) { return h.dual(); }

BAHom unit_iota(const FinBA& a) {
  // Atom u of P(S A) is the singleton {u} of ultrafilters; its preimage under
  // the dual must be the atom of A generating u. Look it up through membership.
  const FinSet sa = spec(a);
  const FinBA psa = powerset_algebra(sa);
  std::vector<std::size_t> dual(psa.atom_count());
  for (std::size_t u = 0; u < sa.size(); ++u) {
    for (std::size_t at = 0; at < a.atom_count(); ++at)
      if (a.atom(at).test(u)) dual[u] = at;  // principal filter at `at` is u
  }
  return BAHom(a, psa, FinFn(psa.atoms(), a.atoms(), std::move(dual)));
}

FinFn counit_eps(const FinSet& x) {
  const FinBA px = powerset_algebra(x);
  const FinSet spx = spec(px);
  std::vector<std::size_t> t(x.size());
  for (std::size_t e = 0; e < x.size(); ++e) {
    // The principal ultrafilter {b ⊆ X | e ∈ b} is generated by the atom {e}.
    for (std::size_t at = 0; at < px.atom_count(); ++at)
      if (px.atom(at).test(e)) t[e] = at;
  }
  return FinFn(x, spx, std::move(t));
}

FinBA free_ba(const std::vector<std::string>& vars) {
  {
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != vars.size()) throw InvariantViolation("free_ba: duplicate variable name");
  }
  const std::uint64_t count = sat_pow2(vars.size());
  check_card(count, "free_ba valuations");
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::uint64_t w = 0; w < count; ++w) {
    if (vars.empty()) {
      labels.emplace_back("*");
      break;
    }
    std::string l;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) l += ",";
      l += vars[i] + "=" + (((w >> i) & 1u) ? "1" : "0");
    }
    labels.push_back(std::move(l));
  }
  return FinBA(FinSet(std::move(labels)));
}

Subset free_var(const std::vector<std::string>& vars, std::size_t i) {
  const std::size_t count = std::size_t{1} << vars.size();
  Subset s(count);
  for (std::size_t w = 0; w < count; ++w)
    if ((w >> i) & 1u) s.set(w);
  return s;
}

Coproduct ba_coproduct(const FinBA& a, const FinBA& b) {
  const std::uint64_t n = sat_mul(a.atom_count(), b.atom_count());
  check_card(n, "ba_coproduct atoms");
  std::vector<std::string> labels;
  labels.reserve(n);
  std::vector<std::size_t> pa, pb;
  pa.reserve(n);
  pb.reserve(n);
  for (std::size_t i = 0; i < a.atom_count(); ++i)
    for (std::size_t j = 0; j < b.atom_count(); ++j) {
      labels.push_back("(" + a.atoms().label(i) + " | " + b.atoms().label(j) + ")");
      pa.push_back(i);
      pb.push_back(j);
    }
  FinBA sum{FinSet(std::move(labels))};
  BAHom inj_a(a, sum, FinFn(sum.atoms(), a.atoms(), std::move(pa)));
  BAHom inj_b(b, sum, FinFn(sum.atoms(), b.atoms(), std::move(pb)));
  return {sum, inj_a, inj_b};
}

Quotient quotient_by(const FinBA& a, std::span<const std::pair<Subset, Subset>> pairs) {
  Subset f = a.top();
  for (const auto& [s, t] : pairs) {
    if (!a.contains(s) || !a.contains(t)) throw InvariantViolation("quotient_by: pair member outside algebra");
    f &= ~(s ^ t);
  }
  std::vector<std::string> labels;
  std::vector<std::size_t> inclusion;
  for (auto i = f.find_first(); i != Subset::npos; i = f.find_next(i)) {
    labels.push_back(a.atoms().label(i));
    inclusion.push_back(i);
  }
  FinBA q{FinSet(std::move(labels))};
  return {q, BAHom(a, q, FinFn(q.atoms(), a.atoms(), std::move(inclusion)))};
}

// ---------------------------------------------------------------- BoolTerm

struct BoolTerm::Node {
  Kind kind;
  std::size_t gen = 0;
  std::vector<BoolTerm> args;
};

BoolTerm::BoolTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {
  if (node_->kind == Kind::Gen) max_gen_ = node_->gen;
  for (const auto& a : node_->args)
    if (a.max_gen_ && (!max_gen_ || *a.max_gen_ > *max_gen_)) max_gen_ = a.max_gen_;
}

BoolTerm BoolTerm::gen(std::size_t i) { return BoolTerm(std::make_shared<const Node>(Node{Kind::Gen, i, {}})); }
BoolTerm BoolTerm::top() { return BoolTerm(std::make_shared<const Node>(Node{Kind::Top, 0, {}})); }
BoolTerm BoolTerm::bot() { return BoolTerm(std::make_shared<const Node>(Node{Kind::Bot, 0, {}})); }
BoolTerm BoolTerm::operator~() const {
  return BoolTerm(std::make_shared<const Node>(Node{Kind::Not, 0, {*this}}));
}
BoolTerm BoolTerm::operator&(const BoolTerm& o) const {
  return BoolTerm(std::make_shared<const Node>(Node{Kind::And, 0, {*this, o}}));
}
BoolTerm BoolTerm::operator|(const BoolTerm& o) const {
  return BoolTerm(std::make_shared<const Node>(Node{Kind::Or, 0, {*this, o}}));
}

BoolTerm::Kind BoolTerm::kind() const { return node_->kind; }

bool BoolTerm::eval(const Subset& v) const {
  switch (node_->kind) {
  case Kind::Gen: return v.test(node_->gen);
  case Kind::Top: return true;
  case Kind::Bot: return false;
  case Kind::Not: return !node_->args[0].eval(v);
  case Kind::And: return node_->args[0].eval(v) && node_->args[1].eval(v);
  case Kind::Or: return node_->args[0].eval(v) || node_->args[1].eval(v);
  }
  return false;
}

Subset BoolTerm::eval_free(std::size_t generators) const {
  const std::size_t count = std::size_t{1} << generators;
  switch (node_->kind) {
  case Kind::Gen: {
    Subset s(count);
    for (std::size_t w = 0; w < count; ++w)
      if ((w >> node_->gen) & 1u) s.set(w);
    return s;
  }
  case Kind::Top: return full_subset(count);
  case Kind::Bot: return Subset(count);
  case Kind::Not: return ~node_->args[0].eval_free(generators);
  case Kind::And: return node_->args[0].eval_free(generators) & node_->args[1].eval_free(generators);
  case Kind::Or: return node_->args[0].eval_free(generators) | node_->args[1].eval_free(generators);
  }
  return Subset(count);
}

// ---------------------------------------------------------------- presented_ba

namespace {
bool numeric_less(const Subset& a, const Subset& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a.test(i) != b.test(i)) return b.test(i);
  return false;
}
} // namespace

std::optional<std::size_t> PresentedBA::find(const Subset& valuation) const {
  auto it = std::lower_bound(valuations.begin(), valuations.end(), valuation, numeric_less);
  if (it == valuations.end() || *it != valuation) return std::nullopt;
  return static_cast<std::size_t>(it - valuations.begin());
}

PresentedBA presented_ba(std::size_t generators, std::span<const BoolEquation> equations) {
  // Equations without generators are checked once up front.
  std::vector<std::vector<const BoolEquation*>> due(generators);
  const Subset empty(generators);
  for (const auto& eq : equations) {
    auto a = eq.first.max_gen(), b = eq.second.max_gen();
    std::optional<std::size_t> m = a;
    if (b && (!m || *b > *m)) m = b;
    if (!m) {
      if (eq.first.eval(empty) != eq.second.eval(empty)) return {FinBA(), {}};
      continue;
    }
    if (*m >= generators) throw InvariantViolation("presented_ba: equation mentions unknown generator");
    due[*m].push_back(&eq);
  }

  std::vector<Subset> partial{empty};
  for (std::size_t g = 0; g < generators; ++g) {
    std::vector<Subset> next;
    next.reserve(partial.size() * 2);
    for (const auto& v : partial) {
      for (int bit = 0; bit < 2; ++bit) {
        Subset w = v;
        w[g] = bit != 0;
        bool ok = true;
        for (const auto* eq : due[g])
          if (eq->first.eval(w) != eq->second.eval(w)) {
            ok = false;
            break;
          }
        if (ok) next.push_back(std::move(w));
      }
    }
    check_card(next.size(), "presented_ba partial valuations");
    partial = std::move(next);
  }

  std::sort(partial.begin(), partial.end(), numeric_less);
  PresentedBA out;
  out.algebra = FinBA(FinSet(partial.size()));
  out.valuations = std::move(partial);
  return out;
}

} // namespace coalog
