#include "coalog/duality.hpp"

#include "coalog/error.hpp"

namespace coalog {

namespace {

std::vector<TValue> leaves(const Subset& s) {
  std::vector<TValue> out;
  for (std::size_t i : members(s)) out.push_back(TValue::leaf(i));
  return out;
}

Subset leaf_set(const TValue& v, std::size_t n) {
  Subset s(n);
  for (const TValue& e : v.elements()) s.set(e.index());
  return s;
}

// Elements of A by mask; A must be small enough to enumerate.
std::uint64_t element_bound(const FinBA& a, const std::string& what) {
  const std::uint64_t count = sat_pow2(a.atom_count());
  check_card(count, what);
  return count;
}

const Formula& box_p() {
  static const Formula f = parse_formula(FunctorExpr::pow(), "box p");
  return f;
}

const Formula& box_p_nbhd() {
  static const Formula f = parse_formula(FunctorExpr::nbhd(), "box p");
  return f;
}

struct Chain {
  FinFn eps;  // T S A -> S P T S A
  FinFn s_delta;  // S P T S A -> S L P S A
  FinFn s_l_iota;  // S L P S A -> S L A
};

Chain transpose_chain(const FunctorExpr& t, const FinBA& a) {
  const TSet tsa = apply_obj(t, spec(a));
  const BAHom delta = delta_hom(t, spec(a));
  const BAHom l_iota = l_on_hom(t, unit_iota(a));
  return Chain{counit_eps(tsa.set), spec_map(delta), spec_map(l_iota)};
}

} // namespace

FinBA l_on_ba(const FunctorExpr& t, const FinBA& a) { return powerset_algebra(apply_obj(t, spec(a)).set); }

BAHom l_on_hom(const FunctorExpr& t, const BAHom& f) {
  return BAHom(l_on_ba(t, f.src()), l_on_ba(t, f.dst()), apply_fn(t, spec_map(f)));
}

BAHom delta_hom(const FunctorExpr& t, const FinSet& x) { return powerset_map(apply_fn(t, counit_eps(x))); }

FinFn delta_star(const FunctorExpr& t, const FinBA& a) {
  const Chain c = transpose_chain(t, a);
  return compose(c.s_l_iota, compose(c.s_delta, c.eps));
}

FinFn h_generic(const FunctorExpr& t, const FinBA& a) {
  const Chain c = transpose_chain(t, a);
  return compose(c.eps.inverse(), compose(c.s_delta.inverse(), c.s_l_iota.inverse()));
}

TransposeData transpose_data(const FunctorExpr& t, const FinBA& a) {
  TransposeData d{delta_star(t, a), h_generic(t, a)};
  if (!(compose(d.h, d.delta_star) == FinFn::identity(d.delta_star.dom())) ||
      !(compose(d.delta_star, d.h) == FinFn::identity(d.h.dom())))
    throw InvariantViolation("transpose data: h and delta* are not inverse for " + t.str());
  return d;
}

FinFn h_explicit_pow(const FinBA& a) {
  const FunctorExpr pow = FunctorExpr::pow();
  const std::size_t n = a.atom_count();
  const TSet tsa = apply_obj(pow, spec(a));
  const std::uint64_t elems = element_bound(a, "h_explicit_pow: elements of A");
  // box a for every a, as a subset of the atoms of L A
  std::vector<Subset> boxes;
  for (std::uint64_t m = 0; m < elems; ++m) boxes.push_back(one_step(pow, n, box_p(), {{"p", a.element(m)}}));
  std::vector<std::size_t> table(tsa.size());
  for (std::size_t v = 0; v < tsa.size(); ++v) {
    Subset u = a.top();
    for (std::uint64_t m = 0; m < elems; ++m)
      if (boxes[m].test(v)) u &= a.element(m);
    table[v] = tsa.index(TValue::set(leaves(u)));
  }
  return FinFn(spec(l_on_ba(pow, a)), tsa.set, std::move(table));
}

FinFn h_explicit_nbhd(const FinBA& a) {
  const FunctorExpr nbhd = FunctorExpr::nbhd();
  const std::size_t n = a.atom_count();
  const TSet tsa = apply_obj(nbhd, spec(a));
  const std::uint64_t elems = element_bound(a, "h_explicit_nbhd: elements of A");
  std::vector<Subset> boxes;
  for (std::uint64_t m = 0; m < elems; ++m)
    boxes.push_back(one_step(nbhd, n, box_p_nbhd(), {{"p", a.element(m)}}));
  std::vector<std::size_t> table(tsa.size());
  for (std::size_t v = 0; v < tsa.size(); ++v) {
    std::vector<std::vector<TValue>> hood;
    for (std::uint64_t m = 0; m < elems; ++m)
      if (boxes[m].test(v)) hood.push_back(leaves(a.element(m)));
    table[v] = tsa.index(TValue::nbhd(std::move(hood)));
  }
  return FinFn(spec(l_on_ba(nbhd, a)), tsa.set, std::move(table));
}

// ---------------------------------------------------------------- L-algebras

LAlgebra::LAlgebra(FunctorExpr t, FinBA a, BAHom alpha) : t_(std::move(t)), a_(std::move(a)), alpha_(std::move(alpha)) {
  if (alpha_.src().atom_count() != card(t_, a_.atom_count()))
    throw InvariantViolation("L-algebra: alpha's source is not L A");
  if (alpha_.dst().atom_count() != a_.atom_count()) throw InvariantViolation("L-algebra: alpha's target is not A");
}

LAlgebra LAlgebra::from_dual(FunctorExpr t, FinBA a, const std::vector<TValue>& dual) {
  if (dual.size() != a.atom_count()) throw InvariantViolation("L-algebra: dual table has the wrong length");
  const TSet tsa = apply_obj(t, spec(a));
  std::vector<std::size_t> table;
  for (const TValue& v : dual) {
    tsa.carrier.validate(v);
    table.push_back(tsa.index(v));
  }
  BAHom alpha(powerset_algebra(tsa.set), a, FinFn(spec(a), tsa.set, std::move(table)));
  return LAlgebra(std::move(t), std::move(a), std::move(alpha));
}

LAlgebra LAlgebra::from_forward(FunctorExpr t, FinBA a, const std::vector<Subset>& images) {
  const FinBA la = l_on_ba(t, a);
  BAHom alpha = BAHom::from_forward(la, a, images);
  return LAlgebra(std::move(t), std::move(a), std::move(alpha));
}

TValue LAlgebra::dual_value(std::size_t atom) const {
  return Carrier::apply(t_, Carrier::base(a_.atom_count())).decode(alpha_.dual()(atom));
}

Subset LAlgebra::op(const Formula& term, const std::map<std::string, Subset>& env) const {
  return alpha_.apply(one_step(t_, a_.atom_count(), term, env));
}

LAlgebra random_lalgebra(const FunctorExpr& t, std::size_t atoms, std::mt19937_64& rng, double density) {
  const Carrier c = Carrier::apply(t, Carrier::base(atoms));
  check_card(c.size(), "T(S A) for T = " + t.str());
  std::vector<TValue> dual;
  for (std::size_t u = 0; u < atoms; ++u) dual.push_back(c.random(rng, density));
  return LAlgebra::from_dual(t, FinBA(FinSet(atoms)), dual);
}

void for_each_lalgebra(const FunctorExpr& t, std::size_t atoms, const std::function<bool(const LAlgebra&)>& f) {
  const FinBA a{FinSet(atoms)};
  const TSet tsa = apply_obj(t, spec(a));
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < atoms; ++i) total = sat_mul(total, tsa.size());
  check_card(total, "L-algebras on " + std::to_string(atoms) + " atoms for T = " + t.str());
  const FinBA la = powerset_algebra(tsa.set);
  std::vector<std::size_t> digits(atoms, 0);
  for (std::uint64_t k = 0; k < total; ++k) {
    if (!f(LAlgebra(t, a, BAHom(la, a, FinFn(spec(a), tsa.set, digits))))) return;
    for (std::size_t i = atoms; i-- > 0;) {
      if (++digits[i] < tsa.size()) break;
      digits[i] = 0;
    }
  }
}

LAlgebra complex_algebra(const Coalgebra& c) {
  const FunctorExpr& t = c.functor();
  const TSet tx = apply_obj(t, c.carrier());
  std::vector<std::size_t> table;
  for (const TValue& v : c.structure()) table.push_back(tx.index(v));
  const FinFn xi(c.carrier(), tx.set, std::move(table));
  BAHom alpha = compose(powerset_map(xi), delta_hom(t, c.carrier()));
  return LAlgebra(t, powerset_algebra(c.carrier()), std::move(alpha));
}

Coalgebra jt_coalgebra(const LAlgebra& alg) {
  const FinBA& a = alg.carrier();
  const FinFn xi = compose(h_generic(alg.functor(), a), spec_map(alg.alpha()));
  const Carrier tsa = Carrier::apply(alg.functor(), Carrier::base(a.atom_count()));
  std::vector<TValue> structure;
  for (std::size_t u = 0; u < a.atom_count(); ++u) structure.push_back(tsa.decode(xi(u)));
  return Coalgebra(alg.functor(), spec(a), std::move(structure));
}

std::vector<Subset> r_box(const LAlgebra& alg) {
  if (alg.functor().kind() != FunctorExpr::Kind::Pow) throw ShapeError("r_box needs T = Pow, got " + alg.functor().str());
  const std::size_t n = alg.carrier().atom_count();
  const FinFn succ = compose(h_explicit_pow(alg.carrier()), spec_map(alg.alpha()));
  const Carrier tsa = Carrier::apply(alg.functor(), Carrier::base(n));
  std::vector<Subset> rows;
  for (std::size_t x = 0; x < n; ++x) rows.push_back(leaf_set(tsa.decode(succ(x)), n));
  return rows;
}

std::vector<Subset> r_box_by_filters(const LAlgebra& alg) {
  if (alg.functor().kind() != FunctorExpr::Kind::Pow) throw ShapeError("r_box needs T = Pow, got " + alg.functor().str());
  const FinBA& a = alg.carrier();
  const std::uint64_t elems = element_bound(a, "r_box: elements of A");
  std::vector<Subset> rows(a.atom_count(), a.top());
  for (std::uint64_t m = 0; m < elems; ++m) {
    const Subset e = a.element(m);
    const Subset box = alg.op(box_p(), {{"p", e}});
    for (std::size_t x : members(box)) rows[x] &= e;
  }
  return rows;
}

JtReport verify_jt_embedding(const LAlgebra& alg, std::size_t element_limit) {
  const FunctorExpr& t = alg.functor();
  const FinBA& a = alg.carrier();
  JtReport r;
  const BAHom iota = unit_iota(a);
  if (!iota.bijective()) {
    r.ok = false;
    r.reason = "iota_A is not a bijection";
    return r;
  }
  const Coalgebra jt = jt_coalgebra(alg);
  const TSet tsa = apply_obj(t, spec(a));
  std::vector<std::size_t> table;
  for (const TValue& v : jt.structure()) table.push_back(tsa.index(v));
  const BAHom p_xi = powerset_map(FinFn(spec(a), tsa.set, std::move(table)));

  const BAHom lhs = compose(iota, alg.alpha());
  const BAHom rhs = compose(p_xi, compose(delta_hom(t, spec(a)), l_on_hom(t, iota)));
  const FinBA& la = alg.alpha().src();

  auto check = [&](const Subset& e) {
    if (lhs.apply(e) == rhs.apply(e)) return true;
    r.ok = false;
    r.witness = e;
    r.reason = "diagram fails at element " + la.show(e) + " of L A";
    return false;
  };
  r.all_elements = la.atom_count() <= std::min<std::size_t>(element_limit, 62);
  if (r.all_elements) {
    const std::uint64_t elems = std::uint64_t{1} << la.atom_count();
    for (std::uint64_t m = 0; m < elems; ++m)
      if (!check(la.element(m))) return r;
  } else {
    for (std::size_t i = 0; i < la.atom_count(); ++i)
      if (!check(la.atom(i))) return r;
  }
  return r;
}

bool round_trip(const Coalgebra& c) {
  const Coalgebra jt = jt_coalgebra(complex_algebra(c));
  const FinFn eps = counit_eps(c.carrier());
  return is_morphism(c, jt, eps) && is_morphism(jt, c, eps.inverse());
}

} // namespace coalog
