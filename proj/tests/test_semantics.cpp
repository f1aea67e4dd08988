#include "coalog/error.hpp"
#include "coalog/semantics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace coalog;
using testsupport::has_nbhd;

namespace {

Coalgebra pow_model(const std::vector<std::vector<std::size_t>>& succ) {
  std::vector<TValue> xi;
  for (const auto& s : succ) {
    std::vector<TValue> els;
    for (auto y : s) els.push_back(TValue::leaf(y));
    xi.push_back(TValue::set(els));
  }
  return Coalgebra(FunctorExpr::pow(), FinSet(succ.size()), xi);
}

Subset states(std::size_t n, std::initializer_list<std::size_t> xs) {
  Subset s(n);
  for (auto x : xs) s.set(x);
  return s;
}

// Every coalgebra on ≤ max states when there are few, else a random sample.
void for_small_coalgebras(const FunctorExpr& t, std::size_t max, std::mt19937_64& rng,
                          const std::function<void(const Coalgebra&)>& f) {
  for (std::size_t n = 1; n <= max; ++n) {
    const std::uint64_t tx = Carrier::apply(t, Carrier::base(n)).size();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n; ++i) count = sat_mul(count, tx);
    if (count <= 600) {
      testsupport::for_each_coalgebra(t, n, f);
    } else {
      for (int i = 0; i < 150; ++i) f(random_coalgebra(t, n, rng));
    }
  }
}

} // namespace

TEST_CASE("one-step denotations") {
  const auto pow = parse_functor("Pow");
  // Pow(2) by mask: {} {0} {1} {0,1}
  CHECK(one_step(pow, 2, parse_formula("box a"), {{"a", states(2, {0})}}) == states(4, {0, 1}));
  const auto c = parse_functor("Const{a,b}");
  for (std::size_t x = 0; x <= 3; ++x) CHECK(one_step(c, x, parse_formula("'a"), {}) == states(2, {0}));
  const auto nbhd = parse_functor("Nbhd");
  const Subset nb = one_step(nbhd, 1, parse_formula("box a"), {{"a", Subset(1)}});
  CHECK(nb.size() == 4);
  CHECK(nb == states(4, {1, 3}));
  const auto id = parse_functor("Id");
  CHECK(one_step(id, 3, parse_formula("a & ~b"), {{"a", states(3, {0, 1})}, {"b", states(3, {1})}}) == states(3, {0}));
  CHECK_THROWS_AS(one_step(pow, 2, parse_formula("box a"), {}), ShapeError);
  CHECK_THROWS_AS(one_step(pow, 2, parse_formula("box a"), {{"a", Subset(3)}}), ShapeError);
}

TEST_CASE("one-step denotation against value-level satisfaction") {
  std::mt19937_64 rng(5);
  for (const auto& t : testsupport::covering_functors_with_extras()) {
    if (normalize(Layer{t}).empty()) continue;
    for (std::size_t x = 0; x <= (has_nbhd(t) ? 1u : 2u); ++x) {
      const Carrier tx = Carrier::apply(t, Carrier::base(x));
      const auto values = tx.enumerate("test");
      for (const auto& op : operator_terms(t)) {
        for (int trial = 0; trial < 10; ++trial) {
          VarEnv env;
          for (const auto& a : op.args) env[a] = subset_from_mask(x, rng() & ((1u << x) - 1));
          const Subset s = one_step(t, x, op.term, env);
          LeafHolds leaf = [&](const Formula& f, std::size_t y) { return env.at(f.name()).test(y); };
          for (std::size_t i = 0; i < values.size(); ++i)
            CHECK(s.test(i) == holds(t, Layer{t}, x, op.term, values[i], leaf));
        }
      }
    }
  }
}

TEST_CASE("nested boxes over Pow . Pow") {
  const auto pp = parse_functor("Pow . Pow");
  const Subset a = states(2, {0});
  const Subset s = one_step(pp, 2, parse_formula("box box a"), {{"a", a}});
  const Carrier tx = Carrier::apply(pp, Carrier::base(2));
  // oracle: every element of every element lies in a
  for (std::uint64_t i = 0; i < tx.size(); ++i) {
    bool in = true;
    const TValue v = tx.decode(i);
    for (const auto& b : v.elements())
      for (const auto& y : b.elements()) in = in && a.test(y.index());
    CHECK(s.test(i) == in);
  }
  CHECK(s.count() == 4);  // subsets of {{}, {0}}
}

TEST_CASE("model checking") {
  const Coalgebra c = pow_model({{0, 1}, {}});
  const Valuation h{{"p", states(2, {0})}};
  CHECK(model_check(c, h, parse_formula(c.functor(), "box p")) == states(2, {1}));
  CHECK(model_check(c, h, parse_formula(c.functor(), "box true")) == states(2, {0, 1}));
  CHECK(model_check(c, h, parse_formula(c.functor(), "p & ~p")).none());
  CHECK(model_check(c, h, parse_formula(c.functor(), "~box ~p")) == states(2, {0}));
  CHECK(model_check(c, h, parse_formula(c.functor(), "box box false")) == states(2, {1}));
  CHECK_THROWS_AS(model_check(c, h, parse_formula("box q")), ShapeError);
  CHECK_THROWS_AS(model_check(c, h, parse_formula("[k1] p")), ShapeError);
  CHECK_THROWS_AS(ModelChecker(c, {{"p", Subset(3)}}), ShapeError);

  const auto t = parse_functor("Const{a,b} + Id");
  const Coalgebra s(t, FinSet(3), {TValue::inl(TValue::constant(0, "a")), TValue::inr(TValue::leaf(0)),
                                   TValue::inr(TValue::leaf(1))});
  CHECK(model_check(s, {}, parse_formula(t, "[k1] 'a")) == states(3, {0}));
  CHECK(model_check(s, {}, parse_formula(t, "[k2] [k1] true")) == states(3, {1}));
  CHECK(model_check(s, {}, parse_formula(t, "[k2] [k2] true")) == states(3, {2}));
}

TEST_CASE("derived axioms are sound under model checking") {
  std::mt19937_64 rng(17);
  for (const auto& t : covering_functors()) {
    const auto sig = derive_signature(t);
    const auto axioms = derive_axioms(sig);
    if (axioms.empty()) continue;
    testsupport::FormulaGen gen(t, {"p", "q"}, rng);
    for_small_coalgebras(t, has_nbhd(t) ? 2 : 3, rng, [&](const Coalgebra& c) {
      for (const auto& e : axioms) {
        Substitution sub;
        for (const auto& [v, layer] : e.vars) sub.insert_or_assign(v, gen.at(layer, 1, 1));
        const auto& occ = sig.occurrences[e.occurrence];
        const Formula l = occ.wrap(substitute(e.eq.lhs, sub)), r = occ.wrap(substitute(e.eq.rhs, sub));
        REQUIRE_NOTHROW(typecheck(t, l));
        const auto h = testsupport::random_valuation(c.size(), {"p", "q"}, rng);
        ModelChecker mc(c, h);
        CHECK_MESSAGE(mc.eval(l) == mc.eval(r), t.str() << " " << show(l) << " = " << show(r));
      }
    });
  }
}

TEST_CASE("lifting semantics") {
  std::mt19937_64 rng(3);
  const Coalgebra c = pow_model({{0, 1}, {}, {2}});
  const Valuation h{{"p", states(3, {0, 2})}};
  const auto pow = parse_functor("Pow");
  const Formula p = Formula::var("p");
  for (std::size_t n = 0; n <= 1; ++n) {
    const std::vector<Formula> args(n, p);
    const std::uint64_t k = Carrier::apply(pow, Carrier::base(std::uint64_t{1} << n)).size();
    CHECK(model_check_lifting(c, h, {n, full_subset(k)}, args) == full_subset(3));
    CHECK(model_check_lifting(c, h, {n, Subset(k)}, args).none());
  }
  CHECK_THROWS_AS(model_check_lifting(c, h, {1, Subset(4)}, {}), ShapeError);

  // every derived operator, as a lifting, agrees with its formula
  for (const auto& t : covering_functors()) {
    testsupport::FormulaGen gen(t, {"p", "q"}, rng);
    for (const auto& op : operator_terms(t)) {
      const auto lambda = operator_as_lifting(t, op);
      for_small_coalgebras(t, has_nbhd(t) ? 2 : 3, rng, [&](const Coalgebra& c) {
        std::vector<Formula> args;
        Substitution sub;
        for (const auto& a : op.args) {
          args.push_back(gen.state(1));
          sub.insert_or_assign(a, args.back());
        }
        const auto h = testsupport::random_valuation(c.size(), {"p", "q"}, rng);
        CHECK(model_check_lifting(c, h, lambda, args) == model_check(c, h, substitute(op.term, sub)));
      });
    }
  }
}

TEST_CASE("presented algebras") {
  const auto pow = presented_algebra(parse_functor("Pow"), 2);
  CHECK(pow.algebra.element_count() == 16);
  CHECK(pow.iso());
  const auto c = presented_algebra(parse_functor("Const{a,b}"), 3);
  CHECK(c.algebra.element_count() == 4);
  CHECK(c.iso());
  for (std::size_t x = 0; x <= 4; ++x) {
    const auto id = presented_algebra(parse_functor("Id"), x);
    CHECK(id.algebra.atom_count() == x);
    CHECK(id.iso());
  }
  const auto nb = presented_algebra(parse_functor("Nbhd"), 1);
  CHECK(nb.algebra.atom_count() == 4);
  CHECK(nb.iso());
}

TEST_CASE("delta is an isomorphism on the covering functors") {
  for (const auto& t : covering_functors()) {
    const bool small = has_nbhd(t) || t.str() == "Pow . Pow";
    for (std::size_t x = 0; x <= (small ? 2u : 3u); ++x) {
      const auto r = check_delta_iso(t, x);
      CHECK_MESSAGE(r.ok, r.detail);
    }
  }
}

TEST_CASE("basis generators present the same algebra") {
  for (const auto& t : covering_functors()) {
    if (has_nbhd(t)) continue;
    for (std::size_t x = 0; x <= 2; ++x) {
      const auto full = presented_algebra(t, x);
      const auto basis = presented_algebra(t, x, 0);
      CHECK(!full.reduced);
      CHECK(full.algebra.atom_count() == basis.algebra.atom_count());
      CHECK(basis.iso());
      CHECK(full.iso());
      if (full.dual && basis.dual) {
        // both evaluations separate T(X) the same way
        for (std::size_t i = 0; i < full.target_atoms; ++i)
          for (std::size_t j = 0; j < full.target_atoms; ++j)
            CHECK(((*full.dual)(i) == (*full.dual)(j)) == ((*basis.dual)(i) == (*basis.dual)(j)));
      }
    }
  }
  // too large for one generator per element
  const auto big = presented_algebra(parse_functor("Pow . Pow"), 3);
  CHECK(big.reduced);
  CHECK(big.algebra.atom_count() == 256);
  CHECK(big.iso());
}

TEST_CASE("logical partition examples") {
  CHECK(logical_partition(pow_model({{0}, {1}})).block_count() == 1);
  const auto two = logical_partition(pow_model({{0}, {}}));
  CHECK(two.block_count() == 2);
  const Coalgebra c = pow_model({{0}, {1}, {0, 1}});
  CHECK(logical_partition(c).block_count() == 1);
  const Valuation sep{{"p", states(3, {0})}, {"q", states(3, {1})}};
  CHECK(logical_partition(c, sep).block_count() == 3);
  // a seed distinguishes states and their predecessors
  const Coalgebra chain = pow_model({{1}, {2}, {2}});
  CHECK(logical_partition(chain).block_count() == 1);
  CHECK(logical_partition(chain, Valuation{{"p", states(3, {2})}}).block_count() == 3);
}

TEST_CASE("logical equivalence is bisimilarity") {
  std::mt19937_64 rng(101);
  for (const auto& t : covering_functors()) {
    const std::size_t max = has_nbhd(t) ? 3 : 5;
    for (int i = 0; i < 120; ++i) {
      const std::size_t n = 1 + i % max;
      const Coalgebra c = random_coalgebra(t, n, rng, i % 2 ? 0.3 : 0.6);
      CHECK_MESSAGE(logical_partition(c) == behavioural_partition(c), t.str() << "\n" << show_coalgebra(c));
    }
  }
}

TEST_CASE("truth is invariant under morphisms") {
  std::mt19937_64 rng(29);
  for (const auto& t : covering_functors()) {
    testsupport::FormulaGen gen(t, {"p", "q"}, rng);
    for (int i = 0; i < 30; ++i) {
      const Coalgebra c = random_coalgebra(t, 1 + i % (has_nbhd(t) ? 3 : 4), rng);
      const auto q = behavioural_quotient(c);
      REQUIRE(is_morphism(c, q.quotient, q.map));
      const Valuation hq = testsupport::random_valuation(q.quotient.size(), {"p", "q"}, rng);
      Valuation hc;
      for (const auto& [v, s] : hq) hc[v] = q.map.preimage(s);
      ModelChecker mc(c, hc), mq(q.quotient, hq);
      for (int k = 0; k < 20; ++k) {
        const Formula f = gen.state(2);
        CHECK_MESSAGE(mc.eval(f) == q.map.preimage(mq.eval(f)), show(f));
      }
    }
  }
}
