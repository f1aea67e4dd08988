#include "coalog/error.hpp"
#include "coalog/finstone.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace coalog;

namespace {

// All maps {0..m-1} -> {0..n-1}.
std::vector<std::vector<std::size_t>> all_tables(std::size_t m, std::size_t n) {
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

} // namespace

TEST_CASE("powerset algebra and its action on maps") {
  CHECK(powerset_algebra(FinSet(2)).atom_count() == 2);
  CHECK(powerset_algebra(FinSet(2)).element_count() == 4);
  CHECK(powerset_algebra(FinSet(0)).element_count() == 1);

  FinFn f(FinSet(2), FinSet(1), {0, 0});
  BAHom pf = powerset_map(f);
  CHECK(pf.apply(full_subset(1)) == full_subset(2));
  CHECK(pf.apply(Subset(1)) == Subset(2));
}

TEST_CASE("spectrum") {
  CHECK(spec(free_ba({"p"})).size() == 2);
  CHECK(spec(FinBA()).size() == 0);
  FinSet x(std::vector<std::string>{"a", "b", "c"});
  CHECK(spec(powerset_algebra(x)) == x);
  FinBA a = free_ba({"p", "q"});
  CHECK(powerset_algebra(spec(a)).atom_count() == a.atom_count());
}

TEST_CASE("unit and counit") {
  FinBA a = free_ba({"p"});
  BAHom iota = unit_iota(a);
  CHECK(iota.bijective());
  // atom "p=1" has index 1
  CHECK(iota.apply(a.atom(1)).count() == 1);
  CHECK(unit_iota(FinBA()).bijective());
  for (std::size_t n = 0; n <= 4; ++n) {
    FinBA b{FinSet(n)};
    CHECK(unit_iota(b).bijective());
    // triangle identity: S(ι_A) ∘ ε_{SA} = id
    CHECK(compose(spec_map(unit_iota(b)), counit_eps(spec(b))) == FinFn::identity(spec(b)));
  }
}

TEST_CASE("free algebras") {
  CHECK(free_ba({"p"}).atom_count() == 2);
  CHECK(free_ba({}).atom_count() == 1);
  std::vector<std::string> v{"p", "q"};
  FinBA f = free_ba(v);
  Subset both = free_var(v, 0) & free_var(v, 1);
  CHECK(both.count() == 1);
  CHECK(both.test(3));
  CHECK(f.atoms().label(3) == "p=1,q=1");
}

TEST_CASE("coproduct of free algebras is free on the union") {
  auto c = ba_coproduct(free_ba({"p"}), free_ba({"q"}));
  REQUIRE(c.algebra.atom_count() == 4);
  // Oracle iso: coproduct atom (a, b) ↦ free atom with p = a, q = b.
  std::vector<std::string> v{"p", "q"};
  std::vector<std::size_t> iso(4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) iso[a * 2 + b] = a | (b << 1);
  auto transport = [&](const Subset& e) {
    Subset out(4);
    for (std::size_t i = 0; i < 4; ++i)
      if (e.test(i)) out.set(iso[i]);
    return out;
  };
  CHECK(transport(c.inj_a.apply(free_var({"p"}, 0))) == free_var(v, 0));
  CHECK(transport(c.inj_b.apply(free_var({"q"}, 0))) == free_var(v, 1));
  CHECK(c.inj_a.injective());
  CHECK(c.inj_b.injective());
  CHECK(c.inj_a.apply(full_subset(2)) == c.algebra.top());

  auto one = ba_coproduct(FinBA(FinSet(1)), FinBA(FinSet(1)));
  CHECK(one.algebra.atom_count() == 1);
}

TEST_CASE("homomorphism laws, exhaustive on small algebras") {
  for (std::size_t m = 0; m <= 3; ++m)
    for (std::size_t n = 0; n <= 3; ++n)
      for (const auto& t : all_tables(n, m)) {
        FinBA src{FinSet(m)}, dst{FinSet(n)};
        BAHom h(src, dst, FinFn(FinSet(n), FinSet(m), t));
        CHECK(h.apply(src.top()) == dst.top());
        CHECK(h.apply(src.bottom()) == dst.bottom());
        for (std::uint64_t a = 0; a < (1u << m); ++a) {
          CHECK(h.apply(~src.element(a)) == ~h.apply(src.element(a)));
          for (std::uint64_t b = 0; b < (1u << m); ++b) {
            CHECK(h.apply(src.element(a) & src.element(b)) == (h.apply(src.element(a)) & h.apply(src.element(b))));
            CHECK(h.apply(src.element(a) | src.element(b)) == (h.apply(src.element(a)) | h.apply(src.element(b))));
          }
        }
      }
}

TEST_CASE("homomorphism laws, random larger algebras") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 5 + rng() % 4, n = 5 + rng() % 4;
    std::vector<std::size_t> t(n);
    for (auto& x : t) x = rng() % m;
    FinBA src{FinSet(m)}, dst{FinSet(n)};
    BAHom h(src, dst, FinFn(FinSet(n), FinSet(m), t));
    for (int k = 0; k < 20; ++k) {
      Subset a = src.element(rng()), b = src.element(rng());
      CHECK(h.apply(a & b) == (h.apply(a) & h.apply(b)));
      CHECK(h.apply(~a) == ~h.apply(a));
    }
  }
}

TEST_CASE("from_forward recovers the dual and rejects non-homomorphisms") {
  FinBA a{FinSet(2)}, b{FinSet(3)};
  BAHom h(a, b, FinFn(FinSet(3), FinSet(2), {1, 0, 1}));
  std::vector<Subset> table;
  for (std::uint64_t m = 0; m < 4; ++m) table.push_back(h.apply(a.element(m)));
  CHECK(BAHom::from_forward(a, b, table) == h);
  table[1] = b.element(0b111);
  CHECK_THROWS_AS(BAHom::from_forward(a, b, table), InvariantViolation);
}

TEST_CASE("quotients") {
  std::vector<std::string> v{"p"};
  FinBA a = free_ba(v);
  std::vector<std::pair<Subset, Subset>> pairs{{free_var(v, 0), a.top()}};
  auto q = quotient_by(a, pairs);
  CHECK(q.algebra.atom_count() == 1);
  CHECK(q.algebra.atoms().label(0) == "p=1");
  CHECK(q.surjection.surjective());

  std::vector<std::pair<Subset, Subset>> bad{{a.top(), a.bottom()}};
  CHECK(quotient_by(a, bad).algebra.atom_count() == 0);
  CHECK(quotient_by(a, {}).algebra.atom_count() == 2);
}

TEST_CASE("quotient universal property, exhaustive up to 3 atoms") {
  for (std::size_t m = 0; m <= 3; ++m) {
    FinBA a{FinSet(m)};
    const std::uint64_t elems = std::uint64_t{1} << m;
    // every single pair and every two-pair list
    for (std::uint64_t s = 0; s < elems; ++s)
      for (std::uint64_t t = 0; t < elems; ++t)
        for (std::uint64_t u = 0; u < elems; ++u) {
          std::vector<std::pair<Subset, Subset>> pairs{{a.element(s), a.element(t)}, {a.element(u), a.top()}};
          auto q = quotient_by(a, pairs);
          for (const auto& pr : pairs) CHECK(q.surjection.apply(pr.first) == q.surjection.apply(pr.second));
          for (std::size_t n = 0; n <= 3; ++n)
            for (const auto& tab : all_tables(n, m)) {
              BAHom h(a, FinBA(FinSet(n)), FinFn(FinSet(n), FinSet(m), tab));
              bool equalizes = true;
              for (const auto& pr : pairs) equalizes = equalizes && h.apply(pr.first) == h.apply(pr.second);
              // factorization k with k ∘ q = h exists iff every dual atom lands in the kept atoms
              bool factors = true;
              std::vector<std::size_t> kdual(n);
              for (std::size_t i = 0; i < n; ++i) {
                bool found = false;
                for (std::size_t j = 0; j < q.algebra.atom_count(); ++j)
                  if (q.surjection.dual()(j) == tab[i]) kdual[i] = j, found = true;
                factors = factors && found;
              }
              CHECK(equalizes == factors);
              if (factors) {
                BAHom k(q.algebra, FinBA(FinSet(n)), FinFn(FinSet(n), q.algebra.atoms(), kdual));
                CHECK(compose(k, q.surjection) == h);
              }
            }
        }
  }
}

TEST_CASE("presented algebras agree with free algebra quotients") {
  std::mt19937_64 rng(11);
  std::function<BoolTerm(std::size_t, int)> random_term = [&](std::size_t gens, int depth) -> BoolTerm {
    const int pick = static_cast<int>(rng() % (depth > 0 ? 6 : 3));
    switch (pick) {
    case 0: return BoolTerm::gen(rng() % gens);
    case 1: return rng() % 4 == 0 ? BoolTerm::top() : BoolTerm::gen(rng() % gens);
    case 2: return rng() % 4 == 0 ? BoolTerm::bot() : BoolTerm::gen(rng() % gens);
    case 3: return ~random_term(gens, depth - 1);
    case 4: return random_term(gens, depth - 1) & random_term(gens, depth - 1);
    default: return random_term(gens, depth - 1) | random_term(gens, depth - 1);
    }
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t gens = 1 + rng() % 5;
    std::vector<BoolEquation> eqs;
    const int count = static_cast<int>(rng() % 4);
    for (int k = 0; k < count; ++k) eqs.emplace_back(random_term(gens, 3), random_term(gens, 3));
    PresentedBA p = presented_ba(gens, eqs);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < gens; ++i) names.push_back("g" + std::to_string(i));
    FinBA free = free_ba(names);
    std::vector<std::pair<Subset, Subset>> pairs;
    for (const auto& [l, r] : eqs) pairs.emplace_back(l.eval_free(gens), r.eval_free(gens));
    auto q = quotient_by(free, pairs);
    REQUIRE(p.algebra.atom_count() == q.algebra.atom_count());
    for (std::size_t i = 0; i < p.valuations.size(); ++i)
      CHECK(subset_mask(p.valuations[i]) == q.surjection.dual()(i));
  }
}

TEST_CASE("trivial algebra is harmless") {
  FinBA one;
  CHECK(one.element_count() == 1);
  CHECK(one.top() == one.bottom());
  CHECK(BAHom::identity(one).bijective());
  CHECK(ba_coproduct(one, free_ba({"p"})).algebra.atom_count() == 0);
}

TEST_CASE("inverse of a non-bijection throws") {
  CHECK_THROWS_AS(FinFn(FinSet(2), FinSet(1), {0, 0}).inverse(), NotInvertible);
  CHECK_THROWS_AS(FinFn(FinSet(1), FinSet(1), {3}), InvariantViolation);
}
