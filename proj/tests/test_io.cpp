#include "coalog/error.hpp"
#include "coalog/io.hpp"

#include <doctest.h>

#include <random>

using namespace coalog;

TEST_CASE("model files") {
  const Coalgebra c = parse_model(R"(
    # comment
    functor: Const{a,b} + Id
    states: x y   # trailing comment
    y -> inr(x)
    x -> inl('b)
  )");
  CHECK(c.size() == 2);
  CHECK(c.carrier().label(1) == "y");
  CHECK(c(0) == TValue::inl(TValue::constant(1, "b")));
  CHECK(c(1) == TValue::inr(TValue::leaf(0)));

  const Coalgebra n = parse_model("functor: Nbhd\nstates: u v\nu -> {{u}, {}}\nv -> {}\n");
  CHECK(n(0).neighbourhoods().size() == 2);

  CHECK(parse_model("functor: Pow\nstates:\n").size() == 0);

  CHECK_THROWS_AS(parse_model("states: x\nx -> {}\n"), ParseError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\n"), ParseError);  // no line for x
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\nx -> {}\nx -> {x}\n"), ParseError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x x\n"), ParseError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\ny -> {}\n"), ParseError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\nx {}\n"), ParseError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\nx -> {y}\n"), ShapeError);
  CHECK_THROWS_AS(parse_model("functor: Pow\nstates: x\nx -> inl(x)\n"), ShapeError);
  CHECK_THROWS_AS(parse_model("functor: Pow +\nstates: x\n"), ParseError);
  try {
    parse_model("functor: Pow\nstates: x\n\nx -> {x, \n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("model files round trip through show_coalgebra") {
  std::mt19937_64 rng(4);
  for (const auto& t : covering_functors())
    for (std::size_t n = 0; n <= 3; ++n) {
      const Coalgebra c = random_coalgebra(t, n, rng);
      const Coalgebra back = parse_model(show_coalgebra(c));
      CHECK(back.functor() == c.functor());
      CHECK(back.structure() == c.structure());
    }
}

TEST_CASE("valuation files") {
  const FinSet states(std::vector<std::string>{"x1", "x2", "x3"});
  const Valuation h = parse_valuation("p = {x1, x3}\nq = {}\n# none\nr={x2}", states);
  CHECK(h.size() == 3);
  CHECK(h.at("p") == subset_from_mask(3, 0b101));
  CHECK(h.at("q").none());
  CHECK(show_valuation(h, states) == "p = {x1, x3}\nq = {}\nr = {x2}\n");
  CHECK(parse_valuation(show_valuation(h, states), states) == h);
  CHECK_THROWS_AS(parse_valuation("p = {x4}", states), ShapeError);
  CHECK_THROWS_AS(parse_valuation("p = x1", states), ParseError);
  CHECK_THROWS_AS(parse_valuation("p = {x1}\np = {}", states), ParseError);
  CHECK_THROWS_AS(parse_valuation("p = {x1,,x2}", states), ParseError);
  CHECK_THROWS_AS(parse_valuation("1p = {}", states), ParseError);
}

TEST_CASE("algebra files") {
  const LAlgebra alg = parse_algebra("functor: Pow\natoms: a0 a1\ndual: a1 -> {}\ndual: a0 -> {a1}\n");
  CHECK(alg.carrier().atom_count() == 2);
  CHECK(alg.dual_value(0) == TValue::set({TValue::leaf(1)}));
  const LAlgebra back = parse_algebra(show_algebra(alg));
  CHECK(back.alpha() == alg.alpha());
  CHECK_THROWS_AS(parse_algebra("functor: Pow\natoms: a0\na0 -> {}\n"), ParseError);
  CHECK_THROWS_AS(parse_algebra("functor: Pow\natoms: a0\ndual: a0 -> {b}\n"), ShapeError);

  std::mt19937_64 rng(8);
  for (const auto& t : covering_functors()) {
    const LAlgebra r = random_lalgebra(t, 2, rng);
    CHECK(parse_algebra(show_algebra(r)).alpha() == r.alpha());
  }
}
