#include "coalog/error.hpp"
#include "coalog/lindenbaum.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace coalog;

namespace {

Subset bits(std::size_t n, std::initializer_list<std::size_t> xs) {
  Subset s(n);
  for (auto x : xs) s.set(x);
  return s;
}

bool state_level(const FunctorExpr& t, const Equation& e) {
  return typecheck_formula(t, e.lhs) && typecheck_formula(t, e.rhs);
}

std::vector<std::string> vars_of(const Equation& e) {
  auto v = variables(e.lhs);
  for (const auto& x : variables(e.rhs))
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  return v;
}

} // namespace

TEST_CASE("stage sizes") {
  const auto pow = parse_functor("Pow");
  CHECK(build_stage(pow, {"p"}, 0).algebra.atom_count() == 2);
  CHECK(build_stage(pow, {"p"}, 1).algebra.atom_count() == 8);
  CHECK(build_stage(parse_functor("Const{a,b}"), {}, 1).algebra.atom_count() == 2);
  CHECK(build_stage(pow, {"p"}, 2).algebra.atom_count() == 2 * 256);
  CHECK(build_stage(pow, {"p", "q"}, 1).algebra.atom_count() == 64);
  CHECK_THROWS_AS(build_stage(pow, {"p", "q"}, 2), ResourceLimit);
  CHECK_THROWS_AS(Lindenbaum(pow, {"p", "p"}), ShapeError);

  const auto z = build_stage(pow, {"p"}, 1);
  // atom (w, t) at w * |T| + t
  CHECK(z.valuation(5) == 1);
  CHECK(z.value(5) == TValue::set({TValue::leaf(0)}));
}

TEST_CASE("connecting maps are injective") {
  for (const char* s : {"Pow", "Id + Id", "Const{a} * Id", "Nbhd", "Pow . Pow", "Const{a,b}", "Id"}) {
    const auto t = parse_functor(s);
    const std::vector<std::string> vars = t.contains(FunctorExpr::Kind::Nbhd) || t.str() == "Pow . Pow"
                                              ? std::vector<std::string>{}
                                              : std::vector<std::string>{"p"};
    Lindenbaum z(t, vars);
    for (std::size_t n = 1; n <= 2; ++n) {
      const auto& st = z.stage(n);
      REQUIRE(st.embedding);
      CHECK_MESSAGE(st.embedding->injective(), s << " stage " << n);
      CHECK(st.embedding->src().atom_count() == z.stage(n - 1).algebra.atom_count());
    }
  }
}

TEST_CASE("evaluation in stages") {
  const auto pow = parse_functor("Pow");
  Lindenbaum z(pow, {"p"});
  CHECK(z.eval(1, Formula::top()) == full_subset(8));
  // box false: the atoms (w, {})
  CHECK(z.eval(1, parse_formula("box false")) == bits(8, {0, 4}));
  CHECK(z.eval(1, parse_formula("p | ~p")) == full_subset(8));
  CHECK(z.eval(0, parse_formula("p")) == bits(2, {1}));
  CHECK_THROWS_AS(z.eval(0, parse_formula("box p")), ShapeError);
  CHECK_THROWS_AS(z.eval(1, parse_formula("box q")), ShapeError);
}

TEST_CASE("embedding coherence") {
  std::mt19937_64 rng(8);
  for (const char* s : {"Pow", "Id + Id", "Const{a} * Id", "Const{a,b} + Id", "Nbhd", "Pow . Pow"}) {
    const auto t = parse_functor(s);
    const bool small = t.contains(FunctorExpr::Kind::Nbhd) || t.str() == "Pow . Pow";
    const std::vector<std::string> vars = small ? std::vector<std::string>{} : std::vector<std::string>{"p"};
    Lindenbaum z(t, vars);
    testsupport::FormulaGen gen(t, vars, rng);
    for (int i = 0; i < 60; ++i) {
      const Formula f = gen.state(1);
      const std::size_t d = modal_depth(t, f);
      for (std::size_t n = d; n < 2; ++n) {
        const auto& j = z.stage(n + 1).embedding;
        CHECK_MESSAGE(j->apply(z.eval(n, f)) == z.eval(n + 1, f), s << ": " << show(f));
      }
    }
  }
}

TEST_CASE("deciding equations") {
  const auto pow = parse_functor("Pow");
  const std::vector<std::string> pq{"p", "q"};
  CHECK(decide_equation(pow, pq, parse_formula("box (p & q)"), parse_formula("box p & box q")));
  CHECK(decide_equation(pow, pq, parse_formula("(box (p -> q) & box p) -> box q"), Formula::top()));
  CHECK(!decide_equation(pow, pq, parse_formula("box (p | q)"), parse_formula("box p | box q")));
  CHECK(!decide_equation(pow, pq, parse_formula("box p"), parse_formula("p")));
  // depth 2 in a depth-1 language
  CHECK(decide_equation(pow, {"p"}, parse_formula("box box true"), Formula::top()));
  CHECK(!decide_equation(pow, {"p"}, parse_formula("box box p"), parse_formula("box p")));
  CHECK_THROWS_AS(decide_equation(pow, {"p"}, parse_formula("box q"), Formula::top()), ShapeError);
  CHECK_THROWS_AS(decide_equation(pow, {"p", "q"}, parse_formula("box box p"), Formula::top()), ResourceLimit);
  // Nbhd is not monotone
  CHECK(!decide_equation(parse_functor("Nbhd"), {"p", "q"}, parse_formula("box (p & q) -> box p"), Formula::top()));
  CHECK(decide_sequent(pow, pq, parse_sequent("box (p & q) <= box p")));
  CHECK(!decide_sequent(pow, pq, parse_sequent("box p <= box (p & q)")));
  const auto sum = parse_functor("Id + Id");
  CHECK(decide_equation(sum, {"p"}, parse_formula("~[k1] p"), parse_formula("[k2] true | [k1] ~p")));
  CHECK(decide_equation(sum, {"p"}, parse_formula("[k1] p & [k2] p"), Formula::bot()));
}

TEST_CASE("characteristic formulas") {
  for (const char* s : {"Pow", "Id + Id", "Const{a} * Id", "Const{a,b} + Id", "Nbhd", "Pow . Pow", "Pow . (Const{a,b} * Id)"}) {
    const auto t = parse_functor(s);
    const bool small = t.contains(FunctorExpr::Kind::Nbhd) || t.str() != "Pow";
    Lindenbaum z(t, small ? std::vector<std::string>{"p"} : std::vector<std::string>{"p", "q"});
    const std::size_t atoms = z.stage(1).algebra.atom_count();
    for (std::size_t a = 0; a < atoms; ++a) {
      const Formula f = z.atom_formula(1, a);
      REQUIRE_NOTHROW(typecheck(t, f));
      CHECK_MESSAGE(z.eval(1, f) == singleton(atoms, a), s << " atom " << a);
    }
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
      Subset e(atoms);
      for (std::size_t a = 0; a < atoms; ++a)
        if (rng() % 4 == 0 || i % 2) e[a] = rng() & 1u;
      CHECK(z.eval(1, z.element_formula(1, e)) == e);
    }
  }
  Lindenbaum z(parse_functor("Pow"), {"p"});
  for (std::size_t a = 0; a < 512; a += 37) CHECK(z.eval(2, z.atom_formula(2, a)) == singleton(512, a));
}

TEST_CASE("derivable equations hold in every model") {
  std::mt19937_64 rng(4);
  for (const char* s : {"Pow", "Id + Id", "Nbhd", "Const{a} * Id"}) {
    const auto t = parse_functor(s);
    const std::vector<std::string> vars{"p"};
    Lindenbaum z(t, vars);
    testsupport::FormulaGen gen(t, vars, rng);
    const std::size_t max = t.contains(FunctorExpr::Kind::Nbhd) ? 2 : 4;
    for (int i = 0; i < 25; ++i) {
      const Formula f = gen.state(1);
      if (modal_depth(t, f) > 1) continue;
      // the normal form is derivably equal by construction
      const Formula g = z.element_formula(1, z.eval(1, f));
      REQUIRE(decide_equation(t, vars, f, g));
      for (std::size_t n = 1; n <= max; ++n) {
        for (int k = 0; k < 10; ++k) {
          const Coalgebra c = random_coalgebra(t, n, rng);
          const auto h = testsupport::random_valuation(n, vars, rng);
          ModelChecker mc(c, h);
          CHECK_MESSAGE(mc.eval(f) == mc.eval(g), s << ": " << show(f));
        }
      }
    }
  }
}

TEST_CASE("every non-theorem of the depth-1 fragment has a small countermodel") {
  const auto pow = parse_functor("Pow");
  Lindenbaum z(pow, {"p"});
  const std::size_t atoms = z.stage(1).algebra.atom_count();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << atoms); ++m) {
    const Subset e = subset_from_mask(atoms, m);
    const Formula f = z.element_formula(1, e);
    const bool valid = decide_equation(pow, {"p"}, f, Formula::top());
    CHECK(valid == e.all());
    const auto cm = countermodel_search(pow, {}, Sequent{Formula::top(), f}, 4, {"p"});
    CHECK_MESSAGE(valid == !cm.has_value(), show(f));
    if (cm) CHECK(!model_check(cm->model, cm->valuation, f).test(cm->state));
  }
}

TEST_CASE("countermodel search") {
  const auto pow = parse_functor("Pow");
  const auto cm = countermodel_search(pow, {}, parse_sequent("box p <= p"), 2, {});
  REQUIRE(cm);
  CHECK(cm->model.size() == 1);
  const Subset bp = model_check(cm->model, cm->valuation, parse_formula("box p"));
  const Subset p = model_check(cm->model, cm->valuation, parse_formula("p"));
  CHECK(bp.test(cm->state));
  CHECK(!p.test(cm->state));

  CHECK(!countermodel_search(pow, {}, parse_sequent("true <= box true"), 3, {}));
  CHECK(!countermodel_search(pow, {}, parse_sequent("box p <= p"), 0, {}));
  const auto g = countermodel_search(pow, {parse_sequent("true <= box false")}, parse_sequent("true <= false"), 1, {});
  REQUIRE(g);
  CHECK(g->model(0) == TValue::set({}));

  // global assumptions: under p <= box p (p persists), box p <= p still fails
  const auto a = countermodel_search(pow, {parse_sequent("p <= box p")}, parse_sequent("box p <= p"), 3, {});
  REQUIRE(a);
  ModelChecker mc(a->model, a->valuation);
  CHECK(mc.eval(parse_formula("p")).is_subset_of(mc.eval(parse_formula("box p"))));
  // the goal among the assumptions
  CHECK(!countermodel_search(pow, {parse_sequent("true <= box p -> p")}, parse_sequent("box p <= p"), 3, {}));

  // pruning changes the order only
  std::mt19937_64 rng(6);
  testsupport::FormulaGen gen(pow, {"p", "q"}, rng);
  for (int i = 0; i < 40; ++i) {
    const Sequent goal{Formula::top(), gen.state(2)};
    const auto x = countermodel_search(pow, {}, goal, 2, {"p", "q"}, true);
    const auto y = countermodel_search(pow, {}, goal, 2, {"p", "q"}, false);
    CHECK(x.has_value() == y.has_value());
    if (x && y) CHECK(x->model.size() == y->model.size());
  }
  ScopedLimit tiny(100);
  CHECK_THROWS_AS(countermodel_search(pow, {}, parse_sequent("true <= box true"), 4, {}), ResourceLimit);
}

TEST_CASE("derivation parsing") {
  const auto d = parse_derivation(
      "# comment\n"
      "1: axiom pow.meet with a := p, b := ~q\n"
      "\n"
      "2: sym 1   : box p & box ~q = box (p & ~q)\n"
      "3: trans 1 2\n"
      "4: cong box (3)\n"
      "5: subst 4 with p := q\n"
      "6: refl box p\n"
      "7: cong & (5, 6)\n");
  REQUIRE(d.steps.size() == 7);
  CHECK(d.steps[0].rule == DerivationStep::Rule::Axiom);
  CHECK(d.steps[0].subst.size() == 2);
  CHECK(d.steps[1].claim.has_value());
  CHECK(d.steps[3].name == "box");
  CHECK(d.steps[6].premises == std::vector<std::size_t>{5, 6});
  CHECK_THROWS_AS(parse_derivation("1 axiom x"), ParseError);
  CHECK_THROWS_AS(parse_derivation("a: refl p"), ParseError);
  CHECK_THROWS_AS(parse_derivation("1: frobnicate 2"), ParseError);
  CHECK_THROWS_AS(parse_derivation("1: subst 2"), ParseError);
  CHECK_THROWS_AS(parse_derivation("1: trans 2"), ParseError);
  CHECK_THROWS_AS(parse_derivation("1: axiom pow.top with a = p"), ParseError);
  CHECK_THROWS_AS(parse_derivation("1: refl (p"), ParseError);
}

TEST_CASE("derivation checking") {
  const auto pow = parse_functor("Pow");
  auto check = [&](const std::string& text) { return check_derivation(pow, parse_derivation(text)); };
  CHECK(check("1: axiom pow.top : box true = true").ok);
  CHECK(check("1: axiom pow.top\n2: sym 1 : true = box true").ok);
  CHECK(check("1: axiom and_comm with x := p, y := q\n2: cong box (1) : box (p & q) = box (q & p)").ok);
  const auto bad = check("1: axiom and_comm with x := p, y := q\n2: cong box (1) : box (p & q) = box false");
  CHECK(!bad.ok);
  CHECK(bad.failed_step == 2);
  CHECK(!check("1: axiom and_comm\n2: axiom or_comm\n3: trans 1 2").ok);
  CHECK(!check("1: axiom nosuch").ok);
  CHECK(!check("1: sym 2").ok);
  CHECK(!check("1: refl p\n1: refl q").ok);
  CHECK(!check("1: refl p\n2: cong [p1] (1)").ok);
  CHECK(!check("1: refl p\n2: cong & (1)").ok);
  CHECK(!check("1: axiom pow.top with z := p").ok);
  // a real proof: box distributes over a three-way meet
  const auto r = check(
      "1: axiom pow.meet with a := p, b := q & r\n"
      "2: axiom pow.meet with a := q, b := r\n"
      "3: refl box p\n"
      "4: cong & (3, 2)\n"
      "5: trans 1 4 : box (p & (q & r)) = box p & (box q & box r)\n");
  CHECK(r.ok);
  CHECK(r.conclusions.size() == 5);
  CHECK(decide_equation(pow, {"p", "q", "r"}, r.conclusions.back().lhs, r.conclusions.back().rhs));
  // composite functors name their nested axioms by path
  const auto pc = parse_functor("Pow . (Const{a,b} * Id)");
  const auto n = check_derivation(pc, parse_derivation("1: axiom box.p1/const.cover\n2: cong [p1] (1)\n3: cong box (2)"));
  CHECK(n.ok);
  CHECK(show(n.conclusions.back()) == "box [p1] ('a | 'b) = box [p1] true");
}

namespace {

// Random well-formed derivations built from the rules.
class ProofGen {
public:
  ProofGen(FunctorExpr t, std::mt19937_64& rng) : t_(std::move(t)), rng_(rng), gen_(t_, {"p"}, rng) {
    for (const auto& [name, eq] : boolean_axioms()) names_.push_back(name);
    for (const auto& e : derive_axioms(t_)) {
      names_.push_back(e.name);
      layers_[e.name] = e.vars;
    }
  }

  std::string text(int steps) {
    std::string out;
    for (int k = 1; k <= steps; ++k) out += std::to_string(k) + ": " + step(k) + "\n";
    return out;
  }

private:
  std::string step(int k) {
    const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); };
    const auto earlier = [&] { return std::to_string(1 + pick(k - 1)); };
    const std::size_t r = k == 1 ? 0 : pick(6);
    switch (r) {
    case 1: return "sym " + earlier();
    case 2: {
      const auto j = earlier();
      return "trans " + j + " " + j;  // only valid when the step is reflexive-shaped
    }
    case 3: return "cong " + std::string(pick(2) ? "box" : "~") + " (" + earlier() + ")";
    case 4: return "cong & (" + earlier() + ", " + earlier() + ")";
    case 5: return "subst " + earlier() + " with p := " + show(gen_.state(1));
    default: {
      const auto& name = names_[pick(names_.size())];
      std::string s = "axiom " + name;
      std::vector<std::string> parts;
      if (auto it = layers_.find(name); it != layers_.end()) {
        for (const auto& [v, layer] : it->second) parts.push_back(v + " := " + show(gen_.at(layer, 0, 1)));
      } else {
        for (const char* v : {"x", "y", "z"}) parts.push_back(std::string(v) + " := " + show(gen_.state(1)));
      }
      if (!parts.empty()) {
        s += " with ";
        for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
      }
      return s;
    }
    }
  }

  FunctorExpr t_;
  std::mt19937_64& rng_;
  testsupport::FormulaGen gen_;
  std::vector<std::string> names_;
  std::map<std::string, VarLayers> layers_;
};

} // namespace

TEST_CASE("accepted derivations conclude derivable equations") {
  std::mt19937_64 rng(21);
  std::size_t checked = 0;
  for (const char* s : {"Pow", "Id + Id", "Nbhd", "Const{a,b}", "Pow . Pow"}) {
    const auto t = parse_functor(s);
    ProofGen gen(t, rng);
    for (int i = 0; i < 60; ++i) {
      const auto d = parse_derivation(gen.text(6));
      const auto res = check_derivation(t, d);
      // a failing step still leaves the earlier conclusions valid
      for (const auto& e : res.conclusions) {
        if (!state_level(t, e)) continue;
        const auto vars = vars_of(e);
        bool derivable = false;
        try {
          derivable = decide_equation(t, vars, e.lhs, e.rhs);
        } catch (const ResourceLimit&) {
          continue;
        }
        CHECK_MESSAGE(derivable, s << ": " << show(e));
        ++checked;
      }
    }
  }
  CHECK(checked > 300);
}
