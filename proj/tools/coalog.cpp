// Command-line front end. Exit codes: 0 ok, 1 claim fails, 2 usage/parse/shape
// error, 3 resource limit.

#include "coalog/duality.hpp"
#include "coalog/error.hpp"
#include "coalog/io.hpp"
#include "coalog/lindenbaum.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>

using namespace coalog;

namespace {

constexpr int kOk = 0, kFail = 1, kUsage = 2, kLimit = 3;

std::vector<std::string> split_vars(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::vector<std::string> vars_of(std::initializer_list<Formula> fs) {
  std::vector<std::string> out;
  for (const auto& f : fs)
    for (const auto& v : variables(f))
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------- derive

int cmd_derive(const std::string& functor) {
  const FunctorExpr t = parse_functor(functor);
  const Signature sig = derive_signature(t);
  std::cout << "functor: " << t.str() << "\noperators:\n";
  for (const auto& op : sig.operators()) std::cout << "  " << op << "\n";
  std::cout << "axioms:\n";
  for (const auto& e : derive_axioms(sig)) std::cout << "  " << show(e) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- mc, bisim

int cmd_mc(const std::string& model, const std::string& valuation, const std::string& formula) {
  const Coalgebra c = parse_model(read_file(model));
  const Valuation h = valuation.empty() ? Valuation{} : parse_valuation(read_file(valuation), c.carrier());
  const Formula f = parse_formula(c.functor(), formula);
  std::cout << show_states(model_check(c, h, f), c.carrier()) << "\n";
  return kOk;
}

int cmd_bisim(const std::vector<std::string>& models) {
  if (models.empty() || models.size() > 2) throw CLI::ValidationError("--model", "give one or two model files");
  const Coalgebra c1 = parse_model(read_file(models[0]));
  if (models.size() == 1) {
    std::cout << show_partition(behavioural_partition(c1));
    return kOk;
  }
  const Coalgebra c2 = parse_model(read_file(models[1]));
  std::cout << show_partition(behavioural_partition(coproduct_coalgebra(c1, c2).sum));
  return kOk;
}

// ---------------------------------------------------------------- decide, counter, proof

int cmd_decide(const std::string& functor, const std::string& vars, const std::string& lhs, const std::string& rhs) {
  const FunctorExpr t = parse_functor(functor);
  const Formula l = parse_formula(t, lhs), r = parse_formula(t, rhs);
  const auto vs = vars.empty() ? vars_of({l, r}) : split_vars(vars);
  const bool ok = decide_equation(t, vs, l, r);
  std::cout << (ok ? "derivable" : "not derivable") << "\n";
  return ok ? kOk : kFail;
}

int cmd_counter(const std::string& functor, const std::vector<std::string>& assume, const std::string& goal,
                std::size_t max_size, const std::string& vars, bool no_prune) {
  const FunctorExpr t = parse_functor(functor);
  std::vector<Sequent> gamma;
  std::vector<std::string> vs = vars.empty() ? std::vector<std::string>{} : split_vars(vars);
  auto add_vars = [&](const Sequent& s) {
    if (!vars.empty()) return;
    for (const auto& v : vars_of({s.lhs, s.rhs}))
      if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
  };
  for (const auto& a : assume) {
    gamma.push_back(parse_sequent(t, a));
    add_vars(gamma.back());
  }
  const Sequent g = parse_sequent(t, goal);
  add_vars(g);
  const auto cm = countermodel_search(t, gamma, g, max_size, vs, !no_prune);
  if (!cm) {
    std::cout << "exhausted\n";
    return kOk;
  }
  std::cout << show_coalgebra(cm->model) << "valuation:\n";
  std::istringstream vals(show_valuation(cm->valuation, cm->model.carrier()));
  for (std::string line; std::getline(vals, line);) std::cout << "  " << line << "\n";
  std::cout << "state: " << cm->model.carrier().label(cm->state) << "\n";
  return kFail;
}

int cmd_proof(const std::string& functor, const std::string& file) {
  const FunctorExpr t = parse_functor(functor);
  const Derivation d = parse_derivation(read_file(file));
  const DerivationResult r = check_derivation(t, d);
  for (std::size_t i = 0; i < r.conclusions.size(); ++i)
    std::cout << d.steps[i].label << ": " << show(r.conclusions[i]) << "\n";
  if (!r.ok) {
    std::cout << "step " << r.failed_step << " invalid: " << r.reason << "\n";
    return kFail;
  }
  std::cout << "valid\n";
  return kOk;
}

// ---------------------------------------------------------------- verify

struct Verify {
  std::vector<FunctorExpr> functors;
  std::size_t max_size = 3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::optional<Coalgebra> model;
  std::size_t passed = 0, failed = 0;

  void report(bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    (ok ? passed : failed)++;
  }

  // The given model, or `trials` random ones with 1..max_size states.
  template <class F>
  void coalgebras(const FunctorExpr& t, std::mt19937_64& rng, F&& f) {
    if (model) return f(*model);
    for (std::size_t i = 0; i < trials; ++i) f(random_coalgebra(t, 1 + i % std::max<std::size_t>(max_size, 1), rng));
  }

  void delta_iso(const FunctorExpr& t) {
    for (std::size_t x = 0; x <= max_size; ++x) {
      const auto r = check_delta_iso(t, x);
      report(r.ok, "delta-iso " + r.detail);
    }
  }

  void h_section(const FunctorExpr& t) {
    for (std::size_t n = 0; n <= max_size; ++n) {
      const FinBA a{FinSet(n)};
      const FinFn d = delta_star(t, a), h = h_generic(t, a);
      const bool ok = compose(h, d) == FinFn::identity(d.dom()) && compose(d, h) == FinFn::identity(h.dom());
      report(ok, "h-section " + t.str() + ", " + std::to_string(n) + " atoms: |T S A| = " +
                     std::to_string(d.dom().size()) + ", h . delta* = id and delta* . h = id");
    }
  }

  void h_explicit(const FunctorExpr& t) {
    const bool pow = t.kind() == FunctorExpr::Kind::Pow, nbhd = t.kind() == FunctorExpr::Kind::Nbhd;
    if (!pow && !nbhd) {
      std::cout << "SKIP h-explicit " << t.str() << ": explicit formulas exist for Pow and Nbhd only\n";
      return;
    }
    for (std::size_t n = 0; n <= max_size; ++n) {
      const FinBA a{FinSet(n)};
      const bool ok = (pow ? h_explicit_pow(a) : h_explicit_nbhd(a)) == h_generic(t, a);
      report(ok, "h-explicit " + t.str() + ", " + std::to_string(n) + " atoms");
    }
    if (!pow) return;
    for (std::size_t n = 0; n <= std::min<std::size_t>(max_size, 2); ++n) {
      bool ok = true;
      for_each_lalgebra(t, n, [&](const LAlgebra& alg) { return ok = r_box(alg) == r_box_by_filters(alg); });
      report(ok, "r-box " + std::to_string(n) + " atoms: every L-algebra, R = largest relation with box a in x => y in a");
    }
  }

  void jt(const FunctorExpr& t, std::mt19937_64& rng) {
    std::size_t count = 0;
    std::optional<std::string> bad;
    coalgebras(t, rng, [&](const Coalgebra& c) {
      ++count;
      const JtReport r = verify_jt_embedding(complex_algebra(c));
      if (!r.ok && !bad) bad = r.reason + "\n" + show_coalgebra(c);
    });
    report(!bad, "jt " + t.str() + ": complex algebras of " + std::to_string(count) + " coalgebras" +
                     (bad ? "; " + *bad : ""));
    if (model) return;
    for (std::size_t n = 0; n <= std::min<std::size_t>(max_size, 2); ++n) {
      std::size_t all = 0;
      bad.reset();
      for_each_lalgebra(t, n, [&](const LAlgebra& alg) {
        ++all;
        const JtReport r = verify_jt_embedding(alg);
        if (!r.ok) bad = r.reason + "\n" + show_algebra(alg);
        return r.ok;
      });
      report(!bad, "jt " + t.str() + ": all " + std::to_string(all) + " L-algebras on " + std::to_string(n) + " atoms" +
                       (bad ? "; " + *bad : ""));
    }
  }

  void expressivity(const FunctorExpr& t, std::mt19937_64& rng) {
    std::size_t count = 0;
    std::optional<std::string> bad;
    coalgebras(t, rng, [&](const Coalgebra& c) {
      ++count;
      if (!bad && !(logical_partition(c) == behavioural_partition(c))) bad = show_coalgebra(c);
    });
    report(!bad, "expressivity " + t.str() + ": logical = behavioural partition on " + std::to_string(count) +
                     " coalgebras" + (bad ? "; " + *bad : ""));
  }

  void soundness(const FunctorExpr& t) {
    for (const auto& e : derive_axioms(t)) {
      const auto w = check_soundness(t, e, max_size);
      report(!w, "soundness " + t.str() + " " + show(e) + (w ? "; " + w->describe(t, e) : ""));
    }
  }

  void roundtrip(const FunctorExpr& t, std::mt19937_64& rng) {
    std::size_t count = 0;
    std::optional<std::string> bad;
    coalgebras(t, rng, [&](const Coalgebra& c) {
      ++count;
      if (!bad && !round_trip(c)) bad = show_coalgebra(c);
    });
    report(!bad, "roundtrip " + t.str() + ": " + std::to_string(count) + " coalgebras" + (bad ? "; " + *bad : ""));
  }
};

int cmd_verify(const std::string& suite, const std::string& functor, bool all, const std::string& model_file,
               std::size_t max_size, std::uint64_t seed, std::size_t trials) {
  Verify v;
  v.max_size = max_size;
  v.seed = seed;
  v.trials = trials;
  if (!model_file.empty()) {
    v.model = parse_model(read_file(model_file));
    v.functors = {v.model->functor()};
  } else if (all) {
    v.functors = covering_functors();
  } else if (!functor.empty()) {
    v.functors = {parse_functor(functor)};
  } else {
    throw CLI::ValidationError("verify", "give --functor, --all or --model");
  }
  for (const auto& t : v.functors) {
    std::mt19937_64 rng(seed);
    if (suite == "delta-iso") v.delta_iso(t);
    else if (suite == "h-section") v.h_section(t);
    else if (suite == "h-explicit") v.h_explicit(t);
    else if (suite == "jt") v.jt(t, rng);
    else if (suite == "expressivity") v.expressivity(t, rng);
    else if (suite == "soundness") v.soundness(t);
    else if (suite == "roundtrip") v.roundtrip(t, rng);
  }
  std::cout << v.passed << " passed, " << v.failed << " failed\n";
  return v.failed == 0 ? kOk : kFail;
}

// ---------------------------------------------------------------- liftings, jt

int cmd_liftings(const std::string& functor, std::size_t arity, bool count_only) {
  const FunctorExpr t = parse_functor(functor);
  if (arity > 6) throw ResourceLimit("liftings: 2^" + std::to_string(arity) + " argument values", sat_pow2(arity));
  if (count_only) {
    const std::uint64_t k = card(t, std::uint64_t{1} << arity);
    if (k == UINT64_MAX) std::cout << "at least 2^64\n";
    else if (k > 63) std::cout << "2^" << k << "\n";
    else std::cout << (std::uint64_t{1} << k) << "\n";
    return kOk;
  }
  check_card(lifting_count(t, arity), "canonical liftings of " + t.str() + " of arity " + std::to_string(arity));
  // argument values w in 2^n print as bit strings, argument 1 first
  std::vector<std::string> labels;
  for (std::size_t w = 0; w < (std::size_t{1} << arity); ++w) {
    std::string s;
    for (std::size_t i = 0; i < arity; ++i) s += (w >> i & 1) ? '1' : '0';
    labels.push_back(arity == 0 ? "*" : s);
  }
  const TSet ts = apply_obj(t, FinSet(labels));
  for_each_lifting(t, arity, [&](const CanonicalLifting& l) {
    std::string line = "{";
    bool first = true;
    for (std::size_t i : members(l.extent)) {
      line += (first ? "" : ", ") + ts.label(i);
      first = false;
    }
    std::cout << line << "}\n";
    return true;
  });
  return kOk;
}

int cmd_jt(const std::string& file) {
  const LAlgebra alg = parse_algebra(read_file(file));
  std::cout << show_coalgebra(jt_coalgebra(alg));
  const JtReport r = verify_jt_embedding(alg);
  std::cout << "embedding: " << (r.ok ? "ok" : "fails") << " (" << (r.all_elements ? "all elements" : "atoms")
            << " of L A checked)" << (r.ok ? "" : "; " + r.reason) << "\n";
  return r.ok ? kOk : kFail;
}

std::uint64_t parse_limit(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("limit", "expected a non-negative integer, got '" + s + "'");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalgebraic modal logic workbench"};
  app.require_subcommand(1);
  std::string limit;
  app.add_option("--limit", limit, "cardinality bound for enumerations (default 2^20, or COALOG_LIMIT)");

  std::string functor, vars, formula, lhs, rhs, goal, valuation, file, suite = "delta-iso";
  std::vector<std::string> models, assume;
  std::size_t max_size = 3, trials = 100, arity = 1;
  std::uint64_t seed = 1;
  bool all = false, count_only = false, no_prune = false;
  int code = kOk;

  auto* derive = app.add_subcommand("derive", "print the derived operators and axioms");
  derive->add_option("--functor", functor)->required();

  auto* mc = app.add_subcommand("mc", "print the states satisfying a formula");
  mc->add_option("--model", models)->required()->expected(1);
  mc->add_option("--valuation", valuation);
  mc->add_option("--formula", formula)->required();

  auto* bisim = app.add_subcommand("bisim", "print the behavioural equivalence classes");
  bisim->add_option("--model", models)->required()->expected(1, 2)->take_all();

  auto* decide = app.add_subcommand("decide", "decide derivability of LHS = RHS");
  decide->add_option("--functor", functor)->required();
  decide->add_option("--vars", vars, "comma-separated; default: the variables of both sides");
  decide->add_option("--lhs", lhs)->required();
  decide->add_option("--rhs", rhs)->required();

  auto* counter = app.add_subcommand("counter", "search for a countermodel to a global consequence");
  counter->add_option("--functor", functor)->required();
  counter->add_option("--assume", assume)->take_all();
  counter->add_option("--goal", goal)->required();
  counter->add_option("--max-size", max_size);
  counter->add_option("--vars", vars);
  counter->add_flag("--no-prune", no_prune, "try every valuation, not one per isomorphism class of codes");

  auto* proof = app.add_subcommand("proof", "check an equational derivation");
  proof->add_option("--functor", functor)->required();
  proof->add_option("--file", file)->required();

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite)
      ->required()
      ->check(CLI::IsMember({"delta-iso", "h-section", "h-explicit", "jt", "expressivity", "soundness", "roundtrip"}));
  auto* vf = verify->add_option("--functor", functor);
  verify->add_flag("--all", all)->excludes(vf);
  verify->add_option("--model", file, "run the jt, expressivity or roundtrip suite on this model");
  verify->add_option("--max-size", max_size);
  verify->add_option("--seed", seed);
  verify->add_option("--trials", trials);

  auto* liftings = app.add_subcommand("liftings", "enumerate canonical predicate liftings");
  liftings->add_option("--functor", functor)->required();
  liftings->add_option("--arity", arity)->required();
  liftings->add_flag("--count-only", count_only);

  auto* jt = app.add_subcommand("jt", "build and check the Jonsson-Tarski coalgebra of an algebra file");
  jt->add_option("--algebra", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!limit.empty()) set_resource_limit(parse_limit(limit));
    else if (const char* env = std::getenv("COALOG_LIMIT")) set_resource_limit(parse_limit(env));

    if (*derive) code = cmd_derive(functor);
    else if (*mc) code = cmd_mc(models.at(0), valuation, formula);
    else if (*bisim) code = cmd_bisim(models);
    else if (*decide) code = cmd_decide(functor, vars, lhs, rhs);
    else if (*counter) code = cmd_counter(functor, assume, goal, max_size, vars, no_prune);
    else if (*proof) code = cmd_proof(functor, file);
    else if (*verify) code = cmd_verify(suite, functor, all, file, max_size, seed, trials);
    else if (*liftings) code = cmd_liftings(functor, arity, count_only);
    else if (*jt) code = cmd_jt(file);
  } catch (const ResourceLimit& e) {
    std::cout.flush();
    std::cerr << "resource limit: " << e.what() << "\n";
    return kLimit;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}
