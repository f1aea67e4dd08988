#include "coalog/lindenbaum.hpp"

#include "coalog/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace coalog {

// ---------------------------------------------------------------- stages

std::size_t FreeStage::valuation(std::size_t atom) const {
  return values ? atom / values->size() : atom;
}

TValue FreeStage::value(std::size_t atom) const {
  if (!values) throw ShapeError("stage 0 atoms carry no T-value");
  return values->decode(atom % values->size());
}

Lindenbaum::Lindenbaum(FunctorExpr t, std::vector<std::string> vars) : t_(std::move(t)), vars_(std::move(vars)) {
  std::set<std::string> seen;
  for (const auto& v : vars_)
    if (!seen.insert(v).second) throw ShapeError("variable " + v + " listed twice");
}

const FreeStage& Lindenbaum::stage(std::size_t n) {
  if (stages_.empty()) {
    FreeStage z;
    z.algebra = free_ba(vars_);
    z.valuations = z.algebra.atom_count();
    stages_.push_back(std::move(z));
  }
  while (stages_.size() <= n) {
    const std::size_t k = stages_.size();
    const FreeStage& prev = stages_.back();
    const std::uint64_t pa = prev.algebra.atom_count();
    const Carrier tv = Carrier::apply(t_, Carrier::base(pa));
    const std::uint64_t nt = tv.size();
    check_card(sat_mul(prev.valuations, nt), "atoms of stage " + std::to_string(k));

    std::vector<std::string> labels;
    const FinSet plain(pa);
    for (std::uint64_t i = 0; i < nt; ++i) labels.push_back(show_value(tv.decode(i), plain));
    const FinBA valuations = free_ba(vars_);
    Coproduct z = ba_coproduct(valuations, FinBA(FinSet(std::move(labels))));

    FreeStage s;
    s.index = k;
    s.algebra = z.algebra;
    s.valuations = prev.valuations;
    s.values = tv;
    if (k == 1) {
      s.embedding = z.inj_a;
    } else {
      // dual (w, t) ↦ (w, T(dual j)(t))
      const FinFn& back = prev.embedding->dual();
      const Carrier below = *prev.values;
      std::vector<std::size_t> table(z.algebra.atom_count());
      for (std::uint64_t t = 0; t < nt; ++t) {
        LeafMap leaf = [&](const TValue& v) { return TValue::leaf(back(v.index())); };
        const TValue img = map_value(t_, Carrier::base(pa), Carrier::base(back.cod().size()), leaf, tv.decode(t));
        const std::size_t ti = below.encode(img);
        for (std::size_t w = 0; w < s.valuations; ++w) table[w * nt + t] = w * below.size() + ti;
      }
      s.embedding = BAHom(prev.algebra, s.algebra, FinFn(s.algebra.atoms(), prev.algebra.atoms(), std::move(table)));
    }
    stages_.push_back(std::move(s));
  }
  return stages_[n];
}

Subset Lindenbaum::var_set(std::size_t n, std::size_t var) {
  const FreeStage& z = stage(n);
  Subset s(z.algebra.atom_count());
  for (std::size_t a = 0; a < s.size(); ++a)
    if ((z.valuation(a) >> var) & 1u) s.set(a);
  return s;
}

Subset Lindenbaum::eval(std::size_t n, const Formula& f) {
  const FreeStage& z = stage(n);
  VarEnv env;
  for (std::size_t i = 0; i < vars_.size(); ++i) env[vars_[i]] = var_set(n, i);
  LeafEval leaf = [&](const Formula& g) -> Subset {
    if (g.kind() == Formula::Kind::Var) throw ShapeError("variable " + g.name() + " is not among the stage variables");
    if (n == 0) throw ShapeError("formula is deeper than stage " + std::to_string(z.index));
    // a one-step term over Z_{n-1}, lifted along the valuation component
    VarEnv below;
    for (std::size_t i = 0; i < vars_.size(); ++i) below[vars_[i]] = var_set(n - 1, i);
    LeafEval inner = [&](const Formula& h) { return eval(n - 1, h); };
    const Subset s = eval_layer(t_, Layer{t_}, stage(n - 1).algebra.atom_count(), g, below, inner);
    const FreeStage& zn = stage(n);
    const std::size_t nt = zn.values->size();
    Subset out(zn.algebra.atom_count());
    for (auto t = s.find_first(); t != Subset::npos; t = s.find_next(t))
      for (std::size_t w = 0; w < zn.valuations; ++w) out.set(w * nt + t);
    return out;
  };
  return eval_layer(t_, Layer{}, z.algebra.atom_count(), f, env, leaf);
}

Formula Lindenbaum::valuation_formula(std::size_t w) const {
  std::vector<Formula> lits;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    lits.push_back((w >> i) & 1u ? Formula::var(vars_[i]) : ~Formula::var(vars_[i]));
  return big_and(lits);
}

// A formula at `layer` true of exactly the value v, with state leaves read as
// atoms of Z_{n-1}.
Formula Lindenbaum::value_formula(std::size_t n, const Layer& layer_in, const TValue& v) {
  const Layer layer = normalize(layer_in);
  if (layer.empty()) return atom_formula(n - 1, v.index());
  const FunctorExpr top = layer.back();
  auto with = [&](const FunctorExpr& f) {
    Layer l = layer;
    l.back() = f;
    return l;
  };
  Layer below = layer;
  below.pop_back();
  switch (top.kind()) {
  case FunctorExpr::Kind::Const: return Formula::constant(v.name());
  case FunctorExpr::Kind::Sum:
    if (v.kind() == TValue::Kind::InL) return Formula::modal(ModalOp::K1, value_formula(n, with(top.left()), v.child()));
    return Formula::modal(ModalOp::K2, value_formula(n, with(top.right()), v.child()));
  case FunctorExpr::Kind::Prod:
    return Formula::modal(ModalOp::P1, value_formula(n, with(top.left()), v.first())) &
           Formula::modal(ModalOp::P2, value_formula(n, with(top.right()), v.second()));
  case FunctorExpr::Kind::Pow: {
    std::vector<Formula> parts, diamonds;
    for (const auto& u : v.elements()) {
      parts.push_back(value_formula(n, below, u));
      diamonds.push_back(~Formula::modal(ModalOp::Box, ~parts.back()));
    }
    diamonds.insert(diamonds.begin(), Formula::modal(ModalOp::Box, big_or(parts)));
    return big_and(diamonds);
  }
  case FunctorExpr::Kind::Nbhd: {
    const auto all = layer_carrier(below, stage(n - 1).algebra.atom_count()).enumerate("neighbourhood subsets");
    if (all.size() > 16) throw ResourceLimit("characteristic neighbourhood formula", sat_pow2(all.size()));
    std::vector<Formula> forms;
    for (const auto& u : all) forms.push_back(value_formula(n, below, u));
    std::vector<Formula> lits;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << all.size()); ++m) {
      std::vector<TValue> s;
      std::vector<Formula> parts;
      for (std::size_t i = 0; i < all.size(); ++i)
        if ((m >> i) & 1u) {
          s.push_back(all[i]);
          parts.push_back(forms[i]);
        }
      const Formula b = Formula::modal(ModalOp::Box, big_or(parts));
      const bool in = std::binary_search(v.neighbourhoods().begin(), v.neighbourhoods().end(), s);
      lits.push_back(in ? b : ~b);
    }
    return big_and(lits);
  }
  default: throw InvariantViolation("unnormalized layer");
  }
}

Formula Lindenbaum::atom_formula(std::size_t n, std::size_t atom) {
  const FreeStage& z = stage(n);
  if (atom >= z.algebra.atom_count()) throw ShapeError("no such atom");
  const Formula w = valuation_formula(z.valuation(atom));
  if (n == 0) return w;
  return w & value_formula(n, Layer{t_}, z.value(atom));
}

Formula Lindenbaum::element_formula(std::size_t n, const Subset& e) {
  const FreeStage& z = stage(n);
  if (e.size() != z.algebra.atom_count()) throw ShapeError("element is not in stage " + std::to_string(n));
  if (e.count() <= e.size() - e.count()) {
    std::vector<Formula> parts;
    for (auto a = e.find_first(); a != Subset::npos; a = e.find_next(a)) parts.push_back(atom_formula(n, a));
    return big_or(parts);
  }
  std::vector<Formula> parts;
  for (std::size_t a = 0; a < e.size(); ++a)
    if (!e.test(a)) parts.push_back(atom_formula(n, a));
  return ~big_or(parts);
}

FreeStage build_stage(const FunctorExpr& t, const std::vector<std::string>& vars, std::size_t n) {
  Lindenbaum z(t, vars);
  return z.stage(n);
}

Subset eval_in_stage(Lindenbaum& z, std::size_t n, const Formula& f) {
  typecheck(z.functor(), f);
  return z.eval(n, f);
}

bool decide_equation(const FunctorExpr& t, const std::vector<std::string>& vars, const Formula& lhs,
                     const Formula& rhs) {
  typecheck(t, lhs);
  typecheck(t, rhs);
  for (const auto& f : {lhs, rhs})
    for (const auto& v : variables(f))
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw ShapeError("variable " + v + " is not among the declared variables");
  Lindenbaum z(t, vars);
  const std::size_t n = std::max(modal_depth(t, lhs), modal_depth(t, rhs));
  return z.eval(n, lhs) == z.eval(n, rhs);
}

bool decide_sequent(const FunctorExpr& t, const std::vector<std::string>& vars, const Sequent& s) {
  return decide_equation(t, vars, s.lhs & s.rhs, s.lhs);
}

// ---------------------------------------------------------------- derivations

const std::map<std::string, Equation>& boolean_axioms() {
  static const std::map<std::string, Equation> axioms = [] {
    std::map<std::string, Equation> m;
    for (const auto& [name, text] : std::vector<std::pair<std::string, std::string>>{
             {"and_comm", "x & y = y & x"},
             {"or_comm", "x | y = y | x"},
             {"and_assoc", "x & (y & z) = (x & y) & z"},
             {"or_assoc", "x | (y | z) = (x | y) | z"},
             {"and_absorb", "x & (x | y) = x"},
             {"or_absorb", "x | x & y = x"},
             {"and_distrib", "x & (y | z) = x & y | x & z"},
             {"or_distrib", "x | y & z = (x | y) & (x | z)"},
             {"and_top", "x & true = x"},
             {"or_bot", "x | false = x"},
             {"and_compl", "x & ~x = false"},
             {"or_compl", "x | ~x = true"},
             {"imp_def", "x -> y = ~x | y"},
         })
      m.emplace(name, parse_equation(text));
    return m;
  }();
  return axioms;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::size_t parse_label(const std::string& s, std::size_t pos) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("expected a step number, got '" + s + "'", pos);
  return std::stoul(s);
}

Substitution parse_subst(const std::string& text, std::size_t pos) {
  Substitution out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = trim(std::string_view(text).substr(start, end - start));
    const auto eq = item.find(":=");
    if (eq == std::string::npos) throw ParseError("expected 'x := formula' in substitution", pos + start);
    const std::string var = trim(std::string_view(item).substr(0, eq));
    if (var.empty()) throw ParseError("missing variable in substitution", pos + start);
    try {
      out.insert_or_assign(var, parse_formula(std::string_view(item).substr(eq + 2)));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), pos + start);
    }
    start = end + 1;
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (b < i) out.push_back(s.substr(b, i - b));
  }
  return out;
}

} // namespace

Derivation parse_derivation(std::string_view text) {
  Derivation d;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string line(text.substr(line_start, line_end - line_start));
    const std::size_t pos = line_start;
    line_start = line_end + 1;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (trim(line).empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'k: rule ...'", pos);
    DerivationStep s;
    s.label = parse_label(trim(std::string_view(line).substr(0, colon)), pos);
    std::string body = line.substr(colon + 1);
    // a further ':' (not ':=') starts the stated conclusion
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == ':' && (i + 1 >= body.size() || body[i + 1] != '=')) {
        try {
          s.claim = parse_equation(std::string_view(body).substr(i + 1));
        } catch (const ParseError& e) {
          throw ParseError(e.what(), pos + colon + 1 + i + 1 + e.position());
        }
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    const std::size_t body_pos = pos + colon + 1;
    const auto sp = body.find_first_of(" \t");
    const std::string rule = body.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(std::string_view(body).substr(sp));
    auto split_with = [&](const std::string& r) -> std::pair<std::string, std::optional<Substitution>> {
      const auto w = r.find(" with ");
      if (w == std::string::npos) return {trim(r), std::nullopt};
      return {trim(std::string_view(r).substr(0, w)), parse_subst(r.substr(w + 6), body_pos)};
    };
    if (rule == "axiom") {
      s.rule = DerivationStep::Rule::Axiom;
      auto [name, sub] = split_with(rest);
      if (name.empty()) throw ParseError("axiom step needs a name", body_pos);
      s.name = name;
      if (sub) s.subst = *sub;
    } else if (rule == "refl") {
      s.rule = DerivationStep::Rule::Refl;
      try {
        s.term = parse_formula(rest);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), body_pos);
      }
    } else if (rule == "sym" || rule == "trans") {
      s.rule = rule == "sym" ? DerivationStep::Rule::Sym : DerivationStep::Rule::Trans;
      for (const auto& w : words(rest)) s.premises.push_back(parse_label(w, body_pos));
      if (s.premises.size() != (rule == "sym" ? 1u : 2u)) throw ParseError(rule + " takes " + (rule == "sym" ? "one step" : "two steps"), body_pos);
    } else if (rule == "cong") {
      s.rule = DerivationStep::Rule::Cong;
      const auto open = rest.find('(');
      const auto close = rest.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("cong needs an operator and a parenthesized step list", body_pos);
      s.name = trim(std::string_view(rest).substr(0, open));
      std::string list = rest.substr(open + 1, close - open - 1);
      std::replace(list.begin(), list.end(), ',', ' ');
      for (const auto& w : words(list)) s.premises.push_back(parse_label(w, body_pos));
    } else if (rule == "subst") {
      s.rule = DerivationStep::Rule::Subst;
      auto [j, sub] = split_with(rest);
      if (!sub) throw ParseError("subst needs 'with x := formula'", body_pos);
      s.premises.push_back(parse_label(j, body_pos));
      s.subst = *sub;
    } else {
      throw ParseError("unknown rule '" + rule + "'", body_pos);
    }
    d.steps.push_back(std::move(s));
  }
  return d;
}

namespace {

struct StepFailure {
  std::string reason;
};

Formula apply_op(const std::string& op, const std::vector<Formula>& args) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw StepFailure{"operator " + op + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") +
                        ", given " + std::to_string(args.size())};
  };
  if (op == "~") return need(1), ~args[0];
  if (op == "&") return need(2), args[0] & args[1];
  if (op == "|") return need(2), args[0] | args[1];
  if (op == "->") return need(2), args[0].implies(args[1]);
  static const std::map<std::string, ModalOp> modal{{"box", ModalOp::Box}, {"[k1]", ModalOp::K1}, {"[k2]", ModalOp::K2},
                                                    {"[p1]", ModalOp::P1}, {"[p2]", ModalOp::P2}};
  auto it = modal.find(op);
  if (it == modal.end()) throw StepFailure{"unknown operator " + op};
  need(1);
  return Formula::modal(it->second, args[0]);
}

} // namespace

DerivationResult check_derivation(const FunctorExpr& t, const Derivation& d) {
  DerivationResult res;
  std::map<std::size_t, Equation> done;
  const auto derived = derive_axioms(t);
  for (const auto& s : d.steps) {
    try {
      if (done.count(s.label)) throw StepFailure{"step " + std::to_string(s.label) + " is numbered twice"};
      std::vector<Equation> prem;
      for (auto j : s.premises) {
        auto it = done.find(j);
        if (it == done.end()) throw StepFailure{"step " + std::to_string(j) + " is not an earlier step"};
        prem.push_back(it->second);
      }
      std::optional<Equation> eq;
      switch (s.rule) {
      case DerivationStep::Rule::Axiom: {
        std::optional<Equation> scheme;
        if (auto it = boolean_axioms().find(s.name); it != boolean_axioms().end()) scheme = it->second;
        for (const auto& e : derived)
          if (e.name == s.name) scheme = e.eq;
        if (!scheme) throw StepFailure{"no axiom named " + s.name};
        const auto lv = variables(scheme->lhs), rv = variables(scheme->rhs);
        for (const auto& [v, f] : s.subst)
          if (std::find(lv.begin(), lv.end(), v) == lv.end() && std::find(rv.begin(), rv.end(), v) == rv.end())
            throw StepFailure{"axiom " + s.name + " has no variable " + v};
        eq = Equation{substitute(scheme->lhs, s.subst), substitute(scheme->rhs, s.subst)};
        break;
      }
      case DerivationStep::Rule::Refl: eq = Equation{*s.term, *s.term}; break;
      case DerivationStep::Rule::Sym: eq = Equation{prem[0].rhs, prem[0].lhs}; break;
      case DerivationStep::Rule::Trans:
        if (!(prem[0].rhs == prem[1].lhs))
          throw StepFailure{"steps do not chain: " + show(prem[0].rhs) + " is not " + show(prem[1].lhs)};
        eq = Equation{prem[0].lhs, prem[1].rhs};
        break;
      case DerivationStep::Rule::Cong: {
        std::vector<Formula> l, r;
        for (const auto& p : prem) {
          l.push_back(p.lhs);
          r.push_back(p.rhs);
        }
        eq = Equation{apply_op(s.name, l), apply_op(s.name, r)};
        break;
      }
      case DerivationStep::Rule::Subst:
        eq = Equation{substitute(prem[0].lhs, s.subst), substitute(prem[0].rhs, s.subst)};
        break;
      }
      VarLayers vars;
      try {
        typecheck_equation(t, *eq, vars);
      } catch (const ShapeError& e) {
        throw StepFailure{std::string("conclusion is not well formed: ") + e.what()};
      }
      if (s.claim && !(*s.claim == *eq))
        throw StepFailure{"step concludes " + show(*eq) + ", not " + show(*s.claim)};
      done.emplace(s.label, *eq);
      res.conclusions.push_back(*eq);
    } catch (const StepFailure& f) {
      res.ok = false;
      res.failed_step = s.label;
      res.reason = f.reason;
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------- countermodels

std::optional<Countermodel> countermodel_search(const FunctorExpr& t, const std::vector<Sequent>& assumptions,
                                                const Sequent& goal, std::size_t max_size,
                                                const std::vector<std::string>& vars_in, bool prune) {
  std::vector<std::string> vars = vars_in;
  auto note_vars = [&](const Formula& f) {
    typecheck(t, f);
    for (const auto& v : variables(f))
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  };
  for (const auto& s : assumptions) {
    note_vars(s.lhs);
    note_vars(s.rhs);
  }
  note_vars(goal.lhs);
  note_vars(goal.rhs);
  const std::size_t nv = vars.size();

  for (std::size_t n = 1; n <= max_size; ++n) {
    const Carrier tx = Carrier::apply(t, Carrier::base(n));
    check_card(tx.size(), "T(X) in countermodel search");
    std::uint64_t structures = 1;
    for (std::size_t i = 0; i < n; ++i) structures = sat_mul(structures, tx.size());
    check_card(structures, "coalgebra structures in countermodel search");
    const std::uint64_t codes = sat_pow2(nv);
    check_card(sat_pow2(sat_mul(n, nv)), "valuations in countermodel search");
    if (tx.size() == 0) continue;
    const auto values = tx.enumerate("T(X) in countermodel search");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    const FinSet x(names);

    std::vector<std::size_t> table(n, 0);
    for (std::uint64_t s = 0; s < structures; ++s) {
      std::vector<TValue> xi;
      for (auto i : table) xi.push_back(values[i]);
      const Coalgebra c(t, x, xi);

      std::vector<std::uint64_t> code(n, 0);
      while (true) {
        Valuation h;
        for (std::size_t v = 0; v < nv; ++v) {
          Subset sv(n);
          for (std::size_t y = 0; y < n; ++y)
            if ((code[y] >> v) & 1u) sv.set(y);
          h[vars[v]] = sv;
        }
        ModelChecker mc(c, h);
        bool model = true;
        for (const auto& a : assumptions)
          if (!mc.eval(a.lhs).is_subset_of(mc.eval(a.rhs))) {
            model = false;
            break;
          }
        if (model) {
          const Subset bad = mc.eval(goal.lhs) - mc.eval(goal.rhs);
          if (bad.any()) return Countermodel{c, h, bad.find_first()};
        }
        // next code vector, last state fastest
        std::size_t i = n;
        while (i > 0) {
          --i;
          if (++code[i] < codes) {
            if (prune)
              for (std::size_t j = i + 1; j < n; ++j) code[j] = code[i];
            else
              for (std::size_t j = i + 1; j < n; ++j) code[j] = 0;
            break;
          }
          if (i == 0) {
            i = n + 1;
            break;
          }
        }
        if (i == n + 1 || n == 0) break;
      }

      for (std::size_t i = n; i-- > 0;) {
        if (++table[i] < values.size()) break;
        table[i] = 0;
      }
    }
  }
  return std::nullopt;
}

} // namespace coalog
