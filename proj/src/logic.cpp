#include "coalog/logic.hpp"

#include "coalog/error.hpp"
#include "coalog/semantics.hpp"

#include <algorithm>

namespace coalog {

// ---------------------------------------------------------------- layers

Layer normalize(Layer layer) {
  while (!layer.empty()) {
    const FunctorExpr top = layer.back();
    if (top.kind() == FunctorExpr::Kind::Comp) {
      layer.pop_back();
      layer.push_back(top.inner());
      layer.push_back(top.outer());
    } else if (top.kind() == FunctorExpr::Kind::Id) {
      layer.pop_back();
    } else {
      break;
    }
  }
  return layer;
}

std::string show_layer(const Layer& layer) {
  if (layer.empty()) return "the state layer";
  return "layer " + layer.back().str();
}

Carrier layer_carrier(const Layer& layer, std::size_t x) {
  Carrier c = Carrier::base(x);
  for (const auto& f : layer) c = Carrier::apply(f, c);
  return c;
}

namespace {

Layer replace_top(const Layer& l, const FunctorExpr& f) {
  Layer out = l;
  out.back() = f;
  return normalize(std::move(out));
}

Layer pop_top(const Layer& l) {
  Layer out = l;
  out.pop_back();
  return normalize(std::move(out));
}

std::string expected_at(const FunctorExpr& f) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Const: {
    std::string s = "one of";
    for (std::size_t i = 0; i < f.names().size(); ++i) s += (i ? ", '" : " '") + f.names()[i];
    return s;
  }
  case FunctorExpr::Kind::Sum: return "[k1] or [k2]";
  case FunctorExpr::Kind::Prod: return "[p1] or [p2]";
  case FunctorExpr::Kind::Pow:
  case FunctorExpr::Kind::Nbhd: return "box";
  default: return "an operator";
  }
}

std::string describe_head(const Formula& f) {
  switch (f.kind()) {
  case Formula::Kind::Var: return "variable " + f.name();
  case Formula::Kind::Const: return "constant '" + f.name();
  case Formula::Kind::Modal: return "operator " + op_name(f.op());
  default: return "formula";
  }
}

class Walker {
public:
  Walker(const FunctorExpr& t, VarLayers* vars) : t_(t), vars_(vars) {}

  std::size_t walk(const Formula& f, Layer layer, bool consumed) {
    if (!layer.empty()) {
      layer = normalize(std::move(layer));
      if (layer.empty() && !consumed)
        throw ShapeError(describe_head(f) + " is not available: functor " + t_.str() + " has no modal operators");
    }
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return 0;
    case Formula::Kind::Not: return walk(f.arg(), layer, consumed);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp: return std::max(walk(f.left(), layer, consumed), walk(f.right(), layer, consumed));
    case Formula::Kind::Var:
      if (!layer.empty() && !vars_)
        throw ShapeError("variable " + f.name() + " cannot stand at " + show_layer(layer) + "; expected " +
                         expected_at(layer.back()));
      if (vars_) {
        auto [it, fresh] = vars_->emplace(f.name(), layer);
        if (!fresh && it->second != layer)
          throw ShapeError("variable " + f.name() + " occurs at both " + show_layer(it->second) + " and " +
                           show_layer(layer));
      }
      return 0;
    case Formula::Kind::Const:
    case Formula::Kind::Modal: break;
    }
    if (layer.empty()) return 1 + walk(f, Layer{t_}, false);

    const FunctorExpr& top = layer.back();
    auto mismatch = [&]() {
      return ShapeError(describe_head(f) + " does not fit " + show_layer(layer) + ": expected " + expected_at(top));
    };
    switch (top.kind()) {
    case FunctorExpr::Kind::Const:
      if (f.kind() != Formula::Kind::Const || !top.const_index(f.name())) throw mismatch();
      return 0;
    case FunctorExpr::Kind::Sum:
      if (f.kind() != Formula::Kind::Modal) throw mismatch();
      if (f.op() == ModalOp::K1) return walk(f.arg(), replace_top(layer, top.left()), true);
      if (f.op() == ModalOp::K2) return walk(f.arg(), replace_top(layer, top.right()), true);
      throw mismatch();
    case FunctorExpr::Kind::Prod:
      if (f.kind() != Formula::Kind::Modal) throw mismatch();
      if (f.op() == ModalOp::P1) return walk(f.arg(), replace_top(layer, top.left()), true);
      if (f.op() == ModalOp::P2) return walk(f.arg(), replace_top(layer, top.right()), true);
      throw mismatch();
    case FunctorExpr::Kind::Pow:
    case FunctorExpr::Kind::Nbhd:
      if (f.kind() != Formula::Kind::Modal || f.op() != ModalOp::Box) throw mismatch();
      return walk(f.arg(), pop_top(layer), true);
    default: throw InvariantViolation("unnormalized layer");
    }
  }

private:
  const FunctorExpr& t_;
  VarLayers* vars_;
};

} // namespace

std::vector<Layer> all_layers(const FunctorExpr& t) {
  std::vector<Layer> out{Layer{}};
  std::vector<Layer> todo{normalize(Layer{t})};
  while (!todo.empty()) {
    Layer l = todo.back();
    todo.pop_back();
    if (std::find(out.begin(), out.end(), l) != out.end()) continue;
    out.push_back(l);
    if (l.empty()) continue;
    const FunctorExpr& top = l.back();
    switch (top.kind()) {
    case FunctorExpr::Kind::Sum:
    case FunctorExpr::Kind::Prod:
      todo.push_back(replace_top(l, top.right()));
      todo.push_back(replace_top(l, top.left()));
      break;
    case FunctorExpr::Kind::Pow:
    case FunctorExpr::Kind::Nbhd: todo.push_back(pop_top(l)); break;
    default: break;
    }
  }
  return out;
}

void typecheck(const FunctorExpr& t, const Formula& f) { Walker(t, nullptr).walk(f, Layer{}, true); }

bool typecheck_formula(const FunctorExpr& t, const Formula& f) {
  try {
    typecheck(t, f);
    return true;
  } catch (const ShapeError&) {
    return false;
  }
}

Formula parse_formula(const FunctorExpr& t, std::string_view text) {
  Formula f = parse_formula(text);
  typecheck(t, f);
  return f;
}

Sequent parse_sequent(const FunctorExpr& t, std::string_view text) {
  Sequent s = parse_sequent(text);
  typecheck(t, s.lhs);
  typecheck(t, s.rhs);
  return s;
}

void typecheck_at(const FunctorExpr& t, const Formula& f, const Layer& layer, VarLayers& vars) {
  Walker(t, &vars).walk(f, normalize(layer), true);
}

Layer typecheck_equation(const FunctorExpr& t, const Equation& e, VarLayers& vars) {
  std::string first_error;
  for (const auto& layer : all_layers(t)) {
    VarLayers trial;
    try {
      typecheck_at(t, e.lhs, layer, trial);
      typecheck_at(t, e.rhs, layer, trial);
      vars = std::move(trial);
      return layer;
    } catch (const ShapeError& err) {
      if (first_error.empty()) first_error = err.what();
    }
  }
  throw ShapeError("equation fits no layer of " + t.str() + ": " + first_error);
}

std::size_t modal_depth(const FunctorExpr& t, const Formula& f) { return Walker(t, nullptr).walk(f, Layer{}, true); }

// ---------------------------------------------------------------- signature

namespace {

// Operators leading from the top of F to one of its Id leaves, if any.
std::optional<std::vector<ModalOp>> path_to_id(const FunctorExpr& f) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return std::vector<ModalOp>{};
  case FunctorExpr::Kind::Const: return std::nullopt;
  case FunctorExpr::Kind::Sum:
  case FunctorExpr::Kind::Prod: {
    const bool sum = f.kind() == FunctorExpr::Kind::Sum;
    if (auto p = path_to_id(f.left())) {
      p->insert(p->begin(), sum ? ModalOp::K1 : ModalOp::P1);
      return p;
    }
    if (auto p = path_to_id(f.right())) {
      p->insert(p->begin(), sum ? ModalOp::K2 : ModalOp::P2);
      return p;
    }
    return std::nullopt;
  }
  case FunctorExpr::Kind::Comp: {
    auto a = path_to_id(f.outer());
    auto b = path_to_id(f.inner());
    if (!a || !b) return std::nullopt;
    a->insert(a->end(), b->begin(), b->end());
    return a;
  }
  case FunctorExpr::Kind::Pow:
  case FunctorExpr::Kind::Nbhd: return std::vector<ModalOp>{ModalOp::Box};
  }
  return std::nullopt;
}

void collect(const FunctorExpr& f, std::vector<ModalOp> prefix, const Layer& below, std::vector<Occurrence>& out) {
  Layer here = below;
  here.push_back(f);
  switch (f.kind()) {
  case FunctorExpr::Kind::Id: return;
  case FunctorExpr::Kind::Comp: {
    Layer with_inner = below;
    with_inner.push_back(f.inner());
    collect(f.outer(), prefix, with_inner, out);
    if (auto p = path_to_id(f.outer())) {
      prefix.insert(prefix.end(), p->begin(), p->end());
      collect(f.inner(), prefix, below, out);
    }
    return;
  }
  case FunctorExpr::Kind::Sum:
  case FunctorExpr::Kind::Prod: {
    out.push_back({f, prefix, here});
    const bool sum = f.kind() == FunctorExpr::Kind::Sum;
    auto l = prefix, r = prefix;
    l.push_back(sum ? ModalOp::K1 : ModalOp::P1);
    r.push_back(sum ? ModalOp::K2 : ModalOp::P2);
    collect(f.left(), l, below, out);
    collect(f.right(), r, below, out);
    return;
  }
  default: out.push_back({f, prefix, here}); return;
  }
}

} // namespace

std::string Occurrence::path() const {
  std::string s;
  for (std::size_t i = 0; i < prefix.size(); ++i) s += (i ? "." : "") + op_path_name(prefix[i]);
  return s;
}

Layer Occurrence::child(std::size_t i) const {
  switch (node.kind()) {
  case FunctorExpr::Kind::Sum:
  case FunctorExpr::Kind::Prod: return replace_top(layer, i == 0 ? node.left() : node.right());
  case FunctorExpr::Kind::Pow:
  case FunctorExpr::Kind::Nbhd: return pop_top(layer);
  default: throw InvariantViolation("constant operators take no arguments");
  }
}

std::vector<ModalOp> Occurrence::ops() const {
  switch (node.kind()) {
  case FunctorExpr::Kind::Sum: return {ModalOp::K1, ModalOp::K2};
  case FunctorExpr::Kind::Prod: return {ModalOp::P1, ModalOp::P2};
  case FunctorExpr::Kind::Pow:
  case FunctorExpr::Kind::Nbhd: return {ModalOp::Box};
  default: return {};
  }
}

std::vector<std::string> Occurrence::descriptors() const {
  std::string pre;
  for (auto op : prefix) pre += op_name(op) + " ";
  std::vector<std::string> out;
  if (node.kind() == FunctorExpr::Kind::Const) {
    for (const auto& n : node.names()) out.push_back(pre + "'" + n);
  } else {
    for (auto op : ops()) out.push_back(pre + op_name(op) + " _");
  }
  return out;
}

Formula Occurrence::wrap(const Formula& f) const {
  Formula out = f;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) out = Formula::modal(*it, out);
  return out;
}

std::vector<std::string> Signature::operators() const {
  std::vector<std::string> out;
  for (const auto& o : occurrences)
    for (auto& d : o.descriptors()) out.push_back(std::move(d));
  return out;
}

Signature derive_signature(const FunctorExpr& t) {
  Signature s{t, {}};
  collect(t, {}, Layer{}, s.occurrences);
  return s;
}

// ---------------------------------------------------------------- axioms

RankOneEquation rank_one_at(const Signature& sig, std::size_t occurrence, std::string name, Equation eq) {
  const Occurrence& occ = sig.occurrences.at(occurrence);
  VarLayers vars;
  typecheck_at(sig.functor, eq.lhs, occ.layer, vars);
  typecheck_at(sig.functor, eq.rhs, occ.layer, vars);
  const std::string path = occ.path();
  return {path.empty() ? name : path + "/" + name, occurrence, occ.layer, std::move(eq), std::move(vars)};
}

std::vector<RankOneEquation> derive_axioms(const Signature& sig) {
  std::vector<RankOneEquation> out;
  const Formula a = Formula::var("a"), b = Formula::var("b"), tt = Formula::top(), ff = Formula::bot();
  auto m = [](ModalOp op, const Formula& f) { return Formula::modal(op, f); };
  for (std::size_t i = 0; i < sig.occurrences.size(); ++i) {
    const Occurrence& occ = sig.occurrences[i];
    auto add = [&](std::string name, Formula l, Formula r) { out.push_back(rank_one_at(sig, i, std::move(name), {l, r})); };
    switch (occ.node.kind()) {
    case FunctorExpr::Kind::Const: {
      const auto& names = occ.node.names();
      for (std::size_t x = 0; x < names.size(); ++x)
        for (std::size_t y = x + 1; y < names.size(); ++y)
          add("const.disjoint." + names[x] + "." + names[y],
              Formula::constant(names[x]) & Formula::constant(names[y]), ff);
      std::vector<Formula> all;
      for (const auto& n : names) all.push_back(Formula::constant(n));
      add("const.cover", big_or(all), tt);
      break;
    }
    case FunctorExpr::Kind::Sum: {
      for (ModalOp k : {ModalOp::K1, ModalOp::K2}) {
        const std::string p = "sum." + op_path_name(k);
        add(p + ".bot", m(k, ff), ff);
        add(p + ".join", m(k, a | b), m(k, a) | m(k, b));
        add(p + ".meet", m(k, a & b), m(k, a) & m(k, b));
      }
      add("sum.disjoint", m(ModalOp::K1, a) & m(ModalOp::K2, b), ff);
      add("sum.cover", m(ModalOp::K1, tt) | m(ModalOp::K2, tt), tt);
      add("sum.k1.neg", ~m(ModalOp::K1, a), m(ModalOp::K2, tt) | m(ModalOp::K1, ~a));
      add("sum.k2.neg", ~m(ModalOp::K2, a), m(ModalOp::K1, tt) | m(ModalOp::K2, ~a));
      break;
    }
    case FunctorExpr::Kind::Prod:
      for (ModalOp p : {ModalOp::P1, ModalOp::P2}) {
        const std::string n = "prod." + op_path_name(p);
        add(n + ".top", m(p, tt), tt);
        add(n + ".neg", m(p, ~a), ~m(p, a));
        add(n + ".meet", m(p, a & b), m(p, a) & m(p, b));
      }
      break;
    case FunctorExpr::Kind::Pow:
      add("pow.top", m(ModalOp::Box, tt), tt);
      add("pow.meet", m(ModalOp::Box, a & b), m(ModalOp::Box, a) & m(ModalOp::Box, b));
      break;
    default: break;  // Nbhd: no equations
    }
  }
  return out;
}

std::vector<RankOneEquation> derive_axioms(const FunctorExpr& t) { return derive_axioms(derive_signature(t)); }

std::string show(const RankOneEquation& e) { return e.name + ": " + show(e.eq); }

// ---------------------------------------------------------------- soundness

namespace {

std::string show_subset_of(const Carrier& c, std::size_t x, const Subset& s) {
  std::string out = "{";
  bool first = true;
  for (auto i : members(s)) {
    out += (first ? "" : ", ") + show_value(c.decode(i), FinSet(x));
    first = false;
  }
  return out + "}";
}

Subset no_leaf(const Formula& f) {
  throw InvariantViolation("unresolved state-layer formula " + show(f) + " in a one-step term");
}

} // namespace

std::string SoundnessWitness::describe(const FunctorExpr& t, const RankOneEquation& e) const {
  (void)t;
  std::string out = "base set of size " + std::to_string(base_size);
  for (const auto& [v, s] : assignment)
    out += ", " + v + " = " + show_subset_of(layer_carrier(e.vars.at(v), base_size), base_size, s);
  out += ": " + show_value(value, FinSet(base_size)) + (in_lhs ? " satisfies the left side only" : " satisfies the right side only");
  return out;
}

std::optional<SoundnessWitness> check_soundness(const FunctorExpr& t, const RankOneEquation& e, std::size_t max_size) {
  std::vector<std::string> names;
  for (const auto& [v, l] : e.vars) names.push_back(v);
  for (std::size_t n = 0; n <= max_size; ++n) {
    std::vector<std::uint64_t> sizes;
    std::uint64_t total = 1;
    for (const auto& v : names) {
      const auto s = layer_carrier(e.vars.at(v), n).size();
      if (s > 63) throw ResourceLimit("assignments of " + v, sat_pow2(s));
      sizes.push_back(s);
      total = sat_mul(total, sat_pow2(s));
    }
    check_card(total, "variable assignments for " + e.name);
    const Carrier layer_set = layer_carrier(e.layer, n);
    std::vector<std::uint64_t> mask(names.size(), 0);
    for (std::uint64_t k = 0; k < total; ++k) {
      VarEnv env;
      for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = subset_from_mask(sizes[i], mask[i]);
      const Subset l = eval_layer(t, e.layer, n, e.eq.lhs, env, no_leaf);
      const Subset r = eval_layer(t, e.layer, n, e.eq.rhs, env, no_leaf);
      if (l != r) {
        const Subset diff = l ^ r;
        const auto i = diff.find_first();
        return SoundnessWitness{n, std::map<std::string, Subset>(env.begin(), env.end()), layer_set.decode(i), l.test(i)};
      }
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (++mask[i] < (std::uint64_t{1} << sizes[i])) break;
        mask[i] = 0;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- liftings

namespace {

// Completes an argument at `layer` to a state-layer variable along a
// representative path; constant layers close the term instead.
Formula complete(const Layer& layer, const Formula& arg) {
  const Layer l = normalize(layer);
  if (l.empty()) return arg;
  const FunctorExpr& top = l.back();
  switch (top.kind()) {
  case FunctorExpr::Kind::Const: return Formula::constant(top.names().front());
  case FunctorExpr::Kind::Sum: return Formula::modal(ModalOp::K1, complete(replace_top(l, top.left()), arg));
  case FunctorExpr::Kind::Prod: return Formula::modal(ModalOp::P1, complete(replace_top(l, top.left()), arg));
  default: return Formula::modal(ModalOp::Box, complete(pop_top(l), arg));
  }
}

} // namespace

std::vector<OperatorTerm> operator_terms(const FunctorExpr& t) {
  const Signature sig = derive_signature(t);
  std::vector<OperatorTerm> out;
  auto add = [&](std::string d, Formula f) {
    for (const auto& o : out)
      if (o.term == f) return;
    out.push_back({std::move(d), f, variables(f)});
  };
  for (const auto& occ : sig.occurrences) {
    const auto ds = occ.descriptors();
    if (occ.node.kind() == FunctorExpr::Kind::Const) {
      for (std::size_t i = 0; i < ds.size(); ++i) add(ds[i], occ.wrap(Formula::constant(occ.node.names()[i])));
      continue;
    }
    const auto ops = occ.ops();
    for (std::size_t i = 0; i < ops.size(); ++i)
      add(ds[i], occ.wrap(Formula::modal(ops[i], complete(occ.child(i), Formula::var("a")))));
  }
  return out;
}

CanonicalLifting operator_as_lifting(const FunctorExpr& t, const OperatorTerm& op) {
  const std::size_t n = op.args.size();
  if (n > 6) throw ResourceLimit("lifting arity", sat_pow2(n));
  const std::size_t x = std::size_t{1} << n;
  VarEnv env;
  for (std::size_t i = 0; i < n; ++i) {
    Subset s(x);
    for (std::size_t w = 0; w < x; ++w)
      if ((w >> i) & 1u) s.set(w);
    env[op.args[i]] = s;
  }
  return {n, eval_layer(t, Layer{t}, x, op.term, env, no_leaf)};
}

std::uint64_t lifting_count(const FunctorExpr& t, std::size_t n) { return sat_pow2(card(t, sat_pow2(n))); }

void for_each_lifting(const FunctorExpr& t, std::size_t n, const std::function<bool(const CanonicalLifting&)>& f) {
  const std::uint64_t k = card(t, sat_pow2(n));
  check_card(k, "T(2^n)");
  if (k > 63) throw ResourceLimit("streamed canonical liftings", lifting_count(t, n));
  const std::uint64_t count = std::uint64_t{1} << k;
  for (std::uint64_t m = 0; m < count; ++m)
    if (!f(CanonicalLifting{n, subset_from_mask(k, m)})) return;
}

std::vector<CanonicalLifting> canonical_liftings(const FunctorExpr& t, std::size_t n) {
  check_card(lifting_count(t, n), "canonical liftings");
  std::vector<CanonicalLifting> out;
  for_each_lifting(t, n, [&](const CanonicalLifting& l) {
    out.push_back(l);
    return true;
  });
  return out;
}

} // namespace coalog
