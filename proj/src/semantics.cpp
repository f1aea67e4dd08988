#include "coalog/semantics.hpp"

#include "coalog/error.hpp"

#include <algorithm>

namespace coalog {

// ---------------------------------------------------------------- one step

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

std::uint64_t layer_size(const Layer& l, std::size_t x) { return l.empty() ? x : layer_carrier(l, x).size(); }

class LayerEval {
public:
  LayerEval(const FunctorExpr& t, std::size_t x, const VarEnv& env, const LeafEval& leaf)
      : t_(t), x_(x), env_(env), leaf_(leaf) {}

  Subset eval(const Formula& f, Layer layer) {
    layer = normalize(std::move(layer));
    const std::uint64_t n = layer_size(layer, x_);
    check_card(n, "one-step set at " + show_layer(layer));
    switch (f.kind()) {
    case Formula::Kind::True: return full_subset(n);
    case Formula::Kind::False: return Subset(n);
    case Formula::Kind::Not: return ~eval(f.arg(), layer);
    case Formula::Kind::And: return eval(f.left(), layer) & eval(f.right(), layer);
    case Formula::Kind::Or: return eval(f.left(), layer) | eval(f.right(), layer);
    case Formula::Kind::Imp: return ~eval(f.left(), layer) | eval(f.right(), layer);
    case Formula::Kind::Var: {
      if (auto it = env_.find(f.name()); it != env_.end()) {
        if (it->second.size() != n)
          throw ShapeError("variable " + f.name() + " is bound to a subset of the wrong set at " + show_layer(layer));
        return it->second;
      }
      if (!layer.empty()) throw ShapeError("unbound variable " + f.name() + " at " + show_layer(layer));
      return checked_leaf(f);
    }
    case Formula::Kind::Const:
    case Formula::Kind::Modal: break;
    }
    if (layer.empty()) return checked_leaf(f);

    const FunctorExpr& top = layer.back();
    switch (top.kind()) {
    case FunctorExpr::Kind::Const: {
      auto i = top.const_index(f.kind() == Formula::Kind::Const ? f.name() : "");
      if (!i) throw ShapeError(show(f) + " does not fit " + show_layer(layer));
      return singleton(n, *i);
    }
    case FunctorExpr::Kind::Sum: {
      const bool left = f.op() == ModalOp::K1;
      if (f.kind() != Formula::Kind::Modal || (!left && f.op() != ModalOp::K2))
        throw ShapeError(show(f) + " does not fit " + show_layer(layer));
      const Layer l = replace_top(layer, top.left());
      const std::uint64_t offset = left ? 0 : layer_size(l, x_);
      const Subset s = eval(f.arg(), left ? l : replace_top(layer, top.right()));
      Subset out(n);
      for (auto i = s.find_first(); i != Subset::npos; i = s.find_next(i)) out.set(offset + i);
      return out;
    }
    case FunctorExpr::Kind::Prod: {
      const bool first = f.op() == ModalOp::P1;
      if (f.kind() != Formula::Kind::Modal || (!first && f.op() != ModalOp::P2))
        throw ShapeError(show(f) + " does not fit " + show_layer(layer));
      const Layer l = replace_top(layer, top.left()), r = replace_top(layer, top.right());
      const std::uint64_t na = layer_size(l, x_), nb = layer_size(r, x_);
      const Subset s = eval(f.arg(), first ? l : r);
      Subset out(n);
      for (auto i = s.find_first(); i != Subset::npos; i = s.find_next(i)) {
        if (first) {
          for (std::uint64_t j = 0; j < nb; ++j) out.set(i * nb + j);
        } else {
          for (std::uint64_t j = 0; j < na; ++j) out.set(j * nb + i);
        }
      }
      return out;
    }
    case FunctorExpr::Kind::Pow:
    case FunctorExpr::Kind::Nbhd: {
      if (f.kind() != Formula::Kind::Modal || f.op() != ModalOp::Box)
        throw ShapeError(show(f) + " does not fit " + show_layer(layer));
      const Layer below = pop_top(layer);
      const std::uint64_t s = subset_mask(eval(f.arg(), below));
      Subset out(n);
      if (top.kind() == FunctorExpr::Kind::Pow) {
        // every b ⊆ s
        for (std::uint64_t m = s;; m = (m - 1) & s) {
          out.set(m);
          if (m == 0) break;
        }
      } else {
        // every N with s ∈ N
        for (std::uint64_t nb = 0; nb < n; ++nb)
          if ((nb >> s) & 1u) out.set(nb);
      }
      return out;
    }
    default: throw InvariantViolation("unnormalized layer");
    }
  }

private:
  Subset checked_leaf(const Formula& f) {
    Subset s = leaf_(f);
    if (s.size() != x_) throw InvariantViolation("leaf denotation has the wrong size");
    return s;
  }

  const FunctorExpr& t_;
  std::size_t x_;
  const VarEnv& env_;
  const LeafEval& leaf_;
};

} // namespace

Subset eval_layer(const FunctorExpr& t, const Layer& layer, std::size_t x, const Formula& f, const VarEnv& env,
                  const LeafEval& leaf) {
  return LayerEval(t, x, env, leaf).eval(f, layer);
}

Subset one_step(const FunctorExpr& t, std::size_t x, const Formula& term, const VarEnv& env) {
  LeafEval none = [](const Formula& f) -> Subset {
    throw ShapeError("one-step term has an unresolved argument " + show(f));
  };
  return eval_layer(t, Layer{t}, x, term, env, none);
}

bool holds(const FunctorExpr& t, const Layer& layer_in, std::size_t x, const Formula& f, const TValue& v,
           const LeafHolds& leaf) {
  const Layer layer = normalize(layer_in);
  switch (f.kind()) {
  case Formula::Kind::True: return true;
  case Formula::Kind::False: return false;
  case Formula::Kind::Not: return !holds(t, layer, x, f.arg(), v, leaf);
  case Formula::Kind::And: return holds(t, layer, x, f.left(), v, leaf) && holds(t, layer, x, f.right(), v, leaf);
  case Formula::Kind::Or: return holds(t, layer, x, f.left(), v, leaf) || holds(t, layer, x, f.right(), v, leaf);
  case Formula::Kind::Imp: return !holds(t, layer, x, f.left(), v, leaf) || holds(t, layer, x, f.right(), v, leaf);
  default: break;
  }
  if (layer.empty()) {
    if (v.kind() != TValue::Kind::Leaf) throw ShapeError("expected a state at the state layer");
    return leaf(f, v.index());
  }
  if (f.kind() == Formula::Kind::Var) throw ShapeError("variable " + f.name() + " below " + show_layer(layer));
  const FunctorExpr& top = layer.back();
  switch (top.kind()) {
  case FunctorExpr::Kind::Const: return v.kind() == TValue::Kind::Const && f.kind() == Formula::Kind::Const && v.name() == f.name();
  case FunctorExpr::Kind::Sum:
    if (f.op() == ModalOp::K1) return v.kind() == TValue::Kind::InL && holds(t, replace_top(layer, top.left()), x, f.arg(), v.child(), leaf);
    return v.kind() == TValue::Kind::InR && holds(t, replace_top(layer, top.right()), x, f.arg(), v.child(), leaf);
  case FunctorExpr::Kind::Prod:
    if (f.op() == ModalOp::P1) return holds(t, replace_top(layer, top.left()), x, f.arg(), v.first(), leaf);
    return holds(t, replace_top(layer, top.right()), x, f.arg(), v.second(), leaf);
  case FunctorExpr::Kind::Pow: {
    const Layer below = pop_top(layer);
    for (const auto& u : v.elements())
      if (!holds(t, below, x, f.arg(), u, leaf)) return false;
    return true;
  }
  case FunctorExpr::Kind::Nbhd: {
    // the extension of the argument must be a neighbourhood
    const Layer below = pop_top(layer);
    std::vector<TValue> ext;
    for (const auto& u : layer_carrier(below, x).enumerate("Nbhd argument set"))
      if (holds(t, below, x, f.arg(), u, leaf)) ext.push_back(u);
    std::sort(ext.begin(), ext.end());
    return std::binary_search(v.neighbourhoods().begin(), v.neighbourhoods().end(), ext);
  }
  default: throw InvariantViolation("unnormalized layer");
  }
}

// ---------------------------------------------------------------- model checking

ModelChecker::ModelChecker(const Coalgebra& c, const Valuation& h) : c_(c), h_(h) {
  for (const auto& [name, s] : h_)
    if (s.size() != c_.size()) throw ShapeError("valuation of " + name + " is not a subset of the carrier");
}

const Subset& ModelChecker::eval(const Formula& f) {
  if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
  const std::size_t n = c_.size();
  Subset r;
  switch (f.kind()) {
  case Formula::Kind::True: r = full_subset(n); break;
  case Formula::Kind::False: r = Subset(n); break;
  case Formula::Kind::Var: {
    auto it = h_.find(f.name());
    if (it == h_.end()) throw ShapeError("valuation does not cover variable " + f.name());
    r = it->second;
    break;
  }
  case Formula::Kind::Not: r = ~eval(f.arg()); break;
  case Formula::Kind::And: r = eval(f.left()) & eval(f.right()); break;
  case Formula::Kind::Or: r = eval(f.left()) | eval(f.right()); break;
  case Formula::Kind::Imp: r = ~eval(f.left()) | eval(f.right()); break;
  case Formula::Kind::Const:
  case Formula::Kind::Modal: {
    r = Subset(n);
    const Layer top{c_.functor()};
    LeafHolds leaf = [this](const Formula& g, std::size_t y) { return eval(g).test(y); };
    for (std::size_t x = 0; x < n; ++x)
      if (holds(c_.functor(), top, n, f, c_(x), leaf)) r.set(x);
    break;
  }
  }
  keep_.push_back(f);
  return memo_.emplace(f.id(), std::move(r)).first->second;
}

Subset model_check(const Coalgebra& c, const Valuation& h, const Formula& f) {
  typecheck(c.functor(), f);
  ModelChecker mc(c, h);
  return mc.eval(f);
}

Subset model_check_lifting(const Coalgebra& c, const Valuation& h, const CanonicalLifting& lambda,
                           const std::vector<Formula>& args) {
  const FunctorExpr& t = c.functor();
  const std::size_t n = args.size();
  if (n != lambda.arity) throw ShapeError("lifting arity differs from the number of arguments");
  for (const auto& a : args) typecheck(t, a);
  const std::uint64_t w = sat_pow2(n);
  const Carrier t2n = Carrier::apply(t, Carrier::base(w));
  if (lambda.extent.size() != t2n.size()) throw ShapeError("lifting extent is not a subset of T(2^n)");
  ModelChecker mc(c, h);
  std::vector<std::size_t> chi(c.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Subset& s = mc.eval(args[i]);
    for (std::size_t x = 0; x < c.size(); ++x)
      if (s.test(x)) chi[x] |= std::size_t{1} << i;
  }
  LeafMap leaf = [&](const TValue& v) { return TValue::leaf(chi[v.index()]); };
  Subset out(c.size());
  for (std::size_t x = 0; x < c.size(); ++x) {
    const TValue image = map_value(t, c.base(), Carrier::base(w), leaf, c(x));
    if (lambda.extent.test(t2n.encode(image))) out.set(x);
  }
  return out;
}

// ---------------------------------------------------------------- presented algebras
//
// L'_F over a base algebra is presented recursively along F: generators are
// the operators of the top constructor applied to elements of the child
// algebras, relations are the derived axiom schemes instantiated at those
// elements. When a child algebra is large, the generators are restricted to
// a basis from which the axioms define every other operator instance (box
// of coatoms, since box preserves finite meets; [ki]/[pi] of atoms, since
// they preserve finite joins) and the remaining instances are taken over
// atoms, coatoms, top and bottom.

namespace {

struct PNode {
  FinBA algebra;
  Carrier set;
  std::vector<std::size_t> dual;  // set index -> atom
  bool hom = true;
  bool reduced = false;
  std::string failure;

  // δ of an element of this algebra, as a subset of `set`
  Subset delta(const Subset& e) const {
    Subset out(set.size());
    for (std::size_t y = 0; y < dual.size(); ++y)
      if (e.test(dual[y])) out.set(y);
    return out;
  }
};

FunctorExpr skeleton(const FunctorExpr& f) {
  switch (f.kind()) {
  case FunctorExpr::Kind::Sum: return FunctorExpr::sum(FunctorExpr::id(), FunctorExpr::id());
  case FunctorExpr::Kind::Prod: return FunctorExpr::prod(FunctorExpr::id(), FunctorExpr::id());
  default: return f;
  }
}

std::size_t child_of(ModalOp op) { return op == ModalOp::K2 || op == ModalOp::P2 ? 1 : 0; }

// Child index of each variable, read off the operator directly above it.
void var_children(const Formula& f, std::optional<std::size_t> under, std::map<std::string, std::size_t>& out) {
  switch (f.kind()) {
  case Formula::Kind::Var:
    if (under) out[f.name()] = *under;
    return;
  case Formula::Kind::Modal: var_children(f.arg(), child_of(f.op()), out); return;
  case Formula::Kind::Not: var_children(f.arg(), under, out); return;
  case Formula::Kind::And:
  case Formula::Kind::Or:
  case Formula::Kind::Imp:
    var_children(f.left(), under, out);
    var_children(f.right(), under, out);
    return;
  default: return;
  }
}

class Presenter {
public:
  Presenter(std::size_t x, std::size_t full_limit) : x_(x), full_limit_(full_limit) {}

  PNode base() const {
    std::vector<std::size_t> id(x_);
    for (std::size_t i = 0; i < x_; ++i) id[i] = i;
    return PNode{FinBA(FinSet(x_)), Carrier::base(x_), id, true, false, {}};
  }

  PNode present(const FunctorExpr& f, const PNode& b) {
    switch (f.kind()) {
    case FunctorExpr::Kind::Id: return b;
    case FunctorExpr::Kind::Comp: return present(f.outer(), present(f.inner(), b));
    case FunctorExpr::Kind::Const: return layer(f, b, {});
    case FunctorExpr::Kind::Sum:
    case FunctorExpr::Kind::Prod: {
      std::vector<PNode> kids{present(f.left(), b), present(f.right(), b)};
      return layer(f, b, kids);
    }
    case FunctorExpr::Kind::Pow:
    case FunctorExpr::Kind::Nbhd: return layer(f, b, {b});
    }
    throw InvariantViolation("present: unknown functor kind");
  }

private:
  struct Gen {
    std::size_t child;
    Subset arg;  // element of the child algebra
    std::size_t constant = 0;
  };

  PNode layer(const FunctorExpr& f, const PNode& b, const std::vector<PNode>& kids) {
    PNode out{FinBA(FinSet(0)), Carrier::apply(f, b.set), {}, true, false, {}};
    check_card(out.set.size(), "T(X) for the presented algebra");
    for (const auto& k : kids) {
      out.reduced = out.reduced || k.reduced;
      if (!k.hom) {
        out.hom = false;
        out.failure = k.failure;
        return out;
      }
    }
    const bool is_const = f.kind() == FunctorExpr::Kind::Const;
    bool full = true;
    for (const auto& k : kids) full = full && k.algebra.atom_count() <= full_limit_;
    if (f.kind() == FunctorExpr::Kind::Nbhd) {
      // no finite basis: box is not join or meet preserving
      if (kids[0].algebra.atom_count() > 6)
        throw ResourceLimit("Nbhd presentation over a large algebra", sat_pow2(kids[0].algebra.atom_count()));
      full = true;
    }
    out.reduced = out.reduced || !full;

    // generators, and op(child, element) as a term over them
    std::vector<Gen> gens;
    std::vector<std::size_t> offset;
    if (is_const) {
      for (std::size_t c = 0; c < f.names().size(); ++c) gens.push_back({0, Subset(), c});
    } else {
      for (std::size_t i = 0; i < kids.size(); ++i) {
        offset.push_back(gens.size());
        const std::size_t atoms = kids[i].algebra.atom_count();
        if (full) {
          for (std::uint64_t m = 0; m < (std::uint64_t{1} << atoms); ++m)
            gens.push_back({i, subset_from_mask(atoms, m)});
        } else {
          for (std::size_t a = 0; a < atoms; ++a)
            gens.push_back({i, f.kind() == FunctorExpr::Kind::Pow ? ~kids[i].algebra.atom(a) : kids[i].algebra.atom(a)});
        }
      }
    }
    auto op_term = [&](std::size_t child, const Subset& e) -> BoolTerm {
      if (full) return BoolTerm::gen(offset[child] + subset_mask(e));
      if (f.kind() == FunctorExpr::Kind::Pow) {
        BoolTerm t = BoolTerm::top();
        for (std::size_t a = 0; a < e.size(); ++a)
          if (!e.test(a)) t = t & BoolTerm::gen(offset[child] + a);
        return t;
      }
      BoolTerm t = BoolTerm::bot();
      for (auto a = e.find_first(); a != Subset::npos; a = e.find_next(a)) t = t | BoolTerm::gen(offset[child] + a);
      return t;
    };

    // axiom instances
    const FunctorExpr sk = skeleton(f);
    std::vector<BoolEquation> eqs;
    for (const auto& ax : derive_axioms(sk)) {
      if (ax.occurrence != 0) continue;
      std::map<std::string, std::size_t> vc;
      var_children(ax.eq.lhs, std::nullopt, vc);
      var_children(ax.eq.rhs, std::nullopt, vc);
      std::vector<std::string> names;
      std::vector<std::vector<Subset>> cands;
      for (const auto& [v, c] : vc) {
        names.push_back(v);
        cands.push_back(instance_elements(kids.at(c).algebra, full));
      }
      std::vector<std::size_t> pick(names.size(), 0);
      while (true) {
        std::map<std::string, Subset> env;
        for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = cands[i][pick[i]];
        eqs.emplace_back(translate(ax.eq.lhs, f, kids, env, op_term), translate(ax.eq.rhs, f, kids, env, op_term));
        std::size_t i = 0;
        while (i < names.size() && ++pick[i] == cands[i].size()) pick[i++] = 0;
        if (i == names.size()) break;
      }
    }
    PresentedBA pres = presented_ba(gens.size(), eqs);
    out.algebra = pres.algebra;

    // evaluation of each generator in P(F Y)
    const std::uint64_t n = out.set.size();
    std::vector<Subset> ev;
    for (const auto& g : gens) {
      if (is_const) {
        ev.push_back(singleton(n, g.constant));
        continue;
      }
      const PNode& k = kids[g.child];
      const Subset d = k.delta(g.arg);
      Subset e(n);
      switch (f.kind()) {
      case FunctorExpr::Kind::Sum: {
        const std::uint64_t off = g.child == 0 ? 0 : kids[0].set.size();
        for (auto i = d.find_first(); i != Subset::npos; i = d.find_next(i)) e.set(off + i);
        break;
      }
      case FunctorExpr::Kind::Prod: {
        const std::uint64_t na = kids[0].set.size(), nb = kids[1].set.size();
        for (auto i = d.find_first(); i != Subset::npos; i = d.find_next(i)) {
          if (g.child == 0) {
            for (std::uint64_t j = 0; j < nb; ++j) e.set(i * nb + j);
          } else {
            for (std::uint64_t j = 0; j < na; ++j) e.set(j * nb + i);
          }
        }
        break;
      }
      case FunctorExpr::Kind::Pow: {
        const std::uint64_t s = subset_mask(d);
        for (std::uint64_t m = s;; m = (m - 1) & s) {
          e.set(m);
          if (m == 0) break;
        }
        break;
      }
      default: {  // Nbhd
        const std::uint64_t s = subset_mask(d);
        for (std::uint64_t nb = 0; nb < n; ++nb)
          if ((nb >> s) & 1u) e.set(nb);
        break;
      }
      }
      ev.push_back(std::move(e));
    }
    out.dual.resize(n);
    for (std::uint64_t t = 0; t < n; ++t) {
      Subset val(gens.size());
      for (std::size_t g = 0; g < gens.size(); ++g)
        if (ev[g].test(t)) val.set(g);
      auto atom = pres.find(val);
      if (!atom) {
        out.hom = false;
        out.failure = "the evaluation of " + f.str() + " at element " + std::to_string(t) + " violates an axiom";
        out.dual.clear();
        return out;
      }
      out.dual[t] = *atom;
    }
    return out;
  }

  static std::vector<Subset> instance_elements(const FinBA& a, bool full) {
    std::vector<Subset> out;
    const std::size_t k = a.atom_count();
    if (full) {
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) out.push_back(subset_from_mask(k, m));
      return out;
    }
    out.push_back(a.bottom());
    out.push_back(a.top());
    for (std::size_t i = 0; i < k; ++i) {
      out.push_back(a.atom(i));
      out.push_back(~a.atom(i));
    }
    return out;
  }

  template <class OpTerm>
  static Subset child_elem(const Formula& f, const FinBA& a, const std::map<std::string, Subset>& env) {
    switch (f.kind()) {
    case Formula::Kind::True: return a.top();
    case Formula::Kind::False: return a.bottom();
    case Formula::Kind::Var: return env.at(f.name());
    case Formula::Kind::Not: return ~child_elem<OpTerm>(f.arg(), a, env);
    case Formula::Kind::And: return child_elem<OpTerm>(f.left(), a, env) & child_elem<OpTerm>(f.right(), a, env);
    case Formula::Kind::Or: return child_elem<OpTerm>(f.left(), a, env) | child_elem<OpTerm>(f.right(), a, env);
    case Formula::Kind::Imp: return ~child_elem<OpTerm>(f.left(), a, env) | child_elem<OpTerm>(f.right(), a, env);
    default: throw InvariantViolation("axiom scheme is not rank 1");
    }
  }

  template <class OpTerm>
  static BoolTerm translate(const Formula& f, const FunctorExpr& node, const std::vector<PNode>& kids,
                            const std::map<std::string, Subset>& env, const OpTerm& op_term) {
    switch (f.kind()) {
    case Formula::Kind::True: return BoolTerm::top();
    case Formula::Kind::False: return BoolTerm::bot();
    case Formula::Kind::Not: return ~translate(f.arg(), node, kids, env, op_term);
    case Formula::Kind::And:
      return translate(f.left(), node, kids, env, op_term) & translate(f.right(), node, kids, env, op_term);
    case Formula::Kind::Or:
      return translate(f.left(), node, kids, env, op_term) | translate(f.right(), node, kids, env, op_term);
    case Formula::Kind::Imp:
      return ~translate(f.left(), node, kids, env, op_term) | translate(f.right(), node, kids, env, op_term);
    case Formula::Kind::Const: return BoolTerm::gen(*node.const_index(f.name()));
    case Formula::Kind::Modal: {
      const std::size_t c = child_of(f.op());
      return op_term(c, child_elem<OpTerm>(f.arg(), kids.at(c).algebra, env));
    }
    case Formula::Kind::Var: throw InvariantViolation("axiom scheme has a variable outside an operator");
    }
    return BoolTerm::bot();
  }

  std::size_t x_;
  std::size_t full_limit_;
};

} // namespace

PresentedAlgebra presented_algebra(const FunctorExpr& t, std::size_t x, std::size_t full_limit) {
  Presenter p(x, std::min<std::size_t>(full_limit, 6));
  PNode top = p.present(t, p.base());
  PresentedAlgebra out;
  out.algebra = top.algebra;
  out.target_atoms = top.set.size();
  out.reduced = top.reduced;
  if (top.hom) out.dual = FinFn(FinSet(top.set.size()), top.algebra.atoms(), top.dual);
  else out.failure = top.failure;
  return out;
}

DeltaIsoReport check_delta_iso(const FunctorExpr& t, std::size_t x) {
  PresentedAlgebra p = presented_algebra(t, x);
  std::string head = t.str() + ", |X| = " + std::to_string(x) + ": |T(X)| = " + std::to_string(p.target_atoms) +
                     ", presented algebra has " + std::to_string(p.algebra.atom_count()) + " atoms";
  if (!p.dual) return {false, head + "; " + p.failure};
  if (p.algebra.atom_count() != p.target_atoms) return {false, head + "; cardinalities differ"};
  if (!p.dual->bijective()) return {false, head + "; evaluation is not bijective"};
  return {true, head + "; evaluation is bijective" + (p.reduced ? " (basis generators)" : "")};
}

// ---------------------------------------------------------------- logical partition

namespace {

class Refiner {
public:
  Refiner(const Coalgebra& c, ModelChecker& mc, const std::vector<Formula>& blocks)
      : c_(c), mc_(mc), blocks_(blocks) {}

  // Formulas at `layer` that, together, determine the image of a value
  // under T of the current block map.
  std::vector<Formula> gens(const Layer& layer_in) {
    const Layer layer = normalize(layer_in);
    if (layer.empty()) return blocks_;
    const FunctorExpr& top = layer.back();
    std::vector<Formula> out;
    switch (top.kind()) {
    case FunctorExpr::Kind::Const:
      for (const auto& n : top.names()) out.push_back(Formula::constant(n));
      break;
    case FunctorExpr::Kind::Sum:
    case FunctorExpr::Kind::Prod: {
      const bool sum = top.kind() == FunctorExpr::Kind::Sum;
      const ModalOp l = sum ? ModalOp::K1 : ModalOp::P1, r = sum ? ModalOp::K2 : ModalOp::P2;
      if (sum) {
        out.push_back(Formula::modal(l, Formula::top()));
        out.push_back(Formula::modal(r, Formula::top()));
      }
      for (const auto& g : gens(replace_top(layer, top.left()))) out.push_back(Formula::modal(l, g));
      for (const auto& g : gens(replace_top(layer, top.right()))) out.push_back(Formula::modal(r, g));
      break;
    }
    case FunctorExpr::Kind::Pow:
      for (const auto& a : atoms(pop_top(layer))) out.push_back(Formula::modal(ModalOp::Box, ~a));
      break;
    case FunctorExpr::Kind::Nbhd: {
      const auto as = atoms(pop_top(layer));
      if (as.size() > 16) throw ResourceLimit("Nbhd refinement unions", sat_pow2(as.size()));
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << as.size()); ++m) {
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < as.size(); ++i)
          if ((m >> i) & 1u) parts.push_back(as[i]);
        out.push_back(Formula::modal(ModalOp::Box, big_or(parts)));
      }
      break;
    }
    default: throw InvariantViolation("unnormalized layer");
    }
    return out;
  }

  // Nonempty atoms of the algebra the generators at `layer` generate,
  // found by evaluating them on every element of the layer set.
  std::vector<Formula> atoms(const Layer& layer) {
    if (layer.empty()) return blocks_;
    const auto gs = gens(layer);
    const auto values = layer_carrier(layer, c_.size()).enumerate("layer set for logical refinement");
    std::vector<std::vector<bool>> seen;
    std::vector<Formula> out;
    for (const auto& v : values) {
      std::vector<bool> bits;
      for (const auto& g : gs) bits.push_back(holds(c_.functor(), layer, c_.size(), g, v, leaf()));
      if (std::find(seen.begin(), seen.end(), bits) != seen.end()) continue;
      seen.push_back(bits);
      std::vector<Formula> lits;
      for (std::size_t i = 0; i < gs.size(); ++i) lits.push_back(bits[i] ? gs[i] : ~gs[i]);
      out.push_back(big_and(lits));
    }
    return out;
  }

  LeafHolds leaf() {
    return [this](const Formula& g, std::size_t y) { return mc_.eval(g).test(y); };
  }

private:
  const Coalgebra& c_;
  ModelChecker& mc_;
  const std::vector<Formula>& blocks_;
};

} // namespace

Partition logical_partition(const Coalgebra& c, const std::optional<Valuation>& seed) {
  const std::size_t n = c.size();
  const Valuation h = seed ? *seed : Valuation{};
  ModelChecker mc(c, h);

  // initial blocks: atoms of the algebra generated by the seed sets
  std::vector<Formula> lits_all;
  for (const auto& [name, s] : h) lits_all.push_back(Formula::var(name));
  std::vector<std::vector<bool>> keys(n);
  for (std::size_t x = 0; x < n; ++x)
    for (const auto& [name, s] : h) keys[x].push_back(s.test(x));
  Partition p = Partition::from_keys(c.carrier(), keys);
  std::vector<Formula> blocks(p.block_count(), Formula::top());
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<Formula> lits;
    for (std::size_t i = 0; i < lits_all.size(); ++i) lits.push_back(keys[x][i] ? lits_all[i] : ~lits_all[i]);
    blocks[p.block(x)] = big_and(lits);
  }

  while (true) {
    Refiner r(c, mc, blocks);
    const auto gs = r.gens(Layer{c.functor()});
    std::vector<std::pair<std::size_t, std::vector<bool>>> k(n);
    for (std::size_t x = 0; x < n; ++x) {
      k[x].first = p.block(x);
      for (const auto& g : gs) k[x].second.push_back(mc.holds_at(g, x));
    }
    Partition next = Partition::from_keys(c.carrier(), k);
    if (next.block_count() == p.block_count()) break;
    std::vector<Formula> nb(next.block_count(), Formula::top());
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<Formula> lits{blocks[p.block(x)]};
      for (std::size_t i = 0; i < gs.size(); ++i) lits.push_back(k[x].second[i] ? gs[i] : ~gs[i]);
      nb[next.block(x)] = big_and(lits);
    }
    blocks = std::move(nb);
    p = std::move(next);
  }
  return p;
}

} // namespace coalog
