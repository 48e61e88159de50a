#include "dppl/typer.hpp"

#include <algorithm>
#include <vector>

namespace dppl {

TypeError::TypeError(std::string rule, std::string message, SourcePos pos, TypePtr expected, TypePtr found)
    : std::runtime_error(rule + ": " + message),
      rule_(std::move(rule)),
      message_(std::move(message)),
      pos_(pos),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

bool subtype(const TypePtr& sub, const TypePtr& super) {
  if (sub == super) return true;
  const auto& a = sub->node;
  const auto& b = super->node;
  if (a.index() != b.index()) return false;
  if (auto* r = std::get_if<RealType>(&a)) return std::get<RealType>(b).mod <= r->mod;
  if (auto* f = std::get_if<ArrowType>(&a)) {
    const auto& g = std::get<ArrowType>(b);
    return f->eff <= g.eff && subtype(g.arg, f->arg) && subtype(f->res, g.res);
  }
  if (auto* t = std::get_if<TupleType>(&a)) {
    const auto& u = std::get<TupleType>(b);
    if (t->elems.size() != u.elems.size()) return false;
    for (std::size_t i = 0; i < t->elems.size(); ++i) {
      if (!subtype(t->elems[i], u.elems[i])) return false;
    }
    return true;
  }
  return subtype(std::get<DistType>(a).support, std::get<DistType>(b).support);
}

namespace {

TypePtr bound(const TypePtr& a, const TypePtr& b, bool upper) {
  auto mismatch = [&]() -> TypeError {
    return TypeError(upper ? "join" : "meet",
                     "incompatible types " + to_string(a) + " and " + to_string(b));
  };
  if (a->node.index() != b->node.index()) throw mismatch();
  if (auto* r = std::get_if<RealType>(&a->node)) {
    Coeffect c = std::get<RealType>(b->node).mod;
    return real_type(upper ? std::min(r->mod, c) : std::max(r->mod, c));
  }
  if (auto* f = std::get_if<ArrowType>(&a->node)) {
    const auto& g = std::get<ArrowType>(b->node);
    Effect e = upper ? std::max(f->eff, g.eff) : std::min(f->eff, g.eff);
    return arrow_type(bound(f->arg, g.arg, !upper), e, bound(f->res, g.res, upper));
  }
  if (auto* t = std::get_if<TupleType>(&a->node)) {
    const auto& u = std::get<TupleType>(b->node);
    if (t->elems.size() != u.elems.size()) throw mismatch();
    std::vector<TypePtr> elems;
    for (std::size_t i = 0; i < t->elems.size(); ++i) elems.push_back(bound(t->elems[i], u.elems[i], upper));
    return tuple_type(std::move(elems));
  }
  return dist_type(bound(std::get<DistType>(a->node).support, std::get<DistType>(b->node).support, upper));
}

// Replaces every real leaf of a real-shaped type by R^c.
TypePtr with_leaves(const TypePtr& t, Coeffect c) {
  if (std::holds_alternative<RealType>(t->node)) return real_type(c);
  const auto& tu = std::get<TupleType>(t->node);
  std::vector<TypePtr> elems;
  for (const auto& e : tu.elems) elems.push_back(with_leaves(e, c));
  return tuple_type(std::move(elems));
}

TypePtr from_leaves(const TypePtr& shape, const std::vector<Coeffect>& leaves, std::size_t& i) {
  if (std::holds_alternative<RealType>(shape->node)) return real_type(leaves[i++]);
  std::vector<TypePtr> elems;
  for (const auto& e : std::get<TupleType>(shape->node).elems) elems.push_back(from_leaves(e, leaves, i));
  return tuple_type(std::move(elems));
}

bool same_shape(const TypePtr& a, const TypePtr& b) {
  if (std::holds_alternative<RealType>(a->node)) return std::holds_alternative<RealType>(b->node);
  auto* t = std::get_if<TupleType>(&a->node);
  auto* u = std::get_if<TupleType>(&b->node);
  if (!t || !u || t->elems.size() != u->elems.size()) return false;
  for (std::size_t i = 0; i < t->elems.size(); ++i) {
    if (!same_shape(t->elems[i], u->elems[i])) return false;
  }
  return true;
}

struct Synth {
  TypePtr type;
  Effect effect = Effect::Det;
  std::vector<Symbol> fv;  // sorted, unique
};

void merge_fv(std::vector<Symbol>& into, const std::vector<Symbol>& from) {
  std::vector<Symbol> out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into = std::move(out);
}

void remove_fv(std::vector<Symbol>& fv, Symbol x) {
  auto it = std::lower_bound(fv.begin(), fv.end(), x);
  if (it != fv.end() && *it == x) fv.erase(it);
}

Coeffect min_leaf(const TypeExpr& t, Coeffect acc) {
  if (auto* r = std::get_if<RealType>(&t.node)) return std::min(acc, r->mod);
  if (auto* tu = std::get_if<TupleType>(&t.node)) {
    for (const auto& e : tu->elems) acc = min_leaf(*e, acc);
  }
  return acc;
}

class Checker {
 public:
  explicit Checker(const TypeEnv& env) {
    for (const auto& [k, v] : env) scope_.emplace_back(k, v);
  }

  Synth synth(const TermPtr& t) {
    Synth s = std::visit([&](const auto& n) { return rule(t, n); }, t->node);
    Coeffect c = Coeffect::N;
    for (Symbol x : s.fv) c = min_leaf(*lookup(x, t->pos), c);
    s.type = promote_type(c, s.type);
    return s;
  }

 private:
  const TypePtr& lookup(Symbol x, SourcePos pos) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == x) return it->second;
    }
    throw TypeError("T-Var", "unbound variable '" + std::string(x.name()) + "'", pos);
  }

  void require(const std::string& rule, const Synth& s, const TypePtr& expected, const TermPtr& at,
               const std::string& what) {
    if (subtype(s.type, expected)) return;
    std::string msg = what + " expects " + to_string(expected) + ", found " + to_string(s.type);
    throw TypeError(rule, msg, at->pos, expected, s.type);
  }

  Synth under(Symbol x, const TypePtr& ty, const TermPtr& body) {
    scope_.emplace_back(x, ty);
    Synth s = synth(body);
    scope_.pop_back();
    remove_fv(s.fv, x);
    return s;
  }

  Synth rule(const TermPtr& t, const Var& n) { return {lookup(n.name, t->pos), Effect::Det, {n.name}}; }

  Synth rule(const TermPtr& t, const Abs& n) {
    if (!n.annot) throw TypeError("T-Abs", "lambda parameter '" + std::string(n.param.name()) + "' needs a type annotation", t->pos);
    Synth b = under(n.param, n.annot, n.body);
    return {arrow_type(n.annot, b.effect, b.type), Effect::Det, std::move(b.fv)};
  }

  Synth rule(const TermPtr& t, const App& n) {
    if (auto* abs = n.fn->as<Abs>(); abs && !abs->annot) {
      Synth a = synth(n.arg);
      Synth b = under(abs->param, a.type, abs->body);
      merge_fv(b.fv, a.fv);
      b.effect = effect_join(a.effect, b.effect);
      return b;
    }
    Synth f = synth(n.fn);
    auto* arrow = std::get_if<ArrowType>(&f.type->node);
    if (!arrow) throw TypeError("T-App", "cannot apply a term of type " + to_string(f.type), t->pos, nullptr, f.type);
    Synth a = synth(n.arg);
    require("T-App", a, arrow->arg, n.arg, "function argument");
    merge_fv(f.fv, a.fv);
    return {arrow->res, effect_join(effect_join(f.effect, a.effect), arrow->eff), std::move(f.fv)};
  }

  Synth rule(const TermPtr& t, const PrimApp& n) {
    std::vector<Coeffect> params;
    Coeffect result;
    switch (n.prim.op) {
      case PrimOp::Wiener:
        params = {Coeffect::N};
        result = Coeffect::N;
        break;
      case PrimOp::Sin:
      case PrimOp::Cos:
        params = {Coeffect::A};
        result = Coeffect::A;
        break;
      case PrimOp::PdfGaussian:
        params = {Coeffect::A, Coeffect::A, Coeffect::A};
        result = Coeffect::A;
        break;
      case PrimOp::PdfBeta:
        params = {Coeffect::P, Coeffect::P, Coeffect::P};
        result = Coeffect::P;
        break;
      default:
        params = {Coeffect::A, Coeffect::A};
        result = Coeffect::A;
    }
    std::string name = to_string(n.prim.op);
    if (n.args.size() != params.size()) {
      throw TypeError("T-PrimApp", "'" + name + "' expects " + std::to_string(params.size()) + " argument(s), found " + std::to_string(n.args.size()), t->pos);
    }
    Synth out{real_type(result), Effect::Det, {}};
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      Synth a = synth(n.args[i]);
      TypePtr expected = real_type(params[i]);
      if (!subtype(a.type, expected)) {
        std::string msg = "argument " + std::to_string(i + 1) + " of '" + name + "' expects " + to_string(expected) +
                          ", found " + to_string(a.type);
        if (params[i] == Coeffect::N && std::holds_alternative<RealType>(a.type->node)) {
          msg += " (tangent would reach non-differentiable primitive)";
        }
        throw TypeError("T-PrimApp", msg, n.args[i]->pos, expected, a.type);
      }
      out.effect = effect_join(out.effect, a.effect);
      merge_fv(out.fv, a.fv);
    }
    return out;
  }

  Synth rule(const TermPtr&, const RealLit&) { return {real_type(Coeffect::N), Effect::Det, {}}; }

  Synth rule(const TermPtr&, const TupleCon& n) {
    Synth out{nullptr, Effect::Det, {}};
    std::vector<TypePtr> elems;
    for (const auto& e : n.elems) {
      Synth s = synth(e);
      elems.push_back(s.type);
      out.effect = effect_join(out.effect, s.effect);
      merge_fv(out.fv, s.fv);
    }
    out.type = tuple_type(std::move(elems));
    return out;
  }

  Synth rule(const TermPtr& t, const Proj& n) {
    Synth s = synth(n.tuple);
    if (auto* tu = std::get_if<TupleType>(&s.type->node)) {
      std::size_t size = tu->elems.size();
      if ((n.arity != 0 && n.arity != size) || n.index < 1 || n.index > size) {
        throw TypeError("T-Proj", "cannot project component " + std::to_string(n.index) + " from " + to_string(s.type), t->pos, nullptr, s.type);
      }
      s.type = tu->elems[n.index - 1];
      return s;
    }
    if (n.index == 1 && n.arity <= 1) return s;
    throw TypeError("T-Proj", "cannot project component " + std::to_string(n.index) + " from " + to_string(s.type), t->pos, nullptr, s.type);
  }

  Synth rule(const TermPtr& t, const If& n) {
    Synth c = synth(n.cond);
    if (!subtype(c.type, real_type(Coeffect::P))) {
      throw TypeError("T-If", "comparand must be piecewise-analytic (RealP), found " + to_string(c.type), n.cond->pos,
                      real_type(Coeffect::P), c.type);
    }
    Synth a = synth(n.then_branch);
    Synth b = synth(n.else_branch);
    TypePtr ty;
    try {
      ty = join(a.type, b.type);
    } catch (const TypeError&) {
      throw TypeError("T-If", "branches have incompatible types " + to_string(a.type) + " and " + to_string(b.type), t->pos);
    }
    merge_fv(c.fv, a.fv);
    merge_fv(c.fv, b.fv);
    return {ty, effect_join(c.effect, effect_join(a.effect, b.effect)), std::move(c.fv)};
  }

  Synth rule(const TermPtr& t, const DistCon& n) {
    if (n.params.size() != arity(n.dist)) {
      throw TypeError("T-PrimDist", std::string(to_string(n.dist)) + " expects " + std::to_string(arity(n.dist)) + " parameter(s)", t->pos);
    }
    Synth out{nullptr, Effect::Det, {}};
    for (const auto& p : n.params) {
      Synth s = synth(p);
      require("T-PrimDist", s, real_type(Coeffect::N), p, std::string("parameter of ") + to_string(n.dist));
      out.effect = effect_join(out.effect, s.effect);
      merge_fv(out.fv, s.fv);
    }
    TypePtr support = n.dist == PrimDist::WienerProcess
                          ? arrow_type(real_type(Coeffect::N), Effect::Det, real_type(Coeffect::N))
                          : real_type(Coeffect::N);
    out.type = dist_type(support);
    return out;
  }

  Synth rule(const TermPtr& t, const Assume& n) {
    Synth s = synth(n.dist);
    auto* d = std::get_if<DistType>(&s.type->node);
    if (!d) throw TypeError("T-Assume", "expected a distribution, found " + to_string(s.type), t->pos, nullptr, s.type);
    return {d->support, Effect::Rnd, std::move(s.fv)};
  }

  Synth rule(const TermPtr& t, const Weight& n) {
    Synth s = synth(n.arg);
    require("T-Weight", s, real_type(Coeffect::N), t, "weight");
    return {unit_type(), Effect::Rnd, std::move(s.fv)};
  }

  Synth rule(const TermPtr& t, const Infer& n) {
    Synth f = synth(n.model);
    auto* arrow = std::get_if<ArrowType>(&f.type->node);
    if (!arrow || !subtype(unit_type(), arrow->arg)) {
      throw TypeError("T-Infer", "expected a model of type () ->rnd T, found " + to_string(f.type), t->pos, nullptr, f.type);
    }
    return {dist_type(arrow->res), f.effect, std::move(f.fv)};
  }

  Synth rule(const TermPtr& t, const Diff& n) {
    Synth f = synth(n.fn);
    auto* arrow = std::get_if<ArrowType>(&f.type->node);
    if (!arrow) throw TypeError("T-Diff", "expected a function, found " + to_string(f.type), n.fn->pos, nullptr, f.type);
    if (arrow->eff == Effect::Rnd) throw TypeError("T-Diff", "cannot differentiate random function", n.fn->pos, nullptr, f.type);
    auto in = real_leaves(*arrow->arg);
    if (!in) throw TypeError("T-Diff", "argument type must be real-valued, found " + to_string(arrow->arg), n.fn->pos);
    for (Coeffect c : *in) {
      if (c > n.mode) {
        throw TypeError("T-Diff", std::string("function argument ") + to_string(arrow->arg) + " does not admit Real" + to_string(n.mode) + " inputs", n.fn->pos);
      }
    }
    if (!real_leaves(*arrow->res)) {
      throw TypeError("T-Diff", "result type must be real-valued, found " + to_string(arrow->res), n.fn->pos);
    }
    Synth p = synth(n.point);
    require("T-Diff", p, with_leaves(arrow->arg, n.mode), n.point, "differentiation point");
    merge_fv(f.fv, p.fv);
    return {arrow_type(with_leaves(arrow->arg, Coeffect::A), Effect::Det, arrow->res), effect_join(f.effect, p.effect), std::move(f.fv)};
  }

  Synth rule(const TermPtr& t, const Solve& n) {
    Synth f = synth(n.rhs);
    auto* arrow = std::get_if<ArrowType>(&f.type->node);
    if (!arrow) throw TypeError("T-Solve", "expected a right-hand side function, found " + to_string(f.type), n.rhs->pos);
    if (arrow->eff == Effect::Rnd) throw TypeError("T-Solve", "right-hand side must be deterministic", n.rhs->pos, nullptr, f.type);
    auto* args = std::get_if<TupleType>(&arrow->arg->node);
    if (!args || args->elems.size() != 2 || !std::holds_alternative<RealType>(args->elems[0]->node)) {
      throw TypeError("T-Solve", "right-hand side must take (time, state), found " + to_string(arrow->arg), n.rhs->pos);
    }
    Coeffect cf = std::get<RealType>(args->elems[0]->node).mod;
    const TypePtr& ty = args->elems[1];
    auto ty_leaves = real_leaves(*ty);
    auto res_leaves = real_leaves(*arrow->res);
    if (!ty_leaves || !res_leaves || !same_shape(ty, arrow->res)) {
      throw TypeError("T-Solve", "right-hand side must map states to states of the same real shape", n.rhs->pos);
    }
    Synth y0 = synth(n.init);
    auto y_leaves = real_leaves(*y0.type);
    if (!y_leaves || !same_shape(y0.type, ty)) {
      throw TypeError("T-Solve", "initial value " + to_string(y0.type) + " does not match state type " + to_string(ty), n.init->pos, ty, y0.type);
    }
    Synth x1 = synth(n.end);
    Coeffect c = std::max(cf, Coeffect::P);
    require("T-Solve", x1, real_type(c), n.end, "end time");
    std::vector<Coeffect> cv(ty_leaves->size());
    for (std::size_t i = 0; i < cv.size(); ++i) {
      cv[i] = std::min((*res_leaves)[i], (*y_leaves)[i]);
      if ((*ty_leaves)[i] > cv[i]) {
        throw TypeError("T-Solve", "state type " + to_string(ty) + " is not compatible with the result and initial value", n.rhs->pos);
      }
    }
    std::size_t i = 0;
    TypePtr result = from_leaves(ty, cv, i);
    merge_fv(f.fv, y0.fv);
    merge_fv(f.fv, x1.fv);
    return {result, effect_join(f.effect, effect_join(y0.effect, x1.effect)), std::move(f.fv)};
  }

  Synth rule(const TermPtr& t, const Jvp& n) {
    Synth f = synth(n.fn);
    auto* arrow = std::get_if<ArrowType>(&f.type->node);
    if (!arrow) throw TypeError("T-Diff", "expected a function, found " + to_string(f.type), t->pos);
    Synth p = synth(n.point);
    Synth u = synth(n.tangent);
    merge_fv(f.fv, p.fv);
    merge_fv(f.fv, u.fv);
    return {arrow->res, Effect::Det, std::move(f.fv)};
  }

  std::vector<std::pair<Symbol, TypePtr>> scope_;
};

}  // namespace

TypePtr join(const TypePtr& a, const TypePtr& b) { return bound(a, b, true); }
TypePtr meet(const TypePtr& a, const TypePtr& b) { return bound(a, b, false); }

Judgment infer_type(const TypeEnv& env, const TermPtr& t) {
  Checker c(env);
  Synth s = c.synth(t);
  return {s.type, s.effect};
}

TypePtr check_program(const TermPtr& t, bool allow_random) {
  Judgment j = infer_type({}, t);
  if (j.effect == Effect::Rnd && !allow_random) {
    throw TypeError("T-Program", "top-level term is random (use --allow-random or wrap it in infer)", t->pos);
  }
  return j.type;
}

}  // namespace dppl
