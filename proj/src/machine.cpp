#include "dppl/machine.hpp"

#include <array>

#include "dppl/ad.hpp"
#include "dppl/errors.hpp"
#include "dppl/eval.hpp"
#include "dppl/ode.hpp"

namespace dppl::machine {

namespace {

[[noreturn]] void stuck(const std::string& what) { throw InternalError("no rule applies: " + what); }

MValue make_tuple(std::vector<MValue> elems) {
  if (elems.size() == 1) return std::move(elems.front());
  return MValue{std::make_shared<const std::vector<MValue>>(std::move(elems))};
}

const Dual& as_real(const MValue& v, const char* what) {
  if (auto* d = std::get_if<Dual>(&v.v)) return *d;
  stuck(std::string(what) + " is not a real");
}

class Evaluator {
 public:
  explicit Evaluator(Runtime& rt) : rt_(rt) {}

  MValue eval(const TermPtr& t, const EnvPtr& env) {
    return std::visit([&](const auto& n) { return on(t, n, env); }, t->node);
  }

 private:
  MValue on(const TermPtr&, const Var& n, const EnvPtr& env) {
    for (const Env* e = env.get(); e; e = e->next.get()) {
      if (e->name == n.name) return e->value;
    }
    stuck("free variable '" + std::string(n.name.name()) + "'");
  }

  MValue on(const TermPtr& t, const Abs& n, const EnvPtr& env) { return MValue{Closure{&n, t, env}}; }

  MValue on(const TermPtr&, const App& n, const EnvPtr& env) {
    if (auto* abs = n.fn->as<Abs>()) {
      MValue a = eval(n.arg, env);
      return eval(abs->body, std::make_shared<const Env>(Env{abs->param, std::move(a), env}));
    }
    MValue f = eval(n.fn, env);
    MValue a = eval(n.arg, env);
    return apply(f, a, rt_);
  }

  MValue on(const TermPtr&, const PrimApp& n, const EnvPtr& env) {
    std::array<Dual, 3> args;
    std::size_t k = 0;
    for (const auto& a : n.args) args[k++] = as_real(eval(a, env), "primitive argument");
    return MValue{lift_prim(n.prim, std::span<const Dual>(args.data(), k))};
  }

  MValue on(const TermPtr&, const RealLit& n, const EnvPtr&) { return MValue{n.value}; }

  MValue on(const TermPtr&, const TupleCon& n, const EnvPtr& env) {
    std::vector<MValue> elems;
    elems.reserve(n.elems.size());
    for (const auto& e : n.elems) elems.push_back(eval(e, env));
    return make_tuple(std::move(elems));
  }

  MValue on(const TermPtr&, const Proj& n, const EnvPtr& env) {
    MValue v = eval(n.tuple, env);
    if (auto* tu = std::get_if<Tuple>(&v.v)) {
      const auto& elems = **tu;
      if ((n.arity != 0 && n.arity != elems.size()) || n.index < 1 || n.index > elems.size()) {
        stuck("projection out of range");
      }
      return elems[n.index - 1];
    }
    if (n.index == 1 && n.arity <= 1) return v;
    stuck("projection from a non-tuple");
  }

  MValue on(const TermPtr&, const If& n, const EnvPtr& env) {
    double c = as_real(eval(n.cond, env), "comparand").value();
    return eval(c > 0.0 ? n.then_branch : n.else_branch, env);
  }

  MValue on(const TermPtr& t, const DistCon& n, const EnvPtr& env) {
    std::vector<TermPtr> ps;
    for (const auto& p : n.params) ps.push_back(real(as_real(eval(p, env), "distribution parameter")));
    return MValue{Opaque{make_term(DistCon{n.dist, std::move(ps)}, t->pos)}};
  }

  MValue on(const TermPtr&, const Assume&, const EnvPtr&) { stuck("assume in a deterministic context"); }
  MValue on(const TermPtr&, const Weight&, const EnvPtr&) { stuck("weight in a deterministic context"); }

  MValue on(const TermPtr& t, const Infer& n, const EnvPtr& env) {
    return MValue{Opaque{make_term(Infer{to_term(eval(n.model, env))}, t->pos)}};
  }

  MValue on(const TermPtr&, const Diff& n, const EnvPtr& env) {
    auto f = std::make_shared<const MValue>(eval(n.fn, env));
    auto p = std::make_shared<const MValue>(eval(n.point, env));
    return MValue{DerivClosure{std::move(f), std::move(p), n.mode}};
  }

  MValue on(const TermPtr&, const Solve& n, const EnvPtr& env) {
    MValue f = eval(n.rhs, env);
    MValue y0 = eval(n.init, env);
    Dual x1 = as_real(eval(n.end, env), "end time");
    return solve(f, y0, x1, rt_);
  }

  MValue on(const TermPtr&, const Jvp& n, const EnvPtr& env) {
    MValue f = eval(n.fn, env);
    MValue p = eval(n.point, env);
    MValue u = eval(n.tangent, env);
    return jvp(f, p, u, rt_);
  }

  Runtime& rt_;
};

bool flatten_into(const MValue& v, std::vector<Dual>& out) {
  if (auto* d = std::get_if<Dual>(&v.v)) {
    out.push_back(*d);
    return true;
  }
  if (auto* tu = std::get_if<Tuple>(&v.v)) {
    for (const auto& e : **tu) {
      if (!flatten_into(e, out)) return false;
    }
    return true;
  }
  return false;
}

MValue rebuild_from(const MValue& shape, const std::vector<Dual>& leaves, std::size_t& i) {
  if (auto* tu = std::get_if<Tuple>(&shape.v)) {
    std::vector<MValue> elems;
    elems.reserve((*tu)->size());
    for (const auto& e : **tu) elems.push_back(rebuild_from(e, leaves, i));
    return make_tuple(std::move(elems));
  }
  if (i >= leaves.size()) stuck("shape mismatch");
  return MValue{leaves[i++]};
}

}  // namespace

bool flatten(const MValue& v, std::vector<Dual>& out) { return flatten_into(v, out); }

MValue rebuild(const MValue& shape, const std::vector<Dual>& leaves) {
  std::size_t i = 0;
  MValue out = rebuild_from(shape, leaves, i);
  if (i != leaves.size()) stuck("shape mismatch");
  return out;
}

MValue from_term(const TermPtr& value) {
  if (auto* r = value->as<RealLit>()) return MValue{r->value};
  if (auto* tu = value->as<TupleCon>()) {
    std::vector<MValue> elems;
    for (const auto& e : tu->elems) elems.push_back(from_term(e));
    return make_tuple(std::move(elems));
  }
  if (auto* abs = value->as<Abs>()) return MValue{Closure{abs, value, nullptr}};
  if (value->value) return MValue{Opaque{value}};
  stuck("not a value: " + pretty(value));
}

TermPtr to_term(const MValue& v) {
  if (auto* d = std::get_if<Dual>(&v.v)) return real(*d);
  if (auto* tu = std::get_if<Tuple>(&v.v)) {
    std::vector<TermPtr> elems;
    for (const auto& e : **tu) elems.push_back(to_term(e));
    return tuple(std::move(elems));
  }
  if (auto* c = std::get_if<Closure>(&v.v)) {
    TermPtr t = c->owner;
    for (const Env* e = c->env.get(); e; e = e->next.get()) t = subst(t, e->name, to_term(e->value));
    return t;
  }
  if (auto* d = std::get_if<DerivClosure>(&v.v)) return diff_impl(to_term(*d->fn), to_term(*d->point), d->mode);
  return std::get<Opaque>(v.v).term;
}

MValue evaluate(const TermPtr& t, const EnvPtr& env, Runtime& rt) { return Evaluator(rt).eval(t, env); }

MValue apply(const MValue& f, const MValue& arg, Runtime& rt) {
  if (auto* c = std::get_if<Closure>(&f.v)) {
    return Evaluator(rt).eval(c->abs->body, std::make_shared<const Env>(Env{c->abs->param, arg, c->env}));
  }
  if (auto* d = std::get_if<DerivClosure>(&f.v)) return jvp(*d->fn, *d->point, arg, rt);
  stuck("application of a non-function");
}

MValue jvp(const MValue& f, const MValue& point, const MValue& tangent, Runtime& rt) {
  std::vector<Dual> p, u;
  if (!flatten(point, p) || !flatten(tangent, u) || p.size() != u.size()) {
    stuck("derivative point and tangent shapes differ");
  }
  Tag tag = fresh_tag();
  std::vector<Dual> in;
  in.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) in.push_back(Dual::make(tag, p[i], u[i]));
  MValue out = apply(f, rebuild(point, in), rt);
  std::vector<Dual> leaves;
  if (!flatten(out, leaves)) stuck("differentiated function returned a non-real value");
  for (auto& d : leaves) d = d.tangent_at(tag);
  return rebuild(out, leaves);
}

MValue solve(const MValue& rhs, const MValue& y0, const Dual& x1, Runtime& rt) {
  State init;
  if (!flatten(y0, init)) stuck("initial value is not real-valued");
  RhsFn f = [&](const Dual& x, const State& y) {
    std::vector<MValue> arg{MValue{x}, rebuild(y0, y)};
    MValue r = apply(rhs, make_tuple(std::move(arg)), rt);
    State out;
    out.reserve(y.size());
    if (!flatten(r, out) || out.size() != y.size()) stuck("right-hand side returned a value of the wrong shape");
    return out;
  };
  return rebuild(y0, integrate(f, init, x1, rt.ode));
}

}  // namespace dppl::machine
