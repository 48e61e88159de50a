#pragma once

// Shared test helpers: program runners, corpus access, a typed term
// generator for the metatheory properties and a generator of smooth scalar
// expressions for gradient checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dppl/ast.hpp"
#include "dppl/dist.hpp"
#include "dppl/errors.hpp"
#include "dppl/eval.hpp"
#include "dppl/parser.hpp"
#include "dppl/typer.hpp"

namespace dppl::test {

inline std::filesystem::path source_dir() { return DPPL_SOURCE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> corpus(const std::string& kind) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(source_dir() / "tests" / "corpus" / kind)) {
    if (e.path().extension() == ".dppl") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Rule and message fragment each reject-corpus program must fail with.
inline const std::map<std::string, std::string>& reject_expectations() {
  static const std::map<std::string, std::string> m = {
      {"abs_analytic", "T-If: comparand must be piecewise-analytic"},
      {"analytic_distribution_parameter", "T-PrimDist: parameter of Gaussian expects RealN"},
      {"branch_in_analytic_derivative", "T-If: comparand must be piecewise-analytic"},
      {"diff_random_function", "T-Diff: cannot differentiate random function"},
      {"diff_wiener_sample", "T-Diff: function argument RealN does not admit RealP inputs"},
      {"infer_deterministic_model", "T-Infer: expected a model of type () ->rnd T"},
      {"solve_random_rhs", "T-Solve: right-hand side must be deterministic"},
      {"top_level_weight", "T-Program: top-level term is random"},
      {"wiener_of_analytic", "T-PrimApp: argument 1 of 'wiener' expects RealN, found RealA (tangent would reach"},
  };
  return m;
}

inline double num(const TermPtr& t) {
  auto* r = t->as<RealLit>();
  if (!r) throw std::runtime_error("not a real: " + pretty(t));
  return r->value.value();
}

inline std::vector<double> nums(const TermPtr& t) {
  auto leaves = flatten_reals(t);
  if (!leaves) throw std::runtime_error("not real-valued: " + pretty(t));
  std::vector<double> out;
  for (const auto& d : *leaves) out.push_back(d.value());
  return out;
}

// Parses, type-checks (deterministic top level) and evaluates.
inline TermPtr run_det(std::string_view src, Runtime& rt) {
  TermPtr t = parse(src);
  check_program(t);
  return eval_det(t, rt);
}

inline TermPtr run_det(std::string_view src, Runtime&& rt = Runtime{}) { return run_det(src, rt); }

// Structural equality up to renaming of bound variables.
inline bool alpha_equal(const TermPtr& a, const TermPtr& b, std::vector<std::pair<Symbol, Symbol>>& bound) {
  if (a->node.index() != b->node.index()) return false;
  auto list = [&](const std::vector<TermPtr>& x, const std::vector<TermPtr>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!alpha_equal(x[i], y[i], bound)) return false;
    }
    return true;
  };
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const T& m = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Var>) {
          for (std::size_t i = bound.size(); i-- > 0;) {
            bool l = bound[i].first == n.name, r = bound[i].second == m.name;
            if (l || r) return l && r;
          }
          return n.name == m.name;
        } else if constexpr (std::is_same_v<T, Abs>) {
          if (bool(n.annot) != bool(m.annot) || (n.annot && !type_equal(n.annot, m.annot))) return false;
          bound.emplace_back(n.param, m.param);
          bool ok = alpha_equal(n.body, m.body, bound);
          bound.pop_back();
          return ok;
        } else if constexpr (std::is_same_v<T, App>) {
          return alpha_equal(n.fn, m.fn, bound) && alpha_equal(n.arg, m.arg, bound);
        } else if constexpr (std::is_same_v<T, PrimApp>) {
          bool same_path = n.prim.path == m.prim.path ||
                           (n.prim.path && m.prim.path && n.prim.path->key() == m.prim.path->key());
          return n.prim.op == m.prim.op && same_path && list(n.args, m.args);
        } else if constexpr (std::is_same_v<T, RealLit>) {
          return n.value.same_as(m.value);
        } else if constexpr (std::is_same_v<T, TupleCon>) {
          return list(n.elems, m.elems);
        } else if constexpr (std::is_same_v<T, Proj>) {
          return n.arity == m.arity && n.index == m.index && alpha_equal(n.tuple, m.tuple, bound);
        } else if constexpr (std::is_same_v<T, If>) {
          return list({n.cond, n.then_branch, n.else_branch}, {m.cond, m.then_branch, m.else_branch});
        } else if constexpr (std::is_same_v<T, DistCon>) {
          return n.dist == m.dist && list(n.params, m.params);
        } else if constexpr (std::is_same_v<T, Assume>) {
          return alpha_equal(n.dist, m.dist, bound);
        } else if constexpr (std::is_same_v<T, Weight>) {
          return alpha_equal(n.arg, m.arg, bound);
        } else if constexpr (std::is_same_v<T, Infer>) {
          return alpha_equal(n.model, m.model, bound);
        } else if constexpr (std::is_same_v<T, Diff>) {
          return n.mode == m.mode && list({n.fn, n.point}, {m.fn, m.point});
        } else if constexpr (std::is_same_v<T, Solve>) {
          return list({n.rhs, n.init, n.end}, {m.rhs, m.init, m.end});
        } else {
          return list({n.fn, n.point, n.tangent}, {m.fn, m.point, m.tangent});
        }
      },
      a->node);
}

inline bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  std::vector<std::pair<Symbol, Symbol>> bound;
  return alpha_equal(a, b, bound);
}

template <class N, class F>
void for_each_child(const N& n, F&& f) {
  using T = std::decay_t<N>;
  if constexpr (std::is_same_v<T, App>) {
    f(n.fn), f(n.arg);
  } else if constexpr (std::is_same_v<T, PrimApp>) {
    for (const auto& a : n.args) f(a);
  } else if constexpr (std::is_same_v<T, TupleCon>) {
    for (const auto& a : n.elems) f(a);
  } else if constexpr (std::is_same_v<T, Proj>) {
    f(n.tuple);
  } else if constexpr (std::is_same_v<T, If>) {
    f(n.cond), f(n.then_branch), f(n.else_branch);
  } else if constexpr (std::is_same_v<T, DistCon>) {
    for (const auto& a : n.params) f(a);
  } else if constexpr (std::is_same_v<T, Assume>) {
    f(n.dist);
  } else if constexpr (std::is_same_v<T, Weight>) {
    f(n.arg);
  } else if constexpr (std::is_same_v<T, Infer>) {
    f(n.model);
  } else if constexpr (std::is_same_v<T, Diff>) {
    f(n.fn), f(n.point);
  } else if constexpr (std::is_same_v<T, Solve>) {
    f(n.rhs), f(n.init), f(n.end);
  } else if constexpr (std::is_same_v<T, Jvp>) {
    f(n.fn), f(n.point), f(n.tangent);
  }
}

template <class N, class F>
void map_children(N& n, F&& f) {
  using T = std::decay_t<N>;
  if constexpr (std::is_same_v<T, App>) {
    n.fn = f(n.fn), n.arg = f(n.arg);
  } else if constexpr (std::is_same_v<T, PrimApp>) {
    for (auto& a : n.args) a = f(a);
  } else if constexpr (std::is_same_v<T, TupleCon>) {
    for (auto& a : n.elems) a = f(a);
  } else if constexpr (std::is_same_v<T, Proj>) {
    n.tuple = f(n.tuple);
  } else if constexpr (std::is_same_v<T, If>) {
    n.cond = f(n.cond), n.then_branch = f(n.then_branch), n.else_branch = f(n.else_branch);
  } else if constexpr (std::is_same_v<T, DistCon>) {
    for (auto& a : n.params) a = f(a);
  } else if constexpr (std::is_same_v<T, Assume>) {
    n.dist = f(n.dist);
  } else if constexpr (std::is_same_v<T, Weight>) {
    n.arg = f(n.arg);
  } else if constexpr (std::is_same_v<T, Infer>) {
    n.model = f(n.model);
  } else if constexpr (std::is_same_v<T, Diff>) {
    n.fn = f(n.fn), n.point = f(n.point);
  } else if constexpr (std::is_same_v<T, Solve>) {
    n.rhs = f(n.rhs), n.init = f(n.init), n.end = f(n.end);
  } else if constexpr (std::is_same_v<T, Jvp>) {
    n.fn = f(n.fn), n.point = f(n.point), n.tangent = f(n.tangent);
  }
}

// Free variables in order of first occurrence.
inline void free_vars(const TermPtr& t, std::vector<Symbol>& bound, std::vector<Symbol>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          if (std::find(bound.begin(), bound.end(), n.name) == bound.end() &&
              std::find(out.begin(), out.end(), n.name) == out.end()) {
            out.push_back(n.name);
          }
        } else if constexpr (std::is_same_v<T, Abs>) {
          bound.push_back(n.param);
          free_vars(n.body, bound, out);
          bound.pop_back();
        } else {
          for_each_child(n, [&](const TermPtr& c) { free_vars(c, bound, out); });
        }
      },
      t->node);
}

inline std::vector<Symbol> free_vars(const TermPtr& t) {
  std::vector<Symbol> bound, out;
  free_vars(t, bound, out);
  return out;
}

// Renames every binder to a fresh name.
inline TermPtr rename_bound(const TermPtr& t, std::vector<std::pair<Symbol, Symbol>>& env, int& counter) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          for (std::size_t i = env.size(); i-- > 0;) {
            if (env[i].first == n.name) return var(env[i].second, t->pos);
          }
          return t;
        } else if constexpr (std::is_same_v<T, Abs>) {
          Symbol fresh("renamed" + std::to_string(counter++));
          env.emplace_back(n.param, fresh);
          TermPtr body = rename_bound(n.body, env, counter);
          env.pop_back();
          return make_term(Abs{fresh, n.annot, body}, t->pos);
        } else {
          T copy = n;
          map_children(copy, [&](const TermPtr& c) { return rename_bound(c, env, counter); });
          return make_term(copy, t->pos);
        }
      },
      t->node);
}

inline TermPtr rename_bound(const TermPtr& t) {
  std::vector<std::pair<Symbol, Symbol>> env;
  int counter = 0;
  return rename_bound(t, env, counter);
}

// ---------------------------------------------------------------------------
// Typed term generator. Candidates are produced structurally and kept only
// when the checker assigns them a subtype of the requested type, so every
// returned term is well typed by construction of the filter.

class TermGen {
 public:
  struct Options {
    int max_depth = 6;
    bool allow_solve = true;
    bool allow_infer = true;
  };

  explicit TermGen(std::uint64_t seed) : rng_(seed) {}
  TermGen(std::uint64_t seed, Options opt) : rng_(seed), opt_(opt) {}

  // A closed term whose type is a subtype of `type`; random effects only
  // when `rnd` is set.
  TermPtr closed(const TypePtr& type, bool rnd) { return gen(type, rnd, {}, opt_.max_depth); }

  // Same, with free variables drawn from `scope`.
  TermPtr open(const TypePtr& type, bool rnd, const std::vector<std::pair<Symbol, TypePtr>>& scope) {
    return gen(type, rnd, scope, opt_.max_depth);
  }

  TypePtr random_type(int depth = 2) {
    int k = pick(depth > 0 ? 10 : 6);
    if (k < 6) return real_type(random_coeffect());
    if (k < 8) {
      std::vector<TypePtr> elems;
      int n = pick(3);
      for (int i = 0; i <= n; ++i) elems.push_back(random_type(depth - 1));
      return tuple_type(std::move(elems));
    }
    return arrow_type(random_type(depth - 1), Effect::Det, random_type(depth - 1));
  }

  Coeffect random_coeffect() { return static_cast<Coeffect>(pick(3)); }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  double literal() {
    if (pick(4) == 0) return 0.25 * (pick(17) - 8);
    return std::round(uniform(-3.0, 3.0) * 1000.0) / 1000.0;
  }

 private:
  using Scope = std::vector<std::pair<Symbol, TypePtr>>;

  Symbol fresh() { return Symbol("g" + std::to_string(counter_++)); }

  static TypeEnv env_of(const Scope& scope) {
    TypeEnv env;
    for (const auto& [x, t] : scope) env[x] = t;
    return env;
  }

  bool fits(const TermPtr& t, const TypePtr& type, bool rnd, const Scope& scope) {
    try {
      Judgment j = infer_type(env_of(scope), t);
      if (j.effect == Effect::Rnd && !rnd) return false;
      return subtype(j.type, type);
    } catch (const TypeError&) {
      return false;
    }
  }

  TermPtr gen(const TypePtr& type, bool rnd, const Scope& scope, int depth) {
    for (int attempt = 0; attempt < 4 && depth > 0; ++attempt) {
      TermPtr t = candidate(type, rnd, scope, depth);
      if (t && fits(t, type, rnd, scope)) return t;
    }
    return simple(type, scope);
  }

  // Always well typed: literals, variables of an exact subtype, lambdas.
  TermPtr simple(const TypePtr& type, const Scope& scope) {
    std::vector<Symbol> vars;
    for (const auto& [x, t] : scope) {
      if (subtype(t, type) && fits(var(x), type, false, scope)) vars.push_back(x);
    }
    if (!vars.empty() && pick(2) == 0) return var(vars[pick(static_cast<int>(vars.size()))]);
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, RealType>) {
            return real(literal());
          } else if constexpr (std::is_same_v<T, TupleType>) {
            std::vector<TermPtr> elems;
            for (const auto& e : n.elems) elems.push_back(simple(e, scope));
            return tuple(std::move(elems));
          } else if constexpr (std::is_same_v<T, ArrowType>) {
            Symbol x = fresh();
            Scope inner = scope;
            inner.emplace_back(x, n.arg);
            TermPtr body = simple(n.res, inner);
            if (n.eff == Effect::Rnd) body = let_in(fresh(), make_term(Weight{real(1.0)}), body);
            return lam(x, n.arg, body);
          } else {
            Symbol u = fresh();
            TermPtr body = let_in(fresh(), make_term(Weight{real(1.0)}), simple(n.support, scope));
            return make_term(Infer{lam(u, unit_type(), body)});
          }
        },
        type->node);
  }

  TermPtr candidate(const TypePtr& type, bool rnd, const Scope& scope, int depth) {
    // Structural forms available for every type.
    int generic = pick(10);
    if (generic == 0) {
      TypePtr bt = random_type(1);
      Symbol x = fresh();
      TermPtr bound = gen(bt, rnd, scope, depth - 1);
      Scope inner = scope;
      inner.emplace_back(x, bt);
      return let_in(x, bound, gen(type, rnd, inner, depth - 1));
    }
    if (generic == 1) {
      TypePtr at = random_type(1);
      Symbol x = fresh();
      Scope inner = scope;
      inner.emplace_back(x, at);
      return app(lam(x, at, gen(type, rnd, inner, depth - 1)), gen(at, rnd, scope, depth - 1));
    }
    if (generic == 2) {
      Coeffect cc = pick(2) ? Coeffect::P : Coeffect::N;
      return make_term(If{gen(real_type(cc), rnd, scope, depth - 1), gen(type, rnd, scope, depth - 1),
                          gen(type, rnd, scope, depth - 1)});
    }
    if (generic == 3) {
      // Projection out of a generated tuple.
      std::vector<TypePtr> elems{type};
      int extra = pick(2) + 1;
      for (int i = 0; i < extra; ++i) elems.push_back(random_type(0));
      std::shuffle(elems.begin(), elems.end(), rng_);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (elems[i] == type) idx = i;
      }
      return proj(idx + 1, gen(tuple_type(elems), rnd, scope, depth - 1), elems.size());
    }
    if (generic == 4) {
      // Application of an in-scope function variable.
      std::vector<std::pair<Symbol, const ArrowType*>> fns;
      for (const auto& [x, t] : scope) {
        if (auto* a = std::get_if<ArrowType>(&t->node); a && subtype(a->res, type)) fns.emplace_back(x, a);
      }
      if (!fns.empty()) {
        auto [f, a] = fns[pick(static_cast<int>(fns.size()))];
        return app(var(f), gen(a->arg, rnd, scope, depth - 1));
      }
    }
    if (rnd && generic == 5) {
      TermPtr w = make_term(Weight{gen(real_type(Coeffect::N), rnd, scope, depth - 1)});
      return let_in(fresh(), w, gen(type, rnd, scope, depth - 1));
    }
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, RealType>) {
            return real_candidate(n.mod, rnd, scope, depth);
          } else if constexpr (std::is_same_v<T, TupleType>) {
            std::vector<TermPtr> elems;
            for (const auto& e : n.elems) elems.push_back(gen(e, rnd, scope, depth - 1));
            return tuple(std::move(elems));
          } else if constexpr (std::is_same_v<T, ArrowType>) {
            Symbol x = fresh();
            Scope inner = scope;
            inner.emplace_back(x, n.arg);
            return lam(x, n.arg, gen(n.res, n.eff == Effect::Rnd, inner, depth - 1));
          } else {
            if (!opt_.allow_infer) return nullptr;
            Symbol u = fresh();
            return make_term(Infer{lam(u, unit_type(), gen(n.support, true, scope, depth - 1))});
          }
        },
        type->node);
  }

  TermPtr real_candidate(Coeffect c, bool rnd, const Scope& scope, int depth) {
    auto sub = [&](Coeffect m) { return gen(real_type(m), rnd, scope, depth - 1); };
    int k = pick(rnd ? 16 : 11);
    switch (k) {
      case 0:
        return real(literal());
      case 1:
      case 2: {
        static const PrimOp ops[] = {PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Div};
        return prim(ops[pick(4)], {sub(c), sub(c)});
      }
      case 3:
        return prim(pick(2) ? PrimOp::Sin : PrimOp::Cos, {sub(c)});
      case 4: {
        PrimFn w{PrimOp::Wiener, std::make_shared<const WienerPath>(uniform(0.0, 1.0))};
        return make_term(PrimApp{w, {sub(Coeffect::N)}});
      }
      case 5: {
        // Scalar derivative of a generated analytic or PAP function.
        Coeffect d = pick(2) ? Coeffect::A : Coeffect::P;
        Symbol x = fresh();
        Scope inner = scope;
        inner.emplace_back(x, real_type(d));
        TermPtr f = lam(x, real_type(d), gen(real_type(d), false, inner, depth - 1));
        return app(make_term(Diff{d, f, sub(Coeffect::N)}), real(1.0));
      }
      case 6: {
        if (!opt_.allow_solve || in_solve_) return real(literal());
        Symbol x = fresh(), y = fresh(), p = fresh();
        in_solve_ = true;
        TermPtr coef = sub(Coeffect::N);
        in_solve_ = false;
        TypePtr arg = tuple_type({real_type(Coeffect::A), real_type(Coeffect::A)});
        // Bounded right-hand side: a*y + sin(b*x + c).
        TermPtr body = prim(PrimOp::Add, {prim(PrimOp::Mul, {real(uniform(-1.0, 1.0)), var(y)}),
                                          prim(PrimOp::Sin, {prim(PrimOp::Add, {prim(PrimOp::Mul, {coef, var(x)}), real(literal())})})});
        TermPtr rhs = lam(p, arg, let_in(x, proj(1, var(p), 2), let_in(y, proj(2, var(p), 2), body)));
        return make_term(Solve{rhs, real(literal()), real(std::round(uniform(0.0, 0.3) * 100.0) / 100.0)});
      }
      case 7:
        return make_term(If{sub(c < Coeffect::P ? Coeffect::P : c), sub(c), sub(c)});
      case 8: {
        // Vector derivative applied to a tangent.
        Symbol x = fresh();
        TypePtr at = tuple_type({real_type(Coeffect::A), real_type(Coeffect::A)});
        Scope inner = scope;
        inner.emplace_back(x, at);
        TermPtr body = gen(real_type(Coeffect::A), false, inner, depth - 1);
        TermPtr f = lam(x, at, body);
        TermPtr point = tuple({sub(Coeffect::N), sub(Coeffect::N)});
        return app(make_term(Diff{Coeffect::A, f, point}), tuple({real(literal()), real(literal())}));
      }
      case 9:
      case 10: {
        std::vector<Symbol> vars;
        for (const auto& [x, t] : scope) {
          if (auto* r = std::get_if<RealType>(&t->node); r && r->mod >= c) vars.push_back(x);
        }
        if (vars.empty()) return real(literal());
        return var(vars[pick(static_cast<int>(vars.size()))]);
      }
      case 11:
        return make_term(Assume{make_term(DistCon{PrimDist::Gaussian, {sub(Coeffect::N), real(uniform(0.1, 2.0))}})});
      case 12:
        return make_term(Assume{make_term(DistCon{PrimDist::Beta, {real(uniform(0.5, 3.0)), real(uniform(0.5, 3.0))}})});
      case 13:
        return app(make_term(Assume{make_term(DistCon{PrimDist::WienerProcess, {}})}), sub(Coeffect::N));
      case 14: {
        if (!opt_.allow_infer || pick(3) != 0) return make_term(Assume{make_term(DistCon{PrimDist::Gaussian, {real(0.0), real(1.0)}})});
        Symbol u = fresh();
        TermPtr model = lam(u, unit_type(), gen(real_type(Coeffect::N), true, {}, std::min(depth - 1, 2)));
        return make_term(Assume{make_term(Infer{model})});
      }
      default:
        return let_in(fresh(), make_term(Weight{sub(Coeffect::N)}), sub(c));
    }
  }

  std::mt19937_64 rng_;
  Options opt_;
  int counter_ = 0;
  bool in_solve_ = false;
};

// ---------------------------------------------------------------------------
// Smooth scalar expressions over named inputs, evaluable in double precision
// independently of the interpreter.

struct Expr {
  enum Kind { Lit, In, Add, Sub, Mul, Div, Sin, Cos } kind;
  double lit = 0.0;
  int input = 0;
  std::shared_ptr<const Expr> a, b;
};
using ExprPtr = std::shared_ptr<const Expr>;

inline double eval_expr(const ExprPtr& e, const std::vector<double>& x) {
  switch (e->kind) {
    case Expr::Lit: return e->lit;
    case Expr::In: return x[e->input];
    case Expr::Add: return eval_expr(e->a, x) + eval_expr(e->b, x);
    case Expr::Sub: return eval_expr(e->a, x) - eval_expr(e->b, x);
    case Expr::Mul: return eval_expr(e->a, x) * eval_expr(e->b, x);
    case Expr::Div: return eval_expr(e->a, x) / eval_expr(e->b, x);
    case Expr::Sin: return std::sin(eval_expr(e->a, x));
    case Expr::Cos: return std::cos(eval_expr(e->a, x));
  }
  return 0.0;
}

// Smallest |denominator| over the expression at x.
inline double min_denominator(const ExprPtr& e, const std::vector<double>& x) {
  double m = INFINITY;
  if (e->a) m = std::min(m, min_denominator(e->a, x));
  if (e->b) m = std::min(m, min_denominator(e->b, x));
  if (e->kind == Expr::Div) m = std::min(m, std::abs(eval_expr(e->b, x)));
  return m;
}

inline std::string expr_source(const ExprPtr& e, const std::vector<std::string>& names) {
  auto bin = [&](const char* op) { return "(" + expr_source(e->a, names) + " " + op + " " + expr_source(e->b, names) + ")"; };
  switch (e->kind) {
    case Expr::Lit: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->lit);
      return std::signbit(e->lit) ? "(" + std::string(buf) + ")" : std::string(buf);
    }
    case Expr::In: return names[e->input];
    case Expr::Add: return bin("+");
    case Expr::Sub: return bin("-");
    case Expr::Mul: return bin("*");
    case Expr::Div: return bin("/");
    case Expr::Sin: return "sin(" + expr_source(e->a, names) + ")";
    case Expr::Cos: return "cos(" + expr_source(e->a, names) + ")";
  }
  return "";
}

inline ExprPtr random_expr(std::mt19937_64& rng, int inputs, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 7 : 1);
  std::uniform_real_distribution<double> lit(-2.0, 2.0);
  int k = kind(rng);
  auto e = std::make_shared<Expr>();
  switch (k) {
    case 0:
      e->kind = Expr::Lit;
      e->lit = std::round(lit(rng) * 100.0) / 100.0;
      break;
    case 1:
      e->kind = Expr::In;
      e->input = std::uniform_int_distribution<int>(0, inputs - 1)(rng);
      break;
    case 6:
    case 7:
      e->kind = k == 6 ? Expr::Sin : Expr::Cos;
      e->a = random_expr(rng, inputs, depth - 1);
      break;
    default:
      e->kind = static_cast<Expr::Kind>(k);
      e->a = random_expr(rng, inputs, depth - 1);
      e->b = random_expr(rng, inputs, depth - 1);
  }
  return e;
}

struct GradientReport {
  int checked = 0;
  double worst = 0.0;  // largest |ad - fd| / max(1, |fd|)
  std::vector<std::string> failures;
};

// Compares diffA on random smooth compositions of one to three inputs with
// central differences (h = 1e-6) in a random coordinate direction. Points
// where some denominator gets within 1e-3 of zero are skipped.
inline GradientReport gradient_check(std::uint64_t seed, int target, double tol = 1e-5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  const std::vector<std::string> names = {"a", "b", "c"};
  const double h = 1e-6;
  GradientReport rep;
  for (int trial = 0; rep.checked < target && trial < 50 * target; ++trial) {
    int n = 1 + trial % 3;
    ExprPtr e = random_expr(rng, n, 4);
    std::vector<double> x(n);
    for (auto& xi : x) xi = coord(rng);
    int dir = static_cast<int>(rng() % n);
    std::vector<double> lo = x, hi = x;
    lo[dir] -= h, hi[dir] += h;
    if (std::abs(eval_expr(e, x)) > 1e6) continue;
    if (std::min({min_denominator(e, x), min_denominator(e, lo), min_denominator(e, hi)}) < 1e-3) continue;

    std::string params, types, point, tangent;
    for (int i = 0; i < n; ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "(%.17g)", x[i]);
      std::string sep = i ? ", " : "";
      params += sep + names[i];
      types += sep + "RealA";
      point += sep + buf;
      tangent += sep + (i == dir ? "1.0" : "0.0");
    }
    std::string src = "(diffA (lam (" + params + ") : (" + types + "). " + expr_source(e, names) + ") (" + point +
                      ")) (" + tangent + ")";
    double fd = (eval_expr(e, hi) - eval_expr(e, lo)) / (2 * h);
    double ad = num(run_det(src));
    double err = std::abs(ad - fd) / std::max(1.0, std::abs(fd));
    rep.worst = std::max(rep.worst, err);
    if (!(err <= tol)) rep.failures.push_back(src);
    ++rep.checked;
  }
  return rep;
}

}  // namespace dppl::test
