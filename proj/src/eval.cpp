#include "dppl/eval.hpp"

#include <cmath>
#include <limits>

#include "dppl/ad.hpp"
#include "dppl/dist.hpp"
#include "dppl/errors.hpp"
#include "dppl/infer.hpp"
#include "dppl/random.hpp"

namespace dppl {

// ---------------------------------------------------------------------------
// Seeds

SeedStream SeedStream::explicit_seq(std::vector<double> heads) {
  for (double p : heads) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("seed heads must lie in [0, 1]");
  }
  SeedStream s;
  s.explicit_ = true;
  s.heads_ = std::make_shared<const std::vector<double>>(std::move(heads));
  return s;
}

SeedStream SeedStream::generated(std::uint64_t master, std::uint64_t run) {
  SeedStream s;
  s.master_ = master;
  s.run_ = run;
  return s;
}

std::optional<double> SeedStream::draw() {
  if (explicit_) {
    if (pos_ >= heads_->size()) return std::nullopt;
    return (*heads_)[pos_++];
  }
  return to_unit(prf(master_, run_, pos_++));
}

std::size_t SeedStream::remaining() const {
  if (!explicit_) return std::numeric_limits<std::size_t>::max();
  return heads_->size() - pos_;
}

bool operator==(const SeedStream& a, const SeedStream& b) {
  if (a.explicit_ != b.explicit_ || a.pos_ != b.pos_) return false;
  if (a.explicit_) return a.heads_ == b.heads_ || *a.heads_ == *b.heads_;
  return a.master_ == b.master_ && a.run_ == b.run_;
}

bool operator==(const RunState& a, const RunState& b) {
  bool same_weight = a.log_weight == b.log_weight || (std::isnan(a.log_weight) && std::isnan(b.log_weight));
  return same_weight && a.seed == b.seed;
}

Runtime::Runtime() : infer_cache(std::make_shared<InferCache>()) {}

const char* to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Value: return "value";
    case EvalStatus::SeedExhausted: return "seed exhausted";
    case EvalStatus::SeedLeftover: return "unconsumed seed";
    case EvalStatus::OutOfFuel: return "out of fuel";
    case EvalStatus::Stuck: return "stuck";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// One reduction step. The redex is found by descending through evaluation
// contexts left to right; the enclosing term is rebuilt on the way out.

namespace {

class Stepper {
 public:
  Stepper(Runtime& rt, RunState* st) : rt_(rt), st_(st) {}

  TermPtr step(const TermPtr& t) {
    return std::visit([&](const auto& n) { return on(t, n); }, t->node);
  }

  std::string_view rule;
  std::string stuck;
  bool exhausted = false;

 private:
  TermPtr fail(std::string why) {
    stuck = std::move(why);
    return nullptr;
  }

  // Steps the first non-value in `ts`; returns nullptr if that fails or if
  // all are values (with `all_values` set).
  bool step_list(const std::vector<TermPtr>& ts, std::vector<TermPtr>& out, bool& failed) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts[i]->value) continue;
      TermPtr s = step(ts[i]);
      if (!s) {
        failed = true;
        return true;
      }
      out = ts;
      out[i] = std::move(s);
      return true;
    }
    return false;
  }

  TermPtr on(const TermPtr&, const Var& n) { return fail("free variable '" + std::string(n.name.name()) + "'"); }
  TermPtr on(const TermPtr&, const Abs&) { return fail("value"); }
  TermPtr on(const TermPtr&, const RealLit&) { return fail("value"); }

  TermPtr on(const TermPtr& t, const App& n) {
    if (!n.fn->value) {
      TermPtr f = step(n.fn);
      return f ? make_term(App{f, n.arg}, t->pos) : nullptr;
    }
    if (!n.arg->value) {
      TermPtr a = step(n.arg);
      return a ? make_term(App{n.fn, a}, t->pos) : nullptr;
    }
    auto* abs = n.fn->as<Abs>();
    if (!abs) return fail("application of a non-function");
    rule = "E-App";
    return subst(abs->body, abs->param, n.arg);
  }

  TermPtr on(const TermPtr& t, const PrimApp& n) {
    std::vector<TermPtr> args;
    bool failed = false;
    if (step_list(n.args, args, failed)) return failed ? nullptr : make_term(PrimApp{n.prim, std::move(args)}, t->pos);
    std::vector<Dual> rs;
    for (const auto& a : n.args) {
      auto* r = a->as<RealLit>();
      if (!r) return fail("primitive applied to a non-real");
      rs.push_back(r->value);
    }
    try {
      Dual out = lift_prim(n.prim, rs);
      rule = "E-PrimApp";
      return real(out, t->pos);
    } catch (const InternalError& e) {
      return fail(e.what());
    }
  }

  TermPtr on(const TermPtr& t, const TupleCon& n) {
    std::vector<TermPtr> elems;
    bool failed = false;
    if (step_list(n.elems, elems, failed)) return failed ? nullptr : make_term(TupleCon{std::move(elems)}, t->pos);
    return fail("value");
  }

  TermPtr on(const TermPtr& t, const Proj& n) {
    if (!n.tuple->value) {
      TermPtr u = step(n.tuple);
      return u ? make_term(Proj{n.arity, n.index, u}, t->pos) : nullptr;
    }
    if (auto* tu = n.tuple->as<TupleCon>()) {
      std::size_t size = tu->elems.size();
      if ((n.arity != 0 && n.arity != size) || n.index < 1 || n.index > size) return fail("projection out of range");
      rule = "E-Proj";
      return tu->elems[n.index - 1];
    }
    if (n.index == 1 && n.arity <= 1) {
      rule = "E-Proj";
      return n.tuple;
    }
    return fail("projection from a non-tuple");
  }

  TermPtr on(const TermPtr& t, const If& n) {
    if (!n.cond->value) {
      TermPtr c = step(n.cond);
      return c ? make_term(If{c, n.then_branch, n.else_branch}, t->pos) : nullptr;
    }
    auto* r = n.cond->as<RealLit>();
    if (!r) return fail("comparand is not a real");
    if (r->value.value() > 0.0) {
      rule = "E-IfTrue";
      return n.then_branch;
    }
    rule = "E-IfFalse";
    return n.else_branch;
  }

  TermPtr on(const TermPtr& t, const DistCon& n) {
    std::vector<TermPtr> ps;
    bool failed = false;
    if (step_list(n.params, ps, failed)) return failed ? nullptr : make_term(DistCon{n.dist, std::move(ps)}, t->pos);
    return fail("value");
  }

  TermPtr on(const TermPtr& t, const Assume& n) {
    if (!n.dist->value) {
      TermPtr d = step(n.dist);
      return d ? make_term(Assume{d}, t->pos) : nullptr;
    }
    if (!st_) return fail("assume in a deterministic context");
    if (!n.dist->is<DistCon>() && !n.dist->is<Infer>()) return fail("assume from a non-distribution");
    std::optional<double> p = st_->seed.draw();
    if (!p) {
      exhausted = true;
      return fail("seed exhausted");
    }
    if (auto* d = n.dist->as<DistCon>()) {
      if (d->dist == PrimDist::WienerProcess) {
        static const Symbol x("x%w");
        rule = "E-AssumeWiener";
        auto path = std::make_shared<const WienerPath>(*p);
        TermPtr body = make_term(PrimApp{PrimFn{PrimOp::Wiener, std::move(path)}, {var(x)}});
        return lam(x, real_type(Coeffect::N), body, t->pos);
      }
      DistParams params{d->dist, {}};
      for (const auto& q : d->params) {
        auto* r = q->as<RealLit>();
        if (!r) return fail("distribution parameter is not a real");
        params.params.push_back(r->value.value());
      }
      rule = "E-AssumeDist";
      return real(quantile(params, *p), t->pos);
    }
    const auto& model = n.dist->as<Infer>()->model;
    auto dist = rt_.infer_cache->get(model, rt_, false);
    rule = "E-AssumeInfer";
    return dist->quantile(*p);
  }

  TermPtr on(const TermPtr& t, const Weight& n) {
    if (!n.arg->value) {
      TermPtr a = step(n.arg);
      return a ? make_term(Weight{a}, t->pos) : nullptr;
    }
    if (!st_) return fail("weight in a deterministic context");
    auto* r = n.arg->as<RealLit>();
    if (!r) return fail("weight of a non-real");
    double w = r->value.value();
    st_->log_weight += w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    rule = "E-Weight";
    return unit();
  }

  TermPtr on(const TermPtr& t, const Infer& n) {
    if (n.model->value) return fail("value");
    TermPtr m = step(n.model);
    return m ? make_term(Infer{m}, t->pos) : nullptr;
  }

  TermPtr on(const TermPtr& t, const Diff& n) {
    if (!n.fn->value) {
      TermPtr f = step(n.fn);
      return f ? make_term(Diff{n.mode, f, n.point}, t->pos) : nullptr;
    }
    if (!n.point->value) {
      TermPtr p = step(n.point);
      return p ? make_term(Diff{n.mode, n.fn, p}, t->pos) : nullptr;
    }
    if (!flatten_reals(n.point)) return fail("differentiation point is not real-valued");
    rule = "E-Diff";
    return diff_impl(n.fn, n.point, n.mode);
  }

  TermPtr on(const TermPtr& t, const Solve& n) {
    std::vector<TermPtr> parts{n.rhs, n.init, n.end};
    std::vector<TermPtr> next;
    bool failed = false;
    if (step_list(parts, next, failed)) {
      return failed ? nullptr : make_term(Solve{next[0], next[1], next[2]}, t->pos);
    }
    try {
      TermPtr out = solve_impl({n.rhs, n.init, n.end}, rt_.ode, rt_);
      rule = "E-Solve";
      return out;
    } catch (const InternalError& e) {
      return fail(e.what());
    }
  }

  TermPtr on(const TermPtr& t, const Jvp& n) {
    std::vector<TermPtr> parts{n.fn, n.point, n.tangent};
    std::vector<TermPtr> next;
    bool failed = false;
    if (step_list(parts, next, failed)) {
      return failed ? nullptr : make_term(Jvp{next[0], next[1], next[2]}, t->pos);
    }
    try {
      TermPtr out = apply_jvp(n.fn, n.point, n.tangent, rt_);
      rule = "E-Jvp";
      return out;
    } catch (const InternalError& e) {
      return fail(e.what());
    }
  }

  Runtime& rt_;
  RunState* st_;
};

}  // namespace

StepResult step_det(const TermPtr& t, Runtime& rt) {
  if (t->value) return IsValue{t};
  Stepper s(rt, nullptr);
  TermPtr next = s.step(t);
  if (!next) return Stuck{s.stuck};
  return Stepped{next, s.rule};
}

std::pair<StepResult, RunState> step_rnd(const TermPtr& t, RunState st, Runtime& rt) {
  if (t->value) return {IsValue{t}, st};
  RunState before = st;
  Stepper s(rt, &st);
  TermPtr next = s.step(t);
  if (next) return {Stepped{next, s.rule}, st};
  if (s.exhausted) return {SeedExhausted{}, before};
  return {Stuck{s.stuck}, before};
}

EvalResult eval(const TermPtr& t, RunState st, Runtime& rt, std::optional<std::size_t> fuel) {
  EvalResult r;
  TermPtr cur = t;
  for (;;) {
    if (cur->value) {
      if (st.seed.is_explicit() && st.seed.remaining() > 0) {
        r.status = EvalStatus::SeedLeftover;
        r.value = unit();
      } else {
        r.status = EvalStatus::Value;
        r.value = cur;
      }
      break;
    }
    if (fuel && r.steps >= *fuel) {
      r.status = EvalStatus::OutOfFuel;
      r.value = unit();
      r.diagnostic = "step budget exhausted";
      break;
    }
    Stepper s(rt, &st);
    TermPtr next = s.step(cur);
    if (!next) {
      r.status = s.exhausted ? EvalStatus::SeedExhausted : EvalStatus::Stuck;
      r.value = unit();
      r.diagnostic = s.stuck;
      break;
    }
    ++r.steps;
    if (rt.trace) rt.trace(s.rule, next);
    cur = std::move(next);
  }
  r.state = std::move(st);
  return r;
}

TermPtr eval_det(const TermPtr& t, Runtime& rt) {
  TermPtr cur = t;
  while (!cur->value) {
    StepResult r = step_det(cur, rt);
    if (auto* s = std::get_if<Stuck>(&r)) throw RuntimeAbort("evaluation stuck: " + s->diagnostic);
    cur = std::get<Stepped>(r).term;
  }
  return cur;
}

}  // namespace dppl
