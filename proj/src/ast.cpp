#include "dppl/ast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dppl/dist.hpp"
#include "dppl/random.hpp"

namespace dppl {

const char* to_string(Coeffect c) {
  switch (c) {
    case Coeffect::A: return "A";
    case Coeffect::P: return "P";
    case Coeffect::N: return "N";
  }
  return "?";
}

const char* to_string(Effect e) { return e == Effect::Det ? "det" : "rnd"; }

// ---------------------------------------------------------------------------
// Types

TypePtr real_type(Coeffect c) {
  static const TypePtr cache[3] = {
      std::make_shared<const TypeExpr>(TypeExpr{RealType{Coeffect::A}}),
      std::make_shared<const TypeExpr>(TypeExpr{RealType{Coeffect::P}}),
      std::make_shared<const TypeExpr>(TypeExpr{RealType{Coeffect::N}}),
  };
  return cache[static_cast<int>(c)];
}

TypePtr arrow_type(TypePtr arg, Effect eff, TypePtr res) {
  return std::make_shared<const TypeExpr>(TypeExpr{ArrowType{std::move(arg), eff, std::move(res)}});
}

TypePtr tuple_type(std::vector<TypePtr> elems) {
  if (elems.size() == 1) return elems.front();
  if (elems.empty()) return unit_type();
  return std::make_shared<const TypeExpr>(TypeExpr{TupleType{std::move(elems)}});
}

TypePtr unit_type() {
  static const TypePtr u = std::make_shared<const TypeExpr>(TypeExpr{TupleType{}});
  return u;
}

TypePtr dist_type(TypePtr support) {
  return std::make_shared<const TypeExpr>(TypeExpr{DistType{std::move(support)}});
}

TypePtr real_vector_type(Coeffect c, std::size_t n) {
  return tuple_type(std::vector<TypePtr>(n, real_type(c)));
}

bool operator==(const TypeExpr& a, const TypeExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* r = std::get_if<RealType>(&a.node)) return r->mod == std::get<RealType>(b.node).mod;
  if (auto* f = std::get_if<ArrowType>(&a.node)) {
    auto& g = std::get<ArrowType>(b.node);
    return f->eff == g.eff && *f->arg == *g.arg && *f->res == *g.res;
  }
  if (auto* t = std::get_if<TupleType>(&a.node)) {
    auto& u = std::get<TupleType>(b.node);
    return std::equal(t->elems.begin(), t->elems.end(), u.elems.begin(), u.elems.end(),
                      [](const TypePtr& x, const TypePtr& y) { return *x == *y; });
  }
  return *std::get<DistType>(a.node).support == *std::get<DistType>(b.node).support;
}

bool type_equal(const TypePtr& a, const TypePtr& b) { return *a == *b; }

std::string to_string(const TypeExpr& t) {
  if (auto* r = std::get_if<RealType>(&t.node)) return std::string("Real") + to_string(r->mod);
  if (auto* f = std::get_if<ArrowType>(&t.node)) {
    std::string arg = to_string(*f->arg);
    if (std::holds_alternative<ArrowType>(f->arg->node)) arg = "(" + arg + ")";
    return arg + " ->" + to_string(f->eff) + " " + to_string(*f->res);
  }
  if (auto* tu = std::get_if<TupleType>(&t.node)) {
    std::string s = "(";
    for (std::size_t i = 0; i < tu->elems.size(); ++i) {
      if (i) s += ", ";
      s += to_string(*tu->elems[i]);
    }
    return s + ")";
  }
  const auto& d = std::get<DistType>(t.node);
  std::string s = to_string(*d.support);
  if (std::holds_alternative<ArrowType>(d.support->node)) s = "(" + s + ")";
  return "Dist " + s;
}

bool coeff_le_type(Coeffect c, const TypeExpr& t) {
  if (auto* r = std::get_if<RealType>(&t.node)) return c <= r->mod;
  if (auto* tu = std::get_if<TupleType>(&t.node)) {
    return std::all_of(tu->elems.begin(), tu->elems.end(),
                       [c](const TypePtr& e) { return coeff_le_type(c, *e); });
  }
  return true;
}

TypePtr promote_type(Coeffect c, const TypePtr& t) {
  if (c == Coeffect::A) return t;
  if (auto* r = std::get_if<RealType>(&t->node)) return real_type(coeff_mul(c, r->mod));
  if (auto* tu = std::get_if<TupleType>(&t->node)) {
    std::vector<TypePtr> elems;
    elems.reserve(tu->elems.size());
    for (const auto& e : tu->elems) elems.push_back(promote_type(c, e));
    return tuple_type(std::move(elems));
  }
  return t;
}

std::optional<std::vector<Coeffect>> real_leaves(const TypeExpr& t) {
  if (auto* r = std::get_if<RealType>(&t.node)) return std::vector<Coeffect>{r->mod};
  if (auto* tu = std::get_if<TupleType>(&t.node)) {
    std::vector<Coeffect> out;
    for (const auto& e : tu->elems) {
      auto sub = real_leaves(*e);
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Primitives

std::size_t arity(PrimOp op) {
  switch (op) {
    case PrimOp::Sin:
    case PrimOp::Cos:
    case PrimOp::Wiener: return 1;
    case PrimOp::PdfGaussian:
    case PrimOp::PdfBeta: return 3;
    default: return 2;
  }
}

std::size_t arity(PrimDist d) { return d == PrimDist::WienerProcess ? 0 : 2; }

const char* to_string(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
    case PrimOp::Sin: return "sin";
    case PrimOp::Cos: return "cos";
    case PrimOp::PdfGaussian: return "pdfGaussian";
    case PrimOp::PdfBeta: return "pdfBeta";
    case PrimOp::Wiener: return "wiener";
  }
  return "?";
}

const char* to_string(PrimDist d) {
  switch (d) {
    case PrimDist::Gaussian: return "Gaussian";
    case PrimDist::Beta: return "Beta";
    case PrimDist::WienerProcess: return "Wiener";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Term construction

namespace {

bool all_values(const std::vector<TermPtr>& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const TermPtr& t) { return t->value; });
}

std::uint64_t name_bit(Symbol s) { return std::uint64_t{1} << (s.id() % 64); }

std::uint64_t names_of(const std::vector<TermPtr>& ts) {
  std::uint64_t m = 0;
  for (const auto& t : ts) m |= t->names;
  return m;
}

}  // namespace

TermPtr make_term(TermNode node, SourcePos pos) {
  auto t = std::make_shared<Term>();
  t->pos = pos;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          t->names = name_bit(n.name);
        } else if constexpr (std::is_same_v<T, Abs>) {
          t->value = true;
          t->names = n.body->names;
        } else if constexpr (std::is_same_v<T, App>) {
          t->names = n.fn->names | n.arg->names;
        } else if constexpr (std::is_same_v<T, PrimApp>) {
          t->names = names_of(n.args);
        } else if constexpr (std::is_same_v<T, RealLit>) {
          t->value = true;
        } else if constexpr (std::is_same_v<T, TupleCon>) {
          t->value = all_values(n.elems);
          t->names = names_of(n.elems);
        } else if constexpr (std::is_same_v<T, Proj>) {
          t->names = n.tuple->names;
        } else if constexpr (std::is_same_v<T, If>) {
          t->names = n.cond->names | n.then_branch->names | n.else_branch->names;
        } else if constexpr (std::is_same_v<T, DistCon>) {
          t->value = all_values(n.params);
          t->names = names_of(n.params);
        } else if constexpr (std::is_same_v<T, Assume>) {
          t->names = n.dist->names;
        } else if constexpr (std::is_same_v<T, Weight>) {
          t->names = n.arg->names;
        } else if constexpr (std::is_same_v<T, Infer>) {
          t->value = n.model->value;
          t->names = n.model->names;
        } else if constexpr (std::is_same_v<T, Diff>) {
          t->names = n.fn->names | n.point->names;
        } else if constexpr (std::is_same_v<T, Solve>) {
          t->names = n.rhs->names | n.init->names | n.end->names;
        } else if constexpr (std::is_same_v<T, Jvp>) {
          t->names = n.fn->names | n.point->names | n.tangent->names;
        }
      },
      node);
  t->node = std::move(node);
  return t;
}

TermPtr var(Symbol name, SourcePos pos) { return make_term(Var{name}, pos); }
TermPtr lam(Symbol param, TypePtr annot, TermPtr body, SourcePos pos) {
  return make_term(Abs{param, std::move(annot), std::move(body)}, pos);
}
TermPtr app(TermPtr fn, TermPtr arg, SourcePos pos) {
  return make_term(App{std::move(fn), std::move(arg)}, pos);
}
TermPtr real(Dual r, SourcePos pos) { return make_term(RealLit{std::move(r)}, pos); }
TermPtr tuple(std::vector<TermPtr> elems, SourcePos pos) {
  if (elems.size() == 1) return elems.front();
  return make_term(TupleCon{std::move(elems)}, pos);
}
TermPtr unit() {
  static const TermPtr u = make_term(TupleCon{});
  return u;
}
TermPtr proj(std::size_t index, TermPtr t, std::size_t arity, SourcePos pos) {
  return make_term(Proj{arity, index, std::move(t)}, pos);
}
TermPtr prim(PrimOp op, std::vector<TermPtr> args, SourcePos pos) {
  return make_term(PrimApp{PrimFn{op, nullptr}, std::move(args)}, pos);
}
TermPtr let_in(Symbol x, TermPtr bound, TermPtr body, TypePtr annot, SourcePos pos) {
  return app(lam(x, std::move(annot), std::move(body), pos), std::move(bound), pos);
}

// ---------------------------------------------------------------------------
// Free variables and substitution

namespace {

bool closed_under(const TermPtr& t, std::vector<Symbol>& bound);

bool all_closed(const std::vector<TermPtr>& ts, std::vector<Symbol>& bound) {
  return std::all_of(ts.begin(), ts.end(), [&](const TermPtr& t) { return closed_under(t, bound); });
}

bool closed_under(const TermPtr& t, std::vector<Symbol>& bound) {
  if (t->names == 0) return true;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return std::find(bound.begin(), bound.end(), n.name) != bound.end();
        } else if constexpr (std::is_same_v<T, Abs>) {
          bound.push_back(n.param);
          bool ok = closed_under(n.body, bound);
          bound.pop_back();
          return ok;
        } else if constexpr (std::is_same_v<T, App>) {
          return closed_under(n.fn, bound) && closed_under(n.arg, bound);
        } else if constexpr (std::is_same_v<T, PrimApp>) {
          return all_closed(n.args, bound);
        } else if constexpr (std::is_same_v<T, RealLit>) {
          return true;
        } else if constexpr (std::is_same_v<T, TupleCon>) {
          return all_closed(n.elems, bound);
        } else if constexpr (std::is_same_v<T, Proj>) {
          return closed_under(n.tuple, bound);
        } else if constexpr (std::is_same_v<T, If>) {
          return closed_under(n.cond, bound) && closed_under(n.then_branch, bound) &&
                 closed_under(n.else_branch, bound);
        } else if constexpr (std::is_same_v<T, DistCon>) {
          return all_closed(n.params, bound);
        } else if constexpr (std::is_same_v<T, Assume>) {
          return closed_under(n.dist, bound);
        } else if constexpr (std::is_same_v<T, Weight>) {
          return closed_under(n.arg, bound);
        } else if constexpr (std::is_same_v<T, Infer>) {
          return closed_under(n.model, bound);
        } else if constexpr (std::is_same_v<T, Diff>) {
          return closed_under(n.fn, bound) && closed_under(n.point, bound);
        } else if constexpr (std::is_same_v<T, Solve>) {
          return closed_under(n.rhs, bound) && closed_under(n.init, bound) && closed_under(n.end, bound);
        } else {
          return closed_under(n.fn, bound) && closed_under(n.point, bound) &&
                 closed_under(n.tangent, bound);
        }
      },
      t->node);
}

struct Substituter {
  Symbol x;
  const TermPtr& v;
  std::uint64_t bit;

  TermPtr go(const TermPtr& t) const {
    if (!(t->names & bit)) return t;
    return std::visit([&](const auto& n) { return on(t, n); }, t->node);
  }

  bool many(const std::vector<TermPtr>& in, std::vector<TermPtr>& out) const {
    bool changed = false;
    out.reserve(in.size());
    for (const auto& e : in) {
      out.push_back(go(e));
      changed |= out.back() != e;
    }
    return changed;
  }

  TermPtr on(const TermPtr& t, const Var& n) const { return n.name == x ? v : t; }
  TermPtr on(const TermPtr& t, const Abs& n) const {
    if (n.param == x) return t;
    TermPtr b = go(n.body);
    return b == n.body ? t : make_term(Abs{n.param, n.annot, b}, t->pos);
  }
  TermPtr on(const TermPtr& t, const App& n) const {
    TermPtr f = go(n.fn), a = go(n.arg);
    return f == n.fn && a == n.arg ? t : make_term(App{f, a}, t->pos);
  }
  TermPtr on(const TermPtr& t, const PrimApp& n) const {
    std::vector<TermPtr> args;
    return many(n.args, args) ? make_term(PrimApp{n.prim, std::move(args)}, t->pos) : t;
  }
  TermPtr on(const TermPtr& t, const RealLit&) const { return t; }
  TermPtr on(const TermPtr& t, const TupleCon& n) const {
    std::vector<TermPtr> elems;
    return many(n.elems, elems) ? make_term(TupleCon{std::move(elems)}, t->pos) : t;
  }
  TermPtr on(const TermPtr& t, const Proj& n) const {
    TermPtr u = go(n.tuple);
    return u == n.tuple ? t : make_term(Proj{n.arity, n.index, u}, t->pos);
  }
  TermPtr on(const TermPtr& t, const If& n) const {
    TermPtr c = go(n.cond), a = go(n.then_branch), b = go(n.else_branch);
    if (c == n.cond && a == n.then_branch && b == n.else_branch) return t;
    return make_term(If{c, a, b}, t->pos);
  }
  TermPtr on(const TermPtr& t, const DistCon& n) const {
    std::vector<TermPtr> ps;
    return many(n.params, ps) ? make_term(DistCon{n.dist, std::move(ps)}, t->pos) : t;
  }
  TermPtr on(const TermPtr& t, const Assume& n) const {
    TermPtr d = go(n.dist);
    return d == n.dist ? t : make_term(Assume{d}, t->pos);
  }
  TermPtr on(const TermPtr& t, const Weight& n) const {
    TermPtr a = go(n.arg);
    return a == n.arg ? t : make_term(Weight{a}, t->pos);
  }
  TermPtr on(const TermPtr& t, const Infer& n) const {
    TermPtr m = go(n.model);
    return m == n.model ? t : make_term(Infer{m}, t->pos);
  }
  TermPtr on(const TermPtr& t, const Diff& n) const {
    TermPtr f = go(n.fn), p = go(n.point);
    return f == n.fn && p == n.point ? t : make_term(Diff{n.mode, f, p}, t->pos);
  }
  TermPtr on(const TermPtr& t, const Solve& n) const {
    TermPtr f = go(n.rhs), y = go(n.init), e = go(n.end);
    return f == n.rhs && y == n.init && e == n.end ? t : make_term(Solve{f, y, e}, t->pos);
  }
  TermPtr on(const TermPtr& t, const Jvp& n) const {
    TermPtr f = go(n.fn), p = go(n.point), u = go(n.tangent);
    return f == n.fn && p == n.point && u == n.tangent ? t : make_term(Jvp{f, p, u}, t->pos);
  }
};

}  // namespace

bool is_closed(const TermPtr& t) {
  std::vector<Symbol> bound;
  return closed_under(t, bound);
}

TermPtr subst(const TermPtr& t, Symbol x, const TermPtr& v) {
  return Substituter{x, v, name_bit(x)}.go(t);
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

bool same_type(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool same_list(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), term_equal);
}

}  // namespace

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        const T& m = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Var>) {
          return n.name == m.name;
        } else if constexpr (std::is_same_v<T, Abs>) {
          return n.param == m.param && same_type(n.annot, m.annot) && term_equal(n.body, m.body);
        } else if constexpr (std::is_same_v<T, App>) {
          return term_equal(n.fn, m.fn) && term_equal(n.arg, m.arg);
        } else if constexpr (std::is_same_v<T, PrimApp>) {
          bool same_path = n.prim.path == m.prim.path ||
                           (n.prim.path && m.prim.path && n.prim.path->key() == m.prim.path->key());
          return n.prim.op == m.prim.op && same_path && same_list(n.args, m.args);
        } else if constexpr (std::is_same_v<T, RealLit>) {
          return n.value.same_as(m.value);
        } else if constexpr (std::is_same_v<T, TupleCon>) {
          return same_list(n.elems, m.elems);
        } else if constexpr (std::is_same_v<T, Proj>) {
          return n.arity == m.arity && n.index == m.index && term_equal(n.tuple, m.tuple);
        } else if constexpr (std::is_same_v<T, If>) {
          return term_equal(n.cond, m.cond) && term_equal(n.then_branch, m.then_branch) &&
                 term_equal(n.else_branch, m.else_branch);
        } else if constexpr (std::is_same_v<T, DistCon>) {
          return n.dist == m.dist && same_list(n.params, m.params);
        } else if constexpr (std::is_same_v<T, Assume>) {
          return term_equal(n.dist, m.dist);
        } else if constexpr (std::is_same_v<T, Weight>) {
          return term_equal(n.arg, m.arg);
        } else if constexpr (std::is_same_v<T, Infer>) {
          return term_equal(n.model, m.model);
        } else if constexpr (std::is_same_v<T, Diff>) {
          return n.mode == m.mode && term_equal(n.fn, m.fn) && term_equal(n.point, m.point);
        } else if constexpr (std::is_same_v<T, Solve>) {
          return term_equal(n.rhs, m.rhs) && term_equal(n.init, m.init) && term_equal(n.end, m.end);
        } else {
          return term_equal(n.fn, m.fn) && term_equal(n.point, m.point) &&
                 term_equal(n.tangent, m.tangent);
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// Pretty printing

namespace {

std::string number(double r) {
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return r > 0 ? "inf" : "(-inf)";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::fabs(r));
  std::string s = buf;
  return std::signbit(r) ? "(-" + s + ")" : s;
}

struct Printer {
  std::string out;

  void list(const std::vector<TermPtr>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ", ";
      print(ts[i]);
    }
  }

  void print(const TermPtr& t) {
    std::visit([&](const auto& n) { on(n); }, t->node);
  }

  static bool synthesized(Symbol s) { return s.name().find('%') != std::string_view::npos; }

  // Reassembles the let chain that tuple-pattern sugar expands into, so the
  // projection arities survive a reparse. Advances `body` past the chain.
  std::optional<std::string> pattern(Symbol q, TermPtr& body) {
    std::vector<Symbol> names;
    std::size_t k = 0;
    TermPtr cur = body;
    for (std::size_t i = 1; k == 0 || i <= k; ++i) {
      auto* a = cur->as<App>();
      auto* abs = a ? a->fn->as<Abs>() : nullptr;
      auto* pr = abs && !abs->annot ? a->arg->as<Proj>() : nullptr;
      auto* v = pr ? pr->tuple->as<Var>() : nullptr;
      if (!v || !(v->name == q) || pr->index != i || pr->arity < 2 || (k != 0 && pr->arity != k)) return std::nullopt;
      k = pr->arity;
      names.push_back(abs->param);
      cur = abs->body;
    }
    std::string s = "(";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) s += ", ";
      if (synthesized(names[i])) {
        auto sub = pattern(names[i], cur);
        if (!sub) return std::nullopt;
        s += *sub;
      } else {
        s += names[i].name();
      }
    }
    body = cur;
    return s + ")";
  }

  void on(const Var& n) { out += n.name.name(); }
  void on(const Abs& n) {
    TermPtr body = n.body;
    if (synthesized(n.param) && n.annot) {
      if (auto pat = pattern(n.param, body)) {
        out += "(lam " + *pat + " : " + to_string(*n.annot) + ". ";
        print(body);
        out += ")";
        return;
      }
    }
    out += "(lam ";
    out += n.param.name();
    out += " : ";
    out += n.annot ? to_string(*n.annot) : "?";
    out += ". ";
    print(n.body);
    out += ")";
  }
  void on(const App& n) {
    if (auto* abs = n.fn->as<Abs>(); abs && !abs->annot) {
      TermPtr body = abs->body;
      if (synthesized(abs->param)) {
        if (auto pat = pattern(abs->param, body)) {
          out += "(let " + *pat + " = ";
          print(n.arg);
          out += " in ";
          print(body);
          out += ")";
          return;
        }
      }
      out += "(let ";
      out += abs->param.name();
      out += " = ";
      print(n.arg);
      out += " in ";
      print(abs->body);
      out += ")";
      return;
    }
    out += "(";
    print(n.fn);
    out += " ";
    print(n.arg);
    out += ")";
  }
  void on(const PrimApp& n) {
    switch (n.prim.op) {
      case PrimOp::Add:
      case PrimOp::Sub:
      case PrimOp::Mul:
      case PrimOp::Div:
        out += "(";
        print(n.args[0]);
        out += " ";
        out += to_string(n.prim.op);
        out += " ";
        print(n.args[1]);
        out += ")";
        return;
      case PrimOp::Wiener:
        out += "wiener(";
        out += number(n.prim.path ? n.prim.path->handle() : 0.0);
        out += ", ";
        list(n.args);
        out += ")";
        return;
      default:
        out += to_string(n.prim.op);
        out += "(";
        list(n.args);
        out += ")";
    }
  }
  void on(const RealLit& n) { out += number(n.value.value()); }
  void on(const TupleCon& n) {
    out += "(";
    list(n.elems);
    out += ")";
  }
  void on(const Proj& n) {
    bool atomic = n.tuple->is<Var>();
    if (!atomic) out += "(";
    print(n.tuple);
    if (!atomic) out += ")";
    out += "." + std::to_string(n.index);
  }
  void on(const If& n) {
    out += "(if ";
    print(n.cond);
    out += " then ";
    print(n.then_branch);
    out += " else ";
    print(n.else_branch);
    out += ")";
  }
  void on(const DistCon& n) {
    out += to_string(n.dist);
    out += "(";
    list(n.params);
    out += ")";
  }
  void keyword(const char* kw, std::initializer_list<const TermPtr*> args) {
    out += "(";
    out += kw;
    for (const TermPtr* a : args) {
      out += " ";
      print(*a);
    }
    out += ")";
  }
  void on(const Assume& n) { keyword("assume", {&n.dist}); }
  void on(const Weight& n) { keyword("weight", {&n.arg}); }
  void on(const Infer& n) { keyword("infer", {&n.model}); }
  void on(const Diff& n) { keyword(n.mode == Coeffect::A ? "diffA" : "diffP", {&n.fn, &n.point}); }
  void on(const Solve& n) { keyword("solve", {&n.rhs, &n.init, &n.end}); }
  void on(const Jvp& n) {
    out += "jvp(";
    print(n.fn);
    out += ", ";
    print(n.point);
    out += ", ";
    print(n.tangent);
    out += ")";
  }
};

}  // namespace

std::string pretty(const TermPtr& t) {
  Printer p;
  p.print(t);
  return std::move(p.out);
}

// ---------------------------------------------------------------------------
// Value order
//
// Skeleton token order: constructor tags follow the order of TermNode
// (Var=1 ... Jvp=15); bound variables become de Bruijn indices, real
// literals become holes collected separately.

namespace {

struct Skeleton {
  std::vector<std::int64_t> tokens;
  std::vector<double> holes;
  std::vector<Symbol> binders;

  void type(const TypePtr& t) {
    if (!t) {
      tokens.push_back(140);
      return;
    }
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, RealType>) {
            tokens.push_back(100 + static_cast<int>(n.mod));
          } else if constexpr (std::is_same_v<T, ArrowType>) {
            tokens.push_back(110 + static_cast<int>(n.eff));
            type(n.arg);
            type(n.res);
          } else if constexpr (std::is_same_v<T, TupleType>) {
            tokens.push_back(120);
            tokens.push_back(static_cast<std::int64_t>(n.elems.size()));
            for (const auto& e : n.elems) type(e);
          } else {
            tokens.push_back(130);
            type(n.support);
          }
        },
        t->node);
  }

  void all(const std::vector<TermPtr>& ts) {
    tokens.push_back(static_cast<std::int64_t>(ts.size()));
    for (const auto& t : ts) walk(t);
  }

  void walk(const TermPtr& t) {
    tokens.push_back(static_cast<std::int64_t>(t->node.index()) + 1);
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Var>) {
            auto it = std::find(binders.rbegin(), binders.rend(), n.name);
            tokens.push_back(it == binders.rend() ? -1 - static_cast<std::int64_t>(n.name.id())
                                                  : it - binders.rbegin());
          } else if constexpr (std::is_same_v<T, Abs>) {
            type(n.annot);
            binders.push_back(n.param);
            walk(n.body);
            binders.pop_back();
          } else if constexpr (std::is_same_v<T, App>) {
            walk(n.fn);
            walk(n.arg);
          } else if constexpr (std::is_same_v<T, PrimApp>) {
            tokens.push_back(static_cast<std::int64_t>(n.prim.op));
            if (n.prim.path) tokens.push_back(static_cast<std::int64_t>(n.prim.path->key()));
            all(n.args);
          } else if constexpr (std::is_same_v<T, RealLit>) {
            holes.push_back(n.value.value());
          } else if constexpr (std::is_same_v<T, TupleCon>) {
            all(n.elems);
          } else if constexpr (std::is_same_v<T, Proj>) {
            tokens.push_back(static_cast<std::int64_t>(n.arity));
            tokens.push_back(static_cast<std::int64_t>(n.index));
            walk(n.tuple);
          } else if constexpr (std::is_same_v<T, If>) {
            walk(n.cond);
            walk(n.then_branch);
            walk(n.else_branch);
          } else if constexpr (std::is_same_v<T, DistCon>) {
            tokens.push_back(static_cast<std::int64_t>(n.dist));
            all(n.params);
          } else if constexpr (std::is_same_v<T, Assume>) {
            walk(n.dist);
          } else if constexpr (std::is_same_v<T, Weight>) {
            walk(n.arg);
          } else if constexpr (std::is_same_v<T, Infer>) {
            walk(n.model);
          } else if constexpr (std::is_same_v<T, Diff>) {
            tokens.push_back(static_cast<std::int64_t>(n.mode));
            walk(n.fn);
            walk(n.point);
          } else if constexpr (std::is_same_v<T, Solve>) {
            walk(n.rhs);
            walk(n.init);
            walk(n.end);
          } else {
            walk(n.fn);
            walk(n.point);
            walk(n.tangent);
          }
        },
        t->node);
  }
};

Skeleton skeleton(const TermPtr& t) {
  Skeleton s;
  s.walk(t);
  return s;
}

// IEEE-754 totalOrder.
std::strong_ordering total_order(double a, double b) {
  auto key = [](double d) {
    auto u = std::bit_cast<std::int64_t>(d);
    return u < 0 ? std::numeric_limits<std::int64_t>::min() - u - 1 : u;
  };
  return key(a) <=> key(b);
}

std::strong_ordering holes_order(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (auto c = total_order(a[i], b[i]); c != 0) return c;
  }
  return a.size() <=> b.size();
}

}  // namespace

std::strong_ordering value_order(const TermPtr& a, const TermPtr& b) {
  if (a->node.index() != b->node.index()) return a->node.index() <=> b->node.index();
  if (auto* x = a->as<RealLit>()) return total_order(x->value.value(), b->as<RealLit>()->value.value());
  if (auto* x = a->as<TupleCon>()) {
    const auto& y = b->as<TupleCon>()->elems;
    for (std::size_t i = 0; i < std::min(x->elems.size(), y.size()); ++i) {
      if (auto c = value_order(x->elems[i], y[i]); c != 0) return c;
    }
    return x->elems.size() <=> y.size();
  }
  Skeleton sa = skeleton(a), sb = skeleton(b);
  if (auto c = sa.tokens <=> sb.tokens; c != 0) return c;
  return holes_order(sa.holes, sb.holes);
}

std::uint64_t value_hash(const TermPtr& v) {
  Skeleton s = skeleton(v);
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (auto tok : s.tokens) h = mix64(h ^ static_cast<std::uint64_t>(tok));
  for (double r : s.holes) h = mix64(h ^ std::bit_cast<std::uint64_t>(r));
  return h;
}

// ---------------------------------------------------------------------------

namespace {

bool collect_reals(const TermPtr& v, std::vector<Dual>& out) {
  if (auto* r = v->as<RealLit>()) {
    out.push_back(r->value);
    return true;
  }
  if (auto* t = v->as<TupleCon>()) {
    for (const auto& e : t->elems) {
      if (!collect_reals(e, out)) return false;
    }
    return true;
  }
  return false;
}

TermPtr rebuild(const TermPtr& shape, const std::vector<Dual>& leaves, std::size_t& i) {
  if (auto* t = shape->as<TupleCon>()) {
    std::vector<TermPtr> elems;
    elems.reserve(t->elems.size());
    for (const auto& e : t->elems) elems.push_back(rebuild(e, leaves, i));
    return tuple(std::move(elems));
  }
  return real(leaves.at(i++));
}

}  // namespace

std::optional<std::vector<Dual>> flatten_reals(const TermPtr& v) {
  std::vector<Dual> out;
  if (!collect_reals(v, out)) return std::nullopt;
  return out;
}

TermPtr rebuild_reals(const TermPtr& shape, const std::vector<Dual>& leaves) {
  std::size_t i = 0;
  TermPtr out = rebuild(shape, leaves, i);
  if (i != leaves.size()) throw std::logic_error("rebuild_reals: leaf count mismatch");
  return out;
}

}  // namespace dppl
