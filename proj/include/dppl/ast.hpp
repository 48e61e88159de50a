#pragma once

// Terms, types and modifiers of the calculus, plus the total order on closed
// values used by empirical quantiles.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dppl/dual.hpp"
#include "dppl/symbol.hpp"

namespace dppl {

// ---------------------------------------------------------------------------
// Modifiers

enum class Coeffect : std::uint8_t { A = 0, P = 1, N = 2 };
enum class Effect : std::uint8_t { Det = 0, Rnd = 1 };

constexpr Coeffect coeff_mul(Coeffect a, Coeffect b) { return a < b ? b : a; }
constexpr Effect effect_join(Effect a, Effect b) { return a < b ? b : a; }

const char* to_string(Coeffect c);
const char* to_string(Effect e);

// ---------------------------------------------------------------------------
// Types

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct RealType {
  Coeffect mod;
};
struct ArrowType {
  TypePtr arg;
  Effect eff;
  TypePtr res;
};
struct TupleType {
  std::vector<TypePtr> elems;
};
struct DistType {
  TypePtr support;
};

struct TypeExpr {
  std::variant<RealType, ArrowType, TupleType, DistType> node;
};

TypePtr real_type(Coeffect c);
TypePtr arrow_type(TypePtr arg, Effect eff, TypePtr res);
// A one-element tuple is its element.
TypePtr tuple_type(std::vector<TypePtr> elems);
TypePtr unit_type();
TypePtr dist_type(TypePtr support);
// Tuple of n copies of R^c (R^c itself when n == 1).
TypePtr real_vector_type(Coeffect c, std::size_t n);

bool operator==(const TypeExpr& a, const TypeExpr& b);
bool type_equal(const TypePtr& a, const TypePtr& b);
std::string to_string(const TypeExpr& t);
inline std::string to_string(const TypePtr& t) { return to_string(*t); }

bool coeff_le_type(Coeffect c, const TypeExpr& t);
TypePtr promote_type(Coeffect c, const TypePtr& t);

// Real leaves in left-to-right order, or nullopt when some leaf is not real.
std::optional<std::vector<Coeffect>> real_leaves(const TypeExpr& t);

// ---------------------------------------------------------------------------
// Primitives

class WienerPath;

enum class PrimOp : std::uint8_t { Add, Sub, Mul, Div, Sin, Cos, PdfGaussian, PdfBeta, Wiener };
enum class PrimDist : std::uint8_t { Gaussian, Beta, WienerProcess };

struct PrimFn {
  PrimOp op;
  std::shared_ptr<const WienerPath> path;  // only for Wiener
};

std::size_t arity(PrimOp op);
std::size_t arity(PrimDist d);
const char* to_string(PrimOp op);
const char* to_string(PrimDist d);

// ---------------------------------------------------------------------------
// Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Var {
  Symbol name;
};
struct Abs {
  Symbol param;
  TypePtr annot;  // null marks a let binder whose type the typer synthesizes
  TermPtr body;
};
struct App {
  TermPtr fn, arg;
};
struct PrimApp {
  PrimFn prim;
  std::vector<TermPtr> args;
};
struct RealLit {
  Dual value;
};
struct TupleCon {
  std::vector<TermPtr> elems;
};
struct Proj {
  std::size_t arity;  // 0 when the arity is left to the tuple
  std::size_t index;  // 1-based
  TermPtr tuple;
};
struct If {
  TermPtr cond, then_branch, else_branch;
};
struct DistCon {
  PrimDist dist;
  std::vector<TermPtr> params;
};
struct Assume {
  TermPtr dist;
};
struct Weight {
  TermPtr arg;
};
struct Infer {
  TermPtr model;
};
struct Diff {
  Coeffect mode;  // A or P
  TermPtr fn, point;
};
struct Solve {
  TermPtr rhs, init, end;
};
// Runtime-only: the body of the closure produced by E-Diff. Evaluates the
// directional derivative of fn at point along tangent.
struct Jvp {
  TermPtr fn, point, tangent;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

using TermNode = std::variant<Var, Abs, App, PrimApp, RealLit, TupleCon, Proj, If, DistCon, Assume,
                              Weight, Infer, Diff, Solve, Jvp>;

struct Term {
  TermNode node;
  SourcePos pos;
  bool value = false;        // cached is_value
  std::uint64_t names = 0;   // bit (id % 64) set for every variable occurring below

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

TermPtr make_term(TermNode node, SourcePos pos = {});
TermPtr var(Symbol name, SourcePos pos = {});
TermPtr lam(Symbol param, TypePtr annot, TermPtr body, SourcePos pos = {});
TermPtr app(TermPtr fn, TermPtr arg, SourcePos pos = {});
TermPtr real(Dual r, SourcePos pos = {});
// A one-element tuple is its element.
TermPtr tuple(std::vector<TermPtr> elems, SourcePos pos = {});
TermPtr unit();
TermPtr proj(std::size_t index, TermPtr t, std::size_t arity = 0, SourcePos pos = {});
TermPtr prim(PrimOp op, std::vector<TermPtr> args, SourcePos pos = {});
TermPtr let_in(Symbol x, TermPtr bound, TermPtr body, TypePtr annot = nullptr, SourcePos pos = {});

inline bool is_value(const TermPtr& t) { return t->value; }
bool is_closed(const TermPtr& t);
// Substitutes a closed value for x.
TermPtr subst(const TermPtr& t, Symbol x, const TermPtr& v);
// Structural equality ignoring source positions; reals compared bitwise.
bool term_equal(const TermPtr& a, const TermPtr& b);
// Parseable surface rendering (runtime-only forms excepted).
std::string pretty(const TermPtr& t);

// Total order on closed values; see ast.cpp for the tag order.
std::strong_ordering value_order(const TermPtr& a, const TermPtr& b);
std::uint64_t value_hash(const TermPtr& v);

// Real leaves of a real-shaped value (nested tuples of literals).
std::optional<std::vector<Dual>> flatten_reals(const TermPtr& v);
// Rebuilds a value of the same tuple shape as `shape` from leaves.
TermPtr rebuild_reals(const TermPtr& shape, const std::vector<Dual>& leaves);

}  // namespace dppl
