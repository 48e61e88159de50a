#pragma once

// Environment-based evaluator for closed deterministic terms. The derivative
// and solve implementing functions call closures thousands of times; this
// machine evaluates them without rebuilding terms. It agrees with the
// small-step relation on every deterministic term (differentially tested).

#include <memory>
#include <variant>
#include <vector>

#include "dppl/ast.hpp"

namespace dppl {

struct Runtime;

namespace machine {

struct Env;
using EnvPtr = std::shared_ptr<const Env>;
struct MValue;
using Tuple = std::shared_ptr<const std::vector<MValue>>;

struct Closure {
  const Abs* abs;
  TermPtr owner;  // keeps abs alive
  EnvPtr env;
};

struct DerivClosure {
  std::shared_ptr<const MValue> fn;
  std::shared_ptr<const MValue> point;
  Coeffect mode;
};

// Closed value terms the machine never looks inside (distributions,
// inferred distributions).
struct Opaque {
  TermPtr term;
};

struct MValue {
  std::variant<Dual, Tuple, Closure, DerivClosure, Opaque> v;
};

struct Env {
  Symbol name;
  MValue value;
  EnvPtr next;
};

MValue from_term(const TermPtr& value);
TermPtr to_term(const MValue& v);

MValue evaluate(const TermPtr& t, const EnvPtr& env, Runtime& rt);
MValue apply(const MValue& f, const MValue& arg, Runtime& rt);
MValue jvp(const MValue& f, const MValue& point, const MValue& tangent, Runtime& rt);
MValue solve(const MValue& rhs, const MValue& y0, const Dual& x1, Runtime& rt);

bool flatten(const MValue& v, std::vector<Dual>& out);
MValue rebuild(const MValue& shape, const std::vector<Dual>& leaves);

}  // namespace machine
}  // namespace dppl
