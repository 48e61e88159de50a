#pragma once

// Fixed-step explicit integrators over dual numbers, so tangents flow through
// the solver.

#include <functional>
#include <string>
#include <vector>

#include "dppl/ast.hpp"

namespace dppl {

struct Runtime;

struct OdeConfig {
  enum class Method { Euler, Rk4 };
  Method method = Method::Rk4;
  double step = 1e-3;
};

const char* to_string(OdeConfig::Method m);

using State = std::vector<Dual>;
using RhsFn = std::function<State(const Dual& x, const State& y)>;

State euler_step(const RhsFn& rhs, const Dual& x, const State& y, const Dual& h);
State rk4_step(const RhsFn& rhs, const Dual& x, const State& y, const Dual& h);

// ceil(|x1| / h) steps from x = 0 towards x1, the last one shortened to land
// on x1. Throws RuntimeAbort("ODE diverged at x = ...") on non-finite state.
State integrate(const RhsFn& rhs, const State& y0, const Dual& x1, const OdeConfig& cfg);

struct IvpInstance {
  TermPtr rhs;  // closed closure value
  TermPtr y0;   // real-shaped value
  TermPtr x1;   // real literal
};

// Evaluates the right-hand side closure with the evaluator's deterministic
// machine. Returns a value of y0's shape.
TermPtr solve_impl(const IvpInstance& ivp, const OdeConfig& cfg, Runtime& rt);

}  // namespace dppl
