#pragma once

// Forward-mode differentiation: primitive lifting and the derivative
// closures produced by diff.

#include <span>

#include "dppl/ast.hpp"

namespace dppl {

struct Runtime;

// Primitive function on dual numbers. Throws InternalError when a perturbed
// value reaches the Wiener primitive.
Dual lift_prim(const PrimFn& f, std::span<const Dual> args);

// The closure lam u : R^A^n. jvp(f, point, u) returned by E-Diff.
TermPtr diff_impl(const TermPtr& f, const TermPtr& point, Coeffect mode);

// Directional derivative of the closed function f at point along tangent.
// Allocates a fresh tag, so nested uses never confuse perturbations.
TermPtr apply_jvp(const TermPtr& f, const TermPtr& point, const TermPtr& tangent, Runtime& rt);

}  // namespace dppl
