#include "dppl/ad.hpp"

#include <cmath>
#include <numbers>

#include "dppl/dist.hpp"
#include "dppl/errors.hpp"
#include "dppl/machine.hpp"

namespace dppl {

namespace {

Dual pdf_gaussian(const Dual& mu, const Dual& sigma, const Dual& x) {
  if (!(sigma.value() > 0.0)) return 0.0;
  Dual z = (x - mu) / sigma;
  return exp(Dual(-0.5) * (z * z)) / (sigma * Dual(std::sqrt(2.0 * std::numbers::pi)));
}

Dual pdf_beta(const Dual& a, const Dual& b, const Dual& x) {
  if (!(a.value() > 0.0) || !(b.value() > 0.0) || !(x.value() > 0.0) || !(x.value() < 1.0)) return 0.0;
  Dual lbeta = lgamma(a) + lgamma(b) - lgamma(a + b);
  return exp((a - Dual(1.0)) * log(x) + (b - Dual(1.0)) * log(Dual(1.0) - x) - lbeta);
}

TypePtr shape_type(const TermPtr& point) {
  if (point->is<RealLit>()) return real_type(Coeffect::A);
  auto* tu = point->as<TupleCon>();
  if (!tu) throw InternalError("derivative point is not real-valued");
  std::vector<TypePtr> elems;
  for (const auto& e : tu->elems) elems.push_back(shape_type(e));
  return tuple_type(std::move(elems));
}

}  // namespace

Dual lift_prim(const PrimFn& f, std::span<const Dual> args) {
  switch (f.op) {
    case PrimOp::Add: return args[0] + args[1];
    case PrimOp::Sub: return args[0] - args[1];
    case PrimOp::Mul: return args[0] * args[1];
    case PrimOp::Div: return args[0] / args[1];
    case PrimOp::Sin: return sin(args[0]);
    case PrimOp::Cos: return cos(args[0]);
    case PrimOp::PdfGaussian: return pdf_gaussian(args[0], args[1], args[2]);
    case PrimOp::PdfBeta: return pdf_beta(args[0], args[1], args[2]);
    case PrimOp::Wiener:
      if (!args[0].is_plain()) throw InternalError("tangent reached non-differentiable primitive");
      if (!f.path) throw InternalError("Wiener primitive without a realization");
      return (*f.path)(args[0].value());
  }
  throw InternalError("unknown primitive");
}

TermPtr diff_impl(const TermPtr& f, const TermPtr& point, Coeffect) {
  static const Symbol u("u%");
  return lam(u, shape_type(point), make_term(Jvp{f, point, var(u)}));
}

TermPtr apply_jvp(const TermPtr& f, const TermPtr& point, const TermPtr& tangent, Runtime& rt) {
  using namespace machine;
  return to_term(jvp(from_term(f), from_term(point), from_term(tangent), rt));
}

}  // namespace dppl
