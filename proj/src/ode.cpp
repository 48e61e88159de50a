#include "dppl/ode.hpp"

#include <cmath>
#include <sstream>

#include "dppl/errors.hpp"
#include "dppl/eval.hpp"
#include "dppl/machine.hpp"

namespace dppl {

const char* to_string(OdeConfig::Method m) { return m == OdeConfig::Method::Euler ? "euler" : "rk4"; }

namespace {

State axpy(const State& y, const Dual& a, const State& k) {
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

}  // namespace

State euler_step(const RhsFn& rhs, const Dual& x, const State& y, const Dual& h) {
  return axpy(y, h, rhs(x, y));
}

State rk4_step(const RhsFn& rhs, const Dual& x, const State& y, const Dual& h) {
  Dual half = h / Dual(2.0);
  State k1 = rhs(x, y);
  State k2 = rhs(x + half, axpy(y, half, k1));
  State k3 = rhs(x + half, axpy(y, half, k2));
  State k4 = rhs(x + h, axpy(y, h, k3));
  State out(y.size());
  Dual sixth = h / Dual(6.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + sixth * (k1[i] + Dual(2.0) * k2[i] + Dual(2.0) * k3[i] + k4[i]);
  }
  return out;
}

State integrate(const RhsFn& rhs, const State& y0, const Dual& x1, const OdeConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw RuntimeAbort("ODE step size must be positive and finite");
  double end = x1.value();
  if (!std::isfinite(end)) throw RuntimeAbort("ODE end time is not finite");
  if (end == 0.0) return y0;
  double span = std::fabs(end);
  // A tiny tolerance keeps x1 = k*h from producing a spurious sliver step.
  auto n = static_cast<std::size_t>(std::ceil(span / cfg.step - 1e-9));
  if (n == 0) n = 1;
  double h = end > 0 ? cfg.step : -cfg.step;
  auto step = cfg.method == OdeConfig::Method::Euler ? euler_step : rk4_step;
  State y = y0;
  Dual x = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    // The final step ends exactly on x1, carrying its perturbations.
    Dual next = k == n ? x1 : Dual(static_cast<double>(k) * h);
    y = step(rhs, x, y, next - x);
    for (const Dual& v : y) {
      if (!std::isfinite(v.value())) {
        std::ostringstream msg;
        msg << "ODE diverged at x = " << next.value();
        throw RuntimeAbort(msg.str());
      }
    }
    x = next;
  }
  return y;
}

TermPtr solve_impl(const IvpInstance& ivp, const OdeConfig& cfg, Runtime& rt) {
  using namespace machine;
  auto* end = ivp.x1->as<RealLit>();
  if (!end) throw InternalError("solve end time is not a real");
  OdeConfig saved = rt.ode;
  rt.ode = cfg;
  try {
    MValue out = solve(from_term(ivp.rhs), from_term(ivp.y0), end->value, rt);
    rt.ode = saved;
    return to_term(out);
  } catch (...) {
    rt.ode = saved;
    throw;
  }
}

}  // namespace dppl
