#include <gtest/gtest.h>

#include "dppl/dual.hpp"
#include "dppl/ode.hpp"
#include "support.hpp"

using namespace dppl;
using namespace dppl::test;

namespace {
Runtime with(OdeConfig::Method m, double h) {
  Runtime rt;
  rt.ode.method = m;
  rt.ode.step = h;
  return rt;
}

// y' = x - y, y(0) = 0 has y(x) = x - 1 + exp(-x).
double linear_ivp(OdeConfig::Method m, double h, double x1 = 1.0) {
  char src[160];
  std::snprintf(src, sizeof src, "solve (lam (x, y) : (RealA, RealA). x - y) 0.0 (%.17g)", x1);
  return num(run_det(src, with(m, h)));
}

double exact_linear(double x) { return x - 1.0 + std::exp(-x); }

RhsFn scalar(std::function<Dual(const Dual&, const Dual&)> f) {
  return [f](const Dual& x, const State& y) { return State{f(x, y[0])}; };
}
}  // namespace

TEST(Ode, LinearIvpWithRk4) {
  double y = linear_ivp(OdeConfig::Method::Rk4, 1e-3);
  EXPECT_NEAR(y, 0.367879, 1e-6);
  EXPECT_NEAR(y, exact_linear(1.0), 1e-12);
}

TEST(Ode, ZeroEndTimeReturnsInitialValue) {
  Runtime rt;
  EXPECT_TRUE(term_equal(run_det("solve (lam (x, y) : (RealA, (RealA, RealA)). (y.2, 0.0 - y.1)) (0.25, (-3.5)) 0.0", rt),
                         tuple({real(0.25), real(-3.5)})));
  State y0{Dual(1.5)};
  State out = integrate(scalar([](const Dual&, const Dual& y) { return y * y; }), y0, Dual(0.0), rt.ode);
  EXPECT_EQ(out[0].value(), 1.5);
}

TEST(Ode, EulerRecurrence) {
  for (double h : {0.1, 0.05, 0.01}) {
    int n = 20;
    char src[160];
    std::snprintf(src, sizeof src, "solve (lam (x, y) : (RealA, RealA). 0.0 - y) 1.0 (%.17g)", n * h);
    double y = num(run_det(src, with(OdeConfig::Method::Euler, h)));
    EXPECT_NEAR(y, std::pow(1.0 - h, n), 1e-13) << h;
  }
}

TEST(Ode, FinalStepIsShortened) {
  // 0.25 / 0.1 takes steps 0.1, 0.1, 0.05 on y' = 1.
  OdeConfig cfg{OdeConfig::Method::Euler, 0.1};
  State y = integrate(scalar([](const Dual&, const Dual&) { return Dual(1.0); }), State{Dual(0.0)}, Dual(0.25), cfg);
  EXPECT_NEAR(y[0].value(), 0.25, 1e-15);
  // Explicit time dependence exposes the stage times: y' = x gives x^2 / 2 exactly under rk4.
  cfg.method = OdeConfig::Method::Rk4;
  y = integrate(scalar([](const Dual& x, const Dual&) { return x; }), State{Dual(0.0)}, Dual(0.25), cfg);
  EXPECT_NEAR(y[0].value(), 0.25 * 0.25 / 2, 1e-15);
}

TEST(Ode, SingleSteps) {
  State e = euler_step(scalar([](const Dual&, const Dual&) { return Dual(1.0); }), Dual(0.0), State{Dual(0.0)}, Dual(0.5));
  EXPECT_EQ(e[0].value(), 0.5);
  State r = rk4_step(scalar([](const Dual&, const Dual& y) { return y; }), Dual(0.0), State{Dual(1.0)}, Dual(0.1));
  EXPECT_NEAR(r[0].value(), std::exp(0.1), 1e-7);

  Tag t = fresh_tag();
  double a = -0.7, h = 0.2;
  State d = euler_step(scalar([a](const Dual&, const Dual& y) { return Dual(a) * y; }), Dual(0.0),
                       State{Dual::make(t, 2.0, 1.0)}, Dual(h));
  EXPECT_NEAR(d[0].value(), 2.0 * (1 + h * a), 1e-15);
  EXPECT_NEAR(d[0].tangent_at(t).value(), 1 + h * a, 1e-15);
}

TEST(Ode, ConvergenceOrders) {
  auto order = [](OdeConfig::Method m, double h0) {
    std::vector<double> err;
    for (int k = 0; k < 4; ++k) err.push_back(std::abs(linear_ivp(m, h0 / std::pow(2.0, k)) - exact_linear(1.0)));
    std::vector<double> orders;
    for (int k = 1; k < 4; ++k) orders.push_back(std::log2(err[k - 1] / err[k]));
    return orders;
  };
  for (double p : order(OdeConfig::Method::Euler, 0.1)) EXPECT_NEAR(p, 1.0, 0.3);
  for (double p : order(OdeConfig::Method::Rk4, 0.2)) EXPECT_NEAR(p, 4.0, 0.3);
}

TEST(Ode, DifferentiatesThroughTheSolver) {
  Runtime rt = with(OdeConfig::Method::Rk4, 1e-3);
  for (double theta : {0.0, 0.5, -1.0}) {
    char src[200];
    std::snprintf(src, sizeof src,
                  "diff1A (lam th : RealA. solve (lam (x, y) : (RealA, RealA). th * y) 1.0 1.0) (%.17g)", theta);
    double d = num(run_det(src, rt));
    EXPECT_NEAR(d, std::exp(theta), 1e-5 * std::exp(theta)) << theta;
  }
}

TEST(Ode, NegativeEndTimeIntegratesBackward) {
  // y' = y from 1 to x = -1 gives exp(-1).
  double y = num(run_det("solve (lam (x, y) : (RealA, RealA). y) 1.0 (-1.0)", with(OdeConfig::Method::Rk4, 1e-3)));
  EXPECT_NEAR(y, std::exp(-1.0), 1e-10);
  // Linear IVP backward against its closed form.
  EXPECT_NEAR(linear_ivp(OdeConfig::Method::Rk4, 1e-3, -0.5), exact_linear(-0.5), 1e-10);
}

TEST(Ode, DivergenceAborts) {
  // y' = y^4 from 1 blows up at x = 1/3.
  try {
    run_det("solve (lam (x, y) : (RealA, RealA). y * y * y * y) 1.0 2.0", with(OdeConfig::Method::Euler, 1e-2));
    FAIL() << "expected abort";
  } catch (const RuntimeAbort& e) {
    EXPECT_NE(std::string(e.what()).find("ODE diverged at x = "), std::string::npos) << e.what();
  }
}

TEST(Ode, SensitivityFormulationsAgree) {
  Runtime rt = with(OdeConfig::Method::Rk4, 1e-2);
  auto rows = [&](const char* file) {
    return nums(run_det(read_text(source_dir() / "programs" / file), rt));
  };
  std::vector<double> a = rows("sensitivity_diff_of_solve.dppl");
  std::vector<double> b = rows("sensitivity_augmented.dppl");
  ASSERT_EQ(a.size(), 300u);
  ASSERT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  EXPECT_LE(worst, 1e-3);
  EXPECT_EQ(a[0], 0.1);
  EXPECT_EQ(a[3], 0.2);
}
