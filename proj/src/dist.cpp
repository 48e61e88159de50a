#include "dppl/dist.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "dppl/errors.hpp"
#include "dppl/random.hpp"

namespace dppl {

namespace {

constexpr double kHuge = 1e308;

double poly(const double* c, int n, double x) {
  double s = c[n - 1];
  for (int i = n - 2; i >= 0; --i) s = s * x + c[i];
  return s;
}

}  // namespace

// Wichura, Algorithm AS 241 (PPND16).
double normal_quantile(double p) {
  static const double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2, 1.9715909503065514427e+3,
                             1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                             3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static const double b[] = {1.0,
                             4.2313330701600911252e+1,
                             6.8718700749205790830e+2,
                             5.3941960214247511077e+3,
                             2.1213794301586595867e+4,
                             3.9307895800092710610e+4,
                             2.8729085735721942674e+4,
                             5.2264952788528545610e+3};
  static const double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0, 5.76949722146069140550e0,
                             3.64784832476320460504e0,  1.27045825245236838258e0, 2.41780725177450611770e-1,
                             2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[] = {1.0,
                             2.05319162663775882187e0,
                             1.67638483018380384940e0,
                             6.89767334985100004550e-1,
                             1.48103976427480074590e-1,
                             1.51986665636164571966e-2,
                             5.47593808499534494600e-4,
                             1.05075007164441684324e-9};
  static const double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0, 1.78482653991729133580e0,
                             2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                             2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[] = {1.0,
                             5.99832206555887937690e-1,
                             1.36929880922735805310e-1,
                             1.48753612908506148525e-2,
                             7.86869131145613259100e-4,
                             1.84631831751005468180e-5,
                             1.42151175831644588870e-7,
                             2.04426310338993978564e-15};

  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    return q * poly(a, 8, r) / poly(b, 8, r);
  }
  double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = poly(c, 8, r) / poly(d, 8, r);
  } else {
    r -= 5.0;
    x = poly(e, 8, r) / poly(f, 8, r);
  }
  return q < 0 ? -x : x;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double pdf_gaussian(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) return 0.0;
  double z = (x - mu) / sigma;
  return std::exp(-0.5 * (z * z)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double pdf_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x > 0.0) || !(x < 1.0)) return 0.0;
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log(1.0 - x) - lbeta);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0, x = a / (a + b);
  for (int it = 0; it < 400; ++it) {
    double fx = beta_cdf(a, b, x) - p;
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double dens = pdf_beta(a, b, x);
    double next = dens > 0.0 ? x - fx / dens : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // Relative to the nearer end of the support so tiny quantiles resolve.
    double scale = std::max(std::min(next, 1.0 - next), std::numeric_limits<double>::min());
    if (std::fabs(next - x) <= 1e-15 * scale || hi - lo <= 1e-15 * scale) return next;
    x = next;
  }
  return x;
}

bool valid_params(const DistParams& d) {
  switch (d.dist) {
    case PrimDist::Gaussian:
      return d.params.size() == 2 && std::isfinite(d.params[0]) && d.params[1] > 0.0 &&
             std::isfinite(d.params[1]);
    case PrimDist::Beta:
      return d.params.size() == 2 && d.params[0] > 0.0 && d.params[1] > 0.0 && std::isfinite(d.params[0]) &&
             std::isfinite(d.params[1]);
    case PrimDist::WienerProcess:
      return d.params.empty();
  }
  return false;
}

double quantile(const DistParams& d, double p) {
  if (!valid_params(d) || d.dist == PrimDist::WienerProcess) {
    throw RuntimeAbort("invalid distribution parameters");
  }
  if (d.dist == PrimDist::Gaussian) {
    double v = d.params[0] + d.params[1] * normal_quantile(p);
    if (v > kHuge) return kHuge;
    if (v < -kHuge) return -kHuge;
    return v;
  }
  return beta_quantile(d.params[0], d.params[1], p);
}

double pdf(const DistParams& d, double x) {
  if (d.params.size() != 2) return 0.0;
  if (d.dist == PrimDist::Gaussian) return pdf_gaussian(d.params[0], d.params[1], x);
  if (d.dist == PrimDist::Beta) return pdf_beta(d.params[0], d.params[1], x);
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kCoarse = 1000;
constexpr std::uint64_t kRefine = 2000;
constexpr double kMaxTime = 0x1.0p40;

double gauss(std::uint64_t key, std::uint64_t kind, std::uint64_t node) {
  return normal_quantile(to_unit(prf(key, kind, node)));
}

}  // namespace

WienerPath::WienerPath(double handle)
    : handle_(handle), key_(mix64(std::bit_cast<std::uint64_t>(handle) ^ 0xD1B54A32D192ED03ULL)) {}

double WienerPath::operator()(double x) const {
  if (!std::isfinite(x) || std::fabs(x) > kMaxTime) {
    throw RuntimeAbort("Wiener process evaluated outside its supported range");
  }
  if (x == 0.0) return 0.0;
  return x > 0.0 ? one_sided(prf(key_, 1, 0), x) : one_sided(prf(key_, 2, 0), -x);
}

double WienerPath::one_sided(std::uint64_t key, double t) const {
  // Coarse skeleton at 1, 2, 4, ...: enclose t in [a, b] = [2^(m-1), 2^m].
  double a = 0.0, wa = 0.0, b = 1.0, wb = gauss(key, kCoarse, 0);
  for (std::uint64_t m = 1; t > b; ++m) {
    double next = b * 2.0;
    double wnext = wb + std::sqrt(b) * gauss(key, kCoarse, m);
    a = b;
    wa = wb;
    b = next;
    wb = wnext;
  }
  const double finest = std::ldexp(1.0, -kFinestLevel);
  while (b - a > finest) {
    double mid = 0.5 * (a + b);
    double wm = 0.5 * (wa + wb) + std::sqrt(0.25 * (b - a)) * gauss(key, kRefine, std::bit_cast<std::uint64_t>(mid));
    if (t <= mid) {
      b = mid;
      wb = wm;
    } else {
      a = mid;
      wa = wm;
    }
  }
  return wa + (wb - wa) * ((t - a) / (b - a));
}

}  // namespace dppl
