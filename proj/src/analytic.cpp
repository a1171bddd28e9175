#include "dpsim/analytic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpsim/errors.hpp"

namespace dpsim {

namespace {

using boost::math::lgamma;
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kLn2 = std::numbers::ln2;
const double kLnPi = std::log(std::numbers::pi);
// ln(1e18): integrands below this fraction of their peak are dropped.
const double kTruncation = std::log(1e18);

double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - kLn2;
}

/// Integrates f over [a, b] and returns (value, absolute error estimate).
template <class F>
std::pair<double, double> integrate(F f, double a, double b, double tol) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, 12, tol, &err);
  return {v, err};
}

}  // namespace

TwoQubitParams make_two_qubit_params(int N, int l) {
  if (l < 2 || 2 * l > N)
    throw InvalidArgument("two-qubit statistics need l >= 2 and N >= 2l (got N=" +
                          std::to_string(N) + ", l=" + std::to_string(l) + ")");
  TwoQubitParams p;
  p.N = N;
  p.l = l;
  p.mu0 = static_cast<double>(binomial(N - 2, l));
  p.mu1 = static_cast<double>(binomial(N - 2, l - 1));
  p.mu2 = static_cast<double>(binomial(N - 2, l - 2));
  p.total = static_cast<double>(binomial(N, l));
  p.nu = 0.5 * (p.mu1 - 1.0);
  p.a00_mean = p.mu0 / p.total;
  p.gamma = 2.0 * p.a00_mean * p.total;
  p.log_beta = (1.0 - p.nu) * kLn2 - 0.5 * kLnPi - lgamma(0.5 * p.mu1) - lgamma(0.5 * p.mu2);
  p.eta = 1.0 + (p.mu2 - 2.0) / (2.0 * p.mu1);
  p.eta_prime = 1.0 + (p.mu2 - 1.0) / (2.0 * p.mu1);
  return p;
}

double log_bessel_k(double nu, double z) {
  if (!(z > 0.0) || nu < 0.0) throw InvalidArgument("log_bessel_k: need nu >= 0 and z > 0");
  auto g = [&](double t) { return -z * std::cosh(t) + log_cosh(nu * t); };

  // Peak of the integrand: nu tanh(nu t) = z sinh t.
  double peak = 0.0;
  if (nu * nu > z) {
    double lo = 0.0, hi = std::asinh(nu / z) + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (nu * std::tanh(nu * mid) - z * std::sinh(mid) > 0.0 ? lo : hi) = mid;
    }
    peak = 0.5 * (lo + hi);
  }
  const double gmax = g(peak);
  double step = 1.0 / std::sqrt(std::max(z, 1e-3));
  double upper = peak + step;
  while (g(upper) > gmax - 50.0) {
    step *= 2.0;
    upper = peak + step;
  }
  auto f = [&](double t) { return std::exp(g(t) - gmax); };
  double total = 0.0;
  if (peak > 0.0) total += integrate(f, 0.0, peak, 1e-14).first;
  total += integrate(f, peak, upper, 1e-14).first;
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericRangeError("log_bessel_k: quadrature failed");
  return gmax + std::log(total);
}

double log_p12_density(double x, const TwoQubitParams& p) {
  if (x < 0.0) throw InvalidArgument("p12_density: x must be nonnegative");
  const double head = kLn2 + std::log(p.total) - 0.5 * kLnPi - lgamma(0.5 * p.mu1);
  if (x == 0.0) {
    // K_nu(z) (z/2)^nu -> Gamma(nu) / 2 as z -> 0.
    if (p.nu <= 0.0) return std::numeric_limits<double>::infinity();
    return head + lgamma(p.nu) - kLn2;
  }
  const double z = p.total * x;
  return head + log_bessel_k(p.nu, z) + p.nu * std::log(0.5 * z);
}

double p12_density(double x, const TwoQubitParams& p) {
  const double v = std::exp(log_p12_density(x, p));
  if (std::isinf(v) && x > 0.0) throw NumericRangeError("p12_density overflow");
  return v;
}

double log_p33_density(double y, const TwoQubitParams& p) {
  if (y < 0.0) throw InvalidArgument("p33_density: y must be nonnegative");
  const double head = 0.5 * p.mu2 * std::log(p.total) - (0.5 * p.mu2 - 1.0) * kLn2 - lgamma(0.5 * p.mu2);
  if (y == 0.0) {
    if (p.mu2 == 1.0) return head;
    return -std::numeric_limits<double>::infinity();
  }
  return head + (p.mu2 - 1.0) * std::log(y) - 0.5 * p.total * y * y;
}

double p33_density(double y, const TwoQubitParams& p) {
  const double v = std::exp(log_p33_density(y, p));
  if (std::isinf(v)) throw NumericRangeError("p33_density overflow");
  return v;
}

namespace {

// Pr(|a12| > sqrt(gamma / (2 total)) sqrt(a33)) after the substitutions y -> s^2
// and the cosh-integral representation of K_nu:
//   int_0^inf w(t) E_s[Q(nu + 1, sqrt(gamma) s cosh t)] dt,
// where s^2 ~ Gamma(mu2/2) and
//   w(t) = 2^(1-nu) Gamma(nu+1) / (sqrt(pi) Gamma(mu1/2)) cosh(nu t) / cosh(t)^(nu+1).
// w integrates to 1, so gamma = 0 returns 1.
double prob_given_gamma(const TwoQubitParams& p, double gamma) {
  using boost::math::gamma_q;
  using boost::math::gamma_q_inv;
  const double a = p.nu + 1.0;
  const double half_mu2 = 0.5 * p.mu2;
  const double log_w0 = (1.0 - p.nu) * kLn2 - 0.5 * kLnPi - lgamma(0.5 * p.mu1) + lgamma(a);
  const double log_chi_norm = kLn2 - lgamma(half_mu2);
  const double s_chi = std::sqrt(gamma_q_inv(half_mu2, 1e-20));
  const double q_edge = gamma_q_inv(a, 1e-25);
  const double root_gamma = std::sqrt(gamma);

  // Inner integral in u = c s, so the drop of Q(nu + 1, u) near u = nu + 1 sits
  // at a fixed place whatever t is.
  auto inner = [&](double t) {
    const double c = root_gamma * std::cosh(t);
    const double u_hi = std::min(c * s_chi, q_edge);
    auto f = [&](double u) {
      if (u <= 0.0) return p.mu2 == 1.0 ? std::exp(log_chi_norm) / c : 0.0;
      const double s = u / c;
      return std::exp(log_chi_norm + (p.mu2 - 1.0) * std::log(s) - s * s) * gamma_q(a, u) / c;
    };
    const double mid = std::min(a, u_hi);
    double v = integrate(f, 0.0, mid, 1e-12).first;
    if (u_hi > mid) v += integrate(f, mid, u_hi, 1e-12).first;
    return v;
  };
  auto log_w = [&](double t) { return log_w0 + log_cosh(p.nu * t) - a * log_cosh(t); };
  auto outer = [&](double t) {
    const double i = inner(t);
    return i > 0.0 ? std::exp(log_w(t)) * i : 0.0;
  };

  // Locate the peak and the truncation point on a coarse grid.
  const double h = 0.05;
  double peak_t = 0.0, peak_v = outer(0.0);
  double t = h;
  for (; t < 400.0; t += h) {
    const double v = outer(t);
    if (v > peak_v) {
      peak_v = v;
      peak_t = t;
    } else if (v == 0.0 || std::log(v) < std::log(peak_v) - kTruncation) {
      break;
    }
  }
  if (!(peak_v > 0.0)) return 0.0;
  const double upper = t;

  double value = 0.0, err = 0.0;
  for (auto [lo, hi] : {std::pair{0.0, peak_t}, std::pair{peak_t, upper}}) {
    if (hi <= lo) continue;
    auto [v, e] = integrate(outer, lo, hi, 1e-10);
    value += v;
    err += e;
  }
  if (!(value > 0.0) || err > 1e-6 * value)
    throw AccuracyFailure("prob_c_positive(N=" + std::to_string(p.N) + ", l=" + std::to_string(p.l) + ")",
                          value > 0.0 ? err / value : 1.0);
  return std::min(value, 1.0);
}

}  // namespace

double prob_c_positive(int N, int l) {
  const auto p = make_two_qubit_params(N, l);
  return prob_given_gamma(p, p.gamma);
}

double prob_c_positive_a00_averaged(int N, int l) {
  using boost::math::gamma_p_inv;
  using boost::math::gamma_q_inv;
  const auto p = make_two_qubit_params(N, l);
  // a00 * total ~ chi-squared(mu0), so gamma = 2 u with u ~ chi-squared(mu0).
  const double k = 0.5 * p.mu0;
  const double lo = 2.0 * gamma_p_inv(k, 1e-15);
  const double hi = 2.0 * gamma_q_inv(k, 1e-15);
  auto f = [&](double u) {
    const double log_density = (k - 1.0) * std::log(u) - 0.5 * u - k * kLn2 - lgamma(k);
    return std::exp(log_density) * prob_given_gamma(p, 2.0 * u);
  };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 8, 1e-8, &err);
  if (err > 1e-6 * v) throw AccuracyFailure("prob_c_positive_a00_averaged", err / v);
  return v;
}

ProbBounds prob_c_bounds(int N, int l) {
  const auto p = make_two_qubit_params(N, l);
  ProbBounds b;
  b.log_bound1 = p.mu2 * kLn2 - 0.5 * p.mu2 * std::log(p.gamma) - 0.5 * kLnPi +
                 lgamma(0.5 * (p.mu1 + p.mu2)) - lgamma(0.5 * p.mu1) + lgamma(0.5 * (p.mu2 + 1.0)) -
                 lgamma(0.5 * p.mu2 + 1.0);
  b.log_bound2 = -0.5 * kLnPi + 0.5 * p.mu2 * std::log(2.0 * p.mu1 * p.eta / p.gamma) -
                 0.5 * std::log(0.5 * p.mu2 + 0.25);
  b.bound1 = std::exp(b.log_bound1);
  b.bound2 = std::exp(b.log_bound2);
  return b;
}

double small_l_bound(int N, int l) {
  if (N < 1) throw InvalidArgument("small_l_bound: N must be positive");
  const double n = N;
  if (l == 2) return 2.0 * std::numbers::sqrt2 / (std::numbers::pi * std::sqrt(n));
  if (l == 3) return std::sqrt(2.0 / (std::numbers::pi * n)) * std::exp(-0.5 * n * std::log(n / 3.0));
  throw NotApplicable("small_l_bound is derived for l = 2 and l = 3 only");
}

double MeanConcurrenceEstimate::estimate_value() const {
  if (!estimate) throw NotApplicable("mean concurrence estimate exists for l = 2 only");
  return *estimate;
}

MeanConcurrenceEstimate mean_c_estimate(int N, int l) {
  const auto p = make_two_qubit_params(N, l);
  MeanConcurrenceEstimate out;
  if (l == 2) out.estimate = 16.0 / (std::pow(std::numbers::pi, 1.5) * double(N) * double(N));
  const double log_b1 = (p.mu2 + 2.0) * kLn2 - std::log(p.total) - 0.5 * p.mu2 * std::log(p.gamma) -
                        0.5 * kLnPi + lgamma(0.5 * (p.mu1 + p.mu2 + 1.0)) - lgamma(0.5 * p.mu1);
  const double log_b2 = kLn2 + 0.5 * std::log(p.gamma) - std::log(p.total) - 0.5 * kLnPi +
                        0.5 * (p.mu2 + 1.0) * std::log(2.0 * p.mu1 * p.eta_prime / p.gamma);
  out.bound1 = std::exp(log_b1);
  out.bound2 = std::exp(log_b2);
  return out;
}

double ln_asymptote(int m, int l, int N) {
  const double n = N;
  if (m == 2 && l == 1) return 2.0 / (n * n);
  if (m == 2 && l == 2) return 16.0 * std::numbers::sqrt2 / (std::numbers::pi * std::pow(n, 3.5));
  if (m == 3 && l == 1) return 4.0 / (n * n);
  if (m == 3 && l == 2) return 16.0 / (n * n * n);
  throw NotApplicable("no log-negativity asymptote for m=" + std::to_string(m) + ", l=" + std::to_string(l));
}

DosModelParams make_mp_params(double d_a, double d_b) {
  if (!(d_a > 0.0) || d_b < d_a) throw InvalidArgument("make_mp_params: need 0 < d_A <= d_B");
  DosModelParams p;
  p.d_a = d_a;
  p.d_b = d_b;
  p.ratio = d_b / d_a;
  const double edge = 1.0 / std::sqrt(p.ratio);
  p.lambda_min = (1.0 - edge) * (1.0 - edge) / d_a;
  p.lambda_max = (1.0 + edge) * (1.0 + edge) / d_a;
  return p;
}

DosModelParams make_lone_params(const SystemShape& shape, LoneBlock which) {
  const int N = shape.N, l = shape.l, m = shape.m;
  DosModelParams p;
  p.total = static_cast<double>(binomial(N, l));
  if (which == LoneBlock::first) {
    p.dof = static_cast<double>(binomial(N - m, l));
  } else {
    p.dof = static_cast<double>(l >= m ? binomial(N - m, l - m) : binomial(m, l));
  }
  if (!(p.dof >= 1.0)) throw InvalidArgument("make_lone_params: block is empty for " + shape.to_string());
  return p;
}

double dos_model_density(double lambda, const DosModelParams& params, DosKind kind) {
  if (kind == DosKind::marcenko_pastur) {
    if (lambda <= params.lambda_min || lambda >= params.lambda_max) return 0.0;
    return params.d_a * params.ratio / (2.0 * std::numbers::pi) *
           std::sqrt((params.lambda_max - lambda) * (lambda - params.lambda_min)) / lambda;
  }
  if (lambda < 0.0) return 0.0;
  const double d = params.dof;
  if (lambda == 0.0) {
    if (d < 2.0) return std::numeric_limits<double>::infinity();
    return d == 2.0 ? 0.5 * params.total : 0.0;
  }
  const double x = lambda * params.total;
  const double log_chi2 = (0.5 * d - 1.0) * std::log(x) - 0.5 * x - 0.5 * d * kLn2 - lgamma(0.5 * d);
  return params.total * std::exp(log_chi2);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

}  // namespace dpsim
