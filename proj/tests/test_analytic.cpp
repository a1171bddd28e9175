#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpsim/analytic.hpp"
#include "dpsim/errors.hpp"

using namespace dpsim;
using boost::math::tgamma;

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
  return Kronrod::integrate(f, a, b, 12, 1e-12);
}

}  // namespace

TEST_CASE("two-qubit parameters") {
  const auto p = make_two_qubit_params(10, 3);
  CHECK(p.mu0 == 56);
  CHECK(p.mu1 == 28);
  CHECK(p.mu2 == 8);
  CHECK(p.total == 120);
  CHECK(p.nu == 13.5);
  CHECK(p.a00_mean == doctest::Approx(56.0 / 120.0));
  CHECK(p.gamma == doctest::Approx(112.0));
  CHECK(p.eta == doctest::Approx(1.0 + 6.0 / 56.0));
  CHECK(p.eta_prime == doctest::Approx(1.0 + 7.0 / 56.0));
  CHECK(std::exp(p.log_beta) ==
        doctest::Approx(std::pow(2.0, 1 - 13.5) / (std::sqrt(std::numbers::pi) * tgamma(14.0) * tgamma(4.0))));
  CHECK_THROWS_AS(make_two_qubit_params(10, 1), InvalidArgument);
  CHECK_THROWS_AS(make_two_qubit_params(10, 6), InvalidArgument);
}

TEST_CASE("log K_nu against Boost") {
  for (double nu : {0.0, 0.5, 2.5, 13.5, 60.0})
    for (double z : {0.01, 0.3, 2.0, 15.0, 120.0}) {
      const double ref = boost::math::cyl_bessel_k(nu, z);
      if (!std::isfinite(ref) || ref == 0.0) continue;
      CHECK(log_bessel_k(nu, z) == doctest::Approx(std::log(ref)).epsilon(1e-12).scale(1.0));
    }
  // Far past double range: compare with the large-order leading term ratio.
  CHECK(std::isfinite(log_bessel_k(2000.0, 1.0)));
  CHECK(std::isfinite(log_bessel_k(0.5, 5000.0)));
  // K_{1/2}(z) = sqrt(pi / (2 z)) e^{-z}.
  CHECK(log_bessel_k(0.5, 5000.0) == doctest::Approx(0.5 * std::log(std::numbers::pi / 1e4) - 5000.0).epsilon(1e-13));
}

TEST_CASE("p12 moments") {
  for (auto [N, l] : {std::pair{8, 2}, std::pair{12, 3}, std::pair{40, 2}, std::pair{20, 4}}) {
    const auto p = make_two_qubit_params(N, l);
    auto moment = [&](int k) {
      auto f = [&](double z) { return std::pow(z / p.total, k) * p12_density(z / p.total, p) / p.total; };
      const double peak = std::sqrt(p.mu1);
      return integrate(f, 0.0, peak) + integrate(f, peak, kInf);
    };
    CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(moment(2) == doctest::Approx(p.mu1 / (p.total * p.total)).epsilon(1e-6));
  }
  const auto p = make_two_qubit_params(8, 2);
  CHECK(p12_density(0.0, p) == doctest::Approx(p12_density(1e-9, p)).epsilon(1e-6));
  CHECK_THROWS_AS(p12_density(-1.0, p), InvalidArgument);
}

TEST_CASE("p33 moments") {
  for (auto [N, l] : {std::pair{8, 2}, std::pair{12, 3}, std::pair{20, 4}}) {
    const auto p = make_two_qubit_params(N, l);
    const double s = std::sqrt(p.total);
    auto moment = [&](int k) {
      auto f = [&](double w) { return std::pow(w / s, k) * p33_density(w / s, p) / s; };
      const double peak = std::sqrt(p.mu2);
      return integrate(f, 0.0, peak) + integrate(f, peak, kInf);
    };
    CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(moment(2) == doctest::Approx(p.mu2 / p.total).epsilon(1e-6));
  }
  // One degree of freedom: finite at the origin, Pr(y < eps) ~ eps.
  const auto p = make_two_qubit_params(30, 2);
  REQUIRE(p.mu2 == 1);
  CHECK(p33_density(0.0, p) == doctest::Approx(std::sqrt(2.0 * p.total / std::numbers::pi)));
  const double eps = 1e-6;
  const double mass = integrate([&](double y) { return p33_density(y, p); }, 0.0, eps);
  CHECK(mass / eps == doctest::Approx(p33_density(0.0, p)).epsilon(1e-6));
  CHECK(p33_density(0.0, make_two_qubit_params(10, 3)) == 0.0);
}

TEST_CASE("log-space gamma ratios agree with direct evaluation") {
  // Bound forms written with tgamma where it does not overflow.
  for (int N = 4; N <= 40; ++N)
    for (int l = 2; 2 * l <= N; ++l) {
      const auto p = make_two_qubit_params(N, l);
      if (p.mu1 + p.mu2 > 300) continue;
      const double direct1 = std::pow(2.0, p.mu2) / (std::pow(p.gamma, p.mu2 / 2) * std::sqrt(std::numbers::pi)) *
                             tgamma((p.mu1 + p.mu2) / 2) / tgamma(p.mu1 / 2) * tgamma((p.mu2 + 1) / 2) /
                             tgamma(p.mu2 / 2 + 1);
      const double direct2 = std::pow(2 * p.mu1 * p.eta / p.gamma, p.mu2 / 2) /
                             (std::sqrt(std::numbers::pi) * std::sqrt(p.mu2 / 2 + 0.25));
      if (!std::isfinite(direct1) || direct1 == 0.0 || !std::isnormal(direct2)) continue;
      const auto b = prob_c_bounds(N, l);
      REQUIRE(b.bound1 == doctest::Approx(direct1).epsilon(1e-10));
      REQUIRE(b.bound2 == doctest::Approx(direct2).epsilon(1e-10));
    }
}

TEST_CASE("bound1 <= bound2") {
  for (int N = 4; N <= 64; ++N)
    for (int l = 2; 2 * l <= N; ++l) {
      const auto b = prob_c_bounds(N, l);
      REQUIRE(b.log_bound1 <= b.log_bound2 + 1e-12);
    }
}

TEST_CASE("small-l bound values") {
  CHECK(small_l_bound(100, 2) == doctest::Approx(0.09003).epsilon(1e-4));
  CHECK(small_l_bound(10, 3) == doctest::Approx(6.1e-4).epsilon(0.01));
  CHECK_THROWS_AS(small_l_bound(10, 4), NotApplicable);
}

TEST_CASE("Pr(C > 0) quadrature") {
  CHECK(prob_c_positive(64, 2) == doctest::Approx(2 * std::numbers::sqrt2 / (std::numbers::pi * 8)).epsilon(0.10));
  const double p256 = prob_c_positive(256, 2);
  CHECK(p256 / small_l_bound(256, 2) == doctest::Approx(1.0).epsilon(0.02));
  // The quadrature never exceeds the exact gamma-ratio bound.
  for (int N = 8; N <= 128; N += 2) {
    const double p = prob_c_positive(N, 2);
    REQUIRE(p > 0.0);
    REQUIRE(p <= prob_c_bounds(N, 2).bound1);
  }
  for (int N : {8, 10, 12, 14}) {
    const double p = prob_c_positive(N, 3);
    CHECK(p > 0.0);
    CHECK(p <= prob_c_bounds(N, 3).bound1);
  }
  // Decreasing in N for fixed l.
  CHECK(prob_c_positive(10, 3) < prob_c_positive(8, 3));
}

TEST_CASE("Pr(C > 0) with a00 averaged") {
  // Fluctuations of a00 raise the probability above the frozen-mean value.
  const double frozen = prob_c_positive(10, 3);
  const double averaged = prob_c_positive_a00_averaged(10, 3);
  CHECK(averaged > frozen);
  CHECK(averaged < 2.0 * frozen);
}

TEST_CASE("mean concurrence estimate") {
  const auto e = mean_c_estimate(100, 2);
  CHECK(e.estimate_value() == doctest::Approx(2.873e-4).epsilon(1e-3));
  CHECK(e.bound1 <= e.bound2 * (1 + 1e-12));
  CHECK_THROWS_AS(mean_c_estimate(20, 3).estimate_value(), NotApplicable);
}

TEST_CASE("log-negativity asymptotes") {
  CHECK(ln_asymptote(2, 1, 20) == doctest::Approx(5.0e-3));
  CHECK(ln_asymptote(2, 2, 20) == doctest::Approx(2.013e-4).epsilon(1e-3));
  CHECK(ln_asymptote(3, 1, 20) == doctest::Approx(1.0e-2));
  CHECK(ln_asymptote(3, 2, 20) == doctest::Approx(2.0e-3));
  CHECK_THROWS_AS(ln_asymptote(4, 2, 20), NotApplicable);
}

TEST_CASE("Marcenko-Pastur density") {
  for (auto [da, db] : {std::pair{20.0, 560.0}, std::pair{15.0, 60.0}, std::pair{30.0, 30.0}}) {
    const auto mp = make_mp_params(da, db);
    CHECK(mp.lambda_min >= 0.0);
    const double mass = integrate([&](double x) { return dos_model_density(x, mp, DosKind::marcenko_pastur); },
                                  mp.lambda_min, mp.lambda_max);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(dos_model_density(mp.lambda_max * 1.01, mp, DosKind::marcenko_pastur) == 0.0);
  }
  const auto sq = make_mp_params(30, 30);
  CHECK(sq.lambda_min == 0.0);
  // Square case diverges like lambda^{-1/2}.
  const double r = dos_model_density(1e-8, sq, DosKind::marcenko_pastur) /
                   dos_model_density(1e-6, sq, DosKind::marcenko_pastur);
  CHECK(r == doctest::Approx(10.0).epsilon(1e-3));
  CHECK_THROWS_AS(make_mp_params(10, 5), InvalidArgument);
}

TEST_CASE("lone eigenvalue density") {
  const auto s = make_shape(22, 6, 6);
  const auto last = make_lone_params(s, LoneBlock::last);
  CHECK(last.dof == 1);
  CHECK(std::isinf(dos_model_density(0.0, last, DosKind::lone)));
  CHECK(make_lone_params(s, LoneBlock::first).dof == binomial(16, 6));
  CHECK(make_lone_params(make_shape(22, 5, 6), LoneBlock::last).dof == 6);
  CHECK(make_lone_params(make_shape(22, 7, 6), LoneBlock::last).dof == 16);

  const auto first = make_lone_params(make_shape(22, 7, 6), LoneBlock::first);
  auto f = [&](double x) { return dos_model_density(x, first, DosKind::lone); };
  const double peak = first.dof / first.total;
  const double mass = integrate(f, 0.0, peak) + integrate(f, peak, kInf);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(dos_model_density(-1.0, first, DosKind::lone) == 0.0);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK_THROWS_AS(binary_entropy(1.5), InvalidArgument);
}
