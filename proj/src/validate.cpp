#include "dpsim/validate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <bit>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "dpsim/analytic.hpp"
#include "dpsim/harness.hpp"
#include "dpsim/measures.hpp"
#include "dpsim/rdm.hpp"

namespace dpsim {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

// The (N, l) points at which the two-qubit densities feed experiments.
const std::vector<std::pair<int, int>> kTwoQubitGrid = {{8, 2},  {16, 2}, {32, 2}, {64, 2},
                                                        {128, 2}, {8, 3}, {10, 3}, {12, 3}};

// Moments of p12 in the scaled variable z = total * x.
double p12_moment(const TwoQubitParams& p, int power) {
  auto f = [&](double z) {
    if (z <= 0.0) return power == 0 ? p12_density(0.0, p) / p.total : 0.0;
    return std::pow(z / p.total, power) * p12_density(z / p.total, p) / p.total;
  };
  const double peak = std::sqrt(p.mu1);
  double err = 0.0;
  double v = Kronrod::integrate(f, 0.0, peak, 15, 1e-13, &err);
  v += Kronrod::integrate(f, peak, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
  return v;
}

double p33_moment(const TwoQubitParams& p, int power) {
  const double s = std::sqrt(p.total);
  auto f = [&](double w) { return std::pow(w / s, power) * p33_density(w / s, p) / s; };
  const double peak = std::sqrt(std::max(p.mu2 - 1.0, 1.0));
  double err = 0.0;
  double v = Kronrod::integrate(f, 0.0, peak, 15, 1e-13, &err);
  v += Kronrod::integrate(f, peak, std::numeric_limits<double>::infinity(), 15, 1e-13, &err);
  return v;
}

}  // namespace

CheckResult check_weight_ranking() {
  CheckResult r{"weight rank/unrank bijection (m <= 12)", true, {}};
  std::uint64_t strings = 0;
  for (int m = 0; m <= 12; ++m)
    for (int k = 0; k <= m; ++k)
      for (Count rank = 0; rank < binomial(m, k); ++rank) {
        const Mask bits = weight_unrank(m, k, rank);
        ++strings;
        if (std::popcount(bits) != k || bits >> m != 0 || weight_rank(bits) != rank) {
          r.passed = false;
          r.detail = "mismatch at m=" + std::to_string(m) + " k=" + std::to_string(k);
          return r;
        }
      }
  r.detail = std::to_string(strings) + " strings";
  return r;
}

CheckResult check_rank_law_combinatorics(int max_N) {
  CheckResult r{"rank bound = 2^m iff full-rank condition (N <= " + std::to_string(max_N) + ")", true, {}};
  int shapes = 0;
  for (int N = 2; N <= max_N; ++N)
    for (int m = 1; m < N && m <= kMaxBlockQubits; ++m)
      for (int l = 0; 2 * l <= N; ++l) {
        const auto s = make_shape(N, l, m);
        ++shapes;
        const bool full = rank_upper_bound(s) == (Count{1} << m);
        if (full != full_rank_condition(s)) {
          r.passed = false;
          r.detail = "violated at " + s.to_string();
          return r;
        }
      }
  r.detail = std::to_string(shapes) + " shapes";
  return r;
}

CheckResult check_rank_per_sample(int max_N, std::uint64_t samples_per_shape, std::uint64_t seed) {
  CheckResult r{"zero eigenvalues of rho_A = 2^m - rank bound, per sample", true, {}};
  int shapes = 0;
  std::uint64_t draws = 0;
  for (int N = 4; N <= max_N; ++N)
    for (int m = 2; m <= 5 && m < N; ++m)
      for (int l = 1; 2 * l <= N; ++l) {
        if (binomial(N, l) > 30000) continue;
        const auto s = make_shape(N, l, m);
        const auto expected = static_cast<Eigen::Index>((Count{1} << m) - rank_upper_bound(s));
        ++shapes;
        for (std::uint64_t i = 0; i < samples_per_shape; ++i, ++draws) {
          const auto blocks = build_blocks(sample_state(s, point_seed(seed, s, i)));
          const auto spec = spectrum(assemble_dense(blocks));
          if (spec.count_zero(kZeroEigenvalueTol) != expected) {
            r.passed = false;
            r.detail = s.to_string() + " sample " + std::to_string(i) + ": " +
                       std::to_string(spec.count_zero(kZeroEigenvalueTol)) + " zeros, expected " +
                       std::to_string(expected);
            return r;
          }
        }
      }
  r.detail = std::to_string(shapes) + " shapes, " + std::to_string(draws) + " samples";
  return r;
}

CheckResult check_concurrence_oracle(std::uint64_t samples, std::uint64_t seed) {
  CheckResult r{"structured concurrence = Wootters concurrence (|d| < 1e-10)", true, {}};
  const std::vector<std::pair<int, int>> shapes = {{6, 2}, {8, 2}, {12, 2}, {16, 2}, {6, 3}, {8, 3}, {10, 3}};
  double worst = 0.0;
  std::uint64_t positive = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto [N, l] = shapes[i % shapes.size()];
    const auto s = make_shape(N, l, 2);
    const Eigen::Matrix4d rho = assemble_dense(build_blocks(sample_state(s, point_seed(seed, s, i))));
    const double a = concurrence_structured(rho).value;
    const double b = concurrence_wootters(rho).value;
    worst = std::max(worst, std::abs(a - b));
    if (a > 0.0) ++positive;
  }
  r.passed = worst < 1e-10;
  r.detail = "max |d| = " + fmt(worst) + " over " + std::to_string(samples) + " samples (" +
             std::to_string(positive) + " entangled)";
  return r;
}

CheckResult check_partial_transpose(std::uint64_t cases, std::uint64_t seed) {
  CheckResult r{"partial transpose involution and trace preservation", true, {}};
  double worst_trace = 0.0;
  for (std::uint64_t i = 0; i < cases; ++i) {
    const int m = 2 + static_cast<int>(i % 4);
    const int N = m + 4 + static_cast<int>(i % 6);
    const int l = 1 + static_cast<int>(i % static_cast<std::uint64_t>(N / 2));
    const auto s = make_shape(N, l, m);
    NormalStream pick(SeedSpec{seed ^ 0x5eedULL, i});
    const Mask full = (Mask{1} << m) - 1;
    const Mask subset = 1 + static_cast<Mask>(pick.raw() % (full - 1));
    const Eigen::MatrixXd rho = assemble_dense(sample_block_rdm(s, point_seed(seed, s, i)));
    const Eigen::MatrixXd pt = partial_transpose(rho, subset);
    worst_trace = std::max(worst_trace, std::abs(pt.trace() - rho.trace()));
    if (partial_transpose(pt, subset) != rho || pt != pt.transpose() || worst_trace > 1e-12) {
      r.passed = false;
      r.detail = "failed at case " + std::to_string(i) + " " + s.to_string();
      return r;
    }
  }
  r.detail = std::to_string(cases) + " cases, max trace drift " + fmt(worst_trace);
  return r;
}

CheckResult check_density_normalization() {
  CheckResult r{"p12 and p33 integrate to 1 (1e-6)", true, {}};
  double worst = 0.0;
  for (auto [N, l] : kTwoQubitGrid) {
    const auto p = make_two_qubit_params(N, l);
    worst = std::max({worst, std::abs(p12_moment(p, 0) - 1.0), std::abs(p33_moment(p, 0) - 1.0)});
  }
  r.passed = worst < 1e-6;
  r.detail = "worst |integral - 1| = " + fmt(worst) + " over " + std::to_string(kTwoQubitGrid.size()) + " (N, l)";
  return r;
}

CheckResult check_abs_moment_identity() {
  CheckResult r{"<x^2> = (pi/2) <x>^2 for |a12| (1e-6)", true, {}};
  double worst = 0.0, worst_exact = 0.0;
  std::string where;
  for (auto [N, l] : kTwoQubitGrid) {
    const auto p = make_two_qubit_params(N, l);
    const double ratio = p12_moment(p, 2) / std::pow(p12_moment(p, 1), 2);
    const double dev = std::abs(ratio / (std::numbers::pi / 2) - 1.0);
    // Finite-mu1 value: mu1 pi Gamma(mu1/2)^2 / (4 Gamma((mu1+1)/2)^2).
    const double exact = std::exp(std::log(p.mu1 * std::numbers::pi / 4.0) +
                                  2.0 * (boost::math::lgamma(0.5 * p.mu1) - boost::math::lgamma(0.5 * (p.mu1 + 1.0))));
    worst_exact = std::max(worst_exact, std::abs(ratio / exact - 1.0));
    if (dev > worst) {
      worst = dev;
      where = "N=" + std::to_string(N) + " l=" + std::to_string(l);
    }
  }
  r.passed = worst < 1e-6;
  r.detail = "worst relative deviation " + fmt(worst) + " at " + where +
             "; against the finite-mu1 ratio the worst is " + fmt(worst_exact);
  return r;
}

CheckResult check_deterministic_rerun(const std::string& scratch_dir, std::uint64_t seed) {
  CheckResult r{"identical config and seed give byte-identical output", true, {}};
  auto run = [&](int workers, const std::string& name) {
    auto config = build_config({{"N", "8,10,12,16"}, {"l", "2"}, {"m", "2"}, {"samples", "3000"},
                                {"seed", std::to_string(seed)}, {"measure", "log-negativity"},
                                {"workers", std::to_string(workers)}});
    const auto path = (std::filesystem::path(scratch_dir) / name).string();
    write_results(run_scaling_experiment(config), config, path);
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    std::filesystem::remove(path);
    return ss.str();
  };
  // The config echo carries the worker count, so compare payload lines only.
  auto payload = [](const std::string& text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line))
      if (line.empty() || line[0] != '#') out << line << '\n';
    return out.str();
  };
  const auto a = run(1, "dpsim_rerun_a.csv");
  const auto b = run(1, "dpsim_rerun_b.csv");
  const auto c = run(3, "dpsim_rerun_c.csv");
  r.passed = a == b && payload(a) == payload(c);
  r.detail = r.passed ? "reruns and 1 vs 3 workers identical" : "outputs differ";
  return r;
}

std::vector<CheckResult> run_validation(const ValidationOptions& o) {
  return {check_weight_ranking(),
          check_rank_law_combinatorics(o.rank_max_N),
          check_rank_per_sample(o.rank_max_N, o.rank_samples_per_shape, o.seed),
          check_concurrence_oracle(o.concurrence_samples, o.seed),
          check_partial_transpose(o.transpose_cases, o.seed),
          check_density_normalization(),
          check_abs_moment_identity(),
          check_deterministic_rerun(o.scratch_dir, o.seed)};
}

}  // namespace dpsim
