// Acceptance run: one PASS/FAIL line per criterion, indented diagnostics below.
// Exit status is 0 when every criterion was evaluated, whatever the verdicts;
// 1 only if the run itself broke. An optional argument names a copy of the report.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "dpsim/analytic.hpp"
#include "dpsim/harness.hpp"
#include "dpsim/validate.hpp"

using namespace dpsim;

namespace {

// Tolerances and budgets, pinned.
constexpr std::uint64_t kSeed = 20240601;

constexpr double kC1RatioTol = 0.10;
constexpr double kC1Slope = -0.5, kC1SlopeTol = 0.05;
constexpr std::uint64_t kC1Samples = 100000;

constexpr double kC2Slope = -2.0, kC2SlopeTol = 0.1;
constexpr double kC2PrefactorTol = 0.25;

constexpr std::uint64_t kC3Samples = 10000000;
constexpr double kC3Sigmas = 3.0;

constexpr std::uint64_t kC4Samples = 100000;
constexpr double kC4OneParticleTol = 0.15;
constexpr double kC4TwoQubitSlope = -3.5, kC4TwoQubitSlopeTol = 0.2;
constexpr double kC4ThreeQubitOneTol = 0.15;
constexpr double kC4ThreeQubitTwoTol = 0.20;

constexpr double kC5Block3SlopeTol = 0.3;
constexpr double kC5Block4SlopeTol = 0.5;

constexpr std::uint64_t kC6Samples = 1000;
constexpr double kC6BinWidth = 1e-3;
constexpr double kC6NptMin = 0.99;
constexpr double kC6NegFractionMax = 0.01;

constexpr double kC7Factor = 3.0;

const std::vector<int> kGridTwoQubit = {16, 32, 64, 128};
const std::vector<int> kGridBlock3 = {12, 16, 24, 32, 48};
const std::vector<int> kGridBlock4 = {16, 24, 32, 40};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  bool pass = true;
  double seconds = 0.0;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::FILE* g_log = nullptr;
int g_passed = 0, g_total = 0;

void emit(const std::string& line) {
  for (std::FILE* f : {stdout, g_log}) {
    if (!f) continue;
    std::fprintf(f, "%s\n", line.c_str());
    std::fflush(f);
  }
}

void report(Criterion& c) {
  c.require(c.seconds < c.budget_s, fmt("runtime %.1f s (budget %.0f s)", c.seconds, c.budget_s));
  emit(fmt("%s criterion %d: %s", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str()));
  for (const auto& n : c.notes) emit("    " + n);
  ++g_total;
  g_passed += c.pass;
}

ExperimentConfig config_for(int m, int l, const std::vector<int>& Ns, int transposed, MeasureKind measure,
                            SamplerKind sampler, std::uint64_t samples) {
  ExperimentConfig c;
  for (int N : Ns) c.grid.push_back(make_shape(N, l, m, transposed));
  c.samples = samples;
  c.master_seed = kSeed;
  c.measure = measure;
  c.sampler = sampler;
  return c;
}

// Standard error of a fraction from the per-sample indicator.
double fraction_se(double p, std::uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

void print_series(Criterion& c, const ScalingSeries& s, const std::function<double(int)>& reference,
                  const char* ref_name) {
  for (const auto& p : s.points) {
    std::string line = fmt("N=%-4d mean %.5g +- %.2g  P+ %.4f", p.N, p.mean, p.std_error, p.positive_fraction);
    if (reference) line += fmt("  %s %.5g  ratio %.4f", ref_name, reference(p.N), p.mean / reference(p.N));
    c.note(line);
  }
}

std::string decay_line(const FitResult& f) {
  return fmt("slope %.3f intercept %.3f, residuals alg %.3g exp %.3g, used %zu points", f.slope, f.intercept,
             f.algebraic_residual, f.exponential_residual, f.used_N.size());
}

// ---------------------------------------------------------------------------

void criteria_1_and_2() {
  Criterion c1{1, "two-particle Pr(C>0) follows 2 sqrt(2) / (pi sqrt(N))", 300};
  Criterion c2{2, "two-particle mean concurrence: slope -2, prefactor 16 / pi^(3/2)", 300};
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = config_for(2, 2, kGridTwoQubit, 1, MeasureKind::concurrence, SamplerKind::full_state, kC1Samples);
  const auto series = run_scaling_experiment(cfg);
  c1.seconds = c2.seconds = elapsed(t0);
  c1.note(fmt("full-state sampler, %llu samples per N", (unsigned long long)kC1Samples));

  ScalingSeries prob = series;
  for (auto& p : prob.points) {
    p.mean = p.positive_fraction;
    p.std_error = fraction_se(p.positive_fraction, p.samples);
  }
  for (const auto& p : prob.points) {
    const double est = small_l_bound(p.N, 2);
    const double ratio = p.mean / est;
    const std::string line = fmt("N=%-4d Pr(C>0) %.5f +- %.5f  estimate %.5f  ratio %.4f  quadrature %.5f", p.N,
                                 p.mean, p.std_error, est, ratio, prob_c_positive(p.N, 2));
    if (p.N >= 32)
      c1.require(std::abs(ratio - 1.0) <= kC1RatioTol, line);
    else
      c1.note(line);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < prob.points.size(); ++i) decreasing &= prob.points[i].mean < prob.points[i - 1].mean;
  c1.note(fmt("Pr(C>0) strictly decreasing along the grid: %s", decreasing ? "yes" : "no"));
  const auto fit = fit_power_law(prob);
  c1.require(std::abs(fit.slope - kC1Slope) <= kC1SlopeTol,
             fmt("fitted slope %.4f (target %.2f +- %.2f)", fit.slope, kC1Slope, kC1SlopeTol));
  report(c1);

  print_series(c2, series, [](int N) { return mean_c_estimate(N, 2).estimate_value(); }, "16/(pi^1.5 N^2)");
  const auto cfit = fit_power_law(series);
  const double prefactor = std::exp(cfit.intercept);
  const double target = 16.0 / std::pow(std::numbers::pi, 1.5);
  c2.require(std::abs(cfit.slope - kC2Slope) <= kC2SlopeTol,
             fmt("fitted slope %.4f (target %.1f +- %.1f)", cfit.slope, kC2Slope, kC2SlopeTol));
  c2.require(std::abs(prefactor / target - 1.0) <= kC2PrefactorTol,
             fmt("fitted prefactor %.4f vs %.4f (ratio %.3f, tolerance %.0f%%)", prefactor, target,
                 prefactor / target, 100 * kC2PrefactorTol));
  report(c2);
}

void criterion_3() {
  Criterion c{3, "three-particle Pr(C>0) matches quadrature and stays below the l=3 bound", 3600};
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg =
      config_for(2, 3, {8, 10, 12}, 1, MeasureKind::concurrence, SamplerKind::wishart, kC3Samples);
  const auto series = run_scaling_experiment(cfg);
  c.note(fmt("Wishart sampler, %llu samples per N", (unsigned long long)kC3Samples));
  for (const auto& p : series.points) {
    const double pr = p.positive_fraction;
    const double se = fraction_se(pr, p.samples);
    const double quad = prob_c_positive(p.N, 3);
    const double bound = small_l_bound(p.N, 3);
    c.require(std::abs(pr - quad) <= kC3Sigmas * se,
              fmt("N=%-3d MC %.6f +- %.6f  quadrature %.6f  z = %.1f", p.N, pr, se, quad, (pr - quad) / se));
    c.require(pr < bound, fmt("N=%-3d MC %.6f below small-l bound %.6f", p.N, pr, bound));
    const double averaged = prob_c_positive_a00_averaged(p.N, 3);
    c.note(fmt("N=%-3d with a00 integrated over its chi-squared law: %.6f  z = %.1f", p.N, averaged,
               (pr - averaged) / se));
  }
  c.seconds = elapsed(t0);
  report(c);
}

// Series shared by criteria 4 and 5.
struct LogNegSeries {
  ScalingSeries m2l1, m2l2, m3l1, m3l2, m3l3;
};

LogNegSeries run_log_neg_series() {
  auto run = [](int m, int l, const std::vector<int>& Ns) {
    return run_scaling_experiment(
        config_for(m, l, Ns, 1, MeasureKind::log_negativity, SamplerKind::wishart, kC4Samples));
  };
  return {run(2, 1, kGridTwoQubit), run(2, 2, kGridTwoQubit), run(3, 1, kGridBlock3), run(3, 2, kGridBlock3),
          run(3, 3, kGridBlock3)};
}

void criterion_4(const LogNegSeries& s, double seconds) {
  Criterion c{4, "log-negativity asymptotes for blocks of 2 and 3 qubits", 1200};
  c.seconds = seconds;
  c.note(fmt("Wishart sampler, %llu samples per N", (unsigned long long)kC4Samples));

  c.note("m=2 l=1 against 2/N^2");
  for (const auto& p : s.m2l1.points) {
    const double ratio = p.mean / ln_asymptote(2, 1, p.N);
    c.require(std::abs(ratio - 1.0) <= kC4OneParticleTol,
              fmt("N=%-4d %.5g +- %.2g  ratio %.4f (tolerance %.0f%%)", p.N, p.mean, p.std_error, ratio,
                  100 * kC4OneParticleTol));
  }
  c.note("m=2 l=2 slope");
  print_series(c, s.m2l2, [](int N) { return ln_asymptote(2, 2, N); }, "16 sqrt2/(pi N^3.5)");
  const auto f = fit_power_law(s.m2l2);
  c.require(std::abs(f.slope - kC4TwoQubitSlope) <= kC4TwoQubitSlopeTol,
            fmt("fitted slope %.4f (target %.1f +- %.1f)", f.slope, kC4TwoQubitSlope, kC4TwoQubitSlopeTol));

  c.note("m=3 l=1 against 4/N^2");
  for (const auto& p : s.m3l1.points) {
    const double ratio = p.mean / ln_asymptote(3, 1, p.N);
    c.require(std::abs(ratio - 1.0) <= kC4ThreeQubitOneTol,
              fmt("N=%-4d %.5g +- %.2g  ratio %.4f (tolerance %.0f%%)", p.N, p.mean, p.std_error, ratio,
                  100 * kC4ThreeQubitOneTol));
  }
  c.note("m=3 l=2 against 16/N^3");
  for (const auto& p : s.m3l2.points) {
    const double ratio = p.mean / ln_asymptote(3, 2, p.N);
    c.require(std::abs(ratio - 1.0) <= kC4ThreeQubitTwoTol,
              fmt("N=%-4d %.5g +- %.2g  ratio %.4f (tolerance %.0f%%)", p.N, p.mean, p.std_error, ratio,
                  100 * kC4ThreeQubitTwoTol));
  }
  const auto f32 = fit_power_law(s.m3l2);
  c.note(fmt("m=3 l=2 fitted law %.3g N^%.3f vs 16 N^-3", std::exp(f32.intercept), f32.slope));

  // Beyond the grid: how fast the ratios approach 1.
  const auto t0 = std::chrono::steady_clock::now();
  for (auto [m, l] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{3, 2}}) {
    const auto far = run_scaling_experiment(
        config_for(m, l, {96, 192, 384}, 1, MeasureKind::log_negativity, SamplerKind::wishart, 20000));
    std::string line = fmt("m=%d l=%d beyond the grid:", m, l);
    for (const auto& p : far.points)
      line += fmt("  N=%d ratio %.3f +- %.3f", p.N, p.mean / ln_asymptote(m, l, p.N),
                  p.std_error / ln_asymptote(m, l, p.N));
    c.note(line);
  }
  c.seconds += elapsed(t0);
  report(c);
}

void criterion_5(const LogNegSeries& s, double shared_seconds) {
  Criterion c{5, "block-3 and block-4 slopes, exponential onset", 14400};
  const auto t0 = std::chrono::steady_clock::now();

  c.note("block of 3 (2+1), default grid");
  const double table1[] = {-2.0, -3.0, -4.5};
  const ScalingSeries* b3[] = {&s.m3l1, &s.m3l2, &s.m3l3};
  for (int i = 0; i < 3; ++i) {
    const auto f = fit_power_law(*b3[i]);
    c.require(std::abs(f.slope - table1[i]) <= kC5Block3SlopeTol,
              fmt("l=%d slope %.3f (target %.1f +- %.1f)", i + 1, f.slope, table1[i], kC5Block3SlopeTol));
  }

  // Exponential side: consecutive N near onset, extra samples where Pr(E_LN > 0) is small.
  auto exp_series = [](int m, int l, int transposed, const std::vector<int>& Ns,
                       const std::map<int, std::uint64_t>& overrides) {
    auto cfg = config_for(m, l, Ns, transposed, MeasureKind::log_negativity, SamplerKind::wishart, 100000);
    cfg.samples_by_N = overrides;
    return run_scaling_experiment(cfg);
  };
  {
    const auto s34 = exp_series(3, 4, 1, {8, 9, 10, 11, 12, 13, 14}, {{13, 400000}, {14, 1000000}});
    print_series(c, s34, nullptr, "");
    const auto f = classify_decay(s34);
    c.require(f.decay == DecayClass::exponential, fmt("l=4 classified %s: %s", to_string(f.decay).c_str(),
                                                      decay_line(f).c_str()));
  }

  c.note("block of 4, partitions (2+2, 3+1), default grid");
  const double table2[4][2] = {{-2.1, -2.1}, {-2.1, -3.1}, {-4.1, -4.1}, {-5.7, -5.7}};
  for (int l = 1; l <= 4; ++l)
    for (int part = 0; part < 2; ++part) {
      const int transposed = part == 0 ? 2 : 1;
      const auto series = run_scaling_experiment(
          config_for(4, l, kGridBlock4, transposed, MeasureKind::log_negativity, SamplerKind::wishart, kC4Samples));
      const auto f = fit_power_law(series);
      c.require(std::abs(f.slope - table2[l - 1][part]) <= kC5Block4SlopeTol,
                fmt("l=%d %s slope %.3f (target %.1f +- %.1f)", l, part == 0 ? "2+2" : "3+1", f.slope,
                    table2[l - 1][part], kC5Block4SlopeTol));
    }
  for (int part = 0; part < 2; ++part) {
    const auto s45 = exp_series(4, 5, part == 0 ? 2 : 1, {10, 11, 12, 13, 14, 15, 16},
                                {{14, 300000}, {15, 1000000}, {16, 1000000}});
    print_series(c, s45, nullptr, "");
    const auto f = classify_decay(s45);
    c.require(f.decay == DecayClass::exponential, fmt("l=5 %s classified %s: %s", part == 0 ? "2+2" : "3+1",
                                                      to_string(f.decay).c_str(), decay_line(f).c_str()));
    ScalingSeries tail = s45;
    tail.points.erase(tail.points.begin(), tail.points.begin() + 3);
    const auto ft = classify_decay(tail);
    c.note(fmt("l=5 %s on N >= 13 only: %s, %s", part == 0 ? "2+2" : "3+1", to_string(ft.decay).c_str(),
               decay_line(ft).c_str()));
  }
  c.seconds = shared_seconds + elapsed(t0);
  report(c);
}

void criterion_6() {
  Criterion c{6, "density-of-states transition at N=22, m=6", 1800};
  const auto t0 = std::chrono::steady_clock::now();
  DosResult dos[3];
  for (int i = 0; i < 3; ++i) {
    auto cfg = config_for(6, 5 + i, {22}, -1, MeasureKind::dos, SamplerKind::full_state, kC6Samples);
    cfg.bin_width = kC6BinWidth;
    dos[i] = dos_experiment(cfg);
  }
  c.seconds = elapsed(t0);
  c.note(fmt("full-state sampler, %llu samples per l, partition 3+3, bin width %.0e", (unsigned long long)kC6Samples,
             kC6BinWidth));

  auto zero_counts = [](const DosResult& d, int expected) {
    std::size_t bad = 0;
    for (const auto& s : d.per_sample) bad += s.rho_zero_count != expected;
    return bad;
  };
  auto lowest_bin = [](const Histogram& h) { return h.count_below(kC6BinWidth) - h.count_below(0.0); };
  const auto nf5 = negative_fraction(dos[0]);
  const auto nf6 = negative_fraction(dos[1]);
  const auto nf7 = negative_fraction(dos[2]);

  c.require(zero_counts(dos[0], 6) == 0,
            fmt("l=5: samples without exactly 6 zero eigenvalues of rho_A: %zu of %zu", zero_counts(dos[0], 6),
                dos[0].per_sample.size()));
  c.require(nf5.npt_fraction > kC6NptMin, fmt("l=5: NPT fraction %.4f +- %.4f (> %.2f)", nf5.npt_fraction,
                                              nf5.npt_fraction_stderr, kC6NptMin));
  c.require(full_rank_condition(dos[1].shape), "l=6: rank law gives full rank 64");
  // The weight-6 block is a single chi-squared(1) eigenvalue over a total of about
  // C(22,6) degrees of freedom; it falls below the zero tolerance now and then.
  const double p_tiny = std::erf(std::sqrt(1e-12 * binomial(22, 6) / 2.0));
  c.note(fmt("l=6: samples with an eigenvalue below 1e-12: %zu (chi-squared(1) lone value predicts %.2f)",
             zero_counts(dos[1], 0), p_tiny * kC6Samples));
  const auto low6 = lowest_bin(dos[1].rho), low7 = lowest_bin(dos[2].rho);
  c.require(low6 > low7, fmt("lowest-bin mass of rho_A: l=6 %llu vs l=7 %llu", (unsigned long long)low6,
                             (unsigned long long)low7));
  c.require(nf6.npt_fraction > kC6NptMin, fmt("l=6: NPT fraction %.4f +- %.4f (> %.2f)", nf6.npt_fraction,
                                              nf6.npt_fraction_stderr, kC6NptMin));
  c.require(nf7.mean_fraction < kC6NegFractionMax,
            fmt("l=7: mean negative PT-eigenvalue fraction %.5f +- %.5f (< %.2f)", nf7.mean_fraction,
                nf7.mean_fraction_stderr, kC6NegFractionMax));
  double min7 = 1.0;
  for (const auto& s : dos[2].per_sample) min7 = std::min(min7, s.min_pt_eigenvalue);
  c.note(fmt("l=7: NPT fraction %.4f, most negative PT eigenvalue %.3g", nf7.npt_fraction, min7));
  c.note(fmt("rho_A histogram totals %llu %llu %llu (samples x 64)", (unsigned long long)dos[0].rho.total(),
             (unsigned long long)dos[1].rho.total(), (unsigned long long)dos[2].rho.total()));
  report(c);
}

void criterion_7() {
  Criterion c{7, "gamma-ratio bound values at four (N, l)", 1};
  const auto t0 = std::chrono::steady_clock::now();
  struct Quoted {
    int N, l;
    double value;
  };
  const Quoted quoted[] = {{10, 5, 2.2}, {10, 4, 1.5e-5}, {12, 5, 3.3e-15}, {14, 6, 1.6e-43}};
  for (const auto& q : quoted) {
    const auto b = prob_c_bounds(q.N, q.l);
    const bool first = std::abs(std::log(b.bound1 / q.value)) <= std::log(kC7Factor);
    const bool second = std::abs(std::log(b.bound2 / q.value)) <= std::log(kC7Factor);
    const char* which = first && second ? "both forms" : first ? "first form" : second ? "second form" : "neither form";
    c.require(first || second, fmt("N=%-3d l=%d reference %.2g: bound1 %.3g bound2 %.3g -> %s", q.N, q.l, q.value,
                                   b.bound1, b.bound2, which));
    const auto shifted = prob_c_bounds(q.N + 2, q.l);
    c.note(fmt("same formulas at N+2=%d: bound1 %.3g bound2 %.3g", q.N + 2, shifted.bound1, shifted.bound2));
  }
  c.seconds = elapsed(t0);
  report(c);
}

void criterion_8() {
  Criterion c{8, "property suites", 600};
  const auto t0 = std::chrono::steady_clock::now();
  ValidationOptions o;
  o.seed = kSeed;
  o.concurrence_samples = 10000;
  o.transpose_cases = 10000;
  o.rank_max_N = 24;
  o.rank_samples_per_shape = 2;
  o.scratch_dir = std::filesystem::temp_directory_path().string();
  for (const auto& r : run_validation(o)) c.require(r.passed, r.name + ": " + r.detail);
  c.seconds = elapsed(t0);
  report(c);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && !(g_log = std::fopen(argv[1], "w"))) {
    std::fprintf(stderr, "cannot open %s\n", argv[1]);
    return 1;
  }
  try {
    emit(fmt("acceptance run, dpsim %s, master seed %llu", kVersion, (unsigned long long)kSeed));
    criterion_7();
    criterion_8();
    criteria_1_and_2();
    const auto t0 = std::chrono::steady_clock::now();
    const auto ln = run_log_neg_series();
    const double ln_seconds = elapsed(t0);
    criterion_4(ln, ln_seconds);
    criterion_5(ln, ln_seconds);
    criterion_6();
    criterion_3();
  } catch (const std::exception& e) {
    emit(std::string("acceptance run aborted: ") + e.what());
    return 1;
  }
  emit(fmt("%d of %d criteria pass", g_passed, g_total));
  if (g_log) std::fclose(g_log);
  return 0;
}
