#pragma once

#include <optional>

#include "dpsim/combinat.hpp"

namespace dpsim {

/// Parameters of the two-qubit (m = 2) statistics for l particles among N qubits.
/// mu[i] = C(N-2, l-i) counts the coefficients feeding a00, a12 and a33.
struct TwoQubitParams {
  int N = 0;
  int l = 0;
  double mu0 = 0, mu1 = 0, mu2 = 0;
  double total = 0;     ///< C(N, l)
  double nu = 0;        ///< (mu1 - 1) / 2
  double a00_mean = 0;  ///< mu0 / C(N, l)
  double gamma = 0;     ///< 2 <a00> C(N, l)
  double log_beta = 0;  ///< ln[2^(1-nu) / (sqrt(pi) Gamma(mu1/2) Gamma(mu2/2))]
  double eta = 0;       ///< 1 + (mu2 - 2) / (2 mu1)
  double eta_prime = 0; ///< 1 + (mu2 - 1) / (2 mu1)
};

/// Requires l >= 2 and N >= 2l.
TwoQubitParams make_two_qubit_params(int N, int l);

/// ln K_nu(z) for nu >= 0, z > 0, from K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt
/// evaluated around its peak, so it stays finite where K_nu itself overflows.
double log_bessel_k(double nu, double z);

/// Density of |a12| at x >= 0.
double p12_density(double x, const TwoQubitParams& p);
double log_p12_density(double x, const TwoQubitParams& p);

/// Density of sqrt(a33) at y >= 0.
double p33_density(double y, const TwoQubitParams& p);
double log_p33_density(double y, const TwoQubitParams& p);

/// Pr(C > 0) with a00 frozen at its mean: the double integral over (t, y) with
/// the incomplete gamma Gamma(nu + 1, sqrt(gamma y) cosh t). Relative error
/// target 1e-6; throws AccuracyFailure if the estimate is worse.
double prob_c_positive(int N, int l);

/// Same integral with a00 integrated over its own chi-squared law instead of
/// frozen at the mean. Removes the only approximation for unnormalized states.
double prob_c_positive_a00_averaged(int N, int l);

struct ProbBounds {
  double bound1 = 0, bound2 = 0;
  double log_bound1 = 0, log_bound2 = 0;
};

/// The gamma-ratio bound and its relaxation. Values above 1 are trivial but valid.
ProbBounds prob_c_bounds(int N, int l);

/// l = 2: 2 sqrt(2) / (pi sqrt(N)); l = 3: sqrt(2 / (pi N)) exp(-(N/2) ln(N/3)).
double small_l_bound(int N, int l);

struct MeanConcurrenceEstimate {
  std::optional<double> estimate;  ///< 16 / (pi^(3/2) N^2), l = 2 only
  double bound1 = 0, bound2 = 0;

  /// Throws NotApplicable when the estimate does not exist for this l.
  double estimate_value() const;
};

MeanConcurrenceEstimate mean_c_estimate(int N, int l);

/// Large-N mean log-negativity for (m, l) in {(2,1), (2,2), (3,1), (3,2)}.
double ln_asymptote(int m, int l, int N);

enum class DosKind { marcenko_pastur, lone };

/// Marcenko-Pastur support for a d_A x d_A block fed by d_B columns, and the
/// chi-squared law of a lone eigenvalue (x = lambda * total).
struct DosModelParams {
  double d_a = 0, d_b = 0;
  double ratio = 0;  ///< Q = d_B / d_A
  double lambda_min = 0, lambda_max = 0;
  double dof = 0;
  double total = 0;
};

DosModelParams make_mp_params(double d_a, double d_b);

enum class LoneBlock { first, last };

/// Lone eigenvalue of G_0 (dof C(N-m, l)) or of the last nonzero block G_r
/// (dof C(N-m, l-m) when l >= m, C(m, l) when l < m).
DosModelParams make_lone_params(const SystemShape& shape, LoneBlock which);

/// Density in lambda. Marcenko-Pastur integrates to 1 over its support; the
/// lone density is the chi-squared density of x scaled by dx/dlambda. Zero
/// outside the support.
double dos_model_density(double lambda, const DosModelParams& params, DosKind kind);

/// -p ln p - (1 - p) ln(1 - p), 0 at the endpoints.
double binary_entropy(double p);

}  // namespace dpsim
