#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpsim/combinat.hpp"
#include "dpsim/ensemble.hpp"
#include "dpsim/rdm.hpp"

namespace dpsim {

inline constexpr const char* kVersion = "0.1.0";

enum class MeasureKind { concurrence, log_negativity, dos };

/// full_state draws every coefficient; wishart draws the G_k blocks from their
/// exact Wishart laws (see sample_block_rdm).
enum class SamplerKind { full_state, wishart };

std::string to_string(MeasureKind kind);
std::string to_string(SamplerKind kind);
MeasureKind parse_measure(const std::string& text);
SamplerKind parse_sampler(const std::string& text);

struct ExperimentConfig {
  std::vector<SystemShape> grid;
  std::uint64_t samples = 1000;
  std::map<int, std::uint64_t> samples_by_N;  ///< per-point overrides
  std::uint64_t master_seed = 1;
  MeasureKind measure = MeasureKind::concurrence;
  SamplerKind sampler = SamplerKind::full_state;
  int workers = 1;
  double bin_width = 1e-3;  ///< dos histograms
  std::string output_path;

  std::uint64_t samples_for(int N) const;
  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

/// Seed of the sample_index-th draw at a grid point. Distinct shapes get
/// distinct streams under the same master seed.
SeedSpec point_seed(std::uint64_t master_seed, const SystemShape& shape, std::uint64_t sample_index);

/// Normalized block RDM for one sample under the chosen sampler.
BlockRDM draw_sample(const SystemShape& shape, SeedSpec seed, SamplerKind sampler);

/// Measure of one sample (concurrence or log-negativity across the shape's cut).
double evaluate_measure(const BlockRDM& blocks, MeasureKind kind);

struct ScalingPoint {
  int N = 0;
  std::uint64_t samples = 0;
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(samples)
  double positive_fraction = 0.0;
};

struct ScalingSeries {
  std::string measure;
  int l = 0;
  int m = 0;
  Partition partition;
  std::vector<ScalingPoint> points;
};

/// Reductions run in sample-index order, so results do not depend on `workers`.
ScalingSeries run_scaling_experiment(const ExperimentConfig& config);

/// Per-sample measure values in sample-index order.
std::vector<double> sample_values(const SystemShape& shape, std::uint64_t samples,
                                  std::uint64_t master_seed, MeasureKind kind, SamplerKind sampler,
                                  int workers);

enum class DecayClass { algebraic, exponential, undetermined };
std::string to_string(DecayClass c);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< sum of squared residuals of ln(mean)
  DecayClass decay = DecayClass::undetermined;
  double algebraic_residual = 0.0;
  double exponential_residual = 0.0;
  std::vector<int> used_N;
  std::vector<int> excluded_N;  ///< nonpositive or noise-dominated means
};

/// Least squares of ln(mean) on ln(N). Points with mean <= 0 or
/// stderr > mean / 2 are excluded; fewer than 4 remaining throws
/// InsufficientData.
FitResult fit_power_law(const ScalingSeries& series);

/// Compares ln(mean) vs ln(N) against ln(mean) vs N. The lower residual wins;
/// a relative margin under 5% is undetermined. Slope and intercept are those
/// of the winning model (the algebraic one when undetermined).
FitResult classify_decay(const ScalingSeries& series);

/// Counts on bins [origin + i*width, origin + (i+1)*width), origin a multiple
/// of width.
struct Histogram {
  double width = 0.0;
  std::int64_t first_bin = 0;
  std::vector<std::uint64_t> counts;

  double bin_center(std::size_t i) const;
  std::uint64_t total() const;
  /// Count of values strictly below `edge`.
  std::uint64_t count_below(double edge) const;
};

struct DosSample {
  double min_pt_eigenvalue = 0.0;
  int rho_zero_count = 0;     ///< |lambda(rho_A)| < 1e-12
  int pt_negative_count = 0;  ///< lambda(rho_A^T) < -1e-12
};

struct DosResult {
  SystemShape shape;
  std::uint64_t samples = 0;
  Histogram rho;
  Histogram pt;
  std::vector<DosSample> per_sample;
};

/// Pooled spectra of rho_A and its partial transpose over one shape.
DosResult dos_experiment(const ExperimentConfig& config);

struct NegativeFraction {
  double mean_fraction = 0.0;
  double mean_fraction_stderr = 0.0;
  double npt_fraction = 0.0;  ///< samples with at least one negative PT eigenvalue
  double npt_fraction_stderr = 0.0;
};

NegativeFraction negative_fraction(const DosResult& dos);

/// "# key=value" lines echoing the config, version and seed.
std::vector<std::pair<std::string, std::string>> config_metadata(const ExperimentConfig& config);

/// CSV with header N,mean,stderr,positive_fraction after the metadata lines.
void write_results(const ScalingSeries& series, const ExperimentConfig& config, const std::string& path);
/// Writes <stem>_rho.csv, <stem>_pt.csv (bin_center,count) and
/// <stem>_samples.csv (per-sample statistics).
void write_results(const DosResult& dos, const ExperimentConfig& config, const std::string& stem);

ScalingSeries read_series(const std::string& path);
Histogram read_histogram(const std::string& path);

/// Plain key=value lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Builds a config from keys N (comma list), l, m, partition ("a+b"), samples,
/// samples_by_N ("N:count,..."), seed, measure, sampler, workers, bin_width, out.
ExperimentConfig build_config(const std::map<std::string, std::string>& kv);

}  // namespace dpsim
