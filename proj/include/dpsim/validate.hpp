#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dpsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t seed = 20240601;
  std::uint64_t concurrence_samples = 10000;
  std::uint64_t transpose_cases = 10000;
  int rank_max_N = 24;
  std::uint64_t rank_samples_per_shape = 2;
  std::string scratch_dir = ".";
};

/// Property checks behind the `validate` subcommand: colex ranking, rank laws,
/// structured vs general concurrence, partial-transpose algebra, density
/// normalization and byte-identical reruns.
std::vector<CheckResult> run_validation(const ValidationOptions& options);

/// Individual suites, exposed for finer-grained runs.
CheckResult check_weight_ranking();
CheckResult check_rank_law_combinatorics(int max_N);
CheckResult check_rank_per_sample(int max_N, std::uint64_t samples_per_shape, std::uint64_t seed);
CheckResult check_concurrence_oracle(std::uint64_t samples, std::uint64_t seed);
CheckResult check_partial_transpose(std::uint64_t cases, std::uint64_t seed);
CheckResult check_density_normalization();
CheckResult check_abs_moment_identity();
CheckResult check_deterministic_rerun(const std::string& scratch_dir, std::uint64_t seed);

}  // namespace dpsim
