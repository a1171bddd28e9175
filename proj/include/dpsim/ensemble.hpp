#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "dpsim/combinat.hpp"

namespace dpsim {

/// Identifies one Monte Carlo sample. Streams depend only on this pair, never on
/// which worker draws the sample or in what order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
};

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic source of uniform, normal and chi-squared variates.
///
/// Engine: std::mt19937_64 seeded with the single word
/// splitmix64(master_seed + splitmix64(sample_index)), so distinct indices
/// under one master never share a seed. The engine and its integer seeding
/// are fully specified by the C++ standard. Uniforms take the top 53 bits of
/// one engine draw. Normals use the Marsaglia polar method (exact, pairs
/// cached). Chi-squared uses Marsaglia-Tsang gamma sampling. The transform is
/// frozen as stream version 2.
class NormalStream {
 public:
  static constexpr int kVersion = 2;

  explicit NormalStream(SeedSpec seed);

  std::uint64_t raw() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();
  /// Chi-squared variate with `dof` > 0 degrees of freedom.
  double chi_squared(double dof);

  template <typename Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) {
    // Row-major draw order, independent of Eigen storage order.
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = normal();
  }

 private:
  double gamma(double shape);

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

NormalStream derive_stream(SeedSpec seed);

/// Pure definite-particle state grouped by particles inside block A. blocks[k]
/// is Q_k with C(m,k) rows (block-A strings in colex order) and C(N-m, l-k)
/// columns (block-B strings in colex order).
struct DefiniteParticleState {
  SystemShape shape;
  SeedSpec seed;
  std::vector<Eigen::MatrixXd> blocks;

  double norm_squared() const;
};

/// Default ceiling on C(N, l) coefficients drawn for a single state.
inline constexpr Count kDefaultCoefficientBudget = Count{1} << 26;

/// Draws all C(N, l) coefficients i.i.d. N(0, 1) in k-major, row-major order
/// and rescales them to unit norm. l = 0 yields the vacuum Q_0 = [1].
DefiniteParticleState sample_state(const SystemShape& shape, SeedSpec seed,
                                   Count coefficient_budget = kDefaultCoefficientBudget);

/// Text record: header, shape/seed line, then each block as "block k rows cols"
/// followed by its entries row-major at 17 significant digits.
void write_state(std::ostream& os, const DefiniteParticleState& state);
DefiniteParticleState read_state(std::istream& is);

}  // namespace dpsim
