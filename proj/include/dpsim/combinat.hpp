#pragma once

#include <cstdint>
#include <string>

namespace dpsim {

using Count = std::uint64_t;
using Mask = std::uint32_t;

/// Largest block supported by dense assembly (2^12 basis states).
inline constexpr int kMaxBlockQubits = 12;

/// Split of the m block qubits into two groups. Qubit j of the block is bit
/// (m - 1 - j) of a basis index, so the second group is the low `second` bits.
struct Partition {
  int first = 0;
  int second = 0;

  bool operator==(const Partition&) const = default;
};

/// Geometry of an experiment: N qubits, l particles, block of m qubits and the
/// cut used for partial transposition.
struct SystemShape {
  int N = 0;
  int l = 0;
  int m = 0;
  Partition partition;

  /// Bitmask over the block basis selecting the second group of the partition.
  Mask transposed_mask() const;
  std::string to_string() const;

  friend bool operator==(const SystemShape&, const SystemShape&) = default;
};

/// Validates and canonicalizes (l -> N - l when l > N/2). A negative
/// `transposed_qubits` selects the default cut with floor(m/2) qubits in the
/// transposed group.
SystemShape make_shape(int N, int l, int m, int transposed_qubits = -1);

/// Particles k inside block A and the dimensions of Q_k.
struct BlockIndex {
  int k = 0;
  Count rows = 0;
  Count cols = 0;
};

/// Exact C(n, k); 0 outside 0 <= k <= n. Throws CapacityError beyond 64 bits.
Count binomial(int n, int k);

/// Colexicographic rank of a fixed-weight bitstring among strings of equal
/// popcount.
Count weight_rank(Mask bits);

/// Inverse of weight_rank for m-bit strings with k set bits.
Mask weight_unrank(int m, int k, Count rank);

BlockIndex qk_dims(const SystemShape& shape, int k);

/// Number of Q_k blocks, min(l, m) + 1.
inline int block_count(const SystemShape& shape) {
  return (shape.l < shape.m ? shape.l : shape.m) + 1;
}

/// Upper bound on rank(rho_A), capped at 2^m.
Count rank_upper_bound(const SystemShape& shape);

/// True iff every G_k is generically full rank: C(m,k) <= C(N-m, l-k) for all k.
bool full_rank_condition(const SystemShape& shape);

}  // namespace dpsim
