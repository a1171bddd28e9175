#include "dpsim/combinat.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "dpsim/errors.hpp"

namespace dpsim {

Mask SystemShape::transposed_mask() const {
  if (partition.first <= 0 || partition.second <= 0)
    throw InvalidArgument("shape " + to_string() + " has no bipartition of the block");
  return (Mask{1} << partition.second) - 1;
}

std::string SystemShape::to_string() const {
  return "(N=" + std::to_string(N) + ", l=" + std::to_string(l) + ", m=" + std::to_string(m) +
         ", partition=" + std::to_string(partition.first) + "+" + std::to_string(partition.second) +
         ")";
}

SystemShape make_shape(int N, int l, int m, int transposed_qubits) {
  if (N < 2) throw InvalidArgument("N must be at least 2");
  if (l < 0 || l > N) throw InvalidArgument("particle number outside [0, N]");
  if (m < 1 || m >= N) throw InvalidArgument("block size must satisfy 1 <= m < N");
  if (m > kMaxBlockQubits) throw CapacityError("block size above " + std::to_string(kMaxBlockQubits));

  SystemShape s;
  s.N = N;
  s.l = (2 * l > N) ? N - l : l;
  s.m = m;
  if (m == 1) {
    if (transposed_qubits > 0) throw InvalidArgument("a single-qubit block cannot be partitioned");
    s.partition = {1, 0};
    return s;
  }
  const int second = transposed_qubits < 0 ? m / 2 : transposed_qubits;
  if (second <= 0 || second >= m)
    throw InvalidArgument("partition groups must both be nonempty");
  s.partition = {m - second, second};
  return s;
}

Count binomial(int n, int k) {
  if (n < 0) throw InvalidArgument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays exact: r is C(n - k + i - 1, i - 1).
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<Count>::max())
      throw CapacityError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                          ") exceeds 64 bits");
  }
  return static_cast<Count>(r);
}

Count weight_rank(Mask bits) {
  Count rank = 0;
  int i = 1;
  while (bits != 0) {
    const int pos = std::countr_zero(bits);
    rank += binomial(pos, i++);
    bits &= bits - 1;
  }
  return rank;
}

Mask weight_unrank(int m, int k, Count rank) {
  if (m < 0 || m > 31 || k < 0 || k > m) throw InvalidArgument("weight_unrank: bad (m, k)");
  if (rank >= binomial(m, k)) throw InvalidArgument("weight_unrank: rank out of range");
  Mask bits = 0;
  int pos = m - 1;
  for (int i = k; i >= 1; --i) {
    while (binomial(pos, i) > rank) --pos;
    bits |= Mask{1} << pos;
    rank -= binomial(pos, i);
    --pos;
  }
  return bits;
}

BlockIndex qk_dims(const SystemShape& shape, int k) {
  if (k < 0 || k > std::min(shape.l, shape.m))
    throw InvalidArgument("qk_dims: k=" + std::to_string(k) + " outside [0, min(l, m)]");
  return {k, binomial(shape.m, k), binomial(shape.N - shape.m, shape.l - k)};
}

Count rank_upper_bound(const SystemShape& shape) {
  Count total = 0;
  for (int k = 0; k <= std::min(shape.l, shape.m); ++k) {
    const auto d = qk_dims(shape, k);
    total += std::min(d.rows, d.cols);
  }
  return std::min<Count>(total, Count{1} << shape.m);
}

bool full_rank_condition(const SystemShape& shape) {
  // k > l leaves a weight class of block A empty, which is rank deficiency too.
  if (shape.l < shape.m) return false;
  for (int k = 0; k <= shape.m; ++k) {
    const auto d = qk_dims(shape, k);
    if (d.rows > d.cols) return false;
  }
  return true;
}

}  // namespace dpsim
