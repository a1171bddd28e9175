#include "dpsim/ensemble.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dpsim/errors.hpp"

namespace dpsim {

NormalStream::NormalStream(SeedSpec seed)
    : engine_(splitmix64(seed.master_seed + splitmix64(seed.sample_index))) {}

double NormalStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double NormalStream::gamma(double shape) {
  if (shape < 1.0) {
    double u;
    do u = uniform(); while (u == 0.0);
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double NormalStream::chi_squared(double dof) {
  if (!(dof > 0.0)) throw InvalidArgument("chi_squared: dof must be positive");
  if (dof == 1.0) {
    const double z = normal();
    return z * z;
  }
  return 2.0 * gamma(0.5 * dof);
}

NormalStream derive_stream(SeedSpec seed) { return NormalStream(seed); }

double DefiniteParticleState::norm_squared() const {
  double s = 0.0;
  for (const auto& q : blocks) s += q.squaredNorm();
  return s;
}

DefiniteParticleState sample_state(const SystemShape& shape, SeedSpec seed,
                                   Count coefficient_budget) {
  DefiniteParticleState state{shape, seed, {}};
  if (shape.l == 0) {
    state.blocks.push_back(Eigen::MatrixXd::Ones(1, 1));
    return state;
  }
  const Count total = binomial(shape.N, shape.l);
  if (total > coefficient_budget)
    throw CapacityError("state " + shape.to_string() + " needs " + std::to_string(total) +
                        " coefficients, budget is " + std::to_string(coefficient_budget));

  NormalStream stream(seed);
  const int nblocks = block_count(shape);
  state.blocks.reserve(nblocks);
  for (int k = 0; k < nblocks; ++k) {
    const auto d = qk_dims(shape, k);
    Eigen::MatrixXd q(static_cast<Eigen::Index>(d.rows), static_cast<Eigen::Index>(d.cols));
    stream.fill_normal(q);
    state.blocks.push_back(std::move(q));
  }
  const double scale = 1.0 / std::sqrt(state.norm_squared());
  for (auto& q : state.blocks) q *= scale;
  return state;
}

void write_state(std::ostream& os, const DefiniteParticleState& state) {
  const auto& s = state.shape;
  os << "# dpsim-state v" << NormalStream::kVersion << "\n";
  os << s.N << ' ' << s.l << ' ' << s.m << ' ' << s.partition.first << ' ' << s.partition.second
     << ' ' << state.seed.master_seed << ' ' << state.seed.sample_index << "\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < state.blocks.size(); ++k) {
    const auto& q = state.blocks[k];
    os << "block " << k << ' ' << q.rows() << ' ' << q.cols() << "\n";
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < q.cols(); ++j) os << (j ? " " : "") << q(i, j);
      os << "\n";
    }
  }
  if (!os) throw IoError("failed writing state record");
}

DefiniteParticleState read_state(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# dpsim-state", 0) != 0)
    throw IoError("not a state record");
  int N, l, m, first, second;
  DefiniteParticleState state;
  if (!(is >> N >> l >> m >> first >> second >> state.seed.master_seed >> state.seed.sample_index))
    throw IoError("malformed state header");
  state.shape = make_shape(N, l, m, m > 1 ? second : -1);
  for (int k = 0; k < block_count(state.shape); ++k) {
    std::string tag;
    int kk;
    Eigen::Index rows, cols;
    if (!(is >> tag >> kk >> rows >> cols) || tag != "block" || kk != k)
      throw IoError("malformed block header for k=" + std::to_string(k));
    Eigen::MatrixXd q(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(is >> q(i, j))) throw IoError("truncated block k=" + std::to_string(k));
    state.blocks.push_back(std::move(q));
  }
  return state;
}

}  // namespace dpsim
