#include "dpsim/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace dpsim {

namespace {

Eigen::MatrixXd gram(const Eigen::MatrixXd& q) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q.rows(), q.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(q);
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

double BlockRDM::trace() const {
  double t = 0.0;
  for (const auto& g : gblocks) t += g.trace();
  return t;
}

BlockRDM build_blocks(const DefiniteParticleState& state) {
  BlockRDM out{state.shape, {}};
  out.gblocks.reserve(state.blocks.size());
  for (const auto& q : state.blocks) out.gblocks.push_back(gram(q));
  return out;
}

BlockRDM sample_block_rdm(const SystemShape& shape, SeedSpec seed) {
  BlockRDM out{shape, {}};
  if (shape.l == 0) {
    out.gblocks.push_back(Eigen::MatrixXd::Ones(1, 1));
    return out;
  }
  NormalStream stream(seed);
  const int nblocks = block_count(shape);
  out.gblocks.reserve(nblocks);
  double total = 0.0;
  for (int k = 0; k < nblocks; ++k) {
    const auto d = qk_dims(shape, k);
    const auto rows = static_cast<Eigen::Index>(d.rows);
    if (d.cols <= d.rows) {
      Eigen::MatrixXd q(rows, static_cast<Eigen::Index>(d.cols));
      stream.fill_normal(q);
      out.gblocks.push_back(gram(q));
    } else {
      Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(rows, rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) lower(i, j) = stream.normal();
        lower(i, i) = std::sqrt(stream.chi_squared(static_cast<double>(d.cols - i)));
      }
      out.gblocks.push_back(gram(lower));
    }
    total += out.gblocks.back().trace();
  }
  for (auto& g : out.gblocks) g /= total;
  return out;
}

Eigen::MatrixXd assemble_dense(const BlockRDM& blocks) {
  const int m = blocks.shape.m;
  const Eigen::Index dim = Eigen::Index{1} << m;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<Mask> basis;
  for (std::size_t k = 0; k < blocks.gblocks.size(); ++k) {
    const auto& g = blocks.gblocks[k];
    basis.resize(static_cast<std::size_t>(g.rows()));
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      basis[r] = weight_unrank(m, static_cast<int>(k), static_cast<Count>(r));
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      for (Eigen::Index r = 0; r < g.rows(); ++r) rho(basis[r], basis[c]) = g(r, c);
  }
  return rho;
}

Eigen::Index Spectrum::count_negative(double tol) const {
  return (eigenvalues.array() < -tol).count();
}

Eigen::Index Spectrum::count_zero(double tol) const {
  return (eigenvalues.array().abs() < tol).count();
}

Spectrum spectrum(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("spectrum: matrix is not square");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("spectrum: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericRangeError("spectrum: eigensolver failed");
  return {solver.eigenvalues(), matrix.trace()};
}

Spectrum block_spectrum(const BlockRDM& blocks) {
  const Eigen::Index dim = Eigen::Index{1} << blocks.shape.m;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(dim);
  Eigen::Index at = 0;
  for (const auto& g : blocks.gblocks) {
    if (g.rows() == 1) {
      values(at++) = g(0, 0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
    values.segment(at, g.rows()) = solver.eigenvalues();
    at += g.rows();
  }
  std::sort(values.data(), values.data() + dim);
  return {values, blocks.trace()};
}

void write_spectrum(std::ostream& os, const Spectrum& spec, const SystemShape& shape, Mask subset,
                    SeedSpec seed) {
  os << "# N=" << shape.N << " l=" << shape.l << " m=" << shape.m << " subset=" << subset
     << " sample_seed=" << seed.master_seed << ':' << seed.sample_index << "\n";
  os << std::scientific << std::setprecision(16);
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) os << spec.eigenvalues(i) << "\n";
  os << std::defaultfloat;
  if (!os) throw IoError("failed writing spectrum");
}

}  // namespace dpsim
