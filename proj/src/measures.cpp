#include "dpsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dpsim/errors.hpp"
#include "dpsim/rdm.hpp"

namespace dpsim {

namespace {

MeasureValue make_value(double v) { return {v, std::abs(v) <= kMeasureZeroTol}; }

}  // namespace

MeasureValue concurrence_structured(const Eigen::Matrix4d& rho) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j || (i == 1 && j == 2) || (i == 2 && j == 1)) continue;
      if (std::abs(rho(i, j)) > kMeasureZeroTol)
        throw StructureViolation("concurrence_structured: nonzero entry outside the block pattern");
    }
  if (std::abs(rho(1, 2) - rho(2, 1)) > kMeasureZeroTol)
    throw StructureViolation("concurrence_structured: coupling is not symmetric");
  const double c = 2.0 * (std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, rho(0, 0) * rho(3, 3))));
  return make_value(std::max(c, 0.0));
}

MeasureValue concurrence_wootters(const Eigen::Matrix4d& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-10)
    throw InvalidArgument("concurrence_wootters: trace differs from 1");
  if ((rho - rho.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("concurrence_wootters: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(rho);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw InvalidArgument("concurrence_wootters: matrix is not positive semidefinite");

  // sy x sy for real states is the antidiagonal (-1, 1, 1, -1).
  Eigen::Matrix4d flip = Eigen::Matrix4d::Zero();
  flip(0, 3) = flip(3, 0) = -1.0;
  flip(1, 2) = flip(2, 1) = 1.0;
  const Eigen::Matrix4d tilde = flip * rho * flip;

  const Eigen::Vector4d root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4d sqrt_rho = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  Eigen::Matrix4d h = sqrt_rho * tilde * sqrt_rho;
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> heig(h, Eigen::EigenvaluesOnly);
  Eigen::Vector4d lam = heig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(lam.data(), lam.data() + 4, std::greater<>());
  return make_value(std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3)));
}

LogNegativity log_negativity_from_pt_eigenvalues(const Eigen::VectorXd& pt_eigenvalues) {
  LogNegativity out;
  if (pt_eigenvalues.size() == 0) return out;
  double neg = 0.0;
  for (Eigen::Index i = 0; i < pt_eigenvalues.size(); ++i)
    if (pt_eigenvalues(i) < -kMeasureZeroTol) neg -= pt_eigenvalues(i);
  out.min_pt_eigenvalue = pt_eigenvalues.minCoeff();
  out.negativity = neg;
  out.log_negativity = std::log1p(2.0 * neg);
  return out;
}

LogNegativity log_negativity(const Eigen::MatrixXd& rho, Mask subset) {
  return log_negativity_from_pt_eigenvalues(spectrum(partial_transpose(rho, subset)).eigenvalues);
}

}  // namespace dpsim
