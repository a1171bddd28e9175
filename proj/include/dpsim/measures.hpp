#pragma once

#include <Eigen/Dense>

#include "dpsim/combinat.hpp"

namespace dpsim {

/// Values with magnitude at or below this are reported as zero.
inline constexpr double kMeasureZeroTol = 1e-14;

struct MeasureValue {
  double value = 0.0;
  bool is_zero = true;
};

/// C = 2 max(|a12| - sqrt(a00 a33), 0) for a two-qubit matrix whose only
/// off-diagonal coupling is between |01> and |10>. Throws StructureViolation
/// otherwise.
MeasureValue concurrence_structured(const Eigen::Matrix4d& rho);

/// General two-qubit concurrence max(0, l1 - l2 - l3 - l4), l_i the decreasing
/// square roots of the eigenvalues of rho (sy x sy) rho (sy x sy). Real input.
MeasureValue concurrence_wootters(const Eigen::Matrix4d& rho);

struct LogNegativity {
  double log_negativity = 0.0;  ///< ln ||rho^T||_1, natural log
  double negativity = 0.0;      ///< (||rho^T||_1 - 1) / 2
  double min_pt_eigenvalue = 0.0;
};

/// Eigenvalues below -kMeasureZeroTol count as negative; trace norm of a unit
/// trace matrix is 1 + 2 sum |omega_i|.
LogNegativity log_negativity(const Eigen::MatrixXd& rho, Mask subset);

/// Same from an already computed spectrum of the partial transpose.
LogNegativity log_negativity_from_pt_eigenvalues(const Eigen::VectorXd& pt_eigenvalues);

}  // namespace dpsim
