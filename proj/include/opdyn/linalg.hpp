#pragma once

#include <Eigen/Dense>
#include <complex>

#include "opdyn/errors.hpp"

namespace opdyn {

using Complex = std::complex<double>;

// Pauli matrices in the sigma convention (eigenvalues +1/-1), basis {up, down}.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd identity2();

// Kronecker product with `a` on the more significant factor.
Eigen::MatrixXcd kron(const Eigen::Ref<const Eigen::MatrixXcd>& a,
                      const Eigen::Ref<const Eigen::MatrixXcd>& b);

double max_abs(const Eigen::Ref<const Eigen::MatrixXcd>& m);
bool is_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol);
bool is_unitary(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol);

// Truncated singular value decomposition m ~= u * diag(s) * v_dag.
//
// truncation_weight is the sum of squared discarded singular values divided
// by the sum of all squared singular values, so it equals the relative
// squared Frobenius reconstruction error.
struct SvdResult {
  Eigen::MatrixXcd u;      // left isometry, one column per kept value
  Eigen::VectorXd s;       // kept singular values, descending
  Eigen::MatrixXcd v_dag;  // right isometry, one row per kept value
  double truncation_weight = 0.0;
};

// Singular values below max(s) * kSvdZeroTol are treated as numerical zeros:
// they are discarded even at cutoff = 0 and contribute nothing to
// truncation_weight, so a lossless decomposition keeps exactly the numerical
// rank of the input and reports zero weight.
inline constexpr double kSvdZeroTol = 1e-14;

// Keeps at most max_rank singular values, dropping values whose relative
// squared weight s_i^2 / sum(s^2) falls below cutoff (at least one value is
// always kept). Throws std::invalid_argument on non-finite input and
// NumericError if the decomposition fails.
SvdResult svd_truncate(const Eigen::Ref<const Eigen::MatrixXcd>& m,
                       Eigen::Index max_rank, double cutoff);

// Two-site propagator exp(-i * delta' * h_bond) with delta' = delta/2 when
// half_step, computed by Hermitian eigendecomposition so the result is
// unitary up to rounding. Throws std::invalid_argument when h_bond is not
// Hermitian to 1e-12.
Eigen::Matrix4cd gate_from_bond_term(const Eigen::Matrix4cd& h_bond,
                                     double delta, bool half_step);

}  // namespace opdyn
