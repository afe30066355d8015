#include "opdyn/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

namespace opdyn {

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

Eigen::MatrixXcd kron(const Eigen::Ref<const Eigen::MatrixXcd>& a,
                      const Eigen::Ref<const Eigen::MatrixXcd>& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const Eigen::Ref<const Eigen::MatrixXcd>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Eigen::MatrixXcd g = m.adjoint() * m;
  g.diagonal().array() -= 1.0;
  return max_abs(g) <= tol;
}

SvdResult svd_truncate(const Eigen::Ref<const Eigen::MatrixXcd>& m,
                       Eigen::Index max_rank, double cutoff) {
  if (m.size() == 0) throw std::invalid_argument("svd_truncate: empty matrix");
  if (!m.allFinite())
    throw std::invalid_argument("svd_truncate: non-finite entries");
  if (max_rank < 1)
    throw std::invalid_argument("svd_truncate: max_rank must be >= 1");
  if (cutoff < 0)
    throw std::invalid_argument("svd_truncate: cutoff must be >= 0");

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericError("svd_truncate: SVD did not converge");

  const Eigen::VectorXd& sv = svd.singularValues();  // sorted descending
  const double total = sv.squaredNorm();
  const double zero_floor = sv(0) * kSvdZeroTol;

  Eigen::Index keep = std::min<Eigen::Index>(max_rank, sv.size());
  while (keep > 1) {
    const double s = sv(keep - 1);
    const double rel = total > 0 ? s * s / total : 0.0;
    if (s <= zero_floor || rel < cutoff)
      --keep;
    else
      break;
  }

  SvdResult out;
  out.u = svd.matrixU().leftCols(keep);
  out.s = sv.head(keep);
  out.v_dag = svd.matrixV().leftCols(keep).adjoint();
  // numerical zeros are rank cleanup, not truncation; they carry no weight
  double discarded = 0.0;
  for (Eigen::Index i = keep; i < sv.size(); ++i)
    if (sv(i) > zero_floor) discarded += sv(i) * sv(i);
  out.truncation_weight = total > 0 ? discarded / total : 0.0;
  return out;
}

Eigen::Matrix4cd gate_from_bond_term(const Eigen::Matrix4cd& h_bond,
                                     double delta, bool half_step) {
  if (!h_bond.allFinite())
    throw std::invalid_argument("gate_from_bond_term: non-finite entries");
  if (!is_hermitian(h_bond, 1e-12))
    throw std::invalid_argument("gate_from_bond_term: bond term is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h_bond);
  if (es.info() != Eigen::Success)
    throw NumericError("gate_from_bond_term: eigendecomposition failed");

  const double dt = half_step ? 0.5 * delta : delta;
  const Eigen::Vector4cd phases =
      (Complex(0, -dt) * es.eigenvalues().array().cast<Complex>()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace opdyn
