#include "opdyn/mps.hpp"

#include <algorithm>
#include <cmath>

namespace opdyn {

namespace {

// Left transfer: L'(a,b) = sum_p A[p]^dag L A[p], bra index first.
Eigen::MatrixXcd transfer_left(const Eigen::MatrixXcd& left,
                               const std::array<Eigen::MatrixXcd, 2>& site) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(site[0].cols(), site[0].cols());
  for (int p = 0; p < 2; ++p)
    out.noalias() += site[p].adjoint() * left * site[p];
  return out;
}

// Left transfer with an operator insertion; <q|op|p> weights bra leg q and
// ket leg p.
Eigen::MatrixXcd transfer_left_op(const Eigen::MatrixXcd& left,
                                  const std::array<Eigen::MatrixXcd, 2>& site,
                                  const Eigen::Matrix2cd& op) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(site[0].cols(), site[0].cols());
  for (int q = 0; q < 2; ++q)
    for (int p = 0; p < 2; ++p) {
      if (op(q, p) == Complex(0)) continue;
      out.noalias() += op(q, p) * (site[q].adjoint() * left * site[p]);
    }
  return out;
}

// Right transfer: R'(a,b) = sum_p conj(A[p]) R A[p]^T, bra index first.
Eigen::MatrixXcd transfer_right(const Eigen::MatrixXcd& right,
                                const std::array<Eigen::MatrixXcd, 2>& site) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(site[0].rows(), site[0].rows());
  for (int p = 0; p < 2; ++p)
    out.noalias() += site[p].conjugate() * right * site[p].transpose();
  return out;
}

Eigen::MatrixXcd scalar_env() {
  return Eigen::MatrixXcd::Ones(1, 1);
}

}  // namespace

std::vector<Eigen::Index> MpsState::bond_dims() const {
  std::vector<Eigen::Index> dims;
  for (Eigen::Index i = 0; i + 1 < n_sites(); ++i) dims.push_back(bond_dim(i));
  return dims;
}

Eigen::Index MpsState::max_bond_dim() const {
  Eigen::Index best = 1;
  for (Eigen::Index i = 0; i + 1 < n_sites(); ++i)
    best = std::max(best, bond_dim(i));
  return best;
}

LocalOperator make_local_operator(const Eigen::Matrix2cd& matrix,
                                  std::string name) {
  if (!is_hermitian(matrix, 1e-12))
    throw std::invalid_argument("LocalOperator: matrix is not Hermitian");
  return LocalOperator{matrix, std::move(name)};
}

LocalOperator sz_operator() { return make_local_operator(pauli_z(), "sz"); }
LocalOperator sx_operator() { return make_local_operator(pauli_x(), "sx"); }

LocalOperator observable_from_name(std::string_view name) {
  if (name == "sz") return sz_operator();
  if (name == "sx") return sx_operator();
  throw std::invalid_argument("unknown observable: " + std::string(name));
}

MpsState product_state(Eigen::Index n_sites, const std::vector<int>& local_state) {
  if (n_sites < 2)
    throw std::invalid_argument("product_state: n_sites must be >= 2");
  if (static_cast<Eigen::Index>(local_state.size()) != n_sites)
    throw std::invalid_argument("product_state: one local state per site required");

  MpsState state;
  state.tensors.resize(n_sites);
  for (Eigen::Index i = 0; i < n_sites; ++i) {
    const int s = local_state[i];
    if (s != 0 && s != 1)
      throw std::invalid_argument("product_state: local states must be 0 or 1");
    state.tensors[i][s] = Eigen::MatrixXcd::Ones(1, 1);
    state.tensors[i][1 - s] = Eigen::MatrixXcd::Zero(1, 1);
  }
  return state;
}

MpsState polarized_state(Eigen::Index n_sites) {
  return product_state(n_sites, std::vector<int>(n_sites, 0));
}

double norm(const MpsState& state) {
  Eigen::MatrixXcd env = scalar_env();
  for (const auto& site : state.tensors) env = transfer_left(env, site);
  return std::sqrt(std::max(0.0, env(0, 0).real()));
}

double site_expectation(const MpsState& state, const LocalOperator& op,
                        Eigen::Index site) {
  const Eigen::Index n = state.n_sites();
  if (site < 0 || site >= n)
    throw std::invalid_argument("site_expectation: site out of range");

  Eigen::MatrixXcd env = scalar_env();
  Eigen::MatrixXcd env_op;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == site) {
      env_op = transfer_left_op(env, state.tensors[i], op.matrix);
    } else if (i > site) {
      env_op = transfer_left(env_op, state.tensors[i]);
    }
    env = transfer_left(env, state.tensors[i]);
  }
  const double den = env(0, 0).real();
  if (!(den > 0))
    throw std::invalid_argument("site_expectation: state has zero norm");
  return env_op(0, 0).real() / den;
}

double averaged_expectation(const MpsState& state, const LocalOperator& op) {
  const Eigen::Index n = state.n_sites();

  std::vector<Eigen::MatrixXcd> renv(n);
  renv[n - 1] = scalar_env();
  for (Eigen::Index i = n - 2; i >= 0; --i)
    renv[i] = transfer_right(renv[i + 1], state.tensors[i + 1]);

  Eigen::MatrixXcd env = scalar_env();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXcd mid = transfer_left_op(env, state.tensors[i], op.matrix);
    total += (mid.array() * renv[i].array()).sum().real();
    env = transfer_left(env, state.tensors[i]);
  }
  const double den = env(0, 0).real();
  if (!(den > 0))
    throw std::invalid_argument("averaged_expectation: state has zero norm");
  return total / (den * static_cast<double>(n));
}

double apply_two_site_gate(MpsState& state, const Eigen::Matrix4cd& gate,
                           Eigen::Index left_site, Eigen::Index max_bond,
                           double cutoff) {
  const Eigen::Index n = state.n_sites();
  if (left_site < 0 || left_site + 1 >= n)
    throw std::invalid_argument("apply_two_site_gate: bond out of range");
  if (max_bond < 1)
    throw std::invalid_argument("apply_two_site_gate: max_bond must be >= 1");
  if (!is_unitary(gate, 1e-10))
    throw std::invalid_argument("apply_two_site_gate: gate is not unitary");

  auto& a = state.tensors[left_site];
  auto& b = state.tensors[left_site + 1];
  const Eigen::Index dl = a[0].rows();
  const Eigen::Index dr = b[0].cols();

  // theta[p1][p2] = A[p1] * B[p2]
  Eigen::MatrixXcd theta[2][2];
  for (int p1 = 0; p1 < 2; ++p1)
    for (int p2 = 0; p2 < 2; ++p2)
      theta[p1][p2].noalias() = a[p1] * b[p2];

  // Gate mixes the physical pair; fuse to ((q1, left) x (q2, right)).
  Eigen::MatrixXcd fused(2 * dl, 2 * dr);
  for (int q1 = 0; q1 < 2; ++q1)
    for (int q2 = 0; q2 < 2; ++q2) {
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(dl, dr);
      for (int p1 = 0; p1 < 2; ++p1)
        for (int p2 = 0; p2 < 2; ++p2) {
          const Complex g = gate(2 * q1 + q2, 2 * p1 + p2);
          if (g != Complex(0)) block.noalias() += g * theta[p1][p2];
        }
      fused.block(q1 * dl, q2 * dr, dl, dr) = block;
    }

  const SvdResult svd = svd_truncate(fused, max_bond, cutoff);
  const Eigen::MatrixXcd sv = svd.s.asDiagonal() * svd.v_dag;
  for (int q = 0; q < 2; ++q) {
    a[q] = svd.u.middleRows(q * dl, dl);
    b[q] = sv.middleCols(q * dr, dr);
  }
  return svd.truncation_weight;
}

}  // namespace opdyn
