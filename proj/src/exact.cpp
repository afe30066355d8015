#include "opdyn/exact.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

namespace opdyn {

namespace {

void check_site_count(Eigen::Index n_sites) {
  if (n_sites < 2)
    throw std::invalid_argument("dense state: n_sites must be >= 2");
  if (n_sites > kMaxDenseSites)
    throw ResourceError("dense state: n_sites > " +
                        std::to_string(kMaxDenseSites) +
                        " exceeds the dense-evolution limit");
}

// H += coeff * op acting on `site`; site 0 is the most significant bit.
void add_one_site_term(Eigen::MatrixXcd& h, const Eigen::Matrix2cd& op,
                       Eigen::Index site, double coeff, Eigen::Index n_sites) {
  const Eigen::Index shift = n_sites - 1 - site;
  const Eigen::Index dim = h.rows();
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Eigen::Index cb = (col >> shift) & 1;
    for (Eigen::Index rb = 0; rb < 2; ++rb) {
      const Complex v = op(rb, cb);
      if (v == Complex(0)) continue;
      const Eigen::Index row =
          (col & ~(Eigen::Index(1) << shift)) | (rb << shift);
      h(row, col) += coeff * v;
    }
  }
}

// H += coeff * op4 acting on the pair (site, site+1), site the high bit of
// the pair as in kron(a_site, a_site+1).
void add_two_site_term(Eigen::MatrixXcd& h, const Eigen::Matrix4cd& op4,
                       Eigen::Index site, double coeff, Eigen::Index n_sites) {
  const Eigen::Index shift = n_sites - 2 - site;
  const Eigen::Index dim = h.rows();
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Eigen::Index cb = (col >> shift) & 3;
    for (Eigen::Index rb = 0; rb < 4; ++rb) {
      const Complex v = op4(rb, cb);
      if (v == Complex(0)) continue;
      const Eigen::Index row =
          (col & ~(Eigen::Index(3) << shift)) | (rb << shift);
      h(row, col) += coeff * v;
    }
  }
}

}  // namespace

DenseState dense_product_state(Eigen::Index n_sites,
                               const std::vector<int>& local_state) {
  check_site_count(n_sites);
  if (static_cast<Eigen::Index>(local_state.size()) != n_sites)
    throw std::invalid_argument("dense_product_state: one local state per site");
  Eigen::Index index = 0;
  for (Eigen::Index i = 0; i < n_sites; ++i) {
    const int s = local_state[i];
    if (s != 0 && s != 1)
      throw std::invalid_argument("dense_product_state: local states must be 0 or 1");
    index = (index << 1) | s;
  }
  DenseState state;
  state.n_sites = n_sites;
  state.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_sites);
  state.amplitudes(index) = 1.0;
  return state;
}

DenseState dense_polarized_state(Eigen::Index n_sites) {
  return dense_product_state(n_sites, std::vector<int>(n_sites, 0));
}

Eigen::MatrixXcd dense_hamiltonian(const ModelSpec& spec) {
  validate(spec);
  check_site_count(spec.n_sites);
  const Eigen::Index n = spec.n_sites;
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

  switch (spec.model) {
    case Model::ising: {
      const Eigen::Matrix4cd zz = kron(pauli_z(), pauli_z());
      for (Eigen::Index i = 0; i + 1 < n; ++i)
        add_two_site_term(h, zz, i, -spec.j, n);
      break;
    }
    case Model::xxz: {
      const Eigen::Matrix4cd xx = kron(pauli_x(), pauli_x());
      const Eigen::Matrix4cd yy = kron(pauli_y(), pauli_y());
      const Eigen::Matrix4cd zz = kron(pauli_z(), pauli_z());
      for (Eigen::Index i = 0; i + 1 < n; ++i) {
        add_two_site_term(h, xx, i, -spec.j, n);
        add_two_site_term(h, yy, i, -spec.j, n);
        add_two_site_term(h, zz, i, -spec.j * spec.delta_aniso, n);
      }
      break;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    add_one_site_term(h, pauli_x(), i, -spec.h, n);
  return h;
}

double dense_site_expectation(const DenseState& state, const LocalOperator& op,
                              Eigen::Index site) {
  if (site < 0 || site >= state.n_sites)
    throw std::invalid_argument("dense_site_expectation: site out of range");
  const Eigen::Index shift = state.n_sites - 1 - site;
  const Eigen::Index dim = state.amplitudes.size();

  Eigen::VectorXcd applied = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Complex amp = state.amplitudes(col);
    if (amp == Complex(0)) continue;
    const Eigen::Index cb = (col >> shift) & 1;
    for (Eigen::Index rb = 0; rb < 2; ++rb) {
      const Complex v = op.matrix(rb, cb);
      if (v == Complex(0)) continue;
      const Eigen::Index row =
          (col & ~(Eigen::Index(1) << shift)) | (rb << shift);
      applied(row) += v * amp;
    }
  }
  const double den = state.amplitudes.squaredNorm();
  if (!(den > 0))
    throw std::invalid_argument("dense_site_expectation: state has zero norm");
  return state.amplitudes.dot(applied).real() / den;
}

double dense_averaged_expectation(const DenseState& state, const LocalOperator& op) {
  double total = 0.0;
  for (Eigen::Index site = 0; site < state.n_sites; ++site)
    total += dense_site_expectation(state, op, site);
  return total / static_cast<double>(state.n_sites);
}

namespace {

void check_evolution_args(const ModelSpec& spec, const DenseState& initial,
                          double delta, Eigen::Index n_steps) {
  check_site_count(spec.n_sites);
  if (initial.n_sites != spec.n_sites ||
      initial.amplitudes.size() != (Eigen::Index(1) << spec.n_sites))
    throw std::invalid_argument("exact evolution: state/spec size mismatch");
  if (!(delta > 0))
    throw std::invalid_argument("exact evolution: delta must be > 0");
  if (n_steps < 1)
    throw std::invalid_argument("exact evolution: n_steps must be >= 1");
}

}  // namespace

DenseState exact_evolve(const ModelSpec& spec, const DenseState& initial,
                        double delta, Eigen::Index n_steps) {
  check_evolution_args(spec, initial, delta, n_steps);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_hamiltonian(spec));
  if (es.info() != Eigen::Success)
    throw NumericError("exact_evolve: eigendecomposition failed");
  const Eigen::ArrayXcd phases =
      (Complex(0, -delta * static_cast<double>(n_steps)) *
       es.eigenvalues().array().cast<Complex>())
          .exp();
  DenseState out = initial;
  out.amplitudes = es.eigenvectors() *
                   (phases * (es.eigenvectors().adjoint() * initial.amplitudes)
                                 .array())
                       .matrix();
  return out;
}

EvolveRecord exact_evolve_record(const ModelSpec& spec, const DenseState& initial,
                                 double delta, Eigen::Index n_steps,
                                 const LocalOperator& observable) {
  check_evolution_args(spec, initial, delta, n_steps);

  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXcd h = dense_hamiltonian(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw NumericError("exact_evolve_record: eigendecomposition failed");

  const Eigen::ArrayXcd phases =
      (Complex(0, -delta) * es.eigenvalues().array().cast<Complex>()).exp();

  DenseState state = initial;
  Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * initial.amplitudes;

  std::vector<double> values;
  values.reserve(n_steps + 1);
  values.push_back(dense_averaged_expectation(state, observable));
  for (Eigen::Index step = 0; step < n_steps; ++step) {
    coeffs.array() *= phases;
    state.amplitudes.noalias() = es.eigenvectors() * coeffs;
    values.push_back(dense_averaged_expectation(state, observable));
  }

  EvolveRecord record;
  record.series = uniform_series(delta, std::move(values));
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace opdyn
