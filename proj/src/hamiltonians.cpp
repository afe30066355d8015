#include "opdyn/hamiltonians.hpp"

#include <cmath>

namespace opdyn {

Model model_from_string(std::string_view name) {
  if (name == "ising") return Model::ising;
  if (name == "xxz") return Model::xxz;
  throw std::invalid_argument("unknown model: " + std::string(name));
}

std::string to_string(Model model) {
  switch (model) {
    case Model::ising: return "ising";
    case Model::xxz: return "xxz";
  }
  throw std::invalid_argument("unknown model tag");
}

void validate(const ModelSpec& spec) {
  if (spec.model != Model::ising && spec.model != Model::xxz)
    throw std::invalid_argument("ModelSpec: unknown model tag");
  if (spec.n_sites < 2)
    throw std::invalid_argument("ModelSpec: n_sites must be >= 2");
  if (!std::isfinite(spec.j) || !std::isfinite(spec.h) ||
      !std::isfinite(spec.delta_aniso))
    throw std::invalid_argument("ModelSpec: parameters must be finite");
}

BondTermList build_bond_terms(const ModelSpec& spec) {
  validate(spec);

  Eigen::Matrix4cd two_body;
  switch (spec.model) {
    case Model::ising:
      two_body = -spec.j * kron(pauli_z(), pauli_z());
      break;
    case Model::xxz:
      two_body = -spec.j * (kron(pauli_x(), pauli_x()) +
                            kron(pauli_y(), pauli_y()) +
                            spec.delta_aniso * kron(pauli_z(), pauli_z()));
      break;
  }

  const Eigen::Matrix4cd field_left = kron(-spec.h * pauli_x(), identity2());
  const Eigen::Matrix4cd field_right = kron(identity2(), -spec.h * pauli_x());

  const Eigen::Index n = spec.n_sites;
  BondTermList terms;
  terms.reserve(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double wl = (i == 0) ? 1.0 : 0.5;
    const double wr = (i + 1 == n - 1) ? 1.0 : 0.5;
    terms.push_back(two_body + wl * field_left + wr * field_right);
  }
  return terms;
}

}  // namespace opdyn
