#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "opdyn/linalg.hpp"

namespace opdyn {

enum class Model { ising, xxz };

Model model_from_string(std::string_view name);
std::string to_string(Model model);

// Spin-chain model parameters. Spin operators are Pauli matrices
// (eigenvalues +1/-1), which puts the Ising critical point at j = h.
struct ModelSpec {
  Model model = Model::ising;
  Eigen::Index n_sites = 2;
  double j = 1.0;           // exchange coupling
  double h = 0.0;           // transverse field
  double delta_aniso = 0.0; // XXZ uniaxial anisotropy, ignored for ising
};

void validate(const ModelSpec& spec);

// One 4x4 Hermitian term per bond (i, i+1), i = 0 .. n_sites-2.
using BondTermList = std::vector<Eigen::Matrix4cd>;

// Bond terms with the single-site field absorbed into the bonds: interior
// sites contribute half their field to each adjacent bond, boundary sites
// put the full field on their only bond. The embedded terms sum to the
// dense Hamiltonian.
BondTermList build_bond_terms(const ModelSpec& spec);

}  // namespace opdyn
