#pragma once

#include <array>
#include <string>
#include <vector>

#include "opdyn/linalg.hpp"

namespace opdyn {

// Open-boundary matrix product state over spin-1/2 sites.
//
// The rank-3 site tensor A_i(left, p, right) is stored as two
// (left x right) matrices, one per physical index p in {0 = up, 1 = down}.
// Boundary bonds have dimension 1. MpsState is a value type; copies evolve
// independently and may do so on different threads, but a single instance
// must not be mutated concurrently.
struct MpsState {
  std::vector<std::array<Eigen::MatrixXcd, 2>> tensors;

  Eigen::Index n_sites() const { return static_cast<Eigen::Index>(tensors.size()); }

  // Dimension of the bond between sites `bond` and `bond`+1.
  Eigen::Index bond_dim(Eigen::Index bond) const { return tensors[bond][0].cols(); }

  // Interior bond dimensions, one entry per bond (i, i+1).
  std::vector<Eigen::Index> bond_dims() const;
  Eigen::Index max_bond_dim() const;
};

// Hermitian single-site observable.
struct LocalOperator {
  Eigen::Matrix2cd matrix;
  std::string name;
};

// Validates Hermiticity to 1e-12.
LocalOperator make_local_operator(const Eigen::Matrix2cd& matrix, std::string name);
LocalOperator sz_operator();
LocalOperator sx_operator();
LocalOperator observable_from_name(std::string_view name);  // "sz" or "sx"

// Norm-1 product state; local_state[i] in {0 = up, 1 = down}.
MpsState product_state(Eigen::Index n_sites, const std::vector<int>& local_state);

// Fully polarized (all up) product state.
MpsState polarized_state(Eigen::Index n_sites);

// sqrt(<Psi|Psi>) by full left-to-right contraction.
double norm(const MpsState& state);

// <Psi|O_site|Psi> / <Psi|Psi>. The raw contraction of a Hermitian operator
// is real up to rounding; the imaginary part is discarded.
double site_expectation(const MpsState& state, const LocalOperator& op,
                        Eigen::Index site);

// Mean of site_expectation over all sites, computed in a single
// environment sweep.
double averaged_expectation(const MpsState& state, const LocalOperator& op);

// Applies a two-site gate to (left_site, left_site+1) and truncates the new
// bond with svd_truncate(max_bond, cutoff). Singular values are absorbed
// into the right tensor (the direction of a left-to-right sweep). Returns
// the truncation weight of the SVD. Throws std::invalid_argument when the
// gate is not unitary to 1e-10.
double apply_two_site_gate(MpsState& state, const Eigen::Matrix4cd& gate,
                           Eigen::Index left_site, Eigen::Index max_bond,
                           double cutoff);

}  // namespace opdyn
