#pragma once

#include "opdyn/hamiltonians.hpp"
#include "opdyn/mps.hpp"
#include "opdyn/time_series.hpp"

namespace opdyn {

// Dense state-vector evolution for small chains: the ground truth the MPS
// path is validated against, and the exact-diagonalization timing baseline.

inline constexpr Eigen::Index kMaxDenseSites = 14;

// 2^N amplitudes, basis-ordered with site 0 on the most significant bit.
struct DenseState {
  Eigen::Index n_sites = 0;
  Eigen::VectorXcd amplitudes;
};

DenseState dense_product_state(Eigen::Index n_sites,
                               const std::vector<int>& local_state);
DenseState dense_polarized_state(Eigen::Index n_sites);

// Full 2^N x 2^N Hamiltonian assembled directly from the model's one- and
// two-site terms (an independent construction from the bond-term route).
// Throws ResourceError for n_sites > kMaxDenseSites.
Eigen::MatrixXcd dense_hamiltonian(const ModelSpec& spec);

double dense_site_expectation(const DenseState& state, const LocalOperator& op,
                              Eigen::Index site);
double dense_averaged_expectation(const DenseState& state, const LocalOperator& op);

// Advances a state by n_steps applications of exp(-i delta H).
DenseState exact_evolve(const ModelSpec& spec, const DenseState& initial,
                        double delta, Eigen::Index n_steps);

// Evolves with the exact step propagator exp(-i delta H): the Hamiltonian is
// eigendecomposed once and each step advances the eigenbasis phases, so the
// recorded series carries no Trotter error. Records the site-averaged
// observable at t = 0 and after each of the n_steps steps.
EvolveRecord exact_evolve_record(const ModelSpec& spec, const DenseState& initial,
                                 double delta, Eigen::Index n_steps,
                                 const LocalOperator& observable);

}  // namespace opdyn
