#pragma once

#include "opdyn/hamiltonians.hpp"
#include "opdyn/mps.hpp"
#include "opdyn/time_series.hpp"

namespace opdyn {

// Gates of one second-order Trotter step. Half-step gates act on the bonds
// with even left index (0, 2, 4, ...), full-step gates on the others; a
// step applies half, full, half.
struct TrotterSchedule {
  std::vector<Eigen::Matrix4cd> half_gates;  // exp(-i delta/2 H_bond)
  std::vector<Eigen::Matrix4cd> full_gates;  // exp(-i delta H_bond)
  double delta = 0.0;
  Eigen::Index n_sites = 0;
};

TrotterSchedule build_trotter_schedule(const BondTermList& terms, double delta);

// Refusal point for runaway bond growth in untruncated runs; exceeding it
// raises ResourceError naming the bond.
inline constexpr Eigen::Index kDefaultBondHardCap = 8192;

// One second-order step, gates applied left to right within each layer.
// Returns the summed truncation weight of the step.
double step_second_order(MpsState& state, const TrotterSchedule& sched,
                         Eigen::Index max_bond, double cutoff,
                         Eigen::Index bond_hard_cap = kDefaultBondHardCap);

// Evolves in place for n_steps, recording the site-averaged observable at
// t = 0 and after every step (n_steps + 1 samples).
EvolveRecord evolve_record(MpsState& state, const TrotterSchedule& sched,
                           Eigen::Index n_steps, const LocalOperator& observable,
                           Eigen::Index max_bond, double cutoff,
                           Eigen::Index bond_hard_cap = kDefaultBondHardCap);

}  // namespace opdyn
