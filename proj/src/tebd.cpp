#include "opdyn/tebd.hpp"

#include <algorithm>
#include <chrono>

namespace opdyn {

TrotterSchedule build_trotter_schedule(const BondTermList& terms, double delta) {
  if (terms.empty())
    throw std::invalid_argument("build_trotter_schedule: no bond terms");
  if (!(delta > 0))
    throw std::invalid_argument("build_trotter_schedule: delta must be > 0");

  TrotterSchedule sched;
  sched.delta = delta;
  sched.n_sites = static_cast<Eigen::Index>(terms.size()) + 1;
  for (std::size_t bond = 0; bond < terms.size(); ++bond) {
    if (bond % 2 == 0)
      sched.half_gates.push_back(gate_from_bond_term(terms[bond], delta, true));
    else
      sched.full_gates.push_back(gate_from_bond_term(terms[bond], delta, false));
  }
  return sched;
}

namespace {

double apply_layer(MpsState& state, const std::vector<Eigen::Matrix4cd>& gates,
                   Eigen::Index first_bond, Eigen::Index max_bond, double cutoff,
                   Eigen::Index hard_cap) {
  double weight = 0.0;
  Eigen::Index bond = first_bond;
  for (const auto& gate : gates) {
    const Eigen::Index grown = std::min({2 * state.tensors[bond][0].rows(),
                                         2 * state.tensors[bond + 1][0].cols(),
                                         max_bond});
    if (grown > hard_cap)
      throw ResourceError("step_second_order: bond " + std::to_string(bond) +
                          " would exceed the hard cap of " +
                          std::to_string(hard_cap));
    weight += apply_two_site_gate(state, gate, bond, max_bond, cutoff);
    bond += 2;
  }
  return weight;
}

}  // namespace

double step_second_order(MpsState& state, const TrotterSchedule& sched,
                         Eigen::Index max_bond, double cutoff,
                         Eigen::Index bond_hard_cap) {
  if (state.n_sites() != sched.n_sites)
    throw std::invalid_argument("step_second_order: state/schedule size mismatch");
  double weight = 0.0;
  weight += apply_layer(state, sched.half_gates, 0, max_bond, cutoff, bond_hard_cap);
  weight += apply_layer(state, sched.full_gates, 1, max_bond, cutoff, bond_hard_cap);
  weight += apply_layer(state, sched.half_gates, 0, max_bond, cutoff, bond_hard_cap);
  return weight;
}

EvolveRecord evolve_record(MpsState& state, const TrotterSchedule& sched,
                           Eigen::Index n_steps, const LocalOperator& observable,
                           Eigen::Index max_bond, double cutoff,
                           Eigen::Index bond_hard_cap) {
  if (n_steps < 1)
    throw std::invalid_argument("evolve_record: n_steps must be >= 1");

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> values;
  values.reserve(n_steps + 1);
  values.push_back(averaged_expectation(state, observable));

  EvolveRecord record;
  for (Eigen::Index step = 0; step < n_steps; ++step) {
    record.truncation_weight +=
        step_second_order(state, sched, max_bond, cutoff, bond_hard_cap);
    values.push_back(averaged_expectation(state, observable));
  }
  record.series = uniform_series(sched.delta, std::move(values));
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace opdyn
