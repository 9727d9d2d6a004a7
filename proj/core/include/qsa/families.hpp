#pragma once

#include "qsa/classical_sa.hpp"
#include "qsa/energy_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace qsa {

// Instance families with a tunable kernel gap.
//   two_level       d = 2, gap tuned directly through the laziness grid
//   barrier_chain   d-state ring, two wells separated by a barrier of height b
//   random_energies i.i.d. uniform energies, complete-graph proposal
//   ising_ring      N-spin ferromagnetic ring, single-spin-flip proposal
enum class Family { two_level, barrier_chain, random_energies, ising_ring };

Family family_from_string(const std::string& name);  // throws UnknownFamily
std::string to_string(Family family);

// Symmetric, zero-diagonal, column-stochastic proposal generators.
Eigen::MatrixXd ring_proposal(int d);
Eigen::MatrixXd complete_proposal(int d);
Eigen::MatrixXd spin_flip_proposal(int n_spins);

struct Instance {
  std::string id;
  Family family = Family::two_level;
  double parameter = 0.0;  // grid value the instance was built from
  EnergyModel model;
  Eigen::MatrixXd proposal;
  double laziness = 0.5;

  KernelBuilder builder() const;
};

struct FamilyOptions {
  int d = 16;               // state count (two_level fixes d = 2)
  int spins = 3;            // ising_ring: d = 2^spins
  double laziness = 0.5;    // all families except two_level, which sweeps it
  double barrier_cap = 1.5; // barrier_chain: fixed pinnacle height above the wells
  std::uint64_t seed = 1;   // random_energies
};

std::vector<Instance> gap_family(Family family, const std::vector<double>& parameter_grid,
                                 const FamilyOptions& options = {});

// Gap figure attached to an instance: smallest kernel gap over a uniform
// beta grid on (0, beta_f], beta_f = gamma^-1 ln(2 d / epsilon^2).
double instance_gap(const Instance& inst, double epsilon, int grid_points = 256);

}  // namespace qsa
