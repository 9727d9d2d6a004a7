#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace qsa {

// Finite energy landscape over an explicitly enumerated state space.
//
// Energies are shifted at construction so that the minimum is nonnegative;
// `shift` records the amount added to the raw input. The shift leaves every
// Boltzmann distribution unchanged and keeps 0 <= E[sigma] <= e_max, which
// the annealing bounds rely on.
struct EnergyModel {
  int d = 0;                    // number of states
  Eigen::VectorXd energies;     // E[sigma], input order, shifted
  std::vector<int> ground_set;  // indices of minimizers, ascending
  double gamma = 0.0;           // smallest excitation above the ground energy
  double e_max = 0.0;           // max_sigma |E[sigma]|
  double shift = 0.0;           // amount added to the raw input energies

  double ground_energy() const { return energies[ground_set.front()]; }
  bool is_ground(int sigma) const;
};

// Boltzmann equilibrium pi^sigma = exp(-beta E[sigma]) / Z.
struct BoltzmannDist {
  double beta = 0.0;
  Eigen::VectorXd probabilities;
  double partition = 0.0;       // exp(log_partition); may underflow for extreme beta
  double log_partition = 0.0;
};

// Throws TooSmall for d < 2, AllDegenerate when every energy is minimal.
EnergyModel build_model(const Eigen::VectorXd& energies);
EnergyModel build_model(const std::vector<double>& energies);

// Requires beta >= 0. Stabilized by subtracting the minimum energy before
// exponentiation.
BoltzmannDist boltzmann(const EnergyModel& model, double beta);

// Componentwise sqrt(pi^sigma); unit 2-norm.
Eigen::VectorXd gibbs_amplitudes(const BoltzmannDist& dist);

// Plain-text model files: first line d, then d lines of "index energy".
EnergyModel load_model(std::istream& in);
EnergyModel load_model_file(const std::string& path);
void save_model(std::ostream& out, const EnergyModel& model);

}  // namespace qsa
