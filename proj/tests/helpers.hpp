#pragma once

#include "qsa/energy_model.hpp"
#include "qsa/families.hpp"
#include "qsa/markov.hpp"
#include "qsa/rng.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace qsa::test {

inline EnergyModel random_model(std::mt19937_64& gen, int d) {
  std::vector<double> energies(d);
  for (double& e : energies) e = uniform01(gen);
  return build_model(energies);
}

// Random symmetric zero-diagonal stochastic proposal: a mixture of the ring
// and the complete graph.
inline Eigen::MatrixXd random_proposal(std::mt19937_64& gen, int d) {
  if (d == 2) return ring_proposal(2);
  const double alpha = uniform01(gen);
  return alpha * ring_proposal(d) + (1.0 - alpha) * complete_proposal(d);
}

struct RandomKernel {
  EnergyModel model;
  double beta = 0.0;
  TransitionKernel kernel;
  SymmetricKernel sym;
  KernelSpectrum spec;
};

inline RandomKernel random_reversible_kernel(std::mt19937_64& gen, int d_max,
                                             double laziness = 0.5, int d_min = 2) {
  RandomKernel rk;
  const int d = d_min + static_cast<int>(uniform01(gen) * (d_max - d_min + 1));
  rk.model = random_model(gen, std::min(d, d_max));
  rk.beta = uniform_in(gen, 0.0, 3.0);
  rk.kernel = metropolis_kernel(rk.model, rk.beta, random_proposal(gen, rk.model.d), laziness);
  rk.sym = symmetrize(rk.kernel, rk.model);
  rk.spec = kernel_spectrum(rk.sym);
  return rk;
}

// Random complex unit vector supported on the |sigma, marker> block.
inline Eigen::VectorXcd random_marker_block_state(std::mt19937_64& gen, int d) {
  Eigen::VectorXcd amp(d);
  for (int s = 0; s < d; ++s)
    amp[s] = std::complex<double>(uniform01(gen) - 0.5, uniform01(gen) - 0.5);
  amp /= amp.norm();
  return amp;
}

}  // namespace qsa::test
