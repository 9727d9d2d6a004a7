#pragma once

#include "qsa/markov.hpp"
#include "qsa/qwalk.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qsa {

// Ancilla register configuration: smallest p with 2^p >= c_pea / (nu sqrt(delta)).
struct PeaConfig {
  int p = 1;
  double c_pea = 1.0;

  long register_size() const { return 1L << p; }
};

// Throws RegisterTooWide beyond p = 24.
PeaConfig choose_p(double nu, double delta, double c_pea = 1.0);

// Outcome-m amplitude of the phase estimation circuit on an eigenvector with
// eigenphase `phase` in [0, 2 pi):
//   (1/2^p) sum_{m'} exp(-i 2 pi m m' / 2^p) exp(i m' phase),
// evaluated in closed form, exact at the removable singularity
// phase = 2 pi m / 2^p (value 1).
std::complex<double> pea_amplitude(double phase, long m, int p);

// Phases of the analytic branches in [0, 2 pi): index 0 is the zero branch,
// then +2 phi_j for j = 1..d-1, then 2 pi - 2 phi_j.
Eigen::VectorXd pea_branch_phases(const KernelSpectrum& spec);

// Outcome probabilities of one PEA on an analytic state. Leaked mass behaves
// as phase pi and lands on m = 2^{p-1}.
Eigen::VectorXd pea_probabilities(const WalkBasisState& state, const KernelSpectrum& spec,
                                  const PeaConfig& config);

// Post-measurement state for outcome m, with its probability.
struct PeaCollapse {
  WalkBasisState post;
  double probability = 0.0;
};
PeaCollapse pea_collapse(const WalkBasisState& state, const KernelSpectrum& spec,
                         const PeaConfig& config, long m);

// Applies only the zero-outcome Kraus branch without renormalizing: each
// branch amplitude is scaled by its o(phase, 0, p); leaked mass is dropped
// (it cannot reach m = 0). The squared norm of the result is the branch
// probability.
WalkBasisState pea_zero_branch(const WalkBasisState& state, const KernelSpectrum& spec,
                               const PeaConfig& config);

struct PeaOutcome {
  long m = 0;
  double probability = 0.0;
  WalkBasisState post;
};
// Full outcome list; guarded to small 2^p * d.
std::vector<PeaOutcome> pea_analytic(const WalkBasisState& state, const KernelSpectrum& spec,
                                     const PeaConfig& config);

// --- dense statevector backend --------------------------------------------

// Joint register layout: flat = m * d^2 + s with m the ancilla value.
// Applies the Hadamard layer, the controlled walk powers W^{2^{i-1}}
// (ancilla qubit i, weight 2^{i-1}), and the inverse Fourier transform.
// Measurement is left to the caller. Rejects joint dimensions above 2^22.
// With apply_inverse_ft = false the final transform is skipped; tracing out
// the ancillas then yields the same system statistics.
Eigen::VectorXcd pea_dense(const Eigen::VectorXcd& joint, const WalkOperator& walk,
                           const PeaConfig& config, bool apply_inverse_ft = true);

Eigen::VectorXd ancilla_marginal(const Eigen::VectorXcd& joint, int p, int dim_sys);
Eigen::VectorXcd collapse_ancilla(const Eigen::VectorXcd& joint, int p, int dim_sys, long m);

// Quantum Fourier transform pair on a power-of-two register:
// inverse_qft[m'] = (1/sqrt(2^p)) sum_m exp(-i 2 pi m m' / 2^p) v[m].
Eigen::VectorXcd inverse_qft(const Eigen::VectorXcd& reg);
Eigen::VectorXcd qft(const Eigen::VectorXcd& reg);

}  // namespace qsa
