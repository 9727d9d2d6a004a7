#pragma once

#include "qsa/energy_model.hpp"

#include <Eigen/Dense>

namespace qsa {

// Column-stochastic transition kernel: matrix(r, c) is the probability of
// moving c -> r, so distributions evolve as mu' = matrix * mu.
struct TransitionKernel {
  double beta = 0.0;
  Eigen::MatrixXd matrix;
  double laziness = 0.0;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Symmetrization of a reversible kernel. Same spectrum as the kernel; its
// top eigenvector is the Gibbs amplitude vector sqrt(pi).
struct SymmetricKernel {
  double beta = 0.0;
  Eigen::MatrixXd matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Full symmetric eigendecomposition, eigenvalues descending.
struct KernelSpectrum {
  Eigen::VectorXd lambdas;  // lambda_0 = 1 >= lambda_1 >= ...
  Eigen::VectorXd phis;     // arccos(lambda_j), ascending
  Eigen::MatrixXd eigvecs;  // column j is |phi_j>, orthonormal; sign-canonical
  double delta = 0.0;       // 1 - lambda_1, clamped at 0

  int dim() const { return static_cast<int>(lambdas.size()); }
  bool degenerate() const { return delta <= 0.0; }
};

struct DetailedBalanceReport {
  double max_violation = 0.0;
  int sigma = 0;        // offending pair, sigma < sigma_prime
  int sigma_prime = 0;
};

// Throws InvalidProposal unless `proposal` is symmetric, column-stochastic
// and zero-diagonal within 1e-12.
void validate_proposal(const Eigen::MatrixXd& proposal);

// Metropolis acceptance on top of a symmetric proposal, with a lazy hold
// probability mixed in. Off-diagonal entries are
//   (1 - laziness) * proposal(r, c) * min(1, exp(-beta (E[r] - E[c]))),
// the diagonal absorbs the remainder. Requires laziness in [0, 1).
TransitionKernel metropolis_kernel(const EnergyModel& model, double beta,
                                   const Eigen::MatrixXd& proposal, double laziness);

// Diagnostic: max over pairs of |pi_c m(r,c) - pi_r m(c,r)|.
DetailedBalanceReport verify_detailed_balance(const TransitionKernel& kernel,
                                              const BoltzmannDist& dist);

// Entrywise geometric mean sqrt(m(r,c) m(c,r)), cross-checked against the
// similarity transform exp(+beta E/2) M exp(-beta E/2). Throws MismatchError
// when the two constructions disagree beyond 1e-10 (broken detailed balance).
SymmetricKernel symmetrize(const TransitionKernel& kernel, const EnergyModel& model);

// Throws NegativeEigenvalue if any eigenvalue < -1e-8 (insufficient laziness).
KernelSpectrum kernel_spectrum(const SymmetricKernel& sym);

// As above, additionally cross-checking the eigenvalues of H against a
// general eigensolve of M (tolerance 1e-9).
KernelSpectrum kernel_spectrum(const SymmetricKernel& sym, const TransitionKernel& kernel);

}  // namespace qsa
