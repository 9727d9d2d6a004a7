#pragma once

#include "qsa/energy_model.hpp"
#include "qsa/markov.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace qsa {

// Bipartite walk operator W = R2 R1 on H_A (x) H_B, flat index sigma*d + tau.
// R1 reflects through span{|sigma, marker>}, R2 through the image of
// span{|marker, sigma>} under Ux^T Uy. The marker is basis index 0 in each
// factor. Ux and Uy extend the column isometries X and Y to full orthogonal
// matrices; the extension is a seeded orthonormal completion, so two
// operators built from the same kernel and seed are identical.
struct WalkOperator {
  int d = 0;
  int marker_index = 0;
  std::uint64_t completion_seed = 0;
  Eigen::MatrixXd isometry_x;  // d^2 x d, column sigma is X|sigma>
  Eigen::MatrixXd isometry_y;  // d^2 x d, column sigma is Y|sigma>
  Eigen::MatrixXd ux, uy;      // d^2 x d^2 orthogonal completions
  Eigen::MatrixXd dense;       // W = R2 R1

  int dim() const { return d * d; }
};

// Analytic eigenphase table of W derived from the kernel spectrum:
// one zero phase, a +-2 phi_j pair for each j >= 1, and a residual block
// whose phases are 0 or pi.
struct WalkSpectrumView {
  Eigen::VectorXd pair_phases;  // 2 phi_j for j = 1..d-1, ascending in j
  int relevant_dim = 0;         // 2 (d - 1) + 1
  int residual_dim = 0;         // d^2 - relevant_dim
};

// Amplitudes over the walk eigenbasis {psi_0, psi_{+j}, psi_{-j}} at a fixed
// beta, plus probability mass that has left the representable subspace.
struct WalkBasisState {
  std::complex<double> c0{0.0, 0.0};
  Eigen::VectorXcd cplus;   // size d-1, entry j-1 on |psi_{+j}>
  Eigen::VectorXcd cminus;  // size d-1, entry j-1 on |psi_{-j}>
  double leaked = 0.0;

  int dim() const { return static_cast<int>(cplus.size()) + 1; }
  double norm_sq() const {
    return std::norm(c0) + cplus.squaredNorm() + cminus.squaredNorm() + leaked;
  }
};

// Builds the dense walk. Rejects d > 64. Throws CompletionFailure when the
// orthonormal completion degenerates (broken isometry).
WalkOperator build_walk_dense(const TransitionKernel& kernel, const SymmetricKernel& sym,
                              const KernelSpectrum& spectrum, std::uint64_t completion_seed);

WalkSpectrumView walk_eigenphase_table(const KernelSpectrum& spectrum);

// Eigenphases of the dense operator in (-pi, pi], sorted ascending.
Eigen::VectorXd dense_walk_eigenphases(const WalkOperator& walk);

// Greedy matching of the analytic phase table against a dense phase multiset.
struct PhaseMatchReport {
  double worst_pair_error = 0.0;      // worst |dense - (+-2 phi_j)| over all pairs
  double worst_residual_error = 0.0;  // worst distance of leftovers to {0, pi}
  double fixed_point_error = 0.0;     // ||W |phi_0 marker> - |phi_0 marker>||
};
PhaseMatchReport match_walk_phases(const WalkOperator& walk, const KernelSpectrum& spectrum);

// Walk eigenvector for eigenphase sign * 2 phi_j (j >= 1), built from the
// isometries:  (+-i / (sqrt2 sin phi)) (e^{-+i phi} |phi_j marker> - Ux^T Uy |marker phi_j>).
Eigen::VectorXcd walk_pair_eigenvector(const WalkOperator& walk, const KernelSpectrum& spectrum,
                                       int j, int sign);

// v (x) e_marker and e_marker (x) v embeddings into the bipartite space.
Eigen::VectorXd embed_system_marker(const Eigen::VectorXd& v, int d);
Eigen::VectorXd embed_marker_system(const Eigen::VectorXd& v, int d);

// --- analytic-subspace state algebra -------------------------------------

// Expansion of a sigma-amplitude vector a (the |sigma, marker> block) in the
// walk eigenbasis at `spec`: c_j = <phi_j | a>, with c_{+-j} = c_j / sqrt2.
WalkBasisState state_from_sigma(const Eigen::VectorXcd& amplitudes, const KernelSpectrum& spec);

// The |sigma, marker> block of the state. Its squared norm can be below
// norm_sq(): mass on the w-halves of psi_{+-j} and leaked mass live outside.
Eigen::VectorXcd sigma_amplitudes(const WalkBasisState& state, const KernelSpectrum& spec);

// Re-expresses a state in the eigenbasis of another kernel. Only the
// |sigma, marker> block is transportable from spectra alone; the remainder
// (half of each psi_{+-j} pair) is added to `leaked`.
WalkBasisState transport(const WalkBasisState& state, const KernelSpectrum& from,
                         const KernelSpectrum& to);

// Gibbs state at beta_from expanded in the walk eigenbasis at beta_to.
WalkBasisState decompose_gibbs(double beta_from, double beta_to, const EnergyModel& model,
                               const KernelSpectrum& spec_to);

// sum_sigma sqrt(pi^sigma(beta1) pi^sigma(beta2)), in (0, 1].
double gibbs_overlap(const EnergyModel& model, double beta1, double beta2);

}  // namespace qsa
