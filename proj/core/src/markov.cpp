#include "qsa/markov.hpp"

#include "qsa/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qsa {

namespace {
constexpr double kProposalTol = 1e-12;
constexpr double kSimilarityTol = 1e-10;
constexpr double kSpectrumCrossTol = 1e-9;
constexpr double kNegativeTol = -1e-8;
}  // namespace

void validate_proposal(const Eigen::MatrixXd& proposal) {
  const int d = static_cast<int>(proposal.rows());
  if (proposal.cols() != d) throw InvalidProposal("proposal is not square");
  if ((proposal - proposal.transpose()).cwiseAbs().maxCoeff() > kProposalTol)
    throw InvalidProposal("proposal is not symmetric");
  if (proposal.diagonal().cwiseAbs().maxCoeff() > kProposalTol)
    throw InvalidProposal("proposal has nonzero diagonal");
  if (proposal.minCoeff() < -kProposalTol)
    throw InvalidProposal("proposal has negative entries");
  for (int c = 0; c < d; ++c) {
    if (std::abs(proposal.col(c).sum() - 1.0) > kProposalTol)
      throw InvalidProposal("proposal column " + std::to_string(c) + " does not sum to 1");
  }
}

TransitionKernel metropolis_kernel(const EnergyModel& model, double beta,
                                   const Eigen::MatrixXd& proposal, double laziness) {
  if (!(laziness >= 0.0 && laziness < 1.0))
    throw std::invalid_argument("metropolis_kernel: laziness must lie in [0, 1)");
  if (beta < 0.0) throw std::invalid_argument("metropolis_kernel: beta must be >= 0");
  if (proposal.rows() != model.d)
    throw InvalidProposal("proposal dimension does not match model");
  validate_proposal(proposal);

  const int d = model.d;
  TransitionKernel k;
  k.beta = beta;
  k.laziness = laziness;
  k.matrix = Eigen::MatrixXd::Zero(d, d);
  for (int c = 0; c < d; ++c) {
    double off = 0.0;
    for (int r = 0; r < d; ++r) {
      if (r == c || proposal(r, c) == 0.0) continue;
      const double de = model.energies[r] - model.energies[c];
      const double accept = de > 0.0 ? std::exp(-beta * de) : 1.0;
      const double p = (1.0 - laziness) * proposal(r, c) * accept;
      k.matrix(r, c) = p;
      off += p;
    }
    k.matrix(c, c) = 1.0 - off;
  }
  return k;
}

DetailedBalanceReport verify_detailed_balance(const TransitionKernel& kernel,
                                              const BoltzmannDist& dist) {
  const int d = kernel.dim();
  if (dist.probabilities.size() != d)
    throw std::invalid_argument("verify_detailed_balance: dimension mismatch");
  DetailedBalanceReport rep;
  for (int c = 0; c < d; ++c) {
    for (int r = c + 1; r < d; ++r) {
      const double flux = dist.probabilities[c] * kernel.matrix(r, c) -
                          dist.probabilities[r] * kernel.matrix(c, r);
      if (std::abs(flux) > rep.max_violation) {
        rep.max_violation = std::abs(flux);
        rep.sigma = c;
        rep.sigma_prime = r;
      }
    }
  }
  return rep;
}

SymmetricKernel symmetrize(const TransitionKernel& kernel, const EnergyModel& model) {
  const int d = kernel.dim();
  if (model.d != d) throw std::invalid_argument("symmetrize: dimension mismatch");

  SymmetricKernel sym;
  sym.beta = kernel.beta;
  sym.matrix.resize(d, d);
  double worst = 0.0;
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      const double prod = kernel.matrix(r, c) * kernel.matrix(c, r);
      const double gm = prod > 0.0 ? std::sqrt(prod) : 0.0;
      sym.matrix(r, c) = gm;
      // Similarity transform evaluated in log space; exp(beta E / 2) alone
      // can overflow even when the product is tame.
      double sim = 0.0;
      if (kernel.matrix(r, c) > 0.0) {
        sim = std::exp(std::log(kernel.matrix(r, c)) +
                       0.5 * kernel.beta * (model.energies[r] - model.energies[c]));
      }
      worst = std::max(worst, std::abs(gm - sim));
    }
  }
  if (worst > kSimilarityTol)
    throw MismatchError("symmetrize: geometric mean and similarity transform disagree by " +
                        std::to_string(worst) + " (detailed balance broken?)");
  // Exact symmetry for downstream solvers.
  sym.matrix = 0.5 * (sym.matrix + sym.matrix.transpose()).eval();
  return sym;
}

namespace {

KernelSpectrum spectrum_impl(const SymmetricKernel& sym) {
  const int d = sym.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.matrix);
  if (solver.info() != Eigen::Success)
    throw Error("kernel_spectrum: eigendecomposition failed");

  KernelSpectrum spec;
  spec.lambdas.resize(d);
  spec.phis.resize(d);
  spec.eigvecs.resize(d, d);
  // Eigen returns ascending order; store descending.
  for (int j = 0; j < d; ++j) {
    spec.lambdas[j] = solver.eigenvalues()[d - 1 - j];
    spec.eigvecs.col(j) = solver.eigenvectors().col(d - 1 - j);
  }
  if (spec.lambdas[d - 1] < kNegativeTol)
    throw NegativeEigenvalue("kernel_spectrum: eigenvalue " +
                             std::to_string(spec.lambdas[d - 1]) +
                             " below tolerance; increase laziness");
  // Sign canonicalization: largest-magnitude component positive.
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    spec.eigvecs.col(j).cwiseAbs().maxCoeff(&arg);
    if (spec.eigvecs(arg, j) < 0.0) spec.eigvecs.col(j) = -spec.eigvecs.col(j);
  }
  for (int j = 0; j < d; ++j) {
    const double clamped = std::clamp(spec.lambdas[j], 0.0, 1.0);
    spec.phis[j] = std::acos(clamped);
  }
  spec.delta = d > 1 ? std::max(0.0, 1.0 - spec.lambdas[1]) : 0.0;
  return spec;
}

}  // namespace

KernelSpectrum kernel_spectrum(const SymmetricKernel& sym) { return spectrum_impl(sym); }

KernelSpectrum kernel_spectrum(const SymmetricKernel& sym, const TransitionKernel& kernel) {
  KernelSpectrum spec = spectrum_impl(sym);
  const int d = sym.dim();
  Eigen::EigenSolver<Eigen::MatrixXd> general(kernel.matrix);
  if (general.info() != Eigen::Success)
    throw Error("kernel_spectrum: general eigensolve of M failed");
  Eigen::VectorXd m_eigs = general.eigenvalues().real();
  const double max_imag = general.eigenvalues().imag().cwiseAbs().maxCoeff();
  std::sort(m_eigs.data(), m_eigs.data() + d, std::greater<double>());
  const double worst =
      std::max((m_eigs - spec.lambdas).cwiseAbs().maxCoeff(), max_imag);
  if (worst > kSpectrumCrossTol)
    throw MismatchError("kernel_spectrum: eigenvalues of H and M disagree by " +
                        std::to_string(worst));
  return spec;
}

}  // namespace qsa
