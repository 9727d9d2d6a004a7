#include "qsa/qwalk.hpp"

#include "qsa/errors.hpp"
#include "qsa/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qsa {

namespace {

constexpr int kMaxDenseDim = 64;
const double kPi = std::numbers::pi;

// Fills the unspecified columns of a partially specified orthogonal matrix.
// `fixed` lists the column indices already populated (orthonormal). The free
// columns are drawn from the seeded generator and orthonormalized against
// everything accepted so far, with one reorthogonalization pass.
void complete_orthonormal(Eigen::MatrixXd& u, const std::vector<int>& fixed,
                          std::uint64_t seed) {
  const int n = static_cast<int>(u.rows());
  std::mt19937_64 gen(seed);

  Eigen::MatrixXd q(n, n);  // accepted columns, fill order
  int filled = 0;
  for (int c : fixed) q.col(filled++) = u.col(c);

  std::vector<bool> is_fixed(n, false);
  for (int c : fixed) is_fixed[c] = true;

  for (int c = 0; c < n; ++c) {
    if (is_fixed[c]) continue;
    bool accepted = false;
    for (int attempt = 0; attempt < 64 && !accepted; ++attempt) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v[i] = uniform01(gen) - 0.5;
      for (int pass = 0; pass < 2; ++pass)
        v -= q.leftCols(filled) * (q.leftCols(filled).transpose() * v);
      const double norm = v.norm();
      if (norm > 1e-8) {
        u.col(c) = v / norm;
        q.col(filled++) = u.col(c);
        accepted = true;
      }
    }
    if (!accepted)
      throw CompletionFailure("orthonormal completion degenerated at column " +
                              std::to_string(c));
  }
}

}  // namespace

Eigen::VectorXd embed_system_marker(const Eigen::VectorXd& v, int d) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d * d);
  for (int s = 0; s < d; ++s) out[s * d] = v[s];
  return out;
}

Eigen::VectorXd embed_marker_system(const Eigen::VectorXd& v, int d) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d * d);
  out.head(d) = v;
  return out;
}

WalkOperator build_walk_dense(const TransitionKernel& kernel, const SymmetricKernel& sym,
                              const KernelSpectrum& spectrum, std::uint64_t completion_seed) {
  const int d = kernel.dim();
  if (d > kMaxDenseDim)
    throw DimensionTooLarge("build_walk_dense: d = " + std::to_string(d) +
                            " exceeds dense cap " + std::to_string(kMaxDenseDim));
  if (sym.dim() != d || spectrum.dim() != d)
    throw std::invalid_argument("build_walk_dense: dimension mismatch");

  const int n = d * d;
  WalkOperator w;
  w.d = d;
  w.completion_seed = completion_seed;

  // X|c> = |c> (x) sum_r sqrt(m(r,c)) |r>,   Y|c> = sum_r sqrt(m(c,r)) |r> (x) |c>.
  w.isometry_x = Eigen::MatrixXd::Zero(n, d);
  w.isometry_y = Eigen::MatrixXd::Zero(n, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      w.isometry_x(c * d + r, c) = std::sqrt(kernel.matrix(r, c));
      w.isometry_y(r * d + c, c) = std::sqrt(kernel.matrix(r, c));
    }
  }

  w.ux = Eigen::MatrixXd::Zero(n, n);
  w.uy = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> fixed_x, fixed_y;
  for (int s = 0; s < d; ++s) {
    w.ux.col(s * d) = w.isometry_x.col(s);  // |sigma marker> -> X|sigma>
    w.uy.col(s) = w.isometry_y.col(s);      // |marker sigma> -> Y|sigma>
    fixed_x.push_back(s * d);
    fixed_y.push_back(s);
  }
  complete_orthonormal(w.ux, fixed_x, split_seed(completion_seed, 0));
  complete_orthonormal(w.uy, fixed_y, split_seed(completion_seed, 1));

  // R1 = 2 Pi1 - I is diagonal: +1 on |sigma marker>, -1 elsewhere.
  Eigen::VectorXd r1_diag = Eigen::VectorXd::Constant(n, -1.0);
  for (int s = 0; s < d; ++s) r1_diag[s * d] = 1.0;

  // Pi2 = G P0A G^T with G = Ux^T Uy and P0A the projector onto the first
  // d flat indices (|marker, sigma>).
  const Eigen::MatrixXd g = w.ux.transpose() * w.uy;
  const Eigen::MatrixXd gd = g.leftCols(d);
  const Eigen::MatrixXd r2 =
      2.0 * (gd * gd.transpose()) - Eigen::MatrixXd::Identity(n, n);

  w.dense = r2 * r1_diag.asDiagonal();
  return w;
}

WalkSpectrumView walk_eigenphase_table(const KernelSpectrum& spectrum) {
  const int d = spectrum.dim();
  WalkSpectrumView view;
  view.pair_phases = 2.0 * spectrum.phis.tail(d - 1);
  view.relevant_dim = 2 * (d - 1) + 1;
  view.residual_dim = d * d - view.relevant_dim;
  return view;
}

Eigen::VectorXd dense_walk_eigenphases(const WalkOperator& walk) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(
      walk.dense.cast<std::complex<double>>());
  if (solver.info() != Eigen::Success)
    throw Error("dense_walk_eigenphases: eigensolve failed");
  Eigen::VectorXd phases(walk.dim());
  for (int i = 0; i < walk.dim(); ++i)
    phases[i] = std::arg(solver.eigenvalues()[i]);
  std::sort(phases.data(), phases.data() + phases.size());
  return phases;
}

PhaseMatchReport match_walk_phases(const WalkOperator& walk, const KernelSpectrum& spectrum) {
  const int d = spectrum.dim();
  const Eigen::VectorXd dense = dense_walk_eigenphases(walk);

  std::vector<double> pool(dense.data(), dense.data() + dense.size());
  std::vector<double> targets;
  for (int j = 1; j < d; ++j) {
    targets.push_back(2.0 * spectrum.phis[j]);
    targets.push_back(-2.0 * spectrum.phis[j]);
  }
  // Claim the most distinctive targets first so near-zero pairs cannot steal
  // residual 0-phases from each other.
  std::sort(targets.begin(), targets.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });

  PhaseMatchReport rep;
  for (double t : targets) {
    int best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
      const double err = std::abs(pool[i] - t);
      if (err < best_err) {
        best_err = err;
        best = i;
      }
    }
    rep.worst_pair_error = std::max(rep.worst_pair_error, best_err);
    pool.erase(pool.begin() + best);
  }
  for (double phase : pool) {
    const double res = std::min(std::abs(phase), kPi - std::abs(phase));
    rep.worst_residual_error = std::max(rep.worst_residual_error, res);
  }

  const Eigen::VectorXd u0 = embed_system_marker(spectrum.eigvecs.col(0), d);
  rep.fixed_point_error = (walk.dense * u0 - u0).norm();
  return rep;
}

Eigen::VectorXcd walk_pair_eigenvector(const WalkOperator& walk, const KernelSpectrum& spectrum,
                                       int j, int sign) {
  const int d = spectrum.dim();
  if (j < 1 || j >= d) throw std::invalid_argument("walk_pair_eigenvector: j out of range");
  if (sign != 1 && sign != -1) throw std::invalid_argument("walk_pair_eigenvector: sign");
  const double phi = spectrum.phis[j];
  if (std::sin(phi) == 0.0)
    throw std::invalid_argument("walk_pair_eigenvector: phi_j = 0 has no +- pair");

  const Eigen::VectorXd u = embed_system_marker(spectrum.eigvecs.col(j), d);
  const Eigen::VectorXd v =
      walk.ux.transpose() * (walk.uy * embed_marker_system(spectrum.eigvecs.col(j), d));

  const std::complex<double> i_unit(0.0, 1.0);
  const std::complex<double> pref =
      (sign > 0 ? i_unit : -i_unit) / (std::sqrt(2.0) * std::sin(phi));
  const std::complex<double> rot = std::exp(-i_unit * (sign > 0 ? phi : -phi));
  return pref * (rot * u.cast<std::complex<double>>() - v.cast<std::complex<double>>());
}

WalkBasisState state_from_sigma(const Eigen::VectorXcd& amplitudes, const KernelSpectrum& spec) {
  const int d = spec.dim();
  if (amplitudes.size() != d) throw std::invalid_argument("state_from_sigma: dimension");
  const Eigen::VectorXcd coeff = spec.eigvecs.transpose() * amplitudes;
  WalkBasisState s;
  s.c0 = coeff[0];
  s.cplus = coeff.tail(d - 1) / std::sqrt(2.0);
  s.cminus = s.cplus;
  s.leaked = 0.0;
  return s;
}

Eigen::VectorXcd sigma_amplitudes(const WalkBasisState& state, const KernelSpectrum& spec) {
  const int d = spec.dim();
  if (state.dim() != d) throw std::invalid_argument("sigma_amplitudes: dimension");
  Eigen::VectorXcd coeff(d);
  coeff[0] = state.c0;
  coeff.tail(d - 1) = (state.cplus + state.cminus) / std::sqrt(2.0);
  return spec.eigvecs * coeff;
}

WalkBasisState transport(const WalkBasisState& state, const KernelSpectrum& from,
                         const KernelSpectrum& to) {
  const Eigen::VectorXcd a = sigma_amplitudes(state, from);
  // Half of each +-j pair lies outside span{|sigma marker>}; that part is not
  // representable in the new basis and is booked as leakage.
  const double w_mass = 0.5 * (state.cplus - state.cminus).squaredNorm();
  WalkBasisState out = state_from_sigma(a, to);
  out.leaked = state.leaked + w_mass;
  return out;
}

WalkBasisState decompose_gibbs(double beta_from, double beta_to, const EnergyModel& model,
                               const KernelSpectrum& spec_to) {
  (void)beta_to;  // spec_to is the eigenbasis at beta_to
  const Eigen::VectorXd amp = gibbs_amplitudes(boltzmann(model, beta_from));
  return state_from_sigma(amp.cast<std::complex<double>>(), spec_to);
}

double gibbs_overlap(const EnergyModel& model, double beta1, double beta2) {
  const Eigen::VectorXd a = gibbs_amplitudes(boltzmann(model, beta1));
  const Eigen::VectorXd b = gibbs_amplitudes(boltzmann(model, beta2));
  return a.dot(b);
}

}  // namespace qsa
