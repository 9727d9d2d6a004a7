#include "qsa/phase_estimation.hpp"

#include "qsa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qsa {

namespace {

const double kPi = std::numbers::pi;
const double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxP = 24;
constexpr long kMaxJointDim = 1L << 22;

Eigen::VectorXcd branch_amplitudes(const WalkBasisState& state) {
  const int d = state.dim();
  Eigen::VectorXcd amps(2 * d - 1);
  amps[0] = state.c0;
  amps.segment(1, d - 1) = state.cplus;
  amps.segment(d, d - 1) = state.cminus;
  return amps;
}

WalkBasisState state_from_branches(const Eigen::VectorXcd& amps, double leaked) {
  const int d = (static_cast<int>(amps.size()) + 1) / 2;
  WalkBasisState s;
  s.c0 = amps[0];
  s.cplus = amps.segment(1, d - 1);
  s.cminus = amps.segment(d, d - 1);
  s.leaked = leaked;
  return s;
}

void radix2_fft(Eigen::VectorXcd& v, double sign) {
  const long n = v.size();
  for (long i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
    long bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (long len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (long i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (long k = 0; k < len / 2; ++k) {
        const std::complex<double> a = v[i + k];
        const std::complex<double> b = v[i + k + len / 2] * w;
        v[i + k] = a + b;
        v[i + k + len / 2] = a - b;
        w *= wl;
      }
    }
  }
}

}  // namespace

Eigen::VectorXd pea_branch_phases(const KernelSpectrum& spec) {
  const int d = spec.dim();
  Eigen::VectorXd phases(2 * d - 1);
  phases[0] = 0.0;
  for (int j = 1; j < d; ++j) {
    phases[j] = 2.0 * spec.phis[j];
    double neg = kTwoPi - 2.0 * spec.phis[j];
    if (neg >= kTwoPi) neg = 0.0;  // phi_j = 0 folds onto the zero phase
    phases[d - 1 + j] = neg;
  }
  return phases;
}

PeaConfig choose_p(double nu, double delta, double c_pea) {
  if (nu <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("choose_p: nu and delta must be positive");
  if (c_pea <= 0.0) throw std::invalid_argument("choose_p: c_pea must be positive");

  const double target = c_pea / (nu * std::sqrt(delta));
  int p = 1;
  while (static_cast<double>(1L << p) < target) {
    ++p;
    if (p > kMaxP)
      throw RegisterTooWide("choose_p: need p > " + std::to_string(kMaxP) +
                            " for target " + std::to_string(target));
  }
  return PeaConfig{p, c_pea};
}

std::complex<double> pea_amplitude(double phase, long m, int p) {
  const long n = 1L << p;
  if (m < 0 || m >= n) throw std::invalid_argument("pea_amplitude: m out of range");
  const double x = phase - kTwoPi * static_cast<double>(m) / static_cast<double>(n);
  if (x == 0.0) return {1.0, 0.0};
  const double half = 0.5 * x;
  const double den = std::sin(half);
  if (den == 0.0) return {1.0, 0.0};  // x = +-2pi, same resonance
  const double ratio = std::sin(static_cast<double>(n) * half) / (static_cast<double>(n) * den);
  const double arg = (static_cast<double>(n) - 1.0) * half;
  return std::polar(ratio, arg);
}

Eigen::VectorXd pea_probabilities(const WalkBasisState& state, const KernelSpectrum& spec,
                                  const PeaConfig& config) {
  const long n = config.register_size();
  const Eigen::VectorXd phases = pea_branch_phases(spec);
  const Eigen::VectorXcd amps = branch_amplitudes(state);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n);
  for (long m = 0; m < n; ++m) {
    double pm = 0.0;
    for (int b = 0; b < phases.size(); ++b) {
      if (amps[b] == std::complex<double>(0.0, 0.0)) continue;
      pm += std::norm(amps[b] * pea_amplitude(phases[b], m, config.p));
    }
    probs[m] = pm;
  }
  probs[n / 2] += state.leaked;  // leaked mass carries phase pi
  return probs;
}

PeaCollapse pea_collapse(const WalkBasisState& state, const KernelSpectrum& spec,
                         const PeaConfig& config, long m) {
  const long n = config.register_size();
  if (m < 0 || m >= n) throw std::invalid_argument("pea_collapse: m out of range");
  const Eigen::VectorXd phases = pea_branch_phases(spec);
  Eigen::VectorXcd amps = branch_amplitudes(state);
  for (int b = 0; b < phases.size(); ++b) amps[b] *= pea_amplitude(phases[b], m, config.p);
  const double leaked = (m == n / 2) ? state.leaked : 0.0;
  const double prob = amps.squaredNorm() + leaked;

  PeaCollapse out;
  out.probability = prob;
  if (prob > 0.0) {
    out.post = state_from_branches(amps / std::sqrt(prob), leaked / prob);
  } else {
    out.post = state_from_branches(amps, 0.0);
  }
  return out;
}

WalkBasisState pea_zero_branch(const WalkBasisState& state, const KernelSpectrum& spec,
                               const PeaConfig& config) {
  const Eigen::VectorXd phases = pea_branch_phases(spec);
  Eigen::VectorXcd amps = branch_amplitudes(state);
  for (int b = 0; b < phases.size(); ++b) amps[b] *= pea_amplitude(phases[b], 0, config.p);
  return state_from_branches(amps, 0.0);
}

std::vector<PeaOutcome> pea_analytic(const WalkBasisState& state, const KernelSpectrum& spec,
                                     const PeaConfig& config) {
  const long n = config.register_size();
  if (n * static_cast<long>(state.dim()) > (1L << 22))
    throw DimensionTooLarge("pea_analytic: outcome table too large; use pea_probabilities");
  std::vector<PeaOutcome> outcomes;
  outcomes.reserve(n);
  for (long m = 0; m < n; ++m) {
    PeaCollapse c = pea_collapse(state, spec, config, m);
    outcomes.push_back({m, c.probability, std::move(c.post)});
  }
  return outcomes;
}

Eigen::VectorXcd pea_dense(const Eigen::VectorXcd& joint, const WalkOperator& walk,
                           const PeaConfig& config, bool apply_inverse_ft) {
  const long n = config.register_size();
  const long ds = walk.dim();
  if (n * ds > kMaxJointDim)
    throw DimensionTooLarge("pea_dense: joint dimension exceeds 2^22");
  if (joint.size() != n * ds) throw std::invalid_argument("pea_dense: joint dimension");

  Eigen::VectorXcd v = joint;

  // Hadamard layer on the p ancilla qubits.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int qubit = 0; qubit < config.p; ++qubit) {
    const long bit = 1L << qubit;
    for (long m = 0; m < n; ++m) {
      if (m & bit) continue;
      const long m1 = m | bit;
      for (long s = 0; s < ds; ++s) {
        const std::complex<double> a = v[m * ds + s];
        const std::complex<double> b = v[m1 * ds + s];
        v[m * ds + s] = (a + b) * inv_sqrt2;
        v[m1 * ds + s] = (a - b) * inv_sqrt2;
      }
    }
  }

  // Controlled W^{2^{i-1}} by repeated squaring of the walk.
  Eigen::MatrixXcd wpow = walk.dense.cast<std::complex<double>>();
  for (int qubit = 0; qubit < config.p; ++qubit) {
    const long bit = 1L << qubit;
    for (long m = 0; m < n; ++m) {
      if (!(m & bit)) continue;
      v.segment(m * ds, ds) = (wpow * v.segment(m * ds, ds)).eval();
    }
    if (qubit + 1 < config.p) wpow = (wpow * wpow).eval();
  }

  // Inverse Fourier transform along the ancilla axis (stride ds).
  if (apply_inverse_ft) {
    Eigen::VectorXcd reg(n);
    for (long s = 0; s < ds; ++s) {
      for (long m = 0; m < n; ++m) reg[m] = v[m * ds + s];
      radix2_fft(reg, -1.0);
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (long m = 0; m < n; ++m) v[m * ds + s] = reg[m] * scale;
    }
  }
  return v;
}

Eigen::VectorXd ancilla_marginal(const Eigen::VectorXcd& joint, int p, int dim_sys) {
  const long n = 1L << p;
  if (joint.size() != n * dim_sys) throw std::invalid_argument("ancilla_marginal: dimension");
  Eigen::VectorXd probs(n);
  for (long m = 0; m < n; ++m) probs[m] = joint.segment(m * dim_sys, dim_sys).squaredNorm();
  return probs;
}

Eigen::VectorXcd collapse_ancilla(const Eigen::VectorXcd& joint, int p, int dim_sys, long m) {
  const long n = 1L << p;
  if (joint.size() != n * dim_sys) throw std::invalid_argument("collapse_ancilla: dimension");
  if (m < 0 || m >= n) throw std::invalid_argument("collapse_ancilla: m out of range");
  Eigen::VectorXcd sys = joint.segment(m * dim_sys, dim_sys);
  const double norm = sys.norm();
  if (norm > 0.0) sys /= norm;
  return sys;
}

Eigen::VectorXcd inverse_qft(const Eigen::VectorXcd& reg) {
  const long n = reg.size();
  if (n <= 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("inverse_qft: length must be a power of two");
  Eigen::VectorXcd v = reg;
  radix2_fft(v, -1.0);
  return v / std::sqrt(static_cast<double>(n));
}

Eigen::VectorXcd qft(const Eigen::VectorXcd& reg) {
  const long n = reg.size();
  if (n <= 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("qft: length must be a power of two");
  Eigen::VectorXcd v = reg;
  radix2_fft(v, 1.0);
  return v / std::sqrt(static_cast<double>(n));
}

}  // namespace qsa
