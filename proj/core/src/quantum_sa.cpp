#include "qsa/quantum_sa.hpp"

#include "qsa/errors.hpp"
#include "qsa/rng.hpp"

#include <cmath>
#include <numbers>

namespace qsa {

namespace {

constexpr int kMaxAnalyticDim = 4096;
const double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

// Coefficient-to-sigma map V: column 0 is phi_0, columns j and d-1+j are
// phi_j / sqrt2 (the u-halves of the +-j pair). sigma-to-coefficient is V^T.
Eigen::MatrixXd coeff_to_sigma_map(const KernelSpectrum& spec) {
  const int d = spec.dim();
  Eigen::MatrixXd v(d, 2 * d - 1);
  v.col(0) = spec.eigvecs.col(0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 1; j < d; ++j) {
    v.col(j) = spec.eigvecs.col(j) * inv_sqrt2;
    v.col(d - 1 + j) = spec.eigvecs.col(j) * inv_sqrt2;
  }
  return v;
}

Eigen::VectorXcd branch_vector(const WalkBasisState& s) {
  const int d = s.dim();
  Eigen::VectorXcd v(2 * d - 1);
  v[0] = s.c0;
  v.segment(1, d - 1) = s.cplus;
  v.segment(d, d - 1) = s.cminus;
  return v;
}

// Probability vector over sigma plus an implicit deficit. The deficit is
// conservative failure mass; draws landing in it collapse to the
// highest-energy state, which is never a ground state.
int sample_sigma(const Eigen::VectorXd& probs, const EnergyModel& model, double u) {
  double acc = 0.0;
  for (int s = 0; s < model.d; ++s) {
    acc += probs[s];
    if (u < acc) return s;
  }
  int sink = 0;
  model.energies.maxCoeff(&sink);
  return sink;
}

Eigen::VectorXcd initial_dense_system(const EnergyModel& model) {
  const Eigen::VectorXd amp = gibbs_amplitudes(boltzmann(model, 0.0));
  return embed_system_marker(amp, model.d).cast<std::complex<double>>();
}

struct DenseStepOps {
  WalkOperator walk;
};

DenseStepOps dense_step_ops(const EnergyModel& model, const KernelBuilder& builder,
                            double beta, std::uint64_t completion_seed) {
  const TransitionKernel kernel = builder(beta);
  const SymmetricKernel sym = symmetrize(kernel, model);
  const KernelSpectrum spec = kernel_spectrum(sym);
  return {build_walk_dense(kernel, sym, spec, completion_seed)};
}

// Final measurement distribution over sigma of a dense system state.
Eigen::VectorXd dense_sigma_distribution(const Eigen::VectorXcd& sys, int d) {
  Eigen::VectorXd probs(d);
  for (int s = 0; s < d; ++s) probs[s] = sys.segment(s * d, d).squaredNorm();
  return probs;
}

// Dense Kraus set of one PEA: K_m = (<m| (x) I) C (|0> (x) I).
std::vector<Eigen::MatrixXcd> dense_kraus(const WalkOperator& walk, const PeaConfig& pea,
                                          bool with_ft) {
  const long n = pea.register_size();
  const long ds = walk.dim();
  std::vector<Eigen::MatrixXcd> kraus(n, Eigen::MatrixXcd(ds, ds));
  Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(n * ds);
  for (long i = 0; i < ds; ++i) {
    joint.setZero();
    joint[i] = 1.0;  // ancilla |0>, system e_i
    const Eigen::VectorXcd out = pea_dense(joint, walk, pea, with_ft);
    for (long m = 0; m < n; ++m) kraus[m].col(i) = out.segment(m * ds, ds);
  }
  return kraus;
}

}  // namespace

QsaSchedule qsa_schedule(const EnergyModel& model, double delta, double epsilon,
                         double c_q, double c_pea) {
  if (delta <= 0.0) throw ZeroGap("qsa_schedule: delta must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("qsa_schedule: epsilon must lie in (0, 1)");
  if (c_q <= 0.0) throw std::invalid_argument("qsa_schedule: c_q must be positive");

  QsaSchedule s;
  s.epsilon = epsilon;
  s.c_q = c_q;
  s.delta = delta;
  s.beta_f = std::log(2.0 * model.d / (epsilon * epsilon)) / model.gamma;
  const double bf_em = s.beta_f * model.e_max;
  s.q_steps = static_cast<long>(std::ceil(c_q * bf_em * bf_em / epsilon));
  s.delta_beta = s.beta_f / static_cast<double>(s.q_steps);
  s.nu = s.delta_beta * model.e_max;
  s.pea = choose_p(s.nu, delta, c_pea);
  return s;
}

std::vector<KernelSpectrum> schedule_spectra(const EnergyModel& model,
                                             const QsaSchedule& schedule,
                                             const KernelBuilder& builder) {
  std::vector<KernelSpectrum> spectra;
  spectra.reserve(schedule.q_steps);
  for (long k = 1; k <= schedule.q_steps; ++k) {
    const TransitionKernel kernel = builder(schedule.beta_at(k));
    spectra.push_back(kernel_spectrum(symmetrize(kernel, model)));
  }
  return spectra;
}

double qsa_error_bound(const EnergyModel& model, const QsaSchedule& schedule,
                       double tau_prime) {
  if (tau_prime <= 0.0) throw std::invalid_argument("qsa_error_bound: tau_prime > 0");
  const double tail = model.d * std::exp(-schedule.beta_f * model.gamma);
  const double zeno = tau_prime * static_cast<double>(schedule.q_steps) *
                      schedule.nu * schedule.nu;
  return std::min(1.0, tail + zeno);
}

QsaExact qsa_success_exact(const EnergyModel& model, const QsaSchedule& schedule,
                           const KernelBuilder& builder) {
  if (model.d > kMaxAnalyticDim)
    throw DimensionTooLarge("qsa_success_exact: d exceeds analytic cap");

  QsaExact out;
  if (schedule.q_steps == 0) {
    out.p_all_zeros = 1.0;
    out.p_joint_success = static_cast<double>(model.ground_set.size()) / model.d;
    out.p_success_given_zeros = out.p_joint_success;
    return out;
  }

  const Eigen::VectorXd uniform_amp = gibbs_amplitudes(boltzmann(model, 0.0));
  KernelSpectrum prev;
  WalkBasisState state;  // unnormalized; its norm^2 is the branch weight
  for (long k = 1; k <= schedule.q_steps; ++k) {
    const TransitionKernel kernel = builder(schedule.beta_at(k));
    KernelSpectrum spec = kernel_spectrum(symmetrize(kernel, model));
    if (k == 1) {
      state = state_from_sigma(uniform_amp.cast<std::complex<double>>(), spec);
    } else {
      state = transport(state, prev, spec);
      state.leaked = 0.0;  // leakage cannot reach the m = 0 outcome
    }
    state = pea_zero_branch(state, spec, schedule.pea);
    prev = std::move(spec);
  }

  out.p_all_zeros = std::norm(state.c0) + state.cplus.squaredNorm() + state.cminus.squaredNorm();
  const Eigen::VectorXcd amps = sigma_amplitudes(state, prev);
  double joint = 0.0;
  for (int s : model.ground_set) joint += std::norm(amps[s]);
  out.p_joint_success = joint;
  out.p_success_given_zeros = out.p_all_zeros > 0.0 ? joint / out.p_all_zeros : 0.0;
  return out;
}

QsaResult run_qsa(const EnergyModel& model, const QsaSchedule& schedule,
                  const KernelBuilder& builder, Backend backend, std::uint64_t seed,
                  Mode mode) {
  const int d = model.d;
  std::mt19937_64 gen(seed);
  QsaResult result;
  result.seed = seed;

  if (schedule.q_steps == 0) {
    const Eigen::VectorXd probs = Eigen::VectorXd::Constant(d, 1.0 / d);
    result.final_state_index = sample_sigma(probs, model, uniform01(gen));
    result.success = model.is_ground(result.final_state_index);
    return result;
  }

  const std::uint64_t calls_per_pea = (1ULL << schedule.pea.p) - 1ULL;

  if (backend == Backend::analytic) {
    if (mode == Mode::measure_each) {
      const std::vector<KernelSpectrum> spectra = schedule_spectra(model, schedule, builder);
      const Eigen::VectorXd uniform_amp = gibbs_amplitudes(boltzmann(model, 0.0));
      WalkBasisState state =
          state_from_sigma(uniform_amp.cast<std::complex<double>>(), spectra[0]);
      for (long k = 1; k <= schedule.q_steps; ++k) {
        const KernelSpectrum& spec = spectra[k - 1];
        if (k > 1) state = transport(state, spectra[k - 2], spec);
        const Eigen::VectorXd probs = pea_probabilities(state, spec, schedule.pea);
        const long m = sample_index(probs, uniform01(gen));
        state = pea_collapse(state, spec, schedule.pea, m).post;
        if (m != 0) ++result.pea_failures;
        result.walk_calls += calls_per_pea;
      }
      const Eigen::VectorXcd amps = sigma_amplitudes(state, spectra.back());
      const Eigen::VectorXd probs = amps.cwiseAbs2();
      result.final_state_index = sample_sigma(probs, model, uniform01(gen));
    } else {
      const Eigen::VectorXd probs =
          qsa_channel_exact(model, schedule, builder, Backend::analytic, false);
      result.walk_calls = schedule.walk_budget();
      result.final_state_index = sample_sigma(probs, model, uniform01(gen));
    }
  } else {
    if (mode == Mode::measure_each) {
      Eigen::VectorXcd sys = initial_dense_system(model);
      const long ds = static_cast<long>(d) * d;
      for (long k = 1; k <= schedule.q_steps; ++k) {
        const DenseStepOps ops =
            dense_step_ops(model, builder, schedule.beta_at(k), split_seed(seed, k));
        Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(schedule.pea.register_size() * ds);
        joint.head(ds) = sys;
        joint = pea_dense(joint, ops.walk, schedule.pea);
        const Eigen::VectorXd marginal = ancilla_marginal(joint, schedule.pea.p, ds);
        const long m = sample_index(marginal, uniform01(gen));
        sys = collapse_ancilla(joint, schedule.pea.p, ds, m);
        if (m != 0) ++result.pea_failures;
        result.walk_calls += calls_per_pea;
      }
      const Eigen::VectorXd probs = dense_sigma_distribution(sys, d);
      result.final_state_index = sample_sigma(probs, model, uniform01(gen));
    } else {
      const Eigen::VectorXd probs =
          qsa_channel_exact(model, schedule, builder, Backend::dense, false, seed);
      result.walk_calls = schedule.walk_budget();
      result.final_state_index = sample_sigma(probs, model, uniform01(gen));
    }
  }

  result.success = model.is_ground(result.final_state_index);
  return result;
}

Eigen::VectorXd qsa_channel_exact(const EnergyModel& model, const QsaSchedule& schedule,
                                  const KernelBuilder& builder, Backend backend,
                                  bool with_ft, std::uint64_t completion_seed) {
  const int d = model.d;
  if (schedule.q_steps == 0) return Eigen::VectorXd::Constant(d, 1.0 / d);

  if (backend == Backend::analytic) {
    const std::vector<KernelSpectrum> spectra = schedule_spectra(model, schedule, builder);
    const Eigen::VectorXd uniform_amp = gibbs_amplitudes(boltzmann(model, 0.0));
    const Eigen::VectorXcd s0 = branch_vector(
        state_from_sigma(uniform_amp.cast<std::complex<double>>(), spectra[0]));
    Eigen::MatrixXcd rho = s0 * s0.adjoint();

    for (long k = 1; k <= schedule.q_steps; ++k) {
      const KernelSpectrum& spec = spectra[k - 1];
      if (k > 1) {
        const Eigen::MatrixXd a =
            coeff_to_sigma_map(spec).transpose() * coeff_to_sigma_map(spectra[k - 2]);
        rho = (a * rho * a.transpose()).eval();
        // trace deficit = leakage; it never returns, drop it
      }
      const Eigen::VectorXd phases = pea_branch_phases(spec);
      const int nb = static_cast<int>(phases.size());
      for (int b = 0; b < nb; ++b) {
        for (int b2 = 0; b2 < nb; ++b2) {
          if (b == b2) continue;
          rho(b, b2) *= pea_amplitude(wrap_2pi(phases[b] - phases[b2]), 0, schedule.pea.p);
        }
      }
    }
    const Eigen::MatrixXd v = coeff_to_sigma_map(spectra.back());
    const Eigen::MatrixXcd sigma_rho = v * rho * v.transpose();
    return sigma_rho.diagonal().real().cwiseMax(0.0);
  }

  // Dense: propagate the system density operator through the PEA channels.
  const long ds = static_cast<long>(d) * d;
  const Eigen::VectorXcd sys0 = initial_dense_system(model);
  Eigen::MatrixXcd rho = sys0 * sys0.adjoint();
  for (long k = 1; k <= schedule.q_steps; ++k) {
    const DenseStepOps ops =
        dense_step_ops(model, builder, schedule.beta_at(k), split_seed(completion_seed, k));
    const std::vector<Eigen::MatrixXcd> kraus = dense_kraus(ops.walk, schedule.pea, with_ft);
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(ds, ds);
    for (const Eigen::MatrixXcd& k_m : kraus) next += k_m * rho * k_m.adjoint();
    rho = std::move(next);
  }
  Eigen::VectorXd probs(d);
  for (int s = 0; s < d; ++s)
    probs[s] = rho.diagonal().real().segment(s * d, d).sum();
  return probs.cwiseMax(0.0);
}

CostPrediction predicted_costs(const EnergyModel& model, double delta, double epsilon,
                               const ScheduleConstants& constants) {
  const SaSchedule sa = sa_schedule(model, delta, epsilon, constants.tau);
  const QsaSchedule qsa = qsa_schedule(model, delta, epsilon, constants.c_q, constants.c_pea);

  CostPrediction pred;
  const double bf_em = sa.beta_f * model.e_max;
  pred.n_sa = bf_em / (constants.tau * delta);
  pred.n_qsa = constants.c_pea * constants.c_q * constants.c_q * bf_em * bf_em * bf_em /
               (epsilon * epsilon * std::sqrt(delta));
  pred.sa_steps = sa.steps;
  pred.qsa_walk_calls = qsa.walk_budget();
  return pred;
}

}  // namespace qsa
