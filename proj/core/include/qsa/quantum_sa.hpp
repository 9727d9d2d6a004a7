#pragma once

#include "qsa/classical_sa.hpp"
#include "qsa/energy_model.hpp"
#include "qsa/markov.hpp"
#include "qsa/phase_estimation.hpp"
#include "qsa/qwalk.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace qsa {

enum class Backend { analytic, dense };
enum class Mode { measure_each, deferred };

// Zeno annealing schedule: Q phase estimations at beta_k = k beta_f / Q.
struct QsaSchedule {
  double delta_beta = 0.0;  // beta_f / q_steps
  long q_steps = 0;         // ceil(c_q (beta_f e_max)^2 / epsilon)
  double beta_f = 0.0;      // gamma^-1 ln(2 d / epsilon^2)
  double nu = 0.0;          // delta_beta * e_max
  PeaConfig pea;
  double epsilon = 0.0;
  double c_q = 1.0;
  double delta = 0.0;       // kernel gap the register width was chosen for

  double beta_at(long k) const { return beta_f * static_cast<double>(k) / q_steps; }
  std::uint64_t walk_budget() const {
    return static_cast<std::uint64_t>(q_steps) * ((1ULL << pea.p) - 1ULL);
  }
};

struct CostCounter {
  std::uint64_t markov_steps = 0;
  std::uint64_t walk_calls = 0;

  // One walk call costs about four Markov steps of the underlying chain.
  std::uint64_t walk_calls_markov_equivalent() const { return 4 * walk_calls; }
};

struct QsaResult {
  int final_state_index = 0;
  bool success = false;
  std::uint64_t walk_calls = 0;
  long pea_failures = 0;  // outcomes m != 0 (measure-each mode only)
  std::optional<double> exact_success_prob;
  std::uint64_t seed = 0;
};

// Throws ZeroGap / RegisterTooWide.
QsaSchedule qsa_schedule(const EnergyModel& model, double delta, double epsilon,
                         double c_q = 1.0, double c_pea = 1.0);

// Kernel spectra at beta_1 .. beta_Q.
std::vector<KernelSpectrum> schedule_spectra(const EnergyModel& model,
                                             const QsaSchedule& schedule,
                                             const KernelBuilder& builder);

// One sampled QSA run. The analytic backend books non-representable mass as
// leakage and counts it as failure; the dense backend is exact. All draws
// consume mt19937_64(seed) in a fixed order; dense walk completions use
// split_seed(seed, k).
QsaResult run_qsa(const EnergyModel& model, const QsaSchedule& schedule,
                  const KernelBuilder& builder, Backend backend, std::uint64_t seed,
                  Mode mode = Mode::measure_each);

// Exact propagation of the all-zeros outcome branch (analytic backend).
// p_joint_success is the probability that every PEA returns m = 0 and the
// final measurement lands in the ground set; mass outside the representable
// subspace is counted as failure.
struct QsaExact {
  double p_all_zeros = 0.0;
  double p_joint_success = 0.0;
  double p_success_given_zeros = 0.0;
};
QsaExact qsa_success_exact(const EnergyModel& model, const QsaSchedule& schedule,
                           const KernelBuilder& builder);

// d exp(-beta_f gamma) + tau' Q nu^2, clamped to 1.
double qsa_error_bound(const EnergyModel& model, const QsaSchedule& schedule,
                       double tau_prime);

// Exact final measurement distribution over sigma, propagated as a density
// operator (all outcome branches, no sampling). With the dense backend,
// with_ft = false uses the deferred-measurement circuit without the final
// Fourier transform; the resulting distribution must not change.
Eigen::VectorXd qsa_channel_exact(const EnergyModel& model, const QsaSchedule& schedule,
                                  const KernelBuilder& builder, Backend backend,
                                  bool with_ft = true, std::uint64_t completion_seed = 0);

struct ScheduleConstants {
  double tau = 0.25;
  double c_q = 1.0;
  double c_pea = 1.0;
};

// Cost formulas with the explicit constants substituted, both as real-valued
// laws (no rounding) and as the integer counts of the constructed schedules.
struct CostPrediction {
  double n_sa = 0.0;        // beta_f e_max / (tau delta)
  double n_qsa = 0.0;       // c_pea c_q^2 (beta_f e_max)^3 / (epsilon^2 sqrt(delta))
  long sa_steps = 0;        // scheduled P
  std::uint64_t qsa_walk_calls = 0;  // scheduled Q (2^p - 1)
};
CostPrediction predicted_costs(const EnergyModel& model, double delta, double epsilon,
                               const ScheduleConstants& constants = {});

}  // namespace qsa
