#pragma once

#include "qsa/energy_model.hpp"
#include "qsa/markov.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qsa {

using KernelBuilder = std::function<TransitionKernel(double beta)>;

// Constant-rate annealing schedule: beta_k = k * delta_beta for k = 1..steps.
struct SaSchedule {
  double delta_beta = 0.0;  // tau * delta / e_max
  long steps = 0;           // ceil(beta_f / delta_beta)
  double beta_f = 0.0;      // gamma^-1 * ln(2 d / epsilon^2)
  double tau = 0.25;
  double epsilon = 0.0;
  double delta = 0.0;       // kernel gap the schedule was built against

  double beta_at(long k) const { return static_cast<double>(k) * delta_beta; }
};

struct TraceRow {
  long step = 0;
  double beta = 0.0;
  double h_norm = 0.0;      // ||(mu^s / sqrt(pi^s))||_2 against pi(beta)
  double error_mass = 0.0;  // sum of mu over non-ground states
};

struct AnnealStats {
  double max_h_norm_sq = 0.0;
  // Worst c in  delta||h||^2 <= -delta ||h||^2 + 2 delta + c delta^2.
  double worst_recurrence_c = 0.0;
  bool lyapunov_ok = true;  // max ||h||^2 <= 2 + 1e-6
};

struct DistributionTrace {
  std::vector<TraceRow> rows;       // recorded every `stride` steps plus final
  Eigen::VectorXd final_mu;
  AnnealStats stats;
  long first_step_at_epsilon = -1;  // smallest k with error mass <= epsilon
};

struct TraceOptions {
  long stride = 1;
  bool store_mu = false;  // additionally keep every recorded mu
};

struct SampledRun {
  int final_state = 0;
  bool success = false;
  std::uint64_t seed = 0;
  std::vector<int> trajectory;  // filled only when requested
};

// Throws ZeroGap for delta <= 0; epsilon must lie in (0, 1), tau > 0.
SaSchedule sa_schedule(const EnergyModel& model, double delta, double epsilon,
                       double tau = 0.25);

// Exact propagation mu(beta_k) = M(beta_k) mu(beta_{k-1}) from the uniform
// distribution, with the h-norm diagnostic recorded against pi(beta_k).
DistributionTrace anneal_exact(const EnergyModel& model, const SaSchedule& schedule,
                               const KernelBuilder& builder,
                               const TraceOptions& options = {},
                               std::vector<Eigen::VectorXd>* mus = nullptr);

// Single stochastic trajectory; sigma(0) uniform, then inverse-CDF draws from
// the current column of M(beta_k). Deterministic given seed.
SampledRun anneal_sampled(const EnergyModel& model, const SaSchedule& schedule,
                          const KernelBuilder& builder, std::uint64_t seed,
                          bool keep_trajectory = false);

double h_norm(const Eigen::VectorXd& mu, const BoltzmannDist& pi);

// sqrt(2 d) * exp(-beta_f gamma / 2), clamped to 1.
double sa_error_bound(const EnergyModel& model, double beta_f);

// Halves tau (at most `max_halvings` times) until the Lyapunov check
// max ||h||^2 <= 2 + 1e-6 passes on an exact run of the schedule.
struct CalibratedSchedule {
  SaSchedule schedule;
  AnnealStats stats;
  int halvings = 0;
};
CalibratedSchedule sa_schedule_calibrated(const EnergyModel& model, double delta,
                                          double epsilon, const KernelBuilder& builder,
                                          double tau0 = 0.25, int max_halvings = 8);

// Smallest kernel gap over the schedule's steps (exact, one eigensolve per
// step). For large step counts prefer min_gap_on_grid.
double min_gap_over_schedule(const EnergyModel& model, const SaSchedule& schedule,
                             const KernelBuilder& builder);

// Smallest kernel gap over a uniform beta grid on [0, beta_f].
double min_gap_on_grid(const EnergyModel& model, const KernelBuilder& builder,
                       double beta_f, int grid_points = 256);

}  // namespace qsa
