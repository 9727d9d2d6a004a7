#include "qsa/classical_sa.hpp"

#include "qsa/errors.hpp"
#include "qsa/rng.hpp"

#include <cmath>

namespace qsa {

namespace {

double error_mass(const EnergyModel& model, const Eigen::VectorXd& mu) {
  double mass = 0.0;
  for (int s = 0; s < model.d; ++s)
    if (!model.is_ground(s)) mass += mu[s];
  return std::clamp(mass, 0.0, 1.0);
}

}  // namespace

SaSchedule sa_schedule(const EnergyModel& model, double delta, double epsilon, double tau) {
  if (delta <= 0.0) throw ZeroGap("sa_schedule: delta must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("sa_schedule: epsilon must lie in (0, 1)");
  if (tau <= 0.0) throw std::invalid_argument("sa_schedule: tau must be positive");

  SaSchedule s;
  s.tau = tau;
  s.epsilon = epsilon;
  s.delta = delta;
  s.delta_beta = tau * delta / model.e_max;
  s.beta_f = std::log(2.0 * model.d / (epsilon * epsilon)) / model.gamma;
  s.steps = static_cast<long>(std::ceil(s.beta_f / s.delta_beta));
  return s;
}

double h_norm(const Eigen::VectorXd& mu, const BoltzmannDist& pi) {
  if (mu.size() != pi.probabilities.size())
    throw std::invalid_argument("h_norm: dimension mismatch");
  return (mu.array() / pi.probabilities.array().sqrt()).matrix().norm();
}

double sa_error_bound(const EnergyModel& model, double beta_f) {
  if (beta_f < 0.0) throw std::invalid_argument("sa_error_bound: beta_f must be >= 0");
  return std::min(1.0, std::sqrt(2.0 * model.d) * std::exp(-0.5 * beta_f * model.gamma));
}

DistributionTrace anneal_exact(const EnergyModel& model, const SaSchedule& schedule,
                               const KernelBuilder& builder, const TraceOptions& options,
                               std::vector<Eigen::VectorXd>* mus) {
  const int d = model.d;
  DistributionTrace trace;
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(d, 1.0 / d);

  const double delta = schedule.delta;
  double h2_prev = 1.0;  // mu(0) == pi(0) == uniform
  trace.stats.max_h_norm_sq = 1.0;
  trace.stats.worst_recurrence_c = -std::numeric_limits<double>::infinity();

  auto record = [&](long k, double beta, double h, double err) {
    trace.rows.push_back({k, beta, h, err});
    if (options.store_mu && mus) mus->push_back(mu);
  };

  {
    const double err0 = error_mass(model, mu);
    record(0, 0.0, 1.0, err0);
    if (err0 <= schedule.epsilon) trace.first_step_at_epsilon = 0;
  }

  const long stride = std::max<long>(1, options.stride);
  for (long k = 1; k <= schedule.steps; ++k) {
    const double beta = schedule.beta_at(k);
    mu = (builder(beta).matrix * mu).eval();
    const BoltzmannDist pi = boltzmann(model, beta);
    const double h = h_norm(mu, pi);
    const double h2 = h * h;
    const double err = error_mass(model, mu);

    trace.stats.max_h_norm_sq = std::max(trace.stats.max_h_norm_sq, h2);
    if (delta > 0.0) {
      const double c = ((h2 - h2_prev) + delta * h2_prev - 2.0 * delta) / (delta * delta);
      trace.stats.worst_recurrence_c = std::max(trace.stats.worst_recurrence_c, c);
    }
    h2_prev = h2;

    if (trace.first_step_at_epsilon < 0 && err <= schedule.epsilon)
      trace.first_step_at_epsilon = k;
    if (k % stride == 0 || k == schedule.steps) record(k, beta, h, err);
  }

  trace.final_mu = mu;
  trace.stats.lyapunov_ok = trace.stats.max_h_norm_sq <= 2.0 + 1e-6;
  return trace;
}

SampledRun anneal_sampled(const EnergyModel& model, const SaSchedule& schedule,
                          const KernelBuilder& builder, std::uint64_t seed,
                          bool keep_trajectory) {
  std::mt19937_64 gen(seed);
  SampledRun run;
  run.seed = seed;

  int state = sample_index(Eigen::VectorXd::Constant(model.d, 1.0 / model.d), uniform01(gen));
  if (keep_trajectory) run.trajectory.push_back(state);
  for (long k = 1; k <= schedule.steps; ++k) {
    const TransitionKernel kernel = builder(schedule.beta_at(k));
    state = sample_index(kernel.matrix.col(state), uniform01(gen));
    if (keep_trajectory) run.trajectory.push_back(state);
  }
  run.final_state = state;
  run.success = model.is_ground(state);
  return run;
}

CalibratedSchedule sa_schedule_calibrated(const EnergyModel& model, double delta,
                                          double epsilon, const KernelBuilder& builder,
                                          double tau0, int max_halvings) {
  double tau = tau0;
  CalibratedSchedule out;
  for (int attempt = 0; attempt <= max_halvings; ++attempt) {
    out.schedule = sa_schedule(model, delta, epsilon, tau);
    out.halvings = attempt;
    const DistributionTrace trace =
        anneal_exact(model, out.schedule, builder, {.stride = out.schedule.steps});
    out.stats = trace.stats;
    if (trace.stats.lyapunov_ok) return out;
    tau *= 0.5;
  }
  return out;  // last attempt, stats.lyapunov_ok == false
}

double min_gap_over_schedule(const EnergyModel& model, const SaSchedule& schedule,
                             const KernelBuilder& builder) {
  double gap = std::numeric_limits<double>::infinity();
  for (long k = 1; k <= schedule.steps; ++k) {
    const TransitionKernel kernel = builder(schedule.beta_at(k));
    gap = std::min(gap, kernel_spectrum(symmetrize(kernel, model)).delta);
  }
  return gap;
}

double min_gap_on_grid(const EnergyModel& model, const KernelBuilder& builder,
                       double beta_f, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("min_gap_on_grid: need >= 2 points");
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid_points; ++i) {
    const double beta = beta_f * static_cast<double>(i) / grid_points;
    const TransitionKernel kernel = builder(beta);
    gap = std::min(gap, kernel_spectrum(symmetrize(kernel, model)).delta);
  }
  return gap;
}

}  // namespace qsa
