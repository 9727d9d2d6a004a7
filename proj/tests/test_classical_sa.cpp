#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "qsa/classical_sa.hpp"
#include "qsa/errors.hpp"
#include "qsa/families.hpp"

#include <cmath>

using namespace qsa;

namespace {

const EnergyModel& two_level_model() {
  static const EnergyModel m = build_model(std::vector<double>{0.0, 1.0});
  return m;
}

KernelBuilder two_level_builder(double laziness = 0.5) {
  return [laziness](double beta) {
    return metropolis_kernel(two_level_model(), beta, ring_proposal(2), laziness);
  };
}

}  // namespace

TEST_CASE("sa_schedule worked example") {
  const SaSchedule s = sa_schedule(two_level_model(), 0.75, 0.1, 0.25);
  CHECK(s.delta_beta == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(s.beta_f == doctest::Approx(std::log(400.0)).epsilon(1e-15));
  CHECK(s.steps == 32);
  // Rate condition delta_beta * e_max <= tau * delta holds with equality.
  CHECK(s.delta_beta * two_level_model().e_max == doctest::Approx(0.25 * 0.75));

  CHECK_THROWS_AS(sa_schedule(two_level_model(), 0.0, 0.1), ZeroGap);
  CHECK_THROWS_AS(sa_schedule(two_level_model(), -1.0, 0.1), ZeroGap);
  CHECK_THROWS_AS(sa_schedule(two_level_model(), 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sa_schedule(two_level_model(), 0.5, 1.0), std::invalid_argument);
  CHECK(sa_schedule(two_level_model(), 0.5, 0.999).beta_f > 0.0);
}

TEST_CASE("h_norm examples") {
  const EnergyModel& m = two_level_model();
  const BoltzmannDist pi = boltzmann(m, std::log(2.0));
  CHECK(h_norm(pi.probabilities, pi) == doctest::Approx(1.0).epsilon(1e-14));

  const BoltzmannDist uniform = boltzmann(m, 0.0);
  CHECK(h_norm(uniform.probabilities, uniform) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::VectorXd point(2);
  point << 1.0, 0.0;
  CHECK(h_norm(point, pi) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("sa_error_bound") {
  const EnergyModel& m = two_level_model();
  // sqrt(4) * exp(-ln(400)/2) = 2/20.
  CHECK(sa_error_bound(m, std::log(400.0)) == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(sa_error_bound(m, 0.0) == 1.0);

  const EnergyModel wide = build_model(std::vector<double>{0.0, 2.0});
  const double beta_f = 3.0;
  const double b1 = sa_error_bound(m, beta_f) / std::sqrt(4.0);
  const double b2 = sa_error_bound(wide, beta_f) / std::sqrt(4.0);
  CHECK(b2 == doctest::Approx(b1 * b1).epsilon(1e-12));  // doubling gamma doubles the exponent
}

TEST_CASE("anneal_exact on the two-level schedule") {
  const EnergyModel& m = two_level_model();
  const SaSchedule s = sa_schedule(m, 0.75, 0.1, 0.25);
  std::vector<Eigen::VectorXd> mus;
  const DistributionTrace trace =
      anneal_exact(m, s, two_level_builder(), {.stride = 1, .store_mu = true}, &mus);

  REQUIRE(trace.rows.size() == static_cast<std::size_t>(s.steps) + 1);
  CHECK(trace.rows[0].h_norm == 1.0);
  CHECK(trace.rows[0].error_mass == doctest::Approx(0.5));

  for (const Eigen::VectorXd& mu : mus)
    REQUIRE(std::abs(mu.sum() - 1.0) <= 1e-10);

  const double final_error = trace.rows.back().error_mass;
  CHECK(final_error <= 0.1);
  CHECK(final_error <= sa_error_bound(m, s.beta_at(s.steps)) + 1e-10);
  CHECK(trace.stats.max_h_norm_sq <= 2.0 + 1e-6);
  CHECK(trace.stats.lyapunov_ok);
  CHECK(trace.first_step_at_epsilon >= 0);
  CHECK(trace.first_step_at_epsilon <= s.steps);
}

TEST_CASE("anneal_exact with zero steps keeps the uniform distribution") {
  const EnergyModel m = build_model(std::vector<double>{0.0, 0.5, 0.5, 1.0});
  SaSchedule s = sa_schedule(m, 0.5, 0.2);
  s.steps = 0;
  const DistributionTrace trace = anneal_exact(m, s, two_level_builder());
  CHECK(trace.rows.size() == 1);
  CHECK(trace.rows[0].error_mass == doctest::Approx(3.0 / 4.0));
  CHECK((trace.final_mu.array() - 0.25).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("rank-one projector kernel reaches pi in one step") {
  const EnergyModel m = build_model(std::vector<double>{0.0, 0.3, 1.1});
  const double beta = 1.4;
  const BoltzmannDist pi = boltzmann(m, beta);
  // Columns all equal to pi: detailed balance holds trivially.
  TransitionKernel projector{beta, pi.probabilities * Eigen::RowVectorXd::Ones(3), 0.0};

  SaSchedule s;
  s.delta_beta = beta;
  s.steps = 1;
  s.beta_f = beta;
  s.epsilon = 0.5;
  s.delta = 1.0;
  const DistributionTrace trace =
      anneal_exact(m, s, [&](double) { return projector; }, {});
  CHECK((trace.final_mu - pi.probabilities).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("anneal_sampled determinism and frozen chain") {
  const EnergyModel& m = two_level_model();
  const SaSchedule s = sa_schedule(m, 0.75, 0.1, 0.25);

  const SampledRun a = anneal_sampled(m, s, two_level_builder(), 42, true);
  const SampledRun b = anneal_sampled(m, s, two_level_builder(), 42, true);
  CHECK(a.final_state == b.final_state);
  CHECK(a.trajectory == b.trajectory);

  // Nearly frozen chain: the trajectory never moves.
  SaSchedule frozen = s;
  frozen.steps = 10;
  const KernelBuilder builder = two_level_builder(1.0 - 1e-9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampledRun run = anneal_sampled(m, frozen, builder, seed, true);
    CHECK(run.trajectory.front() == run.trajectory.back());
  }
}

TEST_CASE("sampled error frequency matches the exact error mass") {
  const EnergyModel& m = two_level_model();
  const SaSchedule s = sa_schedule(m, 0.75, 0.1, 0.25);
  const KernelBuilder builder = two_level_builder();
  const DistributionTrace trace = anneal_exact(m, s, builder, {.stride = s.steps});
  const double exact_error = trace.rows.back().error_mass;

  // Pre-build the kernels once; the builder is deterministic in beta.
  std::vector<TransitionKernel> kernels;
  for (long k = 1; k <= s.steps; ++k) kernels.push_back(builder(s.beta_at(k)));
  const KernelBuilder cached = [&](double beta) {
    const long k = std::lround(beta / s.delta_beta);
    return kernels[k - 1];
  };

  const int n_runs = 100000;
  int failures = 0;
  for (int run = 0; run < n_runs; ++run) {
    if (!anneal_sampled(m, s, cached, split_seed(99, run)).success) ++failures;
  }
  const double freq = static_cast<double>(failures) / n_runs;
  const double std_dev = std::sqrt(exact_error * (1.0 - exact_error) / n_runs);
  CHECK(freq <= 0.1 + 3.0 * std_dev);
  CHECK(std::abs(freq - exact_error) <= 4.0 * std_dev);
}

TEST_CASE("Lyapunov property on a random corpus") {
  std::mt19937_64 gen(321);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(uniform01(gen) * 31);
    const EnergyModel model = test::random_model(gen, d);
    const Eigen::MatrixXd proposal = test::random_proposal(gen, model.d);
    const KernelBuilder builder = [&](double beta) {
      return metropolis_kernel(model, beta, proposal, 0.5);
    };

    const double beta_probe = std::log(2.0 * model.d / 0.01) / model.gamma;
    const double delta = min_gap_on_grid(model, builder, beta_probe, 64);
    REQUIRE(delta > 0.0);

    const SaSchedule s = sa_schedule(model, delta, 0.1, 0.25);
    if (s.steps > 20000) continue;  // keep the unit suite fast
    const DistributionTrace trace = anneal_exact(model, s, builder, {.stride = s.steps});
    REQUIRE(trace.stats.max_h_norm_sq <= 2.0 + 1e-6);
    REQUIRE(trace.rows.back().error_mass <=
            sa_error_bound(model, s.beta_at(s.steps)) + 1e-10);
  }
}

TEST_CASE("calibrated schedule keeps tau when the Lyapunov check passes") {
  const CalibratedSchedule cal =
      sa_schedule_calibrated(two_level_model(), 0.75, 0.1, two_level_builder());
  CHECK(cal.halvings == 0);
  CHECK(cal.stats.lyapunov_ok);
  CHECK(cal.schedule.tau == 0.25);
}

TEST_CASE("min gap helpers agree on the two-level chain") {
  const EnergyModel& m = two_level_model();
  const SaSchedule s = sa_schedule(m, 0.75, 0.1, 0.25);
  const double over_schedule = min_gap_over_schedule(m, s, two_level_builder());
  const double on_grid = min_gap_on_grid(m, two_level_builder(), s.beta_at(s.steps), 64);
  // Closed form: gap(beta) = (1 - alpha)(1 + exp(-beta)), minimized at beta_f.
  const double closed = 0.5 * (1.0 + std::exp(-s.beta_at(s.steps)));
  CHECK(over_schedule == doctest::Approx(closed).epsilon(1e-10));
  CHECK(on_grid == doctest::Approx(closed).epsilon(1e-10));
}
