// Acceptance suite: one checkable criterion per section, each printing a
// single PASS/FAIL line. Run everything with no arguments, or one criterion
// with --criterion N. --cli PATH points at the qsasim binary (criterion 9).

#include "qsa/classical_sa.hpp"
#include "qsa/energy_model.hpp"
#include "qsa/families.hpp"
#include "qsa/io.hpp"
#include "qsa/markov.hpp"
#include "qsa/phase_estimation.hpp"
#include "qsa/quantum_sa.hpp"
#include "qsa/qwalk.hpp"
#include "qsa/rng.hpp"
#include "qsa/scaling.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qsa;

const double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

EnergyModel random_model(std::mt19937_64& gen, int d) {
  std::vector<double> energies(d);
  for (double& e : energies) e = uniform01(gen);
  return build_model(energies);
}

// Random model whose energies are multiples of 1/4 in [0, 1], with 0 and 1
// both present. Pins gamma >= 1/4 and e_max = 1, which keeps the derived
// schedules short.
EnergyModel random_quantized_model(std::mt19937_64& gen, int d) {
  std::vector<double> energies(d);
  energies[0] = 0.0;
  energies[1] = 1.0;
  for (int s = 2; s < d; ++s)
    energies[s] = 0.25 * static_cast<int>(uniform01(gen) * 5.0);
  return build_model(energies);
}

Eigen::MatrixXd random_proposal(std::mt19937_64& gen, int d) {
  if (d == 2) return ring_proposal(2);
  const double alpha = uniform01(gen);
  return alpha * ring_proposal(d) + (1.0 - alpha) * complete_proposal(d);
}

struct KernelCase {
  EnergyModel model;
  double beta;
  TransitionKernel kernel;
  SymmetricKernel sym;
  KernelSpectrum spec;
};

KernelCase random_kernel_case(std::mt19937_64& gen, int d_max) {
  KernelCase c;
  const int d = 2 + static_cast<int>(uniform01(gen) * (d_max - 1));
  c.model = random_model(gen, d);
  c.beta = uniform_in(gen, 0.0, 3.0);
  c.kernel = metropolis_kernel(c.model, c.beta, random_proposal(gen, d), 0.5);
  c.sym = symmetrize(c.kernel, c.model);
  c.spec = kernel_spectrum(c.sym);
  return c;
}

// 1. Dense walk eigenphases match {0, +-2 arccos lambda_j} with residuals on
//    {0, pi}, and |phi_0 marker> is fixed.
Outcome criterion_spectral_correspondence() {
  const int n_kernels = 500;
  const int n_threads = 8;
  std::vector<std::future<double>> futures;
  for (int t = 0; t < n_threads; ++t) {
    futures.push_back(std::async(std::launch::async, [t]() {
      std::mt19937_64 gen(split_seed(1001, t));
      double worst = 0.0;
      for (int i = t; i < n_kernels; i += n_threads) {
        const KernelCase c = random_kernel_case(gen, 16);
        const WalkOperator walk = build_walk_dense(c.kernel, c.sym, c.spec, gen());
        const PhaseMatchReport rep = match_walk_phases(walk, c.spec);
        worst = std::max({worst, rep.worst_pair_error, rep.worst_residual_error,
                          rep.fixed_point_error});
      }
      return worst;
    }));
  }
  double worst = 0.0;
  for (auto& f : futures) worst = std::max(worst, f.get());
  return {worst <= 1e-8,
          "500 kernels d<=16, worst phase/residual/fixed-point error " + format_g17(worst)};
}

// 2. Two completion seeds give identical PEA statistics and identical
//    post-measurement states on the marker block.
Outcome criterion_completion_invariance() {
  std::mt19937_64 gen(2002);
  double worst = 0.0;
  for (int pair = 0; pair < 50; ++pair) {
    const KernelCase c = random_kernel_case(gen, 6);
    const int d = c.model.d;
    const int p = 2 + static_cast<int>(uniform01(gen) * 4);
    const PeaConfig cfg{p, 1.0};
    const long n = cfg.register_size();
    const long ds = static_cast<long>(d) * d;

    Eigen::VectorXcd amps(d);
    for (int s = 0; s < d; ++s)
      amps[s] = std::complex<double>(uniform01(gen) - 0.5, uniform01(gen) - 0.5);
    amps /= amps.norm();

    const WalkOperator walk_a = build_walk_dense(c.kernel, c.sym, c.spec, gen());
    const WalkOperator walk_b = build_walk_dense(c.kernel, c.sym, c.spec, gen());

    Eigen::VectorXcd joint = Eigen::VectorXcd::Zero(n * ds);
    for (int s = 0; s < d; ++s) joint[s * d] = amps[s];
    const Eigen::VectorXcd out_a = pea_dense(joint, walk_a, cfg);
    const Eigen::VectorXcd out_b = pea_dense(joint, walk_b, cfg);

    const Eigen::VectorXd probs_a = ancilla_marginal(out_a, p, ds);
    const Eigen::VectorXd probs_b = ancilla_marginal(out_b, p, ds);
    worst = std::max(worst, (probs_a - probs_b).cwiseAbs().maxCoeff());

    for (long m = 0; m < n; ++m) {
      if (probs_a[m] < 1e-9) continue;
      const Eigen::VectorXcd sys_a = collapse_ancilla(out_a, p, ds, m);
      const Eigen::VectorXcd sys_b = collapse_ancilla(out_b, p, ds, m);
      for (int s = 0; s < d; ++s)
        worst = std::max(worst, std::abs(sys_a[s * d] - sys_b[s * d]));
    }
  }
  return {worst <= 1e-8, "50 pairs d<=6 p<=5, worst discrepancy " + format_g17(worst)};
}

// 3. Closed-form outcome amplitude vs brute force, and the garbage bound.
Outcome criterion_pea_amplitude_law() {
  std::mt19937_64 gen(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int p = 1 + static_cast<int>(uniform01(gen) * 10);
    const long n = 1L << p;
    const long m = static_cast<long>(uniform01(gen) * n);
    const double phase = uniform_in(gen, 0.0, kTwoPi);
    std::complex<double> brute(0.0, 0.0);
    for (long mp = 0; mp < n; ++mp) {
      const double arg = mp * (phase - kTwoPi * m / n);
      brute += std::complex<double>(std::cos(arg), std::sin(arg));
    }
    brute /= static_cast<double>(n);
    worst = std::max(worst, std::abs(pea_amplitude(phase, m, p) - brute));
  }

  int violations = 0;
  for (int p = 1; p <= 12; ++p) {
    for (int i = 1; i <= 1000; ++i) {
      const double phi = (std::numbers::pi / 2.0) * i / 1000.0;
      if (std::abs(pea_amplitude(2.0 * phi, 0, p)) >
          std::numbers::pi / ((1L << p) * 2.0 * phi))
        ++violations;
    }
  }
  const bool pass = worst <= 1e-10 && violations == 0;
  return {pass, "closed-form error " + format_g17(worst) + ", garbage-bound violations " +
                    std::to_string(violations)};
}

// 4. Dense statevector QSA and analytic-subspace QSA agree on the final
//    measurement distribution.
Outcome criterion_backend_equivalence() {
  std::mt19937_64 gen(4004);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(uniform01(gen) * 5);
    const EnergyModel model = random_model(gen, d);
    const Eigen::MatrixXd proposal = random_proposal(gen, d);
    const KernelBuilder builder = [model, proposal](double beta) {
      return metropolis_kernel(model, beta, proposal, 0.5);
    };
    QsaSchedule schedule;
    schedule.q_steps = 2 + static_cast<int>(uniform01(gen) * 7);  // Q in [2, 8]
    schedule.delta_beta = 5e-6 / model.e_max;  // leakage re-entry is O(nu), keep it << 1e-7
    schedule.beta_f = schedule.delta_beta * schedule.q_steps;
    schedule.nu = schedule.delta_beta * model.e_max;
    schedule.pea = PeaConfig{2 + static_cast<int>(uniform01(gen) * 4), 1.0};
    schedule.epsilon = 0.1;

    const Eigen::VectorXd analytic =
        qsa_channel_exact(model, schedule, builder, Backend::analytic);
    const Eigen::VectorXd dense =
        qsa_channel_exact(model, schedule, builder, Backend::dense, true, gen());
    worst = std::max(worst, (analytic - dense).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-7, "20 instances d<=6 Q<=8 p<=5, worst deviation " + format_g17(worst)};
}

// 5. Lyapunov suite: ||h||^2 <= 2 at every step and the final error mass
//    under the Appendix-style bound, at rate delta_beta e_max = delta / 4.
Outcome criterion_lyapunov_suite() {
  std::mt19937_64 gen(5005);
  double worst_h2 = 0.0;
  double worst_excess = -1.0;
  for (int instance = 0; instance < 100; ++instance) {
    const int d = 2 + static_cast<int>(uniform01(gen) * 31);
    const EnergyModel model = random_quantized_model(gen, d);
    const Eigen::MatrixXd proposal = random_proposal(gen, d);
    const KernelBuilder builder = [model, proposal](double beta) {
      return metropolis_kernel(model, beta, proposal, 0.5);
    };
    const double beta_probe = std::log(2.0 * model.d / 0.01) / model.gamma;
    const double delta = min_gap_on_grid(model, builder, beta_probe, 128);
    const SaSchedule schedule = sa_schedule(model, delta, 0.1, 0.25);
    const DistributionTrace trace =
        anneal_exact(model, schedule, builder, {.stride = schedule.steps});
    worst_h2 = std::max(worst_h2, trace.stats.max_h_norm_sq);
    const double bound = sa_error_bound(model, schedule.beta_at(schedule.steps));
    worst_excess = std::max(worst_excess, trace.rows.back().error_mass - bound);
  }
  const bool pass = worst_h2 <= 2.0 + 1e-6 && worst_excess <= 1e-10;
  return {pass, "100 instances d<=32, max ||h||^2 " + format_g17(worst_h2) +
                    ", worst (error - bound) " + format_g17(worst_excess)};
}

// 6. The all-zeros-branch deficit 1 - P0 scales as 1/Q at fixed beta_f.
Outcome criterion_zeno_law() {
  std::mt19937_64 gen(6006);
  double worst_dev = 0.0;
  for (int instance = 0; instance < 5; ++instance) {
    const int d = 2 + static_cast<int>(uniform01(gen) * 7);
    const EnergyModel model = random_quantized_model(gen, d);
    const Eigen::MatrixXd proposal = random_proposal(gen, d);
    const KernelBuilder builder = [model, proposal](double beta) {
      return metropolis_kernel(model, beta, proposal, 0.5);
    };
    const double beta_f = std::log(2.0 * model.d / 0.01) / model.gamma;
    const double delta =
        min_gap_on_grid(model, builder, beta_f, 64);

    std::vector<double> qs, deficits;
    for (long q : {32L, 64L, 128L, 256L, 512L}) {
      QsaSchedule schedule;
      schedule.q_steps = q;
      schedule.beta_f = beta_f;
      schedule.delta_beta = beta_f / q;
      schedule.nu = schedule.delta_beta * model.e_max;
      schedule.pea = choose_p(schedule.nu, delta, 1.0);
      schedule.epsilon = 0.1;
      schedule.delta = delta;
      const QsaExact exact = qsa_success_exact(model, schedule, builder);
      qs.push_back(static_cast<double>(q));
      deficits.push_back(std::max(1.0 - exact.p_all_zeros, 1e-300));
    }
    const FitResult fit = fit_loglog(qs, deficits);
    worst_dev = std::max(worst_dev, std::abs(fit.slope + 1.0));
  }
  return {worst_dev <= 0.2,
          "5 instances, worst |fit exponent + 1| = " + format_g17(worst_dev)};
}

// 7. Certified failure <= d exp(-beta_f gamma) + tau' Q nu^2 with one fitted
//    tau' <= 10 across the corpus.
Outcome criterion_error_bound() {
  std::mt19937_64 gen(7007);
  double tau_prime = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const int d = 2 + static_cast<int>(uniform01(gen) * 15);
    const EnergyModel model = random_quantized_model(gen, d);
    const Eigen::MatrixXd proposal = random_proposal(gen, d);
    const KernelBuilder builder = [model, proposal](double beta) {
      return metropolis_kernel(model, beta, proposal, 0.5);
    };
    const double beta_f = std::log(2.0 * model.d / 0.01) / model.gamma;
    const double delta = min_gap_on_grid(model, builder, beta_f, 64);
    const QsaSchedule schedule = qsa_schedule(model, delta, 0.1, 1.0, 1.0);
    const QsaExact exact = qsa_success_exact(model, schedule, builder);
    const double failure = 1.0 - exact.p_joint_success;
    const double tail = model.d * std::exp(-schedule.beta_f * model.gamma);
    const double zeno = static_cast<double>(schedule.q_steps) * schedule.nu * schedule.nu;
    tau_prime = std::max(tau_prime, (failure - tail) / zeno);
  }
  return {tau_prime <= 10.0, "50 instances d<=16, fitted tau' = " + format_g17(tau_prime)};
}

// 8. The headline sweep: fitted cost exponents -1 (classical) and -1/2
//    (quantum) over >= 2 decades of delta.
Outcome criterion_headline_scaling() {
  ExperimentConfig cfg;
  cfg.family = Family::barrier_chain;
  cfg.d = 16;
  cfg.barrier_cap = 1.5;
  cfg.grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4};
  cfg.epsilon = 0.1;
  cfg.gap_grid_points = 128;

  const ScalingReport report = scaling_experiment(cfg);
  double delta_min = 1.0, delta_max = 0.0;
  for (const ScalingRow& row : report.rows) {
    delta_min = std::min(delta_min, row.delta);
    delta_max = std::max(delta_max, row.delta);
  }
  const double decades = std::log10(delta_max / delta_min);
  const bool pass = decades >= 2.0 && std::abs(report.sa_fit.slope + 1.0) <= 0.15 &&
                    std::abs(report.qsa_fit.slope + 0.5) <= 0.15;
  std::ostringstream detail;
  detail << "s_sa = " << format_g17(report.sa_fit.slope) << " +- "
         << format_g17(report.sa_fit.std_error)
         << ", s_qsa = " << format_g17(report.qsa_fit.slope) << " +- "
         << format_g17(report.qsa_fit.std_error) << ", " << format_g17(decades)
         << " decades of delta";
  return {pass, detail.str()};
}

// 9. Repeating a CLI invocation with the same seed gives byte-identical CSV.
Outcome criterion_determinism(const std::string& cli_path) {
  if (cli_path.empty()) return {false, "no --cli path provided"};

  const std::string dir = "acceptance_determinism";
  const std::string cfg_path = dir + "/config.cfg";
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(cfg_path);
    cfg << "family=two_level\ngrid=0.5\nepsilon=0.1\nruns=64\nseed=20240811\n";
  }

  auto run = [&](const std::string& sub, const std::string& out) {
    const std::string cmd =
        cli_path + " " + sub + " " + cfg_path + " --out " + dir + "/" + out + " > /dev/null";
    return std::system(cmd.c_str());
  };
  auto slurp = [&](const std::string& rel) {
    std::ifstream in(dir + "/" + rel, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  if (run("qsa", "a") != 0 || run("qsa", "b") != 0 || run("sa", "a") != 0 ||
      run("sa", "b") != 0)
    return {false, "CLI invocation failed"};

  const bool qsa_same = slurp("a/qsa_runs.csv") == slurp("b/qsa_runs.csv") &&
                        !slurp("a/qsa_runs.csv").empty();
  const bool sa_same = slurp("a/sa_trace.csv") == slurp("b/sa_trace.csv") &&
                       slurp("a/sa_runs.csv") == slurp("b/sa_runs.csv") &&
                       !slurp("a/sa_trace.csv").empty();
  const bool pass = qsa_same && sa_same;
  return {pass, std::string("qsa csv ") + (qsa_same ? "identical" : "DIFFER") +
                    ", sa csv " + (sa_same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string cli_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (arg == "--cli" && i + 1 < argc) cli_path = argv[++i];
  }

  struct Entry {
    int index;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "spectral correspondence", [] { return criterion_spectral_correspondence(); }},
      {2, "completion invariance", [] { return criterion_completion_invariance(); }},
      {3, "PEA amplitude law", [] { return criterion_pea_amplitude_law(); }},
      {4, "backend equivalence", [] { return criterion_backend_equivalence(); }},
      {5, "Lyapunov suite", [] { return criterion_lyapunov_suite(); }},
      {6, "Zeno law", [] { return criterion_zeno_law(); }},
      {7, "error bound", [] { return criterion_error_bound(); }},
      {8, "headline scaling", [] { return criterion_headline_scaling(); }},
      {9, "determinism", [&] { return criterion_determinism(cli_path); }},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    if (only != 0 && entry.index != only) continue;
    const Outcome outcome = entry.run();
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << "criterion " << entry.index
              << " (" << entry.name << "): " << outcome.detail << std::endl;
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
