// Command-line driver: kernel spectra, classical annealing runs, quantum
// annealing runs and gap-scaling experiments, all emitting reproducible CSV.

#include "qsa/classical_sa.hpp"
#include "qsa/energy_model.hpp"
#include "qsa/errors.hpp"
#include "qsa/families.hpp"
#include "qsa/io.hpp"
#include "qsa/markov.hpp"
#include "qsa/phase_estimation.hpp"
#include "qsa/quantum_sa.hpp"
#include "qsa/qwalk.hpp"
#include "qsa/rng.hpp"
#include "qsa/scaling.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

namespace {

using namespace qsa;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<double> c_q;
  std::optional<double> c_pea;
  std::optional<std::string> backend;
  std::optional<std::string> mode;
  std::string out_dir = ".";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
  cmd->add_option("--epsilon", flags.epsilon, "Target error probability");
  cmd->add_option("--tau", flags.tau, "Annealing rate constant");
  cmd->add_option("--c-q", flags.c_q, "Zeno step-count constant");
  cmd->add_option("--c-pea", flags.c_pea, "Register width constant");
  cmd->add_option("--backend", flags.backend, "analytic or dense")
      ->check(CLI::IsMember({"analytic", "dense"}));
  cmd->add_option("--mode", flags.mode, "measure-each or deferred")
      ->check(CLI::IsMember({"measure-each", "deferred"}));
  cmd->add_option("--out", flags.out_dir, "Output directory");
}

ExperimentConfig load_config(const std::string& path, const CommonFlags& flags) {
  ExperimentConfig cfg = parse_config_file(path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.epsilon) {
    if (!(*flags.epsilon > 0.0 && *flags.epsilon < 1.0))
      throw ConfigError("config field 'epsilon': must lie in (0, 1)");
    cfg.epsilon = *flags.epsilon;
  }
  if (flags.tau) {
    if (*flags.tau <= 0.0) throw ConfigError("config field 'tau': must be positive");
    cfg.tau = *flags.tau;
  }
  if (flags.c_q) cfg.c_q = *flags.c_q;
  if (flags.c_pea) cfg.c_pea = *flags.c_pea;
  if (flags.backend) cfg.backend = backend_from_string(*flags.backend);
  if (flags.mode) cfg.mode = mode_from_string(*flags.mode);
  return cfg;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  return out;
}

int cmd_spectrum(const std::string& model_file, double beta, double laziness,
                 const std::string& proposal_name, const std::string& dump_kernel,
                 const std::string& dump_walk, std::uint64_t seed) {
  const EnergyModel model = load_model_file(model_file);
  Eigen::MatrixXd proposal;
  if (proposal_name == "ring") {
    proposal = ring_proposal(model.d);
  } else {
    proposal = complete_proposal(model.d);
  }

  const TransitionKernel kernel = metropolis_kernel(model, beta, proposal, laziness);
  const SymmetricKernel sym = symmetrize(kernel, model);
  const KernelSpectrum spec = kernel_spectrum(sym, kernel);
  const BoltzmannDist pi = boltzmann(model, beta);
  const DetailedBalanceReport balance = verify_detailed_balance(kernel, pi);

  std::cout << "model: d=" << model.d << " gamma=" << format_g17(model.gamma)
            << " e_max=" << format_g17(model.e_max) << '\n';
  std::cout << "kernel: beta=" << format_g17(beta) << " laziness=" << format_g17(laziness)
            << " proposal=" << proposal_name << '\n';
  std::cout << "detailed balance: max violation " << format_g17(balance.max_violation)
            << '\n';
  std::cout << "j,lambda,phi\n";
  for (int j = 0; j < spec.dim(); ++j)
    std::cout << j << ',' << format_g17(spec.lambdas[j]) << ','
              << format_g17(spec.phis[j]) << '\n';
  std::cout << "delta=" << format_g17(spec.delta) << '\n';
  if (spec.degenerate()) std::cout << "warning: degenerate chain (delta = 0)\n";

  if (!dump_kernel.empty()) write_matrix_file(dump_kernel, kernel.matrix);
  if (!dump_walk.empty()) {
    const WalkOperator walk = build_walk_dense(kernel, sym, spec, seed);
    write_matrix_file(dump_walk, walk.dense);
  }
  return 0;
}

int cmd_sa(const ExperimentConfig& cfg, const std::string& out_dir, long trace_stride) {
  const Instance inst = cfg.instances().front();
  const KernelBuilder builder = inst.builder();
  const double delta = instance_gap(inst, cfg.epsilon, cfg.gap_grid_points);
  const SaSchedule schedule = sa_schedule(inst.model, delta, cfg.epsilon, cfg.tau);

  std::cout << "instance " << inst.id << ": d=" << inst.model.d
            << " delta=" << format_g17(delta) << '\n';
  std::cout << "schedule: delta_beta=" << format_g17(schedule.delta_beta)
            << " P=" << schedule.steps << " beta_f=" << format_g17(schedule.beta_f) << '\n';

  const DistributionTrace trace =
      anneal_exact(inst.model, schedule, builder, {.stride = trace_stride});
  {
    std::ofstream out = open_output(out_dir, "sa_trace.csv");
    out << cfg.serialize();
    out << "step,beta,h_norm,error_mass,markov_steps\n";
    for (const TraceRow& row : trace.rows)
      out << row.step << ',' << format_g17(row.beta) << ',' << format_g17(row.h_norm)
          << ',' << format_g17(row.error_mass) << ',' << row.step << '\n';
  }

  const double bound = sa_error_bound(inst.model, schedule.beta_at(schedule.steps));
  std::cout << "final error mass " << format_g17(trace.rows.back().error_mass)
            << " (bound " << format_g17(bound) << ")\n";
  std::cout << "first step at epsilon: " << trace.first_step_at_epsilon << '\n';
  std::cout << "max ||h||^2 " << format_g17(trace.stats.max_h_norm_sq) << '\n';

  if (cfg.runs > 0) {
    std::ofstream out = open_output(out_dir, "sa_runs.csv");
    out << cfg.serialize();
    out << "run,seed,final_state,success\n";
    int failures = 0;
    for (int run = 0; run < cfg.runs; ++run) {
      const std::uint64_t seed = split_seed(cfg.seed, run);
      const SampledRun r = anneal_sampled(inst.model, schedule, builder, seed);
      if (!r.success) ++failures;
      out << run << ',' << seed << ',' << r.final_state << ',' << (r.success ? 1 : 0)
          << '\n';
    }
    std::cout << "sampled failure rate "
              << format_g17(static_cast<double>(failures) / cfg.runs) << " over "
              << cfg.runs << " runs\n";
  }

  if (!trace.stats.lyapunov_ok || trace.rows.back().error_mass > bound + 1e-10) {
    std::cerr << "invariant failure: h-norm or error bound violated\n";
    return 1;
  }
  return 0;
}

int cmd_qsa(const ExperimentConfig& cfg, const std::string& out_dir,
            const std::string& dump_pea) {
  const Instance inst = cfg.instances().front();
  const KernelBuilder builder = inst.builder();
  const double delta = instance_gap(inst, cfg.epsilon, cfg.gap_grid_points);
  const QsaSchedule schedule =
      qsa_schedule(inst.model, delta, cfg.epsilon, cfg.c_q, cfg.c_pea);

  std::cout << "instance " << inst.id << ": d=" << inst.model.d
            << " delta=" << format_g17(delta) << '\n';
  std::cout << "schedule: Q=" << schedule.q_steps << " p=" << schedule.pea.p
            << " nu=" << format_g17(schedule.nu)
            << " walk budget=" << schedule.walk_budget() << '\n';

  const QsaExact exact = qsa_success_exact(inst.model, schedule, builder);
  std::cout << "exact: P(all zeros)=" << format_g17(exact.p_all_zeros)
            << " P(zeros and ground)=" << format_g17(exact.p_joint_success)
            << " certified failure=" << format_g17(1.0 - exact.p_joint_success) << '\n';

  if (!dump_pea.empty()) {
    // Outcome histogram of the first PEA acting on the uniform start state.
    const TransitionKernel kernel = builder(schedule.beta_at(1));
    const KernelSpectrum spec = kernel_spectrum(symmetrize(kernel, inst.model));
    const Eigen::VectorXd amp = gibbs_amplitudes(boltzmann(inst.model, 0.0));
    const WalkBasisState state = state_from_sigma(amp.cast<std::complex<double>>(), spec);
    const Eigen::VectorXd probs = pea_probabilities(state, spec, schedule.pea);
    std::ofstream out = open_output(out_dir, dump_pea);
    out << "m,probability\n";
    for (long m = 0; m < probs.size(); ++m)
      out << m << ',' << format_g17(probs[m]) << '\n';
  }

  std::ofstream out = open_output(out_dir, "qsa_runs.csv");
  out << cfg.serialize();
  out << "instance_id,d,delta,epsilon,Q,p,walk_calls,pea_failures,success,seed\n";
  int failures = 0;
  for (int run = 0; run < cfg.runs; ++run) {
    const std::uint64_t seed = split_seed(cfg.seed, run);
    const QsaResult r = run_qsa(inst.model, schedule, builder, cfg.backend, seed, cfg.mode);
    if (!r.success) ++failures;
    out << inst.id << ',' << inst.model.d << ',' << format_g17(delta) << ','
        << format_g17(cfg.epsilon) << ',' << schedule.q_steps << ',' << schedule.pea.p
        << ',' << r.walk_calls << ',' << r.pea_failures << ',' << (r.success ? 1 : 0)
        << ',' << seed << '\n';
  }
  if (cfg.runs > 0)
    std::cout << "sampled failure rate "
              << format_g17(static_cast<double>(failures) / cfg.runs) << " over "
              << cfg.runs << " runs\n";
  return 0;
}

int cmd_scaling(const ExperimentConfig& cfg, const std::string& out_dir) {
  const ScalingReport report = scaling_experiment(cfg);
  {
    std::ofstream out = open_output(out_dir, "scaling.csv");
    write_scaling_csv(out, cfg, report);
  }
  {
    std::ofstream out = open_output(out_dir, "scaling_report.txt");
    write_scaling_report(out, cfg, report);
  }
  write_scaling_report(std::cout, cfg, report);
  return 0;
}

// Fast self-check of the library invariants; exit 1 on any failure.
int cmd_validate(std::uint64_t seed) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, double worst) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " (worst " << worst << ")\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 gen(seed);

  {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 2 + static_cast<int>(uniform01(gen) * 7);
      std::vector<double> energies(d);
      for (double& e : energies) e = uniform01(gen);
      const EnergyModel model = build_model(energies);
      const double beta = uniform_in(gen, 0.0, 3.0);
      const TransitionKernel kernel =
          metropolis_kernel(model, beta, complete_proposal(d), 0.5);
      const BoltzmannDist pi = boltzmann(model, beta);
      worst = std::max(worst, verify_detailed_balance(kernel, pi).max_violation);
      for (int c = 0; c < d; ++c)
        worst = std::max(worst, std::abs(kernel.matrix.col(c).sum() - 1.0));
    }
    report("detailed balance and stochasticity", worst <= 1e-12, worst);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
      const int d = 2 + static_cast<int>(uniform01(gen) * 5);
      std::vector<double> energies(d);
      for (double& e : energies) e = uniform01(gen);
      const EnergyModel model = build_model(energies);
      const TransitionKernel kernel =
          metropolis_kernel(model, uniform_in(gen, 0.0, 3.0), complete_proposal(d), 0.5);
      const SymmetricKernel sym = symmetrize(kernel, model);
      const KernelSpectrum spec = kernel_spectrum(sym, kernel);
      const WalkOperator walk = build_walk_dense(kernel, sym, spec, gen());
      const PhaseMatchReport match = match_walk_phases(walk, spec);
      worst = std::max({worst, match.worst_pair_error, match.worst_residual_error,
                        match.fixed_point_error});
    }
    report("walk eigenphase correspondence", worst <= 1e-8, worst);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int p = 1 + static_cast<int>(uniform01(gen) * 8);
      const long n = 1L << p;
      const long m = static_cast<long>(uniform01(gen) * n);
      const double phase = uniform_in(gen, 0.0, 2.0 * std::numbers::pi);
      std::complex<double> brute(0.0, 0.0);
      for (long mp = 0; mp < n; ++mp) {
        const double arg = mp * (phase - 2.0 * std::numbers::pi * m / n);
        brute += std::complex<double>(std::cos(arg), std::sin(arg));
      }
      brute /= static_cast<double>(n);
      worst = std::max(worst, std::abs(pea_amplitude(phase, m, p) - brute));
    }
    report("phase estimation closed form", worst <= 1e-10, worst);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const int d = 2 + static_cast<int>(uniform01(gen) * 15);
      std::vector<double> energies(d);
      for (double& e : energies) e = uniform01(gen);
      const EnergyModel model = build_model(energies);
      const KernelBuilder builder = [model](double beta) {
        return metropolis_kernel(model, beta, complete_proposal(model.d), 0.5);
      };
      const double beta_f = std::log(2.0 * model.d / 0.01) / model.gamma;
      const double delta = min_gap_on_grid(model, builder, beta_f, 32);
      const SaSchedule schedule = sa_schedule(model, delta, 0.1, 0.25);
      const DistributionTrace trace =
          anneal_exact(model, schedule, builder, {.stride = schedule.steps});
      worst = std::max(worst, trace.stats.max_h_norm_sq - 2.0);
    }
    report("h-norm Lyapunov bound", worst <= 1e-6, worst);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
      const int d = 2 + static_cast<int>(uniform01(gen) * 3);
      std::vector<double> energies(d);
      for (double& e : energies) e = uniform01(gen);
      const EnergyModel model = build_model(energies);
      const KernelBuilder builder = [model](double beta) {
        return metropolis_kernel(model, beta, complete_proposal(model.d), 0.5);
      };
      QsaSchedule schedule;
      schedule.q_steps = 3;
      schedule.delta_beta = 5e-6;
      schedule.beta_f = schedule.delta_beta * 3;
      schedule.nu = schedule.delta_beta * model.e_max;
      schedule.pea = PeaConfig{3, 1.0};
      schedule.epsilon = 0.1;
      const Eigen::VectorXd analytic =
          qsa_channel_exact(model, schedule, builder, Backend::analytic);
      const Eigen::VectorXd dense =
          qsa_channel_exact(model, schedule, builder, Backend::dense, true, gen());
      worst = std::max(worst, (analytic - dense).cwiseAbs().maxCoeff());
    }
    report("backend equivalence", worst <= 1e-7, worst);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated annealing and its quantum-walk counterpart at desk scale"};
  app.require_subcommand(1);

  std::string model_file;
  double beta = 1.0;
  double laziness = 0.5;
  std::string proposal_name = "ring";
  std::string dump_kernel, dump_walk;
  std::uint64_t spectrum_seed = 1;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Kernel spectrum of a model file");
  spectrum->add_option("model", model_file, "Plain-text model file")->required();
  spectrum->add_option("--beta", beta, "Inverse temperature");
  spectrum->add_option("--laziness", laziness, "Lazy hold probability");
  spectrum->add_option("--proposal", proposal_name, "ring or complete")
      ->check(CLI::IsMember({"ring", "complete"}));
  spectrum->add_option("--dump-kernel", dump_kernel, "Write the kernel matrix dump here");
  spectrum->add_option("--dump-walk", dump_walk, "Write the dense walk matrix dump here");
  spectrum->add_option("--seed", spectrum_seed, "Walk completion seed");

  CommonFlags sa_flags, qsa_flags, scaling_flags;
  std::string sa_config, qsa_config, scaling_config;
  long trace_stride = 1;
  std::string dump_pea;

  CLI::App* sa = app.add_subcommand("sa", "Classical annealing on a config");
  sa->add_option("config", sa_config, "key=value config file")->required();
  sa->add_option("--trace-stride", trace_stride, "Record every k-th trace row");
  add_common_flags(sa, sa_flags);

  CLI::App* qsa_cmd = app.add_subcommand("qsa", "Quantum annealing on a config");
  qsa_cmd->add_option("config", qsa_config, "key=value config file")->required();
  qsa_cmd->add_option("--dump-pea", dump_pea, "Write the first-step PEA histogram here");
  add_common_flags(qsa_cmd, qsa_flags);

  CLI::App* scaling = app.add_subcommand("scaling", "Gap-scaling sweep on a config");
  scaling->add_option("config", scaling_config, "key=value config file")->required();
  add_common_flags(scaling, scaling_flags);

  std::uint64_t validate_seed = 1;
  CLI::App* validate = app.add_subcommand("validate", "Run the invariant self-check");
  validate->add_option("--seed", validate_seed, "Seed for the random corpora");

  try {
    app.parse(argc, argv);
    if (spectrum->parsed())
      return cmd_spectrum(model_file, beta, laziness, proposal_name, dump_kernel,
                          dump_walk, spectrum_seed);
    if (sa->parsed())
      return cmd_sa(load_config(sa_config, sa_flags), sa_flags.out_dir, trace_stride);
    if (qsa_cmd->parsed())
      return cmd_qsa(load_config(qsa_config, qsa_flags), qsa_flags.out_dir, dump_pea);
    if (scaling->parsed())
      return cmd_scaling(load_config(scaling_config, scaling_flags), scaling_flags.out_dir);
    if (validate->parsed()) return cmd_validate(validate_seed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UnknownFamily& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
