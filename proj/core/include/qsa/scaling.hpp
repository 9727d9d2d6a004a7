#pragma once

#include "qsa/families.hpp"
#include "qsa/quantum_sa.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qsa {

// Flat key=value experiment configuration. Every stream of randomness is a
// pure function of `seed`, so identical configs give byte-identical outputs.
struct ExperimentConfig {
  Family family = Family::barrier_chain;
  int d = 16;
  int spins = 3;
  double coupling = 1.0;
  double laziness = 0.5;
  double barrier_cap = 1.5;
  std::vector<double> grid = {0.5, 0.75, 1.0, 1.25, 1.5};
  double epsilon = 0.1;
  double tau = 0.25;
  double c_q = 1.0;
  double c_pea = 1.0;
  int runs = 100;
  std::uint64_t seed = 1;
  Backend backend = Backend::analytic;
  Mode mode = Mode::measure_each;
  int gap_grid_points = 256;

  FamilyOptions family_options() const;
  std::vector<Instance> instances() const;
  std::string serialize() const;  // "# key=value" lines, fixed order
};

ExperimentConfig parse_config(std::istream& in);          // throws ConfigError
ExperimentConfig parse_config_file(const std::string& path);

Backend backend_from_string(const std::string&);
Mode mode_from_string(const std::string&);
std::string to_string(Backend);
std::string to_string(Mode);

struct ScalingRow {
  std::string instance_id;
  double parameter = 0.0;
  int d = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  long q_steps = 0;
  int p = 0;
  long markov_steps = 0;            // smallest step with exact error mass <= epsilon
  std::uint64_t walk_calls = 0;     // Q (2^p - 1) of the certified run
  double predicted_n_sa = 0.0;
  double predicted_n_qsa = 0.0;
  double sa_final_error = 0.0;
  double sa_bound = 0.0;
  double qsa_failure_cert = 0.0;    // 1 - P(all zeros and ground)
  double p_all_zeros = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of log(y) on log(x).
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingReport {
  std::vector<ScalingRow> rows;
  FitResult sa_fit;
  FitResult qsa_fit;
  double worst_ratio_sa = 0.0;   // max of measured/predicted and its inverse
  double worst_ratio_qsa = 0.0;
};

// Classical cost is measured by running the exact propagation, quantum cost
// is the walk budget of the certified all-zeros run. Instances execute
// concurrently; rows are reported in grid order.
ScalingReport scaling_experiment(const ExperimentConfig& config);

void write_scaling_csv(std::ostream& out, const ExperimentConfig& config,
                       const ScalingReport& report);
void write_scaling_report(std::ostream& out, const ExperimentConfig& config,
                          const ScalingReport& report);

}  // namespace qsa
