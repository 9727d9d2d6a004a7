#include "qsa/scaling.hpp"

#include "qsa/errors.hpp"
#include "qsa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

namespace qsa {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config field '" + key + "': bad number '" + value + "'");
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config field '" + key + "': bad integer '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("config field '" + key + "': bad integer '" + value + "'");
  return out;
}

std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  std::vector<double> grid;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ','))
    grid.push_back(parse_double(key, item));
  if (grid.empty()) throw ConfigError("config field '" + key + "': empty grid");
  return grid;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Backend backend_from_string(const std::string& s) {
  if (s == "analytic") return Backend::analytic;
  if (s == "dense") return Backend::dense;
  throw ConfigError("config field 'backend': expected analytic or dense, got '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
  if (s == "measure-each") return Mode::measure_each;
  if (s == "deferred") return Mode::deferred;
  throw ConfigError("config field 'mode': expected measure-each or deferred, got '" + s + "'");
}

std::string to_string(Backend b) { return b == Backend::analytic ? "analytic" : "dense"; }
std::string to_string(Mode m) { return m == Mode::measure_each ? "measure-each" : "deferred"; }

FamilyOptions ExperimentConfig::family_options() const {
  FamilyOptions opt;
  opt.d = d;
  opt.spins = spins;
  opt.laziness = laziness;
  opt.barrier_cap = barrier_cap;
  opt.seed = seed;
  return opt;
}

std::vector<Instance> ExperimentConfig::instances() const {
  return gap_family(family, grid, family_options());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "# family=" << to_string(family) << '\n';
  out << "# d=" << d << '\n';
  out << "# spins=" << spins << '\n';
  out << "# coupling=" << format_g17(coupling) << '\n';
  out << "# laziness=" << format_g17(laziness) << '\n';
  out << "# barrier_cap=" << format_g17(barrier_cap) << '\n';
  out << "# grid=";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out << ',';
    out << format_g17(grid[i]);
  }
  out << '\n';
  out << "# epsilon=" << format_g17(epsilon) << '\n';
  out << "# tau=" << format_g17(tau) << '\n';
  out << "# c_q=" << format_g17(c_q) << '\n';
  out << "# c_pea=" << format_g17(c_pea) << '\n';
  out << "# runs=" << runs << '\n';
  out << "# seed=" << seed << '\n';
  out << "# backend=" << to_string(backend) << '\n';
  out << "# mode=" << to_string(mode) << '\n';
  out << "# gap_grid_points=" << gap_grid_points << '\n';
  return out.str();
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  bool family_set = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "family") {
      cfg.family = family_from_string(value);
      family_set = true;
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_long(key, value));
      if (cfg.d < 2) throw ConfigError("config field 'd': must be >= 2");
    } else if (key == "spins") {
      cfg.spins = static_cast<int>(parse_long(key, value));
    } else if (key == "coupling") {
      cfg.coupling = parse_double(key, value);
    } else if (key == "barrier_cap") {
      cfg.barrier_cap = parse_double(key, value);
      if (cfg.barrier_cap <= 0.0)
        throw ConfigError("config field 'barrier_cap': must be positive");
    } else if (key == "laziness") {
      cfg.laziness = parse_double(key, value);
      if (!(cfg.laziness >= 0.0 && cfg.laziness < 1.0))
        throw ConfigError("config field 'laziness': must lie in [0, 1)");
    } else if (key == "grid") {
      cfg.grid = parse_grid(key, value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, value);
      if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        throw ConfigError("config field 'epsilon': must lie in (0, 1)");
    } else if (key == "tau") {
      cfg.tau = parse_double(key, value);
      if (cfg.tau <= 0.0) throw ConfigError("config field 'tau': must be positive");
    } else if (key == "c_q") {
      cfg.c_q = parse_double(key, value);
      if (cfg.c_q <= 0.0) throw ConfigError("config field 'c_q': must be positive");
    } else if (key == "c_pea") {
      cfg.c_pea = parse_double(key, value);
      if (cfg.c_pea <= 0.0) throw ConfigError("config field 'c_pea': must be positive");
    } else if (key == "runs") {
      cfg.runs = static_cast<int>(parse_long(key, value));
      if (cfg.runs < 0) throw ConfigError("config field 'runs': must be >= 0");
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "backend") {
      cfg.backend = backend_from_string(value);
    } else if (key == "mode") {
      cfg.mode = mode_from_string(value);
    } else if (key == "gap_grid_points") {
      cfg.gap_grid_points = static_cast<int>(parse_long(key, value));
      if (cfg.gap_grid_points < 2)
        throw ConfigError("config field 'gap_grid_points': must be >= 2");
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (!family_set) throw ConfigError("config is missing required key: family");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need >= 2 matched points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  FitResult fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
    ss_res += r * r;
  }
  if (n > 2) fit.std_error = std::sqrt(ss_res / (n - 2) / (sxx - sx * sx / n));
  return fit;
}

namespace {

ScalingRow run_instance(const ExperimentConfig& config, const Instance& inst) {
  ScalingRow row;
  row.instance_id = inst.id;
  row.parameter = inst.parameter;
  row.d = inst.model.d;
  row.epsilon = config.epsilon;

  const KernelBuilder builder = inst.builder();
  row.delta = instance_gap(inst, config.epsilon, config.gap_grid_points);

  const SaSchedule sa = sa_schedule(inst.model, row.delta, config.epsilon, config.tau);
  const DistributionTrace trace =
      anneal_exact(inst.model, sa, builder, {.stride = std::max<long>(1, sa.steps)});
  row.markov_steps = trace.first_step_at_epsilon >= 0 ? trace.first_step_at_epsilon : sa.steps;
  row.sa_final_error = trace.rows.back().error_mass;
  row.sa_bound = sa_error_bound(inst.model, sa.beta_at(sa.steps));

  const QsaSchedule qsa =
      qsa_schedule(inst.model, row.delta, config.epsilon, config.c_q, config.c_pea);
  row.q_steps = qsa.q_steps;
  row.p = qsa.pea.p;
  row.walk_calls = qsa.walk_budget();
  const QsaExact exact = qsa_success_exact(inst.model, qsa, builder);
  row.qsa_failure_cert = 1.0 - exact.p_joint_success;
  row.p_all_zeros = exact.p_all_zeros;

  const CostPrediction pred = predicted_costs(inst.model, row.delta, config.epsilon,
                                              {config.tau, config.c_q, config.c_pea});
  row.predicted_n_sa = pred.n_sa;
  row.predicted_n_qsa = pred.n_qsa;
  return row;
}

}  // namespace

ScalingReport scaling_experiment(const ExperimentConfig& config) {
  const std::vector<Instance> instances = config.instances();

  std::vector<std::future<ScalingRow>> futures;
  futures.reserve(instances.size());
  for (const Instance& inst : instances)
    futures.push_back(std::async(std::launch::async,
                                 [&config, &inst] { return run_instance(config, inst); }));

  ScalingReport report;
  for (auto& f : futures) report.rows.push_back(f.get());

  std::vector<double> deltas, sa_costs, qsa_costs;
  for (const ScalingRow& row : report.rows) {
    deltas.push_back(row.delta);
    sa_costs.push_back(static_cast<double>(std::max<long>(1, row.markov_steps)));
    qsa_costs.push_back(static_cast<double>(row.walk_calls));
    if (row.predicted_n_sa > 0.0) {
      const double ratio =
          std::max(sa_costs.back() / row.predicted_n_sa, row.predicted_n_sa / sa_costs.back());
      report.worst_ratio_sa = std::max(report.worst_ratio_sa, ratio);
    }
    if (row.predicted_n_qsa > 0.0) {
      const double ratio = std::max(qsa_costs.back() / row.predicted_n_qsa,
                                    row.predicted_n_qsa / qsa_costs.back());
      report.worst_ratio_qsa = std::max(report.worst_ratio_qsa, ratio);
    }
  }
  if (report.rows.size() >= 2) {
    report.sa_fit = fit_loglog(deltas, sa_costs);
    report.qsa_fit = fit_loglog(deltas, qsa_costs);
  }
  return report;
}

void write_scaling_csv(std::ostream& out, const ExperimentConfig& config,
                       const ScalingReport& report) {
  out << config.serialize();
  out << "instance_id,parameter,d,delta,epsilon,Q,p,markov_steps,walk_calls,"
         "predicted_n_sa,predicted_n_qsa,sa_final_error,sa_bound,qsa_failure_cert,"
         "p_all_zeros\n";
  for (const ScalingRow& r : report.rows) {
    out << r.instance_id << ',' << format_g17(r.parameter) << ',' << r.d << ','
        << format_g17(r.delta) << ',' << format_g17(r.epsilon) << ',' << r.q_steps << ','
        << r.p << ',' << r.markov_steps << ',' << r.walk_calls << ','
        << format_g17(r.predicted_n_sa) << ',' << format_g17(r.predicted_n_qsa) << ','
        << format_g17(r.sa_final_error) << ',' << format_g17(r.sa_bound) << ','
        << format_g17(r.qsa_failure_cert) << ',' << format_g17(r.p_all_zeros) << '\n';
  }
}

void write_scaling_report(std::ostream& out, const ExperimentConfig& config,
                          const ScalingReport& report) {
  out << "scaling experiment: " << to_string(config.family) << ", "
      << report.rows.size() << " instances\n";
  out << config.serialize();
  out << "fitted log-log slopes (cost vs delta):\n";
  out << "  s_sa  = " << format_g17(report.sa_fit.slope) << " +- "
      << format_g17(report.sa_fit.std_error) << '\n';
  out << "  s_qsa = " << format_g17(report.qsa_fit.slope) << " +- "
      << format_g17(report.qsa_fit.std_error) << '\n';
  out << "prediction envelope (worst measured/predicted ratio either way):\n";
  out << "  sa  = " << format_g17(report.worst_ratio_sa) << '\n';
  out << "  qsa = " << format_g17(report.worst_ratio_qsa) << '\n';
  out << "per instance:\n";
  for (const ScalingRow& r : report.rows) {
    out << "  " << r.instance_id << ": delta=" << format_g17(r.delta)
        << " markov_steps=" << r.markov_steps << " walk_calls=" << r.walk_calls
        << " qsa_failure_cert=" << format_g17(r.qsa_failure_cert) << '\n';
  }
}

}  // namespace qsa
