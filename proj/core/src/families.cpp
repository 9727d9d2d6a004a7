#include "qsa/families.hpp"

#include "qsa/errors.hpp"
#include "qsa/markov.hpp"
#include "qsa/rng.hpp"

#include <cmath>

namespace qsa {

Family family_from_string(const std::string& name) {
  if (name == "two_level") return Family::two_level;
  if (name == "barrier_chain") return Family::barrier_chain;
  if (name == "random_energies") return Family::random_energies;
  if (name == "ising_ring") return Family::ising_ring;
  throw UnknownFamily("unknown instance family: " + name);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::two_level: return "two_level";
    case Family::barrier_chain: return "barrier_chain";
    case Family::random_energies: return "random_energies";
    case Family::ising_ring: return "ising_ring";
  }
  return "?";
}

Eigen::MatrixXd ring_proposal(int d) {
  if (d < 2) throw std::invalid_argument("ring_proposal: d >= 2");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
  if (d == 2) {
    p(0, 1) = p(1, 0) = 1.0;
    return p;
  }
  for (int s = 0; s < d; ++s) {
    p((s + 1) % d, s) += 0.5;
    p((s + d - 1) % d, s) += 0.5;
  }
  return p;
}

Eigen::MatrixXd complete_proposal(int d) {
  if (d < 2) throw std::invalid_argument("complete_proposal: d >= 2");
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(d, d, 1.0 / (d - 1));
  p.diagonal().setZero();
  return p;
}

Eigen::MatrixXd spin_flip_proposal(int n_spins) {
  if (n_spins < 1) throw std::invalid_argument("spin_flip_proposal: n_spins >= 1");
  const int d = 1 << n_spins;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
  for (int s = 0; s < d; ++s)
    for (int i = 0; i < n_spins; ++i) p(s ^ (1 << i), s) = 1.0 / n_spins;
  return p;
}

KernelBuilder Instance::builder() const {
  return [model = model, proposal = proposal, lz = laziness](double beta) {
    return metropolis_kernel(model, beta, proposal, lz);
  };
}

namespace {

Instance make_two_level(double alpha, int index) {
  Instance inst;
  inst.family = Family::two_level;
  inst.parameter = alpha;
  inst.id = "two_level-" + std::to_string(index);
  inst.model = build_model(std::vector<double>{0.0, 1.0});
  inst.proposal = ring_proposal(2);
  inst.laziness = alpha;
  return inst;
}

// Ring with a ground well at 0, a second well at 1 on the opposite side and
// a plateau of height 1 + b between them. gamma stays 1 while the escape
// from the second well over the barrier (climb b) slows down as b grows.
// One pinnacle state at the fixed height 1 + barrier_cap sits inside one of
// the two arcs, off the faster escape path, so that e_max and with it the
// whole schedule prefactor are identical across a sweep in b.
Instance make_barrier_chain(double b, int index, const FamilyOptions& opt) {
  if (opt.d < 3) throw ConfigError("barrier_chain: d must be >= 3");
  if (b < 0.0) throw ConfigError("barrier_chain: barrier height must be >= 0");
  if (b > opt.barrier_cap)
    throw ConfigError("barrier_chain: barrier height exceeds barrier_cap");
  Instance inst;
  inst.family = Family::barrier_chain;
  inst.parameter = b;
  inst.id = "barrier_chain-" + std::to_string(index);
  std::vector<double> energies(opt.d, 1.0 + b);
  energies[0] = 0.0;
  energies[opt.d / 2] = 1.0;
  if (opt.d >= 8) energies[opt.d / 4] = 1.0 + opt.barrier_cap;
  inst.model = build_model(energies);
  inst.proposal = ring_proposal(opt.d);
  inst.laziness = opt.laziness;
  return inst;
}

Instance make_random_energies(double grid_value, int index, const FamilyOptions& opt) {
  if (opt.d < 2) throw ConfigError("random_energies: d must be >= 2");
  Instance inst;
  inst.family = Family::random_energies;
  inst.parameter = grid_value;
  inst.id = "random_energies-" + std::to_string(index);
  std::mt19937_64 gen(split_seed(opt.seed, static_cast<std::uint64_t>(grid_value)));
  std::vector<double> energies(opt.d);
  for (double& e : energies) e = uniform01(gen);
  inst.model = build_model(energies);
  inst.proposal = complete_proposal(opt.d);
  inst.laziness = opt.laziness;
  return inst;
}

Instance make_ising_ring(double coupling, int index, const FamilyOptions& opt) {
  if (opt.spins < 2 || opt.spins > 12)
    throw ConfigError("ising_ring: spins must lie in [2, 12]");
  if (coupling == 0.0) throw ConfigError("ising_ring: coupling must be nonzero");
  Instance inst;
  inst.family = Family::ising_ring;
  inst.parameter = coupling;
  inst.id = "ising_ring-" + std::to_string(index);
  const int n = opt.spins;
  const int d = 1 << n;
  std::vector<double> energies(d, 0.0);
  for (int s = 0; s < d; ++s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const int si = (s >> i) & 1 ? 1 : -1;
      const int sj = (s >> ((i + 1) % n)) & 1 ? 1 : -1;
      e -= coupling * si * sj;
    }
    energies[s] = e;
  }
  inst.model = build_model(energies);
  inst.proposal = spin_flip_proposal(n);
  inst.laziness = opt.laziness;
  return inst;
}

}  // namespace

std::vector<Instance> gap_family(Family family, const std::vector<double>& parameter_grid,
                                 const FamilyOptions& options) {
  if (parameter_grid.empty()) throw ConfigError("gap_family: empty parameter grid");
  std::vector<Instance> instances;
  instances.reserve(parameter_grid.size());
  int index = 0;
  for (double value : parameter_grid) {
    switch (family) {
      case Family::two_level:
        // Below 1/2 the swap chain acquires negative eigenvalues at small
        // beta and the walk construction rejects it.
        if (!(value >= 0.5 && value < 1.0))
          throw ConfigError("two_level: laziness grid values must lie in [0.5, 1)");
        instances.push_back(make_two_level(value, index));
        break;
      case Family::barrier_chain:
        instances.push_back(make_barrier_chain(value, index, options));
        break;
      case Family::random_energies:
        instances.push_back(make_random_energies(value, index, options));
        break;
      case Family::ising_ring:
        instances.push_back(make_ising_ring(value, index, options));
        break;
    }
    ++index;
  }
  return instances;
}

double instance_gap(const Instance& inst, double epsilon, int grid_points) {
  const double beta_f =
      std::log(2.0 * inst.model.d / (epsilon * epsilon)) / inst.model.gamma;
  return min_gap_on_grid(inst.model, inst.builder(), beta_f, grid_points);
}

}  // namespace qsa
