#include "qsa/energy_model.hpp"

#include "qsa/errors.hpp"
#include "qsa/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qsa {

bool EnergyModel::is_ground(int sigma) const {
  return std::binary_search(ground_set.begin(), ground_set.end(), sigma);
}

EnergyModel build_model(const Eigen::VectorXd& energies) {
  const int d = static_cast<int>(energies.size());
  if (d < 2) throw TooSmall("energy model needs at least 2 states, got " + std::to_string(d));

  EnergyModel m;
  m.d = d;
  m.energies = energies;
  const double raw_min = m.energies.minCoeff();
  m.shift = raw_min < 0.0 ? -raw_min : 0.0;
  if (m.shift != 0.0) m.energies.array() += m.shift;

  const double e0 = m.energies.minCoeff();
  double gamma = std::numeric_limits<double>::infinity();
  for (int s = 0; s < d; ++s) {
    if (m.energies[s] == e0) {
      m.ground_set.push_back(s);
    } else {
      gamma = std::min(gamma, m.energies[s] - e0);
    }
  }
  if (static_cast<int>(m.ground_set.size()) == d)
    throw AllDegenerate("all states share the minimum energy");

  m.gamma = gamma;
  m.e_max = m.energies.cwiseAbs().maxCoeff();
  return m;
}

EnergyModel build_model(const std::vector<double>& energies) {
  return build_model(Eigen::Map<const Eigen::VectorXd>(energies.data(),
                                                       static_cast<Eigen::Index>(energies.size())));
}

BoltzmannDist boltzmann(const EnergyModel& model, double beta) {
  if (beta < 0.0) throw std::invalid_argument("boltzmann: beta must be >= 0");

  const double e_min = model.energies.minCoeff();
  BoltzmannDist dist;
  dist.beta = beta;
  Eigen::VectorXd w = (-(model.energies.array() - e_min) * beta).exp();
  const double z = w.sum();
  dist.probabilities = w / z;
  dist.log_partition = std::log(z) - beta * e_min;
  dist.partition = std::exp(dist.log_partition);
  return dist;
}

Eigen::VectorXd gibbs_amplitudes(const BoltzmannDist& dist) {
  return dist.probabilities.cwiseSqrt();
}

EnergyModel load_model(std::istream& in) {
  int d = 0;
  if (!(in >> d)) throw ParseError("model file: missing state count");
  if (d < 2) throw TooSmall("model file: d < 2");
  Eigen::VectorXd energies(d);
  for (int i = 0; i < d; ++i) {
    int index = -1;
    double e = 0.0;
    if (!(in >> index >> e)) throw ParseError("model file: truncated at line " + std::to_string(i + 2));
    if (index != i) throw ParseError("model file: expected index " + std::to_string(i) +
                                     ", got " + std::to_string(index));
    energies[i] = e;
  }
  return build_model(energies);
}

EnergyModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  return load_model(in);
}

void save_model(std::ostream& out, const EnergyModel& model) {
  out << model.d << '\n';
  for (int i = 0; i < model.d; ++i)
    out << i << ' ' << format_g17(model.energies[i]) << '\n';
}

}  // namespace qsa
