#pragma once

#include <random>

#include "biotms/fine_fem.hpp"
#include "biotms/medium.hpp"
#include "dense_oracle.hpp"

namespace testing_support {

/// Cellwise random two-valued permeability (1 or `contrast`).
inline biotms::ScalarField random_kappa(int n, double contrast, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution high(0.3);
  biotms::ScalarField f{n, n, std::vector<double>(static_cast<std::size_t>(n * n))};
  for (auto& v : f.values) v = high(rng) ? contrast : 1.0;
  return f;
}

inline biotms::PoroelasticMedium random_medium(int n, double contrast = 100.0, unsigned seed = 7) {
  const auto kappa = random_kappa(n, contrast, seed);
  return biotms::build_medium(kappa, 0.2, biotms::biot_modulus_by_region(kappa, 1.0, 10.0), 0.9, 1.0);
}

inline biotms::PoroelasticMedium uniform_medium(int n) {
  const biotms::ScalarField kappa{n, n, std::vector<double>(static_cast<std::size_t>(n * n), 1.0)};
  return biotms::build_medium(kappa, 0.2, biotms::biot_modulus_by_region(kappa, 1.0, 10.0), 0.9, 1.0);
}

inline oracle::Coefficients coefficients(const biotms::PoroelasticMedium& m) {
  oracle::Coefficients c;
  c.kappa = [&m](int k) { return m.kappa[static_cast<std::size_t>(k)]; };
  c.lambda = [&m](int k) { return m.lambda[static_cast<std::size_t>(k)]; };
  c.mu = [&m](int k) { return m.mu[static_cast<std::size_t>(k)]; };
  c.biot = [&m](int k) { return m.biot_modulus[static_cast<std::size_t>(k)]; };
  c.alpha = m.alpha;
  c.viscosity = m.viscosity;
  return c;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_support
