#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biotms/field_io.hpp"

namespace biotms {

struct LameParameters {
  double lambda = 0.0;
  double mu = 0.0;
};

/// Lamé coefficients from Young's modulus and Poisson ratio (plane strain form).
/// Rejects E <= 0 and Poisson ratios outside (-1, 1/2).
LameParameters derive_lame(double youngs_modulus, double poisson_ratio);

enum class FieldPattern { Channels, Blobs };

FieldPattern parse_field_pattern(const std::string& name);
std::string to_string(FieldPattern pattern);

/// Two-valued n x n permeability field: background 1, inclusions `contrast`.
/// Geometry is defined in continuous coordinates and rasterized at cell
/// centers, so the same seed describes the same medium at every resolution.
ScalarField generate_high_contrast(int n, FieldPattern pattern, double contrast, std::uint64_t seed);

/// Cellwise material data on the fine grid. Per-cell vectors are indexed by
/// fine cell (row-major, x fastest).
struct PoroelasticMedium {
  int n = 0;
  std::vector<double> kappa;
  std::vector<double> youngs;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> biot_modulus;
  double poisson = 0.2;
  double alpha = 0.9;
  double viscosity = 1.0;

  [[nodiscard]] int num_cells() const { return n * n; }
};

/// Region-based Biot modulus: `background` where kappa equals its minimum,
/// `inclusion` elsewhere.
ScalarField biot_modulus_by_region(const ScalarField& kappa, double background, double inclusion);

/// Young's modulus follows the permeability cellwise; Lamé parameters via
/// derive_lame.
PoroelasticMedium build_medium(const ScalarField& kappa, double poisson, const ScalarField& biot_modulus,
                               double alpha, double viscosity);

}  // namespace biotms
