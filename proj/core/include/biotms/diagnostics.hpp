#pragma once

#include <string>

#include "biotms/time_integrator.hpp"

namespace biotms {

/// Weight inside the velocity error norm: (kappa/nu)^2 as in
/// ||(kappa/nu)(g_ms - g_h)||, or the energy weight nu/kappa.
enum class VelocityWeight { KappaOverNu, Energy };

struct ErrorMetadata {
  int N = 0;
  int n = 0;
  int Ju = 0;
  int Jg = 0;
  int Jt = 0;
  Scheme scheme = Scheme::FixedStress;
  std::string field;
};

/// Relative errors at the final time.
struct ErrorReport {
  double e_l2_u = 0.0;
  double e_a_u = 0.0;
  double e_l2_p = 0.0;
  double e_l2_g = 0.0;
  ErrorMetadata meta;
};

/// Mass matrices defining the L2 norms of the three fields.
struct ErrorNorms {
  SpMat displacement_mass;
  SpMat velocity_mass;
  SpMat pressure_mass;
  SpMat energy;  ///< a-form
};

ErrorNorms build_error_norms(const GridHierarchy& grid, const PoroelasticMedium& medium, const SpMat& elasticity,
                             VelocityWeight weight = VelocityWeight::KappaOverNu);

/// Both states in the fine representation. A field whose reference and
/// candidate are both identically zero reports 0; a zero reference with a
/// nonzero candidate is rejected.
ErrorReport compute_errors(const SystemState& candidate, const SystemState& reference, const ErrorNorms& norms,
                           ErrorMetadata meta = {});

std::string csv_header();
/// One line without trailing newline, values with 6 significant digits.
std::string csv_row(const ErrorReport& report);

}  // namespace biotms
