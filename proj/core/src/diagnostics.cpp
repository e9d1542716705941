#include "biotms/diagnostics.hpp"

#include <cmath>
#include <cstdio>

namespace biotms {

ErrorNorms build_error_norms(const GridHierarchy& grid, const PoroelasticMedium& med, const SpMat& elasticity,
                             VelocityWeight weight) {
  if (med.n != grid.fine_per_side()) throw InvalidInput("error norms: medium size does not match the grid");
  const auto cells = all_fine_cells(grid);
  ErrorNorms norms;
  norms.displacement_mass =
      assemble_displacement_mass(grid, cells, nullptr, std::vector<double>(cells.size(), 1.0));
  std::vector<double> w(cells.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    const double ratio = med.kappa[c] / med.viscosity;
    w[c] = weight == VelocityWeight::KappaOverNu ? ratio * ratio : 1.0 / ratio;
  }
  norms.velocity_mass = assemble_velocity_mass(grid, cells, nullptr, w);
  const double area = grid.fine_size() * grid.fine_size();
  norms.pressure_mass = SpMat(grid.num_fine_cells(), grid.num_fine_cells());
  norms.pressure_mass.setIdentity();
  norms.pressure_mass *= area;
  norms.energy = elasticity;
  return norms;
}

namespace {

double quadratic(const SpMat& m, const Vec& x) { return std::sqrt(std::max(0.0, x.dot(m * x))); }

double relative(const SpMat& m, const Vec& candidate, const Vec& reference, const char* name) {
  if (candidate.size() != reference.size() || reference.size() != m.rows()) {
    throw InvalidInput(std::string("compute_errors: ") + name + " vectors have inconsistent lengths");
  }
  const Vec diff = candidate - reference;
  const double ref = quadratic(m, reference);
  const double num = quadratic(m, diff);
  if (ref == 0.0) {
    if (num == 0.0) return 0.0;
    throw InvalidInput(std::string("compute_errors: reference ") + name + " has zero norm");
  }
  return num / ref;
}

}  // namespace

ErrorReport compute_errors(const SystemState& candidate, const SystemState& reference, const ErrorNorms& norms,
                           ErrorMetadata meta) {
  ErrorReport r;
  r.e_l2_u = relative(norms.displacement_mass, candidate.u, reference.u, "displacement");
  r.e_a_u = relative(norms.energy, candidate.u, reference.u, "displacement");
  r.e_l2_p = relative(norms.pressure_mass, candidate.p, reference.p, "pressure");
  r.e_l2_g = relative(norms.velocity_mass, candidate.g, reference.g, "velocity");
  r.meta = std::move(meta);
  return r;
}

std::string csv_header() { return "N,n,Ju,Jg,Jt,scheme,field,e_l2_u,e_a_u,e_l2_p,e_l2_g"; }

std::string csv_row(const ErrorReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g", r.e_l2_u, r.e_a_u, r.e_l2_p, r.e_l2_g);
  const auto& m = r.meta;
  return std::to_string(m.N) + "," + std::to_string(m.n) + "," + std::to_string(m.Ju) + "," + std::to_string(m.Jg) +
         "," + std::to_string(m.Jt) + "," + to_string(m.scheme) + "," + m.field + "," + buf;
}

}  // namespace biotms
