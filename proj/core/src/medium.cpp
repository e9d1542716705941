#include "biotms/medium.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace biotms {

LameParameters derive_lame(double E, double eta) {
  if (!(E > 0.0)) throw InvalidInput("derive_lame: Young's modulus must be positive");
  if (!(eta > -1.0 && eta < 0.5)) throw InvalidInput("derive_lame: Poisson ratio must lie in (-1, 1/2)");
  return {eta * E / ((1.0 + eta) * (1.0 - 2.0 * eta)), E / (2.0 * (1.0 + eta))};
}

FieldPattern parse_field_pattern(const std::string& name) {
  if (name == "channels") return FieldPattern::Channels;
  if (name == "blobs") return FieldPattern::Blobs;
  throw InvalidInput("unknown field pattern '" + name + "' (expected channels or blobs)");
}

std::string to_string(FieldPattern pattern) {
  return pattern == FieldPattern::Channels ? "channels" : "blobs";
}

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// uniforms are formed from raw bits.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

struct Segment {
  double x0, y0, x1, y1, half_width;

  [[nodiscard]] bool contains(Point p) const {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    const double t = ((p.x - x0) * dx + (p.y - y0) * dy) / len2;
    if (t < 0.0 || t > 1.0) return false;
    const double qx = x0 + t * dx - p.x;
    const double qy = y0 + t * dy - p.y;
    return qx * qx + qy * qy <= half_width * half_width;
  }
};

struct Box {
  double x0, y0, x1, y1;
  [[nodiscard]] bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct Disk {
  double cx, cy, radius;
  [[nodiscard]] bool contains(Point p) const {
    return (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy) <= radius * radius;
  }
};

}  // namespace

ScalarField generate_high_contrast(int n, FieldPattern pattern, double contrast, std::uint64_t seed) {
  if (n <= 0) throw InvalidInput("generate_high_contrast: n must be positive");
  if (!(contrast >= 1.0)) throw InvalidInput("generate_high_contrast: contrast must be >= 1");

  Uniform uni(seed);
  std::vector<Segment> segments;
  std::vector<Box> boxes;
  std::vector<Disk> disks;

  // Everything stays inside [0.15, 0.85]^2: a stiff inclusion reaching into
  // the outermost ring of coarse blocks (N >= 8) meets the clamped boundary
  // vertices, whose multipliers are removed from the displacement space.
  if (pattern == FieldPattern::Channels) {
    // Long, slightly tilted streaks, two transverse streaks, and a few
    // isolated boxes.
    for (int k = 0; k < 5; ++k) {
      const double y = 0.2 + 0.6 * (k + uni(0.25, 0.75)) / 5.0;
      const double drift = uni(-0.03, 0.03);
      segments.push_back({uni(0.16, 0.3), y - drift, uni(0.7, 0.84), y + drift, 0.5 * uni(0.02, 0.035)});
    }
    for (int k = 0; k < 2; ++k) {
      const double x = uni(0.25, 0.75);
      const double y0 = uni(0.18, 0.45);
      segments.push_back({x, y0, x + uni(-0.04, 0.04), y0 + uni(0.2, 0.35), 0.5 * uni(0.02, 0.03)});
    }
    for (int k = 0; k < 8; ++k) {
      const double side = uni(0.03, 0.06);
      const double x = uni(0.16, 0.84 - side);
      const double y = uni(0.16, 0.84 - side);
      boxes.push_back({x, y, x + side, y + side});
    }
  } else {
    for (int k = 0; k < 14; ++k) {
      const double r = uni(0.025, 0.06);
      disks.push_back({uni(0.16 + r, 0.84 - r), uni(0.16 + r, 0.84 - r), r});
    }
  }

  ScalarField field{n, n, std::vector<double>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 1.0)};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point p{(i + 0.5) / n, (j + 0.5) / n};
      const bool inside = std::any_of(segments.begin(), segments.end(), [&](const Segment& s) { return s.contains(p); }) ||
                          std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(p); }) ||
                          std::any_of(disks.begin(), disks.end(), [&](const Disk& d) { return d.contains(p); });
      if (inside) field.values[static_cast<std::size_t>(i + j * n)] = contrast;
    }
  }
  return field;
}

ScalarField biot_modulus_by_region(const ScalarField& kappa, double background, double inclusion) {
  if (kappa.values.empty()) throw InvalidInput("biot_modulus_by_region: empty permeability field");
  const double kmin = *std::min_element(kappa.values.begin(), kappa.values.end());
  ScalarField m{kappa.rows, kappa.cols, {}};
  m.values.reserve(kappa.values.size());
  for (double k : kappa.values) m.values.push_back(k > kmin ? inclusion : background);
  return m;
}

PoroelasticMedium build_medium(const ScalarField& kappa, double poisson, const ScalarField& biot_modulus,
                               double alpha, double viscosity) {
  if (kappa.rows != kappa.cols || kappa.rows <= 0) throw InvalidInput("build_medium: permeability field must be n x n");
  if (biot_modulus.rows != kappa.rows || biot_modulus.cols != kappa.cols ||
      biot_modulus.values.size() != kappa.values.size()) {
    throw InvalidInput("build_medium: Biot modulus field shape does not match permeability");
  }
  if (!(viscosity > 0.0)) throw InvalidInput("build_medium: viscosity must be positive");

  PoroelasticMedium med;
  med.n = kappa.rows;
  med.poisson = poisson;
  med.alpha = alpha;
  med.viscosity = viscosity;
  const std::size_t cells = kappa.values.size();
  med.kappa = kappa.values;
  med.youngs = kappa.values;
  med.biot_modulus = biot_modulus.values;
  med.lambda.resize(cells);
  med.mu.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    if (!(med.kappa[c] > 0.0)) throw InvalidInput("build_medium: permeability must be positive");
    if (!(med.biot_modulus[c] > 0.0)) throw InvalidInput("build_medium: Biot modulus must be positive");
    const auto lame = derive_lame(med.youngs[c], poisson);
    med.lambda[c] = lame.lambda;
    med.mu[c] = lame.mu;
  }
  return med;
}

}  // namespace biotms
