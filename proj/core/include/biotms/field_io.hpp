#pragma once

#include <filesystem>
#include <vector>

#include "biotms/types.hpp"

namespace biotms {

/// Row-major scalar grid. Row 0 is the bottom of the domain.
struct ScalarField {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  [[nodiscard]] double at(int row, int col) const { return values[static_cast<std::size_t>(col + row * cols)]; }
};

/// Text format: "<rows> <cols>" on the first line, then rows*cols values,
/// whitespace separated, written with 17 significant digits so that a
/// save/load cycle reproduces every double exactly.
void save_field(const ScalarField& field, const std::filesystem::path& path);

/// Reads the text format above. With `require_positive`, a zero or negative
/// entry is rejected.
ScalarField load_field(const std::filesystem::path& path, bool require_positive = true);

/// Writes a coefficient vector as a "<len> 1" field.
void save_vector(const Vec& values, const std::filesystem::path& path);

}  // namespace biotms
