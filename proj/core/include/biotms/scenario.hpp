#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "biotms/diagnostics.hpp"
#include "biotms/ms_system.hpp"

namespace biotms {

enum class Model { FluxFree = 1, PressureFixed = 2 };  // model1, model2

Model parse_model(const std::string& name);
std::string to_string(Model model);

/// Flat key = value configuration. Unknown keys are rejected.
struct ScenarioConfig {
  Model model = Model::FluxFree;
  int N = 10;
  int n = 200;
  int Ju = 20;
  int Jg = 2;
  int Jt = 10;
  double T = 1.0;
  Scheme scheme = Scheme::FixedStress;
  int spectral_problem = 1;
  /// "channels" or "blobs" selects the generator, anything else is a field file.
  std::string field = "channels";
  double contrast = 1e4;
  std::uint64_t seed = 1;
  double poisson = 0.2;
  double alpha = 0.9;
  double viscosity = 1.0;
  double biot_background = 1.0;
  double biot_inclusion = 10.0;
  VelocityWeight velocity_weight = VelocityWeight::KappaOverNu;
  /// Scales the initial pressure and the source (0 gives the zero-data run).
  double data_scale = 1.0;
  std::string output = "out";
  /// sweep.<key> = comma separated values
  std::map<std::string, std::string> sweeps;

  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Resolved configuration in the input format (sweep lists included).
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] BoundarySpec boundary() const;
  [[nodiscard]] bool generated_field() const { return field == "channels" || field == "blobs"; }
  /// Short identifier of the permeability field for reports.
  [[nodiscard]] std::string field_id() const;
};

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path);

/// Source of the chosen model: model1 puts +2 in the coarse cell at the
/// origin and -2 in the one at (1, 1); model2 uses f = 1.
SourceFunction model_source(Model model, int N, double scale = 1.0);
/// xy(1-x)(1-y) sampled at fine cell centers.
Vec initial_pressure(const GridHierarchy& grid, double scale = 1.0);

ScalarField build_permeability(const ScenarioConfig& config);

/// Everything that depends only on the geometry, material and model. Offline
/// pieces and fine references are computed on first use and cached; all
/// accessors are safe to call concurrently.
class ScenarioContext {
 public:
  explicit ScenarioContext(const ScenarioConfig& config);

  [[nodiscard]] const GridHierarchy& grid() const { return spaces_.grid; }
  [[nodiscard]] const PoroelasticMedium& medium() const { return medium_; }
  [[nodiscard]] const FineSpaces& spaces() const { return spaces_; }
  [[nodiscard]] const OperatorSet& operators() const { return ops_; }
  [[nodiscard]] const ScalarField& permeability() const { return kappa_; }
  [[nodiscard]] const Vec& load() const { return load_; }
  [[nodiscard]] const Vec& fine_initial_pressure() const { return p0_; }

  /// True when `config` describes the same geometry, medium, model and data.
  [[nodiscard]] bool compatible(const ScenarioConfig& config) const;

  std::vector<Vec> loads(int steps) const;
  /// Final fine reference state for the scheme and step count.
  SystemState reference(Scheme scheme, double T, int steps) const;
  MultiscaleSpace multiscale_space(int Ju, int Jg, SpectralProblem problem) const;
  const ErrorNorms& norms(VelocityWeight weight) const;

  /// Requests the largest displacement basis needed ahead of a sweep so that
  /// later truncations come from a single eigen-solve.
  void reserve_displacement(int Ju) const;

 private:
  const SnapshotSet& snapshots_locked() const;

  ScenarioConfig config_;
  ScalarField kappa_;
  PoroelasticMedium medium_;
  FineSpaces spaces_;
  OperatorSet ops_;
  Vec load_;
  Vec p0_;

  mutable std::mutex mutex_;
  mutable std::map<std::tuple<int, double, int>, SystemState> references_;
  mutable std::unique_ptr<SnapshotSet> snapshots_;
  mutable std::map<int, std::vector<EdgeSpectrum>> spectra_;
  mutable std::vector<EigenPairs> displacement_pairs_;
  mutable int displacement_count_ = 0;
  mutable std::vector<PartitionOfUnity> pous_;
  mutable std::map<int, ErrorNorms> norms_;
};

struct PointResult {
  ScenarioConfig config;
  ErrorReport errors;
  ConservationReport conservation;
  SystemState multiscale;  ///< final state, fine representation
  SystemState reference;   ///< final fine state
  int coarse_dofs = 0;
};

PointResult run_point(const ScenarioContext& context, const ScenarioConfig& config);

/// Writes config.txt, errors.csv, conservation.csv and the field dumps.
void write_outputs(const std::filesystem::path& directory, const ScenarioContext& context, const PointResult& result);

/// Builds the context, runs one point and writes its outputs.
PointResult run_scenario(const ScenarioConfig& config);

/// Cartesian product of the config's sweep lists, in key order with the last
/// key varying fastest.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& config);

/// Runs every sweep point into <output>/point_<k>/ and writes a combined
/// <output>/errors.csv. Points sharing a context run in parallel.
std::vector<PointResult> run_sweep(const ScenarioConfig& config, int workers);

// Field dumps in the field-file format.
ScalarField pressure_field(const GridHierarchy& grid, const Vec& p);
ScalarField displacement_field(const GridHierarchy& grid, const Vec& u, int component);
/// |cell average of the face-element velocity| per fine cell.
ScalarField velocity_magnitude_field(const GridHierarchy& grid, const Vec& g);

/// Acceptance thresholds checked by `run --check`: conservation holds and
/// the pressure and displacement L2 errors are at most 0.1.
bool passes_check(const PointResult& result, std::string* reason = nullptr);

}  // namespace biotms
