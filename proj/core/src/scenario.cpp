#include "biotms/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "biotms/parallel.hpp"

namespace biotms {

Model parse_model(const std::string& name) {
  if (name == "model1") return Model::FluxFree;
  if (name == "model2") return Model::PressureFixed;
  throw InvalidInput("unknown model '" + name + "' (expected model1 or model2)");
}

std::string to_string(Model model) { return model == Model::FluxFree ? "model1" : "model2"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InvalidInput("config: bad value '" + value + "' for key '" + key + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> items;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model",    "N",       "n",         "Ju",        "Jg",
      "Jt",       "T",       "scheme",    "spectral_problem",
      "field",    "contrast", "seed",     "poisson",   "alpha",
      "viscosity", "biot_background", "biot_inclusion", "velocity_weight",
      "data_scale", "output"};
  return keys;
}

// Runs a pipeline stage, prefixing any failure with the stage name.
template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw SolverError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key.rfind("sweep.", 0) == 0) {
    const std::string target = key.substr(6);
    if (!known_keys().contains(target)) throw InvalidInput("config: cannot sweep unknown key '" + target + "'");
    if (split_list(value).empty()) throw InvalidInput("config: empty sweep list for '" + target + "'");
    sweeps[target] = value;
    return;
  }
  if (key == "model") model = parse_model(value);
  else if (key == "N") N = parse_number<int>(key, value);
  else if (key == "n") n = parse_number<int>(key, value);
  else if (key == "Ju") Ju = parse_number<int>(key, value);
  else if (key == "Jg") Jg = parse_number<int>(key, value);
  else if (key == "Jt") Jt = parse_number<int>(key, value);
  else if (key == "T") T = parse_number<double>(key, value);
  else if (key == "scheme") scheme = parse_scheme(value);
  else if (key == "spectral_problem") spectral_problem = parse_number<int>(key, value);
  else if (key == "field") field = value;
  else if (key == "contrast") contrast = parse_number<double>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "poisson") poisson = parse_number<double>(key, value);
  else if (key == "alpha") alpha = parse_number<double>(key, value);
  else if (key == "viscosity") viscosity = parse_number<double>(key, value);
  else if (key == "biot_background") biot_background = parse_number<double>(key, value);
  else if (key == "biot_inclusion") biot_inclusion = parse_number<double>(key, value);
  else if (key == "velocity_weight") {
    if (value == "kappa_over_nu") velocity_weight = VelocityWeight::KappaOverNu;
    else if (value == "energy") velocity_weight = VelocityWeight::Energy;
    else throw InvalidInput("config: velocity_weight must be kappa_over_nu or energy");
  } else if (key == "data_scale") data_scale = parse_number<double>(key, value);
  else if (key == "output") output = value;
  else throw InvalidInput("config: unknown key '" + key + "'");
}

void ScenarioConfig::validate() const {
  if (N < 2) throw InvalidInput("config: N must be at least 2");
  if (n < N || n % N != 0) throw InvalidInput("config: n must be a positive multiple of N");
  if (Ju < 1 || Jg < 1 || Jt < 1) throw InvalidInput("config: Ju, Jg and Jt must be positive");
  if (!(T > 0.0)) throw InvalidInput("config: T must be positive");
  parse_spectral_problem(spectral_problem);
  if (generated_field() && !(contrast >= 1.0)) throw InvalidInput("config: contrast must be >= 1");
  if (!(viscosity > 0.0) || !(biot_background > 0.0) || !(biot_inclusion > 0.0)) {
    throw InvalidInput("config: viscosity and Biot moduli must be positive");
  }
  if (!std::isfinite(data_scale)) throw InvalidInput("config: data_scale must be finite");
  if (output.empty()) throw InvalidInput("config: output directory is empty");
}

std::string ScenarioConfig::to_text() const {
  std::ostringstream os;
  os << "model = " << to_string(model) << "\n"
     << "N = " << N << "\n"
     << "n = " << n << "\n"
     << "Ju = " << Ju << "\n"
     << "Jg = " << Jg << "\n"
     << "Jt = " << Jt << "\n"
     << "T = " << format_double(T) << "\n"
     << "scheme = " << to_string(scheme) << "\n"
     << "spectral_problem = " << spectral_problem << "\n"
     << "field = " << field << "\n"
     << "contrast = " << format_double(contrast) << "\n"
     << "seed = " << seed << "\n"
     << "poisson = " << format_double(poisson) << "\n"
     << "alpha = " << format_double(alpha) << "\n"
     << "viscosity = " << format_double(viscosity) << "\n"
     << "biot_background = " << format_double(biot_background) << "\n"
     << "biot_inclusion = " << format_double(biot_inclusion) << "\n"
     << "velocity_weight = " << (velocity_weight == VelocityWeight::KappaOverNu ? "kappa_over_nu" : "energy") << "\n"
     << "data_scale = " << format_double(data_scale) << "\n"
     << "output = " << output << "\n";
  for (const auto& [key, list] : sweeps) os << "sweep." << key << " = " << list << "\n";
  return os.str();
}

BoundarySpec ScenarioConfig::boundary() const {
  return model == Model::FluxFree ? BoundarySpec::flux_free() : BoundarySpec::pressure_fixed();
}

std::string ScenarioConfig::field_id() const {
  if (generated_field()) return field + "-c" + format_double(contrast) + "-s" + std::to_string(seed);
  std::string id = std::filesystem::path(field).filename().string();
  std::replace(id.begin(), id.end(), ',', '_');
  return id;
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig cfg) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SourceFunction model_source(Model model, int N, double scale) {
  if (model == Model::PressureFixed) return [scale](Point, double) { return scale; };
  const double H = 1.0 / N;
  return [H, scale](Point x, double) {
    if (x.x < H && x.y < H) return 2.0 * scale;
    if (x.x > 1.0 - H && x.y > 1.0 - H) return -2.0 * scale;
    return 0.0;
  };
}

Vec initial_pressure(const GridHierarchy& grid, double scale) {
  Vec p(grid.num_fine_cells());
  for (int c = 0; c < grid.num_fine_cells(); ++c) {
    const Point x = grid.fine_cell_center(c);
    p[c] = scale * x.x * x.y * (1.0 - x.x) * (1.0 - x.y);
  }
  return p;
}

ScalarField build_permeability(const ScenarioConfig& cfg) {
  if (cfg.generated_field()) return generate_high_contrast(cfg.n, parse_field_pattern(cfg.field), cfg.contrast, cfg.seed);
  ScalarField f = load_field(cfg.field);
  if (f.rows != cfg.n || f.cols != cfg.n) {
    throw InvalidInput("permeability file " + cfg.field + " is " + std::to_string(f.rows) + "x" + std::to_string(f.cols) +
                       ", expected " + std::to_string(cfg.n) + "x" + std::to_string(cfg.n));
  }
  return f;
}

namespace {

const ScenarioConfig& validated(const ScenarioConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

ScenarioContext::ScenarioContext(const ScenarioConfig& cfg)
    : config_(validated(cfg)),
      kappa_(stage("medium", [&] { return build_permeability(cfg); })),
      medium_(stage("medium", [&] {
        return build_medium(kappa_, cfg.poisson, biot_modulus_by_region(kappa_, cfg.biot_background, cfg.biot_inclusion),
                            cfg.alpha, cfg.viscosity);
      })),
      spaces_(stage("grid", [&] { return build_spaces(GridHierarchy(cfg.N, cfg.n), cfg.boundary()); })) {
  stage("assembly", [&] {
    ops_ = assemble_operators(spaces_, medium_);
    load_ = assemble_load(spaces_.grid, model_source(cfg.model, cfg.N, cfg.data_scale), 0.0);
    p0_ = initial_pressure(spaces_.grid, cfg.data_scale);
  });
}

bool ScenarioContext::compatible(const ScenarioConfig& c) const {
  const ScenarioConfig& a = config_;
  return a.model == c.model && a.N == c.N && a.n == c.n && a.field == c.field && a.contrast == c.contrast &&
         a.seed == c.seed && a.poisson == c.poisson && a.alpha == c.alpha && a.viscosity == c.viscosity &&
         a.biot_background == c.biot_background && a.biot_inclusion == c.biot_inclusion && a.data_scale == c.data_scale;
}

std::vector<Vec> ScenarioContext::loads(int steps) const {
  // Both model sources are constant in time.
  return std::vector<Vec>(static_cast<std::size_t>(steps), load_);
}

SystemState ScenarioContext::reference(Scheme scheme, double T, int steps) const {
  std::lock_guard lock(mutex_);
  const auto key = std::make_tuple(static_cast<int>(scheme), T, steps);
  if (auto it = references_.find(key); it != references_.end()) return it->second;
  return stage("fine reference", [&] {
    const DofMasks masks = DofMasks::from(spaces_);
    const InitialData init = initialize(ops_, masks, p0_);
    const auto f = loads(steps);
    const Trajectory traj = run({scheme, T, steps}, ops_, masks, f, init, false);
    return references_.emplace(key, traj.final_state()).first->second;
  });
}

const SnapshotSet& ScenarioContext::snapshots_locked() const {
  if (!snapshots_) {
    snapshots_ = std::make_unique<SnapshotSet>(
        stage("velocity snapshots", [&] { return build_snapshot_space(spaces_.grid, medium_); }));
  }
  return *snapshots_;
}

void ScenarioContext::reserve_displacement(int Ju) const {
  std::lock_guard lock(mutex_);
  if (Ju <= displacement_count_) return;
  displacement_pairs_ = stage("displacement eigenproblems",
                              [&] { return all_displacement_eigenpairs(spaces_.grid, medium_, Ju); });
  displacement_count_ = Ju;
}

MultiscaleSpace ScenarioContext::multiscale_space(int Ju, int Jg, SpectralProblem problem) const {
  reserve_displacement(Ju);
  std::lock_guard lock(mutex_);
  const GridHierarchy& grid = spaces_.grid;
  if (pous_.empty()) pous_ = stage("partition of unity", [&] { return build_all_pou(grid, medium_); });
  const SnapshotSet& snaps = snapshots_locked();
  auto it = spectra_.find(static_cast<int>(problem));
  if (it == spectra_.end()) {
    it = spectra_.emplace(static_cast<int>(problem),
                          stage("velocity spectra", [&] { return all_edge_spectra(grid, medium_, snaps, problem); }))
             .first;
  }
  MultiscaleSpace ms;
  stage("prolongation", [&] {
    ms.u = assemble_displacement_prolongation(grid, combine_displacement_basis(displacement_pairs_, pous_, Ju));
    ms.g = assemble_velocity_prolongation(grid, truncate_all(it->second, snaps, Jg), spaces_.boundary);
    ms.p = build_coarse_pressure(grid);
  });
  return ms;
}

const ErrorNorms& ScenarioContext::norms(VelocityWeight weight) const {
  std::lock_guard lock(mutex_);
  const int key = static_cast<int>(weight);
  auto it = norms_.find(key);
  if (it == norms_.end()) it = norms_.emplace(key, build_error_norms(spaces_.grid, medium_, ops_.A, weight)).first;
  return it->second;
}

PointResult run_point(const ScenarioContext& ctx, const ScenarioConfig& cfg) {
  cfg.validate();
  if (!ctx.compatible(cfg)) throw InvalidInput("run_point: configuration does not match the scenario context");
  PointResult res;
  res.config = cfg;
  res.reference = ctx.reference(cfg.scheme, cfg.T, cfg.Jt);
  const MultiscaleSpace ms = ctx.multiscale_space(cfg.Ju, cfg.Jg, parse_spectral_problem(cfg.spectral_problem));
  res.coarse_dofs = ms.num_displacement() + ms.num_velocity() + ms.num_pressure();

  const SchemeConfig scheme{cfg.scheme, cfg.T, cfg.Jt};
  const auto loads = ctx.loads(cfg.Jt);
  const MultiscaleSolution sol = stage("multiscale solve", [&] {
    return solve_multiscale(ctx.operators(), ms, scheme, loads,
                            coarse_cell_average(ctx.grid(), ctx.fine_initial_pressure()));
  });
  res.multiscale = sol.fine.back();
  res.conservation = stage("conservation", [&] {
    return conservation_report(ctx.grid(), ctx.operators(), cfg.scheme, sol.fine, sol.fine_initial_previous_displacement,
                               scheme.step_size(), loads);
  });
  res.errors = stage("diagnostics", [&] {
    return compute_errors(res.multiscale, res.reference, ctx.norms(cfg.velocity_weight),
                          {cfg.N, cfg.n, cfg.Ju, cfg.Jg, cfg.Jt, cfg.scheme, cfg.field_id()});
  });
  return res;
}

ScalarField pressure_field(const GridHierarchy& grid, const Vec& p) {
  if (p.size() != grid.num_fine_cells()) throw InvalidInput("pressure_field: wrong length");
  const int n = grid.fine_per_side();
  return {n, n, std::vector<double>(p.data(), p.data() + p.size())};
}

ScalarField displacement_field(const GridHierarchy& grid, const Vec& u, int component) {
  if (u.size() != 2 * grid.num_fine_nodes() || component < 0 || component > 1) {
    throw InvalidInput("displacement_field: wrong length or component");
  }
  const int m = grid.fine_per_side() + 1;
  ScalarField f{m, m, std::vector<double>(static_cast<std::size_t>(m * m))};
  for (int v = 0; v < m * m; ++v) f.values[static_cast<std::size_t>(v)] = u[2 * v + component];
  return f;
}

ScalarField velocity_magnitude_field(const GridHierarchy& grid, const Vec& g) {
  if (g.size() != grid.num_fine_edges()) throw InvalidInput("velocity_magnitude_field: wrong length");
  const int n = grid.fine_per_side();
  ScalarField f{n, n, std::vector<double>(static_cast<std::size_t>(n * n))};
  for (int c = 0; c < n * n; ++c) {
    const auto e = grid.fine_cell_edges(c);
    const double vx = 0.5 * (g[e[0]] + g[e[1]]);
    const double vy = 0.5 * (g[e[2]] + g[e[3]]);
    f.values[static_cast<std::size_t>(c)] = std::hypot(vx, vy);
  }
  return f;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

std::string conservation_csv(const ConservationReport& r) {
  std::ostringstream os;
  os << "step,coarse_cell,residual,threshold\n";
  char buf[64];
  for (std::size_t k = 0; k < r.residuals.size(); ++k) {
    for (std::size_t K = 0; K < r.residuals[k].size(); ++K) {
      std::snprintf(buf, sizeof buf, "%.6g,%.6g", r.residuals[k][K], r.threshold);
      os << k + 1 << "," << K << "," << buf << "\n";
    }
  }
  return os.str();
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const ScenarioContext& ctx, const PointResult& res) {
  stage("output", [&] {
    std::filesystem::create_directories(dir);
    write_text(dir / "config.txt", res.config.to_text());
    write_text(dir / "errors.csv", csv_header() + "\n" + csv_row(res.errors) + "\n");
    write_text(dir / "conservation.csv", conservation_csv(res.conservation));
    const GridHierarchy& grid = ctx.grid();
    for (const auto& [tag, state] : {std::pair<std::string, const SystemState*>{"ms", &res.multiscale},
                                     std::pair<std::string, const SystemState*>{"ref", &res.reference}}) {
      save_field(pressure_field(grid, state->p), dir / (tag + "_pressure.txt"));
      save_field(displacement_field(grid, state->u, 0), dir / (tag + "_ux.txt"));
      save_field(displacement_field(grid, state->u, 1), dir / (tag + "_uy.txt"));
      save_field(velocity_magnitude_field(grid, state->g), dir / (tag + "_velocity.txt"));
    }
    save_field(ctx.permeability(), dir / "kappa.txt");
  });
}

PointResult run_scenario(const ScenarioConfig& cfg) {
  const ScenarioContext ctx(cfg);
  PointResult res = run_point(ctx, cfg);
  write_outputs(cfg.output, ctx, res);
  return res;
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg) {
  std::vector<ScenarioConfig> points{cfg};
  points.front().sweeps.clear();
  for (const auto& [key, list] : cfg.sweeps) {
    std::vector<ScenarioConfig> next;
    for (const auto& p : points) {
      for (const auto& value : split_list(list)) {
        ScenarioConfig q = p;
        q.set(key, value);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<PointResult> run_sweep(const ScenarioConfig& cfg, int workers) {
  std::vector<ScenarioConfig> points = expand_sweep(cfg);
  for (std::size_t k = 0; k < points.size(); ++k) {
    points[k].output = (std::filesystem::path(cfg.output) / ("point_" + std::to_string(k))).string();
    points[k].validate();
  }
  std::filesystem::create_directories(cfg.output);
  write_text(std::filesystem::path(cfg.output) / "config.txt", cfg.to_text());

  std::vector<PointResult> results(points.size());
  std::vector<char> done(points.size(), 0);
  for (std::size_t first = 0; first < points.size(); ++first) {
    if (done[first]) continue;
    const ScenarioContext ctx(points[first]);
    std::vector<std::size_t> group;
    int max_ju = 0;
    for (std::size_t k = first; k < points.size(); ++k) {
      if (!done[k] && ctx.compatible(points[k])) {
        group.push_back(k);
        max_ju = std::max(max_ju, points[k].Ju);
      }
    }
    // Shared offline data first, so that the parallel points only read.
    ctx.reserve_displacement(max_ju);
    for (std::size_t k : group) {
      ctx.reference(points[k].scheme, points[k].T, points[k].Jt);
      ctx.norms(points[k].velocity_weight);
    }
    parallel_for(static_cast<int>(group.size()), [&](int i) {
      const std::size_t k = group[static_cast<std::size_t>(i)];
      results[k] = run_point(ctx, points[k]);
      write_outputs(points[k].output, ctx, results[k]);
    }, workers);
    for (std::size_t k : group) done[k] = 1;
  }

  std::string csv = csv_header() + "\n";
  for (const auto& r : results) csv += csv_row(r.errors) + "\n";
  write_text(std::filesystem::path(cfg.output) / "errors.csv", csv);
  return results;
}

bool passes_check(const PointResult& r, std::string* reason) {
  std::string why;
  if (!r.conservation.conserved()) why = "mass conservation residual above threshold";
  else if (!(r.errors.e_l2_p <= 0.1)) why = "pressure L2 error above 0.1";
  else if (!(r.errors.e_l2_u <= 0.1)) why = "displacement L2 error above 0.1";
  if (reason) *reason = why;
  return why.empty();
}

}  // namespace biotms
