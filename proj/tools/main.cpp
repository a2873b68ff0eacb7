#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "output.hpp"
#include "ovsim/config_text.hpp"
#include "ovsim/error.hpp"
#include "ovsim/scene.hpp"
#include "ovsim/signal.hpp"
#include "ovsim/sweep.hpp"
#include "ovsim/thermal.hpp"
#include "ovsim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  double resolution = 0.0;
};

/// Collects stage timings and written files for manifest.json.
class Manifest {
 public:
  Manifest(std::string subcommand, int argc, char** argv) : subcommand_(std::move(subcommand)) {
    for (int i = 1; i < argc; ++i) args_.emplace_back(argv[i]);
  }

  void stage(const std::string& name, Clock::time_point since) {
    stages_[name] = std::chrono::duration<double>(Clock::now() - since).count();
  }
  void output(const fs::path& p) { outputs_.push_back(p.generic_string()); }

  void write(const fs::path& dir, const std::string& hash) const {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json j;
    j["config_hash"] = hash;
    j["version"] = ovsim::kVersion;
    j["subcommand"] = subcommand_;
    j["arguments"] = args_;
    j["stages_seconds"] = stages_;
    j["outputs"] = outputs_;
    j["finished_utc"] = stamp;
    fs::create_directories(dir);
    std::ofstream(dir / "manifest.json") << j.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  std::map<std::string, double> stages_;
  std::vector<std::string> outputs_;
};

void note(const std::string& msg) { std::cerr << "ovsim: " << msg << '\n'; }

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ovsim::ConfigError("config not found: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ovsim::Scene load_scene(const Globals& g) {
  const std::string text = g.config_path.empty() ? ovsim::default_config_text() : read_file(g.config_path);
  ovsim::Scene scene = ovsim::parse_config(text, ovsim::config::environment_with_prefix("OVSIM"));
  if (g.resolution > 0.0) scene.sim.mesh_resolution = g.resolution;
  if (const auto diags = ovsim::validate(scene); !diags.empty()) {
    throw ovsim::ConfigError(diags.front().field + ": " + diags.front().message);
  }
  return scene;
}

int thread_count(const Globals& g) {
  if (g.threads > 0) return g.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

ovsim::ElectrodeMode resolve_mode(const ovsim::Scene& scene, const std::string& name) {
  if (!name.empty()) return ovsim::builtin_mode(name);
  if (!scene.electrode) throw ovsim::ConfigError("no electrode mode configured; pass --mode");
  return *scene.electrode;
}

std::vector<ovsim::ElectrodeMode> parse_modes(const std::string& list) {
  std::vector<ovsim::ElectrodeMode> modes;
  if (list == "all") {
    for (const auto& id : ovsim::builtin_mode_ids()) modes.push_back(ovsim::builtin_mode(id));
    return modes;
  }
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) modes.push_back(ovsim::builtin_mode(item));
  }
  if (modes.empty()) throw ovsim::ConfigError("--modes: empty mode list");
  return modes;
}

std::string hash_with_mode(ovsim::Scene scene, const ovsim::ElectrodeMode& mode) {
  scene.electrode = mode;
  return ovsim::config_hash(scene);
}

struct DumpOptions {
  std::optional<std::string> temps, stress, field, sections, trace;
  double drive_amplitude = 1000.0;
};

std::string snapshot_name(const char* stem, std::size_t n) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, n);
  return buf;
}

int cmd_simulate(const Globals& g, const std::string& mode_name, const DumpOptions& dumps, Manifest& manifest) {
  auto t0 = Clock::now();
  ovsim::Scene scene = load_scene(g);
  const ovsim::ElectrodeMode mode = resolve_mode(scene, mode_name);
  const std::string hash = hash_with_mode(scene, mode);
  const std::string id = ovsim::mode_id(mode.name);
  const fs::path out = g.out_dir;
  manifest.stage("configuration", t0);

  ovsim::EvaluationHooks hooks;
  std::unique_ptr<ovsim::cli::CsvWriter> sections_csv;
  std::vector<ovsim::SectionBirefringence> last_sections;
  double hwv_for_trace = 0.0;

  if (dumps.temps) {
    const fs::path dir = out / *dumps.temps;
    hooks.on_temperature = [&, dir](std::size_t n, double, const ovsim::VoxelMesh& mesh, std::span<const double> T) {
      const fs::path p = dir / snapshot_name("temps", n);
      ovsim::cli::write_temperatures(p, hash, mesh, T);
      manifest.output(p);
    };
  }
  if (dumps.stress) {
    const fs::path dir = out / *dumps.stress;
    hooks.on_stress = [&, dir](std::size_t n, double, const ovsim::VoxelMesh& mesh, const ovsim::StressField& s) {
      const fs::path p = dir / snapshot_name("stress", n);
      ovsim::cli::write_stress(p, hash, mesh, s);
      manifest.output(p);
    };
  }
  if (dumps.sections || dumps.trace) {
    if (dumps.sections) {
      const fs::path p = out / *dumps.sections;
      sections_csv = std::make_unique<ovsim::cli::CsvWriter>(
          p, hash, std::initializer_list<std::string_view>{"snapshot", "time", "section", "delta_n", "theta", "delta"});
      manifest.output(p);
    }
    hooks.on_sections = [&](std::size_t n, double t, std::span<const ovsim::SectionBirefringence> secs) {
      if (sections_csv) {
        for (std::size_t m = 0; m < secs.size(); ++m) {
          sections_csv->cell(static_cast<long long>(n)).cell(t).cell(static_cast<long long>(m));
          sections_csv->cell(secs[m].delta_n).cell(secs[m].theta).cell(secs[m].delta);
          sections_csv->end_row();
        }
      }
      last_sections.assign(secs.begin(), secs.end());
    };
  }
  hooks.on_field = [&](const ovsim::VoxelMesh& mesh, const ovsim::PotentialField& pf, const ovsim::FieldSummary& s) {
    note(id + ": mean field angle " + brief(s.mean_angle) + " deg");
    if (dumps.field) {
      const fs::path p = out / *dumps.field;
      ovsim::cli::write_field(p, hash, mesh, pf);
      manifest.output(p);
    }
  };

  t0 = Clock::now();
  note("simulating " + id);
  const ovsim::ModeResult result = ovsim::evaluate_mode(scene, mode, hooks);
  hwv_for_trace = result.hwv;
  manifest.stage("evaluation", t0);

  t0 = Clock::now();
  const fs::path curve = out / ("curve_" + id + ".csv");
  ovsim::cli::write_curve(curve, hash, result);
  manifest.output(curve);
  if (dumps.trace) {
    ovsim::Drive drive;
    drive.amplitude = dumps.drive_amplitude;
    const ovsim::Waveform w = ovsim::synthesize(last_sections, drive, hwv_for_trace);
    const fs::path p = out / *dumps.trace;
    ovsim::cli::CsvWriter csv(p, hash, {"time", "intensity"});
    for (std::size_t i = 0; i < w.time.size(); ++i) {
      csv.cell(w.time[i]).cell(w.intensity[i]);
      csv.end_row();
    }
    manifest.output(p);
  }
  manifest.stage("output", t0);
  note(id + ": total error " + brief(result.total_error) + ", corrected " +
       brief(result.corrected_total));
  manifest.write(out, hash);
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& modes_list, const std::string& family, int grid,
              Manifest& manifest) {
  auto t0 = Clock::now();
  const ovsim::Scene scene = load_scene(g);
  const std::string hash = ovsim::config_hash(scene);
  const fs::path out = g.out_dir;
  manifest.stage("configuration", t0);

  t0 = Clock::now();
  ovsim::SweepReport report;
  std::optional<ovsim::ModeResult> best;
  if (!family.empty()) {
    ovsim::Family fam;
    if (family == "cu") fam = ovsim::Family::cu;
    else if (family == "ito") fam = ovsim::Family::ito;
    else throw ovsim::ConfigError("--optimize: unknown family '" + family + "' (cu or ito)");
    if (grid < 1) throw ovsim::ConfigError("--grid: must be at least 1");
    note("optimizing " + family + " ratio over " + std::to_string(grid) + " points");
    auto opt = ovsim::optimize_ratio(scene, fam, ovsim::uniform_grid(grid), thread_count(g));
    report = std::move(opt.report);
    best = std::move(opt.best);
  } else {
    const auto modes = parse_modes(modes_list);
    note("sweeping " + std::to_string(modes.size()) + " modes on " + std::to_string(thread_count(g)) + " threads");
    report = ovsim::compare_modes(scene, modes, thread_count(g));
  }
  manifest.stage("evaluation", t0);

  t0 = Clock::now();
  const fs::path rp = out / "report.csv";
  ovsim::cli::write_report(rp, hash, report.results);
  manifest.output(rp);
  for (const auto& r : report.results) {
    const fs::path p = out / ("curve_" + r.name + ".csv");
    ovsim::cli::write_curve(p, hash, r);
    manifest.output(p);
  }
  {
    const fs::path p = out / "ranking.csv";
    ovsim::cli::CsvWriter csv(p, hash, {"rank", "mode"});
    for (std::size_t i = 0; i < report.ranking.size(); ++i) {
      csv.cell(static_cast<long long>(i + 1)).cell(report.ranking[i]);
      csv.end_row();
    }
    manifest.output(p);
  }
  if (!report.trace.empty()) {
    const fs::path p = out / "trace.csv";
    ovsim::cli::CsvWriter csv(p, hash, {"s", "ratio_x", "ratio_y", "objective"});
    for (const auto& t : report.trace) {
      csv.cell(t.s).cell(t.ratio_x).cell(t.ratio_y).cell(t.objective);
      csv.end_row();
    }
    manifest.output(p);
  }
  manifest.stage("output", t0);
  manifest.write(out, hash);

  if (best) note("best ratio: " + best->mode.name + " (" + brief(best->corrected_total) + ")");
  if (report.partial) {
    std::cerr << "ovsim: sweep incomplete: " << report.failure << '\n';
    return 2;
  }
  return 0;
}

int cmd_field(const Globals& g, const std::string& mode_name, const std::optional<std::string>& dump,
              Manifest& manifest) {
  auto t0 = Clock::now();
  const ovsim::Scene scene = load_scene(g);
  const std::vector<ovsim::ElectrodeMode> modes =
      mode_name.empty() ? std::vector{resolve_mode(scene, "")} : parse_modes(mode_name);
  const std::string hash = modes.size() == 1 ? hash_with_mode(scene, modes.front()) : ovsim::config_hash(scene);
  const fs::path out = g.out_dir;
  manifest.stage("configuration", t0);

  t0 = Clock::now();
  const fs::path p = out / "field.csv";
  ovsim::cli::CsvWriter csv(p, hash, {"mode", "angle", "hwv", "Ex", "Ey", "Ez"});
  for (const auto& mode : modes) {
    ovsim::EvaluationHooks hooks;
    const std::string id = ovsim::mode_id(mode.name);
    if (dump) {
      hooks.on_field = [&](const ovsim::VoxelMesh& mesh, const ovsim::PotentialField& pf, const ovsim::FieldSummary&) {
        const fs::path fp = out / (modes.size() == 1 ? fs::path(*dump) : fs::path(*dump) / ("field_" + id + ".csv"));
        ovsim::cli::write_field(fp, hash, mesh, pf);
        manifest.output(fp);
      };
    }
    const ovsim::FieldResult r = ovsim::evaluate_field(scene, mode, hooks);
    csv.cell(r.name).cell(r.mean_angle).cell(r.hwv);
    csv.cell(r.mean_field.x).cell(r.mean_field.y).cell(r.mean_field.z);
    csv.end_row();
    note(r.name + ": angle " + brief(r.mean_angle) + " deg, HWV " + brief(r.hwv) + " V");
  }
  manifest.output(p);
  manifest.stage("evaluation", t0);
  manifest.write(out, hash);
  return 0;
}

ovsim::Waveform read_trace(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ovsim::ConfigError("trace not found: " + path.string());
  ovsim::Waveform w;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw ovsim::ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    }
    try {
      std::size_t pa = 0, pb = 0;
      const double t = std::stod(a, &pa);
      const double v = std::stod(b, &pb);
      w.time.push_back(t);
      w.intensity.push_back(v);
    } catch (const std::exception&) {
      if (w.time.empty()) continue;  // header row
      throw ovsim::ConfigError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  if (w.time.size() < 2) throw ovsim::ConfigError(path.string() + ": trace has fewer than two samples");
  w.sample_rate = static_cast<double>(w.time.size() - 1) / (w.time.back() - w.time.front());
  return w;
}

int cmd_fit(const Globals& g, const std::string& trace_path, double freq, Manifest& manifest) {
  auto t0 = Clock::now();
  const ovsim::Scene scene = load_scene(g);
  const std::string hash = ovsim::config_hash(scene);
  const ovsim::Waveform w = read_trace(trace_path);
  manifest.stage("configuration", t0);

  t0 = Clock::now();
  const ovsim::DriftFit fit = ovsim::fit_drift(w, freq);
  const fs::path p = fs::path(g.out_dir) / "fit.csv";
  ovsim::cli::CsvWriter csv(p, hash, {"I_AC", "phi", "a", "b", "c", "residual_rms", "error"});
  csv.cell(fit.I_AC).cell(fit.phi).cell(fit.a).cell(fit.b).cell(fit.c).cell(fit.residual_rms).cell(fit.error);
  csv.end_row();
  manifest.output(p);
  manifest.stage("fit", t0);
  manifest.write(g.out_dir, hash);
  note("I_AC " + brief(fit.I_AC) + ", error " + brief(fit.error));
  return 0;
}

int cmd_export_mesh(const Globals& g, const std::string& mode_name, const std::string& file, Manifest& manifest) {
  auto t0 = Clock::now();
  ovsim::Scene scene = load_scene(g);
  if (!mode_name.empty()) scene.electrode = ovsim::builtin_mode(mode_name);
  const std::string hash = ovsim::config_hash(scene);
  const ovsim::VoxelMesh mesh = ovsim::build_mesh(scene);
  for (const auto& d : mesh.diagnostics) note(d);
  const fs::path p = fs::path(g.out_dir) / file;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << ovsim::vtk_legacy(mesh);
  manifest.output(p);
  manifest.stage("meshing", t0);
  manifest.write(g.out_dir, hash);
  note(std::to_string(mesh.active_node_count()) + " nodes written to " + p.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-stress birefringence simulator for optical voltage sensors", "ovsim"};
  app.set_version_flag("--version", std::string(ovsim::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("-c,--config", g.config_path, "Scene configuration file (default: built-in scene)");
  app.add_option("-o,--out", g.out_dir, "Output directory");
  app.add_option("-j,--threads", g.threads, "Worker thread cap (default: hardware threads)")->check(CLI::NonNegativeNumber);
  app.add_option("-r,--resolution", g.resolution, "Voxel edge length in metres")->check(CLI::PositiveNumber);

  std::string mode;
  DumpOptions dumps;
  auto* simulate = app.add_subcommand("simulate", "Thermal, mechanical and optical transient for one mode");
  simulate->add_option("-m,--mode", mode, "Built-in mode id or name (default: the configured electrode)");
  simulate->add_option("--dump-temps", dumps.temps, "Per-snapshot nodal temperatures into this directory")
      ->expected(0, 1)->default_str("temps");
  simulate->add_option("--dump-stress", dumps.stress, "Per-snapshot element stress into this directory")
      ->expected(0, 1)->default_str("stress");
  simulate->add_option("--dump-field", dumps.field, "Crystal electric field CSV")->expected(0, 1)->default_str("field.csv");
  simulate->add_option("--dump-sections", dumps.sections, "Per-snapshot section birefringence CSV")
      ->expected(0, 1)->default_str("sections.csv");
  simulate->add_option("--dump-trace", dumps.trace, "Detector trace under sinusoidal drive at the last snapshot")
      ->expected(0, 1)->default_str("trace.csv");
  simulate->add_option("--drive-amplitude", dumps.drive_amplitude, "Drive amplitude for --dump-trace, volts");

  std::string modes_list = "all", family;
  int grid = 5;
  auto* sweep = app.add_subcommand("sweep", "Compare electrode modes or optimize a ratio family");
  sweep->add_option("--modes", modes_list, "'all' or a comma-separated list of modes");
  sweep->add_option("--optimize", family, "Grid-search a ratio family: cu or ito");
  sweep->add_option("--grid", grid, "Grid points for --optimize");

  std::optional<std::string> field_dump;
  auto* field = app.add_subcommand("field", "Electrostatics only: field angle and half-wave voltage");
  field->add_option("-m,--mode", mode, "Mode id, comma-separated list or 'all'");
  field->add_option("--dump-field", field_dump, "Crystal electric field CSV")->expected(0, 1)->default_str("field_dump.csv");

  std::string trace_path;
  double freq = 50.0;
  auto* fit = app.add_subcommand("fit", "Fit drive sinusoid plus quadratic drift to a detector trace");
  fit->add_option("trace", trace_path, "CSV with time and intensity columns")->required();
  fit->add_option("--freq", freq, "Drive frequency, Hz")->check(CLI::PositiveNumber);

  std::string mesh_file = "mesh.vtk";
  auto* export_mesh = app.add_subcommand("export-mesh", "Write the voxel mesh as a legacy VTK grid");
  export_mesh->add_option("-m,--mode", mode, "Electrode mode to lay onto the crystal");
  export_mesh->add_option("--file", mesh_file, "Output file name inside --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  Manifest manifest(sub, argc, argv);
  try {
    if (simulate->parsed()) return cmd_simulate(g, mode, dumps, manifest);
    if (sweep->parsed()) return cmd_sweep(g, sweep->count("--optimize") ? "" : modes_list, family, grid, manifest);
    if (field->parsed()) return cmd_field(g, mode, field_dump, manifest);
    if (fit->parsed()) return cmd_fit(g, trace_path, freq, manifest);
    if (export_mesh->parsed()) return cmd_export_mesh(g, mode, mesh_file, manifest);
  } catch (const ovsim::ConfigError& e) {
    std::cerr << "ovsim: config error: " << e.what() << '\n';
    return 1;
  } catch (const ovsim::SolverError& e) {
    std::cerr << "ovsim: solver failure: " << e.what() << '\n';
    return 2;
  } catch (const ovsim::MeshError& e) {
    std::cerr << "ovsim: mesh error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ovsim: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
