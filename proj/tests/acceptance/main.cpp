// End-to-end acceptance run on the default scene. Prints one PASS/FAIL line per
// criterion and exits nonzero if any criterion fails.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ovsim/mechanics.hpp"
#include "ovsim/optics.hpp"
#include "ovsim/signal.hpp"
#include "ovsim/sweep.hpp"
#include "ovsim/thermal.hpp"

using namespace ovsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int n, Verdict& v) {
  std::printf("criterion %d: %s%s\n", n, v.pass ? "PASS" : "FAIL", v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const std::map<std::string, double> kTableAngles = {{"cu_10_0", 89.99}, {"cu_5_2", 71.79}, {"cu_5_4", 59.87},
                                                    {"ito_0_5", 29.61}, {"ito_0_7", 7.63},  {"ito_0_10", 0.00}};

std::string block_text(double ez, double res, bool heater, double h, double k, double t_total, double t_step,
                       double ex = 4e-3) {
  std::ostringstream s;
  s.precision(17);
  s << "[simulation]\nt_total = " << t_total << "\nt_step = " << t_step << "\nconvection_h = " << h
    << "\nmesh_resolution = " << res << "\n[materials.m]\ndensity = 7130\nspecific_heat = 350\npoisson = 0.2\n"
    << "youngs = 7.31e10\nthermal_expansion = 6.3e-6\nconductivity = " << k << "\n"
    << "[optics]\ncrystal = \"m\"\nbase_index = 2.07\nq11 = -2.995e-13\nq12 = 0\nq44 = -1.365e-12\nr41 = 1.03e-12\n"
    << "[primitive.crystal]\nshape = \"box\"\nmaterial = \"m\"\norigin = [0, 0, 0]\nextents = [" << ex << ", " << ex
    << ", " << ez << "]\nheater = " << (heater ? "true" : "false") << "\n[path]\nentry = [0, " << ex / 2 << ", "
    << ez / 2 << "]\ndirection = [1, 0, 0]\nlength = " << ex << "\n";
  return s.str();
}

// ---------------------------------------------------------------------------------------

struct Sweep {
  std::vector<ModeResult> results;
  std::map<std::string, double> seconds;
  bool max_principle = true;
  double worst_T_excursion = 0.0;
};

Sweep run_default_sweep(const Scene& scene) {
  Sweep out;
  EvaluationHooks hooks;
  hooks.on_temperature = [&](std::size_t, double, const VoxelMesh&, std::span<const double> T) {
    const auto [lo, hi] = std::minmax_element(T.begin(), T.end());
    const double ex = std::max(scene.sim.ambient_T - *lo, *hi - scene.sim.heater_T);
    out.worst_T_excursion = std::max(out.worst_T_excursion, ex);
    if (ex > 1e-9) out.max_principle = false;
  };
  for (const auto& id : builtin_mode_ids()) {
    const auto t0 = Clock::now();
    out.results.push_back(evaluate_mode(scene, builtin_mode(id), hooks));
    out.seconds[id] = seconds_since(t0);
    const auto& r = out.results.back();
    std::fprintf(stderr, "  %-9s angle %7.3f  hwv %10.4g V  total %.4e  (%.1f s)\n", id.c_str(), r.mean_angle, r.hwv,
                 r.total_error, out.seconds[id]);
  }
  return out;
}

const ModeResult& find(const Sweep& s, const std::string& id) {
  return *std::find_if(s.results.begin(), s.results.end(), [&](const ModeResult& r) { return r.name == id; });
}

// ---------------------------------------------------------------------------------------

void criterion1(const Scene& scene, const Sweep& sw) {
  Verdict v;
  double worst1 = 0, worst05 = 0, slowest = 0;
  for (const auto& r : sw.results) {
    const double d = std::abs(r.mean_angle - kTableAngles.at(r.name));
    worst1 = std::max(worst1, d);
    v.require(d <= 2.0, r.name + " angle " + fmt("%.3f", r.mean_angle) + " at 1 mm");
    slowest = std::max(slowest, sw.seconds.at(r.name));
  }
  Scene fine = scene;
  fine.sim.mesh_resolution = 0.5e-3;
  for (const auto& id : builtin_mode_ids()) {
    const double a = evaluate_field(fine, builtin_mode(id)).mean_angle;
    const double d = std::abs(a - kTableAngles.at(id));
    worst05 = std::max(worst05, d);
    v.require(d <= 1.0, id + " angle " + fmt("%.3f", a) + " at 0.5 mm");
  }
  v.require(slowest < 60.0, "slowest mode " + fmt("%.1f", slowest) + " s");
  v.detail << " field angles: max deviation " << fmt("%.2f", worst1) << " deg at 1 mm (band 2), "
           << fmt("%.2f", worst05) << " deg at 0.5 mm (band 1); slowest mode " << fmt("%.1f", slowest) << " s (< 60)";
  report(1, v);
}

void criterion2(const Scene& scene, const Sweep& sw) {
  Verdict v;
  const double cu = find(sw, "cu_10_0").hwv;
  const double ito = find(sw, "ito_0_10").hwv;
  v.require(std::abs(cu - 47.06e3) <= 0.2 * 47.06e3, "Cu 10:0 HWV " + fmt("%.5g", cu));
  v.require(ito >= 10.0 * cu, "ITO 0:10 HWV " + fmt("%.5g", ito));
  Scene half = scene;
  half.optics.r41 *= 0.5;
  bool doubled = true;
  for (const auto& r : sw.results) {
    const double h = evaluate_field(half, r.mode).hwv;
    if (!(h == 2.0 * r.hwv)) doubled = false;
  }
  v.require(doubled, "r41 halving did not double every HWV exactly");
  v.detail << " half-wave voltage: Cu 10:0 " << fmt("%.2f", cu / 1e3) << " kV (47.06 +/- 20%), ITO 0:10 "
           << (std::isinf(ito) ? std::string("inf") : fmt("%.4g", ito / 1e3) + " kV")
           << " (>= 10x), r41/2 doubles all: " << (doubled ? "yes" : "no");
  report(2, v);
}

void criterion3(const Sweep& sw) {
  Verdict v;
  const double T60 = find(sw, "cu_10_0").curve.back().crystal_T;
  v.require(std::abs(T60 - 315.0) <= 5.0, "crystal mean at 60 s " + fmt("%.2f", T60) + " K");

  // 1-D slab: base held at the heater temperature, everything else insulated.
  const Scene slab = parse_config(block_text(10e-3, 0.5e-3, true, 0.0, 1.8, 100.0, 0.25, 1e-3));
  const VoxelMesh m = build_mesh(slab);
  const TemperatureHistory h = run_transient(m, slab.materials, slab.sim);
  const double dT = slab.sim.heater_T - slab.sim.ambient_T;
  const double diffusivity = 1.8 / (7130.0 * 350.0);
  double worst = 0.0;
  for (std::size_t n = 40; n < h.snapshot_count(); n += 40) {
    for (std::size_t i = 0; i < m.active_nodes.size(); ++i) {
      const double z = m.node_position(m.active_nodes[i]).z;
      double series = 0.0;
      for (int k = 0; k < 400; ++k) {
        const double q = (2 * k + 1) * kPi / (2 * 10e-3);
        series += 4.0 / ((2 * k + 1) * kPi) * std::sin(q * z) * std::exp(-q * q * diffusivity * h.times[n]);
      }
      const double exact = slab.sim.ambient_T + dT * (1.0 - series);
      worst = std::max(worst, std::abs(h.fields[n][i] - exact) / dT);
    }
  }
  v.require(worst < 0.01, "slab oracle error " + fmt("%.3g", worst));
  v.require(sw.max_principle, "maximum principle excursion " + fmt("%.3g", sw.worst_T_excursion) + " K");
  v.detail << " thermal: crystal mean at 60 s " << fmt("%.2f", T60) << " K (315 +/- 5), slab oracle "
           << fmt("%.3g", 100 * worst) << "% of dT (< 1%), max principle excursion " << fmt("%.2g", sw.worst_T_excursion)
           << " K over all snapshots";
  report(3, v);
}

void criterion4() {
  Verdict v;
  const double E = 7.31e10, alpha = 6.3e-6, nu = 0.2, dT = 10.0;
  const Scene free_s = parse_config(block_text(4e-3, 1e-3, true, 10, 0.18, 60, 5));
  const VoxelMesh fm = build_mesh(free_s);
  const std::vector<double> T(fm.active_node_count(), 310.0);
  const auto fu = solve_thermoelastic(fm, free_s.materials, T, 300.0);
  const auto ff = recover_stress(fm, free_s.materials, fu, T, 300.0);
  double vm = 0.0;
  for (const auto& s : ff.stress) vm = std::max(vm, von_mises(s));
  const double scale = E * alpha * dT;
  v.require(vm < 0.01 * scale, "free expansion von Mises " + fmt("%.3g", vm));

  const Scene clamp_s = parse_config(block_text(4e-3, 1e-3, false, 10, 0.18, 60, 5));
  const VoxelMesh cm = build_mesh(clamp_s);
  const std::vector<double> Tc(cm.active_node_count(), 310.0);
  const auto cu = solve_thermoelastic(cm, clamp_s.materials, Tc, 300.0, Support::clamp_all);
  const auto cf = recover_stress(cm, clamp_s.materials, cu, Tc, 300.0);
  const double expect = -E * alpha * dT / (1 - 2 * nu);
  double worst = 0.0;
  for (const auto& s : cf.stress)
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(s.c[i] - expect) / std::abs(expect));
  v.require(worst <= 0.005, "clamped stress deviation " + fmt("%.3g", worst));

  const double s = 4.2e7;
  const double e1 = std::abs(von_mises({{s, 0, 0, 0, 0, 0}}) - s) / s;
  const double e2 = std::abs(von_mises({{0, 0, 0, s, 0, 0}}) - std::sqrt(3.0) * s) / s;
  const double e3 = std::abs(von_mises({{s, s, s, 0, 0, 0}})) / s;
  v.require(std::max({e1, e2, e3}) <= 1e-12, "von Mises unit cases");
  v.detail << " mechanics: free expansion VM " << fmt("%.2g", vm / scale) << " of E alpha dT (< 1%), clamped "
           << fmt("%.2g", 100 * worst) << "% off -E alpha dT/(1-2nu) (< 0.5%), unit cases max rel err "
           << fmt("%.1g", std::max({e1, e2, e3}));
  report(4, v);
}

void criterion5(const Scene& scene) {
  Verdict v;
  const TransformSet ts = build_transforms(scene.optics);
  const OpticalProps& o = scene.optics;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand_tensor = [&](double scale) {
    SymTensor t;
    for (double& c : t.c) c = scale * u(rng);
    return t;
  };

  double eig_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SymTensor dB = rand_tensor(1e-6);
    Eigen::Matrix2d M;
    M << dB(1, 1), dB(1, 2), dB(1, 2), dB(2, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    const double dn = 0.5 * std::pow(o.base_index, 3) * (es.eigenvalues()[1] - es.eigenvalues()[0]);
    const auto s = principal_birefringence(dB, Axis::x, o.base_index, 1e-3, o.wavelength);
    const Eigen::Vector2d a(std::cos(s.axis), std::sin(s.axis));
    eig_err = std::max({eig_err, std::abs(s.delta_n - dn) / dn, 1.0 - std::abs(es.eigenvectors().col(1).dot(a))});
  }
  v.require(eig_err <= 1e-10, "eigen oracle " + fmt("%.2g", eig_err));

  double explicit_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    SectionBirefringence s;
    s.axis = 0.5 * kPi * u(rng);
    s.delta = kPi * u(rng);
    using C = std::complex<double>;
    const double c2 = std::cos(2 * s.axis), s2 = std::sin(2 * s.axis);
    const double ch = std::cos(s.delta / 2), sh = std::sin(s.delta / 2);
    Jones X;
    X << C(ch, sh * c2), C(0, sh * s2), C(0, sh * s2), C(ch, -sh * c2);
    explicit_err = std::max(explicit_err, (section_jones(s) - X).norm());
    explicit_err = std::max(explicit_err, std::abs(propagate({&s, 1}) - 0.5 * (1 + std::sin(s.delta) * s2)));
  }
  v.require(explicit_err <= 1e-12, "explicit formulas " + fmt("%.2g", explicit_err));

  double gauge = 0.0, split = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<SymTensor> a(5), b(5);
    const std::vector<double> len(5, 2e-3);
    for (int k = 0; k < 5; ++k) {
      a[k] = rand_tensor(3e6);
      b[k] = a[k];
      const double p = 4e7 * u(rng);
      for (int c = 0; c < 3; ++c) b[k].c[c] += p;
    }
    gauge = std::max(gauge, std::abs(birefringence_error(stress_sections(a, len, ts, o, Axis::x)) -
                                     birefringence_error(stress_sections(b, len, ts, o, Axis::x))));
    const std::vector<SymTensor> one{a[0]}, ten(10, a[0]);
    const std::vector<double> whole{1e-2}, tenth(10, 1e-3);
    split = std::max(split, std::abs(propagate(stress_sections(one, whole, ts, o, Axis::x)) -
                                     propagate(stress_sections(ten, tenth, ts, o, Axis::x))));
  }
  v.require(gauge <= 1e-12, "hydrostatic gauge " + fmt("%.2g", gauge));
  v.require(split <= 1e-12, "section splitting " + fmt("%.2g", split));

  const std::vector<SymTensor> zero(10);
  const std::vector<double> len(10, 1e-3);
  const double z = birefringence_error(stress_sections(zero, len, ts, o, Axis::x));
  v.require(z == 0.0, "zero stress error " + fmt("%.3g", z));

  double q45 = 0.0;
  for (double d = -3.0; d <= 3.0; d += 0.01) {
    SectionBirefringence s;
    s.axis = kPi / 4;
    s.delta = d;
    q45 = std::max(q45, std::abs(propagate({&s, 1}) - 0.5 * (1 + std::sin(d))));
  }
  v.require(q45 <= 1e-12, "45 degree chain " + fmt("%.2g", q45));
  v.detail << " optics: eigen " << fmt("%.1g", eig_err) << ", explicit " << fmt("%.1g", explicit_err) << ", gauge "
           << fmt("%.1g", gauge) << ", splitting " << fmt("%.1g", split) << ", zero-stress error " << z
           << ", 45 deg " << fmt("%.1g", q45);
  report(5, v);
}

void criterion6(const Sweep& sw) {
  Verdict v;
  const double c10 = find(sw, "cu_10_0").total_error;
  const double c52 = find(sw, "cu_5_2").total_error;
  const double c54 = find(sw, "cu_5_4").total_error;
  v.require(c10 >= 2.1e-4 && c10 <= 8.4e-4, "Cu 10:0 total " + fmt("%.3g", c10) + " outside [2.1e-4, 8.4e-4]");
  v.require(c54 < c52 && c52 < c10, "ordering Cu 5:4 < Cu 5:2 < Cu 10:0");
  const double ratio = c52 / c10;
  v.require(ratio >= 0.5 && ratio <= 0.9, "Cu 5:2 / Cu 10:0 = " + fmt("%.3g", ratio));
  double min_ito = INFINITY, max_cu = 0.0;
  for (const auto& r : sw.results) {
    if (r.mode.kind == ElectrodeKind::transparent) min_ito = std::min(min_ito, r.total_error);
    else max_cu = std::max(max_cu, r.total_error);
  }
  v.require(min_ito > max_cu, "ITO totals not all above Cu totals");
  const double ito5 = find(sw, "ito_0_5").total_error / c10;
  v.require(ito5 > 2.0, "ITO 0:5 / Cu 10:0 = " + fmt("%.3g", ito5));
  v.detail << " error totals:";
  for (const auto& r : sw.results) v.detail << " " << r.name << "=" << fmt("%.3g", r.total_error);
  report(6, v);
}

void criterion7() {
  Verdict v;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double p[5] = {0.01 + 0.4 * u(rng), kPi * (2 * u(rng) - 1) * 0.999, 2e-2 * (2 * u(rng) - 1),
                         1e-2 * (2 * u(rng) - 1), 0.4 + 0.2 * u(rng)};
    Waveform w;
    for (int k = 0; k < 2000; ++k) {
      const double t = k / 10e3;
      w.time.push_back(t);
      w.intensity.push_back(p[0] * std::cos(2 * kPi * 50 * t + p[1]) + p[2] * t * t + p[3] * t + p[4]);
    }
    w.sample_rate = 10e3;
    const DriftFit f = fit_drift(w, 50.0);
    const double got[5] = {f.I_AC, f.phi, f.a, f.b, f.c};
    for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(got[k] - p[k]));
  }
  v.require(worst <= 1e-6, "fit round-trip " + fmt("%.2g", worst));

  bool linear = true;
  for (double tau : {1.0, 15.0, 60.0, 3600.0}) {
    if (!(sigma_bi(2e-3, 2 * tau) == 2 * sigma_bi(2e-3, tau))) linear = false;
    if (!(sigma_bi(2e-3, tau / 4) == sigma_bi(2e-3, tau) / 4)) linear = false;
  }
  v.require(linear, "tau linearity");

  bool involution = true;
  for (int i = 0; i < 1000; ++i) {
    const double x = (2 * u(rng) - 1) * 1e-3;
    const double tau = std::ldexp(1.0, static_cast<int>(12 * u(rng)) - 2);
    if (!(bias_correct(bias_correct(x, tau, 64.0), 64.0, tau) == x)) involution = false;
  }
  v.require(involution, "bias_correct involution");
  v.detail << " signal: fit round-trip max error " << fmt("%.2g", worst) << " (< 1e-6), tau-linearity exact: "
           << (linear ? "yes" : "no") << ", involution exact: " << (involution ? "yes" : "no");
  report(7, v);
}

int run(const std::string& cmd) {
  std::fprintf(stderr, "  $ %s\n", cmd.c_str());
  return std::system(cmd.c_str());
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return fa && fb && sa.str() == sb.str();
}

void criterion8_and_9(const std::string& cli, const Sweep& sw) {
  const fs::path root = fs::temp_directory_path() / ("ovsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);

  Verdict v8;
  const std::string base = cli + " simulate --mode cu_5_2 --dump-sections --dump-field 2>/dev/null --out ";
  const int ra = run(base + (root / "a").string());
  const int rb = run(base + (root / "b").string());
  v8.require(ra == 0 && rb == 0, "simulate exit codes");
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    ++compared;
    v8.require(same_bytes(entry.path(), root / "b" / name), name.string() + " differs");
  }
  v8.require(compared >= 3, "expected data files missing");
  v8.detail << " determinism: " << compared << " data files byte-identical across two CLI runs";
  report(8, v8);

  Verdict v9;
  const auto t0 = Clock::now();
  const int rs = run(cli + " sweep --modes all 2>/dev/null --out " + (root / "sweep").string());
  const double secs = seconds_since(t0);
  v9.require(rs == 0, "sweep exit code " + std::to_string(rs));
  v9.require(secs < 600.0, "sweep took " + fmt("%.0f", secs) + " s");
  std::ifstream rep(root / "sweep" / "report.csv");
  std::string line;
  int rows = -2;  // hash comment and header
  while (std::getline(rep, line)) ++rows;
  v9.require(rows == 6, "report.csv has " + std::to_string(rows) + " rows");
  // The CLI sweep must agree with the in-process evaluation.
  const fs::path curve = root / "sweep" / "curve_cu_5_4.csv";
  std::ifstream cf(curve);
  std::getline(cf, line);
  std::getline(cf, line);
  std::vector<double> errs;
  while (std::getline(cf, line)) errs.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  const auto& ref = find(sw, "cu_5_4").curve;
  bool agree = errs.size() == ref.size();
  for (std::size_t i = 0; agree && i < errs.size(); ++i) agree = errs[i] == ref[i].error;
  v9.require(agree, "CLI curve differs from the in-process run");
  v9.detail << " end-to-end sweep of six modes: " << fmt("%.1f", secs) << " s (< 600)";
  report(9, v9);
  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path to ovsim CLI>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const Scene scene = parse_config(default_config_text());

  std::fprintf(stderr, "evaluating the six built-in modes at %.3g m resolution\n", scene.sim.mesh_resolution);
  const Sweep sw = run_default_sweep(scene);

  criterion1(scene, sw);
  criterion2(scene, sw);
  criterion3(sw);
  criterion4();
  criterion5(scene);
  criterion6(sw);
  criterion7();
  criterion8_and_9(cli, sw);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
