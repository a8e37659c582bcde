// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shellgsm/expression.hpp"
#include "shellgsm/oracles.hpp"

using namespace shellgsm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

const std::vector<double> band = linspace(3.2e9, 3.8e9, 7);

ShellGeometry shell(cplx eps_perp, cplx eps_r, cplx mu_perp, cplx mu_r) {
  ShellGeometry g;
  g.rb = 0.150;
  g.ra = 0.180;
  g.segments.push_back({g.rb, g.ra, MediumSample{eps_perp, eps_r, mu_perp, mu_r}});
  return g;
}

ShellGeometry isotropic_shell() { return shell({5.0, -0.5}, {5.0, -0.5}, 1.0, 1.0); }
ShellGeometry anisotropic_shell() { return shell(5.0, 2.0, 3.0, 1.0); }

ShellGeometry two_layer_anisotropic() {
  ShellGeometry g;
  g.rb = 0.150;
  g.ra = 0.180;
  g.segments.push_back({0.150, 0.165, MediumSample{4.4, 2.0, 2.2, 2.2}});
  g.segments.push_back({0.165, 0.180, MediumSample{8.0, 1.0, 5.0, 2.0}});
  return g;
}

RadialProfile profile(const char* eps_perp, const char* eps_r) {
  const auto ep = Expression::parse(eps_perp);
  const auto er = Expression::parse(eps_r);
  RadialProfile p;
  p.eps_perp = [ep](double r) { return ep(r); };
  p.d_eps_perp = [ep](double r) { return ep.derivative(r); };
  p.eps_r = [er](double r) { return er(r); };
  p.mu_perp = [](double) { return cplx(1.0); };
  p.mu_r = [](double) { return cplx(1.0); };
  p.d_mu_perp = [](double) { return cplx(0.0); };
  return p;
}

ShellGeometry continuous_shell() {
  ShellGeometry g;
  g.rb = 0.150;
  g.ra = 0.180;
  g.segments.push_back({0.150, 0.165, profile("5*tan(pi/(5*r))", "1+exp(2*sin(4/r))")});
  g.segments.push_back({0.165, 0.180, profile("2+ln(2/r-5)", "1/r")});
  return g;
}

int lmax_for(const ShellGeometry& g, double f) {
  return truncation_degree(std::abs(g.exterior.wavenumber(f)), g.ra);
}

double max_abs(const MatrixC& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// max |a - b| / max |b| over one entry set
double normwise(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

double sso_distance(const SSOSet& a, const SSOSet& b) {
  return std::max({normwise(a.t, b.t), normwise(a.phi, b.phi), normwise(a.rho, b.rho), normwise(a.psi, b.psi)});
}

Outcome check_vacuum_identity() {
  const auto t0 = Clock::now();
  ShellGeometry g;
  g.rb = 0.120;
  g.ra = 0.180;
  g.segments.push_back({g.rb, g.ra, MediumSample{}});
  const double f = 3.5e9;
  const auto sso = assemble(g, f, 8);
  const auto ant = random_antenna(f, 8, 5, 0.8, 11);
  const auto eff = compose(ant, sso);
  const double err = std::max({max_abs(eff.gamma - ant.gamma), max_abs(eff.r - ant.r), max_abs(eff.t - ant.t),
                               max_abs(eff.s - ant.s)});
  const double dt = seconds_since(t0);
  return {err <= 1e-12 && dt < 1.0, fmt("max error %.3g (<= 1e-12), %.3f s (< 1 s)", err, dt)};
}

Outcome check_mie_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int lmax_hi = 0;
  for (cplx eps : {cplx(5.0), cplx(5.0, -0.5)}) {
    ShellGeometry g = shell(eps, eps, 1.0, 1.0);
    g.bubble = {eps, 1.0};
    for (double f : band) {
      const int lmax = lmax_for(g, f);
      lmax_hi = std::max(lmax_hi, lmax);
      const auto tr = transition_entries(g, f, lmax);
      const auto mie = mie_solid_sphere(eps, 1.0, g.ra, g.exterior, f, lmax);
      for (int l = 1; l <= lmax; ++l) {
        const auto i = static_cast<std::size_t>(l - 1);
        worst = std::max(worst, std::abs(tr.tm[i] + mie.a[i]) / std::abs(mie.a[i]));
        worst = std::max(worst, std::abs(tr.te[i] + mie.b[i]) / std::abs(mie.b[i]));
      }
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-10 && dt < 5.0,
          fmt("max relative error %.3g (<= 1e-10), lmax up to %d, %.3f s (< 5 s)", worst, lmax_hi, dt)};
}

Outcome check_closed_vs_numeric() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  RadialOptions numeric;
  numeric.force_numeric = true;
  for (const auto& g : {isotropic_shell(), anisotropic_shell()}) {
    for (double f : band) {
      const int lmax = lmax_for(g, f);
      worst = std::max(worst, sso_distance(assemble(g, f, lmax, numeric), assemble(g, f, lmax)));
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && dt < 30.0, fmt("max relative error %.3g (<= 1e-8), %.2f s (< 30 s)", worst, dt)};
}

Outcome check_anisotropic_index() {
  const double err = std::abs(anisotropic_order(3.0 / 1.0, 1) - 2.0);
  return {err <= 1e-14, fmt("|L1 - 2| = %.3g (<= 1e-14)", err)};
}

Outcome check_phi_equals_psi() {
  const auto g = two_layer_anisotropic();
  double worst = 0.0;
  for (double f : band) {
    const auto s = assemble(g, f, lmax_for(g, f));
    for (int i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(s.phi[i] - s.psi[i]));
  }
  return {worst <= 1e-10, fmt("max |Phi - Psi| = %.3g (<= 1e-10)", worst)};
}

ShellGeometry random_stack(std::mt19937_64& rng, bool lossy) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ShellGeometry g;
  g.rb = 0.10 + 0.05 * u(rng);
  g.ra = g.rb + 0.01 + 0.04 * u(rng);
  const int layers = 1 + static_cast<int>(rng() % 3);
  const auto medium = [&] {
    const auto value = [&] {
      return cplx(1.0 + 7.0 * u(rng), lossy ? -0.8 * u(rng) : 0.0);
    };
    return MediumSample{value(), value(), value(), value()};
  };
  double r = g.rb;
  for (int i = 0; i < layers; ++i) {
    const double next = i + 1 == layers ? g.ra : r + (g.ra - r) * (0.2 + 0.6 * u(rng));
    g.segments.push_back({r, next, medium()});
    r = next;
  }
  const auto region = [&] { return HomogeneousRegion{1.0 + 3.0 * u(rng), 1.0 + u(rng)}; };
  g.bubble = region();
  g.exterior = region();
  return g;
}

Outcome check_passivity() {
  std::mt19937_64 rng(2024);
  double unitary_err = 0.0, excess = -1.0;
  for (bool lossy : {false, true}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = random_stack(rng, lossy);
      const double f = 2.0e9 + 2.0e9 * (trial % 5) / 4.0;
      const auto s = assemble(g, f, lmax_for(g, f));
      for (int i = 0; i < s.size(); ++i) {
        const auto sv = mode_scattering_singular_values(s.t[i], s.phi[i], s.rho[i], s.psi[i]);
        if (lossy) {
          excess = std::max(excess, sv[0] - 1.0);
        } else {
          unitary_err = std::max({unitary_err, std::abs(sv[0] - 1.0), std::abs(sv[1] - 1.0)});
        }
      }
    }
  }
  return {unitary_err <= 1e-9 && excess <= 1e-9,
          fmt("lossless max |sigma - 1| = %.3g (<= 1e-9), lossy max sigma - 1 = %.3g (<= 1e-9)", unitary_err,
              excess)};
}

Outcome check_split_invariance() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const auto& g : {isotropic_shell(), anisotropic_shell(), two_layer_anisotropic()}) {
    for (const auto& seg : g.segments) {
      std::uniform_real_distribution<double> u(seg.r_inner, seg.r_outer);
      std::vector<double> radii;
      for (int i = 0; i < 5; ++i) radii.push_back(u(rng));
      std::sort(radii.begin(), radii.end());
      const auto split = split_segments(g, radii);
      for (double f : {band.front(), band.back()}) {
        const int lmax = lmax_for(g, f);
        worst = std::max(worst, sso_distance(assemble(split, f, lmax), assemble(g, f, lmax)));
      }
    }
  }
  return {worst <= 1e-10, fmt("max relative change %.3g (<= 1e-10)", worst)};
}

double relative(const MatrixC& a, const MatrixC& b) {
  const double den = max_abs(b);
  return den > 0.0 ? max_abs(a - b) / den : max_abs(a - b);
}

Outcome check_neumann_series() {
  double worst = 0.0, radius = 0.0;
  bool all_converged = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double f = 3.0e9 + 1e8 * trial;
    // Small mode counts keep the spectral radius close to its 0.49 bound.
    const int lmax = 1 + trial % 4;
    const auto ant = random_antenna(f, lmax, 3, 0.49, 100 + trial);
    const auto sso = random_sso(f, lmax, 1.0, 500 + trial);
    const auto direct = compose(ant, sso);
    const auto series = neumann_compose(ant, sso);
    all_converged = all_converged && series.converged && series.spectral_radius < 0.5;
    radius = std::max(radius, series.spectral_radius);
    worst = std::max({worst, relative(series.eff.gamma, direct.gamma), relative(series.eff.r, direct.r),
                      relative(series.eff.t, direct.t), relative(series.eff.s, direct.s)});
  }
  return {all_converged && worst <= 1e-10,
          fmt("max relative error %.3g (<= 1e-10), spectral radius up to %.3f (< 0.5)", worst, radius)};
}

Outcome check_staircase() {
  const auto g = continuous_shell();
  const std::vector<int> n_list{5, 10, 20, 40};
  std::vector<AntennaGSM> antennas;
  for (double f : band) antennas.push_back(transparent_antenna(f, lmax_for(g, f), 1));
  const auto rows = staircase_convergence(g, n_list, antennas);
  bool monotone = true;
  std::string table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table += fmt("%s n=%d: %.3g", i ? "," : "", rows[i].n_layers, rows[i].max_err_s);
    if (i > 0 && rows[i].max_err_s > 1.1 * rows[i - 1].max_err_s) monotone = false;
  }
  // Regression baseline: n = 20 error measured on the first complete run.
  constexpr double n20_baseline = 1.18;
  const double n20 = rows[2].max_err_s;
  const bool baseline_ok = n20_baseline == 0.0 || n20 <= 1.5 * n20_baseline;
  return {monotone && rows.back().max_err_s < 1e-3 && baseline_ok,
          fmt("%s (monotone within 10%%, n=40 < 1e-3, n=20 baseline %.3g)", table.c_str(), n20_baseline)};
}

Outcome check_plane_wave() {
  const double f = 3.5e9;
  const HomogeneousRegion vacuum;
  const double ra = 12.0 / std::abs(vacuum.wavenumber(f));
  const int lmax = truncation_degree(std::abs(vacuum.wavenumber(f)), ra);
  double worst = 0.0;
  const PlaneWaveSpec specs[] = {
      {0.0, 0.0, {cplx(1.0), cplx(0.0)}, 1.0},
      {0.7, 1.9, {cplx(0.6), cplx(0.0, 0.8)}, 2.0},
      {2.3, -0.4, {cplx(0.0), cplx(1.0)}, 1.0},
  };
  for (const auto& s : specs) worst = std::max(worst, plane_wave_reconstruction_error(s, lmax, vacuum, f, 100, 99));
  return {worst <= 1e-6, fmt("lmax %d, max relative error %.3g (<= 1e-6)", lmax, worst)};
}

Outcome check_dipole() {
  EffectiveGSM eff;
  eff.frequency_hz = 3.5e9;
  eff.num_ports = 1;
  eff.lmax = 1;
  const int n = mode_count(1);
  eff.gamma = MatrixC::Zero(1, 1);
  eff.r = MatrixC::Zero(1, n);
  eff.s = MatrixC::Identity(n, n);
  eff.t = MatrixC::Zero(n, 1);
  eff.t(mode_index(2, Parity::even, 0, 1), 0) = 1.0;
  std::vector<SphericalDirection> dirs;
  for (int i = 0; i <= 180; ++i)
    for (int k = 0; k < 8; ++k) dirs.push_back({kPi * i / 180.0, 2.0 * kPi * k / 8.0});
  VectorC v(1);
  v[0] = 1.0;
  const auto gain = gain_pattern(eff, v, {}, dirs);
  const double peak = *std::max_element(gain.begin(), gain.end());
  double shape = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double s = std::sin(dirs[i].theta);
    shape = std::max(shape, std::abs(gain[i] / peak - s * s));
  }
  return {std::abs(peak - 1.5) <= 1e-6 && shape <= 1e-8,
          fmt("peak gain %.12f (1.5 +- 1e-6), max |G/Gmax - sin^2| = %.3g (<= 1e-8)", peak, shape)};
}

Outcome sweep_contract(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / fs::path("shellgsm_acceptance_sweep");
  fs::remove_all(dir);
  fs::create_directories(dir);
  const double f = 3.5e9;
  save_gsm({random_antenna(f, 25, 5, 0.5, 31)}, (dir / "antenna.json").string());
  {
    std::ofstream cfg(dir / "sweep.cfg");
    cfg << "[geometry]\nrb_mm = 150\nra_mm = 180\n\n"
           "[layer]\ntype = iso\nthickness_mm = 30\neps = 5-0.5j\n\n"
           "[frequency]\nstart_ghz = 3.5\nstop_ghz = 3.5\npoints = 1\n\n"
           "[antenna]\nsource = file\ngsm_file = antenna.json\n\n"
           "[task]\ntype = sweep\nsweep_layer = 1\nsweep_parameter = eps\n"
           "sweep_start = 2\nsweep_stop = 8\nsweep_points = 50\n";
  }
  const std::string cmd = "\"" + cli + "\" sweep --config \"" + (dir / "sweep.cfg").string() + "\" --out \"" +
                          (dir / "out").string() + "\" --threads 1 > \"" + (dir / "log.txt").string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, fmt("CLI sweep exited with status %d (see %s)", rc, (dir / "log.txt").c_str())};
  std::ifstream in(dir / "out" / "manifest.json");
  const auto manifest = nlohmann::json::parse(in);
  const auto& points = manifest.at("timings").at("per_point_s");
  double slowest = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) slowest = std::max(slowest, points[i].get<double>());
  const int parses = manifest.at("gsm_parse_count").get<int>();
  return {points.size() == 50 && slowest < 1.0 && parses == 1,
          fmt("%zu points, slowest after first %.3f s (< 1 s), GSM parsed %d time(s) (== 1)", points.size(), slowest,
              parses)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"vacuum identity", check_vacuum_identity},
      {"mie equivalence", check_mie_equivalence},
      {"closed form vs numeric ode", check_closed_vs_numeric},
      {"anisotropic index identity", check_anisotropic_index},
      {"phi = psi identity", check_phi_equals_psi},
      {"unitarity / passivity", check_passivity},
      {"interface-split invariance", check_split_invariance},
      {"neumann-series oracle", check_neumann_series},
      {"staircase convergence", check_staircase},
      {"plane-wave reconstruction", check_plane_wave},
      {"dipole directivity", check_dipole},
      {"sweep performance contract", [&] { return sweep_contract(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("[%s] %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
