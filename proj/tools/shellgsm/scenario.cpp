#include "scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "shellgsm/shellgsm.h"

namespace shellgsm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double speed_of_light = 299792458.0;
constexpr double pi = 3.14159265358979323846;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

sg_complex to_c(cplx z) { return {z.real(), z.imag()}; }
cplx from_c(sg_complex z) { return {z.re, z.im}; }

void check(sg_status status, const std::string& context, int code) {
  if (status == SG_OK) return;
  throw RunError(context + ": " + sg_last_error(), code);
}

// Failures while computing: bad numerics are exit 3, anything else is the
// inputs' fault.
void check_compute(sg_status status, const std::string& context) {
  const bool numeric = status == SG_ERR_NUMERIC || status == SG_ERR_DEGENERATE || status == SG_ERR_DOMAIN ||
                       status == SG_ERR_INTERNAL;
  check(status, context, numeric ? exit_numeric : exit_config);
}

struct GeometryDeleter {
  void operator()(sg_geometry* g) const { sg_geometry_destroy(g); }
};
struct SsoDeleter {
  void operator()(sg_sso* s) const { sg_sso_destroy(s); }
};
struct GsmDeleter {
  void operator()(sg_gsm_set* s) const { sg_gsm_destroy(s); }
};
struct EffectiveDeleter {
  void operator()(sg_effective* e) const { sg_effective_destroy(e); }
};
using GeometryPtr = std::unique_ptr<sg_geometry, GeometryDeleter>;
using SsoPtr = std::unique_ptr<sg_sso, SsoDeleter>;
using GsmPtr = std::unique_ptr<sg_gsm_set, GsmDeleter>;
using EffectivePtr = std::unique_ptr<sg_effective, EffectiveDeleter>;

// Runs body(i) for i in [0, n) on up to `threads` workers. The exception of
// the lowest failing index wins so errors are reproducible.
template <class F>
void parallel_for(int n, int threads, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class Csv {
public:
  Csv(const fs::path& path, const char* header) : path_(path) {
    f_ = std::fopen(path.c_str(), "w");
    if (!f_) throw RunError("cannot write " + path.string(), exit_config);
    std::fprintf(f_, "%s\n", header);
  }
  ~Csv() {
    if (f_) std::fclose(f_);
  }
  Csv(const Csv&) = delete;
  Csv& operator=(const Csv&) = delete;

  template <class... Args>
  void row(const char* format, Args... args) {
    std::fprintf(f_, format, args...);
  }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
  std::FILE* f_ = nullptr;
};

std::uint64_t fnv1a(std::uint64_t h, const std::string& bytes) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double mag_db(cplx z) { return 20.0 * std::log10(std::abs(z)); }
double phase_deg(cplx z) { return std::arg(z) * 180.0 / pi; }

class Scenario {
public:
  Scenario(const std::string& task, const Config& config, const RunOptions& options)
      : task_(task), cfg_(config), opt_(options), freqs_(config.frequencies()) {
    sg_solver_options_default(&solver_);
    if (opt_.tol) {
      if (!(*opt_.tol > 0.0)) throw RunError("--tol must be positive", exit_config);
      solver_.rtol = *opt_.tol;
      solver_.atol = *opt_.tol * 1e-2;
    }
    build_geometry();
  }

  int run() {
    const auto t0 = Clock::now();
    std::error_code ec;
    fs::create_directories(opt_.out_dir, ec);
    if (ec) throw RunError("cannot create output directory " + opt_.out_dir + ": " + ec.message(), exit_config);

    int code = exit_ok;
    if (task_ == "sso") {
      resolve_lmax(false);
      task_sso();
    } else if (task_ == "compose") {
      resolve_lmax(true);
      task_compose(SG_BLOCK_ALL);
    } else if (task_ == "sparams") {
      resolve_lmax(true);
      task_compose(SG_BLOCK_GAMMA);
    } else if (task_ == "pattern") {
      resolve_lmax(true);
      task_pattern();
    } else if (task_ == "rcs") {
      resolve_lmax(true);
      task_rcs();
    } else if (task_ == "validate") {
      resolve_lmax(!cfg_.task.staircase.empty());
      code = task_validate();
    } else if (task_ == "sweep") {
      resolve_lmax(true);
      task_sweep();
    } else {
      throw RunError("unknown task '" + task_ + "'", exit_config);
    }
    timings_["total_s"] = seconds_since(t0);
    write_manifest(code);
    return code;
  }

private:
  // --- setup ---------------------------------------------------------------

  void build_geometry() {
    sg_geometry* g = nullptr;
    check(sg_geometry_create(cfg_.rb, cfg_.ra, to_c(cfg_.bubble_eps), to_c(cfg_.bubble_mu), to_c(cfg_.exterior_eps),
                             to_c(cfg_.exterior_mu), &g),
          "geometry", exit_config);
    geometry_.reset(g);
    for (std::size_t i = 0; i < cfg_.layers.size(); ++i) {
      const auto& l = cfg_.layers[i];
      const std::string where = "layer " + std::to_string(i + 1) + " (line " + std::to_string(l.line) + ")";
      if (l.type == LayerType::profile) {
        check(sg_geometry_add_profile(g, l.r_inner, l.r_outer, l.expr_eps_perp.c_str(), l.expr_eps_r.c_str(),
                                      l.expr_mu_perp.c_str(), l.expr_mu_r.c_str()),
              where, exit_config);
      } else {
        check(sg_geometry_add_constant(g, l.r_inner, l.r_outer, to_c(l.eps_perp), to_c(l.eps_r), to_c(l.mu_perp),
                                       to_c(l.mu_r)),
              where, exit_config);
      }
    }
    check(sg_geometry_validate(g), "invalid geometry", exit_config);
  }

  void load_antenna() {
    const auto t0 = Clock::now();
    sg_gsm_set* set = nullptr;
    if (cfg_.antenna == AntennaSource::file) {
      check(sg_gsm_load(cfg_.gsm_file.c_str(), &set), "antenna GSM " + cfg_.gsm_file, exit_config);
      ++gsm_parse_count_;
      antenna_.reset(set);
      sg_complex beps, bmu;
      check(sg_gsm_info(set, &file_lmax_, &ports_, &beps, &bmu), "antenna GSM", exit_config);
      if (std::abs(from_c(beps) - cfg_.bubble_eps) > 1e-12 || std::abs(from_c(bmu) - cfg_.bubble_mu) > 1e-12)
        throw RunError("antenna GSM was characterized in a different bubble medium than [geometry] declares",
                       exit_config);
    } else {
      ports_ = cfg_.ports;
      const char* kind = cfg_.antenna == AntennaSource::null ? "null" : "transparent";
      check(sg_gsm_synthetic(kind, freqs_.data(), static_cast<int>(freqs_.size()), lmax_, ports_,
                             to_c(cfg_.bubble_eps), to_c(cfg_.bubble_mu), &set),
            "synthetic antenna", exit_config);
      antenna_.reset(set);
    }
    for (double f : freqs_) {
      int index = 0;
      check(sg_gsm_find(antenna_.get(), f, &index), "antenna GSM", exit_config);
      block_.push_back(index);
    }
    timings_["antenna_load_s"] = seconds_since(t0);
  }

  void resolve_lmax(bool needs_antenna) {
    if (needs_antenna && cfg_.antenna == AntennaSource::file) {
      load_antenna();
      if (opt_.lmax_override && *opt_.lmax_override != file_lmax_)
        throw RunError("--lmax-override " + std::to_string(*opt_.lmax_override) +
                           " disagrees with the antenna GSM (lmax " + std::to_string(file_lmax_) + ")",
                       exit_config);
      lmax_ = file_lmax_;
      return;
    }
    if (opt_.lmax_override) {
      if (*opt_.lmax_override < 1) throw RunError("--lmax-override must be >= 1", exit_config);
      lmax_ = *opt_.lmax_override;
    } else {
      const double kf = 2.0 * pi * cfg_.stop_hz / speed_of_light * std::abs(std::sqrt(cfg_.exterior_eps * cfg_.exterior_mu));
      check(sg_truncation_degree(kf, cfg_.ra, &lmax_), "truncation degree", exit_config);
    }
    if (needs_antenna) load_antenna();
  }

  int n_freq() const { return static_cast<int>(freqs_.size()); }
  int n_modes() const { return sg_mode_count(lmax_); }

  SsoPtr assemble(const sg_geometry* g, double f) const {
    sg_sso* s = nullptr;
    check_compute(sg_sso_assemble(g, f, lmax_, &solver_, &s), "shell operators at " + std::to_string(f) + " Hz");
    return SsoPtr(s);
  }

  EffectivePtr compose(int i, const sg_sso* sso, unsigned blocks) const {
    sg_effective* e = nullptr;
    check_compute(sg_compose(antenna_.get(), block_[static_cast<std::size_t>(i)], sso, blocks, &e),
                  "composition at " + std::to_string(freqs_[static_cast<std::size_t>(i)]) + " Hz");
    return EffectivePtr(e);
  }

  // Effective GSM per frequency point, timed.
  std::vector<EffectivePtr> compose_all(unsigned blocks) {
    std::vector<EffectivePtr> effs(freqs_.size());
    std::vector<double> per(freqs_.size());
    parallel_for(n_freq(), opt_.threads, [&](int i) {
      const auto t0 = Clock::now();
      const auto sso = assemble(geometry_.get(), freqs_[static_cast<std::size_t>(i)]);
      effs[static_cast<std::size_t>(i)] = compose(i, sso.get(), blocks);
      per[static_cast<std::size_t>(i)] = seconds_since(t0);
    });
    timings_["per_frequency_s"] = per;
    return effs;
  }

  Csv open_csv(const char* name, const char* header) {
    const fs::path p = fs::path(opt_.out_dir) / name;
    outputs_.push_back(name);
    return Csv(p, header);
  }

  std::vector<cplx> gamma_of(const sg_effective* e) const {
    std::vector<sg_complex> raw(static_cast<std::size_t>(ports_ * ports_));
    check_compute(sg_effective_block(e, 'G', raw.data()), "reading effective Gamma");
    std::vector<cplx> out;
    for (auto z : raw) out.push_back(from_c(z));
    return out;
  }

  void write_sparams(Csv& csv, const std::vector<EffectivePtr>& effs) const {
    for (std::size_t k = 0; k < effs.size(); ++k) {
      const auto g = gamma_of(effs[k].get());
      for (int i = 0; i < ports_; ++i)
        for (int j = 0; j < ports_; ++j) {
          const cplx v = g[static_cast<std::size_t>(i * ports_ + j)];
          csv.row("%.17g,%d,%d,%.17g,%.17g\n", freqs_[k], i + 1, j + 1, mag_db(v), phase_deg(v));
        }
    }
  }

  // --- tasks ---------------------------------------------------------------

  void task_sso() {
    const int n = n_modes();
    struct Entries {
      std::vector<sg_complex> t, phi, rho, psi;
    };
    std::vector<Entries> all(freqs_.size());
    std::vector<double> per(freqs_.size());
    parallel_for(n_freq(), opt_.threads, [&](int i) {
      const auto t0 = Clock::now();
      const auto sso = assemble(geometry_.get(), freqs_[static_cast<std::size_t>(i)]);
      auto& e = all[static_cast<std::size_t>(i)];
      for (auto* v : {&e.t, &e.phi, &e.rho, &e.psi}) v->resize(static_cast<std::size_t>(n));
      check_compute(sg_sso_entries(sso.get(), e.t.data(), e.phi.data(), e.rho.data(), e.psi.data()),
                    "shell operator entries");
      per[static_cast<std::size_t>(i)] = seconds_since(t0);
    });
    timings_["per_frequency_s"] = per;
    auto csv = open_csv("sso.csv", "freq_hz,tau,l,t_re,t_im,phi_re,phi_im,rho_re,rho_im,psi_re,psi_im");
    for (std::size_t k = 0; k < freqs_.size(); ++k)
      for (int tau = 1; tau <= 2; ++tau)
        for (int l = 1; l <= lmax_; ++l) {
          int idx = 0;
          check(sg_mode_index(tau, 0, 0, l, &idx), "mode index", exit_numeric);
          const auto& e = all[k];
          csv.row("%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", freqs_[k], tau, l, e.t[idx].re,
                  e.t[idx].im, e.phi[idx].re, e.phi[idx].im, e.rho[idx].re, e.rho[idx].im, e.psi[idx].re,
                  e.psi[idx].im);
        }
  }

  void task_compose(unsigned blocks) {
    const auto effs = compose_all(blocks);
    if (blocks == SG_BLOCK_ALL) {
      std::vector<const sg_effective*> raw;
      for (const auto& e : effs) raw.push_back(e.get());
      const fs::path p = fs::path(opt_.out_dir) / "effective_gsm.json";
      check(sg_effective_save(raw.data(), static_cast<int>(raw.size()), to_c(cfg_.exterior_eps),
                              to_c(cfg_.exterior_mu), p.c_str()),
            "writing effective GSM", exit_config);
      outputs_.push_back("effective_gsm.json");
    }
    auto csv = open_csv("sparams.csv", "freq_hz,port_i,port_j,mag_db,phase_deg");
    write_sparams(csv, effs);
  }

  std::vector<std::pair<double, double>> cut() const {
    std::vector<std::pair<double, double>> dirs;
    const int steps = static_cast<int>(std::lround(180.0 / cfg_.task.step_deg));
    for (double phi : {0.0, 180.0})
      for (int i = 0; i <= steps; ++i) dirs.push_back({std::min(180.0, i * cfg_.task.step_deg), phi});
    return dirs;
  }

  void split(const std::vector<std::pair<double, double>>& dirs, std::vector<double>& theta,
             std::vector<double>& phi) const {
    for (const auto& [t, p] : dirs) {
      theta.push_back(t * pi / 180.0);
      phi.push_back(p * pi / 180.0);
    }
  }

  void task_pattern() {
    const int port = cfg_.task.port_drive;
    if (port < 1 || port > ports_)
      throw RunError("port_drive " + std::to_string(port) + " outside 1.." + std::to_string(ports_), exit_config);
    const auto effs = compose_all(SG_BLOCK_GAMMA | SG_BLOCK_T);
    const auto dirs = cut();
    std::vector<double> theta, phi;
    split(dirs, theta, phi);
    const int nd = static_cast<int>(dirs.size());
    std::vector<sg_complex> v(static_cast<std::size_t>(ports_), sg_complex{0.0, 0.0});
    v[static_cast<std::size_t>(port - 1)] = {1.0, 0.0};
    const std::vector<sg_complex> zero(static_cast<std::size_t>(n_modes()), sg_complex{0.0, 0.0});

    auto csv = open_csv("pattern.csv", "freq_hz,theta_deg,phi_deg,quantity,value_re,value_im");
    for (std::size_t k = 0; k < effs.size(); ++k) {
      std::vector<double> gain(dirs.size());
      std::vector<sg_complex> f(zero.size()), ft(dirs.size()), fp(dirs.size());
      check_compute(sg_gain_pattern(effs[k].get(), v.data(), geometry_.get(), theta.data(), phi.data(), nd,
                                    gain.data()),
                    "gain pattern");
      // f = T~ v; only the driven column is needed
      std::vector<sg_complex> t(zero.size() * static_cast<std::size_t>(ports_));
      check_compute(sg_effective_block(effs[k].get(), 'T', t.data()), "radiated modes");
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = t[i * static_cast<std::size_t>(ports_) + (port - 1)];
      check_compute(sg_far_field(f.data(), lmax_, geometry_.get(), theta.data(), phi.data(), nd, ft.data(), fp.data()),
                    "far field");
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto [t, p] = dirs[d];
        csv.row("%.17g,%.17g,%.17g,gain,%.17g,0\n", freqs_[k], t, p, gain[d]);
        csv.row("%.17g,%.17g,%.17g,gain_dbi,%.17g,0\n", freqs_[k], t, p, 10.0 * std::log10(gain[d]));
        csv.row("%.17g,%.17g,%.17g,f_theta,%.17g,%.17g\n", freqs_[k], t, p, ft[d].re, ft[d].im);
        csv.row("%.17g,%.17g,%.17g,f_phi,%.17g,%.17g\n", freqs_[k], t, p, fp[d].re, fp[d].im);
      }
    }
    auto sp = open_csv("sparams.csv", "freq_hz,port_i,port_j,mag_db,phase_deg");
    write_sparams(sp, effs);
  }

  void task_rcs() {
    const auto effs = compose_all(SG_BLOCK_S);
    const auto dirs = cut();
    std::vector<double> theta, phi;
    split(dirs, theta, phi);
    const sg_plane_wave pw{cfg_.task.theta_inc_deg * pi / 180.0, cfg_.task.phi_inc_deg * pi / 180.0,
                           to_c(cfg_.task.pol_theta), to_c(cfg_.task.pol_phi), cfg_.task.amplitude};
    auto csv = open_csv("rcs.csv", "freq_hz,theta_deg,phi_deg,quantity,value_re,value_im");
    for (std::size_t k = 0; k < effs.size(); ++k) {
      std::vector<double> sigma(dirs.size());
      check_compute(sg_bistatic_rcs(effs[k].get(), &pw, geometry_.get(), theta.data(), phi.data(),
                                    static_cast<int>(dirs.size()), sigma.data()),
                    "bistatic RCS");
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto [t, p] = dirs[d];
        csv.row("%.17g,%.17g,%.17g,rcs_m2,%.17g,0\n", freqs_[k], t, p, sigma[d]);
        csv.row("%.17g,%.17g,%.17g,rcs_dbsm,%.17g,0\n", freqs_[k], t, p, 10.0 * std::log10(sigma[d]));
      }
    }
  }

  int task_validate() {
    const double f = cfg_.task.validate_ghz ? *cfg_.task.validate_ghz * 1e9 : freqs_.front();
    std::vector<sg_check_result> results(32);
    int count = 0;
    const auto t0 = Clock::now();
    check_compute(sg_validation_suite(geometry_.get(), f, &solver_, results.data(),
                                      static_cast<int>(results.size()), &count),
                  "validation suite");
    timings_["validation_s"] = seconds_since(t0);
    bool all_passed = true;
    {
      auto csv = open_csv("validate.csv", "freq_hz,check,passed,metric,threshold,detail");
      for (int i = 0; i < count; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        all_passed = all_passed && r.passed;
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        csv.row("%.17g,%s,%d,%.17g,%.17g,%s\n", f, r.name, r.passed, r.metric, r.threshold, detail.c_str());
        std::printf("[%s] %s: %.3g (threshold %.3g)%s%s\n", r.passed ? "PASS" : "FAIL", r.name, r.metric,
                    r.threshold, r.detail[0] ? " - " : "", r.detail);
      }
    }
    if (!cfg_.task.staircase.empty()) {
      const auto& n = cfg_.task.staircase;
      std::vector<double> eg(n.size()), es(n.size());
      const auto t1 = Clock::now();
      check_compute(sg_staircase_convergence(geometry_.get(), n.data(), static_cast<int>(n.size()), antenna_.get(),
                                             &solver_, eg.data(), es.data()),
                    "staircase convergence");
      timings_["staircase_s"] = seconds_since(t1);
      auto csv = open_csv("staircase.csv", "n_layers,max_err_gamma,max_err_s");
      for (std::size_t i = 0; i < n.size(); ++i) csv.row("%d,%.17g,%.17g\n", n[i], eg[i], es[i]);
    }
    return all_passed ? exit_ok : exit_validation;
  }

  void task_sweep() {
    const auto& sw = cfg_.task.sweep;
    if (sw.points < 1) throw RunError("sweep_points must be >= 1", exit_config);
    if (sw.layer < 1 || sw.layer > static_cast<int>(cfg_.layers.size()))
      throw RunError("sweep_layer " + std::to_string(sw.layer) + " does not exist", exit_config);
    const auto& layer = cfg_.layers[static_cast<std::size_t>(sw.layer - 1)];
    if (layer.type == LayerType::profile)
      throw RunError("sweep_layer must be an iso or uniaxial layer", exit_config);

    auto csv = open_csv("sweep.csv", "point,value,freq_hz,port_i,port_j,mag_db,phase_deg");
    std::vector<double> per_point;
    for (int p = 0; p < sw.points; ++p) {
      const auto t0 = Clock::now();
      const double value = sw.points == 1 ? sw.start : sw.start + (sw.stop - sw.start) * p / (sw.points - 1);
      LayerConfig m = layer;
      const auto set = [&](cplx& z) { z = sw.imaginary ? cplx(z.real(), value) : cplx(value, z.imag()); };
      const auto& name = sw.parameter;
      if (name == "eps" || name == "eps_perp") set(m.eps_perp);
      if (name == "eps" || name == "eps_r") set(m.eps_r);
      if (name == "mu" || name == "mu_perp") set(m.mu_perp);
      if (name == "mu" || name == "mu_r") set(m.mu_r);

      sg_geometry* raw = nullptr;
      check(sg_geometry_clone(geometry_.get(), &raw), "sweep geometry", exit_config);
      const GeometryPtr g(raw);
      check(sg_geometry_set_constant(raw, sw.layer - 1, to_c(m.eps_perp), to_c(m.eps_r), to_c(m.mu_perp),
                                     to_c(m.mu_r)),
            "sweep geometry", exit_config);

      std::vector<EffectivePtr> effs(freqs_.size());
      parallel_for(n_freq(), opt_.threads, [&](int i) {
        const auto sso = assemble(g.get(), freqs_[static_cast<std::size_t>(i)]);
        effs[static_cast<std::size_t>(i)] = compose(i, sso.get(), SG_BLOCK_GAMMA);
      });
      for (std::size_t k = 0; k < effs.size(); ++k) {
        const auto gm = gamma_of(effs[k].get());
        for (int i = 0; i < ports_; ++i)
          for (int j = 0; j < ports_; ++j) {
            const cplx v = gm[static_cast<std::size_t>(i * ports_ + j)];
            csv.row("%d,%.17g,%.17g,%d,%d,%.17g,%.17g\n", p + 1, value, freqs_[k], i + 1, j + 1, mag_db(v),
                    phase_deg(v));
          }
      }
      per_point.push_back(seconds_since(t0));
    }
    timings_["per_point_s"] = per_point;
  }

  // --- provenance ----------------------------------------------------------

  void write_manifest(int code) const {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, file_bytes(cfg_.path));
    if (cfg_.antenna == AntennaSource::file && gsm_parse_count_ > 0) h = fnv1a(h, file_bytes(cfg_.gsm_file));
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));

    json m;
    m["tool"] = "shellgsm";
    m["version"] = sg_version();
    m["task"] = task_;
    m["config"] = cfg_.path;
    m["inputs_hash"] = std::string("fnv1a64:") + hex;
    m["lmax"] = lmax_;
    m["num_modes"] = n_modes();
    m["frequencies_hz"] = freqs_;
    m["threads"] = opt_.threads;
    m["solver"] = {{"rtol", solver_.rtol}, {"atol", solver_.atol}, {"max_steps", solver_.max_steps}};
    m["antenna"] = cfg_.antenna == AntennaSource::file ? cfg_.gsm_file
                   : cfg_.antenna == AntennaSource::null ? "null"
                                                         : "transparent";
    m["gsm_parse_count"] = gsm_parse_count_;
    m["outputs"] = outputs_;
    m["timings"] = timings_;
    m["exit_code"] = code;
    m["timestamp"] = utc_timestamp();
    std::ofstream out(fs::path(opt_.out_dir) / "manifest.json");
    out << m.dump(2) << '\n';
    if (!out) throw RunError("cannot write manifest.json", exit_config);
  }

  std::string task_;
  const Config& cfg_;
  RunOptions opt_;
  std::vector<double> freqs_;
  sg_solver_options solver_{};
  GeometryPtr geometry_;
  GsmPtr antenna_;
  std::vector<int> block_;
  int lmax_ = 0;
  int file_lmax_ = 0;
  int ports_ = 1;
  int gsm_parse_count_ = 0;
  std::vector<std::string> outputs_;
  json timings_ = json::object();
};

}  // namespace

int run_task(const std::string& task, const Config& config, const RunOptions& options) {
  Scenario s(task, config, options);
  return s.run();
}

}  // namespace shellgsm::cli
