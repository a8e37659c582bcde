#pragma once

// Scenario files: line-oriented sections of `key = value` pairs.
//
//   [geometry]   rb_mm, ra_mm, bubble_eps, bubble_mu, exterior_eps, exterior_mu
//   [layer]      repeated, inside out; type = iso | uniaxial | profile
//   [frequency]  start_ghz, stop_ghz, points
//   [antenna]    source = transparent | null | file, gsm_file, ports
//   [task]       type plus task options
//
// Whole-line comments start with '#' or ';'. Values may be double-quoted.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shellgsm::cli {

using cplx = std::complex<double>;

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_, column_;
};

enum class LayerType { iso, uniaxial, profile };

struct LayerConfig {
  LayerType type = LayerType::iso;
  double r_inner = 0.0;  // meters, resolved
  double r_outer = 0.0;
  // iso / uniaxial
  cplx eps_perp{1.0}, eps_r{1.0}, mu_perp{1.0}, mu_r{1.0};
  // profile: expressions in r (meters)
  std::string expr_eps_perp, expr_eps_r, expr_mu_perp = "1", expr_mu_r = "1";
  int line = 0;
};

enum class AntennaSource { transparent, null, file };

struct SweepConfig {
  int layer = 1;  // 1-based
  std::string parameter = "eps";
  bool imaginary = false;
  double start = 0.0, stop = 0.0;
  int points = 0;
};

struct TaskConfig {
  std::string type;
  int port_drive = 1;
  double step_deg = 1.0;
  double theta_inc_deg = 0.0, phi_inc_deg = 0.0;
  cplx pol_theta{1.0}, pol_phi{0.0};
  double amplitude = 1.0;
  std::vector<int> staircase;
  std::optional<double> validate_ghz;
  SweepConfig sweep;
};

struct Config {
  std::string path;
  std::string directory;  // for resolving relative file names
  double rb = 0.0, ra = 0.0;
  cplx bubble_eps{1.0}, bubble_mu{1.0}, exterior_eps{1.0}, exterior_mu{1.0};
  std::vector<LayerConfig> layers;
  double start_hz = 0.0, stop_hz = 0.0;
  int points = 1;
  AntennaSource antenna = AntennaSource::transparent;
  std::string gsm_file;  // resolved path
  int ports = 1;
  TaskConfig task;

  std::vector<double> frequencies() const;
};

/// "5", "-0.5j", "5-0.5j", "2 + 1e-3j", "j". Throws std::invalid_argument.
cplx parse_complex(std::string_view text);

Config parse_config(std::string_view text, const std::string& path = "<string>");
Config load_config(const std::string& path);

}  // namespace shellgsm::cli
