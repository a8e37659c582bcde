#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "shellgsm/sso.hpp"

namespace shellgsm {

using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

/// Free-space generalized scattering matrix of an antenna at one frequency:
///   [w  ]   [Gamma  R/2     ] [v  ]
///   [f^b] = [T      (S-1)/2 ] [a^b]
struct AntennaGSM {
  double frequency_hz = 0.0;
  int num_ports = 0;
  int lmax = 0;
  /// Medium the antenna was characterized in.
  HomogeneousRegion bubble;
  MatrixC gamma, r, t, s;

  int num_modes() const { return mode_count(lmax); }
  /// Throws DimensionError if any block disagrees with (num_ports, lmax).
  void check() const;
};

/// Same block layout, now including the shell.
struct EffectiveGSM {
  double frequency_hz = 0.0;
  int num_ports = 0;
  int lmax = 0;
  MatrixC gamma, r, t, s;
};

struct SystemResponse {
  VectorC w;
  VectorC f;
};

AntennaGSM transparent_antenna(double frequency_hz, int lmax, int num_ports = 1,
                               const HomogeneousRegion& bubble = {});
AntennaGSM null_antenna(double frequency_hz, int lmax, int num_ports = 1, const HomogeneousRegion& bubble = {});

std::vector<AntennaGSM> load_gsm(const std::string& path);
void save_gsm(const std::vector<AntennaGSM>& blocks, const std::string& path);

enum ComposeBlock : unsigned {
  compose_gamma = 1u,
  compose_r = 2u,
  compose_t = 4u,
  compose_s = 8u,
  compose_all = 15u,
};

/// Embed the antenna in the shell described by `sso`. Blocks left out of
/// `which` come back empty; S~ is the only one needing an N x N solve.
EffectiveGSM compose(const AntennaGSM& antenna, const SSOSet& sso, unsigned which = compose_all);

/// w = Gamma~ v + R~ a / 2, f = T~ v + (S~ - 1) a / 2.
SystemResponse respond(const EffectiveGSM& eff, const VectorC& v, const VectorC& a_f);

}  // namespace shellgsm
