#pragma once

// Uplink physical layer: path loss, Gauss-Markov Rayleigh fading, zero-forcing
// combining, SINR and the per-slot bit budgets of local and offloaded
// execution.

#include <cstddef>
#include <vector>

#include "mecrl/cmatrix.hpp"
#include "mecrl/rng.hpp"

namespace mecrl::phy {

struct PathLossModel {
  double g0_db = -30.0;  // loss at the reference distance
  double alpha = 3.0;    // exponent
  double d0 = 1.0;       // reference distance, meters

  void validate() const;
};

struct PhyConstants {
  double noise_power = 1e-9;     // watts
  double bandwidth_hz = 1e6;
  double slot_s = 1e-3;
  double kappa = 1e-27;          // effective switched capacitance
  double cycles_per_bit = 500.0;
  std::size_t n_antennas = 4;

  void validate() const;
};

// Column m of h is user m's channel; its entries carry the path-loss gain.
struct ChannelState {
  CMat h;
  std::vector<double> rho;
  std::vector<double> gains;

  std::size_t n_users() const { return h.cols(); }
  std::size_t n_antennas() const { return h.rows(); }
};

// Linear power gain 10^{(G0 - 10 alpha log10(d/d0))/10}.
double path_loss_gain(const PathLossModel& model, double distance_m);

// Draws each column from its stationary law: CN(0, gains_m) per entry.
ChannelState init_channel(const PhyConstants& constants, const std::vector<double>& gains,
                          const std::vector<double>& rho, Rng& rng);

// h_m <- rho_m h_m + sqrt(1 - rho_m^2) e_m,  e_m ~ CN(0, gains_m I).
ChannelState evolve_channel(const ChannelState& state, Rng& rng);

// ||z_m||^2 for each row of the pseudo-inverse.
std::vector<double> zf_norms(const CMat& h);

double sinr(double p_offload, double zf_norm, double noise_power);

// tau * B * log2(1 + gamma), in bits (not floored).
double offload_capacity(const PhyConstants& constants, double gamma);

// tau * cbrt(p / kappa) / L, in bits (not floored).
double local_capacity(const PhyConstants& constants, double p_local);

}  // namespace mecrl::phy
