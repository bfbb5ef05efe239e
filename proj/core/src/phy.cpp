#include "mecrl/phy.hpp"

#include <cmath>
#include <string>

#include "mecrl/error.hpp"

namespace mecrl::phy {

namespace {

CScalar complex_gaussian(Rng& rng, double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = rng.normal(0.0, s);
  const double im = rng.normal(0.0, s);
  return {re, im};
}

}  // namespace

void PathLossModel::validate() const {
  if (!(d0 > 0.0)) throw ValidationError("path_loss.d0 must be > 0");
  if (!std::isfinite(g0_db) || !std::isfinite(alpha)) throw ValidationError("path_loss fields must be finite");
}

void PhyConstants::validate() const {
  if (!(noise_power > 0.0)) throw ValidationError("noise_power must be > 0");
  if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz must be > 0");
  if (!(slot_s > 0.0)) throw ValidationError("slot_s must be > 0");
  if (!(kappa > 0.0)) throw ValidationError("kappa must be > 0");
  if (!(cycles_per_bit > 0.0)) throw ValidationError("cycles_per_bit must be > 0");
  if (n_antennas == 0) throw ValidationError("n_antennas must be >= 1");
}

double path_loss_gain(const PathLossModel& model, double distance_m) {
  if (!(distance_m > 0.0)) throw DomainError("path_loss_gain: distance must be > 0");
  model.validate();
  const double db = model.g0_db - 10.0 * model.alpha * std::log10(distance_m / model.d0);
  return std::pow(10.0, db / 10.0);
}

ChannelState init_channel(const PhyConstants& constants, const std::vector<double>& gains,
                          const std::vector<double>& rho, Rng& rng) {
  if (gains.empty()) throw DimensionError("init_channel: need at least one user");
  if (gains.size() != rho.size()) throw_dimension("init_channel rho length", gains.size(), rho.size());
  for (std::size_t m = 0; m < gains.size(); ++m) {
    if (!(gains[m] > 0.0) || !std::isfinite(gains[m]))
      throw DomainError("init_channel: gain of user " + std::to_string(m) + " must be > 0");
    if (!(rho[m] >= 0.0 && rho[m] <= 1.0))
      throw DomainError("init_channel: rho of user " + std::to_string(m) + " must lie in [0, 1]");
  }
  const std::size_t n = constants.n_antennas;
  const std::size_t users = gains.size();
  CMat h(n, users);
  for (std::size_t m = 0; m < users; ++m)
    for (std::size_t r = 0; r < n; ++r) h(r, m) = complex_gaussian(rng, gains[m]);
  return ChannelState{std::move(h), rho, gains};
}

ChannelState evolve_channel(const ChannelState& state, Rng& rng) {
  ChannelState next = state;
  for (std::size_t m = 0; m < state.n_users(); ++m) {
    const double rho = state.rho[m];
    const double innov = std::sqrt(1.0 - rho * rho);
    for (std::size_t r = 0; r < state.n_antennas(); ++r) {
      const CScalar e = complex_gaussian(rng, state.gains[m]);
      next.h(r, m) = rho * state.h(r, m) + innov * e;
    }
  }
  return next;
}

std::vector<double> zf_norms(const CMat& h) {
  const CMat z = pseudo_inverse(h);
  std::vector<double> out(z.rows());
  for (std::size_t m = 0; m < z.rows(); ++m) out[m] = row_norm_sq(z, m);
  return out;
}

double sinr(double p_offload, double zf_norm, double noise_power) {
  if (!(zf_norm > 0.0)) throw DomainError("sinr: zf_norm must be > 0");
  if (!(noise_power > 0.0)) throw DomainError("sinr: noise_power must be > 0");
  if (p_offload < 0.0) throw DomainError("sinr: offload power must be >= 0");
  return p_offload / (noise_power * zf_norm);
}

double offload_capacity(const PhyConstants& constants, double gamma) {
  if (gamma < 0.0 || std::isnan(gamma)) throw DomainError("offload_capacity: gamma must be >= 0");
  return constants.slot_s * constants.bandwidth_hz * std::log2(1.0 + gamma);
}

double local_capacity(const PhyConstants& constants, double p_local) {
  if (p_local < 0.0 || std::isnan(p_local)) throw DomainError("local_capacity: power must be >= 0");
  const double freq = std::cbrt(p_local / constants.kappa);
  return constants.slot_s * freq / constants.cycles_per_bit;
}

}  // namespace mecrl::phy
