#ifndef RELAYNET_MC_ORACLE_HPP
#define RELAYNET_MC_ORACLE_HPP

#include <cstdint>

#include "relaynet/channel.hpp"
#include "relaynet/forwarding.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

struct SimConfig {
  std::uint64_t n_packets = 100000;
  std::uint64_t seed = 1;
  int max_epochs = 10000;    // relay transmissions allowed on one copy's path
  double confidence = 0.99;  // two-sided normal interval
  int threads = 1;
};

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  bool covers(double value) const { return ci_low <= value && value <= ci_high; }
  double relative_half_width() const;
};

struct SimEstimate {
  Estimate f;                     // delivered copies per source packet
  Estimate f_d;                   // relay transmissions summed over delivered copies' paths
  Estimate f_e;                   // relay transmissions per source packet
  Estimate delivery_probability;  // at least one copy delivered
  std::uint64_t packets = 0;
  std::uint64_t truncated = 0;    // packets with a copy cut at max_epochs
  bool truncation_warning = false;  // truncated / packets > 1%
};

/// Slot-level branching simulation of independent packet copies. Each source
/// transmits a packet in slot u with probability tau_s^u. Every transmission
/// (i, u) reaches each destination d with probability p_id^u and each relay j
/// with probability p_ij^u; a relay holding the copy retransmits it in slot v
/// with probability x_ij^{uv} (1 - tau_j^v). Deliveries are counted with
/// multiplicity. One sample covers one packet from every source and the sample
/// value is the per-source average. Results are identical for any thread count.
SimEstimate simulate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                     const ChannelMatrix& channels, const SimConfig& config);

}  // namespace relaynet

#endif  // RELAYNET_MC_ORACLE_HPP
