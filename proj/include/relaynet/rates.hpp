#ifndef RELAYNET_RATES_HPP
#define RELAYNET_RATES_HPP

#include <Eigen/Core>

#include <vector>

#include "relaynet/channel.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

struct IncomingRate {
  Eigen::VectorXd per_slot;  // r_j^u
  double total = 0.0;        // r_j
};

/// r_j^u = sum_i tau_i^u p_ij^u over every other node.
IncomingRate incoming_rate(int node, const RateMatrix& tau, const ChannelMatrix& channels);

/// sum_v tau_j^v.
double outgoing_rate(int node, const RateMatrix& tau);

struct FlowVerdict {
  int node = 0;
  double outgoing = 0.0;
  double incoming = 0.0;
  bool pass = true;
};

struct HalfDuplexVerdict {
  int node = 0;
  int slot = 0;
  double lhs = 0.0;  // r_j^u (1 - tau_j^u) + tau_j^u
  bool pass = true;
};

/// Outgoing rate must not exceed incoming rate, for every relay.
std::vector<FlowVerdict> check_flow_conservation(const NetworkSpec& spec, const RateMatrix& tau,
                                                 const ChannelMatrix& channels,
                                                 double tolerance = kFeasibilityTolerance);

/// r_j^u (1 - tau_j^u) + tau_j^u <= 1 for every relay and slot.
std::vector<HalfDuplexVerdict> check_half_duplex(const NetworkSpec& spec, const RateMatrix& tau,
                                                 const ChannelMatrix& channels,
                                                 double tolerance = kFeasibilityTolerance);

template <typename Verdicts>
bool all_pass(const Verdicts& verdicts) {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

/// Throws Errc::flow_conservation or Errc::half_duplex naming the first
/// offending relay.
void require_feasible_rates(const NetworkSpec& spec, const RateMatrix& tau,
                            const ChannelMatrix& channels,
                            double tolerance = kFeasibilityTolerance);

}  // namespace relaynet

#endif  // RELAYNET_RATES_HPP
