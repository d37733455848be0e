#include "relaynet/rates.hpp"

#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

IncomingRate incoming_rate(int node, const RateMatrix& tau, const ChannelMatrix& channels) {
  IncomingRate rate;
  rate.per_slot = Eigen::VectorXd::Zero(tau.slot_count());
  for (int u = 0; u < tau.slot_count(); ++u) {
    for (int i = 0; i < tau.node_count(); ++i) {
      if (i != node) rate.per_slot(u) += tau(i, u) * channels(i, node, u);
    }
  }
  rate.total = rate.per_slot.sum();
  return rate;
}

double outgoing_rate(int node, const RateMatrix& tau) { return tau.values().row(node).sum(); }

std::vector<FlowVerdict> check_flow_conservation(const NetworkSpec& spec, const RateMatrix& tau,
                                                 const ChannelMatrix& channels, double tolerance) {
  std::vector<FlowVerdict> verdicts;
  for (int j : spec.relays()) {
    FlowVerdict v;
    v.node = j;
    v.outgoing = outgoing_rate(j, tau);
    v.incoming = incoming_rate(j, tau, channels).total;
    v.pass = v.outgoing <= v.incoming + tolerance;
    verdicts.push_back(v);
  }
  return verdicts;
}

std::vector<HalfDuplexVerdict> check_half_duplex(const NetworkSpec& spec, const RateMatrix& tau,
                                                 const ChannelMatrix& channels, double tolerance) {
  std::vector<HalfDuplexVerdict> verdicts;
  for (int j : spec.relays()) {
    const auto incoming = incoming_rate(j, tau, channels);
    for (int u = 0; u < tau.slot_count(); ++u) {
      HalfDuplexVerdict v;
      v.node = j;
      v.slot = u;
      v.lhs = incoming.per_slot(u) * (1.0 - tau(j, u)) + tau(j, u);
      v.pass = v.lhs <= 1.0 + tolerance;
      verdicts.push_back(v);
    }
  }
  return verdicts;
}

void require_feasible_rates(const NetworkSpec& spec, const RateMatrix& tau,
                            const ChannelMatrix& channels, double tolerance) {
  for (const auto& v : check_flow_conservation(spec, tau, channels, tolerance)) {
    if (!v.pass) {
      throw Error(Errc::flow_conservation,
                  "relay " + std::to_string(spec.id(v.node)) + " sends at rate " +
                      std::to_string(v.outgoing) + " but receives only " +
                      std::to_string(v.incoming));
    }
  }
  for (const auto& v : check_half_duplex(spec, tau, channels, tolerance)) {
    if (!v.pass) {
      throw Error(Errc::half_duplex, "relay " + std::to_string(spec.id(v.node)) + " in slot " +
                                         std::to_string(v.slot + 1) + " needs " +
                                         std::to_string(v.lhs) + " > 1 of the slot");
    }
  }
}

}  // namespace relaynet
