#include "relaynet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::source: return "source";
    case Role::relay: return "relay";
    case Role::destination: return "destination";
  }
  return "unknown";
}

double pathloss_gain(const NodeSpec& from, const NodeSpec& to, const RadioSpec& radio) {
  const double distance = (from.position - to.position).norm();
  if (!(distance > 0.0)) {
    throw Error(Errc::degenerate_geometry, "nodes " + std::to_string(from.id) + " and " +
                                               std::to_string(to.id) + " share a position");
  }
  if (distance <= radio.reference_distance_m) return radio.reference_gain;
  return radio.reference_gain *
         std::pow(radio.reference_distance_m / distance, radio.pathloss_exponent);
}

namespace {

void validate_radio(const RadioSpec& radio) {
  if (!(radio.tx_power_w > 0.0)) throw Error(Errc::schema, "tx_power_w must be positive");
  if (!(radio.noise_power_w > 0.0)) throw Error(Errc::schema, "noise_power_w must be positive");
  if (radio.packet_bits < 1) throw Error(Errc::schema, "packet_bits must be at least 1");
  if (!(radio.pathloss_exponent >= 0.0))
    throw Error(Errc::schema, "pathloss_exponent must be non-negative");
  if (!(radio.reference_distance_m > 0.0))
    throw Error(Errc::schema, "reference_distance_m must be positive");
  if (!(radio.reference_gain > 0.0)) throw Error(Errc::schema, "reference_gain must be positive");
}

}  // namespace

NetworkSpec::NetworkSpec(std::vector<NodeSpec> nodes, RadioSpec radio, SlotFrame frame)
    : nodes_(std::move(nodes)), radio_(radio), frame_(frame) {
  validate_radio(radio_);
  if (frame_.slot_count < 1) throw Error(Errc::schema, "frame needs at least one slot");

  std::set<int> seen;
  for (const auto& node : nodes_) {
    if (!seen.insert(node.id).second) {
      throw Error(Errc::duplicate_id, "node id " + std::to_string(node.id) + " appears twice");
    }
  }
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (int k = 0; k < node_count(); ++k) {
    if (nodes_[k].id != k + 1) {
      throw Error(Errc::schema, "node ids must form the contiguous range 1.." +
                                    std::to_string(node_count()));
    }
    switch (nodes_[k].role) {
      case Role::source: sources_.push_back(k); break;
      case Role::relay: relays_.push_back(k); break;
      case Role::destination: destinations_.push_back(k); break;
    }
  }
  if (sources_.empty()) throw Error(Errc::role, "network has no source");
  if (destinations_.empty()) throw Error(Errc::role, "network has no destination");

  gains_ = Eigen::MatrixXd::Zero(node_count(), node_count());
  for (int i = 0; i < node_count(); ++i) {
    for (int j = i + 1; j < node_count(); ++j) {
      gains_(i, j) = gains_(j, i) = pathloss_gain(nodes_[i], nodes_[j], radio_);
    }
  }
}

}  // namespace relaynet
