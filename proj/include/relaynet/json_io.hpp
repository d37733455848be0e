#ifndef RELAYNET_JSON_IO_HPP
#define RELAYNET_JSON_IO_HPP

#include <json.hpp>

#include "relaynet/channel.hpp"
#include "relaynet/forwarding.hpp"
#include "relaynet/mc_oracle.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/steady_state.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so the shortest round-trip printing used
/// by the JSON writer emits at most 12 digits.
double round_significant(double value, int digits = 12);

Json network_to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(const Json& document);

/// {"tau": relay rows by ascending id, "sources": source rows by ascending id}.
Json rates_to_json(const NetworkSpec& spec, const RateMatrix& tau);
RateMatrix rates_from_json(const NetworkSpec& spec, const Json& document);
/// Only the "sources" rows; relay rows are left at zero.
RateMatrix source_rates_from_json(const NetworkSpec& spec, const Json& document);

/// Array of {i, j, u, v, x} with 1-based node ids and slots.
Json forwarding_to_json(const NetworkSpec& spec, const ForwardingMatrix& x);
ForwardingMatrix forwarding_from_json(const NetworkSpec& spec, const Json& document);

/// {"links": [{i, j, u, p}]} over transmitting senders and receiving nodes.
Json channels_to_json(const NetworkSpec& spec, const ChannelMatrix& channels);

Json criteria_to_json(const Evaluation& evaluation);
Json estimate_to_json(const SimEstimate& estimate);

}  // namespace relaynet

#endif  // RELAYNET_JSON_IO_HPP
