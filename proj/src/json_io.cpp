#include "relaynet/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return std::strtod(buffer, nullptr);
}

namespace {

const Json& field(const Json& object, const char* key) {
  if (!object.is_object() || !object.contains(key)) {
    throw Error(Errc::schema, std::string("missing field '") + key + "'");
  }
  return object.at(key);
}

double number(const Json& object, const char* key) {
  const auto& value = field(object, key);
  if (!value.is_number()) throw Error(Errc::schema, std::string("field '") + key + "' must be a number");
  return value.get<double>();
}

int integer(const Json& object, const char* key) {
  const auto& value = field(object, key);
  if (!value.is_number_integer()) {
    throw Error(Errc::schema, std::string("field '") + key + "' must be an integer");
  }
  return value.get<int>();
}

Role parse_role(const Json& value) {
  if (!value.is_string()) throw Error(Errc::schema, "node role must be a string");
  const auto name = value.get<std::string>();
  if (name == "source") return Role::source;
  if (name == "relay") return Role::relay;
  if (name == "destination") return Role::destination;
  throw Error(Errc::schema, "unknown node role '" + name + "'");
}

Json rows_to_json(const RateMatrix& tau, const std::vector<int>& nodes) {
  Json rows = Json::array();
  for (int i : nodes) {
    Json row = Json::array();
    for (int u = 0; u < tau.slot_count(); ++u) row.push_back(tau(i, u));
    rows.push_back(std::move(row));
  }
  return rows;
}

void rows_from_json(const Json& rows, const std::vector<int>& nodes, int slots, const char* what,
                    Eigen::MatrixXd& values) {
  if (!rows.is_array() || rows.size() != nodes.size()) {
    throw Error(Errc::schema, std::string("'") + what + "' needs one row per node of that role");
  }
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != slots) {
      throw Error(Errc::schema, std::string("'") + what + "' rows need one entry per slot");
    }
    for (int u = 0; u < slots; ++u) {
      if (!row[u].is_number()) throw Error(Errc::schema, "rates must be numbers");
      values(nodes[r], u) = row[u].get<double>();
    }
  }
}

}  // namespace

NetworkSpec network_from_json(const Json& document) {
  const auto& nodes_json = field(document, "nodes");
  if (!nodes_json.is_array()) throw Error(Errc::schema, "'nodes' must be an array");
  std::vector<NodeSpec> nodes;
  for (const auto& n : nodes_json) {
    NodeSpec node;
    node.id = integer(n, "id");
    node.role = parse_role(field(n, "role"));
    node.position = {number(n, "x"), number(n, "y")};
    nodes.push_back(node);
  }
  const auto& r = field(document, "radio");
  RadioSpec radio;
  radio.tx_power_w = number(r, "tx_power_w");
  radio.noise_power_w = number(r, "noise_power_w");
  radio.packet_bits = integer(r, "packet_bits");
  radio.pathloss_exponent = number(r, "pathloss_exponent");
  radio.reference_distance_m = number(r, "reference_distance_m");
  radio.reference_gain = number(r, "reference_gain");
  SlotFrame frame;
  frame.slot_count = integer(field(document, "frame"), "slots");
  return NetworkSpec(std::move(nodes), radio, frame);
}

NetworkSpec load_network(std::string_view document) {
  Json parsed;
  try {
    parsed = Json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema, e.what());
  }
  return network_from_json(parsed);
}

Json network_to_json(const NetworkSpec& spec) {
  Json nodes = Json::array();
  for (const auto& n : spec.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"role", std::string(to_string(n.role))},
                     {"x", n.position.x()},
                     {"y", n.position.y()}});
  }
  const auto& r = spec.radio();
  return {{"nodes", nodes},
          {"radio",
           {{"tx_power_w", r.tx_power_w},
            {"noise_power_w", r.noise_power_w},
            {"packet_bits", r.packet_bits},
            {"pathloss_exponent", r.pathloss_exponent},
            {"reference_distance_m", r.reference_distance_m},
            {"reference_gain", r.reference_gain}}},
          {"frame", {{"slots", spec.slot_count()}}}};
}

Json rates_to_json(const NetworkSpec& spec, const RateMatrix& tau) {
  return {{"tau", rows_to_json(tau, spec.relays())}, {"sources", rows_to_json(tau, spec.sources())}};
}

RateMatrix rates_from_json(const NetworkSpec& spec, const Json& document) {
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(spec.node_count(), spec.slot_count());
  rows_from_json(field(document, "tau"), spec.relays(), spec.slot_count(), "tau", values);
  rows_from_json(field(document, "sources"), spec.sources(), spec.slot_count(), "sources", values);
  return RateMatrix(spec, std::move(values));
}

RateMatrix source_rates_from_json(const NetworkSpec& spec, const Json& document) {
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(spec.node_count(), spec.slot_count());
  rows_from_json(field(document, "sources"), spec.sources(), spec.slot_count(), "sources", values);
  return RateMatrix(spec, std::move(values));
}

Json forwarding_to_json(const NetworkSpec&, const ForwardingMatrix& x) {
  Json out = Json::array();
  for (const auto& [key, value] : x.entries()) {
    out.push_back({{"i", key.sender + 1},
                   {"j", key.forwarder + 1},
                   {"u", key.in_slot + 1},
                   {"v", key.out_slot + 1},
                   {"x", value}});
  }
  return out;
}

ForwardingMatrix forwarding_from_json(const NetworkSpec& spec, const Json& document) {
  if (!document.is_array()) throw Error(Errc::schema, "forwarding document must be an array");
  ForwardingMatrix x;
  for (const auto& e : document) {
    const ForwardKey key{integer(e, "i") - 1, integer(e, "j") - 1, integer(e, "u") - 1,
                         integer(e, "v") - 1};
    x.set(key, number(e, "x"));
  }
  x.validate(spec);
  return x;
}

Json channels_to_json(const NetworkSpec& spec, const ChannelMatrix& channels) {
  Json links = Json::array();
  for (int i = 0; i < spec.node_count(); ++i) {
    if (spec.role(i) == Role::destination) continue;
    for (int j = 0; j < spec.node_count(); ++j) {
      if (i == j || spec.role(j) == Role::source) continue;
      for (int u = 0; u < spec.slot_count(); ++u) {
        links.push_back({{"i", i + 1}, {"j", j + 1}, {"u", u + 1}, {"p", channels(i, j, u)}});
      }
    }
  }
  return {{"links", links}};
}

Json criteria_to_json(const Evaluation& evaluation) {
  const auto pack = [](const CriteriaVector& c) {
    return Json{{"f", round_significant(c.f)},
                {"f_c", round_significant(c.f_c)},
                {"f_d", round_significant(c.f_d)},
                {"f_e", round_significant(c.f_e)}};
  };
  Json out = pack(evaluation.criteria);
  out["mean_delay"] = round_significant(evaluation.criteria.mean_delay());
  if (evaluation.per_source.size() > 1) {
    Json per = Json::array();
    for (const auto& c : evaluation.per_source) per.push_back(pack(c));
    out["per_source"] = per;
  }
  return out;
}

Json estimate_to_json(const SimEstimate& estimate) {
  const auto pack = [](const Estimate& e) {
    return Json{{"mean", round_significant(e.mean)},
                {"se", round_significant(e.standard_error)},
                {"ci", {round_significant(e.ci_low), round_significant(e.ci_high)}}};
  };
  return {{"f", pack(estimate.f)},
          {"f_d", pack(estimate.f_d)},
          {"f_e", pack(estimate.f_e)},
          {"delivery_probability", pack(estimate.delivery_probability)},
          {"packets", estimate.packets},
          {"truncated", estimate.truncated},
          {"truncation_warning", estimate.truncation_warning}};
}

}  // namespace relaynet
