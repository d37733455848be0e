#ifndef RELAYNET_TESTS_SUPPORT_HPP
#define RELAYNET_TESTS_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "relaynet/channel.hpp"
#include "relaynet/topology.hpp"

namespace relaynet::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RELAYNET_FIXTURE_DIR) / name;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

inline NetworkSpec load_fixture(const std::string& name) {
  return load_network(read_text(fixture(name)));
}

struct Placed {
  Role role;
  double x;
  double y;
};

inline RadioSpec test_radio() {
  RadioSpec radio;
  radio.tx_power_w = 1.0;
  radio.noise_power_w = 0.01;
  radio.packet_bits = 32;
  return radio;
}

/// Nodes get ids 1..n in the order given.
inline NetworkSpec make_spec(std::initializer_list<Placed> placed, int slots,
                             RadioSpec radio = test_radio()) {
  std::vector<NodeSpec> nodes;
  int id = 1;
  for (const auto& p : placed) nodes.push_back({id++, p.role, {p.x, p.y}});
  return NetworkSpec(std::move(nodes), radio, SlotFrame{slots});
}

/// Source 1, relay 2, destination 3 on a triangle; two slots.
inline NetworkSpec one_relay_spec() {
  return make_spec({{Role::source, 0, 0}, {Role::relay, 3, 1}, {Role::destination, 6, 0}}, 2);
}

/// Channel matrix of the 1-relay layout with prescribed probabilities: the
/// source speaks in slot 0, the relay in slot 1.
inline ChannelMatrix one_relay_channels(double p_sd, double p_sr, double p_rd) {
  ChannelMatrix p(3, 2);
  p.set(0, 2, 0, p_sd);
  p.set(0, 1, 0, p_sr);
  p.set(1, 2, 1, p_rd);
  return p;
}

}  // namespace relaynet::testing

#endif
