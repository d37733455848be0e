#ifndef RELAYNET_TOPOLOGY_HPP
#define RELAYNET_TOPOLOGY_HPP

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace relaynet {

enum class Role { source, relay, destination };

std::string_view to_string(Role role) noexcept;

struct NodeSpec {
  int id = 0;  // 1-based, contiguous
  Role role = Role::relay;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // meters
};

struct RadioSpec {
  double tx_power_w = 1.0;
  double noise_power_w = 1.0;
  int packet_bits = 1;
  double pathloss_exponent = 2.0;
  double reference_distance_m = 1.0;
  double reference_gain = 1.0;
};

struct SlotFrame {
  int slot_count = 1;
};

/// Isotropic gain g_ref * (d0 / d)^alpha, capped at g_ref inside d0.
/// Throws Errc::degenerate_geometry for coincident positions.
double pathloss_gain(const NodeSpec& from, const NodeSpec& to, const RadioSpec& radio);

/// Validated, immutable network description. Nodes are stored by id, so the
/// node with id k lives at index k - 1. Every ordered pair is a potential link.
class NetworkSpec {
 public:
  NetworkSpec(std::vector<NodeSpec> nodes, RadioSpec radio, SlotFrame frame);

  const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
  const RadioSpec& radio() const noexcept { return radio_; }
  const SlotFrame& frame() const noexcept { return frame_; }

  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  int slot_count() const noexcept { return frame_.slot_count; }
  Role role(int index) const { return nodes_.at(index).role; }
  int id(int index) const { return nodes_.at(index).id; }

  /// Node indices (0-based) by role, ascending.
  const std::vector<int>& sources() const noexcept { return sources_; }
  const std::vector<int>& relays() const noexcept { return relays_; }
  const std::vector<int>& destinations() const noexcept { return destinations_; }

  /// Precomputed a_ij; the diagonal is zero.
  double gain(int from, int to) const { return gains_(from, to); }
  const Eigen::MatrixXd& gains() const noexcept { return gains_; }

 private:
  std::vector<NodeSpec> nodes_;
  RadioSpec radio_;
  SlotFrame frame_;
  std::vector<int> sources_;
  std::vector<int> relays_;
  std::vector<int> destinations_;
  Eigen::MatrixXd gains_;
};

/// Parses and validates a topology document (JSON text).
NetworkSpec load_network(std::string_view document);

}  // namespace relaynet

#endif  // RELAYNET_TOPOLOGY_HPP
