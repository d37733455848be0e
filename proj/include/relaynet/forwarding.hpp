#ifndef RELAYNET_FORWARDING_HPP
#define RELAYNET_FORWARDING_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "relaynet/channel.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

/// Index of x_ij^{uv}: relay `forwarder` retransmits in `out_slot` a packet
/// received from `sender` in `in_slot`. All indices 0-based.
struct ForwardKey {
  int sender = 0;
  int forwarder = 0;
  int in_slot = 0;
  int out_slot = 0;
  auto operator<=>(const ForwardKey&) const = default;
};

/// Sparse forwarding probabilities; absent entries are zero. The same matrix
/// serves every source since relays cannot tell packets apart.
class ForwardingMatrix {
 public:
  ForwardingMatrix() = default;

  double operator()(const ForwardKey& key) const;
  /// Stores x (removes the entry when x == 0). Throws for x outside [0, 1] or
  /// a node forwarding to itself.
  void set(const ForwardKey& key, double x);

  const std::map<ForwardKey, double>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Forwarders must be relays and senders must be sources or relays.
  void validate(const NetworkSpec& spec) const;

  bool operator==(const ForwardingMatrix&) const = default;

 private:
  std::map<ForwardKey, double> entries_;
};

/// One term of a consistency equation: feeder (i, u) with coefficient
/// tau_i^u p_ij^u (1 - tau_j^v).
struct FeederTerm {
  Transmission feeder;
  double coefficient = 0.0;
};

/// Feeders of relay transmission `target` with a positive coefficient.
std::vector<FeederTerm> feeder_terms(const NetworkSpec& spec, Transmission target,
                                     const RateMatrix& tau, const ChannelMatrix& channels);

struct ConsistencyResidual {
  Transmission target;
  double residual = 0.0;  // inflow through X minus tau_j^v
};

struct ConsistencyReport {
  std::vector<ConsistencyResidual> residuals;  // one per active relay transmission

  double max_abs() const;
  bool consistent(double tolerance = kFeasibilityTolerance) const {
    return max_abs() <= tolerance;
  }
};

ConsistencyReport consistency_residuals(const NetworkSpec& spec, const ForwardingMatrix& x,
                                        const RateMatrix& tau, const ChannelMatrix& channels);

/// Designated feeder per relay transmission, for chain-like layouts.
using FeederMap = std::map<Transmission, Transmission>;

/// x = tau_j^v / (tau_i^u p_ij^u (1 - tau_j^v)) for the unique feeder of every
/// active relay transmission. Errc::not_applicable when a transmission has
/// several feeders; Errc::infeasible_rate when some x exceeds 1.
ForwardingMatrix solve_chain_closed_form(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels);

/// Same, with the feeder of each active relay transmission fixed by `route`.
ForwardingMatrix solve_chain_closed_form(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels, const FeederMap& route);

/// Draws forwarding matrices uniformly from the feasible polytope of each
/// consistency equation (Dirichlet proposal, rejected when any x > 1).
/// Errc::infeasible_tau when some equation cannot be met with x <= 1;
/// Errc::sampling_exhausted when rejection does not succeed within
/// `max_attempts` proposals for one equation.
std::vector<ForwardingMatrix> sample_feasible_forwarding(const NetworkSpec& spec,
                                                         const RateMatrix& tau,
                                                         const ChannelMatrix& channels,
                                                         int count, std::uint64_t seed,
                                                         int max_attempts = 100000);

/// Deterministic member of the family: every feeder scaled by the same
/// factor tau_j^v / sum of coefficients.
ForwardingMatrix proportional_forwarding(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels);

}  // namespace relaynet

#endif  // RELAYNET_FORWARDING_HPP
