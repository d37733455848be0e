#ifndef RELAYNET_CHANNEL_HPP
#define RELAYNET_CHANNEL_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

/// Maps an SINR to a bit error probability.
using BitErrorModel = std::function<double(double)>;

/// Uncoded BPSK over AWGN: 0.5 * erfc(sqrt(gamma)). Throws Errc::domain for gamma < 0.
double ber_bpsk_awgn(double sinr);

/// 1 - (1 - BER(gamma))^bits.
double packet_error_rate(double sinr, int packet_bits, const BitErrorModel& ber = ber_bpsk_awgn);

/// Interfering set on a link in one slot: concurrently active transmitters,
/// never the sender or the receiver.
struct InterferingSet {
  std::vector<int> members;
};

/// Transmitters that may interfere on (sender -> receiver) in a slot: every
/// node active in that slot except the two link ends.
std::vector<int> interferer_candidates(int sender, int receiver, int slot, const RateMatrix& tau);

/// Sum of P_T * a_kj over the interfering set.
double interference_power(int receiver, const InterferingSet& set, const NetworkSpec& spec);

/// P_T * a_ij / (N_0 + I).
double sinr(int sender, int receiver, double interference, const NetworkSpec& spec);

/// Probability that exactly the members of the set transmit while every other
/// candidate stays silent.
double interfering_set_probability(const InterferingSet& set, std::span<const int> candidates,
                                   int slot, const RateMatrix& tau);

struct ChannelOptions {
  int exact_cap = 20;                  // candidate interferers handled by full enumeration
  std::uint64_t samples = 200000;      // draws per link beyond the cap
  std::uint64_t seed = 1;
  BitErrorModel ber = ber_bpsk_awgn;
};

/// Average success probability over all 2^M interfering sets.
/// Throws Errc::cap_exceeded when M > cap.
double channel_probability_exact(int sender, int receiver, int slot, const RateMatrix& tau,
                                 const NetworkSpec& spec, int cap = 20,
                                 const BitErrorModel& ber = ber_bpsk_awgn);

struct SampledProbability {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of the same average; deterministic per seed.
SampledProbability channel_probability_sampled(int sender, int receiver, int slot,
                                               const RateMatrix& tau, const NetworkSpec& spec,
                                               std::uint64_t samples, std::uint64_t seed,
                                               const BitErrorModel& ber = ber_bpsk_awgn);

/// p_ij^u for every ordered pair and slot; diagonal entries are zero.
class ChannelMatrix {
 public:
  ChannelMatrix(int nodes, int slots);

  double operator()(int from, int to, int slot) const { return slots_[slot](from, to); }
  void set(int from, int to, int slot, double probability);

  const Eigen::MatrixXd& slot(int u) const { return slots_.at(u); }
  int node_count() const noexcept { return static_cast<int>(slots_.front().rows()); }
  int slot_count() const noexcept { return static_cast<int>(slots_.size()); }

 private:
  std::vector<Eigen::MatrixXd> slots_;
};

/// Fills every link and slot, switching to sampling above options.exact_cap.
ChannelMatrix channel_matrix(const RateMatrix& tau, const NetworkSpec& spec,
                             const ChannelOptions& options = {});

/// Deterministic 64-bit mix of a seed with a stream index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from 53 random bits.
template <typename Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace relaynet

#endif  // RELAYNET_CHANNEL_HPP
