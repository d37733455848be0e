#include "relaynet/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

double ber_bpsk_awgn(double sinr) {
  if (!(sinr >= 0.0)) throw Error(Errc::domain, "SINR must be non-negative");
  return 0.5 * std::erfc(std::sqrt(sinr));
}

double packet_error_rate(double sinr, int packet_bits, const BitErrorModel& ber) {
  if (packet_bits < 1) throw Error(Errc::domain, "packet must hold at least one bit");
  const double bit_error = ber(sinr);
  // log1p keeps tiny bit error rates from vanishing in 1 - BER.
  return -std::expm1(packet_bits * std::log1p(-bit_error));
}

std::vector<int> interferer_candidates(int sender, int receiver, int slot, const RateMatrix& tau) {
  std::vector<int> out;
  for (int k = 0; k < tau.node_count(); ++k) {
    if (k != sender && k != receiver && tau(k, slot) > 0.0) out.push_back(k);
  }
  return out;
}

double interference_power(int receiver, const InterferingSet& set, const NetworkSpec& spec) {
  double power = 0.0;
  for (int k : set.members) power += spec.radio().tx_power_w * spec.gain(k, receiver);
  return power;
}

double sinr(int sender, int receiver, double interference, const NetworkSpec& spec) {
  return spec.radio().tx_power_w * spec.gain(sender, receiver) /
         (spec.radio().noise_power_w + interference);
}

double interfering_set_probability(const InterferingSet& set, std::span<const int> candidates,
                                   int slot, const RateMatrix& tau) {
  double probability = 1.0;
  for (int k : candidates) {
    const bool member = std::find(set.members.begin(), set.members.end(), k) != set.members.end();
    probability *= member ? tau(k, slot) : 1.0 - tau(k, slot);
  }
  return probability;
}

double channel_probability_exact(int sender, int receiver, int slot, const RateMatrix& tau,
                                 const NetworkSpec& spec, int cap, const BitErrorModel& ber) {
  const auto candidates = interferer_candidates(sender, receiver, slot, tau);
  const int m = static_cast<int>(candidates.size());
  if (m > cap || m > 62) {
    throw Error(Errc::cap_exceeded, std::to_string(m) + " candidate interferers exceed the cap of " +
                                        std::to_string(cap) + "; use the sampled estimate");
  }
  const double signal = spec.radio().tx_power_w * spec.gain(sender, receiver);
  const double noise = spec.radio().noise_power_w;
  const int bits = spec.radio().packet_bits;

  std::vector<double> power(m), on(m), off(m);
  for (int k = 0; k < m; ++k) {
    power[k] = spec.radio().tx_power_w * spec.gain(candidates[k], receiver);
    on[k] = tau(candidates[k], slot);
    off[k] = 1.0 - on[k];
  }

  double total = 0.0;
  const std::uint64_t subsets = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    double weight = 1.0;
    double interference = 0.0;
    for (int k = 0; k < m && weight > 0.0; ++k) {
      if (mask >> k & 1U) {
        weight *= on[k];
        interference += power[k];
      } else {
        weight *= off[k];
      }
    }
    if (weight == 0.0) continue;
    total += weight * (1.0 - packet_error_rate(signal / (noise + interference), bits, ber));
  }
  return std::clamp(total, 0.0, 1.0);
}

SampledProbability channel_probability_sampled(int sender, int receiver, int slot,
                                               const RateMatrix& tau, const NetworkSpec& spec,
                                               std::uint64_t samples, std::uint64_t seed,
                                               const BitErrorModel& ber) {
  if (samples < 1) throw Error(Errc::domain, "need at least one sample");
  const auto candidates = interferer_candidates(sender, receiver, slot, tau);
  const double signal = spec.radio().tx_power_w * spec.gain(sender, receiver);
  const double noise = spec.radio().noise_power_w;
  const int bits = spec.radio().packet_bits;

  std::mt19937_64 engine(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double interference = 0.0;
    for (int k : candidates) {
      if (uniform01(engine) < tau(k, slot)) {
        interference += spec.radio().tx_power_w * spec.gain(k, receiver);
      }
    }
    const double success = 1.0 - packet_error_rate(signal / (noise + interference), bits, ber);
    sum += success;
    sum_sq += success * success;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double variance = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(variance / n)};
}

ChannelMatrix::ChannelMatrix(int nodes, int slots)
    : slots_(slots, Eigen::MatrixXd::Zero(nodes, nodes)) {
  if (nodes < 1 || slots < 1) throw Error(Errc::domain, "channel matrix needs nodes and slots");
}

void ChannelMatrix::set(int from, int to, int slot, double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(Errc::domain, "channel probability must lie in [0, 1]");
  }
  if (from == to) throw Error(Errc::domain, "no channel from a node to itself");
  slots_.at(slot)(from, to) = probability;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ChannelMatrix channel_matrix(const RateMatrix& tau, const NetworkSpec& spec,
                             const ChannelOptions& options) {
  const int n = spec.node_count();
  const int slots = spec.slot_count();
  ChannelMatrix channels(n, slots);
  for (int u = 0; u < slots; ++u) {
    for (int i = 0; i < n; ++i) {
      // destinations never transmit, so their outgoing links are irrelevant
      if (spec.role(i) == Role::destination) continue;
      for (int j = 0; j < n; ++j) {
        if (i == j || spec.role(j) == Role::source) continue;
        const auto m = interferer_candidates(i, j, u, tau).size();
        double p;
        if (static_cast<int>(m) <= options.exact_cap) {
          p = channel_probability_exact(i, j, u, tau, spec, options.exact_cap, options.ber);
        } else {
          const auto stream = (static_cast<std::uint64_t>(u) * n + i) * n + j;
          p = channel_probability_sampled(i, j, u, tau, spec, options.samples,
                                          derive_seed(options.seed, stream), options.ber)
                  .estimate;
        }
        channels.set(i, j, u, p);
      }
    }
  }
  return channels;
}

}  // namespace relaynet
