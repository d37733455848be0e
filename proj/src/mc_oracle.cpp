#include "relaynet/mc_oracle.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "relaynet/error.hpp"
#include "relaynet/steady_state.hpp"

namespace relaynet {

double Estimate::relative_half_width() const {
  const double half = 0.5 * (ci_high - ci_low);
  return mean != 0.0 ? half / std::abs(mean) : (half == 0.0 ? 0.0 : INFINITY);
}

namespace {

constexpr std::uint64_t kMaxCopiesPerPacket = 10'000'000;

struct Hop {
  int target = 0;  // transmission id of (j, v)
  double probability = 0.0;  // x_ij^{uv} (1 - tau_j^v)
};

struct RelayReceiver {
  double reception = 0.0;  // p_ij^u
  std::vector<Hop> hops;
};

struct Outlet {
  std::vector<double> destinations;  // p_id^u per destination
  std::vector<RelayReceiver> relays;
};

struct Tally {
  std::uint64_t packets = 0;
  std::uint64_t truncated = 0;
  // sums of per-sample totals and their squares, per criterion
  std::uint64_t sum[4] = {0, 0, 0, 0};
  std::uint64_t sum_sq[4] = {0, 0, 0, 0};
};

struct Pending {
  int node;
  int slot;
  int depth;
};

class Simulator {
 public:
  Simulator(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
            const ChannelMatrix& channels, const SimConfig& config)
      : spec_(spec), tau_(tau), config_(config), outlets_(spec.node_count() * spec.slot_count()) {
    const int slots = spec.slot_count();
    for (int i = 0; i < spec.node_count(); ++i) {
      if (spec.role(i) == Role::destination) continue;
      for (int u = 0; u < slots; ++u) {
        if (tau(i, u) <= 0.0) continue;
        Outlet& outlet = outlets_[i * slots + u];
        for (int d : spec.destinations()) outlet.destinations.push_back(channels(i, d, u));
        for (int j : spec.relays()) {
          if (j == i) continue;
          RelayReceiver receiver{channels(i, j, u), {}};
          for (int v = 0; v < slots; ++v) {
            const double forward = x({i, j, u, v}) * (1.0 - tau(j, v));
            if (tau(j, v) > 0.0 && forward > 0.0) receiver.hops.push_back({j * slots + v, forward});
          }
          if (!receiver.hops.empty() && receiver.reception > 0.0) {
            outlet.relays.push_back(std::move(receiver));
          }
        }
      }
    }
  }

  void run(std::uint64_t begin, std::uint64_t end, Tally& tally) const {
    std::vector<Pending> stack;
    const int slots = spec_.slot_count();
    for (std::uint64_t packet = begin; packet < end; ++packet) {
      std::mt19937_64 engine(derive_seed(config_.seed, packet));
      std::uint64_t totals[4] = {0, 0, 0, 0};  // deliveries, delay, energy, any-delivery
      bool truncated = false;
      for (int s : spec_.sources()) {
        std::uint64_t delivered = 0;
        std::uint64_t copies = 0;
        for (int u = 0; u < slots; ++u) {
          if (uniform01(engine) < tau_(s, u)) stack.push_back({s, u, 0});
        }
        while (!stack.empty()) {
          const Pending tx = stack.back();
          stack.pop_back();
          const Outlet& outlet = outlets_[tx.node * slots + tx.slot];
          for (double p : outlet.destinations) {
            if (uniform01(engine) < p) {
              ++delivered;
              totals[1] += static_cast<std::uint64_t>(tx.depth);
            }
          }
          for (const auto& receiver : outlet.relays) {
            if (!(uniform01(engine) < receiver.reception)) continue;
            for (const auto& hop : receiver.hops) {
              if (!(uniform01(engine) < hop.probability)) continue;
              if (tx.depth + 1 > config_.max_epochs || copies >= kMaxCopiesPerPacket) {
                truncated = true;
                continue;
              }
              ++copies;
              ++totals[2];
              stack.push_back({hop.target / slots, hop.target % slots, tx.depth + 1});
            }
          }
        }
        totals[0] += delivered;
        totals[3] += delivered > 0 ? 1 : 0;
      }
      ++tally.packets;
      if (truncated) ++tally.truncated;
      for (int k = 0; k < 4; ++k) {
        tally.sum[k] += totals[k];
        tally.sum_sq[k] += totals[k] * totals[k];
      }
    }
  }

 private:
  const NetworkSpec& spec_;
  const RateMatrix& tau_;
  const SimConfig& config_;
  std::vector<Outlet> outlets_;
};

Estimate summarize(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t n, double sources,
                   double z) {
  const long double count = static_cast<long double>(n);
  const long double mean_total = static_cast<long double>(sum) / count;
  long double variance = 0.0L;
  if (n > 1) {
    variance = (static_cast<long double>(sum_sq) - count * mean_total * mean_total) / (count - 1);
    if (variance < 0) variance = 0;
  }
  Estimate e;
  e.mean = static_cast<double>(mean_total / sources);
  e.standard_error = static_cast<double>(std::sqrt(variance / count) / sources);
  e.ci_low = e.mean - z * e.standard_error;
  e.ci_high = e.mean + z * e.standard_error;
  return e;
}

}  // namespace

SimEstimate simulate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                     const ChannelMatrix& channels, const SimConfig& config) {
  if (config.n_packets < 1) throw Error(Errc::domain, "need at least one packet");
  if (config.max_epochs < 1) throw Error(Errc::domain, "max_epochs must be at least 1");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw Error(Errc::domain, "confidence must lie in (0, 1)");
  }
  x.validate(spec);
  const auto system = build_transition_system(spec, x, tau, channels);
  if (!is_transient(system.relaying)) {
    throw Error(Errc::divergent_system, "spectral radius of the relaying matrix is not below 1");
  }

  const Simulator simulator(spec, tau, x, channels, config);
  const auto workers = static_cast<std::uint64_t>(std::max(1, config.threads));
  std::vector<Tally> tallies(workers);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = config.n_packets * w / workers;
      const std::uint64_t end = config.n_packets * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { simulator.run(begin, end, tallies[w]); });
    }
  }
  Tally total;
  for (const auto& t : tallies) {
    total.packets += t.packets;
    total.truncated += t.truncated;
    for (int k = 0; k < 4; ++k) {
      total.sum[k] += t.sum[k];
      total.sum_sq[k] += t.sum_sq[k];
    }
  }

  const boost::math::normal normal;
  const double z = boost::math::quantile(normal, 0.5 + 0.5 * config.confidence);
  const double sources = static_cast<double>(spec.sources().size());
  SimEstimate out;
  out.f = summarize(total.sum[0], total.sum_sq[0], total.packets, sources, z);
  out.f_d = summarize(total.sum[1], total.sum_sq[1], total.packets, sources, z);
  out.f_e = summarize(total.sum[2], total.sum_sq[2], total.packets, sources, z);
  out.delivery_probability = summarize(total.sum[3], total.sum_sq[3], total.packets, sources, z);
  out.packets = total.packets;
  out.truncated = total.truncated;
  out.truncation_warning =
      static_cast<double>(total.truncated) > 0.01 * static_cast<double>(total.packets);
  return out;
}

}  // namespace relaynet
