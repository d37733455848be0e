#include "relaynet/forwarding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

namespace {

std::string describe(const NetworkSpec& spec, Transmission t) {
  return "(node " + std::to_string(spec.id(t.node)) + ", slot " + std::to_string(t.slot + 1) + ")";
}

std::vector<Transmission> relay_targets(const NetworkSpec& spec, const RateMatrix& tau) {
  std::vector<Transmission> targets;
  for (int j : spec.relays()) {
    for (int v = 0; v < tau.slot_count(); ++v) {
      if (tau(j, v) > 0.0) targets.push_back({j, v});
    }
  }
  return targets;
}

double checked_ratio(const NetworkSpec& spec, Transmission target, double demand,
                     double coefficient) {
  if (!(coefficient > 0.0)) {
    throw Error(Errc::infeasible_rate, describe(spec, target) + " has no inflow to forward");
  }
  const double x = demand / coefficient;
  if (x > 1.0 + kFeasibilityTolerance) {
    throw Error(Errc::infeasible_rate, describe(spec, target) + " would need x = " +
                                           std::to_string(x) + " > 1");
  }
  return std::min(x, 1.0);
}

}  // namespace

double ForwardingMatrix::operator()(const ForwardKey& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

void ForwardingMatrix::set(const ForwardKey& key, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(Errc::domain, "forwarding probability must lie in [0, 1]");
  }
  if (key.sender == key.forwarder) {
    throw Error(Errc::domain, "a node does not forward its own packets");
  }
  if (x == 0.0) {
    entries_.erase(key);
  } else {
    entries_[key] = x;
  }
}

void ForwardingMatrix::validate(const NetworkSpec& spec) const {
  for (const auto& [key, x] : entries_) {
    const auto in_range = [&](int node) { return node >= 0 && node < spec.node_count(); };
    const auto slot_ok = [&](int slot) { return slot >= 0 && slot < spec.slot_count(); };
    if (!in_range(key.sender) || !in_range(key.forwarder) || !slot_ok(key.in_slot) ||
        !slot_ok(key.out_slot)) {
      throw Error(Errc::schema, "forwarding entry indexes outside the network");
    }
    if (spec.role(key.forwarder) != Role::relay) {
      throw Error(Errc::role, "node " + std::to_string(spec.id(key.forwarder)) +
                                  " is not a relay and cannot forward");
    }
    if (spec.role(key.sender) == Role::destination) {
      throw Error(Errc::role, "destination " + std::to_string(spec.id(key.sender)) +
                                  " never transmits");
    }
  }
}

std::vector<FeederTerm> feeder_terms(const NetworkSpec& spec, Transmission target,
                                     const RateMatrix& tau, const ChannelMatrix& channels) {
  std::vector<FeederTerm> terms;
  const double listening = 1.0 - tau(target.node, target.slot);
  for (int i = 0; i < spec.node_count(); ++i) {
    if (i == target.node || spec.role(i) == Role::destination) continue;
    for (int u = 0; u < spec.slot_count(); ++u) {
      const double c = tau(i, u) * channels(i, target.node, u) * listening;
      if (c > 0.0) terms.push_back({{i, u}, c});
    }
  }
  return terms;
}

double ConsistencyReport::max_abs() const {
  double worst = 0.0;
  for (const auto& r : residuals) worst = std::max(worst, std::abs(r.residual));
  return worst;
}

ConsistencyReport consistency_residuals(const NetworkSpec& spec, const ForwardingMatrix& x,
                                        const RateMatrix& tau, const ChannelMatrix& channels) {
  ConsistencyReport report;
  for (const auto target : relay_targets(spec, tau)) {
    double inflow = 0.0;
    for (const auto& term : feeder_terms(spec, target, tau, channels)) {
      inflow += term.coefficient *
                x({term.feeder.node, target.node, term.feeder.slot, target.slot});
    }
    report.residuals.push_back({target, inflow - tau(target.node, target.slot)});
  }
  return report;
}

ForwardingMatrix solve_chain_closed_form(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels) {
  ForwardingMatrix x;
  for (const auto target : relay_targets(spec, tau)) {
    const auto terms = feeder_terms(spec, target, tau, channels);
    if (terms.size() > 1) {
      throw Error(Errc::not_applicable, describe(spec, target) + " has " +
                                            std::to_string(terms.size()) + " feeders");
    }
    const double coefficient = terms.empty() ? 0.0 : terms.front().coefficient;
    const double value = checked_ratio(spec, target, tau(target.node, target.slot), coefficient);
    const auto& feeder = terms.front().feeder;
    x.set({feeder.node, target.node, feeder.slot, target.slot}, value);
  }
  return x;
}

ForwardingMatrix solve_chain_closed_form(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels, const FeederMap& route) {
  ForwardingMatrix x;
  for (const auto target : relay_targets(spec, tau)) {
    const auto it = route.find(target);
    if (it == route.end()) {
      throw Error(Errc::not_applicable, describe(spec, target) + " has no designated feeder");
    }
    const auto feeder = it->second;
    if (feeder.node == target.node || spec.role(feeder.node) == Role::destination) {
      throw Error(Errc::role, describe(spec, feeder) + " cannot feed " + describe(spec, target));
    }
    const double coefficient = tau(feeder.node, feeder.slot) *
                               channels(feeder.node, target.node, feeder.slot) *
                               (1.0 - tau(target.node, target.slot));
    const double value = checked_ratio(spec, target, tau(target.node, target.slot), coefficient);
    x.set({feeder.node, target.node, feeder.slot, target.slot}, value);
  }
  return x;
}

std::vector<ForwardingMatrix> sample_feasible_forwarding(const NetworkSpec& spec,
                                                         const RateMatrix& tau,
                                                         const ChannelMatrix& channels,
                                                         int count, std::uint64_t seed,
                                                         int max_attempts) {
  struct Constraint {
    Transmission target;
    double demand;
    std::vector<FeederTerm> terms;
  };
  std::vector<Constraint> constraints;
  for (const auto target : relay_targets(spec, tau)) {
    auto terms = feeder_terms(spec, target, tau, channels);
    double capacity = 0.0;
    for (const auto& t : terms) capacity += t.coefficient;
    const double demand = tau(target.node, target.slot);
    if (capacity < demand - kFeasibilityTolerance) {
      throw Error(Errc::infeasible_tau, describe(spec, target) + " needs inflow " +
                                            std::to_string(demand) + " but at most " +
                                            std::to_string(capacity) + " can be forwarded");
    }
    constraints.push_back({target, demand, std::move(terms)});
  }

  std::mt19937_64 engine(seed);
  std::vector<ForwardingMatrix> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    ForwardingMatrix x;
    for (const auto& c : constraints) {
      const auto k = c.terms.size();
      const auto key = [&](std::size_t a) {
        const auto& f = c.terms[a].feeder;
        return ForwardKey{f.node, c.target.node, f.slot, c.target.slot};
      };
      if (k == 1) {
        x.set(key(0), std::min(1.0, c.demand / c.terms[0].coefficient));
        continue;
      }
      // y_a = c_a x_a is uniform on {y >= 0, sum y = demand}; keep y_a <= c_a.
      std::vector<double> y(k);
      bool accepted = false;
      for (int attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
        double total = 0.0;
        for (auto& e : y) {
          e = -std::log1p(-uniform01(engine));
          total += e;
        }
        accepted = true;
        for (std::size_t a = 0; a < k; ++a) {
          y[a] *= c.demand / total;
          if (y[a] > c.terms[a].coefficient) accepted = false;
        }
      }
      if (!accepted) {
        throw Error(Errc::sampling_exhausted,
                    "no feasible draw for " + describe(spec, c.target) + " after " +
                        std::to_string(max_attempts) + " proposals");
      }
      for (std::size_t a = 0; a < k; ++a) {
        x.set(key(a), std::min(1.0, y[a] / c.terms[a].coefficient));
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

ForwardingMatrix proportional_forwarding(const NetworkSpec& spec, const RateMatrix& tau,
                                         const ChannelMatrix& channels) {
  ForwardingMatrix x;
  for (const auto target : relay_targets(spec, tau)) {
    const auto terms = feeder_terms(spec, target, tau, channels);
    double capacity = 0.0;
    for (const auto& t : terms) capacity += t.coefficient;
    const double demand = tau(target.node, target.slot);
    if (capacity < demand - kFeasibilityTolerance || capacity == 0.0) {
      throw Error(Errc::infeasible_tau, describe(spec, target) + " cannot be fed");
    }
    const double share = std::min(1.0, demand / capacity);
    for (const auto& t : terms) {
      x.set({t.feeder.node, target.node, t.feeder.slot, target.slot}, share);
    }
  }
  return x;
}

}  // namespace relaynet
