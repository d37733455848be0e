#include "relaynet/steady_state.hpp"

#include <map>

#include "relaynet/rates.hpp"

namespace relaynet {

std::vector<Transmission> relay_transmissions(const NetworkSpec& spec, const RateMatrix& tau) {
  std::vector<Transmission> index;
  for (int j : spec.relays()) {
    for (int v = 0; v < spec.slot_count(); ++v) {
      if (tau(j, v) > 0.0) index.push_back({j, v});
    }
  }
  return index;
}

std::vector<Transmission> destination_columns(const NetworkSpec& spec) {
  std::vector<Transmission> columns;
  for (int d : spec.destinations()) {
    for (int u = 0; u < spec.slot_count(); ++u) columns.push_back({d, u});
  }
  return columns;
}

Eigen::MatrixXd build_relaying_matrix(const NetworkSpec& spec, const ForwardingMatrix& x,
                                      const RateMatrix& tau, const ChannelMatrix& channels,
                                      const std::vector<Transmission>& index) {
  const auto l = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(l, l);
  for (Eigen::Index r = 0; r < l; ++r) {
    const auto [i, u] = index[r];
    for (Eigen::Index c = 0; c < l; ++c) {
      const auto [j, v] = index[c];
      if (i == j) continue;
      const double entry = channels(i, j, u) * (1.0 - tau(j, v)) * x({i, j, u, v});
      if (entry >= 1.0) {
        throw Error(Errc::model_violation,
                    "relaying entry from node " + std::to_string(spec.id(i)) + " to node " +
                        std::to_string(spec.id(j)) + " reaches 1");
      }
      q(r, c) = entry;
    }
  }
  return q;
}

Eigen::MatrixXd build_arrival_matrix(const NetworkSpec& spec, const ChannelMatrix& channels,
                                     const std::vector<Transmission>& index) {
  const auto columns = destination_columns(spec);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(index.size()),
                                            static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < index.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].slot == index[r].slot) {
        d(r, c) = channels(index[r].node, columns[c].node, index[r].slot);
      }
    }
  }
  return d;
}

InitialFlow build_initial_flow(const NetworkSpec& spec, const ForwardingMatrix& x,
                               const RateMatrix& tau, const ChannelMatrix& channels,
                               const std::vector<Transmission>& index) {
  const auto columns = destination_columns(spec);
  const auto sources = static_cast<Eigen::Index>(spec.sources().size());
  InitialFlow flow{Eigen::MatrixXd::Zero(sources, static_cast<Eigen::Index>(index.size())),
                   Eigen::MatrixXd::Zero(sources, static_cast<Eigen::Index>(columns.size()))};
  for (Eigen::Index row = 0; row < sources; ++row) {
    const int s = spec.sources()[row];
    for (std::size_t c = 0; c < index.size(); ++c) {
      const auto [j, v] = index[c];
      double total = 0.0;
      for (int u = 0; u < spec.slot_count(); ++u) {
        total += tau(s, u) * channels(s, j, u) * (1.0 - tau(j, v)) * x({s, j, u, v});
      }
      flow.relay(row, c) = total;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto [d, u] = columns[c];
      flow.destination(row, c) = tau(s, u) * channels(s, d, u);
    }
  }
  return flow;
}

TransitionSystem build_transition_system(const NetworkSpec& spec, const ForwardingMatrix& x,
                                         const RateMatrix& tau, const ChannelMatrix& channels) {
  TransitionSystem system;
  system.relay_index = relay_transmissions(spec, tau);
  system.destination_index = destination_columns(spec);
  system.relaying = build_relaying_matrix(spec, x, tau, channels, system.relay_index);
  system.arrival = build_arrival_matrix(spec, channels, system.relay_index);
  auto flow = build_initial_flow(spec, x, tau, channels, system.relay_index);
  system.source_relay_flow = std::move(flow.relay);
  system.source_destination_flow = std::move(flow.destination);
  return system;
}

Evaluation evaluate_system(const TransitionSystem& system) {
  const Eigen::MatrixXd fundamental = fundamental_matrix(system.relaying);
  const Eigen::MatrixXd squared = fundamental * fundamental;

  // V = M_F^2 must satisfy V = M_F + Q V.
  if (fundamental.size() > 0) {
    const double residual =
        (squared - fundamental - system.relaying * squared).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-8 * std::max(1.0, squared.cwiseAbs().maxCoeff()))) {
      throw Error(Errc::numerical, "delay identity violated by " + std::to_string(residual));
    }
  }

  Evaluation out;
  out.spectral_radius_upper = spectral_radius_bounds(system.relaying).upper;
  const auto sources = system.source_relay_flow.rows();
  for (Eigen::Index s = 0; s < sources; ++s) {
    const Eigen::RowVectorXd relay = system.source_relay_flow.row(s);
    const Eigen::RowVectorXd direct = system.source_destination_flow.row(s);
    CriteriaVector c;
    const auto flow = criterion_flow(relay, direct, fundamental, system.arrival);
    c.f = flow.f;
    c.f_c = flow.f_c;
    c.f_d = relay.size() > 0 ? (relay * squared * system.arrival).sum() : 0.0;
    c.f_e = criterion_energy(relay, fundamental);
    out.per_source.push_back(c);
    out.criteria.f += c.f / static_cast<double>(sources);
    out.criteria.f_d += c.f_d / static_cast<double>(sources);
    out.criteria.f_e += c.f_e / static_cast<double>(sources);
  }
  out.criteria.f_c = std::min(1.0, out.criteria.f);
  return out;
}

Evaluation evaluate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                    const ChannelMatrix& channels, const EvaluateOptions& options) {
  x.validate(spec);
  if (options.check_feasibility) {
    require_feasible_rates(spec, tau, channels, options.tolerance);
    const auto report = consistency_residuals(spec, x, tau, channels);
    if (!report.consistent(options.tolerance)) {
      throw Error(Errc::inconsistent_forwarding,
                  "forwarding matrix misses the rate equations by " +
                      std::to_string(report.max_abs()));
    }
  }
  return evaluate_system(build_transition_system(spec, x, tau, channels));
}

Evaluation evaluate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                    const ChannelOptions& channel_options, const EvaluateOptions& options) {
  return evaluate(spec, tau, x, channel_matrix(tau, spec, channel_options), options);
}

}  // namespace relaynet
