#ifndef RELAYNET_STEADY_STATE_HPP
#define RELAYNET_STEADY_STATE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relaynet/channel.hpp"
#include "relaynet/error.hpp"
#include "relaynet/forwarding.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

/// Margin by which the spectral radius of the relaying matrix must stay below one.
inline constexpr double kSpectralMargin = 1e-6;

/// Matrices of the absorbing transition structure M = [Q D; 0 I] restricted to
/// active relay transmissions, plus the initial flow rows S_M [Q_S R_S].
struct TransitionSystem {
  std::vector<Transmission> relay_index;        // rows and columns of Q, rows of D
  std::vector<Transmission> destination_index;  // columns of D: (destination, slot)
  Eigen::MatrixXd relaying;                     // Q, l x l
  Eigen::MatrixXd arrival;                      // D, l x m
  Eigen::MatrixXd source_relay_flow;            // one row per source, l columns
  Eigen::MatrixXd source_destination_flow;      // one row per source, m columns
};

/// Active relay transmissions sorted by (node, slot).
std::vector<Transmission> relay_transmissions(const NetworkSpec& spec, const RateMatrix& tau);
/// Every (destination, slot) pair, sorted.
std::vector<Transmission> destination_columns(const NetworkSpec& spec);

/// Q[(i,u),(j,v)] = p_ij^u (1 - tau_j^v) x_ij^{uv}. Errc::model_violation when
/// an entry reaches 1.
Eigen::MatrixXd build_relaying_matrix(const NetworkSpec& spec, const ForwardingMatrix& x,
                                      const RateMatrix& tau, const ChannelMatrix& channels,
                                      const std::vector<Transmission>& index);

/// D[(i,u),(d,u)] = p_id^u; zero off the matching slot.
Eigen::MatrixXd build_arrival_matrix(const NetworkSpec& spec, const ChannelMatrix& channels,
                                     const std::vector<Transmission>& index);

struct InitialFlow {
  Eigen::MatrixXd relay;        // sum_u tau_s^u p_sj^u (1 - tau_j^v) x_sj^{uv}
  Eigen::MatrixXd destination;  // tau_s^u p_sd^u
};

InitialFlow build_initial_flow(const NetworkSpec& spec, const ForwardingMatrix& x,
                               const RateMatrix& tau, const ChannelMatrix& channels,
                               const std::vector<Transmission>& index);

TransitionSystem build_transition_system(const NetworkSpec& spec, const ForwardingMatrix& x,
                                         const RateMatrix& tau, const ChannelMatrix& channels);

template <typename Scalar>
struct SpectralRadiusBounds {
  Scalar lower = 0;
  Scalar upper = 0;
  int iterations = 0;
};

/// Collatz-Wielandt bounds on the spectral radius of a non-negative matrix,
/// from power iteration on I + Q (primitive whenever Q is irreducible, and
/// its dominant eigenvalue 1 + rho(Q) is strictly dominant in modulus).
/// Stops once the bracket is narrower than `tolerance` or excludes `threshold`.
template <typename Derived>
SpectralRadiusBounds<typename Derived::Scalar> spectral_radius_bounds(
    const Eigen::MatrixBase<Derived>& q, int max_iterations = 5000,
    typename Derived::Scalar tolerance = 1e-10,
    typename Derived::Scalar threshold = std::numeric_limits<typename Derived::Scalar>::quiet_NaN()) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  SpectralRadiusBounds<Scalar> bounds;
  if (q.rows() == 0) return bounds;
  if (q.minCoeff() < Scalar(0)) throw Error(Errc::domain, "matrix has negative entries");

  Vector v = Vector::Ones(q.rows());
  bounds.lower = Scalar(0);
  bounds.upper = std::numeric_limits<Scalar>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector w = v + q * v;
    const Vector ratio = w.cwiseQuotient(v);
    bounds.lower = std::max(bounds.lower, ratio.minCoeff() - Scalar(1));
    bounds.upper = std::min(bounds.upper, ratio.maxCoeff() - Scalar(1));
    bounds.iterations = it;
    v = w / w.maxCoeff();
    if (bounds.upper - bounds.lower <= tolerance) break;
    if (!std::isnan(threshold) && (bounds.upper < threshold || bounds.lower >= threshold)) break;
  }
  return bounds;
}

/// Spectral radius from the eigenvalues; used when power iteration cannot
/// separate the bracket from the threshold.
template <typename Derived>
typename Derived::Scalar spectral_radius_exact(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.rows() == 0) return Scalar(0);
  Eigen::EigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(q.eval(), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// True when rho(Q) < 1 - margin.
template <typename Derived>
bool is_transient(const Eigen::MatrixBase<Derived>& q,
                  typename Derived::Scalar margin = kSpectralMargin) {
  using Scalar = typename Derived::Scalar;
  const Scalar threshold = Scalar(1) - margin;
  if (q.rows() == 0) return true;
  if (q.minCoeff() >= Scalar(0)) {
    const auto bounds = spectral_radius_bounds(q, 5000, Scalar(1e-10), threshold);
    if (bounds.upper < threshold) return true;
    if (bounds.lower >= threshold) return false;
  }
  return spectral_radius_exact(q) < threshold;
}

/// M_F = (I - Q)^{-1}, obtained by partial-pivoting LU and column solves.
/// Errc::divergent_system when rho(Q) >= 1 - margin; Errc::numerical when
/// the factorization is singular to working precision.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> fundamental_matrix(
    const Eigen::MatrixBase<Derived>& q, typename Derived::Scalar margin = kSpectralMargin) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (q.rows() != q.cols()) throw Error(Errc::domain, "relaying matrix must be square");
  const auto n = q.rows();
  if (n == 0) return Matrix(0, 0);
  if (!is_transient(q, margin)) {
    throw Error(Errc::divergent_system, "spectral radius of the relaying matrix is not below 1");
  }
  const Matrix system = Matrix::Identity(n, n) - q;
  const Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > std::numeric_limits<Scalar>::epsilon())) {
    throw Error(Errc::numerical, "I - Q is singular to working precision");
  }
  return lu.solve(Matrix::Identity(n, n));
}

template <typename Scalar>
struct FlowCriterion {
  Scalar f = 0;    // expected deliveries per source packet
  Scalar f_c = 0;  // min(1, f)
};

/// f = F_relay M_F D 1 + F_dest 1.
template <typename RelayFlow, typename DestFlow, typename Fundamental, typename Arrival>
FlowCriterion<typename RelayFlow::Scalar> criterion_flow(
    const Eigen::MatrixBase<RelayFlow>& relay_flow, const Eigen::MatrixBase<DestFlow>& dest_flow,
    const Eigen::MatrixBase<Fundamental>& fundamental, const Eigen::MatrixBase<Arrival>& arrival) {
  using Scalar = typename RelayFlow::Scalar;
  Scalar f = dest_flow.sum();
  if (relay_flow.size() > 0) f += (relay_flow * fundamental * arrival).sum();
  return {f, std::min(Scalar(1), f)};
}

/// f_D = F_relay M_F^2 D 1: every delivered copy weighted by the number of
/// relay transmissions on its path; direct deliveries weigh zero.
template <typename RelayFlow, typename Fundamental, typename Arrival>
typename RelayFlow::Scalar criterion_delay(const Eigen::MatrixBase<RelayFlow>& relay_flow,
                                           const Eigen::MatrixBase<Fundamental>& fundamental,
                                           const Eigen::MatrixBase<Arrival>& arrival) {
  if (relay_flow.size() == 0) return 0;
  const auto through = (relay_flow * fundamental).eval();
  return (through * fundamental * arrival).sum();
}

/// f_E = F_relay M_F 1: expected relay transmissions.
template <typename RelayFlow, typename Fundamental>
typename RelayFlow::Scalar criterion_energy(const Eigen::MatrixBase<RelayFlow>& relay_flow,
                                            const Eigen::MatrixBase<Fundamental>& fundamental) {
  if (relay_flow.size() == 0) return 0;
  return (relay_flow * fundamental).sum();
}

struct CriteriaVector {
  double f = 0.0;
  double f_c = 0.0;
  double f_d = 0.0;
  double f_e = 0.0;

  /// f_D / f: mean relay hops per delivered copy (0 when nothing arrives).
  double mean_delay() const { return f > 0.0 ? f_d / f : 0.0; }
};

struct Evaluation {
  CriteriaVector criteria;                // averaged over sources
  std::vector<CriteriaVector> per_source;  // in source order
  double spectral_radius_upper = 0.0;     // certified bound on rho(Q)
};

struct EvaluateOptions {
  double tolerance = kFeasibilityTolerance;
  bool check_feasibility = true;  // rate properties and forwarding consistency
};

/// Full pipeline on a given channel matrix.
Evaluation evaluate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                    const ChannelMatrix& channels, const EvaluateOptions& options = {});

/// Computes the channel matrix from the geometry first.
Evaluation evaluate(const NetworkSpec& spec, const RateMatrix& tau, const ForwardingMatrix& x,
                    const ChannelOptions& channel_options = {},
                    const EvaluateOptions& options = {});

/// Criteria of a transition system without any feasibility gate.
Evaluation evaluate_system(const TransitionSystem& system);

}  // namespace relaynet

#endif  // RELAYNET_STEADY_STATE_HPP
