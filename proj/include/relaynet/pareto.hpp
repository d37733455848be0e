#ifndef RELAYNET_PARETO_HPP
#define RELAYNET_PARETO_HPP

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relaynet/channel.hpp"
#include "relaynet/forwarding.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/steady_state.hpp"
#include "relaynet/topology.hpp"

namespace relaynet {

enum class Sense { maximize, minimize };

enum class Objective { f, f_c, f_d, f_e };

/// Ordered objective tuple. f and f_c are maximized, f_d and f_e minimized.
class ObjectiveSet {
 public:
  ObjectiveSet();  // (f_c, f_d, f_e)
  explicit ObjectiveSet(std::vector<Objective> objectives);

  /// Parses "fc,fd,fe"; accepted names are f, fc, fd, fe.
  static ObjectiveSet parse(std::string_view list);

  const std::vector<Objective>& objectives() const noexcept { return objectives_; }
  const std::vector<Sense>& senses() const noexcept { return senses_; }
  Eigen::VectorXd project(const CriteriaVector& criteria) const;

 private:
  std::vector<Objective> objectives_;
  std::vector<Sense> senses_;
};

/// a is at least as good as b everywhere and strictly better somewhere.
bool dominates(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
               std::span<const Sense> senses);

bool dominates(const CriteriaVector& a, const CriteriaVector& b, const ObjectiveSet& objectives);

/// Identifies a candidate: enumeration index of tau and the X draw under it.
struct SolutionId {
  std::uint64_t tau_index = 0;
  int x_index = 0;
  auto operator<=>(const SolutionId&) const = default;
  std::string str() const;
};

struct Candidate {
  SolutionId id;
  RateMatrix tau;
  ForwardingMatrix x;
  CriteriaVector criteria;
};

/// Mutually non-dominated candidates. Candidates with equal objective
/// vectors are all kept.
class ParetoArchive {
 public:
  explicit ParetoArchive(ObjectiveSet objectives = {});

  /// Returns true when the candidate entered the archive.
  bool insert(Candidate candidate);

  const std::vector<Candidate>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  const ObjectiveSet& objectives() const noexcept { return objectives_; }

  /// Members ordered by solution id.
  std::vector<Candidate> sorted() const;

  /// Pairwise non-dominance holds.
  bool invariant_holds() const;

 private:
  ObjectiveSet objectives_;
  std::vector<Candidate> members_;
  std::vector<Eigen::VectorXd> points_;
};

struct PruneThresholds {
  std::optional<double> min_robustness;  // lower bound on f
  std::optional<double> max_energy;      // upper bound on f_e
};

struct PruneDecision {
  bool keep = true;
  std::string reason;
  double flow = 0.0;    // f shared by every consistent X under this tau
  double energy = 0.0;  // f_e shared by every consistent X under this tau
};

/// For any X satisfying the rate equations, the expected relay transmissions
/// per source packet equal the relay rates themselves (tau_r = F_relay + tau_r Q
/// is the equation M_F solves), so f and f_e depend on tau and P only.
/// The decision is therefore exact, not a heuristic bound.
PruneDecision prune_tau(const NetworkSpec& spec, const RateMatrix& tau,
                        const ChannelMatrix& channels, const PruneThresholds& thresholds);

struct SearchOptions {
  RateGrid grid{std::vector<double>{0.0, 0.5, 1.0}};
  int n_max = 1;
  int x_samples = 5;
  std::uint64_t seed = 1;
  ObjectiveSet objectives;
  PruneThresholds thresholds;
  ChannelOptions channel;
  double tolerance = kFeasibilityTolerance;
  int threads = 1;
  bool keep_all_candidates = false;
};

struct SearchStats {
  std::uint64_t enumerated = 0;
  std::uint64_t infeasible_rates = 0;    // failed flow conservation or half duplex
  std::uint64_t infeasible_forwarding = 0;  // no X with entries <= 1
  std::uint64_t pruned = 0;
  std::uint64_t divergent = 0;
  std::uint64_t proportional_fallbacks = 0;
  std::uint64_t evaluated = 0;
};

struct SearchResult {
  ParetoArchive archive;
  SearchStats stats;
  std::vector<Candidate> candidates;  // only with keep_all_candidates, sorted by id
};

/// Two-stage search: enumerate tau (relay rows on the grid, at most n_max
/// relays active, source rows from `sources`), keep those meeting both rate
/// properties and the pruning thresholds, then evaluate the closed-form X when
/// every relay transmission has a single feeder and x_samples uniform draws
/// otherwise. Deterministic for a given seed regardless of `threads`.
SearchResult exhaustive_search(const NetworkSpec& spec, const RateMatrix& sources,
                               const SearchOptions& options);

/// Default source rows: source k transmits with rate 1 in slot k mod |T|.
RateMatrix default_source_rates(const NetworkSpec& spec);

}  // namespace relaynet

#endif  // RELAYNET_PARETO_HPP
