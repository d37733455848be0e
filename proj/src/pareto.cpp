#include "relaynet/pareto.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <thread>

#include "relaynet/error.hpp"
#include "relaynet/rates.hpp"

namespace relaynet {

namespace {

Sense sense_of(Objective objective) {
  return objective == Objective::f || objective == Objective::f_c ? Sense::maximize
                                                                  : Sense::minimize;
}

}  // namespace

ObjectiveSet::ObjectiveSet() : ObjectiveSet({Objective::f_c, Objective::f_d, Objective::f_e}) {}

ObjectiveSet::ObjectiveSet(std::vector<Objective> objectives) : objectives_(std::move(objectives)) {
  if (objectives_.empty()) throw Error(Errc::schema, "need at least one objective");
  for (auto o : objectives_) senses_.push_back(sense_of(o));
}

ObjectiveSet ObjectiveSet::parse(std::string_view list) {
  std::vector<Objective> objectives;
  while (true) {
    const auto comma = list.find(',');
    const auto name = list.substr(0, comma);
    if (name == "f") {
      objectives.push_back(Objective::f);
    } else if (name == "fc" || name == "f_c") {
      objectives.push_back(Objective::f_c);
    } else if (name == "fd" || name == "f_d") {
      objectives.push_back(Objective::f_d);
    } else if (name == "fe" || name == "f_e") {
      objectives.push_back(Objective::f_e);
    } else {
      throw Error(Errc::schema, "unknown objective '" + std::string(name) + "'");
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return ObjectiveSet(std::move(objectives));
}

Eigen::VectorXd ObjectiveSet::project(const CriteriaVector& criteria) const {
  Eigen::VectorXd point(static_cast<Eigen::Index>(objectives_.size()));
  for (std::size_t k = 0; k < objectives_.size(); ++k) {
    switch (objectives_[k]) {
      case Objective::f: point(k) = criteria.f; break;
      case Objective::f_c: point(k) = criteria.f_c; break;
      case Objective::f_d: point(k) = criteria.f_d; break;
      case Objective::f_e: point(k) = criteria.f_e; break;
    }
  }
  return point;
}

bool dominates(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
               std::span<const Sense> senses) {
  bool strictly_better = false;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const bool maximize = senses[k] == Sense::maximize;
    const double gain = maximize ? a(k) - b(k) : b(k) - a(k);
    if (gain < 0.0) return false;
    if (gain > 0.0) strictly_better = true;
  }
  return strictly_better;
}

bool dominates(const CriteriaVector& a, const CriteriaVector& b, const ObjectiveSet& objectives) {
  return dominates(objectives.project(a), objectives.project(b), objectives.senses());
}

std::string SolutionId::str() const {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "t%06llu-x%02d", static_cast<unsigned long long>(tau_index),
                x_index);
  return buffer;
}

ParetoArchive::ParetoArchive(ObjectiveSet objectives) : objectives_(std::move(objectives)) {}

bool ParetoArchive::insert(Candidate candidate) {
  const Eigen::VectorXd point = objectives_.project(candidate.criteria);
  const auto& senses = objectives_.senses();
  for (const auto& member : points_) {
    if (dominates(member, point, senses)) return false;
  }
  std::size_t kept = 0;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (dominates(point, points_[k], senses)) continue;
    if (kept != k) {
      members_[kept] = std::move(members_[k]);
      points_[kept] = std::move(points_[k]);
    }
    ++kept;
  }
  members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(kept), members_.end());
  points_.erase(points_.begin() + static_cast<std::ptrdiff_t>(kept), points_.end());
  members_.push_back(std::move(candidate));
  points_.push_back(point);
  assert(invariant_holds());
  return true;
}

std::vector<Candidate> ParetoArchive::sorted() const {
  auto out = members_;
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  return out;
}

bool ParetoArchive::invariant_holds() const {
  for (std::size_t a = 0; a < points_.size(); ++a) {
    for (std::size_t b = 0; b < points_.size(); ++b) {
      if (a != b && dominates(points_[a], points_[b], objectives_.senses())) return false;
    }
  }
  return true;
}

PruneDecision prune_tau(const NetworkSpec& spec, const RateMatrix& tau,
                        const ChannelMatrix& channels, const PruneThresholds& thresholds) {
  PruneDecision decision;
  const double sources = static_cast<double>(spec.sources().size());
  double flow = 0.0;
  double energy = 0.0;
  for (int s : spec.sources()) {
    for (int u = 0; u < spec.slot_count(); ++u) {
      for (int d : spec.destinations()) flow += tau(s, u) * channels(s, d, u);
    }
  }
  for (int j : spec.relays()) {
    for (int v = 0; v < spec.slot_count(); ++v) {
      energy += tau(j, v);
      for (int d : spec.destinations()) flow += tau(j, v) * channels(j, d, v);
    }
  }
  decision.flow = flow / sources;
  decision.energy = energy / sources;

  if (thresholds.min_robustness && decision.flow < *thresholds.min_robustness) {
    decision.keep = false;
    decision.reason = "flow " + std::to_string(decision.flow) + " below minimum robustness";
  } else if (thresholds.max_energy && decision.energy > *thresholds.max_energy) {
    decision.keep = false;
    decision.reason = "energy " + std::to_string(decision.energy) + " above maximum";
  }
  return decision;
}

RateMatrix default_source_rates(const NetworkSpec& spec) {
  RateMatrix tau(spec);
  int k = 0;
  for (int s : spec.sources()) tau.set(s, k++ % spec.slot_count(), 1.0);
  return tau;
}

namespace {

struct WorkerResult {
  std::vector<Candidate> front;
  std::vector<Candidate> all;
  SearchStats stats;
};

std::vector<ForwardingMatrix> forwarding_candidates(const NetworkSpec& spec, const RateMatrix& tau,
                                                    const ChannelMatrix& channels,
                                                    const SearchOptions& options,
                                                    std::uint64_t tau_index, SearchStats& stats) {
  if (relay_transmissions(spec, tau).empty()) return {ForwardingMatrix{}};
  try {
    return {solve_chain_closed_form(spec, tau, channels)};
  } catch (const Error& e) {
    if (e.code() != Errc::not_applicable) throw;
  }
  try {
    return sample_feasible_forwarding(spec, tau, channels, options.x_samples,
                                      derive_seed(options.seed, tau_index));
  } catch (const Error& e) {
    if (e.code() != Errc::sampling_exhausted) throw;
  }
  ++stats.proportional_fallbacks;
  return {proportional_forwarding(spec, tau, channels)};
}

WorkerResult search_range(const NetworkSpec& spec, const RateMatrixEnumerator& enumerator,
                          const SearchOptions& options, std::uint64_t begin, std::uint64_t end) {
  WorkerResult result;
  ParetoArchive archive(options.objectives);
  EvaluateOptions evaluate_options;
  evaluate_options.tolerance = options.tolerance;

  for (std::uint64_t index = begin; index < end; ++index) {
    ++result.stats.enumerated;
    const RateMatrix tau = enumerator.at(index);
    const ChannelMatrix channels = channel_matrix(tau, spec, options.channel);
    if (!all_pass(check_flow_conservation(spec, tau, channels, options.tolerance)) ||
        !all_pass(check_half_duplex(spec, tau, channels, options.tolerance))) {
      ++result.stats.infeasible_rates;
      continue;
    }
    if (!prune_tau(spec, tau, channels, options.thresholds).keep) {
      ++result.stats.pruned;
      continue;
    }

    std::vector<ForwardingMatrix> family;
    try {
      family = forwarding_candidates(spec, tau, channels, options, index, result.stats);
    } catch (const Error& e) {
      if (e.code() != Errc::infeasible_tau && e.code() != Errc::infeasible_rate) throw;
      ++result.stats.infeasible_forwarding;
      continue;
    }

    for (std::size_t k = 0; k < family.size(); ++k) {
      Candidate candidate{{index, static_cast<int>(k)}, tau, std::move(family[k]), {}};
      try {
        candidate.criteria = evaluate(spec, tau, candidate.x, channels, evaluate_options).criteria;
      } catch (const Error& e) {
        if (e.code() != Errc::divergent_system && e.code() != Errc::model_violation) throw;
        ++result.stats.divergent;
        continue;
      }
      ++result.stats.evaluated;
      if (options.keep_all_candidates) result.all.push_back(candidate);
      archive.insert(std::move(candidate));
    }
  }
  result.front = archive.members();
  return result;
}

}  // namespace

SearchResult exhaustive_search(const NetworkSpec& spec, const RateMatrix& sources,
                               const SearchOptions& options) {
  if (options.x_samples < 1) throw Error(Errc::domain, "need at least one X sample per tau");
  const RateMatrixEnumerator enumerator(spec, sources, options.grid, options.n_max);
  const std::uint64_t total = enumerator.count();
  const auto workers = static_cast<std::uint64_t>(std::max(1, options.threads));

  std::vector<WorkerResult> results(workers);
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = total * w / workers;
      const std::uint64_t end = total * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          results[w] = search_range(spec, enumerator, options, begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Merging in id order makes the archive independent of the partition.
  std::vector<Candidate> pooled;
  SearchResult out{ParetoArchive(options.objectives), {}, {}};
  for (auto& r : results) {
    out.stats.enumerated += r.stats.enumerated;
    out.stats.infeasible_rates += r.stats.infeasible_rates;
    out.stats.infeasible_forwarding += r.stats.infeasible_forwarding;
    out.stats.pruned += r.stats.pruned;
    out.stats.divergent += r.stats.divergent;
    out.stats.proportional_fallbacks += r.stats.proportional_fallbacks;
    out.stats.evaluated += r.stats.evaluated;
    std::move(r.front.begin(), r.front.end(), std::back_inserter(pooled));
    std::move(r.all.begin(), r.all.end(), std::back_inserter(out.candidates));
  }
  const auto by_id = [](const Candidate& a, const Candidate& b) { return a.id < b.id; };
  std::sort(pooled.begin(), pooled.end(), by_id);
  std::sort(out.candidates.begin(), out.candidates.end(), by_id);
  for (auto& c : pooled) out.archive.insert(std::move(c));
  return out;
}

}  // namespace relaynet
