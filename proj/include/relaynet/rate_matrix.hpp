#ifndef RELAYNET_RATE_MATRIX_HPP
#define RELAYNET_RATE_MATRIX_HPP

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <string_view>
#include <vector>

#include "relaynet/topology.hpp"

namespace relaynet {

/// Absolute slack applied to every feasibility and consistency check.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Discretized set of admissible transmission rates: strictly increasing,
/// starting at 0, contained in [0, 1].
class RateGrid {
 public:
  explicit RateGrid(std::vector<double> values);

  /// Parses a comma list such as "0,0.25,0.5,0.75,1".
  static RateGrid parse(std::string_view list);

  const std::vector<double>& values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](int k) const { return values_[k]; }
  bool contains(double value, double tolerance = 1e-12) const;

 private:
  std::vector<double> values_;
};

/// A transmission (node, slot); both indices 0-based.
struct Transmission {
  int node = 0;
  int slot = 0;
  auto operator<=>(const Transmission&) const = default;
};

/// Per-node, per-slot transmission rates. Rows cover every node of the
/// network (index = id - 1); destination rows are always zero.
class RateMatrix {
 public:
  explicit RateMatrix(const NetworkSpec& spec);
  RateMatrix(const NetworkSpec& spec, Eigen::MatrixXd values);

  double operator()(int node, int slot) const { return values_(node, slot); }
  void set(int node, int slot, double rate);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  int node_count() const noexcept { return static_cast<int>(values_.rows()); }
  int slot_count() const noexcept { return static_cast<int>(values_.cols()); }

  bool on_grid(const RateGrid& grid) const;
  bool operator==(const RateMatrix& other) const { return values_ == other.values_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<bool> is_destination_;
};

/// The set of active transmissions {(i, u) : tau_i^u > 0}, sorted by
/// (node, slot), with per-slot views.
class ActiveSet {
 public:
  explicit ActiveSet(const RateMatrix& tau);

  const std::vector<Transmission>& transmissions() const noexcept { return transmissions_; }
  /// Nodes active in slot u, ascending.
  const std::vector<int>& in_slot(int slot) const { return per_slot_.at(slot); }
  bool contains(int node, int slot) const;
  std::size_t size() const noexcept { return transmissions_.size(); }
  bool empty() const noexcept { return transmissions_.empty(); }

 private:
  std::vector<Transmission> transmissions_;
  std::vector<std::vector<int>> per_slot_;
};

inline ActiveSet active_set(const RateMatrix& tau) { return ActiveSet(tau); }

/// Random-access enumeration of every rate matrix whose relay rows take
/// values on the grid with at most n_max relays active. Source rows are
/// copied from the base matrix. Order: by number of active relays, then
/// lexicographic relay subset, then the relay rows as base-|grid| digits.
class RateMatrixEnumerator {
 public:
  RateMatrixEnumerator(const NetworkSpec& spec, RateMatrix base, RateGrid grid, int n_max);

  std::uint64_t count() const noexcept { return total_; }
  RateMatrix at(std::uint64_t index) const;

  /// Closed-form count: sum_k C(N, k) * (|grid|^|T| - 1)^k for k <= n_max.
  static std::uint64_t expected_count(int relays, int slots, int grid_size, int n_max);

 private:
  RateMatrix base_;
  RateGrid grid_;
  std::uint64_t nonzero_rows_ = 0;  // |grid|^|T| - 1
  std::vector<std::vector<int>> subsets_;
  std::vector<std::uint64_t> offsets_;  // prefix sums of per-subset counts
  std::uint64_t total_ = 0;
};

}  // namespace relaynet

#endif  // RELAYNET_RATE_MATRIX_HPP
