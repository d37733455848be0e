#include "relaynet/rate_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <string>

#include "relaynet/error.hpp"

namespace relaynet {

RateGrid::RateGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty() || values_.front() != 0.0) {
    throw Error(Errc::schema, "rate grid must start at 0");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0 && values_[k] <= 1.0)) {
      throw Error(Errc::schema, "rate grid values must lie in [0, 1]");
    }
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw Error(Errc::schema, "rate grid must be strictly increasing");
    }
  }
}

RateGrid RateGrid::parse(std::string_view list) {
  std::vector<double> values;
  while (!list.empty()) {
    const auto comma = list.find(',');
    auto token = list.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
      throw Error(Errc::schema, "bad rate grid entry '" + std::string(token) + "'");
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return RateGrid(std::move(values));
}

bool RateGrid::contains(double value, double tolerance) const {
  return std::any_of(values_.begin(), values_.end(),
                     [&](double v) { return std::abs(v - value) <= tolerance; });
}

RateMatrix::RateMatrix(const NetworkSpec& spec)
    : RateMatrix(spec, Eigen::MatrixXd::Zero(spec.node_count(), spec.slot_count())) {}

RateMatrix::RateMatrix(const NetworkSpec& spec, Eigen::MatrixXd values)
    : values_(std::move(values)), is_destination_(spec.node_count(), false) {
  if (values_.rows() != spec.node_count() || values_.cols() != spec.slot_count()) {
    throw Error(Errc::schema, "rate matrix shape does not match the network");
  }
  for (int d : spec.destinations()) is_destination_[d] = true;
  for (int i = 0; i < values_.rows(); ++i) {
    for (int u = 0; u < values_.cols(); ++u) {
      const double rate = values_(i, u);
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw Error(Errc::schema, "transmission rates must lie in [0, 1]");
      }
      if (is_destination_[i] && rate != 0.0) {
        throw Error(Errc::role, "destination " + std::to_string(i + 1) + " cannot transmit");
      }
    }
  }
}

void RateMatrix::set(int node, int slot, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(Errc::schema, "transmission rates must lie in [0, 1]");
  }
  if (is_destination_.at(node) && rate != 0.0) {
    throw Error(Errc::role, "destination " + std::to_string(node + 1) + " cannot transmit");
  }
  values_(node, slot) = rate;
}

bool RateMatrix::on_grid(const RateGrid& grid) const {
  return values_.unaryExpr([&](double v) { return grid.contains(v) ? 1.0 : 0.0; }).minCoeff() >
         0.0;
}

ActiveSet::ActiveSet(const RateMatrix& tau) : per_slot_(tau.slot_count()) {
  for (int i = 0; i < tau.node_count(); ++i) {
    for (int u = 0; u < tau.slot_count(); ++u) {
      if (tau(i, u) > 0.0) {
        transmissions_.push_back({i, u});
        per_slot_[u].push_back(i);
      }
    }
  }
}

bool ActiveSet::contains(int node, int slot) const {
  return std::binary_search(transmissions_.begin(), transmissions_.end(), Transmission{node, slot});
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw Error(Errc::domain, "rate matrix enumeration size overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t result = 1;
  for (int k = 0; k < exponent; ++k) result = checked_mul(result, base);
  return result;
}

std::uint64_t binomial(int n, int k) {
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = checked_mul(result, static_cast<std::uint64_t>(n - k + i)) / i;
  return result;
}

// Subsets of {0..n-1} ordered by size, then lexicographically.
std::vector<std::vector<int>> subsets_up_to(int n, int max_size) {
  std::vector<std::vector<int>> out;
  for (int k = 0; k <= max_size; ++k) {
    std::vector<int> pick(k);
    for (int a = 0; a < k; ++a) pick[a] = a;
    while (true) {
      out.push_back(pick);
      int pos = k - 1;
      while (pos >= 0 && pick[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++pick[pos];
      for (int a = pos + 1; a < k; ++a) pick[a] = pick[a - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::uint64_t RateMatrixEnumerator::expected_count(int relays, int slots, int grid_size,
                                                   int n_max) {
  const std::uint64_t rows = checked_pow(grid_size, slots) - 1;
  std::uint64_t total = 0;
  for (int k = 0; k <= std::min(n_max, relays); ++k) {
    total += checked_mul(binomial(relays, k), checked_pow(rows, k));
  }
  return total;
}

RateMatrixEnumerator::RateMatrixEnumerator(const NetworkSpec& spec, RateMatrix base,
                                           RateGrid grid, int n_max)
    : base_(std::move(base)), grid_(std::move(grid)) {
  const int relays = static_cast<int>(spec.relays().size());
  if (n_max < 0 || n_max > relays) {
    throw Error(Errc::domain, "n_max must lie in [0, number of relays]");
  }
  for (int r : spec.relays()) {
    for (int u = 0; u < spec.slot_count(); ++u) base_.set(r, u, 0.0);
  }
  nonzero_rows_ = checked_pow(grid_.size(), spec.slot_count()) - 1;

  for (auto& subset : subsets_up_to(relays, n_max)) {
    for (auto& position : subset) position = spec.relays()[position];
    offsets_.push_back(total_);
    total_ += checked_pow(nonzero_rows_, static_cast<int>(subset.size()));
    subsets_.push_back(std::move(subset));
  }
}

RateMatrix RateMatrixEnumerator::at(std::uint64_t index) const {
  if (index >= total_) throw Error(Errc::domain, "rate matrix index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  const auto which = static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
  std::uint64_t rest = index - offsets_[which];

  RateMatrix tau = base_;
  const auto grid_size = static_cast<std::uint64_t>(grid_.size());
  for (int relay : subsets_[which]) {
    std::uint64_t row = rest % nonzero_rows_ + 1;  // skip the all-zero row
    rest /= nonzero_rows_;
    for (int u = 0; u < tau.slot_count(); ++u) {
      tau.set(relay, u, grid_[static_cast<int>(row % grid_size)]);
      row /= grid_size;
    }
  }
  return tau;
}

}  // namespace relaynet
