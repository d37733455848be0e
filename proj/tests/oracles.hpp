#ifndef RELAYNET_TESTS_ORACLES_HPP
#define RELAYNET_TESTS_ORACLES_HPP

// Reference computations kept apart from the library: each one takes a
// different route to the same quantity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "relaynet/pareto.hpp"
#include "relaynet/rate_matrix.hpp"
#include "relaynet/topology.hpp"

namespace relaynet::oracle {

/// erfc from the Maclaurin series of erf for x <= 1.5 and from the Laplace
/// continued fraction above, both in long double.
inline long double erfc_series(long double x) {
  if (x > 1.5L) {
    long double t = x;
    for (int n = 400; n >= 1; --n) t = x + (n / 2.0L) / t;
    return std::exp(-x * x) / std::sqrt(3.14159265358979323846264338327950288L) / t;
  }
  long double term = x;  // (-1)^n x^(2n+1) / n!
  long double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L) break;
  }
  return 1.0L - 2.0L / std::sqrt(3.14159265358979323846264338327950288L) * sum;
}

/// Link gain straight from coordinates.
inline double gain(const NetworkSpec& spec, int from, int to) {
  const auto& r = spec.radio();
  const double d = (spec.nodes()[from].position - spec.nodes()[to].position).norm();
  if (d <= r.reference_distance_m) return r.reference_gain;
  return r.reference_gain * std::pow(r.reference_distance_m / d, r.pathloss_exponent);
}

inline double success(double sinr, int bits) {
  const double ber = static_cast<double>(0.5L * erfc_series(std::sqrt(static_cast<long double>(sinr))));
  return std::pow(1.0 - ber, bits);
}

/// Average link success over interfering sets, visiting subsets by growing
/// cardinality through permutations of a selection mask.
inline double channel_probability(const NetworkSpec& spec, int i, int j, int u,
                                  const RateMatrix& tau, double* total_weight = nullptr) {
  std::vector<int> pool;
  for (int k = 0; k < spec.node_count(); ++k) {
    if (k != i && k != j && tau(k, u) > 0.0) pool.push_back(k);
  }
  const auto& radio = spec.radio();
  const double signal = radio.tx_power_w * gain(spec, i, j);
  const int m = static_cast<int>(pool.size());
  double p = 0.0;
  double weights = 0.0;
  for (int size = 0; size <= m; ++size) {
    std::vector<char> pick(m, 0);
    std::fill(pick.end() - size, pick.end(), 1);
    do {
      double weight = 1.0;
      double interference = 0.0;
      for (int a = 0; a < m; ++a) {
        const double t = tau(pool[a], u);
        if (pick[a]) {
          weight *= t;
          interference += radio.tx_power_w * gain(spec, pool[a], j);
        } else {
          weight *= 1.0 - t;
        }
      }
      weights += weight;
      p += weight * success(signal / (radio.noise_power_w + interference), radio.packet_bits);
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  if (total_weight) *total_weight = weights;
  return p;
}

/// I + Q + ... + Q^terms.
inline Eigen::MatrixXd neumann(const Eigen::MatrixXd& q, int terms) {
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(q.rows(), q.cols());
  Eigen::MatrixXd sum = power;
  for (int s = 1; s <= terms; ++s) {
    power = power * q;
    sum += power;
  }
  return sum;
}

/// Terms needed so that the tail ||Q||^(S+1) / (1 - ||Q||) drops below `bound`
/// in the induced infinity norm (requires ||Q|| < 1).
inline int neumann_terms(const Eigen::MatrixXd& q, double bound) {
  const double norm = q.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm == 0.0) return 0;
  return static_cast<int>(std::ceil(std::log(bound * (1.0 - norm)) / std::log(norm)));
}

/// Indices of points not dominated by any other point (quadratic scan).
inline std::vector<std::size_t> nondominated(const std::vector<Eigen::VectorXd>& points,
                                             const std::vector<Sense>& senses) {
  auto better_or_equal = [&](double a, double b, Sense s) {
    return s == Sense::maximize ? a >= b : a <= b;
  };
  std::vector<std::size_t> keep;
  for (std::size_t b = 0; b < points.size(); ++b) {
    bool dominated = false;
    for (std::size_t a = 0; a < points.size() && !dominated; ++a) {
      bool all = true;
      bool strict = false;
      for (std::size_t k = 0; k < senses.size(); ++k) {
        all = all && better_or_equal(points[a][k], points[b][k], senses[k]);
        strict = strict || points[a][k] != points[b][k];
      }
      dominated = all && strict;
    }
    if (!dominated) keep.push_back(b);
  }
  return keep;
}

/// Number of relay rate matrices with at most n_max active relays, counted by
/// walking every matrix in the full grid^(N*T) space.
inline std::uint64_t brute_force_count(int relays, int slots, int grid, int n_max) {
  const int cells = relays * slots;
  std::uint64_t total = 1;
  for (int c = 0; c < cells; ++c) total *= grid;
  std::uint64_t count = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    int active = 0;
    for (int r = 0; r < relays; ++r) {
      bool on = false;
      for (int s = 0; s < slots; ++s) {
        on = on || rest % grid != 0;
        rest /= grid;
      }
      active += on;
    }
    if (active <= n_max) ++count;
  }
  return count;
}

}  // namespace relaynet::oracle

#endif
