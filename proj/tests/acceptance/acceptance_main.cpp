// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "relaynet/error.hpp"
#include "relaynet/json_io.hpp"
#include "relaynet/mc_oracle.hpp"
#include "relaynet/pareto.hpp"
#include "relaynet/rates.hpp"
#include "relaynet/steady_state.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace relaynet;
using relaynet::testing::fixture;
using relaynet::testing::load_fixture;
using relaynet::testing::read_text;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
  const std::string command =
      std::string(RELAYNET_CLI) + " " + args + " >" + stdout_path.string() + " 2>/dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("relaynet_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RateMatrix one_relay_tau(const NetworkSpec& spec, double tau_s, double tau_r) {
  RateMatrix tau(spec);
  tau.set(0, 0, tau_s);
  tau.set(1, 1, tau_r);
  return tau;
}

// 1: unit flow at the optimal relay rate.
Verdict capacity_identity() {
  const auto spec = relaynet::testing::one_relay_spec();
  const double p_sr = 0.99;
  const double tau_limit = p_sr / (1.0 + p_sr);  // beyond this the closed form needs x > 1
  int points = 0;
  int outside = 0;
  double worst = 0.0;
  for (int a = 0; a <= 20; ++a) {
    for (int b = 1; b <= 20; ++b) {
      const double p_sd = a / 20.0;
      const double p_rd = b / 20.0;
      if (p_sd + p_rd < 1.0 || p_sd == 1.0) continue;
      const double tau_r = (1.0 - p_sd) / p_rd;
      if (tau_r > tau_limit) {
        ++outside;
        continue;
      }
      const auto tau = one_relay_tau(spec, 1.0, tau_r);
      const auto p = relaynet::testing::one_relay_channels(p_sd, p_sr, p_rd);
      const auto x = solve_chain_closed_form(spec, tau, p);
      worst = std::max(worst, std::abs(evaluate(spec, tau, x, p).criteria.f - 1.0));
      ++points;
    }
  }
  const auto out = scratch_dir() / "c1.json";
  const int code = run_cli("evaluate --topology " + fixture("one_relay.topology.json").string() +
                               " --tau " + fixture("one_relay.tau.json").string() + " --x " +
                               fixture("one_relay.x.json").string(),
                           out);
  const double cli_f = code == 0 ? Json::parse(read_text(out))["f"].get<double>() : -1.0;
  const double cli_error = std::abs(cli_f - 1.0);
  return {points > 0 && worst <= 1e-9 && cli_error <= 1e-9,
          fmt("%d grid points (p_SR=%.2f; %d with x>1 skipped), max|f-1|=%.2e; CLI fixture |f-1|=%.2e",
              points, p_sr, outside, worst, cli_error)};
}

// 2: f against the source cut bound on random feasible instances.
Verdict cut_set_bound() {
  const auto spec = relaynet::testing::one_relay_spec();
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int instances = 2000;
  int violations = 0;
  int delivery_violations = 0;
  double worst = -1.0;
  std::string example;
  for (int k = 0; k < instances; ++k) {
    const double p_sd = unit(rng), p_sr = unit(rng), p_rd = unit(rng);
    const double tau_r = unit(rng) * p_sr / (1.0 + p_sr);
    const auto tau = one_relay_tau(spec, 1.0, tau_r);
    const auto p = relaynet::testing::one_relay_channels(p_sd, p_sr, p_rd);
    const auto x = solve_chain_closed_form(spec, tau, p);
    const double f = evaluate(spec, tau, x, p).criteria.f;
    const double bound = 1.0 - (1.0 - p_sd) * (1.0 - p_sr);
    if (f > bound + 1e-9) {
      ++violations;
      if (f - bound > worst) {
        worst = f - bound;
        example = fmt("p_SD=%.3f p_SR=%.3f p_RD=%.3f tau_R=%.3f: f=%.4f > %.4f", p_sd, p_sr, p_rd,
                      tau_r, f, bound);
      }
    }
    // probability that at least one copy arrives, for comparison
    const double relay_path = p_sr * x({0, 1, 0, 1}) * (1.0 - tau_r) * p_rd;
    const double delivery = 1.0 - (1.0 - p_sd) * (1.0 - relay_path);
    if (delivery > bound + 1e-9) ++delivery_violations;
  }
  std::string detail = fmt("%d/%d instances exceed the bound", violations, instances);
  if (violations > 0) detail += fmt(", worst +%.4f (%s)", worst, example.c_str());
  detail += fmt("; P(at least one copy) exceeds it in %d", delivery_violations);
  return {violations == 0, detail};
}

struct Battery {
  std::vector<Eigen::MatrixXd> matrices;
};

Battery make_battery() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Battery battery;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 12;
    Eigen::MatrixXd q(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) q(r, c) = unit(rng) < 0.3 ? 0.0 : unit(rng);
      const double target = 0.3 + 0.65 * unit(rng);
      const double sum = q.row(r).sum();
      if (sum > 0.0) q.row(r) *= target / sum;
    }
    battery.matrices.push_back(q);
  }
  return battery;
}

// 3: fundamental matrix against the truncated Neumann series.
Verdict fundamental_oracle(const Battery& battery) {
  double worst = 0.0;
  int max_terms = 0;
  for (const auto& q : battery.matrices) {
    const int terms = oracle::neumann_terms(q, 1e-12);
    max_terms = std::max(max_terms, terms);
    const auto expected = oracle::neumann(q, terms);
    worst = std::max(worst, (fundamental_matrix(q) - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("100 matrices up to 12x12, up to %d terms, max error %.2e", max_terms, worst)};
}

// 4: M_F^2 = M_F + Q M_F^2.
Verdict delay_identity(const Battery& battery) {
  double worst = 0.0;
  for (const auto& q : battery.matrices) {
    const auto m = fundamental_matrix(q);
    const Eigen::MatrixXd v = m * m;
    worst = std::max(worst, (v - (m + q * v)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("max residual %.2e", worst)};
}

// 5: interfering-set probabilities sum to one; exact p matches brute force.
Verdict interfering_sets() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(0.0, 15.0);
  double worst_sum = 0.0;
  double worst_p = 0.0;
  int max_candidates = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 3 + k % 12;  // candidates up to n - 2 = 12
    const int slots = 1 + k % 3;
    std::vector<NodeSpec> nodes{{1, Role::source, {coord(rng), coord(rng)}}};
    for (int id = 2; id < n; ++id) nodes.push_back({id, Role::relay, {coord(rng), coord(rng)}});
    nodes.push_back({n, Role::destination, {coord(rng), coord(rng)}});
    const NetworkSpec spec(nodes, relaynet::testing::test_radio(), SlotFrame{slots});
    RateMatrix tau(spec);
    for (int i = 0; i < n - 1; ++i) {
      for (int u = 0; u < slots; ++u) tau.set(i, u, unit(rng) < 0.1 ? 1.0 : unit(rng));
    }
    const int slot = static_cast<int>(rng() % slots);
    const int sender = static_cast<int>(rng() % (n - 1));
    const int receiver = n - 1;
    const auto pool = interferer_candidates(sender, receiver, slot, tau);
    max_candidates = std::max<int>(max_candidates, static_cast<int>(pool.size()));
    long double total = 0.0L;
    for (std::uint64_t mask = 0; mask < (1ULL << pool.size()); ++mask) {
      InterferingSet set;
      for (std::size_t a = 0; a < pool.size(); ++a) {
        if (mask >> a & 1U) set.members.push_back(pool[a]);
      }
      total += interfering_set_probability(set, pool, slot, tau);
    }
    worst_sum = std::max(worst_sum, std::abs(static_cast<double>(total) - 1.0));
    const double expected = oracle::channel_probability(spec, sender, receiver, slot, tau);
    worst_p = std::max(worst_p, std::abs(channel_probability_exact(sender, receiver, slot, tau, spec) - expected));
  }
  return {worst_sum <= 1e-12 && worst_p <= 1e-12,
          fmt("100 configurations, up to %d candidates: max|sum-1|=%.2e, max|p-p_ref|=%.2e",
              max_candidates, worst_sum, worst_p)};
}

struct McCase {
  std::string name;
  NetworkSpec spec;
  RateMatrix tau;
  ForwardingMatrix x;
};

std::vector<McCase> mc_cases() {
  std::vector<McCase> cases;
  {
    auto spec = load_fixture("one_relay.topology.json");
    auto tau = rates_from_json(spec, Json::parse(read_text(fixture("one_relay.tau.json"))));
    auto x = forwarding_from_json(spec, Json::parse(read_text(fixture("one_relay.x.json"))));
    cases.push_back({"1-relay", std::move(spec), std::move(tau), std::move(x)});
  }
  {
    auto spec = load_fixture("chain.topology.json");
    RateMatrix tau(spec);
    tau.set(0, 0, 1.0);
    tau.set(1, 1, 0.45);
    tau.set(2, 2, 0.3);
    const auto p = channel_matrix(tau, spec);
    auto x = solve_chain_closed_form(spec, tau, p, {{{1, 1}, {0, 0}}, {{2, 2}, {1, 1}}});
    cases.push_back({"2-relay chain", std::move(spec), std::move(tau), std::move(x)});
  }
  {
    auto spec = load_fixture("parallel.topology.json");
    RateMatrix tau(spec);
    tau.set(0, 0, 1.0);
    tau.set(1, 1, 0.35);
    tau.set(2, 2, 0.35);
    const auto p = channel_matrix(tau, spec);
    auto x = solve_chain_closed_form(spec, tau, p, {{{1, 1}, {0, 0}}, {{2, 2}, {0, 0}}});
    cases.push_back({"2-relay parallel", std::move(spec), std::move(tau), std::move(x)});
  }
  {
    auto spec = load_fixture("shared_slot.topology.json");
    RateMatrix tau(spec);
    tau.set(0, 0, 1.0);
    for (int r : spec.relays()) tau.set(r, 1, 0.3);
    const auto p = channel_matrix(tau, spec);
    auto x = sample_feasible_forwarding(spec, tau, p, 1, 11).front();
    cases.push_back({"3-relay shared slot", std::move(spec), std::move(tau), std::move(x)});
  }
  {
    auto spec = load_fixture("two_sources.topology.json");
    RateMatrix tau(spec);
    tau.set(0, 0, 1.0);
    tau.set(1, 1, 1.0);
    tau.set(2, 2, 0.5);
    const auto p = channel_matrix(tau, spec);
    auto x = sample_feasible_forwarding(spec, tau, p, 1, 12).front();
    cases.push_back({"2-source/1-sink", std::move(spec), std::move(tau), std::move(x)});
  }
  return cases;
}

// 6: analytic criteria inside the Monte Carlo confidence intervals.
Verdict monte_carlo_agreement() {
  SimConfig config;
  config.n_packets = 1000000;
  config.seed = 1;
  config.confidence = 0.99;
  config.threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  bool pass = true;
  std::ostringstream detail;
  for (const auto& c : mc_cases()) {
    const auto p = channel_matrix(c.tau, c.spec);
    const auto analytic = evaluate(c.spec, c.tau, c.x, p).criteria;
    const auto mc = simulate(c.spec, c.tau, c.x, p, config);
    const std::pair<const Estimate*, double> checks[] = {{&mc.f, analytic.f}, {&mc.f_d, analytic.f_d},
                                                         {&mc.f_e, analytic.f_e}};
    const char* names[] = {"f", "f_D", "f_E"};
    double widest = 0.0;
    std::string misses;
    for (int k = 0; k < 3; ++k) {
      widest = std::max(widest, checks[k].first->relative_half_width());
      if (!checks[k].first->covers(checks[k].second)) {
        misses += fmt(" %s %.6f outside [%.6f, %.6f]", names[k], checks[k].second,
                      checks[k].first->ci_low, checks[k].first->ci_high);
      }
    }
    const bool ok = misses.empty() && widest <= 0.01 && !mc.truncation_warning;
    pass = pass && ok;
    detail << "\n      " << c.name << ": " << (ok ? "ok" : "FAIL") << fmt(" (max rel. half-width %.4f)", widest)
           << misses;
  }
  return {pass, "5 fixtures, 1e6 packets, 99% CI" + detail.str()};
}

// 7: search front equals the brute-force filter; dominance is a strict order.
Verdict pareto_correctness() {
  const auto spec = load_fixture("tiny.topology.json");
  SearchOptions options;
  options.grid = RateGrid::parse("0,0.5,1");
  options.n_max = 2;
  options.x_samples = 5;
  options.seed = 7;
  options.keep_all_candidates = true;
  const auto result = exhaustive_search(spec, default_source_rates(spec), options);
  std::vector<Eigen::VectorXd> points;
  for (const auto& c : result.candidates) points.push_back(options.objectives.project(c.criteria));
  std::set<SolutionId> expected, actual;
  for (auto k : oracle::nondominated(points, options.objectives.senses())) {
    expected.insert(result.candidates[k].id);
  }
  for (const auto& c : result.archive.members()) actual.insert(c.id);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 4);
  const auto& senses = options.objectives.senses();
  int failures = 0;
  for (int k = 0; k < 10000; ++k) {
    Eigen::VectorXd a(3), b(3), c(3);
    for (auto* v : {&a, &b, &c}) *v << level(rng) / 4.0, level(rng), level(rng);
    failures += dominates(a, a, senses);
    failures += dominates(a, b, senses) && dominates(b, a, senses);
    failures += dominates(a, b, senses) && dominates(b, c, senses) && !dominates(a, c, senses);
  }
  return {expected == actual && failures == 0 && !expected.empty(),
          fmt("%zu candidates, front %zu, brute force %zu, sets %s; %d order-property failures in 1e4 triples",
              result.candidates.size(), actual.size(), expected.size(),
              expected == actual ? "equal" : "differ", failures)};
}

// 8: enumeration counts and the rate properties of everything evaluated.
Verdict feasibility_gates() {
  int cases = 0;
  int mismatches = 0;
  for (int relays = 1; relays <= 3; ++relays) {
    for (int slots = 1; slots <= 2; ++slots) {
      for (int grid_size = 2; grid_size <= 3; ++grid_size) {
        std::vector<NodeSpec> nodes{{1, Role::source, {0, 0}}};
        for (int r = 0; r < relays; ++r) nodes.push_back({r + 2, Role::relay, {2.0 + r, 1.0}});
        nodes.push_back({relays + 2, Role::destination, {9, 0}});
        const NetworkSpec spec(nodes, relaynet::testing::test_radio(), SlotFrame{slots});
        std::vector<double> values;
        for (int g = 0; g < grid_size; ++g) values.push_back(g / double(grid_size - 1));
        for (int n_max = 0; n_max <= relays; ++n_max) {
          const RateMatrixEnumerator e(spec, RateMatrix(spec), RateGrid(values), n_max);
          ++cases;
          mismatches += e.count() != RateMatrixEnumerator::expected_count(relays, slots, grid_size, n_max);
          mismatches += e.count() != oracle::brute_force_count(relays, slots, grid_size, n_max);
        }
      }
    }
  }
  std::size_t evaluated = 0;
  int infeasible = 0;
  for (const char* name : {"tiny.topology.json", "shared_slot.topology.json", "two_sources.topology.json"}) {
    const auto spec = load_fixture(name);
    SearchOptions options;
    options.grid = RateGrid::parse("0,0.25,0.5");
    options.n_max = static_cast<int>(spec.relays().size());
    options.keep_all_candidates = true;
    const auto result = exhaustive_search(spec, default_source_rates(spec), options);
    for (const auto& c : result.candidates) {
      const auto p = channel_matrix(c.tau, spec);
      infeasible += !all_pass(check_flow_conservation(spec, c.tau, p, 1e-9)) ||
                    !all_pass(check_half_duplex(spec, c.tau, p, 1e-9));
    }
    evaluated += result.candidates.size();
  }
  return {mismatches == 0 && infeasible == 0,
          fmt("%d enumeration cases, %d count mismatches; %zu evaluated tau, %d violate the rate properties",
              cases, mismatches, evaluated, infeasible)};
}

// 9: byte-identical CLI output across reruns and thread counts.
Verdict determinism() {
  const auto dir = scratch_dir();
  const std::string search = "search --topology " + fixture("tiny.topology.json").string() +
                             " --grid 0,0.25,0.5,0.75,1 --n-max 2 --x-samples 5 --seed 4 --out-dir ";
  const std::string oracle_args = "oracle --topology " + fixture("shared_slot.topology.json").string() +
                                  " --tau " + (dir / "shared.tau.json").string() + " --x " +
                                  (dir / "shared.x.json").string() + " --packets 200000 --seed 8";
  {
    const auto spec = load_fixture("shared_slot.topology.json");
    RateMatrix tau(spec);
    tau.set(0, 0, 1.0);
    for (int r : spec.relays()) tau.set(r, 1, 0.3);
    const auto x = sample_feasible_forwarding(spec, tau, channel_matrix(tau, spec), 1, 11).front();
    std::ofstream(dir / "shared.tau.json") << rates_to_json(spec, tau).dump(2);
    std::ofstream(dir / "shared.x.json") << forwarding_to_json(spec, x).dump(2);
  }
  const char* labels[] = {"t1a", "t1b", "t8"};
  const char* threads[] = {"1", "1", "8"};
  bool ran = true;
  for (int k = 0; k < 3; ++k) {
    ran = ran && run_cli(std::string("--threads ") + threads[k] + " " + search + (dir / labels[k]).string(),
                         dir / "ignored.txt") == 0;
    ran = ran && run_cli(std::string("--threads ") + threads[k] + " " + oracle_args,
                         dir / (std::string(labels[k]) + ".oracle.json")) == 0;
  }
  if (!ran) return {false, "CLI invocation failed"};
  auto snapshot = [&](const char* label) {
    std::string all = read_text(dir / label / "front.csv");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / label / "solutions")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.filename().string() + "\n" + read_text(f);
    return all + read_text(dir / (std::string(label) + ".oracle.json"));
  };
  const auto a = snapshot("t1a"), b = snapshot("t1b"), c = snapshot("t8");
  return {a == b && a == c && !a.empty(),
          fmt("search front + %zu solution files and oracle JSON: rerun %s, --threads 1 vs 8 %s",
              static_cast<std::size_t>(std::distance(fs::directory_iterator(dir / "t1a" / "solutions"),
                                                     fs::directory_iterator{})),
              a == b ? "identical" : "DIFFER", a == c ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  const Battery battery = make_battery();
  struct Criterion {
    int number;
    const char* title;
    double limit_s;  // 0 when no runtime bound applies
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "1-relay capacity identity", 1.0, capacity_identity},
      {2, "cut-set bound on f", 10.0, cut_set_bound},
      {3, "fundamental matrix vs Neumann series", 5.0, [&] { return fundamental_oracle(battery); }},
      {4, "delay identity", 0.0, [&] { return delay_identity(battery); }},
      {5, "interfering-set normalization", 0.0, interfering_sets},
      {6, "analytic vs Monte Carlo", 120.0, monte_carlo_agreement},
      {7, "Pareto correctness", 0.0, pareto_correctness},
      {8, "feasibility gates", 0.0, feasibility_gates},
      {9, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && seconds > c.limit_s) {
      v.pass = false;
      v.detail += fmt(" [runtime %.2fs over %.0fs]", seconds, c.limit_s);
    }
    failed += !v.pass;
    std::printf("%s  %d. %s (%.2fs): %s\n", v.pass ? "PASS" : "FAIL", c.number, c.title, seconds,
                v.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch_dir());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
