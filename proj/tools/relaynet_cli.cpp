// relaynet: steady-state evaluation, Pareto search and Monte Carlo
// cross-checks for probabilistic-forwarding relay networks.
//
// Exit codes: 0 success, 1 usage or input error, 2 infeasible operating point.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "manifest.hpp"
#include "relaynet/error.hpp"
#include "relaynet/json_io.hpp"
#include "relaynet/mc_oracle.hpp"
#include "relaynet/pareto.hpp"
#include "relaynet/rates.hpp"
#include "relaynet/steady_state.hpp"

namespace fs = std::filesystem;
using namespace relaynet;

namespace {

struct GlobalOptions {
  int threads = 0;
  double tolerance = kFeasibilityTolerance;
  std::string dump_channels;
  int exact_cap = 20;
  std::uint64_t channel_samples = 200000;
  std::uint64_t channel_seed = 1;
};

struct EvaluateArgs {
  std::string topology, tau, x, output;
};

struct SearchArgs {
  std::string topology, grid = "0,0.5,1", objectives = "fc,fd,fe", sources, out_dir;
  int n_max = 1;
  int x_samples = 5;
  std::uint64_t seed = 1;
  std::optional<double> min_robustness, max_energy;
};

struct OracleArgs {
  std::string topology, tau, x, output;
  std::uint64_t packets = 1000000;
  std::uint64_t seed = 1;
  double confidence = 0.99;
  int max_epochs = 10000;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::schema, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema, path + ": " + e.what());
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PARETO_RELAY_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

ChannelOptions channel_options(const GlobalOptions& g) {
  ChannelOptions options;
  options.exact_cap = g.exact_cap;
  options.samples = g.channel_samples;
  options.seed = g.channel_seed;
  return options;
}

Json global_json(const GlobalOptions& g, int threads) {
  return {{"threads", threads},
          {"tolerance", g.tolerance},
          {"dump_channels", g.dump_channels},
          {"exact_cap", g.exact_cap},
          {"channel_samples", g.channel_samples},
          {"channel_seed", g.channel_seed}};
}

void emit(const std::string& text, const std::string& output, cli::RunManifest manifest,
          std::chrono::steady_clock::time_point start) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  cli::write_text(output, text);
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cli::write_text(output + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

int run_evaluate(const GlobalOptions& g, const EvaluateArgs& a, cli::RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  const auto spec = load_network(read_file(a.topology));
  const auto tau = rates_from_json(spec, read_json(a.tau));
  const auto x = forwarding_from_json(spec, read_json(a.x));
  const auto channels = channel_matrix(tau, spec, channel_options(g));
  if (!g.dump_channels.empty()) {
    cli::write_text(g.dump_channels, channels_to_json(spec, channels).dump(2) + "\n");
  }
  EvaluateOptions options;
  options.tolerance = g.tolerance;
  const auto evaluation = evaluate(spec, tau, x, channels, options);

  manifest.inputs = {a.topology, a.tau, a.x};
  manifest.options = global_json(g, resolve_threads(g.threads));
  manifest.options["output"] = a.output;
  emit(criteria_to_json(evaluation).dump(2) + "\n", a.output, std::move(manifest), start);
  return 0;
}

std::string format12(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

int run_search(const GlobalOptions& g, const SearchArgs& a, cli::RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  const auto spec = load_network(read_file(a.topology));
  const RateMatrix sources =
      a.sources.empty() ? default_source_rates(spec) : source_rates_from_json(spec, read_json(a.sources));

  SearchOptions options;
  options.grid = RateGrid::parse(a.grid);
  options.n_max = a.n_max;
  options.x_samples = a.x_samples;
  options.seed = a.seed;
  options.objectives = ObjectiveSet::parse(a.objectives);
  options.thresholds.min_robustness = a.min_robustness;
  options.thresholds.max_energy = a.max_energy;
  options.channel = channel_options(g);
  options.tolerance = g.tolerance;
  options.threads = resolve_threads(g.threads);
  const auto result = exhaustive_search(spec, sources, options);

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir / "solutions");
  std::string csv = "solution_id,f,f_c,f_d,f_e,tau_path,x_path\n";
  for (const auto& c : result.archive.sorted()) {
    const std::string id = c.id.str();
    const std::string tau_path = "solutions/" + id + ".tau.json";
    const std::string x_path = "solutions/" + id + ".x.json";
    cli::write_text(out_dir / tau_path, rates_to_json(spec, c.tau).dump(2) + "\n");
    cli::write_text(out_dir / x_path, forwarding_to_json(spec, c.x).dump(2) + "\n");
    csv += id + "," + format12(c.criteria.f) + "," + format12(c.criteria.f_c) + "," +
           format12(c.criteria.f_d) + "," + format12(c.criteria.f_e) + "," + tau_path + "," +
           x_path + "\n";
  }
  cli::write_text(out_dir / "front.csv", csv);

  const auto& s = result.stats;
  std::cerr << "enumerated " << s.enumerated << ", infeasible rates " << s.infeasible_rates
            << ", infeasible forwarding " << s.infeasible_forwarding << ", pruned " << s.pruned
            << ", divergent " << s.divergent << ", evaluated " << s.evaluated << ", front "
            << result.archive.size() << "\n";

  manifest.inputs = {a.topology};
  if (!a.sources.empty()) manifest.inputs.emplace_back(a.sources);
  manifest.seeds = {a.seed};
  manifest.options = global_json(g, options.threads);
  manifest.options["grid"] = a.grid;
  manifest.options["n_max"] = a.n_max;
  manifest.options["x_samples"] = a.x_samples;
  manifest.options["objectives"] = a.objectives;
  manifest.options["min_robustness"] = a.min_robustness ? Json(*a.min_robustness) : Json();
  manifest.options["max_energy"] = a.max_energy ? Json(*a.max_energy) : Json();
  manifest.options["out_dir"] = a.out_dir;
  manifest.options["stats"] = {{"enumerated", s.enumerated},
                               {"infeasible_rates", s.infeasible_rates},
                               {"infeasible_forwarding", s.infeasible_forwarding},
                               {"pruned", s.pruned},
                               {"divergent", s.divergent},
                               {"proportional_fallbacks", s.proportional_fallbacks},
                               {"evaluated", s.evaluated}};
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cli::write_text(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return 0;
}

int run_oracle(const GlobalOptions& g, const OracleArgs& a, cli::RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  const auto spec = load_network(read_file(a.topology));
  const auto tau = rates_from_json(spec, read_json(a.tau));
  const auto x = forwarding_from_json(spec, read_json(a.x));
  const auto channels = channel_matrix(tau, spec, channel_options(g));
  if (!g.dump_channels.empty()) {
    cli::write_text(g.dump_channels, channels_to_json(spec, channels).dump(2) + "\n");
  }
  require_feasible_rates(spec, tau, channels, g.tolerance);

  SimConfig config;
  config.n_packets = a.packets;
  config.seed = a.seed;
  config.confidence = a.confidence;
  config.max_epochs = a.max_epochs;
  config.threads = resolve_threads(g.threads);
  const auto estimate = simulate(spec, tau, x, channels, config);
  if (estimate.truncation_warning) {
    std::cerr << "warning: " << estimate.truncated << " of " << estimate.packets
              << " packets hit the epoch cap\n";
  }

  manifest.inputs = {a.topology, a.tau, a.x};
  manifest.seeds = {a.seed};
  manifest.options = global_json(g, config.threads);
  manifest.options["packets"] = a.packets;
  manifest.options["confidence"] = a.confidence;
  manifest.options["max_epochs"] = a.max_epochs;
  manifest.options["output"] = a.output;
  emit(estimate_to_json(estimate).dump(2) + "\n", a.output, std::move(manifest), start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state criteria, Pareto search and Monte Carlo checks for relay networks"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", cli::kToolVersion);

  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads (default: $PARETO_RELAY_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--tolerance", g.tolerance, "Absolute slack on feasibility checks")
      ->check(CLI::PositiveNumber);
  app.add_option("--dump-channels", g.dump_channels, "Write the channel matrix as JSON to this path");
  app.add_option("--exact-cap", g.exact_cap, "Interferer count up to which p is enumerated exactly");
  app.add_option("--channel-samples", g.channel_samples, "Monte Carlo draws per link beyond the cap");
  app.add_option("--channel-seed", g.channel_seed, "Seed for sampled channel probabilities");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate f, f_c, f_d, f_e for given tau and X");
  evaluate_cmd->fallthrough();
  evaluate_cmd->add_option("--topology", ev.topology, "Topology JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--tau", ev.tau, "Rate matrix JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--x", ev.x, "Forwarding matrix JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--output", ev.output, "Write JSON here (plus a manifest) instead of stdout");

  SearchArgs se;
  auto* search_cmd = app.add_subcommand("search", "Exhaustive Pareto search over the rate grid");
  search_cmd->fallthrough();
  search_cmd->add_option("--topology", se.topology, "Topology JSON")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--grid", se.grid, "Comma list of admissible rates")->capture_default_str();
  search_cmd->add_option("--n-max", se.n_max, "Maximum number of active relays")->capture_default_str();
  search_cmd->add_option("--x-samples", se.x_samples, "Forwarding draws per tau")->capture_default_str();
  search_cmd->add_option("--seed", se.seed, "Seed")->capture_default_str();
  search_cmd->add_option("--objectives", se.objectives, "Objective tuple from f,fc,fd,fe")
      ->capture_default_str();
  search_cmd->add_option("--min-robustness", se.min_robustness, "Drop tau whose f falls below this");
  search_cmd->add_option("--max-energy", se.max_energy, "Drop tau whose f_e exceeds this");
  search_cmd->add_option("--sources", se.sources, "JSON with a 'sources' rate array")
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--out-dir", se.out_dir, "Directory for front.csv and solutions/")->required();

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo estimate of f, f_d, f_e");
  oracle_cmd->fallthrough();
  oracle_cmd->add_option("--topology", orc.topology, "Topology JSON")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--tau", orc.tau, "Rate matrix JSON")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--x", orc.x, "Forwarding matrix JSON")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--packets", orc.packets, "Simulated packets")->capture_default_str();
  oracle_cmd->add_option("--seed", orc.seed, "Seed")->capture_default_str();
  oracle_cmd->add_option("--confidence", orc.confidence, "Confidence level")->capture_default_str();
  oracle_cmd->add_option("--max-epochs", orc.max_epochs, "Relay hops allowed per copy")->capture_default_str();
  oracle_cmd->add_option("--output", orc.output, "Write JSON here (plus a manifest) instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  cli::RunManifest manifest;
  manifest.arguments.assign(argv, argv + argc);
  try {
    if (*evaluate_cmd) {
      manifest.subcommand = "evaluate";
      return run_evaluate(g, ev, std::move(manifest));
    }
    if (*search_cmd) {
      manifest.subcommand = "search";
      return run_search(g, se, std::move(manifest));
    }
    manifest.subcommand = "oracle";
    return run_oracle(g, orc, std::move(manifest));
  } catch (const Error& e) {
    std::cerr << "relaynet: " << e.what() << "\n";
    return e.infeasible() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "relaynet: " << e.what() << "\n";
    return 1;
  }
}
