// mscc: multi-server coded caching simulator.
//
//   mscc verify   --config sys.json [--trials N] [--seed S] [--enumerate] [--mode M] [--out report.json]
//   mscc sweep    --config sweep.json [--out results.csv] [--trials N] [--seed S] [--mode M] [--method M]
//   mscc replay   --config sys.json [--topology topo.json] [--seed S] [--out plan.json]
//   mscc extremes --config sys.json [--mode M] [--enumerate] [--out extremes.txt]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mscc/commands.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string topology;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> mode;
  std::optional<std::string> method;
  bool enumerate = false;
  bool corrupt_generator = false;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "JSON configuration file")->required();
  cmd->add_option("--seed", a.seed, "base random seed");
  cmd->add_option("--out", a.out, "output path (default: stdout)");
  cmd->add_option("--mode", a.mode, "successive, parallel or both")
      ->check(CLI::IsMember({"successive", "parallel", "both"}));
}

// Writes to --out when given, else to stdout.
template <typename Body>
int with_output(const std::string& path, Body&& body) {
  if (path.empty()) return body(std::cout);
  std::ofstream f(path);
  if (!f) throw mscc::Error(mscc::ErrorCode::parse, "cannot write " + path);
  return body(f);
}

int run(CLI::App& app, const Args& a) {
  using namespace mscc;
  const std::string name = app.get_subcommands().front()->get_name();
  const auto json = read_json_file(a.config);

  if (name == "sweep") {
    SweepSpec spec = sweep_spec_from_json(json);
    if (a.seed) spec.seed = *a.seed;
    if (a.trials) spec.trials = *a.trials;
    if (a.mode) spec.modes = parse_modes(*a.mode);
    if (a.method) spec.methods = parse_methods(*a.method);
    if (a.enumerate) spec.enumerate = true;
    return with_output(a.out, [&](std::ostream& os) { return cmd_sweep(spec, os); });
  }

  const SystemConfig cfg = config_from_json(json);
  const auto modes = parse_modes(a.mode.value_or("both"));

  if (name == "verify") {
    VerifyOptions opts;
    if (a.seed) opts.seed = *a.seed;
    if (a.trials) opts.trials = *a.trials;
    opts.enumerate = a.enumerate;
    opts.modes = modes;
    opts.corrupt_generator = a.corrupt_generator;
    return cmd_verify(cfg, opts, std::cout, a.out);
  }
  if (name == "replay") {
    const auto topo_json = a.topology.empty() ? json : read_json_file(a.topology);
    const Topology topo = topology_from_json(topo_json, cfg.P);
    return with_output(a.out, [&](std::ostream& os) { return cmd_replay(cfg, topo, a.seed.value_or(1), os); });
  }
  return with_output(a.out, [&](std::ostream& os) {
    return cmd_extremes(cfg, modes, a.enumerate, kDefaultEnumerationBound, os);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-server coded caching simulator"};
  app.require_subcommand(1);
  Args a;

  auto* verify = app.add_subcommand("verify", "end-to-end placement, delivery and decoding checks");
  add_common(verify, a);
  verify->add_option("--trials", a.trials, "random topologies to test")->check(CLI::PositiveNumber);
  verify->add_flag("--enumerate", a.enumerate, "test every topology instead of sampling");
  verify->add_flag("--corrupt-generator", a.corrupt_generator)->group("");

  auto* sweep = app.add_subcommand("sweep", "latency sweep over a parameter grid, CSV output");
  add_common(sweep, a);
  sweep->add_option("--trials", a.trials, "Monte Carlo trials per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--method", a.method, "formula, simulate or both")
      ->check(CLI::IsMember({"formula", "simulate", "both"}));
  sweep->add_flag("--enumerate", a.enumerate, "exact enumeration when the topology count is small");

  auto* replay = app.add_subcommand("replay", "plans and latencies for a fixed topology");
  add_common(replay, a);
  replay->add_option("--topology", a.topology, "topology JSON (default: the \"Z\" field of --config)");

  auto* extremes = app.add_subcommand("extremes", "best and worst topologies");
  add_common(extremes, a);
  extremes->add_flag("--enumerate", a.enumerate, "confirm by enumerating every topology");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mscc::kExitOk : mscc::kExitUsage;
  }

  try {
    return run(app, a);
  } catch (const mscc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mscc::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mscc::kExitUsage;
  }
}
