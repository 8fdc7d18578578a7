#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "wbfv/driver.hpp"
#include "wbfv/error.hpp"
#include "wbfv/verify.hpp"

using namespace wbfv;

namespace {

constexpr int kUsage = 1;
constexpr int kSolver = 2;
constexpr int kVerification = 3;

struct RunArgs {
  std::string config;
  std::string preset;
  std::string mesh;
  double cfl = 0.0;
  double tend = 0.0;
  std::string snapshots;
  std::string flux;
  std::string out;
};

RunConfig assemble(const RunArgs& a, const CLI::App& cmd) {
  if (a.config.empty() == a.preset.empty()) throw ConfigError("exactly one of --config and --preset is required");
  RunConfig c = a.config.empty() ? preset(a.preset) : parse_config(a.config);
  if (cmd.count("--mesh")) {
    std::size_t nx = 0;
    std::size_t ny = 0;
    char tail = 0;
    if (std::sscanf(a.mesh.c_str(), "%zux%zu%c", &nx, &ny, &tail) != 2) {
      throw ConfigError("--mesh expects NxM, got '" + a.mesh + "'");
    }
    if (!c.mesh.file.empty()) throw ConfigError("--mesh conflicts with a mesh file in the config");
    c.mesh.nx = nx;
    c.mesh.ny = ny;
  }
  if (cmd.count("--cfl")) c.scheme.cfl_number = a.cfl;
  if (cmd.count("--flux")) c.scheme.flux = parse_flux_kind(a.flux);
  if (cmd.count("--out")) c.run.output_dir = a.out;
  if (cmd.count("--tend")) {
    c.run.t_end = a.tend;
    std::erase_if(c.run.snapshots, [&](double t) { return t > a.tend; });
  }
  if (cmd.count("--snapshots")) c.run.snapshots = parse_family("t(" + a.snapshots + ")").args;
  validate_config(c);
  return c;
}

int cmd_run(const RunArgs& a, const CLI::App& cmd) {
  RunConfig c;
  try {
    c = assemble(a, cmd);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  RunResult r;
  try {
    r = run(c);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  for (const Snapshot& s : r.snapshots) std::printf("snapshot t=%.6g step=%zu\n", s.t, s.step);
  if (!r.log.rows.empty()) {
    std::printf("max principle margin %.3e, max entropy residual %.3e, oscillation sum %.6e\n",
                check_max_principle(r.log), [&] {
                  double m = -INFINITY;
                  for (const DiagnosticsRow& row : r.log.rows) m = std::max(m, row.entropy_residual_max);
                  return m;
                }(),
                oscillation_sum(r.log));
  }
  std::printf("%zu steps, output in %s\n", r.steps, c.run.output_dir.c_str());
  if (!r.complete) {
    std::cerr << "solver error: " << r.error << "\n";
    return kSolver;
  }
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  SuiteReport rep;
  try {
    rep = run_suite(suite, seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  print_report(std::cout, rep);
  return rep.passed() ? 0 : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Well-balanced finite volumes for coupled scalar conservation laws"};
  app.require_subcommand(1);

  RunArgs ra;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a preset or a config file");
  auto* cfg = run_cmd->add_option("--config", ra.config, "Config file");
  auto* pre = run_cmd->add_option("--preset", ra.preset, "two-domain | three-domain | burgers-1d");
  cfg->excludes(pre);
  run_cmd->add_option("--mesh", ra.mesh, "Cartesian grid NxM");
  run_cmd->add_option("--cfl", ra.cfl, "Courant number in (0, 1]");
  run_cmd->add_option("--tend", ra.tend, "Final time");
  run_cmd->add_option("--snapshots", ra.snapshots, "Output times t1,t2,...");
  run_cmd->add_option("--flux", ra.flux, "rusanov | godunov");
  run_cmd->add_option("--out", ra.out, "Output directory");

  std::string suite;
  std::uint64_t seed = 1;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  verify_cmd->add_option("--suite", suite, "flux-axioms | well-balanced | max-principle | entropy | conservation | convergence")
      ->required();
  verify_cmd->add_option("--seed", seed, "Random seed");

  std::string dump_name;
  CLI::App* dump_cmd = app.add_subcommand("preset", "Print a preset as a config file");
  dump_cmd->add_option("name", dump_name, "two-domain | three-domain | burgers-1d")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (*run_cmd) return cmd_run(ra, *run_cmd);
  if (*dump_cmd) {
    try {
      std::cout << serialize_config(preset(dump_name));
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }
    return 0;
  }
  return cmd_verify(suite, seed);
}
