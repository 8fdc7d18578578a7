#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbfv/diagnostics.hpp"
#include "wbfv/io.hpp"

namespace wbfv {

/// Everything a run needs besides the initial state.
struct Problem {
  std::shared_ptr<const PrimalMesh> mesh;
  std::shared_ptr<const DualGeometry> dual;
  DomainLayout layout;
  std::shared_ptr<const ColorField> color;
  std::shared_ptr<const LinearCoupling> model;
  std::shared_ptr<const WellBalancedScheme> scheme;
};

Problem build_problem(const RunConfig& config);

/// Cell averages of the configured initial data. random(seed, lo, hi) draws
/// one uniform value per cell in cell order.
SolverState initial_state(const RunConfig& config, const Problem& problem);

const std::vector<std::string>& preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

struct RunOptions {
  bool write_outputs = true;
  /// Called after every accepted step.
  std::function<void(const StepRecord&, const SolverState&)> on_step;
  /// Stop after this many steps (0: no limit); the stopping state becomes the
  /// last snapshot.
  std::size_t max_steps = 0;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  DiagnosticsLog log;
  SolverState final_state;
  std::size_t steps = 0;
  bool complete = false;
  std::string error;
  std::optional<std::size_t> error_cell;
};

/// Output times: 0, the configured snapshot times, t_end (sorted, unique).
std::vector<double> output_times(const RunSpec& run);

/// w_K for a state.
std::vector<double> cell_w(const Problem& problem, const std::vector<double>& u);

/// Time loop with snapshots at output_times(). A StepError ends the run with
/// complete = false and the snapshots reached so far (outputs are still
/// written).
RunResult run(const RunConfig& config, const Problem& problem, const RunOptions& options = {});
RunResult run(const RunConfig& config, const RunOptions& options = {});

}  // namespace wbfv
