#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wbfv/driver.hpp"

namespace wbfv {

struct CheckResult {
  std::string name;
  double value = 0.0;
  /// Pass when value <= bound (kAtMost) or value >= bound (kAtLeast).
  double bound = 0.0;
  enum class Sense { kAtMost, kAtLeast } sense = Sense::kAtMost;
  bool pass = false;
  std::string note;
};

CheckResult at_most(std::string name, double value, double bound, std::string note = {});
CheckResult at_least(std::string name, double value, double bound, std::string note = {});

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

const std::vector<std::string>& suite_names();
/// Throws ConfigError for an unknown suite.
SuiteReport run_suite(std::string_view name, std::uint64_t seed = 1);
void print_report(std::ostream& out, const SuiteReport& report);

/// Random coupling-flux samples for the two monotone fluxes.
struct FluxAxiomStats {
  double consistency = 0.0;        // max |g(w, w) - f(w) . nu|
  double conservation = 0.0;       // max |g(a, b, nu) + g(b, a, -nu)|
  double monotonicity = 0.0;       // min one-sided difference quotient (signed so >= 0 is monotone)
  double godunov_brute_force = 0.0;  // max |godunov - dense-sampling extremum|
};
FluxAxiomStats flux_axiom_stats(std::uint64_t seed, std::size_t samples, std::size_t brute_force_points);

/// Two-domain geometry on an n-by-n grid with the given initial data.
RunConfig two_domain_config(std::size_t n, FamilySpec initial);

/// Smooth single-domain problem: cos^4 bump on [-1, 1]^2, flux (1, 1) w^2 / 2.
RunConfig smooth_config(std::size_t n, double t_end);

struct ConvergenceStudy {
  std::vector<std::size_t> levels;
  std::vector<double> errors;  // L1 distance to the reference, averaged onto each level
  double order = 0.0;          // least-squares slope of -log(error) against log(n)
};
/// Every level must divide `reference`.
ConvergenceStudy convergence_study(const std::vector<std::size_t>& levels, std::size_t reference, double t_end);

}  // namespace wbfv
