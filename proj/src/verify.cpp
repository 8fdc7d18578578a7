#include "wbfv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "wbfv/error.hpp"

namespace wbfv {

CheckResult at_most(std::string name, double value, double bound, std::string note) {
  return {std::move(name), value, bound, CheckResult::Sense::kAtMost, value <= bound, std::move(note)};
}

CheckResult at_least(std::string name, double value, double bound, std::string note) {
  return {std::move(name), value, bound, CheckResult::Sense::kAtLeast, value >= bound, std::move(note)};
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"flux-axioms", "well-balanced", "max-principle",
                                              "entropy",     "conservation",  "convergence"};
  return names;
}

void print_report(std::ostream& out, const SuiteReport& r) {
  char line[256];
  for (const CheckResult& c : r.checks) {
    std::snprintf(line, sizeof line, "%-4s %-40s %14.6e %s %10.3e", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.sense == CheckResult::Sense::kAtMost ? "<=" : ">=", c.bound);
    out << line;
    if (!c.note.empty()) out << "  " << c.note;
    out << "\n";
  }
  out << r.suite << ": " << (r.passed() ? "pass" : "FAIL") << "\n";
}

namespace {

std::shared_ptr<const LinearCoupling> sample_model() {
  return make_linear_coupling({ScalarProfile::linear(1.0), ScalarProfile::cubic(0.2, 1.0)},
                              {{ScalarProfile::cubic(1.0 / 3.0, -0.5), {0.8, 0.6}},
                               {ScalarProfile::shifted_quadratic(0.4), {-0.3, 1.0}}});
}

double brute_extremum(const CouplingModel& m, double wL, double wR, const ColorVector& v, Vec2 nu, std::size_t n) {
  const double a = std::min(wL, wR);
  const double b = std::max(wL, wR);
  double best = wL <= wR ? INFINITY : -INFINITY;
  for (std::size_t i = 0; i <= n; ++i) {
    const double p = directional_flux(m, a + (b - a) * static_cast<double>(i) / static_cast<double>(n), v, nu);
    best = wL <= wR ? std::min(best, p) : std::max(best, p);
  }
  return best;
}

}  // namespace

FluxAxiomStats flux_axiom_stats(std::uint64_t seed, std::size_t samples, std::size_t brute_force_points) {
  std::mt19937_64 rng(seed);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };
  const auto model = sample_model();
  FluxAxiomStats st;
  st.monotonicity = INFINITY;
  for (FluxKind kind : {FluxKind::kRusanov, FluxKind::kGodunov}) {
    const NumericalFlux g(model, kind, -1.5, 3.0);
    for (std::size_t n = 0; n < samples; ++n) {
      const ColorVector v{uniform(0.0, 1.0)};
      const double t = uniform(0.0, 2 * std::numbers::pi);
      const Vec2 nu{std::cos(t), std::sin(t)};
      const double w = uniform(-1.5, 3.0);
      const double we = uniform(-1.5, 3.0);
      st.consistency = std::max(st.consistency, std::abs(g(w, w, v, nu) - directional_flux(*model, w, v, nu)));
      st.conservation = std::max(st.conservation, std::abs(g(w, we, v, nu) + g(we, w, v, -nu)));
      const double d = 1e-4;
      const double base = g(w, we, v, nu);
      st.monotonicity = std::min({st.monotonicity, g(w + d, we, v, nu) - base, base - g(w, we + d, v, nu)});
      if (kind == FluxKind::kGodunov) {
        st.godunov_brute_force =
            std::max(st.godunov_brute_force, std::abs(base - brute_extremum(*model, w, we, v, nu, brute_force_points)));
      }
    }
  }
  return st;
}

RunConfig two_domain_config(std::size_t n, FamilySpec initial) {
  RunConfig c = preset("two-domain");
  c.mesh.nx = n;
  c.mesh.ny = n;
  c.run.initial = std::move(initial);
  c.run.snapshots.clear();
  return c;
}

RunConfig smooth_config(std::size_t n, double t_end) {
  RunConfig c;
  c.mesh.nx = n;
  c.mesh.ny = n;
  c.coupling.gammas = {{"linear", {1}}};
  c.coupling.fluxes = {{"burgers", {0, 1, 1}}};
  c.run.initial = {"sine_bump", {0, 0, 0.5, 0.5, 0.25}};
  c.run.t_end = t_end;
  c.run.diagnostics = false;
  validate_config(c);
  return c;
}

ConvergenceStudy convergence_study(const std::vector<std::size_t>& levels, std::size_t reference, double t_end) {
  RunOptions quiet;
  quiet.write_outputs = false;
  const RunResult ref = run(smooth_config(reference, t_end), quiet);
  if (!ref.complete) throw Error("reference run failed: " + ref.error);
  const std::vector<double>& fine = ref.final_state.u;
  ConvergenceStudy cs;
  cs.levels = levels;
  for (std::size_t n : levels) {
    if (reference % n != 0) throw Error("level " + std::to_string(n) + " does not divide the reference");
    const RunResult r = run(smooth_config(n, t_end), quiet);
    if (!r.complete) throw Error("run failed: " + r.error);
    const std::size_t q = reference / n;
    const double cell = (2.0 / static_cast<double>(n)) * (2.0 / static_cast<double>(n));
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        double avg = 0.0;
        for (std::size_t b = 0; b < q; ++b) {
          for (std::size_t a = 0; a < q; ++a) avg += fine[(j * q + b) * reference + i * q + a];
        }
        avg /= static_cast<double>(q * q);
        err += std::abs(r.final_state.u[j * n + i] - avg) * cell;
      }
    }
    cs.errors.push_back(err);
  }
  double mx = 0.0;
  double my = 0.0;
  const double k = static_cast<double>(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    mx += std::log(static_cast<double>(levels[i])) / k;
    my += std::log(cs.errors[i]) / k;
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double dx = std::log(static_cast<double>(levels[i])) - mx;
    num += dx * (std::log(cs.errors[i]) - my);
    den += dx * dx;
  }
  cs.order = -num / den;
  return cs;
}

namespace {

SuiteReport suite_flux_axioms(std::uint64_t seed) {
  const FluxAxiomStats st = flux_axiom_stats(seed, 1000, 10000);
  SuiteReport r{"flux-axioms", {}};
  r.checks.push_back(at_most("consistency g(w,w) - f(w).nu", st.consistency, 1e-12));
  r.checks.push_back(at_most("conservation g(a,b,nu) + g(b,a,-nu)", st.conservation, 1e-12));
  r.checks.push_back(at_least("monotonicity (one-sided differences)", st.monotonicity, -1e-10));
  r.checks.push_back(at_most("godunov vs brute-force extremum", st.godunov_brute_force, 1e-6));
  return r;
}

SuiteReport suite_well_balanced() {
  SuiteReport r{"well-balanced", {}};
  for (FluxKind kind : {FluxKind::kRusanov, FluxKind::kGodunov}) {
    RunConfig c = two_domain_config(50, {"constant", {0.5}});
    c.scheme.flux = kind;
    c.run.diagnostics = false;
    const Problem p = build_problem(c);
    const SolverState s0 = initial_state(c, p);
    const double tau = p.scheme->compute_dt(s0);
    c.run.t_end = 100 * tau;
    RunOptions quiet;
    quiet.write_outputs = false;
    double drift = 0.0;
    quiet.on_step = [&](const StepRecord&, const SolverState& s) {
      for (double u : s.u) drift = std::max(drift, std::abs(u - 0.5));
    };
    const RunResult res = run(c, p, quiet);
    drift = std::max(drift, check_well_balanced(res.snapshots, 0.5));
    r.checks.push_back(at_most("max |u - 0.5|, " + to_string(kind) + ", " + std::to_string(res.steps) + " steps", drift,
                               1e-11));
  }
  return r;
}

// Random data on the two-domain layout; the callback sees every step.
RunResult random_run(std::uint64_t seed, std::size_t steps, FluxKind kind,
                     const std::function<void(const Problem&, const StepRecord&, const SolverState&)>& each) {
  RunConfig c = two_domain_config(50, {"random", {static_cast<double>(seed), 0.0, 1.0}});
  c.scheme.flux = kind;
  c.run.diagnostics = false;
  c.run.t_end = 1e9;
  const Problem p = build_problem(c);
  RunOptions opt;
  opt.write_outputs = false;
  opt.max_steps = steps;
  opt.on_step = [&](const StepRecord& rec, const SolverState& s) { each(p, rec, s); };
  return run(c, p, opt);
}

SuiteReport suite_max_principle(std::uint64_t seed) {
  SuiteReport r{"max-principle", {}};
  for (FluxKind kind : {FluxKind::kRusanov, FluxKind::kGodunov}) {
    double margin = INFINITY;
    const RunResult res = random_run(seed, 200, kind, [&](const Problem& p, const StepRecord& rec, const SolverState&) {
      margin = std::min(margin, max_principle_margin(*p.mesh, rec));
    });
    r.checks.push_back(at_least("worst margin, " + to_string(kind) + ", " + std::to_string(res.steps) + " steps", margin,
                                -1e-11));
  }
  return r;
}

SuiteReport suite_conservation(std::uint64_t seed) {
  SuiteReport r{"conservation", {}};
  for (FluxKind kind : {FluxKind::kRusanov, FluxKind::kGodunov}) {
    double worst = 0.0;
    const RunResult res = random_run(seed, 200, kind, [&](const Problem& p, const StepRecord& rec, const SolverState& s) {
      const PrimalMesh& m = *p.mesh;
      for (std::size_t k = 0; k < m.num_cells(); ++k) {
        const std::size_t off = m.subcell_offset(k);
        double w = 0.0;
        for (std::size_t j = 0; j < m.num_cell_edges(k); ++j) {
          w += p.dual->alpha(off + j) * p.model->c0(s.u[k], (*p.color)[m.cell_edges(k)[j].edge]);
        }
        worst = std::max(worst, std::abs(w - rec.w_cell_next[k]));
      }
    });
    r.checks.push_back(at_most("max |sum alpha C0(u^{n+1}) - w^{n+1}_K|, " + to_string(kind), worst, 1e-10,
                               std::to_string(res.steps) + " steps"));
  }
  return r;
}

SuiteReport suite_entropy() {
  SuiteReport r{"entropy", {}};
  for (const char* name : {"two-domain", "three-domain"}) {
    RunConfig c = preset(name);
    c.mesh.nx = 50;
    c.mesh.ny = 50;
    c.run.t_end = 1.0;
    c.run.snapshots.clear();
    c.scheme.flux = FluxKind::kRusanov;
    RunOptions quiet;
    quiet.write_outputs = false;
    const RunResult res = run(c, quiet);
    double worst = -INFINITY;
    for (const DiagnosticsRow& row : res.log.rows) worst = std::max(worst, row.entropy_residual_max);
    r.checks.push_back(at_most(std::string("max entropy residual, ") + name + " 50x50 to t=1", worst, 1e-10));
  }
  return r;
}

SuiteReport suite_convergence() {
  SuiteReport r{"convergence", {}};
  const ConvergenceStudy cs = convergence_study({50, 100, 200}, 800, 0.3);
  for (std::size_t i = 0; i < cs.levels.size(); ++i) {
    char note[64];
    std::snprintf(note, sizeof note, "%zux%zu", cs.levels[i], cs.levels[i]);
    r.checks.push_back(at_most(std::string("L1 error ") + note, cs.errors[i], i == 0 ? INFINITY : cs.errors[i - 1]));
  }
  r.checks.push_back(at_least("fitted order", cs.order, 0.5));
  return r;
}

}  // namespace

SuiteReport run_suite(std::string_view name, std::uint64_t seed) {
  if (name == "flux-axioms") return suite_flux_axioms(seed);
  if (name == "well-balanced") return suite_well_balanced();
  if (name == "max-principle") return suite_max_principle(seed);
  if (name == "conservation") return suite_conservation(seed);
  if (name == "entropy") return suite_entropy();
  if (name == "convergence") return suite_convergence();
  throw ConfigError("unknown suite '" + std::string(name) + "'");
}

}  // namespace wbfv
