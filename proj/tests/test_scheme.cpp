#include <doctest.h>

#include <cmath>
#include <random>

#include "wbfv/error.hpp"
#include "wbfv/scheme.hpp"

using namespace wbfv;

namespace {

std::shared_ptr<const LinearCoupling> burgers_model(Vec2 d0, Vec2 d1, double k1 = 2.0) {
  return make_linear_coupling({ScalarProfile::linear(1.0), ScalarProfile::linear(k1)},
                              {{ScalarProfile::shifted_quadratic(0.0), d0}, {ScalarProfile::shifted_quadratic(0.9), d1}});
}

struct Setup {
  std::shared_ptr<const PrimalMesh> mesh;
  std::shared_ptr<const DualGeometry> dual;
  std::shared_ptr<const ColorField> color;
  std::shared_ptr<const CouplingModel> model;
};

Setup annulus_setup(std::size_t n, std::shared_ptr<const CouplingModel> model) {
  Setup s;
  s.mesh = std::make_shared<const PrimalMesh>(build_cartesian_mesh(n, n, {-1, -1, 1, 1}));
  s.dual = std::make_shared<const DualGeometry>(derive_dual(*s.mesh));
  const DomainLayout layout{{Region::annulus({0, 0}, std::sqrt(0.1), std::sqrt(0.2))}, 3 * s.mesh->max_edge_length()};
  s.color = std::make_shared<const ColorField>(build_color_field(*s.mesh, layout));
  s.model = std::move(model);
  return s;
}

// Extremum of c w^2 / 2 over [min(a,b), max(a,b)]: min when a <= b, else max.
double godunov_quadratic(double c, double a, double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  double best_min = std::min(0.5 * c * a * a, 0.5 * c * b * b);
  double best_max = std::max(0.5 * c * a * a, 0.5 * c * b * b);
  if (lo <= 0.0 && 0.0 <= hi) {
    best_min = std::min(best_min, 0.0);
    best_max = std::max(best_max, 0.0);
  }
  return a <= b ? best_min : best_max;
}

}  // namespace

TEST_CASE("init_state") {
  const PrimalMesh m = build_cartesian_mesh(2, 1, {0, 0, 1, 1});
  const DualGeometry d = derive_dual(m);
  const SolverState c = init_state(m, d, [](Vec2) { return 0.7; });
  CHECK(c.u == std::vector<double>{0.7, 0.7});
  CHECK(c.m == 0.7);
  CHECK(c.M == 0.7);
  const SolverState x = init_state(m, d, [](Vec2 p) { return p.x; });
  CHECK(std::abs(x.u[0] - 0.25) <= 1e-15);
  CHECK(std::abs(x.u[1] - 0.75) <= 1e-15);
  const SolverState xc = init_state(m, d, [](Vec2 p) { return p.x; }, InitQuadrature::kCentroid);
  CHECK(std::abs(xc.u[1] - 0.75) <= 1e-15);
  CHECK_THROWS_AS(init_state(m, d, [](Vec2) { return NAN; }), Error);
}

TEST_CASE("init_state on the step data") {
  const PrimalMesh m = build_cartesian_mesh(100, 100, {-1, -1, 1, 1});
  const DualGeometry d = derive_dual(m);
  const SolverState s = init_state(m, d, [](Vec2 p) { return p.x < -0.8 ? 1.0 : 0.0; });
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const double cx = m.centroid(k).x;
    if (std::abs(cx + 0.8) > 0.011) CHECK((s.u[k] == 0.0 || s.u[k] == 1.0));
  }
  CHECK(s.m == 0.0);
  CHECK(s.M == 1.0);
}

TEST_CASE("subcell reconstruction") {
  const PrimalMesh m = build_cartesian_mesh(1, 1, {0, 0, 1, 1});
  const DualGeometry d = derive_dual(m);
  const auto model = burgers_model({1, 1}, {1, 1});
  std::vector<ColorVector> vs(4);
  for (std::size_t j = 0; j < 4; ++j) vs[m.cell_edges(0)[j].edge] = ColorVector{j % 2 == 0 ? 0.0 : 1.0};
  const ColorField color(1, vs);
  const Reconstruction r = reconstruct_subcell(m, d, color, *model, {1.0});
  CHECK(r.w_sub == std::vector<double>{1, 2, 1, 2});
  CHECK(r.w_cell[0] == 1.5);

  const ColorField uniform = uniform_color_field(m, ColorVector{0.3});
  const Reconstruction u = reconstruct_subcell(m, d, uniform, *model, {0.8});
  for (double w : u.w_sub) CHECK(std::abs(w - u.w_cell[0]) <= 1e-15);
}

TEST_CASE("compute_dt closed form") {
  const auto mesh = std::make_shared<const PrimalMesh>(build_cartesian_mesh(10, 10, {0, 0, 1, 1}));
  const auto dual = std::make_shared<const DualGeometry>(derive_dual(*mesh));
  const auto color = std::make_shared<const ColorField>(uniform_color_field(*mesh, ColorVector{0.0}));
  SolverState s;
  s.u.assign(100, 0.0);
  s.u[3] = 1.0;
  s.m = 0.0;
  s.M = 1.0;
  const WellBalancedScheme a(mesh, dual, color, burgers_model({1, 1}, {1, 1}));
  const double he = 0.1;
  CHECK(std::abs(a.compute_dt(s) - 0.5 * (he / 4) / 1.05) <= 1e-15);
  const WellBalancedScheme b(mesh, dual, color, burgers_model({2, 2}, {1, 1}));
  CHECK(std::abs(b.compute_dt(s) - 0.5 * a.compute_dt(s)) <= 1e-15);

  const auto zero = make_linear_coupling({ScalarProfile::linear(1.0), ScalarProfile::linear(2.0)},
                                         {{ScalarProfile::linear(1.0), {0, 0}}, {ScalarProfile::linear(1.0), {0, 0}}});
  SchemeOptions opt;
  opt.max_dt = 0.25;
  CHECK(WellBalancedScheme(mesh, dual, color, zero, opt).compute_dt(s) == 0.25);
  opt.cfl = 1.5;
  CHECK_THROWS_AS(WellBalancedScheme(mesh, dual, color, zero, opt).compute_dt(s), ConfigError);
}

TEST_CASE("constant state is preserved for any color field") {
  for (FluxKind kind : {FluxKind::kRusanov, FluxKind::kGodunov}) {
    const Setup st = annulus_setup(24, burgers_model({1, 1}, {1, 1}));
    SchemeOptions opt;
    opt.flux = kind;
    const WellBalancedScheme scheme(st.mesh, st.dual, st.color, st.model, opt);
    SolverState s = init_state(*st.mesh, *st.dual, [](Vec2) { return 0.5; });
    const double tau = scheme.compute_dt(s);
    CHECK(tau > 0.0);
    for (int n = 0; n < 20; ++n) s = scheme.step(s, tau);
    for (double u : s.u) CHECK(u == 0.5);
  }
}

TEST_CASE("zero step is the identity") {
  const Setup st = annulus_setup(16, burgers_model({1, 1}, {1, 1}));
  const WellBalancedScheme scheme(st.mesh, st.dual, st.color, st.model);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SolverState s = init_state(*st.mesh, *st.dual, [&](Vec2) { return unit(rng); }, InitQuadrature::kCentroid);
  const SolverState n = scheme.step(s, 0.0);
  CHECK(n.u == s.u);
}

TEST_CASE("2x1 Riemann problem matches the hand-computed upwind update") {
  const auto mesh = std::make_shared<const PrimalMesh>(build_cartesian_mesh(2, 1, {0, 0, 2, 1}));
  const auto dual = std::make_shared<const DualGeometry>(derive_dual(*mesh));
  const auto color = std::make_shared<const ColorField>(uniform_color_field(*mesh, ColorVector{0.0}));
  const auto model = burgers_model({1, 0}, {1, 0});
  SolverState s{0.0, {1.0, 0.0}, 0.0, 1.0};
  SchemeOptions opt;
  opt.flux = FluxKind::kGodunov;
  const WellBalancedScheme scheme(mesh, dual, color, model, opt);
  const double tau = 0.1;
  const SolverState n = scheme.step(s, tau);
  // Interface flux max_{[0,1]} w^2/2 = 0.5; boundary fluxes are consistent.
  CHECK(std::abs(n.u[0] - 1.0) <= 1e-15);
  CHECK(std::abs(n.u[1] - tau * 0.5) <= 1e-15);
}

TEST_CASE("step record identities") {
  const Setup st = annulus_setup(30, burgers_model({1, 1}, {1, 1}));
  const WellBalancedScheme scheme(st.mesh, st.dual, st.color, st.model);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SolverState s = init_state(*st.mesh, *st.dual, [&](Vec2) { return unit(rng); }, InitQuadrature::kCentroid);
  StepRecord rec;
  for (int n = 0; n < 5; ++n) {
    const SolverState next = scheme.step(s, scheme.compute_dt(s), &rec);
    const PrimalMesh& m = *st.mesh;
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      const std::size_t off = m.subcell_offset(k);
      double a = 0.0;
      double b = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < m.num_cell_edges(k); ++j) {
        const double alpha = st.dual->alpha(off + j);
        const ColorVector& v = (*st.color)[m.cell_edges(k)[j].edge];
        a += alpha * rec.w_sub[off + j];
        b += alpha * rec.w_sub_minus[off + j];
        c += alpha * st.model->c0(next.u[k], v);
        CHECK(rec.w_sub[off + j] == st.model->c0(s.u[k], v));
      }
      CHECK(std::abs(a - rec.w_cell[k]) <= 1e-12);
      CHECK(std::abs(b - rec.w_cell_next[k]) <= 1e-12);
      CHECK(std::abs(c - rec.w_cell_next[k]) <= 1e-12 * (1 + std::abs(rec.w_cell_next[k])));
    }
    s = next;
  }
}

TEST_CASE("single-domain trajectory equals a plain finite volume scheme") {
  const std::size_t nx = 12;
  const std::size_t ny = 10;
  const double dx = 2.0 / nx;
  const double dy = 1.0 / ny;
  const auto mesh = std::make_shared<const PrimalMesh>(build_cartesian_mesh(nx, ny, {-1, 0, 1, 1}));
  const auto dual = std::make_shared<const DualGeometry>(derive_dual(*mesh));
  const auto color = std::make_shared<const ColorField>(uniform_color_field(*mesh, ColorVector{0.0}));
  const Vec2 d{1.0, 0.5};
  SchemeOptions opt;
  opt.flux = FluxKind::kGodunov;
  const WellBalancedScheme scheme(mesh, dual, color, burgers_model(d, {0, 1}), opt);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-0.5, 1.0);
  std::vector<double> plain(nx * ny);
  for (double& u : plain) u = dist(rng);
  SolverState s{0.0, plain, *std::min_element(plain.begin(), plain.end()), *std::max_element(plain.begin(), plain.end())};
  const auto at = [&](const std::vector<double>& u, long i, long j) {
    i = std::clamp<long>(i, 0, nx - 1);
    j = std::clamp<long>(j, 0, ny - 1);
    return u[j * nx + i];
  };
  for (int n = 0; n < 20; ++n) {
    const double tau = scheme.compute_dt(s);
    s = scheme.step(s, tau);
    std::vector<double> next(plain.size());
    for (long j = 0; j < static_cast<long>(ny); ++j) {
      for (long i = 0; i < static_cast<long>(nx); ++i) {
        const double u = at(plain, i, j);
        const double fe = godunov_quadratic(d.x, u, at(plain, i + 1, j));
        const double fw = godunov_quadratic(d.x, at(plain, i - 1, j), u);
        const double fn = godunov_quadratic(d.y, u, at(plain, i, j + 1));
        const double fs = godunov_quadratic(d.y, at(plain, i, j - 1), u);
        next[j * nx + i] = u - tau / dx * (fe - fw) - tau / dy * (fn - fs);
      }
    }
    plain = next;
    for (std::size_t k = 0; k < plain.size(); ++k) CHECK(std::abs(s.u[k] - plain[k]) <= 1e-12);
  }
}

TEST_CASE("guard trips on a CFL violation") {
  const Setup st = annulus_setup(20, burgers_model({1, 1}, {1, 1}));
  const WellBalancedScheme scheme(st.mesh, st.dual, st.color, st.model);
  SolverState s = init_state(*st.mesh, *st.dual, [](Vec2 p) { return p.x < -0.3 ? 1.0 : 0.0; });
  const double tau = scheme.compute_dt(s);
  CHECK_NOTHROW(scheme.step(s, tau));
  try {
    scheme.step(s, 8 * tau);
    FAIL("expected a step error");
  } catch (const StepError& e) {
    CHECK(e.cell() < st.mesh->num_cells());
  }
}
