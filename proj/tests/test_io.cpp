#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wbfv/driver.hpp"
#include "wbfv/error.hpp"
#include "wbfv/io.hpp"

using namespace wbfv;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimal = R"([mesh]
nx = 4
ny = 3
[layout]
region1 = disk(0, 0, 0.5)
[coupling]
gamma0 = linear(1)
gamma1 = linear(2)
flux0 = burgers(0, 1, 1)
flux1 = burgers(0.9, 1, 1)
[scheme]
[run]
t_end = 1
)";

}  // namespace

TEST_CASE("preset files parse to the built-in presets") {
  for (const std::string& name : preset_names()) {
    const std::filesystem::path file = std::filesystem::path(WBFV_SOURCE_DIR) / "presets" / (name + ".cfg");
    CAPTURE(name);
    CHECK(parse_config(file) == preset(name));
  }
}

TEST_CASE("minimal config gets the defaults") {
  const RunConfig c = parse_config_text(kMinimal);
  CHECK(c.mesh.nx == 4);
  CHECK(c.mesh.ny == 3);
  CHECK(c.scheme.cfl_number == 0.5);
  CHECK(c.scheme.flux == FluxKind::kRusanov);
  CHECK(c.run.output_dir == "out");
  CHECK(c.layout.regions.size() == 1);
}

TEST_CASE("empty file names the first missing section") {
  CHECK(error_of("") == "missing section [mesh]");
  CHECK(error_of("# nothing\n\n") == "missing section [mesh]");
}

TEST_CASE("cfl outside (0,1] is rejected with the key named") {
  std::string text = kMinimal;
  text.replace(text.find("[scheme]\n"), 9, "[scheme]\ncfl_number = 1.5\n");
  CHECK(error_of(text) == "[scheme] cfl_number: cfl_number out of (0,1]");
  text.replace(text.find("1.5"), 3, "0");
  CHECK(error_of(text).find("cfl_number") != std::string::npos);
}

TEST_CASE("syntax errors carry the line number") {
  std::string text = kMinimal;
  text.insert(0, "junk without equals\n");
  CHECK(error_of(text).rfind("line 1:", 0) == 0);
  CHECK(error_of("[mesh]\nnx = 4\n[bogus]\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("nx = 4\n").rfind("line 1:", 0) == 0);
}

TEST_CASE("unknown keys and bad values are rejected") {
  std::string text = kMinimal;
  text.replace(text.find("[run]\n"), 6, "[run]\ncolour = red\n");
  CHECK(error_of(text).find("colour") != std::string::npos);

  std::string flux = kMinimal;
  flux.replace(flux.find("[scheme]\n"), 9, "[scheme]\nflux = upwind\n");
  CHECK(!error_of(flux).empty());

  std::string gammas = kMinimal;
  gammas.replace(gammas.find("gamma1 = linear(2)\n"), 19, "");
  CHECK(!error_of(gammas).empty());

  std::string neg = kMinimal;
  neg.replace(neg.find("gamma1 = linear(2)"), 18, "gamma1 = linear(-1)");
  CHECK(!error_of(neg).empty());
}

TEST_CASE("serialize then parse is the identity") {
  for (const std::string& name : preset_names()) {
    const RunConfig c = preset(name);
    CHECK(parse_config_text(serialize_config(c)) == c);
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c;
    c.mesh.nx = 1 + rng() % 300;
    c.mesh.ny = 1 + rng() % 300;
    c.mesh.bbox = {-1.0 - std::abs(d(rng)), -1.0, 1.0, 1.0 + std::abs(d(rng))};
    c.mesh.beta = trial % 2 ? BetaRule::kUniformVertexWeights : BetaRule::kCentroid;
    const int L = count(rng);
    for (int l = 0; l < L; ++l) c.layout.regions.push_back(Region::disk({d(rng), d(rng)}, 0.1 + std::abs(d(rng))));
    c.coupling.gammas.push_back({"linear", {1.0}});
    c.coupling.fluxes.push_back({"burgers", {d(rng), d(rng), d(rng)}});
    for (int l = 1; l <= L; ++l) {
      c.coupling.gammas.push_back(l % 2 ? FamilySpec{"linear", {1.0 + std::abs(d(rng))}}
                                        : FamilySpec{"cubic", {std::abs(d(rng)), 1.0 + std::abs(d(rng))}});
      c.coupling.fluxes.push_back({"linear", {d(rng), d(rng)}});
    }
    c.scheme.flux = trial % 3 ? FluxKind::kGodunov : FluxKind::kRusanov;
    c.scheme.cfl_number = 0.05 + 0.9 * std::abs(d(rng));
    c.scheme.tol_root = 1e-13 * (1 + std::abs(d(rng)));
    c.scheme.w_reg = 1 + std::abs(d(rng));
    c.scheme.max_dt = trial % 4 ? std::abs(d(rng)) + 1e-3 : std::numeric_limits<double>::infinity();
    c.scheme.guard = trial % 5 != 0;
    c.scheme.init_quadrature = trial % 2 ? InitQuadrature::kCentroid : InitQuadrature::kSubcellFan;
    c.run.t_end = 1 + std::abs(d(rng));
    c.run.snapshots = {std::abs(d(rng)), 1.0};
    c.run.output_dir = "out/trial" + std::to_string(trial);
    c.run.formats = trial % 2 ? std::vector{OutputFormat::kCsv} : std::vector{OutputFormat::kVtkLegacy, OutputFormat::kCsv};
    c.run.initial = trial % 2 ? FamilySpec{"sine_bump", {d(rng), d(rng), 0.5, d(rng), d(rng)}}
                              : FamilySpec{"random", {static_cast<double>(trial), 0.0, 1.0}};
    c.run.diagnostics = trial % 3 == 0;
    CAPTURE(trial);
    const RunConfig back = parse_config_text(serialize_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("family syntax") {
  CHECK(parse_family("burgers(0.9, 1, 1)") == FamilySpec{"burgers", {0.9, 1, 1}});
  CHECK(parse_family(" t() ") == FamilySpec{"t", {}});
  CHECK(parse_family("linear(2)").to_string() == "linear(2)");
  CHECK_THROWS_AS(parse_family("linear(2"), ConfigError);
  CHECK_THROWS_AS(parse_family("linear(x)"), ConfigError);
  CHECK_THROWS_AS(parse_family("(1)"), ConfigError);
}

TEST_CASE("one-cell csv has a header and one row") {
  const PrimalMesh mesh = build_cartesian_mesh(1, 1, {0, 0, 1, 1});
  SnapshotFields f;
  f.u = {0.25};
  f.w = {0.5};
  f.v = {ColorVector{0.1}};
  f.components = 1;
  std::ostringstream out;
  format_snapshot(out, mesh, f, OutputFormat::kCsv);
  CHECK(out.str() == "cell_id,centroid_x,centroid_y,u,w,v_1\n0,0.5,0.5,0.25,0.5,0.10000000000000001\n");
}

TEST_CASE("vtk layout") {
  const PrimalMesh mesh = build_cartesian_mesh(2, 1, {0, 0, 2, 1});
  SnapshotFields f;
  f.u = {1, 2};
  f.w = {3, 4};
  f.v = {ColorVector{0.0, 1.0}, ColorVector{0.5, 0.25}};
  f.components = 2;
  std::ostringstream out;
  format_snapshot(out, mesh, f, OutputFormat::kVtkLegacy);
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(s.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(s.find("POINTS 6 double") != std::string::npos);
  CHECK(s.find("CELLS 2 10") != std::string::npos);
  CHECK(s.find("CELL_TYPES 2\n7\n7\n") != std::string::npos);
  CHECK(s.find("CELL_DATA 2") != std::string::npos);
  for (const char* field : {"SCALARS u double 1", "SCALARS w double 1", "SCALARS v_1 double 1", "SCALARS v_2 double 1"}) {
    CHECK(s.find(field) != std::string::npos);
  }
}

TEST_CASE("repeated writes are byte-identical") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "wbfv_test_io";
  std::filesystem::create_directories(dir);
  const PrimalMesh mesh = build_cartesian_mesh(5, 4, {-1, -1, 1, 1});
  SnapshotFields f;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    f.u.push_back(std::sin(1.0 + k));
    f.w.push_back(1.0 / (3.0 + k));
    f.v.push_back(ColorVector{k / 40.0});
  }
  f.components = 1;
  for (OutputFormat fmt : {OutputFormat::kCsv, OutputFormat::kVtkLegacy}) {
    write_snapshot(mesh, f, dir / "a", fmt);
    write_snapshot(mesh, f, dir / "b", fmt);
    const std::string a = slurp(dir / "a");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b"));
  }
  CHECK_THROWS_AS(write_snapshot(mesh, f, dir / "missing" / "deeper" / "x.csv", OutputFormat::kCsv), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("output format names") {
  CHECK(parse_output_format("vtk") == OutputFormat::kVtkLegacy);
  CHECK(parse_output_format("csv") == OutputFormat::kCsv);
  CHECK(to_string(OutputFormat::kCsv) == "csv");
  CHECK_THROWS_AS(parse_output_format("hdf5"), ConfigError);
}
