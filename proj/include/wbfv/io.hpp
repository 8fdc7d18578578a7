#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "wbfv/coupling.hpp"
#include "wbfv/flux.hpp"
#include "wbfv/layout.hpp"
#include "wbfv/mesh.hpp"
#include "wbfv/scheme.hpp"

namespace wbfv {

/// A named parametric family, written "name(a, b, ...)".
struct FamilySpec {
  std::string name;
  std::vector<double> args;

  std::string to_string() const;
  bool operator==(const FamilySpec&) const = default;
};

/// Throws ConfigError on malformed text.
FamilySpec parse_family(std::string_view text);

struct MeshConfig {
  /// Mesh file in the polymesh format; when empty a cartesian grid is built.
  std::string file;
  std::size_t nx = 100;
  std::size_t ny = 100;
  BoundingBox bbox{-1.0, -1.0, 1.0, 1.0};
  BetaRule beta = BetaRule::kCentroid;

  bool operator==(const MeshConfig&) const = default;
};

struct LayoutConfig {
  /// D_1..D_L
  std::vector<Region> regions;

  bool operator==(const LayoutConfig&) const = default;
};

/// gamma_l and flux family l for l = 0..L.
///   gamma: linear(k) | cubic(a, b)
///   flux:  burgers(shift, dx, dy) | linear(dx, dy) | cubic(a, b, dx, dy)
struct CouplingConfig {
  std::vector<FamilySpec> gammas;
  std::vector<FamilySpec> fluxes;

  bool operator==(const CouplingConfig&) const = default;
};

struct SchemeConfig {
  FluxKind flux = FluxKind::kRusanov;
  double cfl_number = 0.5;
  double tol_root = 1e-12;
  /// Transition width of the color field, in units of the longest edge.
  double w_reg = 3.0;
  std::size_t quadrature_order = 4;
  double max_dt = std::numeric_limits<double>::infinity();
  bool guard = true;
  InitQuadrature init_quadrature = InitQuadrature::kSubcellFan;

  bool operator==(const SchemeConfig&) const = default;
};

enum class OutputFormat { kVtkLegacy, kCsv };

struct RunSpec {
  double t_end = 1.0;
  /// Output times besides t = 0 and t_end.
  std::vector<double> snapshots;
  std::string output_dir = "out";
  std::vector<OutputFormat> formats{OutputFormat::kVtkLegacy, OutputFormat::kCsv};
  /// constant(c) | step(x0, left, right) | sine_bump(cx, cy, R, base, amp) | random(seed, lo, hi)
  FamilySpec initial{"constant", {0.0}};
  bool diagnostics = true;

  bool operator==(const RunSpec&) const = default;
};

struct RunConfig {
  MeshConfig mesh;
  LayoutConfig layout;
  CouplingConfig coupling;
  SchemeConfig scheme;
  RunSpec run;

  bool operator==(const RunConfig&) const = default;
};

/// INI-style text with sections [mesh] [layout] [coupling] [scheme] [run].
/// Unknown sections or keys are errors. Syntax errors carry "line N:",
/// semantic errors name the key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text);
std::string serialize_config(const RunConfig& config);

/// Semantic checks shared by the parser and the command line overrides.
void validate_config(const RunConfig& config);

ScalarProfile make_gamma(const FamilySpec& spec);
FluxFamily make_flux_family(const FamilySpec& spec);
std::shared_ptr<const LinearCoupling> make_coupling(const CouplingConfig& config);
/// Initial data as a function of position; random() has none (see the driver).
std::function<double(Vec2)> make_initial(const FamilySpec& spec);

std::string to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view text);

/// Per-cell fields of one snapshot.
struct SnapshotFields {
  std::vector<double> u;
  std::vector<double> w;
  std::vector<ColorVector> v;
  std::size_t components = 0;
};

/// VTK legacy ASCII unstructured grid with cell scalars u, w, v_1..v_L, or
/// CSV rows cell_id, centroid_x, centroid_y, u, w, v_1..v_L. Numbers use 17
/// significant digits.
void format_snapshot(std::ostream& out, const PrimalMesh& mesh, const SnapshotFields& fields, OutputFormat format);
/// Throws Error when the file cannot be written.
void write_snapshot(const PrimalMesh& mesh, const SnapshotFields& fields, const std::filesystem::path& path,
                    OutputFormat format);

}  // namespace wbfv
