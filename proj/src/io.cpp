#include "wbfv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "wbfv/error.hpp"

namespace wbfv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string num(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

bool parse_double(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, t.data() + t.size(), out);
  return r.ec == std::errc{} && r.ptr == t.data() + t.size();
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void key_error(const std::string& section, const std::string& key, const std::string& msg) {
  throw ConfigError("[" + section + "] " + key + ": " + msg);
}

void require_args(const FamilySpec& f, std::size_t n, const std::string& what) {
  if (f.args.size() != n) {
    throw ConfigError(what + " '" + f.name + "' takes " + std::to_string(n) + " arguments, got " +
                      std::to_string(f.args.size()));
  }
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

}  // namespace

std::string FamilySpec::to_string() const {
  std::string s = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + num(args[i]);
  return s + ")";
}

FamilySpec parse_family(std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') throw ConfigError("expected name(args...) in '" + t + "'");
  FamilySpec f;
  f.name = trim(std::string_view(t).substr(0, open));
  if (f.name.empty() || !std::all_of(f.name.begin(), f.name.end(), [](char c) { return std::isalnum(c) || c == '_'; })) {
    throw ConfigError("bad family name in '" + t + "'");
  }
  const std::string inner = trim(std::string_view(t).substr(open + 1, t.size() - open - 2));
  if (!inner.empty()) {
    for (const std::string& a : split_list(inner)) {
      double x = 0.0;
      if (!parse_double(a, x)) throw ConfigError("bad number '" + a + "' in '" + t + "'");
      f.args.push_back(x);
    }
  }
  return f;
}

ScalarProfile make_gamma(const FamilySpec& f) {
  if (f.name == "linear") {
    require_args(f, 1, "gamma");
    if (!(f.args[0] > 0.0)) throw ConfigError("linear gamma needs a positive slope");
    return ScalarProfile::linear(f.args[0]);
  }
  if (f.name == "cubic") {
    require_args(f, 2, "gamma");
    if (!(f.args[0] >= 0.0 && f.args[1] > 0.0)) throw ConfigError("cubic gamma a x^3 + b x needs a >= 0 and b > 0");
    return ScalarProfile::cubic(f.args[0], f.args[1]);
  }
  throw ConfigError("unknown gamma family '" + f.name + "'");
}

FluxFamily make_flux_family(const FamilySpec& f) {
  if (f.name == "burgers") {
    require_args(f, 3, "flux");
    return {ScalarProfile::shifted_quadratic(f.args[0]), {f.args[1], f.args[2]}};
  }
  if (f.name == "linear") {
    require_args(f, 2, "flux");
    return {ScalarProfile::linear(1.0), {f.args[0], f.args[1]}};
  }
  if (f.name == "cubic") {
    require_args(f, 4, "flux");
    return {ScalarProfile::cubic(f.args[0], f.args[1]), {f.args[2], f.args[3]}};
  }
  throw ConfigError("unknown flux family '" + f.name + "'");
}

std::shared_ptr<const LinearCoupling> make_coupling(const CouplingConfig& c) {
  std::vector<ScalarProfile> gammas;
  std::vector<FluxFamily> fluxes;
  for (const FamilySpec& g : c.gammas) gammas.push_back(make_gamma(g));
  for (const FamilySpec& f : c.fluxes) fluxes.push_back(make_flux_family(f));
  return make_linear_coupling(std::move(gammas), std::move(fluxes));
}

std::function<double(Vec2)> make_initial(const FamilySpec& f) {
  if (f.name == "constant") {
    require_args(f, 1, "initial data");
    const double c = f.args[0];
    return [c](Vec2) { return c; };
  }
  if (f.name == "step") {
    require_args(f, 3, "initial data");
    const double x0 = f.args[0], left = f.args[1], right = f.args[2];
    return [=](Vec2 p) { return p.x < x0 ? left : right; };
  }
  if (f.name == "sine_bump") {
    require_args(f, 5, "initial data");
    const Vec2 c{f.args[0], f.args[1]};
    const double R = f.args[2], base = f.args[3], amp = f.args[4];
    if (!(R > 0.0)) throw ConfigError("sine_bump radius must be positive");
    return [=](Vec2 p) {
      const double r = norm(p - c);
      if (r >= R) return base;
      const double k = std::cos(0.5 * std::numbers::pi * r / R);
      return base + amp * k * k * k * k;
    };
  }
  if (f.name == "random") {
    require_args(f, 3, "initial data");
    return {};
  }
  throw ConfigError("unknown initial data '" + f.name + "'");
}

std::string to_string(OutputFormat format) { return format == OutputFormat::kVtkLegacy ? "vtk" : "csv"; }

OutputFormat parse_output_format(std::string_view text) {
  if (text == "vtk") return OutputFormat::kVtkLegacy;
  if (text == "csv") return OutputFormat::kCsv;
  throw ConfigError("unknown output format '" + std::string(text) + "'");
}

void validate_config(const RunConfig& c) {
  if (c.mesh.file.empty()) {
    if (c.mesh.nx == 0 || c.mesh.ny == 0) key_error("mesh", "nx", "grid dimensions must be positive");
    if (!(c.mesh.bbox.xmax > c.mesh.bbox.xmin && c.mesh.bbox.ymax > c.mesh.bbox.ymin)) {
      key_error("mesh", "bbox", "empty box");
    }
  }
  const std::size_t L = c.layout.regions.size();
  if (c.coupling.gammas.size() != L + 1) {
    key_error("coupling", "gamma", "need " + std::to_string(L + 1) + " gamma maps for " + std::to_string(L) + " regions");
  }
  if (c.coupling.fluxes.size() != L + 1) {
    key_error("coupling", "flux", "need " + std::to_string(L + 1) + " flux families for " + std::to_string(L) + " regions");
  }
  for (std::size_t l = 0; l <= L; ++l) {
    try {
      make_gamma(c.coupling.gammas[l]);
    } catch (const ConfigError& e) {
      key_error("coupling", "gamma" + std::to_string(l), e.what());
    }
    try {
      make_flux_family(c.coupling.fluxes[l]);
    } catch (const ConfigError& e) {
      key_error("coupling", "flux" + std::to_string(l), e.what());
    }
  }
  const SchemeConfig& s = c.scheme;
  if (!(s.cfl_number > 0.0 && s.cfl_number <= 1.0)) key_error("scheme", "cfl_number", "cfl_number out of (0,1]");
  if (!(s.tol_root > 0.0)) key_error("scheme", "tol_root", "must be positive");
  if (!(s.w_reg >= 0.0) || !std::isfinite(s.w_reg)) key_error("scheme", "w_reg", "must be finite and nonnegative");
  if (s.quadrature_order < 1 || s.quadrature_order > 64) key_error("scheme", "quadrature_order", "must be in 1..64");
  if (!(s.max_dt > 0.0)) key_error("scheme", "max_dt", "must be positive");
  const RunSpec& r = c.run;
  if (!(r.t_end >= 0.0) || !std::isfinite(r.t_end)) key_error("run", "t_end", "must be finite and nonnegative");
  if (!std::is_sorted(r.snapshots.begin(), r.snapshots.end())) key_error("run", "snapshots", "times must be sorted");
  for (double t : r.snapshots) {
    if (!(t >= 0.0 && t <= r.t_end)) key_error("run", "snapshots", "time " + num(t) + " outside [0, t_end]");
  }
  if (r.output_dir.empty()) key_error("run", "output_dir", "must not be empty");
  try {
    make_initial(r.initial);
  } catch (const ConfigError& e) {
    key_error("run", "initial", e.what());
  }
  if (r.initial.name == "random") {
    const double seed = r.initial.args[0];
    if (!(seed >= 0.0) || seed != std::floor(seed)) key_error("run", "initial", "random seed must be a nonnegative integer");
    if (!(r.initial.args[1] <= r.initial.args[2])) key_error("run", "initial", "random range is empty");
  }
}

RunConfig parse_config_text(std::string_view text) {
  static const std::map<std::string, std::vector<std::string>> fixed_keys{
      {"mesh", {"file", "nx", "ny", "bbox", "beta"}},
      {"layout", {}},
      {"coupling", {}},
      {"scheme", {"flux", "cfl_number", "tol_root", "w_reg", "quadrature_order", "max_dt", "guard", "init_quadrature"}},
      {"run", {"t_end", "snapshots", "output_dir", "formats", "initial", "diagnostics"}},
  };
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!fixed_keys.count(current)) throw ConfigError(where + "unknown section [" + current + "]");
      if (sections.count(current)) throw ConfigError(where + "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (current.empty()) throw ConfigError(where + "key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    const auto& known = fixed_keys.at(current);
    bool ok = std::find(known.begin(), known.end(), key) != known.end();
    const auto indexed = [&](const std::string& prefix, std::size_t min) {
      if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return false;
      const std::string digits = key.substr(prefix.size());
      if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); })) return false;
      if (digits.size() > 1 && digits[0] == '0') return false;
      return std::stoul(digits) >= min && std::stoul(digits) <= kMaxComponents;
    };
    if (current == "layout") ok = indexed("region", 1);
    if (current == "coupling") ok = indexed("gamma", 0) || indexed("flux", 0);
    if (!ok) throw ConfigError(where + "unknown key '" + key + "' in [" + current + "]");
    Section& sec = sections[current];
    if (sec.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    sec[key] = {value, line_no, false};
  }

  for (const char* name : {"mesh", "layout", "coupling", "scheme", "run"}) {
    if (!sections.count(name)) throw ConfigError(std::string("missing section [") + name + "]");
  }

  RunConfig c;
  const auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    auto& s = sections[sec];
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };
  const auto fail = [](const std::string& sec, const std::string& key, const Entry& e, const std::string& msg) {
    throw ConfigError("line " + std::to_string(e.line) + ": [" + sec + "] " + key + ": " + msg);
  };
  const auto number = [&](const std::string& sec, const std::string& key, double& out) {
    if (const Entry* e = get(sec, key)) {
      if (!parse_double(e->value, out)) fail(sec, key, *e, "expected a number, got '" + e->value + "'");
    }
  };
  const auto count = [&](const std::string& sec, const std::string& key, std::size_t& out) {
    if (const Entry* e = get(sec, key)) {
      double x = 0.0;
      if (!parse_double(e->value, x) || x < 0.0 || x != std::floor(x) || x > 1e9) {
        fail(sec, key, *e, "expected a nonnegative integer, got '" + e->value + "'");
      }
      out = static_cast<std::size_t>(x);
    }
  };
  const auto boolean = [&](const std::string& sec, const std::string& key, bool& out) {
    if (const Entry* e = get(sec, key)) {
      if (e->value == "true") {
        out = true;
      } else if (e->value == "false") {
        out = false;
      } else {
        fail(sec, key, *e, "expected true or false");
      }
    }
  };
  const auto family = [&](const std::string& sec, const std::string& key, FamilySpec& out) {
    if (const Entry* e = get(sec, key)) {
      try {
        out = parse_family(e->value);
      } catch (const ConfigError& err) {
        fail(sec, key, *e, err.what());
      }
    }
  };

  // [mesh]
  if (const Entry* e = get("mesh", "file")) c.mesh.file = e->value;
  if (c.mesh.file.empty() && (!get("mesh", "nx") || !get("mesh", "ny"))) {
    throw ConfigError("[mesh] needs either file or nx and ny");
  }
  count("mesh", "nx", c.mesh.nx);
  count("mesh", "ny", c.mesh.ny);
  if (const Entry* e = get("mesh", "bbox")) {
    const auto parts = split_list(e->value);
    double b[4];
    if (parts.size() != 4) fail("mesh", "bbox", *e, "expected xmin, ymin, xmax, ymax");
    for (int i = 0; i < 4; ++i) {
      if (!parse_double(parts[i], b[i])) fail("mesh", "bbox", *e, "bad number '" + parts[i] + "'");
    }
    c.mesh.bbox = {b[0], b[1], b[2], b[3]};
  }
  if (const Entry* e = get("mesh", "beta")) {
    if (e->value == "centroid") {
      c.mesh.beta = BetaRule::kCentroid;
    } else if (e->value == "vertex_average") {
      c.mesh.beta = BetaRule::kUniformVertexWeights;
    } else {
      fail("mesh", "beta", *e, "expected centroid or vertex_average");
    }
  }

  // [layout]
  const std::size_t L = sections["layout"].size();
  for (std::size_t l = 1; l <= L; ++l) {
    const std::string key = "region" + std::to_string(l);
    const Entry* e = get("layout", key);
    if (!e) throw ConfigError("[layout] " + key + ": missing (regions must be numbered 1..L)");
    try {
      c.layout.regions.push_back(parse_region(e->value));
    } catch (const Error& err) {
      fail("layout", key, *e, err.what());
    }
  }

  // [coupling]
  for (std::size_t l = 0; l <= L; ++l) {
    for (const std::string prefix : {"gamma", "flux"}) {
      const std::string key = prefix + std::to_string(l);
      if (!get("coupling", key)) throw ConfigError("[coupling] " + key + ": missing");
      FamilySpec f;
      family("coupling", key, f);
      (prefix == "gamma" ? c.coupling.gammas : c.coupling.fluxes).push_back(f);
    }
  }
  if (sections["coupling"].size() != 2 * (L + 1)) {
    throw ConfigError("[coupling] expects gamma0..gamma" + std::to_string(L) + " and flux0..flux" + std::to_string(L));
  }

  // [scheme]
  if (const Entry* e = get("scheme", "flux")) {
    try {
      c.scheme.flux = parse_flux_kind(e->value);
    } catch (const ConfigError& err) {
      fail("scheme", "flux", *e, err.what());
    }
  }
  number("scheme", "cfl_number", c.scheme.cfl_number);
  number("scheme", "tol_root", c.scheme.tol_root);
  number("scheme", "w_reg", c.scheme.w_reg);
  count("scheme", "quadrature_order", c.scheme.quadrature_order);
  number("scheme", "max_dt", c.scheme.max_dt);
  boolean("scheme", "guard", c.scheme.guard);
  if (const Entry* e = get("scheme", "init_quadrature")) {
    if (e->value == "subcell_fan") {
      c.scheme.init_quadrature = InitQuadrature::kSubcellFan;
    } else if (e->value == "centroid") {
      c.scheme.init_quadrature = InitQuadrature::kCentroid;
    } else {
      fail("scheme", "init_quadrature", *e, "expected subcell_fan or centroid");
    }
  }

  // [run]
  if (!get("run", "t_end")) throw ConfigError("[run] t_end: missing");
  number("run", "t_end", c.run.t_end);
  if (const Entry* e = get("run", "snapshots")) {
    c.run.snapshots.clear();
    if (!e->value.empty()) {
      for (const std::string& p : split_list(e->value)) {
        double t = 0.0;
        if (!parse_double(p, t)) fail("run", "snapshots", *e, "bad number '" + p + "'");
        c.run.snapshots.push_back(t);
      }
    }
  }
  if (const Entry* e = get("run", "output_dir")) c.run.output_dir = e->value;
  if (const Entry* e = get("run", "formats")) {
    c.run.formats.clear();
    if (!e->value.empty()) {
      for (const std::string& p : split_list(e->value)) {
        try {
          c.run.formats.push_back(parse_output_format(p));
        } catch (const ConfigError& err) {
          fail("run", "formats", *e, err.what());
        }
      }
    }
  }
  family("run", "initial", c.run.initial);
  boolean("run", "diagnostics", c.run.diagnostics);

  validate_config(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[mesh]\n";
  if (!c.mesh.file.empty()) o << "file = " << c.mesh.file << "\n";
  o << "nx = " << c.mesh.nx << "\nny = " << c.mesh.ny << "\n";
  o << "bbox = " << num(c.mesh.bbox.xmin) << ", " << num(c.mesh.bbox.ymin) << ", " << num(c.mesh.bbox.xmax) << ", "
    << num(c.mesh.bbox.ymax) << "\n";
  o << "beta = " << (c.mesh.beta == BetaRule::kUniformVertexWeights ? "vertex_average" : "centroid") << "\n";
  o << "\n[layout]\n";
  for (std::size_t l = 0; l < c.layout.regions.size(); ++l) {
    o << "region" << l + 1 << " = " << c.layout.regions[l].to_string() << "\n";
  }
  o << "\n[coupling]\n";
  for (std::size_t l = 0; l < c.coupling.gammas.size(); ++l) {
    o << "gamma" << l << " = " << c.coupling.gammas[l].to_string() << "\n";
  }
  for (std::size_t l = 0; l < c.coupling.fluxes.size(); ++l) {
    o << "flux" << l << " = " << c.coupling.fluxes[l].to_string() << "\n";
  }
  const SchemeConfig& s = c.scheme;
  o << "\n[scheme]\n";
  o << "flux = " << to_string(s.flux) << "\n";
  o << "cfl_number = " << num(s.cfl_number) << "\n";
  o << "tol_root = " << num(s.tol_root) << "\n";
  o << "w_reg = " << num(s.w_reg) << "\n";
  o << "quadrature_order = " << s.quadrature_order << "\n";
  o << "max_dt = " << num(s.max_dt) << "\n";
  o << "guard = " << (s.guard ? "true" : "false") << "\n";
  o << "init_quadrature = " << (s.init_quadrature == InitQuadrature::kCentroid ? "centroid" : "subcell_fan") << "\n";
  const RunSpec& r = c.run;
  o << "\n[run]\n";
  o << "t_end = " << num(r.t_end) << "\n";
  o << "snapshots = ";
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) o << (i ? ", " : "") << num(r.snapshots[i]);
  o << "\noutput_dir = " << r.output_dir << "\n";
  o << "formats = ";
  for (std::size_t i = 0; i < r.formats.size(); ++i) o << (i ? ", " : "") << to_string(r.formats[i]);
  o << "\ninitial = " << r.initial.to_string() << "\n";
  o << "diagnostics = " << (r.diagnostics ? "true" : "false") << "\n";
  return o.str();
}

void format_snapshot(std::ostream& out, const PrimalMesh& mesh, const SnapshotFields& f, OutputFormat format) {
  const std::size_t n = mesh.num_cells();
  if (f.u.size() != n || f.w.size() != n || (f.components > 0 && f.v.size() != n)) {
    throw Error("snapshot field lengths do not match the cell count");
  }
  char buf[128];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  if (format == OutputFormat::kCsv) {
    out << "cell_id,centroid_x,centroid_y,u,w";
    for (std::size_t l = 1; l <= f.components; ++l) out << ",v_" << l;
    out << "\n";
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 c = mesh.centroid(k);
      out << k << ",";
      put(c.x);
      out << ",";
      put(c.y);
      out << ",";
      put(f.u[k]);
      out << ",";
      put(f.w[k]);
      for (std::size_t l = 0; l < f.components; ++l) {
        out << ",";
        put(f.v[k][l]);
      }
      out << "\n";
    }
    return;
  }
  out << "# vtk DataFile Version 3.0\nwbfv snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& p : mesh.vertices()) {
    put(p.x);
    out << " ";
    put(p.y);
    out << " 0\n";
  }
  out << "CELLS " << n << " " << n + mesh.num_subcells() << "\n";
  for (std::size_t k = 0; k < n; ++k) {
    const auto ids = mesh.cell_vertices(k);
    out << ids.size();
    for (std::size_t id : ids) out << " " << id;
    out << "\n";
  }
  out << "CELL_TYPES " << n << "\n";
  for (std::size_t k = 0; k < n; ++k) out << "7\n";
  out << "CELL_DATA " << n << "\n";
  const auto scalars = [&](const std::string& name, const auto& value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t k = 0; k < n; ++k) {
      put(value(k));
      out << "\n";
    }
  };
  scalars("u", [&](std::size_t k) { return f.u[k]; });
  scalars("w", [&](std::size_t k) { return f.w[k]; });
  for (std::size_t l = 0; l < f.components; ++l) {
    scalars("v_" + std::to_string(l + 1), [&](std::size_t k) { return f.v[k][l]; });
  }
}

void write_snapshot(const PrimalMesh& mesh, const SnapshotFields& fields, const std::filesystem::path& path,
                    OutputFormat format) {
  std::ostringstream ss;
  format_snapshot(ss, mesh, fields, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << ss.str();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace wbfv
