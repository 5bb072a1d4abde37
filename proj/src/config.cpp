#include "ehdg/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ehdg/errors.hpp"

namespace ehdg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config: '" + key + "' " + what);
}

template <class T>
T get(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(key, "has the wrong type");
  }
}

template <class T>
T require(const json& j, const std::string& key) {
  if (!j.contains(key)) bad(key, "is required");
  return get<T>(j, key, T{});
}

// A number or a list of numbers.
template <class T>
std::vector<T> scalar_or_list(const json& j, const std::string& key, const std::vector<T>& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception&) {
    bad(key, "must be a number or a list of numbers");
  }
}

std::string resolve_path(const std::string& base, const std::string& p) {
  namespace fs = std::filesystem;
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

MeshConfig mesh_from(const json& j, const std::string& base) {
  MeshConfig m;
  m.kind = get<std::string>(j, "kind", "box");
  if (m.kind == "box") {
    m.lo = get<std::vector<double>>(j, "lo", {});
    m.hi = get<std::vector<double>>(j, "hi", {});
    m.n = scalar_or_list<int>(j, "n", {4});
    if (m.n.empty()) bad("mesh.n", "must not be empty");
    for (int n : m.n)
      if (n < 1) bad("mesh.n", "must be positive");
  } else if (m.kind == "disk") {
    m.radius = get<double>(j, "radius", 1.0);
    m.layers = get<int>(j, "layers", 8);
    m.ratio = get<double>(j, "ratio", 0.7);
    if (m.layers < 2) bad("mesh.layers", "must be at least 2");
    if (!(m.radius > 0.0) || !(m.ratio > 0.0)) bad("mesh", "radius and ratio must be positive");
  } else if (m.kind == "file") {
    m.path = resolve_path(base, require<std::string>(j, "path"));
    if (!std::filesystem::exists(m.path)) bad("mesh.path", "does not exist: " + m.path);
  } else {
    bad("mesh.kind", "must be box, disk or file");
  }
  const std::string tag = get<std::string>(j, "boundary", "");
  if (!tag.empty()) {
    if (tag.size() != 1 || std::string("DNR").find(tag[0]) == std::string::npos)
      bad("mesh.boundary", "must be D, N or R");
    m.boundary_tag = tag[0];
  }
  return m;
}

RadialProfile profile_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("material.profile_file", "cannot be opened: " + path);
  RadialProfile p;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double r, vp, vs, rho;
    if (!(ls >> r >> vp >> vs >> rho))
      bad("material.profile_file", "line " + std::to_string(row) + " needs radius, vp, vs, rho");
    p.radius.push_back(r);
    p.vp.push_back(vp);
    p.vs.push_back(vs);
    p.rho.push_back(rho);
  }
  return p;
}

MaterialSpec material_from(const json& j, const std::string& base) {
  MaterialSpec m;
  try {
    m.kind = parse_material_kind(get<std::string>(j, "kind", "iso"));
  } catch (const std::exception& e) {
    bad("material.kind", e.what());
  }
  m.rho = get<double>(j, "rho", 1.0);
  m.vp = get<double>(j, "vp", 0.0);
  m.vs = get<double>(j, "vs", 0.0);
  if (j.contains("lambda") || j.contains("mu")) {
    m.has_lame = true;
    m.lambda = require<double>(j, "lambda");
    m.mu = require<double>(j, "mu");
  }
  if (j.contains("c11")) {
    m.has_cij = true;
    m.c11 = require<double>(j, "c11");
    m.c33 = require<double>(j, "c33");
    m.c44 = require<double>(j, "c44");
    m.c66 = require<double>(j, "c66");
    m.c13 = require<double>(j, "c13");
  }
  m.vp = get<double>(j, "vp0", m.vp);
  m.vs = get<double>(j, "vs0", m.vs);
  m.epsilon = get<double>(j, "epsilon", 0.0);
  m.delta = get<double>(j, "delta", 0.0);
  m.gamma = get<double>(j, "gamma", 0.0);
  m.theta_deg = get<double>(j, "theta_deg", 0.0);
  m.field_order = get<int>(j, "field_order", 2);
  if (m.field_order < 0 || m.field_order > 6) bad("material.field_order", "must be in 0..6");
  const bool radial = m.kind == MaterialKind::IsoRadial || m.kind == MaterialKind::TtiRadial;
  if (radial) {
    if (j.contains("profile_file")) {
      m.profile = profile_from_csv(resolve_path(base, j.at("profile_file").get<std::string>()));
    } else if (j.contains("profile")) {
      const json& p = j.at("profile");
      m.profile.radius = require<std::vector<double>>(p, "radius");
      m.profile.vp = require<std::vector<double>>(p, "vp");
      m.profile.vs = require<std::vector<double>>(p, "vs");
      m.profile.rho = require<std::vector<double>>(p, "rho");
    } else {
      bad("material", "radial kinds need 'profile' or 'profile_file'");
    }
    const auto n = m.profile.radius.size();
    if (n < 2 || m.profile.vp.size() != n || m.profile.vs.size() != n || m.profile.rho.size() != n)
      bad("material.profile", "needs at least two rows of equal length");
  } else {
    if (!(m.rho > 0.0)) bad("material.rho", "must be positive");
    if (!m.has_lame && !m.has_cij && !(m.vp > 0.0)) bad("material", "needs speeds, Lame or Cij values");
  }
  return m;
}

StabilizationSpec stab_from(const json& j) {
  StabilizationSpec s;
  try {
    s.family = parse_family(get<std::string>(j, "family", "godunov"));
    s.sign = parse_sign(get<std::string>(j, "sign", "-"));
  } catch (const std::exception& e) {
    bad("stabilization", e.what());
  }
  if (j.contains("tau")) {
    const json& t = j.at("tau");
    if (t.is_string()) {
      if (t.get<std::string>() != "auto") bad("stabilization.tau", "must be a number, [re, im] or \"auto\"");
      s.tau_auto = true;
    } else if (t.is_number()) {
      s.tau = t.get<double>();
    } else if (t.is_array() && t.size() == 2) {
      s.tau = cplx(t[0].get<double>(), t[1].get<double>());
    } else {
      bad("stabilization.tau", "must be a number, [re, im] or \"auto\"");
    }
  }
  validate(s);
  return s;
}

SweepFamily sweep_family_from(const json& j) {
  SweepFamily f;
  f.family = parse_family(require<std::string>(j, "family"));
  f.sign = parse_sign(get<std::string>(j, "sign", "-"));
  if ((f.family == StabFamily::KC || f.family == StabFamily::Godunov) && f.sign == StabSign::Plus)
    bad("sweep.families", "only the identity families take a '+' sign");
  return f;
}

std::vector<double> vec_or_empty(const json& j, const std::string& key) {
  return get<std::vector<double>>(j, key, {});
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "planewave") return ExperimentKind::Planewave;
  if (s == "tau_sweep") return ExperimentKind::TauSweep;
  if (s == "point_source") return ExperimentKind::PointSource;
  if (s == "self_convergence") return ExperimentKind::SelfConvergence;
  if (s == "verify_godunov") return ExperimentKind::VerifyGodunov;
  throw ConfigError("config: unknown experiment '" + s + "'");
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Planewave: return "planewave";
    case ExperimentKind::TauSweep: return "tau_sweep";
    case ExperimentKind::PointSource: return "point_source";
    case ExperimentKind::SelfConvergence: return "self_convergence";
    case ExperimentKind::VerifyGodunov: return "verify_godunov";
  }
  return "unknown";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig c;
  c.source_text = j.dump();
  c.kind = parse_experiment_kind(require<std::string>(j, "experiment"));
  c.name = get<std::string>(j, "name", to_string(c.kind));
  c.dim = get<int>(j, "dim", 2);
  if (c.dim != 2 && c.dim != 3) bad("dim", "must be 2 or 3");
  c.output_dir = resolve_path(base_dir, get<std::string>(j, "output_dir", "output"));
  c.threads = get<int>(j, "threads", 0);
  c.dump_samples = get<bool>(j, "dump_samples", false);
  c.dump_solution = get<bool>(j, "dump_solution", false);
  c.seed = get<std::uint64_t>(j, "seed", 1);
  c.normals = get<int>(j, "normals", 20);

  if (c.kind == ExperimentKind::VerifyGodunov) {
    if (!j.contains("materials") || !j.at("materials").is_array() || j.at("materials").empty())
      bad("materials", "must be a nonempty list");
    for (const json& m : j.at("materials")) c.materials.push_back(material_from(m, base_dir));
    if (c.normals < 1) bad("normals", "must be positive");
    return c;
  }

  if (!j.contains("mesh")) bad("mesh", "is required");
  c.mesh = mesh_from(j.at("mesh"), base_dir);
  if (c.mesh.kind == "box") {
    if (c.mesh.lo.empty()) c.mesh.lo.assign(c.dim, 0.0);
    if (c.mesh.hi.empty()) c.mesh.hi.assign(c.dim, 1.0);
    if (static_cast<int>(c.mesh.lo.size()) != c.dim || static_cast<int>(c.mesh.hi.size()) != c.dim)
      bad("mesh.lo/hi", "must have dim entries");
  }
  if (c.mesh.kind == "disk" && c.dim != 2) bad("mesh.kind", "disk meshes are 2D");
  if (!j.contains("material")) bad("material", "is required");
  c.material = material_from(j.at("material"), base_dir);

  c.orders = scalar_or_list<int>(j, "orders", {1});
  if (c.orders.empty()) bad("orders", "must not be empty");
  for (int k : c.orders)
    if (k < 1 || k > 10) bad("orders", "must be in 1..10");

  if (j.contains("stabilizations")) {
    for (const json& s : j.at("stabilizations")) c.stabilizations.push_back(stab_from(s));
  } else if (j.contains("stabilization")) {
    c.stabilizations.push_back(stab_from(j.at("stabilization")));
  } else {
    c.stabilizations.push_back(StabilizationSpec{});
  }

  if (j.contains("waves")) {
    for (const json& w : j.at("waves")) {
      WaveConfig wc;
      wc.kind = parse_wave_kind(require<std::string>(w, "kind"));
      wc.direction = require<std::vector<double>>(w, "direction");
      wc.polarization = vec_or_empty(w, "polarization");
      if (static_cast<int>(wc.direction.size()) != c.dim) bad("waves.direction", "must have dim entries");
      if (!wc.polarization.empty() && static_cast<int>(wc.polarization.size()) != c.dim)
        bad("waves.polarization", "must have dim entries");
      wc.frequencies = scalar_or_list<double>(w, "frequencies", {});
      for (double f : wc.frequencies)
        if (!(f > 0.0)) bad("waves.frequencies", "must be positive");
      c.waves.push_back(wc);
    }
  }
  c.frequencies = scalar_or_list<double>(j, "frequencies", {});
  for (double f : c.frequencies)
    if (!(f > 0.0)) bad("frequencies", "must be positive");
  const bool per_wave = !c.waves.empty() && std::all_of(c.waves.begin(), c.waves.end(), [](const WaveConfig& w) {
    return !w.frequencies.empty();
  });
  if (c.frequencies.empty() && !per_wave) bad("frequencies", "must not be empty");

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    c.sweep.points = get<int>(s, "points", 25);
    c.sweep.decades = get<double>(s, "decades", 6.0);
    c.sweep.center = get<double>(s, "center", 0.0);
    if (s.contains("families"))
      for (const json& f : s.at("families")) c.sweep.families.push_back(sweep_family_from(f));
  }
  if (c.sweep.families.empty()) {
    c.sweep.families = {{StabFamily::IdentityReal, StabSign::Plus},
                        {StabFamily::IdentityReal, StabSign::Minus},
                        {StabFamily::IdentityImag, StabSign::Plus},
                        {StabFamily::IdentityImag, StabSign::Minus},
                        {StabFamily::KC, StabSign::Minus},
                        {StabFamily::Godunov, StabSign::Minus}};
  }
  if (c.sweep.points < 1) bad("sweep.points", "must be positive (the tau grid is empty)");
  if (!(c.sweep.decades >= 0.0)) bad("sweep.decades", "must be nonnegative");

  if (j.contains("sources")) {
    for (const json& s : j.at("sources")) {
      SourceConfig sc;
      sc.position = require<std::vector<double>>(s, "position");
      sc.polarization = vec_or_empty(s, "polarization");
      sc.amplitude = get<double>(s, "amplitude", 1.0);
      if (static_cast<int>(sc.position.size()) != c.dim) bad("sources.position", "must have dim entries");
      if (!sc.polarization.empty() && static_cast<int>(sc.polarization.size()) != c.dim)
        bad("sources.polarization", "must have dim entries");
      c.sources.push_back(sc);
    }
  }

  if (j.contains("reference")) {
    const json& r = j.at("reference");
    c.reference.enabled = true;
    c.reference.mesh = r.contains("mesh") ? mesh_from(r.at("mesh"), base_dir) : c.mesh;
    c.reference.order = get<int>(r, "order", 7);
    c.reference.stab = r.contains("stabilization") ? stab_from(r.at("stabilization")) : StabilizationSpec{};
    if (c.reference.order < 1 || c.reference.order > 10) bad("reference.order", "must be in 1..10");
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid.n = scalar_or_list<int>(g, "n", {});
    c.grid.boundary_margin = get<double>(g, "boundary_margin", 0.05);
    c.grid.source_margin = get<double>(g, "source_margin", 0.10);
  }
  if (c.grid.n.empty()) c.grid.n.assign(c.dim, c.dim == 2 ? 60 : 20);
  if (c.grid.n.size() == 1) c.grid.n.assign(c.dim, c.grid.n[0]);
  if (static_cast<int>(c.grid.n.size()) != c.dim) bad("grid.n", "must have 1 or dim entries");

  switch (c.kind) {
    case ExperimentKind::Planewave:
    case ExperimentKind::TauSweep:
      if (c.waves.empty()) bad("waves", "must not be empty for planewave experiments");
      if (c.material.kind == MaterialKind::IsoRadial || c.material.kind == MaterialKind::TtiRadial)
        bad("material", "planewave experiments need a homogeneous material");
      break;
    case ExperimentKind::SelfConvergence:
      if (!c.reference.enabled) bad("reference", "is required for self_convergence");
      [[fallthrough]];
    case ExperimentKind::PointSource:
      if (c.sources.empty()) bad("sources", "must not be empty for point-source experiments");
      break;
    case ExperimentKind::VerifyGodunov: break;
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), base.empty() ? "." : base);
}

MaterialSpec parse_material(const std::string& json_text) {
  try {
    return material_from(json::parse(json_text), ".");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

StabilizationSpec parse_stabilization(const std::string& json_text) {
  try {
    return stab_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace ehdg
