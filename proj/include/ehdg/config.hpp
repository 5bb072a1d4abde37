#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehdg/analytic.hpp"
#include "ehdg/material_field.hpp"
#include "ehdg/mesh.hpp"
#include "ehdg/stabilization.hpp"

namespace ehdg {

enum class ExperimentKind { Planewave, TauSweep, PointSource, SelfConvergence, VerifyGodunov };

ExperimentKind parse_experiment_kind(const std::string& s);
std::string to_string(ExperimentKind k);

struct MeshConfig {
  std::string kind = "box";  // box, disk or file
  std::vector<double> lo, hi;
  std::vector<int> n{4};     // box subdivisions; one run per entry
  double radius = 1.0;
  int layers = 8;
  double ratio = 0.7;
  std::string path;
  char boundary_tag = 0;     // overrides every boundary tag when set (D, N or R)
};

struct WaveConfig {
  WaveKind kind = WaveKind::P;
  std::vector<double> direction;
  std::vector<double> polarization;  // optional, isotropic only
  std::vector<double> frequencies;   // overrides the experiment's list when set
};

// Identity families are swept along the real or imaginary axis with the given sign.
struct SweepFamily {
  StabFamily family = StabFamily::Godunov;
  StabSign sign = StabSign::Minus;
};

struct TauSweepConfig {
  int points = 25;
  double decades = 6.0;
  // Center of the log grid per family; 0 selects the wave's impedance (identity), slowness
  // (KC) or 1 (Godunov).
  double center = 0.0;
  std::vector<SweepFamily> families;
};

struct SourceConfig {
  std::vector<double> position;
  std::vector<double> polarization;
  double amplitude = 1.0;
};

struct ReferenceConfig {
  bool enabled = false;
  MeshConfig mesh;
  int order = 7;
  StabilizationSpec stab;
};

struct GridConfig {
  std::vector<int> n;
  double boundary_margin = 0.05;
  double source_margin = 0.10;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Planewave;
  std::string name;
  int dim = 2;
  MeshConfig mesh;
  MaterialSpec material;
  std::vector<double> frequencies;  // Hz
  std::vector<int> orders{1};
  std::vector<StabilizationSpec> stabilizations;
  std::vector<WaveConfig> waves;
  TauSweepConfig sweep;
  std::vector<SourceConfig> sources;
  ReferenceConfig reference;
  GridConfig grid;
  std::vector<MaterialSpec> materials;  // verify_godunov
  int normals = 20;
  std::uint64_t seed = 1;
  std::string output_dir = "output";
  int threads = 0;
  bool dump_samples = false;
  bool dump_solution = false;
  std::string source_text;  // canonical JSON of the input, for the manifest hash
};

// Throws ConfigError with the offending key on malformed or inconsistent input.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

MaterialSpec parse_material(const std::string& json_text);
StabilizationSpec parse_stabilization(const std::string& json_text);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace ehdg
