#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ehdg/config.hpp"
#include "ehdg/error.hpp"

namespace ehdg {

// One solve with its full parameter tuple.
struct RunResult {
  std::string experiment;
  int dim = 2;
  std::string mesh;  // label, e.g. "box16" or "disk20"
  int n_elements = 0;
  std::string wave;  // wave kind or "source"
  StabilizationSpec stab;
  double frequency = 0.0;
  int order = 0;
  int material_order = 0;
  bool ok = false;
  std::string message;
  bool has_error = false;
  ErrorReport error;
  SolveStats stats;
};

// Fixed header for the given dimension; failed runs keep their parameters and empty metrics.
void write_results_csv(const std::vector<RunResult>& runs, int dim, const std::string& path);

template <int Dim>
Mesh<Dim> build_mesh(const MeshConfig& cfg, int n_index = 0);

// Header lines "# order", "# dim", "# mesh_checksum", then one row per element node with the
// physical position and re/im of u and the Voigt stress, then the trace vector.
template <int Dim>
void write_solution(const Solution<Dim>& sol, const std::string& path);

std::vector<RunResult> run_planewave(const ExperimentConfig& cfg, std::ostream& log);

struct SweepBest {
  std::string wave;
  double frequency = 0.0;
  int order = 0;
  StabFamily family = StabFamily::Godunov;
  StabSign sign = StabSign::Minus;
  double tau = 0.0;
  double total_u = 0.0, total_sigma = 0.0;
  int failed = 0;
};

// Tau grid for one family: `points` values log-spaced over `decades`, centered on `center`.
std::vector<double> tau_grid(const TauSweepConfig& sweep, double center);

// Rows ordered by (wave, frequency, order, family, tau).
std::vector<RunResult> run_tau_sweep(const ExperimentConfig& cfg, std::ostream& log,
                                     std::vector<SweepBest>* best = nullptr);

std::vector<RunResult> run_point_source(const ExperimentConfig& cfg, std::ostream& log);

struct GodunovCheck {
  std::string material;
  int normals = 0;
  int skipped = 0;
  double max_relative = 0.0;    // max |M_closed - M_oracle| / |M_closed|
  double max_eigen_error = 0.0;  // relative, against rho c
  std::string status;           // ok, failed or skipped
  std::string reason;
};

std::vector<GodunovCheck> verify_godunov(const ExperimentConfig& cfg, std::ostream& log);

// Runs the configured experiment, writes every CSV and manifest.json under cfg.output_dir.
// Returns the process exit code.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace ehdg
