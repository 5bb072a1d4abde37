#include <cstdio>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "ehdg/config.hpp"
#include "ehdg/errors.hpp"
#include "ehdg/experiments.hpp"
#include "ehdg/mesh.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string output_dir;
  int threads = 0;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--output-dir", args.output_dir, "override the config's output directory");
  cmd->add_option("-t,--threads", args.threads, "thread budget (default: EHDG_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

int run(const RunArgs& args, const std::vector<ehdg::ExperimentKind>& allowed, const std::string& command) {
  ehdg::ExperimentConfig cfg = ehdg::load_config(args.config);
  bool ok = false;
  for (auto k : allowed) ok = ok || k == cfg.kind;
  if (!ok)
    throw ehdg::ConfigError("config: experiment '" + ehdg::to_string(cfg.kind) + "' cannot be run with '" +
                            command + "'");
  if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
  if (args.threads > 0) cfg.threads = args.threads;
  return ehdg::run_experiment(cfg, std::cerr);
}

template <int Dim>
void print_stats(const ehdg::Mesh<Dim>& m) {
  int boundary = 0;
  for (int k = 0; k < m.num_faces(); ++k) boundary += m.face(k).is_boundary() ? 1 : 0;
  std::printf("dim %d vertices %d elements %d faces %d boundary_faces %d checksum %016llx\n", Dim,
              m.num_vertices(), m.num_elements(), m.num_faces(), boundary,
              static_cast<unsigned long long>(m.checksum()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for time-harmonic elastic waves"};
  app.require_subcommand(1);

  RunArgs solve_args, sweep_args, godunov_args;
  auto* solve = app.add_subcommand("solve", "run a planewave, point-source or self-convergence experiment");
  add_run_options(solve, solve_args);
  auto* sweep = app.add_subcommand("sweep", "run a tau sweep");
  add_run_options(sweep, sweep_args);
  auto* godunov = app.add_subcommand("verify-godunov", "check closed-form Godunov matrices against the oracle");
  add_run_options(godunov, godunov_args);

  auto* mesh = app.add_subcommand("mesh", "generate or import meshes");
  mesh->require_subcommand(1);

  std::string shape = "box", out;
  int dim = 2, n = 4, layers = 8;
  std::vector<double> lo, hi;
  double radius = 1.0, ratio = 0.7;
  char tag = 0;
  auto* gen = mesh->add_subcommand("gen", "generate a structured box or a layered disk");
  gen->add_option("shape", shape, "box or disk")->check(CLI::IsMember({"box", "disk"}));
  gen->add_option("--dim", dim)->check(CLI::IsMember({2, 3}));
  gen->add_option("--lo", lo, "lower corner (default 0)");
  gen->add_option("--hi", hi, "upper corner (default 1)");
  gen->add_option("-n", n, "subdivisions per axis")->check(CLI::PositiveNumber);
  gen->add_option("--radius", radius)->check(CLI::PositiveNumber);
  gen->add_option("--layers", layers)->check(CLI::PositiveNumber);
  gen->add_option("--ratio", ratio, "radial growth of the layer spacing toward the center");
  gen->add_option("--boundary-tag", tag, "D, N or R on every boundary face");
  gen->add_option("-o,--output", out, "mesh file")->required();

  std::string in;
  auto* import = mesh->add_subcommand("import", "validate a mesh file and rewrite it in canonical form");
  import->add_option("input", in)->required()->check(CLI::ExistingFile);
  import->add_option("-o,--output", out, "canonical output (default: print statistics only)");

  CLI11_PARSE(app, argc, argv);

  try {
    using ehdg::ExperimentKind;
    if (*solve)
      return run(solve_args,
                 {ExperimentKind::Planewave, ExperimentKind::PointSource, ExperimentKind::SelfConvergence}, "solve");
    if (*sweep) return run(sweep_args, {ExperimentKind::TauSweep}, "sweep");
    if (*godunov) return run(godunov_args, {ExperimentKind::VerifyGodunov}, "verify-godunov");
    if (*gen) {
      auto apply_tag = [&](auto& m) {
        if (!tag) return;
        const auto t = ehdg::parse_tag(tag);
        for (int k = 0; k < m.num_faces(); ++k)
          if (m.face(k).is_boundary()) m.set_tag(k, t);
      };
      auto corner = [&](const std::vector<double>& v, double dflt, auto& c) {
        if (!v.empty() && static_cast<int>(v.size()) != dim)
          throw ehdg::ConfigError("--lo/--hi need one value per dimension");
        for (int i = 0; i < c.size(); ++i) c(i) = v.empty() ? dflt : v[i];
      };
      if (shape == "disk") {
        auto m = ehdg::generate_disk(radius, layers, ratio);
        apply_tag(m);
        ehdg::write_mesh(m, out);
        print_stats(m);
      } else if (dim == 2) {
        ehdg::Vec<2> a, b;
        corner(lo, 0.0, a);
        corner(hi, 1.0, b);
        auto m = ehdg::generate_box<2>(a, b, n);
        apply_tag(m);
        ehdg::write_mesh(m, out);
        print_stats(m);
      } else {
        ehdg::Vec<3> a, b;
        corner(lo, 0.0, a);
        corner(hi, 1.0, b);
        auto m = ehdg::generate_box<3>(a, b, n);
        apply_tag(m);
        ehdg::write_mesh(m, out);
        print_stats(m);
      }
      return 0;
    }
    if (*import) {
      const ehdg::AnyMesh any = ehdg::read_mesh(in);
      std::visit(
          [&](const auto& m) {
            if (!out.empty()) ehdg::write_mesh(m, out);
            print_stats(m);
          },
          any);
      return 0;
    }
  } catch (const ehdg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ehdg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
