#include "ehdg/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ehdg/parallel.hpp"
#include "ehdg/riemann_oracle.hpp"

namespace ehdg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <int Dim>
Vec<Dim> to_vec(const std::vector<double>& v) {
  Vec<Dim> out;
  for (int i = 0; i < Dim; ++i) out(i) = v.at(i);
  return out;
}

std::string axes(int dim) { return dim == 2 ? "xz" : "xyz"; }

std::vector<std::string> voigt_names(int dim) {
  const std::string a = axes(dim);
  std::vector<std::string> out;
  auto add = [&](auto pairs) {
    for (const auto& p : pairs) out.push_back(std::string{a[p[0]], a[p[1]]});
  };
  if (dim == 2) add(voigt_pairs<2>()); else add(voigt_pairs<3>());
  return out;
}

std::string stab_label(const StabilizationSpec& s) {
  std::string out = to_string(s.family) + (s.sign == StabSign::Plus ? "+" : "-");
  if (s.tau_auto) return out + "_auto";
  return out + "_" + num(s.tau.real()) + (s.tau.imag() != 0.0 ? "i" + num(s.tau.imag()) : "");
}

std::string file_label(const RunResult& r) {
  std::string s = r.wave + "_" + stab_label(r.stab) + "_f" + num(r.frequency) + "_k" +
                  std::to_string(r.order) + "_" + r.mesh;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+') c = '_';
  return s;
}

// Runs independent tasks, in parallel when the budget allows; results keep task order.
std::vector<RunResult> run_tasks(const std::vector<std::function<RunResult(int)>>& tasks, int threads) {
  std::vector<RunResult> out(tasks.size());
  const int budget = resolve_threads(threads);
  if (budget <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = tasks[i](budget);
    return out;
  }
  parallel_for(static_cast<int>(tasks.size()), budget, [&](int b0, int b1) {
    for (int i = b0; i < b1; ++i) out[i] = tasks[i](1);
  });
  return out;
}

template <int Dim>
std::string mesh_label(const MeshConfig& cfg, int n_index) {
  if (cfg.kind == "box") return "box" + std::to_string(cfg.n.at(n_index));
  if (cfg.kind == "disk") return "disk" + std::to_string(cfg.layers);
  return std::filesystem::path(cfg.path).stem().string();
}

int mesh_count(const MeshConfig& cfg) { return cfg.kind == "box" ? static_cast<int>(cfg.n.size()) : 1; }

template <int Dim>
Planewave<Dim> make_planewave(const WaveConfig& w, const MaterialSpec& m, double omega) {
  Vec<Dim> d = to_vec<Dim>(w.direction);
  if (!(d.norm() > 0.0)) throw ConfigError("config: planewave direction must be nonzero");
  d.normalize();
  const Medium<Dim> med = homogeneous_medium<Dim>(m);
  if (w.kind == WaveKind::P || w.kind == WaveKind::S) {
    if (m.kind != MaterialKind::Iso) throw ConfigError("config: P and S planewaves need an iso material");
    constexpr int NV = kVoigt<Dim>;
    const double lambda = med.c.m(0, 1), mu = med.c.m(NV - 1, NV - 1);
    if (w.polarization.empty()) return planewave_iso<Dim>(w.kind, d, omega, lambda, mu, med.rho);
    const Vec<Dim> pol = to_vec<Dim>(w.polarization);
    return planewave_iso<Dim>(w.kind, d, omega, lambda, mu, med.rho, &pol);
  }
  if (m.kind != MaterialKind::Vti) throw ConfigError("config: qP and sH planewaves need a vti material");
  return planewave_vti<Dim>(w.kind, d, omega, med.c, med.rho);
}

template <int Dim>
GridSpec<Dim> grid_spec(const GridConfig& g, const std::vector<Vec<Dim>>& sources) {
  GridSpec<Dim> s;
  for (int d = 0; d < Dim; ++d) s.n[d] = g.n.at(d);
  s.boundary_margin = g.boundary_margin;
  s.source_margin = g.source_margin;
  s.sources = sources;
  return s;
}

// Solves and fills the status fields; solver and assembly failures become failed rows.
template <int Dim>
void solve_into(const Problem<Dim>& p, int threads, RunResult& r,
                const std::function<void(const Solution<Dim>&)>& post) {
  SolveOptions opt;
  opt.threads = threads;
  try {
    const Solution<Dim> sol = solve(p, opt);
    r.stats = sol.stats;
    r.ok = true;
    post(sol);
  } catch (const SolverError& e) {
    r.ok = false;
    r.message = e.what();
  } catch (const AssemblyError& e) {
    r.ok = false;
    r.message = e.what();
  }
}

template <int Dim>
std::vector<double> density_at(const MaterialField<Dim>& field, const Mesh<Dim>& mesh,
                               const PointLocator<Dim>& loc, const std::vector<Vec<Dim>>& pts) {
  std::vector<double> rho;
  rho.reserve(pts.size());
  for (const auto& x : pts) {
    const int e = loc.locate(x);
    if (e < 0) throw InputError("density sample outside the mesh");
    const Vec<Dim> xi = mesh.jacobian(e).inverse() * (x - mesh.vertex(mesh.element(e)[0]));
    rho.push_back(eval_material<Dim>(field, e, xi.cwiseMax(0.0)).rho);
  }
  return rho;
}

template <int Dim>
void dump_run(const ExperimentConfig& cfg, const RunResult& r, const Solution<Dim>& sol,
              const Samples<Dim>* samples, const MaterialField<Dim>* field) {
  const std::string base = cfg.output_dir + "/" + file_label(r);
  if (cfg.dump_solution) write_solution<Dim>(sol, base + "_solution.csv");
  if (cfg.dump_samples && samples) {
    write_samples_csv<Dim>(*samples, base + "_samples.csv");
    if (field) {
      const PointLocator<Dim> loc(*sol.mesh);
      write_samples_csv<Dim>(sqrt_rho_scaling<Dim>(*samples, density_at<Dim>(*field, *sol.mesh, loc, samples->points)),
                             base + "_samples_scaled.csv");
    }
  }
}

template <int Dim>
RunResult base_row(const ExperimentConfig& cfg, const std::string& mesh, int n_elements,
                   const std::string& wave, const StabilizationSpec& stab, double f, int order,
                   int material_order) {
  RunResult r;
  r.experiment = to_string(cfg.kind);
  r.dim = Dim;
  r.mesh = mesh;
  r.n_elements = n_elements;
  r.wave = wave;
  r.stab = stab;
  r.frequency = f;
  r.order = order;
  r.material_order = material_order;
  return r;
}

struct MeshBundle2 {};

template <int Dim>
struct PlanewaveSetup {
  Mesh<Dim> mesh;
  MaterialField<Dim> field;
  std::string label;
  std::vector<Vec<Dim>> points;
  std::unique_ptr<PointLocator<Dim>> locator;
};

template <int Dim>
std::vector<std::unique_ptr<PlanewaveSetup<Dim>>> planewave_setups(const ExperimentConfig& cfg) {
  std::vector<std::unique_ptr<PlanewaveSetup<Dim>>> out;
  for (int i = 0; i < mesh_count(cfg.mesh); ++i) {
    auto s = std::make_unique<PlanewaveSetup<Dim>>();
    s->mesh = build_mesh<Dim>(cfg.mesh, i);
    s->field = build_material_field<Dim>(cfg.material, s->mesh);
    s->label = mesh_label<Dim>(cfg.mesh, i);
    s->points = error_grid<Dim>(s->mesh, grid_spec<Dim>(cfg.grid, {}));
    if (s->points.empty()) throw ConfigError("config: the error grid is empty after exclusions");
    s->locator = std::make_unique<PointLocator<Dim>>(s->mesh);
    out.push_back(std::move(s));
  }
  return out;
}

template <int Dim>
RunResult planewave_run(const ExperimentConfig& cfg, const PlanewaveSetup<Dim>& setup,
                        const WaveConfig& wc, const StabilizationSpec& stab, double f, int order,
                        int threads) {
  const double omega = kTwoPi * f;
  const Planewave<Dim> pw = make_planewave<Dim>(wc, cfg.material, omega);
  RunResult r = base_row<Dim>(cfg, setup.label, setup.mesh.num_elements(), to_string(wc.kind), stab, f,
                              order, 0);
  Problem<Dim> p;
  p.mesh = &setup.mesh;
  p.material = &setup.field;
  p.stab = stab;
  p.stab.omega = omega;
  p.order = order;
  p.dirichlet = [&pw](const Vec<Dim>& x) { return pw.u(x); };
  solve_into<Dim>(p, threads, r, [&](const Solution<Dim>& sol) {
    const Samples<Dim> sim = eval_solution<Dim>(sol, *setup.locator, setup.points);
    const Samples<Dim> ref = eval_planewave<Dim>(pw, setup.points);
    r.error = relative_errors<Dim>(ref, sim);
    r.has_error = true;
    dump_run<Dim>(cfg, r, sol, &sim, nullptr);
  });
  return r;
}

template <int Dim>
std::vector<RunResult> planewave_impl(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setups = planewave_setups<Dim>(cfg);
  std::vector<std::function<RunResult(int)>> tasks;
  for (const auto& setup : setups)
    for (const WaveConfig& wc : cfg.waves)
      for (double f : wc.frequencies.empty() ? cfg.frequencies : wc.frequencies)
        for (int k : cfg.orders)
          for (const StabilizationSpec& s : cfg.stabilizations)
            tasks.push_back([&, f, k](int threads) {
              return planewave_run<Dim>(cfg, *setup, wc, s, f, k, threads);
            });
  log << "planewave: " << tasks.size() << " runs\n";
  return run_tasks(tasks, cfg.threads);
}

template <int Dim>
double sweep_center(const TauSweepConfig& sweep, StabFamily family, const Planewave<Dim>& pw) {
  if (sweep.center > 0.0) return sweep.center;
  switch (family) {
    case StabFamily::IdentityReal:
    case StabFamily::IdentityImag: return pw.rho * pw.speed;
    case StabFamily::KC: return 1.0 / pw.speed;
    case StabFamily::Godunov: return 1.0;
  }
  return 1.0;
}

template <int Dim>
std::vector<RunResult> sweep_impl(const ExperimentConfig& cfg, std::ostream& log, std::vector<SweepBest>* best) {
  const auto setups = planewave_setups<Dim>(cfg);
  std::vector<std::function<RunResult(int)>> tasks;
  for (const auto& setup : setups)
    for (const WaveConfig& wc : cfg.waves)
      for (double f : wc.frequencies.empty() ? cfg.frequencies : wc.frequencies) {
        const Planewave<Dim> pw = make_planewave<Dim>(wc, cfg.material, kTwoPi * f);
        for (int k : cfg.orders)
          for (const SweepFamily& fam : cfg.sweep.families)
            for (double tau : tau_grid(cfg.sweep, sweep_center<Dim>(cfg.sweep, fam.family, pw))) {
              StabilizationSpec s;
              s.family = fam.family;
              s.sign = fam.sign;
              s.tau = tau;
              tasks.push_back([&, s, f, k](int threads) {
                return planewave_run<Dim>(cfg, *setup, wc, s, f, k, threads);
              });
            }
      }
  log << "tau sweep: " << tasks.size() << " runs\n";
  std::vector<RunResult> rows = run_tasks(tasks, cfg.threads);
  if (best) {
    best->clear();
    for (const RunResult& r : rows) {
      auto it = std::find_if(best->begin(), best->end(), [&](const SweepBest& b) {
        return b.wave == r.wave && b.frequency == r.frequency && b.order == r.order &&
               b.family == r.stab.family && b.sign == r.stab.sign;
      });
      if (it == best->end()) {
        SweepBest b;
        b.wave = r.wave;
        b.frequency = r.frequency;
        b.order = r.order;
        b.family = r.stab.family;
        b.sign = r.stab.sign;
        b.total_u = std::numeric_limits<double>::infinity();
        b.total_sigma = std::numeric_limits<double>::infinity();
        best->push_back(b);
        it = best->end() - 1;
      }
      if (!r.ok || !r.has_error || std::isnan(r.error.total_u)) {
        ++it->failed;
        continue;
      }
      if (r.error.total_u < it->total_u) {
        it->total_u = r.error.total_u;
        it->total_sigma = r.error.total_sigma;
        it->tau = r.stab.tau.real();
      }
    }
  }
  return rows;
}

template <int Dim>
struct SourceSetup {
  Mesh<Dim> mesh;
  MaterialField<Dim> field;
  std::string label;
};

template <int Dim>
std::vector<PointSource<Dim>> make_sources(const ExperimentConfig& cfg) {
  std::vector<PointSource<Dim>> out;
  for (const SourceConfig& s : cfg.sources) {
    PointSource<Dim> ps;
    ps.position = to_vec<Dim>(s.position);
    if (!s.polarization.empty()) ps.polarization = to_vec<Dim>(s.polarization);
    ps.amplitude = s.amplitude;
    out.push_back(ps);
  }
  return out;
}

template <int Dim>
std::vector<RunResult> point_source_impl(const ExperimentConfig& cfg, std::ostream& log) {
  const std::vector<PointSource<Dim>> sources = make_sources<Dim>(cfg);
  std::vector<Vec<Dim>> positions;
  for (const auto& s : sources) positions.push_back(s.position);

  std::vector<RunResult> rows;
  for (int i = 0; i < mesh_count(cfg.mesh); ++i) {
    SourceSetup<Dim> test{build_mesh<Dim>(cfg.mesh, i), {}, mesh_label<Dim>(cfg.mesh, i)};
    test.field = build_material_field<Dim>(cfg.material, test.mesh);
    const PointLocator<Dim> loc(test.mesh);
    std::vector<Vec<Dim>> points = error_grid<Dim>(test.mesh, grid_spec<Dim>(cfg.grid, positions));

    std::unique_ptr<SourceSetup<Dim>> ref;
    std::unique_ptr<PointLocator<Dim>> ref_loc;
    if (cfg.reference.enabled) {
      ref = std::make_unique<SourceSetup<Dim>>();
      ref->mesh = build_mesh<Dim>(cfg.reference.mesh, 0);
      ref->field = build_material_field<Dim>(cfg.material, ref->mesh);
      ref->label = mesh_label<Dim>(cfg.reference.mesh, 0);
      ref_loc = std::make_unique<PointLocator<Dim>>(ref->mesh);
      std::vector<Vec<Dim>> kept;
      for (const auto& x : points)
        if (ref_loc->locate(x) >= 0) kept.push_back(x);
      points = std::move(kept);
    }

    for (double f : cfg.frequencies) {
      const double omega = kTwoPi * f;
      Samples<Dim> ref_samples;
      bool have_ref = false;
      if (ref) {
        Problem<Dim> p;
        p.mesh = &ref->mesh;
        p.material = &ref->field;
        p.stab = cfg.reference.stab;
        p.stab.omega = omega;
        p.order = cfg.reference.order;
        p.sources = sources;
        RunResult rr = base_row<Dim>(cfg, ref->label, ref->mesh.num_elements(), "reference",
                                     cfg.reference.stab, f, cfg.reference.order, cfg.material.field_order);
        solve_into<Dim>(p, cfg.threads, rr, [&](const Solution<Dim>& sol) {
          ref_samples = eval_solution<Dim>(sol, *ref_loc, points);
          have_ref = true;
          dump_run<Dim>(cfg, rr, sol, &ref_samples, &ref->field);
        });
        log << "reference f=" << f << ": " << (rr.ok ? "ok" : rr.message) << "\n";
        rows.push_back(rr);
      }
      std::vector<std::function<RunResult(int)>> tasks;
      for (int k : cfg.orders)
        for (const StabilizationSpec& s : cfg.stabilizations)
          tasks.push_back([&, k, s, f, omega](int threads) {
            RunResult r = base_row<Dim>(cfg, test.label, test.mesh.num_elements(), "source", s, f, k,
                                        cfg.material.field_order);
            Problem<Dim> p;
            p.mesh = &test.mesh;
            p.material = &test.field;
            p.stab = s;
            p.stab.omega = omega;
            p.order = k;
            p.sources = sources;
            solve_into<Dim>(p, threads, r, [&](const Solution<Dim>& sol) {
              const Samples<Dim> sim = eval_solution<Dim>(sol, loc, points);
              if (have_ref) {
                r.error = relative_errors<Dim>(ref_samples, sim);
                r.has_error = true;
              }
              dump_run<Dim>(cfg, r, sol, &sim, &test.field);
            });
            return r;
          });
      log << "point source f=" << f << ": " << tasks.size() << " runs\n";
      for (RunResult& r : run_tasks(tasks, cfg.threads)) rows.push_back(std::move(r));
    }
  }
  return rows;
}

template <int Dim>
std::vector<GodunovCheck> godunov_impl(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<GodunovCheck> out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < cfg.materials.size(); ++i) {
    const MaterialSpec& spec = cfg.materials[i];
    GodunovCheck g;
    g.material = to_string(spec.kind) + std::to_string(i);
    g.normals = cfg.normals;
    try {
      const Medium<Dim> med = homogeneous_medium<Dim>(spec);
      for (int t = 0; t < cfg.normals; ++t) {
        Vec<Dim> nu;
        for (int d = 0; d < Dim; ++d) nu(d) = normal(rng);
        nu.normalize();
        const Wavespeeds<Dim> ws = wavespeeds<Dim>(med.c, med.rho, nu);
        if (!distinct_speeds<Dim>(ws)) {
          ++g.skipped;
          continue;
        }
        Mat<Dim> closed;
        if constexpr (Dim == 3)
          closed = godunov_aniso(med.rho, kc_matrix<3>(med.c, nu), ws);
        else
          closed = godunov_spectral<Dim>(ws);
        const Mat<Dim> oracle = oracle_godunov_matrix<Dim>(med, nu);
        g.max_relative = std::max(g.max_relative, (closed - oracle).norm() / closed.norm());
        Eigen::SelfAdjointEigenSolver<Mat<Dim>> es(closed);
        Vec<Dim> expect = med.rho * ws.c;
        std::sort(expect.data(), expect.data() + Dim);
        g.max_eigen_error = std::max(g.max_eigen_error,
                                     (es.eigenvalues() - expect).cwiseAbs().maxCoeff() / expect.maxCoeff());
      }
      if (g.skipped == g.normals) {
        g.status = "skipped";
        g.reason = "near-degenerate wavespeeds for every sampled normal";
      } else {
        g.status = g.max_relative <= 1e-10 && g.max_eigen_error <= 1e-10 ? "ok" : "failed";
        if (g.skipped > 0) g.reason = std::to_string(g.skipped) + " normals skipped: near-degenerate wavespeeds";
      }
    } catch (const OracleError& e) {
      g.status = "failed";
      g.reason = e.what();
    } catch (const ParameterError& e) {
      g.status = "failed";
      g.reason = e.what();
    }
    log << g.material << ": " << g.status << " max relative " << g.max_relative << "\n";
    out.push_back(g);
  }
  return out;
}

void write_summary_csv(const std::vector<SweepBest>& best, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "wave,frequency,order,family,sign,best_tau,best_total_u,best_total_sigma,failed\n";
  for (const SweepBest& b : best)
    os << b.wave << "," << num(b.frequency) << "," << b.order << "," << to_string(b.family) << ","
       << (b.sign == StabSign::Plus ? "+" : "-") << "," << num(b.tau) << "," << num(b.total_u) << ","
       << num(b.total_sigma) << "," << b.failed << "\n";
}

template <int Dim>
void write_reference_lines(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "wave,quantity,value\n";
  const Medium<Dim> med = homogeneous_medium<Dim>(cfg.material);
  for (const WaveConfig& wc : cfg.waves) {
    Vec<Dim> d = to_vec<Dim>(wc.direction).normalized();
    const Wavespeeds<Dim> ws = wavespeeds<Dim>(med.c, med.rho, d);
    const std::string w = to_string(wc.kind);
    os << w << ",rho_cp," << num(med.rho * ws.qp()) << "\n";
    os << w << ",rho_cs," << num(med.rho * ws.qs_min()) << "\n";
    os << w << ",inv_cp," << num(1.0 / ws.qp()) << "\n";
    os << w << ",inv_cs," << num(1.0 / ws.qs_min()) << "\n";
  }
}

void write_godunov_csv(const std::vector<GodunovCheck>& checks, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "material,normals,skipped,max_relative,max_eigen_error,status,reason\n";
  for (const GodunovCheck& g : checks)
    os << g.material << "," << g.normals << "," << g.skipped << "," << num(g.max_relative) << ","
       << num(g.max_eigen_error) << "," << g.status << ",\"" << g.reason << "\"\n";
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::vector<double> tau_grid(const TauSweepConfig& sweep, double center) {
  if (sweep.points < 1) throw ConfigError("config: tau grid is empty");
  std::vector<double> out;
  for (int i = 0; i < sweep.points; ++i) {
    const double t = sweep.points == 1 ? 0.0 : sweep.decades * (static_cast<double>(i) / (sweep.points - 1) - 0.5);
    out.push_back(center * std::pow(10.0, t));
  }
  return out;
}

void write_results_csv(const std::vector<RunResult>& runs, int dim, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  const std::string a = axes(dim);
  const auto sv = voigt_names(dim);
  os << "experiment,dim,mesh,n_elements,wave,family,sign,tau_re,tau_im,tau_auto,frequency,order,"
        "material_order,status,n_points";
  for (int i = 0; i < dim; ++i) os << ",E_u" << a[i];
  for (const auto& n : sv) os << ",E_s" << n;
  os << ",total_u,total_sigma,global_residual,max_local_residual,traction_jump,message\n";
  for (const RunResult& r : runs) {
    os << r.experiment << "," << r.dim << "," << r.mesh << "," << r.n_elements << "," << r.wave << ","
       << to_string(r.stab.family) << "," << (r.stab.sign == StabSign::Plus ? "+" : "-") << ","
       << num(r.stab.tau.real()) << "," << num(r.stab.tau.imag()) << "," << (r.stab.tau_auto ? 1 : 0) << ","
       << num(r.frequency) << "," << r.order << "," << r.material_order << "," << (r.ok ? "ok" : "failed")
       << "," << (r.has_error ? r.error.n_points : 0);
    const std::size_t nu = dim, ns = sv.size();
    for (std::size_t i = 0; i < nu; ++i)
      os << "," << (r.has_error && i < r.error.e_u.size() ? num(r.error.e_u[i]) : "");
    for (std::size_t i = 0; i < ns; ++i)
      os << "," << (r.has_error && i < r.error.e_sigma.size() ? num(r.error.e_sigma[i]) : "");
    if (r.has_error)
      os << "," << num(r.error.total_u) << "," << num(r.error.total_sigma);
    else
      os << ",,";
    if (r.ok)
      os << "," << num(r.stats.global_residual) << "," << num(r.stats.max_local_residual) << ","
         << num(r.stats.traction_jump_projected);
    else
      os << ",,,";
    os << "," << csv_quote(r.message) << "\n";
  }
}

template <int Dim>
Mesh<Dim> build_mesh(const MeshConfig& cfg, int n_index) {
  Mesh<Dim> mesh;
  if (cfg.kind == "box") {
    mesh = generate_box<Dim>(to_vec<Dim>(cfg.lo), to_vec<Dim>(cfg.hi), cfg.n.at(n_index));
  } else if (cfg.kind == "disk") {
    if constexpr (Dim == 2)
      mesh = generate_disk(cfg.radius, cfg.layers, cfg.ratio);
    else
      throw ConfigError("config: disk meshes are 2D");
  } else {
    AnyMesh any = read_mesh(cfg.path);
    if (!std::holds_alternative<Mesh<Dim>>(any))
      throw ConfigError("config: mesh file dimension does not match 'dim'");
    mesh = std::get<Mesh<Dim>>(std::move(any));
  }
  if (cfg.boundary_tag) {
    const BoundaryTag t = parse_tag(cfg.boundary_tag);
    for (int k = 0; k < mesh.num_faces(); ++k)
      if (mesh.face(k).is_boundary()) mesh.set_tag(k, t);
  }
  return mesh;
}

template <int Dim>
void write_solution(const Solution<Dim>& sol, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  const Mesh<Dim>& mesh = *sol.mesh;
  const auto& ref = *sol.ref;
  const int m = ref.m();
  const std::string a = axes(Dim);
  os << "# order " << sol.order << "\n# dim " << Dim << "\n# mesh_checksum " << mesh.checksum() << "\n";
  os << "element,node," << (Dim == 2 ? "x,z" : "x,y,z");
  for (int i = 0; i < Dim; ++i) os << ",re_u" << a[i] << ",im_u" << a[i];
  for (const auto& n : voigt_names(Dim)) os << ",re_s" << n << ",im_s" << n;
  os << "\n" << std::setprecision(17);
  const auto& nodes = ref.vol.nodes();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat<Dim> jac = mesh.jacobian(e);
    const Vec<Dim> x0 = mesh.vertex(mesh.element(e)[0]);
    const VectorXc& w = sol.w[e];
    for (int j = 0; j < m; ++j) {
      const Vec<Dim> x = x0 + jac * nodes.col(j);
      os << e << "," << j;
      for (int d = 0; d < Dim; ++d) os << "," << x(d);
      for (int c = 0; c < Dim + kVoigt<Dim>; ++c) os << "," << w(c * m + j).real() << "," << w(c * m + j).imag();
      os << "\n";
    }
  }
  os << "# trace " << sol.lambda.size() << "\n";
  for (Eigen::Index i = 0; i < sol.lambda.size(); ++i)
    os << i << "," << sol.lambda(i).real() << "," << sol.lambda(i).imag() << "\n";
}

std::vector<RunResult> run_planewave(const ExperimentConfig& cfg, std::ostream& log) {
  return cfg.dim == 2 ? planewave_impl<2>(cfg, log) : planewave_impl<3>(cfg, log);
}

std::vector<RunResult> run_tau_sweep(const ExperimentConfig& cfg, std::ostream& log, std::vector<SweepBest>* best) {
  return cfg.dim == 2 ? sweep_impl<2>(cfg, log, best) : sweep_impl<3>(cfg, log, best);
}

std::vector<RunResult> run_point_source(const ExperimentConfig& cfg, std::ostream& log) {
  return cfg.dim == 2 ? point_source_impl<2>(cfg, log) : point_source_impl<3>(cfg, log);
}

std::vector<GodunovCheck> verify_godunov(const ExperimentConfig& cfg, std::ostream& log) {
  return cfg.dim == 2 ? godunov_impl<2>(cfg, log) : godunov_impl<3>(cfg, log);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir + ": " + ec.message());

  std::vector<std::string> files;
  int runs = 0, failed = 0;
  auto count = [&](const std::vector<RunResult>& rows) {
    runs += static_cast<int>(rows.size());
    for (const auto& r : rows) failed += r.ok ? 0 : 1;
  };
  switch (cfg.kind) {
    case ExperimentKind::Planewave: {
      const auto rows = run_planewave(cfg, log);
      count(rows);
      write_results_csv(rows, cfg.dim, cfg.output_dir + "/results.csv");
      files.push_back("results.csv");
      break;
    }
    case ExperimentKind::TauSweep: {
      std::vector<SweepBest> best;
      const auto rows = run_tau_sweep(cfg, log, &best);
      count(rows);
      write_results_csv(rows, cfg.dim, cfg.output_dir + "/sweep.csv");
      write_summary_csv(best, cfg.output_dir + "/summary.csv");
      if (cfg.dim == 2)
        write_reference_lines<2>(cfg, cfg.output_dir + "/reference_lines.csv");
      else
        write_reference_lines<3>(cfg, cfg.output_dir + "/reference_lines.csv");
      files.insert(files.end(), {"sweep.csv", "summary.csv", "reference_lines.csv"});
      break;
    }
    case ExperimentKind::PointSource:
    case ExperimentKind::SelfConvergence: {
      const auto rows = run_point_source(cfg, log);
      count(rows);
      write_results_csv(rows, cfg.dim, cfg.output_dir + "/results.csv");
      files.push_back("results.csv");
      break;
    }
    case ExperimentKind::VerifyGodunov: {
      const auto checks = verify_godunov(cfg, log);
      runs = static_cast<int>(checks.size());
      for (const auto& g : checks) failed += g.status == "failed" ? 1 : 0;
      write_godunov_csv(checks, cfg.output_dir + "/godunov.csv");
      files.push_back("godunov.csv");
      break;
    }
  }

  nlohmann::ordered_json manifest;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(cfg.source_text)));
  manifest["experiment"] = to_string(cfg.kind);
  manifest["name"] = cfg.name;
  manifest["config_hash_fnv1a64"] = hash;
  manifest["ehdg_version"] = EHDG_VERSION;
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                              "." + std::to_string(EIGEN_MINOR_VERSION);
#ifdef EHDG_HAVE_UMFPACK
  manifest["global_solver"] = "umfpack";
#else
  manifest["global_solver"] = "eigen_sparse_lu";
#endif
  manifest["runs"] = runs;
  manifest["failed"] = failed;
  manifest["files"] = files;
  std::ofstream os(cfg.output_dir + "/manifest.json");
  if (!os) throw ConfigError("cannot write manifest in " + cfg.output_dir);
  os << manifest.dump(2) << "\n";
  log << runs << " runs, " << failed << " failed; outputs in " << cfg.output_dir << "\n";
  return 0;
}

#define EHDG_INSTANTIATE(D)                                                  \
  template Mesh<D> build_mesh<D>(const MeshConfig&, int);                    \
  template void write_solution<D>(const Solution<D>&, const std::string&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
