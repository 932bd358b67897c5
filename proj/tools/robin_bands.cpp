// robin-bands: alpha sweeps, the two-band verdict, block checks and oracles.
//
// Exit status: 0 pass, 1 verdict fail, 2 usage or config error, 3 solver error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "robin/error.hpp"
#include "robin/geometry.hpp"
#include "robin/harness.hpp"
#include "robin/mesh.hpp"
#include "robin/oracles.hpp"

namespace {

using namespace robin;
namespace h = robin::harness;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kSolver = 3;

struct MeshFlags {
  double resolution = 1.0;
  int refine = 0;
  double first_layer = 0.0;

  void add(CLI::App* app) {
    app->add_option("--resolution", resolution, "Scale all target mesh spacings (0.5 halves them)")
        ->check(CLI::PositiveNumber);
    app->add_option("--refine", refine, "Uniform refinements after generation")->check(CLI::NonNegativeNumber);
    app->add_option("--first-layer", first_layer, "Override the top layer thickness")
        ->check(CLI::NonNegativeNumber);
  }
  h::MeshOverrides overrides() const {
    h::MeshOverrides o;
    o.resolution = resolution;
    o.refine_levels = refine;
    if (first_layer > 0.0) o.first_layer = first_layer;
    return o;
  }
};

std::string fmt(double v) { return h::format_double(v); }

geometry::PlanarDomain single_block(const geometry::ChainSpec& spec, double alpha) {
  const auto& p = spec.block_odd;
  return geometry::build_block(p, 1.0, spec.depth.value_or(h::plateau_depth(p, alpha)));
}

int run_sweep(const std::string& config, const std::string& alphas, int jobs, const std::string& out_path,
              bool robin_all, const MeshFlags& mesh) {
  h::SweepOptions opt;
  opt.jobs = jobs;
  opt.mesh = mesh.overrides();
  if (robin_all) opt.mode.robin_tags = geometry::TagSet::all();
  const auto rows = h::run_alpha_sweep(config, h::parse_double_list(alphas), opt);
  if (out_path.empty()) {
    h::write_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'", 0);
    h::write_csv(out, rows);
  }
  bool failed = false;
  for (const auto& r : rows) {
    if (!r.ok) {
      std::cerr << "alpha " << fmt(r.alpha) << ": " << r.error << '\n';
      failed = true;
    }
  }
  return failed ? kSolver : kPass;
}

int run_bands(const std::string& in_path, const std::string& prime, const std::string& dprime,
              const std::string& assign, double min_sep) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot open '" + in_path + "'", 0);
  const auto rows = h::read_csv(in);
  const auto report =
      h::check_bands(rows, h::parse_interval(prime), h::parse_interval(dprime), h::parse_assignment(assign), min_sep);
  h::print_report(std::cout, report);
  return report.pass ? kPass : kFail;
}

int run_verify_scaling(const std::string& config, double alpha, double t, const MeshFlags& mesh) {
  const auto spec = geometry::load_chain_spec(config);
  const auto domain = single_block(spec, alpha);
  const auto r = h::verify_scaling(domain, alpha, t, {}, mesh.overrides());
  std::cout << "E(t alpha, c)   = " << fmt(r.e_base) << "\n"
            << "t^2 E(alpha, tc) = " << fmt(t * t * r.e_scaled) << "\n"
            << "deviation       = " << fmt(r.deviation) << "\n";
  return r.deviation <= 1e-10 ? kPass : kFail;
}

int run_verify_bracketing(const std::string& config, const std::string& alphas, const MeshFlags& mesh) {
  const auto spec = geometry::load_chain_spec(config);
  bool all = true;
  std::cout << "alpha,E_neumann,E_dirichlet,ordered\n";
  for (double a : h::parse_double_list(alphas)) {
    const auto r = h::verify_bracketing(single_block(spec, a), a, mesh.overrides());
    std::cout << fmt(a) << ',' << fmt(r.e_neumann) << ',' << fmt(r.e_dirichlet) << ',' << (r.ordered ? "yes" : "NO")
              << '\n';
    all = all && r.ordered;
  }
  return all ? kPass : kFail;
}

int run_verify_plateau(const std::string& config, const std::string& alphas, const std::string& band, int jobs,
                       const MeshFlags& mesh) {
  const auto spec = geometry::load_chain_spec(config);
  const auto rows = h::plateau_study(spec.block_odd, h::parse_double_list(alphas), mesh.overrides(), jobs);
  std::optional<h::Interval> target;
  if (!band.empty()) target = h::parse_interval(band);
  bool pass = true;
  bool solver_failed = false;
  std::cout << "alpha,ratio_neumann,ratio_dirichlet,depth,n_vertices\n";
  for (const auto& r : rows) {
    if (!r.ok) {
      std::cerr << "alpha " << fmt(r.alpha) << ": " << r.error << '\n';
      solver_failed = true;
      continue;
    }
    std::cout << fmt(r.alpha) << ',' << fmt(r.ratio_neumann) << ',' << fmt(r.ratio_dirichlet) << ','
              << fmt(r.depth) << ',' << r.n_vertices << '\n';
    if (target && !target->contains(r.ratio_neumann)) pass = false;
  }
  if (solver_failed) return kSolver;
  return pass ? kPass : kFail;
}

int run_oracle(const std::string& name, const std::vector<double>& args) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw InvalidParameter("oracle '" + name + "': wrong number of arguments");
  };
  double v = 0.0;
  if (name == "halfline") {
    need(2, 2);
    v = oracles::halfline_quotient(args[0], args[1]);
  } else if (name == "interval-rn") {
    need(2, 2);
    v = oracles::interval_robin_neumann(args[0], args[1]);
  } else if (name == "interval-rr") {
    need(2, 2);
    v = oracles::interval_robin_robin(args[0], args[1]);
  } else if (name == "disk") {
    need(2, 2);
    v = oracles::disk_robin(args[0], args[1]);
  } else if (name == "sector") {
    need(3, 3);
    v = oracles::sector_quotient(geometry::deg_to_rad(args[0]), args[1], args[2]);
  } else if (name == "block-trial") {
    need(3, 4);
    const auto p = geometry::SectorBlockParams::with_margin(geometry::deg_to_rad(args[0]), args[1], args[2], args[2]);
    v = oracles::block_trial_quotient(p, args.size() == 4 ? args[3] : -1.0);
  } else {
    throw InvalidParameter("unknown oracle '" + name + "' (halfline, interval-rn, interval-rr, disk, sector, block-trial)");
  }
  std::cout << fmt(v) << '\n';
  return kPass;
}

int run_mesh_dump(const std::string& config, double alpha, const std::string& out_path, const MeshFlags& mesh) {
  const auto domain = geometry::build_chain_domain(geometry::load_chain_spec(config));
  const auto m = h::auto_mesh(domain, alpha, mesh.overrides());
  if (out_path.empty()) {
    mesh::write_mesh(std::cout, m);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write '" + out_path + "'", 0);
    mesh::write_mesh(out, m);
  }
  const auto q = mesh::mesh_quality(m);
  std::cerr << q.n_vertices << " vertices, " << q.n_triangles << " triangles, min angle " << fmt(q.min_angle_deg)
            << " deg\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin eigenvalue bands on chains of mollified sector blocks"};
  app.require_subcommand(1);

  std::string config, alphas, out_path, in_path, prime, dprime, assign, band, oracle_name;
  int jobs = 1;
  bool robin_all = false;
  double min_sep = 0.0, alpha = -1.0, t = 2.0;
  std::vector<double> oracle_args;
  MeshFlags mesh_flags;

  auto* sweep = app.add_subcommand("sweep", "Solve the chain domain for a list of alphas, write CSV");
  sweep->add_option("--config", config, "Domain config file")->required();
  sweep->add_option("--alphas", alphas, "Comma-separated Robin parameters (<= 0)")->required()->allow_extra_args(false);
  sweep->add_option("--jobs", jobs, "Concurrent solves")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "CSV output (default stdout)");
  sweep->add_flag("--robin-all", robin_all, "Robin on the whole boundary instead of the top curve only");
  mesh_flags.add(sweep);

  auto* bands = app.add_subcommand("bands", "Check a sweep table against two bands");
  bands->add_option("--in", in_path, "CSV written by sweep")->required();
  bands->add_option("--band-prime", prime, "I' as lo,hi")->required()->allow_extra_args(false);
  bands->add_option("--band-double", dprime, "I'' as lo,hi")->required()->allow_extra_args(false);
  bands->add_option("--assign", assign, "Comma list of ' or '' per row")->required()->allow_extra_args(false);
  bands->add_option("--min-separation", min_sep, "Required distance between the two clusters");

  auto* verify = app.add_subcommand("verify", "Block-level checks on the first block of a config");
  verify->require_subcommand(1);
  auto* scaling = verify->add_subcommand("scaling", "E(t alpha) = t^2 E(alpha) on a t-scaled mesh");
  scaling->add_option("--config", config)->required();
  scaling->add_option("--alpha", alpha)->allow_extra_args(false);
  scaling->add_option("--t", t)->check(CLI::PositiveNumber);
  mesh_flags.add(scaling);
  auto* bracketing = verify->add_subcommand("bracketing", "Neumann-sided vs Dirichlet-sided eigenvalue");
  bracketing->add_option("--config", config)->required();
  bracketing->add_option("--alphas", alphas)->required()->allow_extra_args(false);
  mesh_flags.add(bracketing);
  auto* plateau = verify->add_subcommand("plateau", "Ratio table for one block, both side conditions");
  plateau->add_option("--config", config)->required();
  plateau->add_option("--alphas", alphas)->required()->allow_extra_args(false);
  plateau->add_option("--band", band, "Optional lo,hi the Neumann ratios must lie in")->allow_extra_args(false);
  plateau->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  mesh_flags.add(plateau);

  auto* oracle = app.add_subcommand("oracle", "Reference values: halfline, interval-rn, interval-rr, disk, sector, block-trial");
  oracle->add_option("name", oracle_name)->required();
  oracle->add_option("args", oracle_args)->allow_extra_args(true);

  auto* mesh_cmd = app.add_subcommand("mesh", "Dump the automatic mesh of a chain config");
  mesh_cmd->add_option("--config", config)->required();
  mesh_cmd->add_option("--alpha", alpha)->allow_extra_args(false);
  mesh_cmd->add_option("--out", out_path);
  mesh_flags.add(mesh_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*sweep) return run_sweep(config, alphas, jobs, out_path, robin_all, mesh_flags);
    if (*bands) return run_bands(in_path, prime, dprime, assign, min_sep);
    if (*scaling) return run_verify_scaling(config, alpha, t, mesh_flags);
    if (*bracketing) return run_verify_bracketing(config, alphas, mesh_flags);
    if (*plateau) return run_verify_plateau(config, alphas, band, jobs, mesh_flags);
    if (*oracle) return run_oracle(oracle_name, oracle_args);
    if (*mesh_cmd) return run_mesh_dump(config, alpha, out_path, mesh_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const UnknownTag& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}
