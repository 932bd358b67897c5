// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "robin/fem.hpp"
#include "robin/geometry.hpp"
#include "robin/harness.hpp"
#include "robin/mesh.hpp"
#include "robin/oracles.hpp"

using namespace robin;
using geometry::kPi;
using geometry::SectorBlockParams;

#ifndef ROBIN_CONFIG_DIR
#define ROBIN_CONFIG_DIR "configs"
#endif

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

mesh::TriangleMesh unit_square(int n) {
  const geometry::PlanarDomain d(0, 1, {}, {geometry::ProfileSegment{0, 1, nullptr, 1.0, 0.0}}, 1.0);
  mesh::MeshPolicy p;
  p.nx = n;
  p.ny = n;
  p.grading_ratio = 1.0 + 1e-12;
  p.first_layer = 10.0;
  return mesh::generate_mapped_mesh(d, p);
}

fem::BoundaryConditionMode robin_everywhere() {
  fem::BoundaryConditionMode m;
  m.robin_tags = geometry::TagSet::all();
  return m;
}

Outcome rectangle() {
  const double exact = 2.0 * oracles::interval_robin_robin(1.0, -1.0);
  auto m = unit_square(8);
  std::vector<double> err;
  for (int level = 0; level <= 3; ++level) {
    if (level > 0) m = mesh::refine_uniform(m);
    const double e = fem::solve_on_mesh(m, robin_everywhere(), -1.0, 1.0).eigen.lambda;
    err.push_back(std::abs(e - exact) / std::abs(exact));
  }
  double min_order = 1e300;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) min_order = std::min(min_order, std::log2(err[i] / err[i + 1]));
  Outcome o;
  o.pass = err.back() <= 1e-3 && min_order >= 1.8;
  o.detail = "rel err " + fmt("%.3e", err.back()) + " after 3 refinements, min order " + fmt("%.3f", min_order);
  return o;
}

Outcome disk() {
  const double exact = oracles::disk_robin(1.0, -1.0);
  std::vector<double> err;
  for (int rings : {8, 16, 32}) {
    const auto m = mesh::generate_polygon_disk_mesh(1.0, 256, rings);
    const double e = fem::solve_on_mesh(m, {}, -1.0, 1.0).eigen.lambda;
    err.push_back(std::abs(e - exact) / std::abs(exact));
  }
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) decreasing = decreasing && err[i + 1] < err[i];
  Outcome o;
  o.pass = err.back() <= 1e-2 && decreasing;
  o.detail = "rel err " + fmt("%.3e", err[0]) + " -> " + fmt("%.3e", err[1]) + " -> " + fmt("%.3e", err[2]);
  return o;
}

Outcome identities() {
  harness::MeshOverrides coarse;
  coarse.resolution = 2.0;
  double worst_scaling = 0.0;
  const auto base = geometry::build_block({kPi / 6, 1.0, 0.1, 1.2}, 1.0, 1.5);
  for (double t : {2.0, 0.25}) {
    worst_scaling = std::max(worst_scaling, harness::verify_scaling(base, -1.5, t, {}, coarse).deviation);
  }
  const std::vector<SectorBlockParams> blocks{
      SectorBlockParams::with_margin(kPi / 6, 1.0, 0.1, 0.5), SectorBlockParams::with_margin(kPi / 4, 1.0, 0.1, 0.5),
      SectorBlockParams::with_margin(kPi / 3, 1.0, 0.2, 0.5), SectorBlockParams::with_margin(kPi / 6, 2.0, 0.3, 1.0),
      SectorBlockParams::with_margin(kPi / 5, 0.5, 0.05, 0.25)};
  int violations = 0;
  for (const auto& p : blocks) {
    for (double a : {-0.5, -1.0, -3.0}) {
      const auto d = geometry::build_block(p, 1.0, p.L + 1.0);
      if (!harness::verify_bracketing(d, a, coarse).ordered) ++violations;
    }
  }
  const double zero =
      harness::solve_row(base, 0.0, harness::SweepOptions{coarse, {}, {}, 1}).lambda;
  Outcome o;
  o.pass = worst_scaling <= 1e-10 && violations == 0 && std::abs(zero) <= 1e-10;
  o.detail = "scaling dev " + fmt("%.2e", worst_scaling) + ", bracketing violations " + std::to_string(violations) +
             "/15, E(0) = " + fmt("%.1e", zero);
  return o;
}

double block_ratio(const SectorBlockParams& p, double alpha, double resolution) {
  harness::SweepOptions opt;
  opt.mesh.resolution = resolution;
  const auto d = geometry::build_block(p, 1.0, harness::plateau_depth(p, alpha));
  const auto r = harness::solve_row(d, alpha, opt);
  if (!r.ok) throw std::runtime_error("block solve failed: " + r.error);
  return r.ratio;
}

Outcome sector_plateau() {
  const auto p = SectorBlockParams::with_margin(kPi / 6, 12.0, 0.05, 2.0);
  const double coarse = block_ratio(p, -1.0, 0.125);
  const double r = block_ratio(p, -1.0, 0.0625);
  Outcome o;
  o.pass = r >= -4.05 && r <= -3.6;
  o.detail = "E/alpha^2 = " + fmt("%.5f", r) + " (coarser mesh " + fmt("%.5f", coarse) + "), band [-4.05, -3.6]";
  return o;
}

Outcome background_plateaus() {
  const double weak = block_ratio(SectorBlockParams::with_margin(kPi / 6, 12.0, 0.05, 2.0), -0.05, 1.0);
  const double strong = block_ratio(SectorBlockParams::with_margin(kPi / 6, 12.0, 0.5, 2.0), -40.0, 0.5);
  auto in = [](double r) { return r >= -1.35 && r <= -0.9; };
  Outcome o;
  o.pass = in(weak) && in(strong);
  o.detail = "alpha -0.05: " + fmt("%.4f", weak) + (in(weak) ? " in" : " OUT") + ", alpha -40 (eps 0.5): " +
             fmt("%.4f", strong) + (in(strong) ? " in" : " OUT") + ", band [-1.35, -0.9]";
  return o;
}

Outcome two_bands() {
  harness::SweepOptions opt;
  opt.mesh.resolution = 0.25;
  const auto rows = harness::run_alpha_sweep(std::string(ROBIN_CONFIG_DIR) + "/headline.cfg", {-1.0, -32.0}, opt);
  const auto rep = harness::check_bands(rows, {-4.3, -3.3}, {-1.6, -1.05},
                                        {harness::Band::Prime, harness::Band::DoublePrime}, 1.5);
  Outcome o;
  o.pass = rep.pass;
  o.detail = "ratios " + fmt("%.4f", rows[0].ratio) + " (I' [-4.3, -3.3]), " + fmt("%.4f", rows[1].ratio) +
             " (I'' [-1.6, -1.05]), separation " + fmt("%.3f", rep.separation);
  return o;
}

Outcome properties() {
  mesh::MeshPolicy p;
  p.nx = 48;
  p.ny = 8;
  p.first_layer = 0.05;
  struct Dom {
    mesh::TriangleMesh m;
    double lip;
    double depth;
  };
  const geometry::PlanarDomain box(-1, 2, {}, {geometry::ProfileSegment{-1, 2, nullptr, 1.0, 0.0}}, 1.0);
  const SectorBlockParams b6{kPi / 6, 1.0, 0.1, 1.2}, b3{kPi / 3, 1.0, 0.2, 2.0};
  const std::vector<Dom> doms{{mesh::generate_mapped_mesh(box, p), 0.0, 1.0},
                              {mesh::generate_mapped_mesh(geometry::build_block(b6, 1.0, 1.5), p), b6.cot_theta(), 1.5},
                              {mesh::generate_mapped_mesh(geometry::build_block(b3, 1.0, 1.0), p), b3.cot_theta(), 1.0}};
  const std::vector<double> alphas{-4.0, -3.5, -3.0, -2.5, -2.0, -1.5, -1.0, -0.5};
  int mono = 0, conc = 0, nested = 0, lower = 0, profile = 0, solves = 0;
  for (const auto& d : doms) {
    std::vector<double> e;
    for (double a : alphas) {
      e.push_back(fem::solve_on_mesh(d.m, {}, a, d.lip).eigen.lambda);
      ++solves;
      if (e.back() < oracles::slicing_lower_bound(d.depth, a, d.lip) - 1e-8) ++lower;
    }
    for (std::size_t i = 0; i + 1 < e.size(); ++i) mono += e[i] > e[i + 1];
    for (std::size_t i = 1; i + 1 < e.size(); ++i) conc += e[i] < 0.5 * (e[i - 1] + e[i + 1]) - 1e-9 * std::abs(e[i]);
    const auto fine = mesh::refine_uniform(d.m);
    for (double a : {-0.5, -2.0}) {
      const double ec = fem::solve_on_mesh(d.m, {}, a, d.lip).eigen.lambda;
      const double ef = fem::solve_on_mesh(fine, {}, a, d.lip).eigen.lambda;
      solves += 2;
      nested += ef > ec + 1e-10 * std::abs(ec);
      lower += ef < oracles::slicing_lower_bound(d.depth, a, d.lip) - 1e-8;
    }
  }
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> theta_d(0.15, 1.4), len_d(0.5, 4.0), frac_d(0.02, 0.3), margin_d(0.1, 2.0),
      u(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const double theta = theta_d(rng), L = len_d(rng);
    const double a = L * std::tan(theta);
    const double eps = frac_d(rng) * std::min(a, 1.0);
    const auto params = SectorBlockParams::with_margin(theta, L, eps, eps + margin_d(rng));
    const auto prof = geometry::mollified_profile(params);
    const double x = u(rng) * params.M;
    if (std::abs(prof->slope(x)) > params.cot_theta() * (1 + 1e-12)) ++profile;
    const bool in_zone = std::abs(x) < eps || std::abs(std::abs(x) - a) < eps;
    const double tent = geometry::tent_profile(theta, L, x);
    if (!in_zone && std::abs(prof->value(x) - tent) > 1e-13 * std::max(1.0, std::abs(tent))) ++profile;
  }
  const int total = mono + conc + nested + lower + profile;
  Outcome o;
  o.pass = total == 0;
  o.detail = "violations: monotone " + std::to_string(mono) + ", concave " + std::to_string(conc) + ", nested " +
             std::to_string(nested) + ", lower bound " + std::to_string(lower) + " (" + std::to_string(solves) +
             " solves), profile " + std::to_string(profile) + "/200";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"rectangle oracle", rectangle},        {"disk oracle", disk},
      {"exact identities", identities},       {"sector plateau", sector_plateau},
      {"background plateaus", background_plateaus}, {"two-band demonstration", two_bands},
      {"property suites", properties}};
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
