#include <doctest.h>

#include <cmath>
#include <random>

#include "robin/fem.hpp"
#include "robin/geometry.hpp"
#include "robin/harness.hpp"
#include "robin/mesh.hpp"
#include "robin/oracles.hpp"

using namespace robin;
using geometry::kPi;

namespace {

struct Case {
  const char* name;
  mesh::TriangleMesh mesh;
  double lip;
  double depth;
};

std::vector<Case> cases() {
  std::vector<Case> out;
  mesh::MeshPolicy p;
  p.nx = 48;
  p.ny = 8;
  p.first_layer = 0.05;
  const geometry::PlanarDomain box(-1, 2, {}, {geometry::ProfileSegment{-1, 2, nullptr, 1.0, 0.0}}, 1.0);
  out.push_back({"box", mesh::generate_mapped_mesh(box, p), 0.0, 1.0});
  const geometry::SectorBlockParams b6{kPi / 6, 1.0, 0.1, 1.2};
  out.push_back({"block30", mesh::generate_mapped_mesh(geometry::build_block(b6, 1.0, 1.5), p), b6.cot_theta(), 1.5});
  const geometry::SectorBlockParams b3{kPi / 3, 1.0, 0.2, 2.0};
  out.push_back({"block60", mesh::generate_mapped_mesh(geometry::build_block(b3, 1.0, 1.0), p), b3.cot_theta(), 1.0});
  return out;
}

}  // namespace

TEST_CASE("eigenvalue is nondecreasing and concave in alpha on a fixed mesh") {
  const std::vector<double> alphas{-4.0, -3.5, -3.0, -2.5, -2.0, -1.5, -1.0, -0.5};
  for (const auto& c : cases()) {
    CAPTURE(c.name);
    std::vector<double> e;
    for (double a : alphas) e.push_back(fem::solve_on_mesh(c.mesh, {}, a, c.lip).eigen.lambda);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i] <= e[i + 1]);
    for (std::size_t i = 1; i + 1 < e.size(); ++i) CHECK(e[i] >= 0.5 * (e[i - 1] + e[i + 1]) - 1e-9 * std::abs(e[i]));
  }
}

TEST_CASE("nested refinement lowers the eigenvalue") {
  for (const auto& c : cases()) {
    CAPTURE(c.name);
    const auto fine = mesh::refine_uniform(c.mesh);
    for (double a : {0.5 * -1.0, -2.0}) {
      const double coarse_e = fem::solve_on_mesh(c.mesh, {}, a, c.lip).eigen.lambda;
      const double fine_e = fem::solve_on_mesh(fine, {}, a, c.lip).eigen.lambda;
      CHECK(fine_e <= coarse_e + 1e-10 * std::abs(coarse_e));
    }
  }
}

TEST_CASE("slicing lower bound and formula shift") {
  fem::SolveOptions strict;
  strict.strict_shift = true;
  for (const auto& c : cases()) {
    CAPTURE(c.name);
    for (double a : {-0.5, -2.0, -6.0}) {
      const auto r = fem::solve_on_mesh(c.mesh, {}, a, c.lip, strict);
      CHECK(r.eigen.lambda >= oracles::slicing_lower_bound(c.depth, a, c.lip) - 1e-8);
      CHECK(r.eigen.lambda > fem::default_shift(a, c.lip));
    }
  }
}

TEST_CASE("random profile samples") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> theta_d(0.15, 1.4), len_d(0.5, 4.0), frac_d(0.02, 0.3),
      margin_d(0.1, 2.0), u(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const double theta = theta_d(rng);
    const double L = len_d(rng);
    const double a = L * std::tan(theta);
    const double eps = frac_d(rng) * std::min(a, 1.0);
    const auto params = geometry::SectorBlockParams::with_margin(theta, L, eps, eps + margin_d(rng));
    const auto prof = geometry::mollified_profile(params);
    const double x = u(rng) * params.M;
    CAPTURE(theta);
    CAPTURE(L);
    CAPTURE(eps);
    CAPTURE(x);
    CHECK(std::abs(prof->slope(x)) <= params.cot_theta() * (1 + 1e-12));
    CHECK(prof->value(x) >= -1e-14);
    CHECK(prof->value(x) <= L + 1e-12);
    const bool in_zone = std::abs(x) < eps || std::abs(std::abs(x) - a) < eps;
    if (!in_zone) CHECK(prof->value(x) == doctest::Approx(geometry::tent_profile(theta, L, x)).epsilon(1e-13));
  }
}

TEST_CASE("chain sweep ratios respect the Lipschitz lower bound") {
  geometry::ChainSpec spec;
  spec.block_odd = geometry::SectorBlockParams::with_margin(kPi / 6, 1.0, 0.1, 0.5);
  spec.block_even = geometry::SectorBlockParams::with_margin(kPi / 3, 1.0, 0.1, 0.5);
  spec.t = 0.5;
  spec.tail_left = 1.0;
  spec.tail_right = 1.0;
  spec.depth = 6.0;
  const double lip = std::max(spec.block_odd.cot_theta(), spec.block_even.cot_theta());
  harness::SweepOptions opt;
  opt.mesh.resolution = 2.0;
  const auto rows = harness::run_alpha_sweep(spec, {-0.5, -2.0, -6.0}, opt);
  for (const auto& r : rows) {
    REQUIRE(r.ok);
    CHECK(r.ratio >= -(1.0 + lip * lip) - 0.05);
    CHECK(r.ratio <= 0.0);
  }
}
