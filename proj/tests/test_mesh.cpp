#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "robin/error.hpp"
#include "robin/geometry.hpp"
#include "robin/mesh.hpp"
#include "robin/quadrature.hpp"

using namespace robin;
using namespace robin::geometry;
using namespace robin::mesh;

namespace {

PlanarDomain rectangle(double x0, double x1, double depth) {
  return PlanarDomain(x0, x1, {}, {ProfileSegment{x0, x1, nullptr, 1.0, 0.0}}, depth);
}

MeshPolicy plain(int nx, int ny) {
  MeshPolicy p;
  p.nx = nx;
  p.ny = ny;
  p.grading_ratio = 1.0 + 1e-9;
  p.first_layer = 1e6;
  return p;
}

}  // namespace

TEST_CASE("minimal grid on the unit square") {
  const auto m = generate_mapped_mesh(rectangle(0, 1, 1), plain(1, 1));
  CHECK(m.vertices.size() == 4u);
  CHECK(m.triangles.size() == 2u);
  CHECK(m.boundary_edges.size() == 4u);
  CHECK_NOTHROW(m.validate());
  const auto q = mesh_quality(m);
  CHECK(q.min_angle_deg == doctest::Approx(45.0));
}

TEST_CASE("structured rectangle counts and tags") {
  const auto m = generate_mapped_mesh(rectangle(-2, 3, 2), plain(7, 5));
  CHECK(m.boundary_edges.size() == 2u * 7u + 2u * 5u);
  CHECK(m.area() == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(m.boundary_length(TagSet{BoundaryTag::RobinTop}) == doctest::Approx(5.0));
  CHECK(m.boundary_length(TagSet{BoundaryTag::Bottom}) == doctest::Approx(5.0));
  CHECK(m.boundary_length(TagSet{BoundaryTag::SideLeft}) == doctest::Approx(2.0));
  CHECK(m.boundary_length(TagSet{BoundaryTag::SideRight}) == doctest::Approx(2.0));
  const long V = static_cast<long>(m.vertices.size());
  const long E = static_cast<long>(m.edge_count());
  const long T = static_cast<long>(m.triangles.size());
  CHECK(V - E + T == 1);
  for (const auto& e : m.boundary_edges) {
    const auto& a = m.vertices[e.a];
    const auto& b = m.vertices[e.b];
    switch (e.tag) {
      case BoundaryTag::RobinTop: CHECK((a.y == 0.0 && b.y == 0.0)); break;
      case BoundaryTag::Bottom: CHECK((a.y == -2.0 && b.y == -2.0)); break;
      case BoundaryTag::SideLeft: CHECK((a.x == -2.0 && b.x == -2.0)); break;
      case BoundaryTag::SideRight: CHECK((a.x == 3.0 && b.x == 3.0)); break;
    }
  }
}

TEST_CASE("geometric grading toward the top") {
  const SectorBlockParams params{kPi / 6, 2.0, 0.1, 2.0};
  const auto domain = build_block(params, 1.0, 4.0);
  MeshPolicy policy;
  policy.nx = 40;
  policy.ny = 6;
  policy.grading_ratio = 1.2;
  policy.first_layer = 0.05;
  const auto m = generate_mapped_mesh(domain, policy);
  CHECK_NOTHROW(m.validate());
  const int ny = layer_count(domain, policy);
  CHECK(ny >= 6);
  const auto xs = fiber_abscissas(domain, policy);
  CHECK(m.vertices.size() == xs.size() * static_cast<std::size_t>(ny + 1));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int base = static_cast<int>(i) * (ny + 1);
    CHECK(m.vertices[base].y == -4.0);
    CHECK(m.vertices[base + ny].y == doctest::Approx(domain.height(xs[i])).epsilon(1e-15));
    const double top = m.vertices[base + ny].y - m.vertices[base + ny - 1].y;
    CHECK(top <= 0.05 * (1 + 1e-12));
    for (int j = ny - 1; j >= 2; --j) {
      const double upper = m.vertices[base + j].y - m.vertices[base + j - 1].y;
      const double lower = m.vertices[base + j - 1].y - m.vertices[base + j - 2].y;
      const double above = m.vertices[base + j + 1].y - m.vertices[base + j].y;
      CHECK(upper / above == doctest::Approx(1.2).epsilon(1e-9));
      (void)lower;
    }
  }
  CHECK(mesh_quality(m).max_aspect >= 1.0);
}

TEST_CASE("mesh area matches the integral of H + D") {
  const SectorBlockParams params{kPi / 6, 1.5, 0.1, 1.5 * std::tan(kPi / 6) + 0.5};
  const auto domain = build_block(params, 1.0, 2.0);
  MeshPolicy policy;
  policy.nx = 4000;
  policy.ny = 4;
  policy.first_layer = 1.0;
  const auto m = generate_mapped_mesh(domain, policy);
  const auto prof = mollified_profile(params);
  const double a = params.L * std::tan(params.theta);
  const std::vector<double> cuts{-params.M, -a - params.eps, -a + params.eps, -params.eps, params.eps,
                                 a - params.eps, a + params.eps, params.M};
  double exact = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    exact += quad::adaptive([&](double x) { return prof->value(x) + 2.0; }, cuts[i], cuts[i + 1], 1e-10);
  }
  CHECK(std::abs(m.area() - exact) <= 1e-6 * exact);
}

TEST_CASE("local refinement narrows the columns") {
  const auto domain = rectangle(0, 10, 1);
  MeshPolicy policy = plain(10, 2);
  policy.local_refine.push_back({4.0, 6.0, 4.0});
  const auto xs = fiber_abscissas(domain, policy);
  CHECK(xs.front() == 0.0);
  CHECK(xs.back() == 10.0);
  CHECK(xs.size() == 8u + 8u + 1u);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    CHECK(w == doctest::Approx(mid > 4.0 && mid < 6.0 ? 0.25 : 1.0));
  }
}

TEST_CASE("nearly coincident refinement ends do not leave slivers") {
  const auto domain = rectangle(-1.5, 1.5, 1);
  MeshPolicy policy = plain(6, 2);
  policy.local_refine.push_back({-0.8, 0.8, 2.0});
  policy.local_refine.push_back({-0.8 + 2e-16, 1.2, 4.0});
  const auto xs = fiber_abscissas(domain, policy);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) CHECK(xs[i + 1] - xs[i] > 0.05);
  CHECK_NOTHROW(generate_mapped_mesh(domain, policy).validate());
}

TEST_CASE("uniform refinement") {
  const auto m = generate_mapped_mesh(rectangle(0, 1, 1), plain(1, 1));
  const auto r = refine_uniform(m);
  CHECK(r.triangles.size() == 8u);
  CHECK(r.vertices.size() == 9u);
  CHECK(r.area() == m.area());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(r.vertices[i].x == m.vertices[i].x);
    CHECK(r.vertices[i].y == m.vertices[i].y);
  }
  CHECK_NOTHROW(r.validate());
  CHECK(r.boundary_edges.size() == 8u);
  CHECK(r.boundary_length(TagSet{BoundaryTag::Bottom}) == doctest::Approx(1.0));
  CHECK(mesh_quality(r).min_angle_deg == doctest::Approx(mesh_quality(m).min_angle_deg).epsilon(1e-12));

  const auto block = generate_mapped_mesh(build_block({kPi / 5, 1, 0.1, 1}, 1.0, 1.0), plain(12, 3));
  const auto rb = refine_uniform(block);
  CHECK(mesh_quality(rb).min_angle_deg == doctest::Approx(mesh_quality(block).min_angle_deg).epsilon(1e-9));
  const long V = static_cast<long>(rb.vertices.size());
  CHECK(V - static_cast<long>(rb.edge_count()) + static_cast<long>(rb.triangles.size()) == 1);
}

TEST_CASE("polygon disk mesh") {
  const int n = 64;
  const auto m = generate_polygon_disk_mesh(1.0, n, 6);
  CHECK_NOTHROW(m.validate());
  CHECK(m.area() == doctest::Approx(0.5 * n * std::sin(2 * kPi / n)).epsilon(1e-12));
  CHECK(m.boundary_edges.size() == static_cast<std::size_t>(n));
  CHECK(m.boundary_length(TagSet{BoundaryTag::RobinTop}) == doctest::Approx(2 * n * std::sin(kPi / n)));
  CHECK_THROWS_AS(generate_polygon_disk_mesh(1.0, 2, 3), InvalidParameter);
}

TEST_CASE("scaled mesh") {
  const auto m = generate_mapped_mesh(rectangle(0, 2, 1), plain(3, 2));
  const auto s = m.scaled(3.0);
  CHECK(s.area() == doctest::Approx(9.0 * m.area()));
  CHECK(s.triangles == m.triangles);
}

TEST_CASE("mesh dump round trip") {
  const auto m = generate_mapped_mesh(build_block({kPi / 4, 1, 0.2, 1.5}, 1.0, 1.0), plain(9, 3));
  std::stringstream ss;
  write_mesh(ss, m);
  CHECK(ss.str().rfind("mesh v1\n", 0) == 0);
  const auto back = read_mesh(ss);
  REQUIRE(back.vertices.size() == m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(back.vertices[i].x == m.vertices[i].x);
    CHECK(back.vertices[i].y == m.vertices[i].y);
  }
  CHECK(back.triangles == m.triangles);
  REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) CHECK(back.boundary_edges[i].tag == m.boundary_edges[i].tag);
  std::stringstream bad("mesh v1\nv 0 0\nq 1 2\n");
  CHECK_THROWS_AS(read_mesh(bad), ConfigError);
}

TEST_CASE("policy validation") {
  MeshPolicy p;
  p.grading_ratio = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p.grading_ratio = 2.5;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = MeshPolicy{};
  p.nx = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  p = MeshPolicy{};
  p.first_layer = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
}
