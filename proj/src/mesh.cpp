#include "robin/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "robin/error.hpp"

namespace robin::mesh {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double dist(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

/// Top-down spacings s_k = s0 r^k, k = 0..n-1, summing to `length`.
double first_spacing(double length, double r, int n) {
  const double lr = std::log1p(r - 1.0);
  return length * (r - 1.0) / std::expm1(n * lr);
}

}  // namespace

double TriangleMesh::signed_area(const Triangle& t) const {
  const Point& p = vertices[t[0]];
  const Point& q = vertices[t[1]];
  const Point& r = vertices[t[2]];
  return 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
}

double TriangleMesh::area() const {
  double sum = 0.0;
  for (const auto& t : triangles) sum += signed_area(t);
  return sum;
}

double TriangleMesh::boundary_length(TagSet tags) const {
  double len = 0.0;
  for (const auto& e : boundary_edges) {
    if (tags.contains(e.tag)) len += dist(vertices[e.a], vertices[e.b]);
  }
  return len;
}

std::size_t TriangleMesh::edge_count() const {
  std::unordered_map<std::uint64_t, int> edges;
  edges.reserve(triangles.size() * 2);
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) edges[edge_key(t[k], t[(k + 1) % 3])]++;
  }
  return edges.size();
}

void TriangleMesh::validate() const {
  const int nv = static_cast<int>(vertices.size());
  for (const auto& t : triangles) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw DegenerateGeometry("triangle references a missing vertex");
    }
    if (!(signed_area(t) > 0.0)) throw DegenerateGeometry("triangle with non-positive area");
  }
  std::unordered_map<std::uint64_t, int> uses;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) uses[edge_key(t[k], t[(k + 1) % 3])]++;
  }
  std::size_t open_edges = 0;
  for (const auto& [key, count] : uses) {
    if (count > 2) throw DegenerateGeometry("edge shared by more than two triangles");
    if (count == 1) ++open_edges;
  }
  if (open_edges != boundary_edges.size()) {
    throw DegenerateGeometry("boundary edge list does not match the mesh boundary");
  }
  std::unordered_map<int, int> next;
  for (const auto& e : boundary_edges) {
    auto it = uses.find(edge_key(e.a, e.b));
    if (it == uses.end() || it->second != 1) {
      throw DegenerateGeometry("boundary edge not owned by exactly one triangle");
    }
    if (!next.emplace(e.a, e.b).second) throw DegenerateGeometry("boundary loop branches");
  }
  if (boundary_edges.empty()) return;
  int v = boundary_edges.front().a;
  std::size_t steps = 0;
  do {
    auto it = next.find(v);
    if (it == next.end()) throw DegenerateGeometry("boundary loop is not closed");
    v = it->second;
    ++steps;
  } while (v != boundary_edges.front().a && steps <= boundary_edges.size());
  if (steps != boundary_edges.size()) throw DegenerateGeometry("boundary is not a single loop");
}

TriangleMesh TriangleMesh::scaled(double c) const {
  TriangleMesh out = *this;
  for (auto& p : out.vertices) {
    p.x *= c;
    p.y *= c;
  }
  return out;
}

void MeshPolicy::validate() const {
  if (nx < 1) throw InvalidParameter("mesh policy: nx must be >= 1");
  if (ny < 1) throw InvalidParameter("mesh policy: ny must be >= 1");
  if (!(grading_ratio > 1.0 && grading_ratio <= 2.0)) {
    throw InvalidParameter("mesh policy: grading ratio must lie in (1, 2]");
  }
  if (!(first_layer > 0.0)) throw InvalidParameter("mesh policy: first_layer must be positive");
  for (const auto& r : local_refine) {
    if (!(r.x1 > r.x0) || !(r.factor >= 1.0)) {
      throw InvalidParameter("mesh policy: refine intervals need x0 < x1 and factor >= 1");
    }
  }
}

std::vector<double> fiber_abscissas(const geometry::PlanarDomain& domain, const MeshPolicy& policy) {
  const double xl = domain.x_left();
  const double xr = domain.x_right();
  const double base = (xr - xl) / policy.nx;

  // Breakpoints closer than this are merged; rounding in interval ends would otherwise leave slivers.
  const double merge = 1e-9 * (xr - xl);
  std::vector<double> breaks{xl, xr};
  for (const auto& r : policy.local_refine) {
    for (double b : {r.x0, r.x1}) {
      if (b > xl + merge && b < xr - merge) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [merge](double a, double b) { return b - a <= merge; }),
               breaks.end());

  std::vector<double> xs{xl};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    const double mid = 0.5 * (lo + hi);
    double factor = 1.0;
    for (const auto& r : policy.local_refine) {
      if (mid > r.x0 && mid < r.x1) factor = std::max(factor, r.factor);
    }
    const int cells = std::max(1, static_cast<int>(std::ceil((hi - lo) * factor / base - 1e-9)));
    for (int k = 1; k < cells; ++k) xs.push_back(lo + (hi - lo) * k / cells);
    xs.push_back(hi);
  }
  xs.back() = xr;
  return xs;
}

int layer_count(const geometry::PlanarDomain& domain, const MeshPolicy& policy) {
  policy.validate();
  const auto xs = fiber_abscissas(domain, policy);
  double longest = 0.0;
  for (double x : xs) longest = std::max(longest, domain.height(x) + domain.depth());
  int ny = std::max(policy.ny, 1);
  while (first_spacing(longest, policy.grading_ratio, ny) > policy.first_layer) ++ny;
  return ny;
}

TriangleMesh generate_mapped_mesh(const geometry::PlanarDomain& domain, const MeshPolicy& policy) {
  policy.validate();
  const auto xs = fiber_abscissas(domain, policy);
  const int ny = layer_count(domain, policy);
  const int nfib = static_cast<int>(xs.size());
  const int per = ny + 1;
  const double r = policy.grading_ratio;

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(nfib) * per);
  for (int i = 0; i < nfib; ++i) {
    const double top = domain.height(xs[i]);
    const double length = top + domain.depth();
    if (!(length > 0.0)) throw DegenerateGeometry("fiber of non-positive length");
    const double s0 = first_spacing(length, r, ny);
    double y = top;
    double s = s0;
    mesh.vertices[i * per + ny] = {xs[i], top};
    for (int j = ny - 1; j >= 1; --j) {
      y -= s;
      s *= r;
      mesh.vertices[i * per + j] = {xs[i], y};
    }
    mesh.vertices[i * per] = {xs[i], -domain.depth()};
  }

  auto id = [per](int i, int j) { return i * per + j; };
  mesh.triangles.reserve(static_cast<std::size_t>(2) * (nfib - 1) * ny);
  for (int i = 0; i + 1 < nfib; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      // a-c against b-d; ties go to a-c so the split is reproducible.
      if (dist(mesh.vertices[a], mesh.vertices[c]) <= dist(mesh.vertices[b], mesh.vertices[d])) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }

  for (int i = 0; i + 1 < nfib; ++i) mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::Bottom});
  for (int j = 0; j < ny; ++j) mesh.boundary_edges.push_back({id(nfib - 1, j), id(nfib - 1, j + 1), BoundaryTag::SideRight});
  for (int i = nfib - 1; i > 0; --i) mesh.boundary_edges.push_back({id(i, ny), id(i - 1, ny), BoundaryTag::RobinTop});
  for (int j = ny; j > 0; --j) mesh.boundary_edges.push_back({id(0, j), id(0, j - 1), BoundaryTag::SideLeft});
  return mesh;
}

TriangleMesh refine_uniform(const TriangleMesh& mesh) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(mesh.triangles.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const Point& p = mesh.vertices[a];
    const Point& q = mesh.vertices[b];
    out.vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
    const int idx = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({m01, t[1], m12});
    out.triangles.push_back({m20, m12, t[2]});
    out.triangles.push_back({m01, m12, m20});
  }
  out.boundary_edges.reserve(mesh.boundary_edges.size() * 2);
  for (const auto& e : mesh.boundary_edges) {
    const int m = midpoint.at(edge_key(e.a, e.b));
    out.boundary_edges.push_back({e.a, m, e.tag});
    out.boundary_edges.push_back({m, e.b, e.tag});
  }
  return out;
}

TriangleMesh generate_polygon_disk_mesh(double radius, int n_sides, int rings) {
  if (!(radius > 0.0) || n_sides < 3 || rings < 1) {
    throw InvalidParameter("polygon disk mesh needs radius > 0, n_sides >= 3, rings >= 1");
  }
  TriangleMesh mesh;
  mesh.vertices.push_back({0.0, 0.0});
  for (int k = 1; k <= rings; ++k) {
    const double rho = radius * k / rings;
    for (int j = 0; j < n_sides; ++j) {
      const double phi = 2.0 * geometry::kPi * j / n_sides;
      mesh.vertices.push_back({rho * std::cos(phi), rho * std::sin(phi)});
    }
  }
  auto id = [n_sides](int ring, int j) { return 1 + (ring - 1) * n_sides + (j % n_sides); };
  for (int j = 0; j < n_sides; ++j) mesh.triangles.push_back({0, id(1, j), id(1, j + 1)});
  for (int k = 1; k < rings; ++k) {
    for (int j = 0; j < n_sides; ++j) {
      const int a = id(k, j), b = id(k + 1, j), c = id(k + 1, j + 1), d = id(k, j + 1);
      if (dist(mesh.vertices[a], mesh.vertices[c]) <= dist(mesh.vertices[b], mesh.vertices[d])) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  for (int j = 0; j < n_sides; ++j) mesh.boundary_edges.push_back({id(rings, j), id(rings, j + 1), BoundaryTag::RobinTop});
  return mesh;
}

MeshQuality mesh_quality(const TriangleMesh& mesh) {
  MeshQuality q;
  q.n_vertices = mesh.vertices.size();
  q.n_triangles = mesh.triangles.size();
  q.min_angle_deg = 180.0;
  q.max_aspect = 0.0;
  for (const auto& t : mesh.triangles) {
    const Point& p0 = mesh.vertices[t[0]];
    const Point& p1 = mesh.vertices[t[1]];
    const Point& p2 = mesh.vertices[t[2]];
    const double a = dist(p1, p2), b = dist(p2, p0), c = dist(p0, p1);
    const std::array<double, 3> sides{a, b, c};
    for (int k = 0; k < 3; ++k) {
      const double opp = sides[k], s1 = sides[(k + 1) % 3], s2 = sides[(k + 2) % 3];
      const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
      q.min_angle_deg = std::min(q.min_angle_deg, std::acos(cosv) * 180.0 / geometry::kPi);
    }
    const double longest = std::max({a, b, c});
    const double altitude = 2.0 * mesh.signed_area(t) / longest;
    q.max_aspect = std::max(q.max_aspect, longest / altitude);
  }
  return q;
}

void write_mesh(std::ostream& out, const TriangleMesh& mesh) {
  auto num = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  out << "mesh v1\n";
  for (const auto& p : mesh.vertices) out << "v " << num(p.x) << ' ' << num(p.y) << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << "b " << e.a << ' ' << e.b << ' ' << geometry::tag_name(e.tag) << '\n';
}

TriangleMesh read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "mesh v1") throw ConfigError("expected 'mesh v1' header", 1);
  TriangleMesh mesh;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::string kind;
    ls >> kind;
    if (kind == "v") {
      std::string xs, ys;
      ls >> xs >> ys;
      Point p;
      auto rx = std::from_chars(xs.data(), xs.data() + xs.size(), p.x);
      auto ry = std::from_chars(ys.data(), ys.data() + ys.size(), p.y);
      if (rx.ec != std::errc() || ry.ec != std::errc()) throw ConfigError("bad vertex line", line_no);
      mesh.vertices.push_back(p);
    } else if (kind == "t") {
      Triangle t;
      if (!(ls >> t[0] >> t[1] >> t[2])) throw ConfigError("bad triangle line", line_no);
      mesh.triangles.push_back(t);
    } else if (kind == "b") {
      BoundaryEdge e;
      std::string tag;
      if (!(ls >> e.a >> e.b >> tag)) throw ConfigError("bad boundary line", line_no);
      e.tag = geometry::parse_tag(tag);
      mesh.boundary_edges.push_back(e);
    } else {
      throw ConfigError("unknown record '" + kind + "'", line_no);
    }
  }
  return mesh;
}

}  // namespace robin::mesh
