#include "robin/fem.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "robin/error.hpp"

namespace robin::fem {

SparseSymmetric::SparseSymmetric(Storage lower) : lower_(std::move(lower)) {
  lower_.makeCompressed();
}

SparseSymmetric SparseSymmetric::from_triplets(int n, const std::vector<Eigen::Triplet<double>>& triplets) {
  std::vector<Eigen::Triplet<double>> low;
  low.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (t.row() >= t.col()) low.push_back(t);
    else low.emplace_back(t.col(), t.row(), t.value());
  }
  Storage m(n, n);
  m.setFromTriplets(low.begin(), low.end());
  return SparseSymmetric(std::move(m));
}

double SparseSymmetric::coeff(int i, int j) const {
  return i >= j ? lower_.coeff(i, j) : lower_.coeff(j, i);
}

Eigen::SparseMatrix<double> SparseSymmetric::full() const {
  Eigen::SparseMatrix<double> out = lower_.selfadjointView<Eigen::Lower>();
  return out;
}

Eigen::VectorXd SparseSymmetric::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = lower_.selfadjointView<Eigen::Lower>() * x;
  return y;
}

double SparseSymmetric::quadratic_form(const Eigen::VectorXd& x) const { return x.dot(multiply(x)); }

double SparseSymmetric::sum_entries() const {
  double s = 0.0;
  for (int i = 0; i < lower_.outerSize(); ++i) {
    for (Storage::InnerIterator it(lower_, i); it; ++it) s += (it.col() == it.row()) ? it.value() : 2.0 * it.value();
  }
  return s;
}

Eigen::VectorXd SparseSymmetric::diagonal() const { return lower_.diagonal(); }

SparseSymmetric SparseSymmetric::combine(double a, const SparseSymmetric& other, double b) const {
  Storage sum = a * lower_ + b * other.lower_;
  return SparseSymmetric(std::move(sum));
}

SparseSymmetric SparseSymmetric::restrict_to(const std::vector<int>& keep) const {
  std::vector<int> map(dim(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) map[keep[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(lower_.nonZeros());
  for (int i = 0; i < lower_.outerSize(); ++i) {
    if (map[i] < 0) continue;
    for (Storage::InnerIterator it(lower_, i); it; ++it) {
      const int j = map[it.col()];
      if (j >= 0) trip.emplace_back(map[i], j, it.value());
    }
  }
  return from_triplets(static_cast<int>(keep.size()), trip);
}

namespace {

double triangle_area(const mesh::Point& p0, const mesh::Point& p1, const mesh::Point& p2) {
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

void check_triangles(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) throw DegenerateGeometry("mesh has no triangles");
  const double mean = mesh.area() / static_cast<double>(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const double a = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (!(a > 1e-14 * mean)) throw DegenerateGeometry("degenerate triangle (area below 1e-14 of mean)");
  }
}

template <class ElementFn>
SparseSymmetric assemble(const TriangleMesh& mesh, ElementFn element) {
  check_triangles(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 6);
  for (const auto& t : mesh.triangles) {
    const auto ke = element(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (t[a] >= t[b]) trip.emplace_back(t[a], t[b], ke[a][b]);
      }
    }
  }
  return SparseSymmetric::from_triplets(static_cast<int>(mesh.vertices.size()), trip);
}

}  // namespace

std::array<std::array<double, 3>, 3> element_stiffness(const mesh::Point& p0, const mesh::Point& p1,
                                                        const mesh::Point& p2) {
  const double area = triangle_area(p0, p1, p2);
  const std::array<double, 3> b{p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
  const std::array<double, 3> c{p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
  }
  return k;
}

std::array<std::array<double, 3>, 3> element_mass(const mesh::Point& p0, const mesh::Point& p1,
                                                   const mesh::Point& p2) {
  const double area = triangle_area(p0, p1, p2);
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  }
  return m;
}

SparseSymmetric assemble_stiffness(const TriangleMesh& mesh) { return assemble(mesh, element_stiffness); }

SparseSymmetric assemble_mass(const TriangleMesh& mesh) { return assemble(mesh, element_mass); }

SparseSymmetric assemble_boundary_mass(const TriangleMesh& mesh, TagSet tags) {
  if (tags.empty()) throw InvalidParameter("boundary mass needs a non-empty tag set");
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : mesh.boundary_edges) {
    if (!tags.contains(e.tag)) continue;
    const auto& p = mesh.vertices[e.a];
    const auto& q = mesh.vertices[e.b];
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    trip.emplace_back(e.a, e.a, len / 3.0);
    trip.emplace_back(e.b, e.b, len / 3.0);
    trip.emplace_back(std::max(e.a, e.b), std::min(e.a, e.b), len / 6.0);
  }
  return SparseSymmetric::from_triplets(static_cast<int>(mesh.vertices.size()), trip);
}

Eigen::VectorXd ReducedSystem::expand(const Eigen::VectorXd& reduced, int n_nodes) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_nodes);
  for (std::size_t k = 0; k < free_nodes.size(); ++k) out[free_nodes[k]] = reduced[static_cast<int>(k)];
  return out;
}

ReducedSystem apply_dirichlet(const SparseSymmetric& K, const SparseSymmetric& B,
                              const SparseSymmetric& M, const TriangleMesh& mesh,
                              TagSet dirichlet_tags) {
  std::vector<char> fixed(mesh.vertices.size(), 0);
  for (const auto& e : mesh.boundary_edges) {
    if (dirichlet_tags.contains(e.tag)) fixed[e.a] = fixed[e.b] = 1;
  }
  ReducedSystem out;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!fixed[i]) out.free_nodes.push_back(static_cast<int>(i));
  }
  if (out.free_nodes.empty()) throw EmptyInterior("every node lies on a Dirichlet boundary");
  out.K = K.restrict_to(out.free_nodes);
  out.B = B.restrict_to(out.free_nodes);
  out.M = M.restrict_to(out.free_nodes);
  return out;
}

void BoundaryConditionMode::validate() const {
  if (robin_tags.empty()) throw InvalidParameter("at least one boundary tag must carry the Robin term");
}

TagSet BoundaryConditionMode::dirichlet_tags() const {
  return side_mode == SideMode::DirichletSides ? robin_tags.complement() : TagSet{};
}

double default_shift(double alpha, double lip) { return -1.5 * (1.0 + lip * lip) * alpha * alpha - 1.0; }

double rayleigh_quotient(const SparseSymmetric& K, const SparseSymmetric& B, const SparseSymmetric& M,
                         double alpha, const Eigen::VectorXd& x) {
  return (K.quadratic_form(x) + alpha * B.quadratic_form(x)) / M.quadratic_form(x);
}

namespace {

using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

/// Factorisation of K + alpha B - sigma M with an inertia check.
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseSymmetric& A0, const SparseSymmetric& M) : A0_(A0), M_(M) {
    Eigen::SparseMatrix<double> pattern = A0_.combine(1.0, M_, 1.0).lower();
    factor_.analyzePattern(pattern);
  }

  /// True when the matrix is positive definite at this shift (then sigma < lambda_1).
  bool factor_at(double sigma) {
    Eigen::SparseMatrix<double> a = A0_.combine(1.0, M_, -sigma).lower();
    factor_.factorize(a);
    if (factor_.info() != Eigen::Success) return false;
    const auto& d = factor_.vectorD();
    for (int i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0) || !std::isfinite(d[i])) return false;
    }
    sigma_ = sigma;
    return true;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return factor_.solve(M_.multiply(x)); }
  double sigma() const { return sigma_; }

 private:
  const SparseSymmetric& A0_;
  const SparseSymmetric& M_;
  Factor factor_;
  double sigma_ = 0.0;
};

double m_norm(const SparseSymmetric& M, const Eigen::VectorXd& x) { return std::sqrt(M.quadratic_form(x)); }

struct LanczosEstimate {
  double lambda1 = 0.0;
  double lambda2 = std::numeric_limits<double>::infinity();
  Eigen::VectorXd ritz;
};

/// Shift-inverted Lanczos with full reorthogonalisation in the M-inner product.
LanczosEstimate lanczos(const ShiftedSolver& op, const SparseSymmetric& M, Eigen::VectorXd start, int steps) {
  const int n = static_cast<int>(start.size());
  steps = std::max(1, std::min(steps, n));
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> mq;
  std::vector<double> diag, off;
  start /= m_norm(M, start);
  q.push_back(start);
  mq.push_back(M.multiply(start));
  for (int j = 0; j < steps; ++j) {
    Eigen::VectorXd w = op.apply(q[j]);
    const double a = mq[j].dot(w);
    diag.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < q.size(); ++i) w -= mq[i].dot(w) * q[i];
    }
    const Eigen::VectorXd mw = M.multiply(w);
    const double b = std::sqrt(std::max(0.0, w.dot(mw)));
    if (j + 1 == steps || !(b > 1e-13 * std::abs(a))) break;
    off.push_back(b);
    q.push_back(w / b);
    mq.push_back(mw / b);
  }
  const int m = static_cast<int>(diag.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) T(i, i) = diag[i];
  for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = off[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  // Largest eigenvalues of the inverted operator are the smallest of the pencil.
  LanczosEstimate est;
  const double nu1 = es.eigenvalues()[m - 1];
  est.lambda1 = op.sigma() + 1.0 / nu1;
  if (m >= 2) est.lambda2 = op.sigma() + 1.0 / es.eigenvalues()[m - 2];
  est.ritz = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) est.ritz += es.eigenvectors()(i, m - 1) * q[i];
  if (est.ritz.sum() < 0.0) est.ritz = -est.ritz;
  return est;
}

}  // namespace

EigenResult solve_principal(const SparseSymmetric& K, const SparseSymmetric& B, const SparseSymmetric& M,
                            double alpha, double lip, const SolveOptions& options) {
  const int n = K.dim();
  if (B.dim() != n || M.dim() != n) throw InvalidParameter("matrix dimensions differ");
  if (n == 0) throw EmptyInterior("empty system");
  if (!(options.tol > 0.0)) throw InvalidParameter("solver tolerance must be positive");

  const SparseSymmetric A0 = K.combine(1.0, B, alpha);
  ShiftedSolver solver(A0, M);

  EigenResult result;
  double sigma = default_shift(alpha, lip);
  if (!solver.factor_at(sigma)) {
    if (options.strict_shift) {
      throw NotPositiveDefinite("K + alpha B - sigma M is not positive definite at sigma = " +
                                std::to_string(sigma));
    }
    bool ok = false;
    for (int k = 0; k < 60 && !ok; ++k) {
      sigma = 2.0 * sigma - 1.0;
      ok = solver.factor_at(sigma);
    }
    if (!ok) throw NotPositiveDefinite("no positive definite shift found");
  }
  result.shift = sigma;

  // Move the shift close below lambda_1; inertia keeps it below.
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  if (n >= 2 && options.lanczos_steps > 1) {
    const auto est = lanczos(solver, M, u, options.lanczos_steps);
    u = est.ritz;
    const double gap = std::isfinite(est.lambda2) ? est.lambda2 - est.lambda1 : 0.0;
    double target = est.lambda1 - 0.25 * gap;
    target = std::min(target, est.lambda1 - 1e-8 * (std::abs(est.lambda1) + 1.0));
    bool moved = false;
    for (int k = 0; k < 30 && target > sigma; ++k) {
      if (solver.factor_at(target)) {
        moved = true;
        break;
      }
      target = sigma + 0.5 * (target - sigma);
    }
    if (!moved) solver.factor_at(sigma);
  }
  result.working_shift = solver.sigma();

  u /= m_norm(M, u);
  double lambda = A0.quadratic_form(u);
  const double scale_ref = std::abs(lambda - result.shift);
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd z = solver.apply(u);
    const double nz = m_norm(M, z);
    if (!(nz > 0.0) || !std::isfinite(nz)) throw SolverError("inverse iteration produced a zero vector");
    u = z / nz;
    const double prev = lambda;
    lambda = A0.quadratic_form(u);
    const Eigen::VectorXd r = A0.multiply(u) - lambda * M.multiply(u);
    result.residual = r.norm();
    result.iterations = it;
    const double ref = std::max(std::abs(lambda - result.shift), scale_ref);
    const bool eig_converged = std::abs(lambda - prev) <= options.tol * ref;
    if (eig_converged && result.residual <= 10.0 * options.tol * ref) {
      if (u.sum() < 0.0) u = -u;
      result.lambda = lambda;
      result.vector = std::move(u);
      return result;
    }
  }
  throw MaxIterations("inverse iteration did not converge in " + std::to_string(options.max_iterations) +
                      " iterations (residual " + std::to_string(result.residual) + ")");
}

ProblemResult solve_on_mesh(const TriangleMesh& mesh, const BoundaryConditionMode& mode, double alpha,
                            double lip, const SolveOptions& options) {
  mode.validate();
  const auto K = assemble_stiffness(mesh);
  const auto M = assemble_mass(mesh);
  const auto B = assemble_boundary_mass(mesh, mode.robin_tags);
  ProblemResult out;
  if (mode.side_mode == SideMode::DirichletSides) {
    const auto reduced = apply_dirichlet(K, B, M, mesh, mode.dirichlet_tags());
    out.eigen = solve_principal(reduced.K, reduced.B, reduced.M, alpha, lip, options);
    out.n_dofs = reduced.free_nodes.size();
  } else {
    out.eigen = solve_principal(K, B, M, alpha, lip, options);
    out.n_dofs = mesh.vertices.size();
  }
  return out;
}

void write_matrix(std::ostream& out, const SparseSymmetric& A) {
  out << "matrix v1\n";
  char buf[64];
  for (int i = 0; i < A.lower().outerSize(); ++i) {
    for (SparseSymmetric::Storage::InnerIterator it(A.lower(), i); it; ++it) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, it.value());
      out << "e " << it.row() << ' ' << it.col() << ' ' << std::string_view(buf, ptr - buf) << '\n';
    }
  }
}

}  // namespace robin::fem
