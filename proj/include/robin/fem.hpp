#pragma once

// P1 finite elements for the Robin Laplacian and its Neumann/Dirichlet-sided
// variants, and a shift-inverted solver for the principal eigenpair of
// (K + alpha B) u = lambda M u.

#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "robin/mesh.hpp"

namespace robin::fem {

using geometry::BoundaryTag;
using geometry::TagSet;
using mesh::TriangleMesh;

/// Symmetric sparse matrix stored as its lower triangle in compressed-row form.
class SparseSymmetric {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseSymmetric() = default;
  explicit SparseSymmetric(Storage lower);

  /// Builds from (i, j, v) triplets; entries above the diagonal are mirrored into the
  /// lower triangle and duplicates are summed.
  static SparseSymmetric from_triplets(int n, const std::vector<Eigen::Triplet<double>>& triplets);

  int dim() const { return static_cast<int>(lower_.rows()); }
  const Storage& lower() const { return lower_; }
  double coeff(int i, int j) const;

  Eigen::SparseMatrix<double> full() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  double quadratic_form(const Eigen::VectorXd& x) const;
  double sum_entries() const;
  Eigen::VectorXd diagonal() const;

  /// a * this + b * other (same sparsity not required).
  SparseSymmetric combine(double a, const SparseSymmetric& other, double b) const;

  /// Keeps the rows/columns listed in `keep` (in that order).
  SparseSymmetric restrict_to(const std::vector<int>& keep) const;

 private:
  Storage lower_;
};

/// Exact P1 stiffness: integral of grad u . grad v.
SparseSymmetric assemble_stiffness(const TriangleMesh& mesh);

/// Consistent P1 mass: integral of u v.
SparseSymmetric assemble_mass(const TriangleMesh& mesh);

/// Boundary mass over edges whose tag is in `tags`: (l/6) [[2,1],[1,2]] per edge.
/// The Robin parameter is applied by the caller.
SparseSymmetric assemble_boundary_mass(const TriangleMesh& mesh, TagSet tags);

/// Element matrices, exposed for tests.
std::array<std::array<double, 3>, 3> element_stiffness(const mesh::Point& p0, const mesh::Point& p1,
                                                        const mesh::Point& p2);
std::array<std::array<double, 3>, 3> element_mass(const mesh::Point& p0, const mesh::Point& p1,
                                                   const mesh::Point& p2);

struct ReducedSystem {
  SparseSymmetric K;
  SparseSymmetric B;
  SparseSymmetric M;
  /// Surviving node indices of the original mesh, increasing.
  std::vector<int> free_nodes;

  /// Expands a reduced vector to mesh nodes (zero on eliminated nodes).
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced, int n_nodes) const;
};

/// Removes every node lying on an edge with a tag in `dirichlet_tags`.
/// Throws EmptyInterior if nothing survives.
ReducedSystem apply_dirichlet(const SparseSymmetric& K, const SparseSymmetric& B,
                              const SparseSymmetric& M, const TriangleMesh& mesh,
                              TagSet dirichlet_tags);

enum class SideMode { NeumannSides, DirichletSides };

/// Which tags carry the Robin term and what happens on the rest of the boundary.
struct BoundaryConditionMode {
  SideMode side_mode = SideMode::NeumannSides;
  TagSet robin_tags{BoundaryTag::RobinTop};

  void validate() const;
  TagSet dirichlet_tags() const;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iterations = 500;
  /// Throw NotPositiveDefinite instead of lowering the shift when
  /// K + alpha B - sigma M is not positive definite at the formula shift.
  bool strict_shift = false;
  int lanczos_steps = 40;
};

struct EigenResult {
  double lambda = 0.0;
  /// M-normalised nodal coefficients (of the system that was solved).
  Eigen::VectorXd vector;
  int iterations = 0;
  /// ||(K + alpha B - lambda M) u||_2 with ||u||_M = 1.
  double residual = 0.0;
  /// Formula shift -1.5 (1 + lip^2) alpha^2 - 1 (or the lowered one).
  double shift = 0.0;
  /// Refined shift used by the final inverse iteration.
  double working_shift = 0.0;
};

/// Formula shift -1.5 (1 + lip^2) alpha^2 - 1.
double default_shift(double alpha, double lip);

/// Smallest eigenpair of (K + alpha B) u = lambda M u.
EigenResult solve_principal(const SparseSymmetric& K, const SparseSymmetric& B,
                            const SparseSymmetric& M, double alpha, double lip,
                            const SolveOptions& options = {});

/// Assemble-and-solve convenience for a mesh and a boundary-condition mode.
struct ProblemResult {
  EigenResult eigen;
  std::size_t n_dofs = 0;
};
ProblemResult solve_on_mesh(const TriangleMesh& mesh, const BoundaryConditionMode& mode,
                            double alpha, double lip, const SolveOptions& options = {});

/// Rayleigh quotient (x'(K + alpha B)x) / (x'Mx).
double rayleigh_quotient(const SparseSymmetric& K, const SparseSymmetric& B,
                         const SparseSymmetric& M, double alpha, const Eigen::VectorXd& x);

/// `matrix v1` dump: header line then `e i j value` for the stored lower triangle.
void write_matrix(std::ostream& out, const SparseSymmetric& A);

}  // namespace robin::fem
