#pragma once

// Experiment driver: alpha sweeps over chain domains, CSV tables, the two-band
// verdict and the block-level checks (scaling, bracketing, plateaus).

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "robin/fem.hpp"
#include "robin/geometry.hpp"
#include "robin/mesh.hpp"

namespace robin::harness {

struct SweepRow {
  double alpha = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  /// lambda / alpha^2; NaN for alpha = 0 or a failed row.
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_vertices = 0;
  /// -1 for a failed row.
  int iterations = -1;
  double wall_time = 0.0;
  bool ok = false;
  std::string error;
};

/// Adjustments on top of the automatic boundary-layer mesh rule.
struct MeshOverrides {
  std::optional<double> first_layer;
  std::optional<int> nx;
  std::optional<int> ny;
  std::optional<double> grading_ratio;
  /// Multiplies every target spacing (0.5 halves them).
  double resolution = 1.0;
  /// Uniform refinements applied after generation.
  int refine_levels = 0;

  void validate() const;
};

/// Boundary-layer rule: top layer 0.25/|alpha| (capped for small |alpha|), base column
/// width min(width/64, 4 * top layer), finer columns over every block and its kink zones.
mesh::MeshPolicy auto_mesh_policy(const geometry::PlanarDomain& domain, double alpha,
                                  const MeshOverrides& overrides = {});

/// Mesh produced by the rule above, including uniform refinements.
mesh::TriangleMesh auto_mesh(const geometry::PlanarDomain& domain, double alpha,
                             const MeshOverrides& overrides = {});

struct SweepOptions {
  MeshOverrides mesh;
  fem::BoundaryConditionMode mode;
  fem::SolveOptions solve;
  int jobs = 1;
};

/// Meshes and solves one alpha; solver and geometry errors mark the row failed.
SweepRow solve_row(const geometry::PlanarDomain& domain, double alpha, const SweepOptions& options);

/// Rows in input order; up to `jobs` alphas are solved concurrently.
std::vector<SweepRow> run_alpha_sweep(const geometry::ChainSpec& spec, const std::vector<double>& alphas,
                                      const SweepOptions& options = {});
std::vector<SweepRow> run_alpha_sweep(const std::string& config_path, const std::vector<double>& alphas,
                                      const SweepOptions& options = {});

inline constexpr const char* kCsvHeader = "alpha,lambda,ratio,n_vertices,iterations,wall_time_s";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Throws ConfigError (with line number) on a malformed table.
std::vector<SweepRow> read_csv(std::istream& in);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  /// Zero inside, distance to the nearest endpoint outside, +inf for NaN.
  double distance(double x) const;
  bool overlaps(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }
};

/// Parses "lo,hi".
Interval parse_interval(const std::string& text);

enum class Band { Prime, DoublePrime };

/// Parses "'" / "''" (also "p" / "pp").
Band parse_band(const std::string& text);
std::vector<Band> parse_assignment(const std::string& comma_list);

struct BandHit {
  double alpha = 0.0;
  double ratio = 0.0;
  Band assigned = Band::Prime;
  bool inside = false;
  double distance = 0.0;
};

struct BandReport {
  Interval band_prime;
  Interval band_doubleprime;
  std::vector<BandHit> hits;
  /// min |r' - r''| over the two measured clusters; NaN if either is empty.
  double separation = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::vector<std::string> diagnostics;
};

/// Throws InvalidParameter if the bands overlap or the assignment length differs.
/// A positive `min_separation` is part of the verdict.
BandReport check_bands(const std::vector<SweepRow>& rows, const Interval& band_prime,
                       const Interval& band_doubleprime, const std::vector<Band>& assignment,
                       double min_separation = 0.0);

void print_report(std::ostream& out, const BandReport& report);

struct ScalingCheck {
  /// E(Q^{t alpha, c}) on the given mesh.
  double e_base = 0.0;
  /// E(Q^{alpha, t c}) on the same mesh scaled by t.
  double e_scaled = 0.0;
  double deviation = 0.0;
};

ScalingCheck verify_scaling(const geometry::PlanarDomain& domain, double alpha, double t,
                            const fem::BoundaryConditionMode& mode = {}, const MeshOverrides& overrides = {});

struct BracketCheck {
  double e_neumann = 0.0;
  double e_dirichlet = 0.0;
  bool ordered = false;
  std::size_t n_vertices = 0;
};

/// Neumann-sided and Dirichlet-sided solves on one mesh.
BracketCheck verify_bracketing(const geometry::PlanarDomain& domain, double alpha,
                               const MeshOverrides& overrides = {});

struct PlateauRow {
  double alpha = 0.0;
  double lambda_neumann = std::numeric_limits<double>::quiet_NaN();
  double lambda_dirichlet = std::numeric_limits<double>::quiet_NaN();
  double ratio_neumann = std::numeric_limits<double>::quiet_NaN();
  double ratio_dirichlet = std::numeric_limits<double>::quiet_NaN();
  double depth = 0.0;
  std::size_t n_vertices = 0;
  bool ok = false;
  std::string error;
};

/// Depth below y = 0 used for a single block: max(L + 2, L + 8/|alpha|).
double plateau_depth(const geometry::SectorBlockParams& params, double alpha);

/// One block, both side conditions, one row per alpha.
std::vector<PlateauRow> plateau_study(const geometry::SectorBlockParams& params,
                                      const std::vector<double>& alphas, const MeshOverrides& overrides = {},
                                      int jobs = 1);

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_double(double v);
/// Locale-free parse of a whole string; throws InvalidParameter.
double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& comma_list);

}  // namespace robin::harness
