#include "robin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "robin/error.hpp"

namespace robin::harness {

namespace {

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Refines [x0, x1] by `factor` and steps back down by halves outside it.
void add_refinement(std::vector<mesh::RefineInterval>& out, double x0, double x1, double factor, double base,
                    double xl, double xr) {
  if (!(factor > 1.0)) return;
  out.push_back({std::max(x0, xl), std::min(x1, xr), factor});
  double lo = x0;
  double hi = x1;
  for (double f = 0.5 * factor; f > 1.0; f *= 0.5) {
    const double ext = 6.0 * base / f;
    lo -= ext;
    hi += ext;
    out.push_back({std::max(lo, xl), std::min(hi, xr), f});
  }
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void MeshOverrides::validate() const {
  if (first_layer && !(*first_layer > 0.0)) throw InvalidParameter("first_layer must be positive");
  if (nx && *nx < 1) throw InvalidParameter("nx must be >= 1");
  if (ny && *ny < 1) throw InvalidParameter("ny must be >= 1");
  if (grading_ratio && !(*grading_ratio > 1.0 && *grading_ratio <= 2.0)) {
    throw InvalidParameter("grading ratio must lie in (1, 2]");
  }
  if (!(resolution > 0.0)) throw InvalidParameter("resolution must be positive");
  if (refine_levels < 0) throw InvalidParameter("refine_levels must be >= 0");
}

mesh::MeshPolicy auto_mesh_policy(const geometry::PlanarDomain& domain, double alpha,
                                  const MeshOverrides& overrides) {
  overrides.validate();
  const double res = overrides.resolution;
  const double extent = domain.max_height() + domain.depth();
  const double a = std::abs(alpha);
  double layer = a > 0.0 ? 0.25 / a : extent / 16.0;
  layer = std::min(layer, extent / 16.0);

  const double xl = domain.x_left();
  const double xr = domain.x_right();
  const double width = xr - xl;

  mesh::MeshPolicy policy;
  policy.grading_ratio = overrides.grading_ratio.value_or(1.1);
  policy.first_layer = overrides.first_layer.value_or(layer * res);
  policy.ny = overrides.ny.value_or(4);
  const double base_target = std::min(width / 64.0, 4.0 * layer) * res;
  policy.nx = overrides.nx.value_or(std::max(1, static_cast<int>(std::ceil(width / base_target - 1e-9))));
  const double base = width / policy.nx;

  for (const auto& seg : domain.segments()) {
    if (!seg.profile) continue;
    const auto& p = seg.profile->params();
    const double c = seg.scale;
    const double block_target = std::min({base, layer * res, c * p.L / 16.0 * res});
    add_refinement(policy.local_refine, seg.x0, seg.x1, base / block_target, base, xl, xr);
    const double kink_target = std::min(layer, c * p.eps / 8.0) * res;
    const double a_tip = p.L * std::tan(p.theta);
    for (double k : {-a_tip, 0.0, a_tip}) {
      const double centre = seg.center + c * k;
      add_refinement(policy.local_refine, centre - 2.0 * c * p.eps, centre + 2.0 * c * p.eps, base / kink_target,
                     base, xl, xr);
    }
  }
  return policy;
}

mesh::TriangleMesh auto_mesh(const geometry::PlanarDomain& domain, double alpha, const MeshOverrides& overrides) {
  auto m = mesh::generate_mapped_mesh(domain, auto_mesh_policy(domain, alpha, overrides));
  for (int k = 0; k < overrides.refine_levels; ++k) m = mesh::refine_uniform(m);
  return m;
}

SweepRow solve_row(const geometry::PlanarDomain& domain, double alpha, const SweepOptions& options) {
  SweepRow row;
  row.alpha = alpha;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto m = auto_mesh(domain, alpha, options.mesh);
    row.n_vertices = m.vertices.size();
    const auto res = fem::solve_on_mesh(m, options.mode, alpha, domain.lipschitz(), options.solve);
    row.lambda = res.eigen.lambda;
    row.iterations = res.eigen.iterations;
    row.ratio = alpha != 0.0 ? row.lambda / (alpha * alpha) : std::numeric_limits<double>::quiet_NaN();
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
    row.lambda = std::numeric_limits<double>::quiet_NaN();
    row.ratio = std::numeric_limits<double>::quiet_NaN();
    row.iterations = -1;
  }
  row.wall_time = elapsed_since(t0);
  return row;
}

std::vector<SweepRow> run_alpha_sweep(const geometry::ChainSpec& spec, const std::vector<double>& alphas,
                                      const SweepOptions& options) {
  for (double a : alphas) {
    if (!(a <= 0.0) || !std::isfinite(a)) throw InvalidParameter("sweep alphas must be <= 0");
  }
  const auto domain = geometry::build_chain_domain(spec);
  std::vector<SweepRow> rows(alphas.size());
  parallel_for(alphas.size(), options.jobs, [&](std::size_t i) { rows[i] = solve_row(domain, alphas[i], options); });
  return rows;
}

std::vector<SweepRow> run_alpha_sweep(const std::string& config_path, const std::vector<double>& alphas,
                                      const SweepOptions& options) {
  return run_alpha_sweep(geometry::load_chain_spec(config_path), alphas, options);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  std::string_view s(text);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidParameter("not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& comma_list) {
  std::vector<double> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw InvalidParameter("empty number list");
  return out;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.alpha) << ',' << format_double(r.lambda) << ',' << format_double(r.ratio) << ','
        << r.n_vertices << ',' << r.iterations << ',' << format_double(r.wall_time) << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ConfigError("missing CSV header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ConfigError("unexpected CSV header '" + line + "'", 1);
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) throw ConfigError("expected 6 fields, got " + std::to_string(fields.size()), line_no);
    try {
      SweepRow r;
      r.alpha = parse_double(fields[0]);
      r.lambda = parse_double(fields[1]);
      r.ratio = parse_double(fields[2]);
      const double nv = parse_double(fields[3]);
      const double it = parse_double(fields[4]);
      if (nv < 0 || nv != std::floor(nv) || it != std::floor(it)) throw InvalidParameter("integer field expected");
      r.n_vertices = static_cast<std::size_t>(nv);
      r.iterations = static_cast<int>(it);
      r.wall_time = parse_double(fields[5]);
      r.ok = std::isfinite(r.lambda) && r.iterations >= 0;
      rows.push_back(r);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what(), line_no);
    }
  }
  return rows;
}

double Interval::distance(double x) const {
  if (std::isnan(x)) return std::numeric_limits<double>::infinity();
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

Interval parse_interval(const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != 2 || !(v[0] <= v[1])) throw InvalidParameter("interval must be 'lo,hi' with lo <= hi");
  return {v[0], v[1]};
}

Band parse_band(const std::string& text) {
  std::string_view s(text);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s == "'" || s == "p") return Band::Prime;
  if (s == "''" || s == "pp") return Band::DoublePrime;
  throw InvalidParameter("band must be ' or '' (got '" + text + "')");
}

std::vector<Band> parse_assignment(const std::string& comma_list) {
  std::vector<Band> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_band(item));
  return out;
}

BandReport check_bands(const std::vector<SweepRow>& rows, const Interval& band_prime,
                       const Interval& band_doubleprime, const std::vector<Band>& assignment,
                       double min_separation) {
  if (!(band_prime.lo <= band_prime.hi) || !(band_doubleprime.lo <= band_doubleprime.hi)) {
    throw InvalidParameter("band endpoints out of order");
  }
  if (band_prime.overlaps(band_doubleprime)) throw InvalidParameter("bands I' and I'' overlap");
  if (assignment.size() != rows.size()) {
    throw InvalidParameter("assignment has " + std::to_string(assignment.size()) + " entries for " +
                           std::to_string(rows.size()) + " rows");
  }
  BandReport report;
  report.band_prime = band_prime;
  report.band_doubleprime = band_doubleprime;
  if (rows.empty()) {
    report.diagnostics.push_back("empty table: nothing to check");
    return report;
  }
  bool all_in = true;
  std::vector<double> cluster_p, cluster_pp;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    BandHit hit;
    hit.alpha = r.alpha;
    hit.ratio = r.ratio;
    hit.assigned = assignment[i];
    const Interval& band = hit.assigned == Band::Prime ? band_prime : band_doubleprime;
    const bool valid = r.ok && std::isfinite(r.ratio);
    hit.distance = valid ? band.distance(r.ratio) : std::numeric_limits<double>::infinity();
    hit.inside = valid && band.contains(r.ratio);
    if (valid) (hit.assigned == Band::Prime ? cluster_p : cluster_pp).push_back(r.ratio);
    if (!hit.inside) {
      all_in = false;
      report.diagnostics.push_back("alpha " + format_double(r.alpha) +
                                   (valid ? ": ratio " + format_double(r.ratio) + " misses its band by " +
                                                format_double(hit.distance)
                                          : ": row failed" + (r.error.empty() ? std::string() : " (" + r.error + ")")));
    }
    report.hits.push_back(hit);
  }
  if (!cluster_p.empty() && !cluster_pp.empty()) {
    double sep = std::numeric_limits<double>::infinity();
    for (double a : cluster_p) {
      for (double b : cluster_pp) sep = std::min(sep, std::abs(a - b));
    }
    report.separation = sep;
  }
  bool sep_ok = true;
  if (min_separation > 0.0) {
    sep_ok = std::isfinite(report.separation) && report.separation >= min_separation;
    if (!sep_ok) {
      report.diagnostics.push_back("separation " + format_double(report.separation) + " below required " +
                                   format_double(min_separation));
    }
  }
  report.pass = all_in && sep_ok;
  return report;
}

void print_report(std::ostream& out, const BandReport& report) {
  out << "I'  = [" << format_double(report.band_prime.lo) << ", " << format_double(report.band_prime.hi) << "]\n";
  out << "I'' = [" << format_double(report.band_doubleprime.lo) << ", "
      << format_double(report.band_doubleprime.hi) << "]\n";
  for (const auto& h : report.hits) {
    out << "alpha " << format_double(h.alpha) << "  ratio " << format_double(h.ratio) << "  band "
        << (h.assigned == Band::Prime ? "'" : "''") << "  " << (h.inside ? "in" : "MISS");
    if (!h.inside) out << " (distance " << format_double(h.distance) << ")";
    out << '\n';
  }
  out << "separation " << format_double(report.separation) << '\n';
  for (const auto& d : report.diagnostics) out << "note: " << d << '\n';
  out << "verdict " << (report.pass ? "PASS" : "FAIL") << '\n';
}

ScalingCheck verify_scaling(const geometry::PlanarDomain& domain, double alpha, double t,
                            const fem::BoundaryConditionMode& mode, const MeshOverrides& overrides) {
  if (!(t > 0.0)) throw InvalidParameter("scaling factor must be positive");
  const auto base = auto_mesh(domain, alpha, overrides);
  const auto scaled = base.scaled(t);
  const double lip = domain.lipschitz();
  ScalingCheck out;
  out.e_base = fem::solve_on_mesh(base, mode, t * alpha, lip).eigen.lambda;
  out.e_scaled = fem::solve_on_mesh(scaled, mode, alpha, lip).eigen.lambda;
  const double diff = std::abs(out.e_base - t * t * out.e_scaled);
  out.deviation = out.e_base != 0.0 ? diff / std::abs(out.e_base) : diff;
  return out;
}

BracketCheck verify_bracketing(const geometry::PlanarDomain& domain, double alpha, const MeshOverrides& overrides) {
  const auto m = auto_mesh(domain, alpha, overrides);
  const double lip = domain.lipschitz();
  fem::BoundaryConditionMode neumann;
  fem::BoundaryConditionMode dirichlet;
  dirichlet.side_mode = fem::SideMode::DirichletSides;
  BracketCheck out;
  out.n_vertices = m.vertices.size();
  out.e_neumann = fem::solve_on_mesh(m, neumann, alpha, lip).eigen.lambda;
  out.e_dirichlet = fem::solve_on_mesh(m, dirichlet, alpha, lip).eigen.lambda;
  out.ordered = out.e_neumann <= out.e_dirichlet + 1e-12;
  return out;
}

double plateau_depth(const geometry::SectorBlockParams& params, double alpha) {
  const double a = std::abs(alpha);
  return a > 0.0 ? std::max(params.L + 2.0, params.L + 8.0 / a) : params.L + 2.0;
}

std::vector<PlateauRow> plateau_study(const geometry::SectorBlockParams& params, const std::vector<double>& alphas,
                                      const MeshOverrides& overrides, int jobs) {
  params.validate();
  std::vector<PlateauRow> rows(alphas.size());
  parallel_for(alphas.size(), jobs, [&](std::size_t i) {
    PlateauRow& row = rows[i];
    row.alpha = alphas[i];
    try {
      row.depth = plateau_depth(params, row.alpha);
      const auto domain = geometry::build_block(params, 1.0, row.depth);
      const auto b = verify_bracketing(domain, row.alpha, overrides);
      row.n_vertices = b.n_vertices;
      row.lambda_neumann = b.e_neumann;
      row.lambda_dirichlet = b.e_dirichlet;
      if (row.alpha != 0.0) {
        row.ratio_neumann = b.e_neumann / (row.alpha * row.alpha);
        row.ratio_dirichlet = b.e_dirichlet / (row.alpha * row.alpha);
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace robin::harness
