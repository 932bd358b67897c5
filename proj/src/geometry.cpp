#include "robin/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "robin/error.hpp"
#include "robin/quadrature.hpp"

namespace robin::geometry {

namespace {

double bump_unnormalized(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

/// Cumulative mollifier Phi and first moment for eps = 1, tabulated at
/// s_k = -1 + k / 64; values in between add one Gauss panel from the node below.
class BumpTable {
 public:
  static constexpr int kPerUnit = MollifiedProfile::kSamplesPerEps;
  static constexpr int kNodes = 2 * kPerUnit + 1;

  BumpTable() {
    cdf_[0] = 0.0;
    moment_[0] = 0.0;
    for (int k = 1; k < kNodes; ++k) {
      cdf_[k] = cdf_[k - 1] + converged_panel(density, node(k - 1), node(k));
      moment_[k] = moment_[k - 1] + converged_panel(moment, node(k - 1), node(k));
    }
  }

  static double node(int k) { return -1.0 + static_cast<double>(k) / kPerUnit; }

  /// Phi(s) for eps = 1.
  double cdf(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const int k = below(s);
    return std::clamp(cdf_[k] + quad::gauss_legendre32(density, node(k), s), 0.0, 1.0);
  }

  /// R(s) = int (s - u)_+ phi(u) du for eps = 1.
  double ramp(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return s;
    const int k = below(s);
    const double phi = cdf_[k] + quad::gauss_legendre32(density, node(k), s);
    const double m1 = moment_[k] + quad::gauss_legendre32(moment, node(k), s);
    return s * phi - m1;
  }

 private:
  static double density(double s) { return bump_unnormalized(s) / bump_normalization(); }
  static double moment(double s) { return s * density(s); }

  static int below(double s) {
    return std::clamp(static_cast<int>(std::floor((s + 1.0) * kPerUnit)), 0, kNodes - 2);
  }

  template <class F>
  static double converged_panel(F f, double lo, double hi) {
    const double whole = quad::gauss_legendre32(f, lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double split = quad::gauss_legendre32(f, lo, mid) + quad::gauss_legendre32(f, mid, hi);
    if (!(std::abs(whole - split) <= 1e-14)) {
      throw QuadratureFailure("mollifier corner-zone quadrature did not converge on [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return split;
  }

  std::array<double, kNodes> cdf_{};
  std::array<double, kNodes> moment_{};
};

const BumpTable& bump_table() {
  static const BumpTable table;
  return table;
}

double smoothed_ramp(double eps, double u) { return eps * bump_table().ramp(u / eps); }
double smoothed_step(double eps, double u) { return bump_table().cdf(u / eps); }

}  // namespace

double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }

void SectorBlockParams::validate() const {
  if (!(theta > 0.0 && theta < kPi / 2)) throw InvalidParameter("theta must lie in (0, pi/2)");
  if (!(L > 0.0)) throw InvalidParameter("L must be positive");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(M >= half_support() * (1.0 - 1e-14))) {
    throw InvalidParameter("M must satisfy M >= L tan(theta) + eps");
  }
}

double SectorBlockParams::half_support() const { return L * std::tan(theta) + eps; }
double SectorBlockParams::cot_theta() const { return 1.0 / std::tan(theta); }

SectorBlockParams SectorBlockParams::with_margin(double theta, double L, double eps, double margin) {
  return SectorBlockParams{theta, L, eps, L * std::tan(theta) + margin};
}

double tent_profile(double theta, double L, double x) {
  if (!(theta > 0.0 && theta < kPi / 2)) throw InvalidParameter("theta must lie in (0, pi/2)");
  if (!(L > 0.0)) throw InvalidParameter("L must be positive");
  const double ax = std::abs(x);
  if (ax > L * std::tan(theta)) return 0.0;
  return std::max(0.0, L - ax / std::tan(theta));
}

double bump_normalization() {
  static const double z = quad::adaptive(bump_unnormalized, -1.0, 1.0, 1e-14);
  return z;
}

double mollifier_eval(double eps, double x) {
  if (!(eps > 0.0)) throw InvalidParameter("mollifier radius must be positive");
  return bump_unnormalized(x / eps) / (bump_normalization() * eps);
}

double mollifier_derivative(double eps, double x) {
  if (!(eps > 0.0)) throw InvalidParameter("mollifier radius must be positive");
  const double s = x / eps;
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double d = 1.0 - s * s;
  return mollifier_eval(eps, x) * (-2.0 * s / (d * d)) / eps;
}

MollifiedProfile::MollifiedProfile(const SectorBlockParams& params) : params_(params) {
  params_.validate();
  bump_table();
  const double a = params_.L * std::tan(params_.theta);
  const double spacing = sample_spacing();
  samples_.reserve(3 * (2 * kSamplesPerEps + 1));
  for (double center : {-a, 0.0, a}) {
    for (int j = 0; j <= 2 * kSamplesPerEps; ++j) {
      const double x = center + (j - kSamplesPerEps) * spacing;
      samples_.push_back({x, value(x), slope(x)});
    }
  }
}

bool MollifiedProfile::in_corner_zone(double x) const {
  const double ax = std::abs(x);
  const double a = params_.L * std::tan(params_.theta);
  return ax <= params_.eps || std::abs(ax - a) <= params_.eps;
}

double MollifiedProfile::value(double x) const {
  const double ax = std::abs(x);
  if (ax >= params_.half_support()) return 0.0;
  if (!in_corner_zone(ax)) return tent_profile(params_.theta, params_.L, ax);
  const double a = params_.L * std::tan(params_.theta);
  const double e = params_.eps;
  const double combo = smoothed_ramp(e, ax + a) - 2.0 * smoothed_ramp(e, ax) + smoothed_ramp(e, ax - a);
  return std::max(0.0, params_.cot_theta() * combo);
}

double MollifiedProfile::slope(double x) const {
  const double ax = std::abs(x);
  if (ax >= params_.half_support()) return 0.0;
  const double a = params_.L * std::tan(params_.theta);
  const double c = params_.cot_theta();
  double s;
  if (!in_corner_zone(ax)) {
    s = ax < a ? -c : 0.0;
  } else {
    const double e = params_.eps;
    s = c * (smoothed_step(e, ax + a) - 2.0 * smoothed_step(e, ax) + smoothed_step(e, ax - a));
  }
  return x < 0.0 ? -s : s;
}

std::shared_ptr<const MollifiedProfile> mollified_profile(const SectorBlockParams& params) {
  return std::make_shared<const MollifiedProfile>(params);
}

std::string_view tag_name(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::RobinTop: return "RobinTop";
    case BoundaryTag::SideLeft: return "SideLeft";
    case BoundaryTag::SideRight: return "SideRight";
    case BoundaryTag::Bottom: return "Bottom";
  }
  return "?";
}

BoundaryTag parse_tag(std::string_view name) {
  for (auto t : kAllTags) {
    if (tag_name(t) == name) return t;
  }
  throw UnknownTag("unknown boundary tag '" + std::string(name) + "'");
}

double ProfileSegment::height(double x) const {
  if (!profile) return 0.0;
  return scale * profile->value((x - center) / scale);
}

double ProfileSegment::slope(double x) const {
  if (!profile) return 0.0;
  return profile->slope((x - center) / scale);
}

PlanarDomain::PlanarDomain(double x_left, double x_right, std::vector<double> junctions,
                           std::vector<ProfileSegment> segments, double depth)
    : x_left_(x_left),
      x_right_(x_right),
      junctions_(std::move(junctions)),
      segments_(std::move(segments)),
      depth_(depth) {
  if (!(x_right_ > x_left_)) throw InvalidParameter("domain needs x_left < x_right");
  if (!(depth_ > 0.0)) throw InvalidParameter("depth must be positive");
  if (segments_.empty()) throw InvalidParameter("domain needs at least one top segment");
  if (segments_.front().x0 != x_left_ || segments_.back().x1 != x_right_) {
    throw InvalidParameter("top segments must cover [x_left, x_right]");
  }
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].x0 != segments_[i - 1].x1) throw InvalidParameter("top segments must be contiguous");
  }
  if (!std::is_sorted(junctions_.begin(), junctions_.end())) {
    throw InvalidParameter("junctions must be increasing");
  }
  constexpr double kTol = 1e-12;
  if (std::abs(height(x_left_)) > kTol || std::abs(height(x_right_)) > kTol) {
    throw InvalidParameter("top profile must vanish at both ends");
  }
  for (double a : junctions_) {
    if (std::abs(height(a)) > kTol) throw InvalidParameter("top profile must vanish at junctions");
  }
}

const ProfileSegment& PlanarDomain::segment_at(double x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const ProfileSegment& s) { return v < s.x0; });
  if (it == segments_.begin()) return segments_.front();
  return *std::prev(it);
}

double PlanarDomain::height(double x) const { return segment_at(x).height(x); }
double PlanarDomain::slope(double x) const { return segment_at(x).slope(x); }

double PlanarDomain::lipschitz() const {
  double lip = 0.0;
  for (const auto& s : segments_) {
    if (s.profile) lip = std::max(lip, s.profile->lipschitz());
  }
  return lip;
}

double PlanarDomain::max_height() const {
  double h = 0.0;
  for (const auto& s : segments_) {
    if (s.profile) h = std::max(h, s.scale * s.profile->params().L);
  }
  return h;
}

std::vector<std::pair<double, double>> PlanarDomain::corner_zones() const {
  std::vector<std::pair<double, double>> zones;
  for (const auto& s : segments_) {
    if (!s.profile) continue;
    const auto& p = s.profile->params();
    const double a = p.L * std::tan(p.theta);
    for (double k : {-a, 0.0, a}) {
      zones.emplace_back(s.center + s.scale * (k - p.eps), s.center + s.scale * (k + p.eps));
    }
  }
  return zones;
}

PlanarDomain build_block(const SectorBlockParams& params, double c, double depth) {
  params.validate();
  if (!(c > 0.0)) throw InvalidParameter("scale c must be positive");
  if (!(depth > 0.0)) throw InvalidParameter("depth must be positive");
  const double half = c * params.M;
  ProfileSegment seg{-half, half, mollified_profile(params), c, 0.0};
  return PlanarDomain(-half, half, {-half, half}, {std::move(seg)}, depth);
}

void ChainSpec::validate() const {
  block_odd.validate();
  block_even.validate();
  if (!(t > 0.0 && t < 1.0)) throw InvalidParameter("scale ratio t must lie in (0, 1)");
  if (n_blocks < 0) throw InvalidParameter("n_blocks must be non-negative");
  if (!(tail_left > 0.0) || !(tail_right > 0.0)) throw InvalidParameter("tail lengths must be positive");
  if (depth && !(*depth > 0.0)) throw InvalidParameter("depth must be positive");
}

double ChainSpec::block_scale(int n) const { return std::pow(t, n - 1); }

double ChainSpec::max_block_height() const {
  double h = 0.0;
  for (int n = 1; n <= n_blocks; ++n) h = std::max(h, block_scale(n) * block(n).L);
  return h;
}

double ChainSpec::resolved_depth() const { return depth.value_or(max_block_height() + 2.0); }

PlanarDomain build_chain_domain(const ChainSpec& spec) {
  spec.validate();
  std::vector<double> widths;
  double total = 0.0;
  for (int n = 1; n <= spec.n_blocks; ++n) {
    widths.push_back(2.0 * spec.block_scale(n) * spec.block(n).M);
    total += widths.back();
  }
  const double a0 = -total;
  const double x_left = a0 - spec.tail_left;
  const double x_right = spec.tail_right;

  std::vector<double> junctions{a0};
  for (double w : widths) junctions.push_back(junctions.back() + w);
  junctions.back() = 0.0;

  std::vector<ProfileSegment> segments;
  segments.push_back({x_left, a0, nullptr, 1.0, 0.0});
  std::map<int, std::shared_ptr<const MollifiedProfile>> cache;
  for (int n = 1; n <= spec.n_blocks; ++n) {
    const int parity = n % 2;
    if (!cache.count(parity)) cache[parity] = mollified_profile(spec.block(n));
    const double lo = junctions[n - 1];
    const double hi = junctions[n];
    segments.push_back({lo, hi, cache[parity], spec.block_scale(n), 0.5 * (lo + hi)});
  }
  segments.push_back({0.0, x_right, nullptr, 1.0, 0.0});
  if (spec.n_blocks == 0) {
    segments.front().x1 = 0.0;
    junctions = {0.0};
  }
  return PlanarDomain(x_left, x_right, std::move(junctions), std::move(segments), spec.resolved_depth());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, int line, std::string_view key) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'",
                      line);
  }
  return value;
}

}  // namespace

ChainSpec parse_chain_spec(std::string_view text) {
  ChainSpec spec;
  double theta_odd = 30.0, theta_even = 60.0;
  double L_odd = spec.block_odd.L, L_even = spec.block_even.L;
  double eps_odd = spec.block_odd.eps, eps_even = spec.block_even.eps;
  std::optional<double> M_odd, M_even;
  std::map<std::string, int, std::less<>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (seen.count(key)) throw ConfigError("duplicate key '" + std::string(key) + "'", line_no);
    seen.emplace(std::string(key), line_no);

    if (key == "theta_odd_deg") theta_odd = parse_number<double>(value, line_no, key);
    else if (key == "theta_even_deg") theta_even = parse_number<double>(value, line_no, key);
    else if (key == "L_odd") L_odd = parse_number<double>(value, line_no, key);
    else if (key == "L_even") L_even = parse_number<double>(value, line_no, key);
    else if (key == "eps_odd") eps_odd = parse_number<double>(value, line_no, key);
    else if (key == "eps_even") eps_even = parse_number<double>(value, line_no, key);
    else if (key == "M_odd") M_odd = parse_number<double>(value, line_no, key);
    else if (key == "M_even") M_even = parse_number<double>(value, line_no, key);
    else if (key == "t") spec.t = parse_number<double>(value, line_no, key);
    else if (key == "n_blocks") spec.n_blocks = parse_number<int>(value, line_no, key);
    else if (key == "tail_left") spec.tail_left = parse_number<double>(value, line_no, key);
    else if (key == "tail_right") spec.tail_right = parse_number<double>(value, line_no, key);
    else if (key == "depth") spec.depth = parse_number<double>(value, line_no, key);
    else throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
  }

  auto make_block = [](double theta_deg, double L, double eps, std::optional<double> M) {
    SectorBlockParams p{deg_to_rad(theta_deg), L, eps, 0.0};
    p.M = M.value_or(L * std::tan(p.theta) + std::max(1.0, eps));
    return p;
  };
  spec.block_odd = make_block(theta_odd, L_odd, eps_odd, M_odd);
  spec.block_even = make_block(theta_even, L_even, eps_even, M_even);

  try {
    spec.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what(), 0);
  }
  return spec;
}

ChainSpec load_chain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_spec(buf.str());
}

std::string format_chain_spec(const ChainSpec& spec) {
  auto num = [](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  auto deg = [](double rad) { return rad * 180.0 / kPi; };
  std::ostringstream out;
  out << "theta_odd_deg = " << num(deg(spec.block_odd.theta)) << "\n"
      << "theta_even_deg = " << num(deg(spec.block_even.theta)) << "\n"
      << "L_odd = " << num(spec.block_odd.L) << "\n"
      << "L_even = " << num(spec.block_even.L) << "\n"
      << "eps_odd = " << num(spec.block_odd.eps) << "\n"
      << "eps_even = " << num(spec.block_even.eps) << "\n"
      << "M_odd = " << num(spec.block_odd.M) << "\n"
      << "M_even = " << num(spec.block_even.M) << "\n"
      << "t = " << num(spec.t) << "\n"
      << "n_blocks = " << spec.n_blocks << "\n"
      << "tail_left = " << num(spec.tail_left) << "\n"
      << "tail_right = " << num(spec.tail_right) << "\n";
  if (spec.depth) out << "depth = " << num(*spec.depth) << "\n";
  return out.str();
}

}  // namespace robin::geometry
