#pragma once

// Tent profiles, their mollified versions, single building blocks and the
// glued chain domain. Every domain produced here is a bounded subgraph domain
// {x_l < x < x_r, -D < y < H(x)}.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robin::geometry {

inline constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double degrees);

/// Parameters (theta, L, eps, M) of one building block.
///
/// theta is the half-opening angle of the tent in radians, L its height, eps the
/// mollification radius and M the half-width of the block.
struct SectorBlockParams {
  double theta = kPi / 6;
  double L = 1.0;
  double eps = 0.1;
  double M = 1.0;

  /// Throws InvalidParameter unless 0 < theta < pi/2, L > 0, eps > 0 and
  /// M >= L tan(theta) + eps.
  void validate() const;

  double half_support() const;  // L tan(theta) + eps
  double cot_theta() const;

  /// Smallest admissible M for the given (theta, L, eps) plus `margin`.
  static SectorBlockParams with_margin(double theta, double L, double eps, double margin);
};

/// h_{theta,L}(x) = L - |x| cot(theta) on |x| <= L tan(theta), zero elsewhere.
double tent_profile(double theta, double L, double x);

/// Normalisation constant Z of the bump exp(-1/(1 - x^2)) on (-1, 1).
double bump_normalization();

/// phi_eps(x) = phi(x / eps) / eps with phi(x) = exp(-1/(1-x^2)) / Z on (-1, 1).
double mollifier_eval(double eps, double x);

/// Derivative of phi_eps.
double mollifier_derivative(double eps, double x);

struct ProfileSample {
  double x;
  double h;
  double dh;
};

/// h_{theta,L,eps} = h_{theta,L} * phi_eps and its derivative.
///
/// Outside the three eps-neighbourhoods of the kinks {-L tan(theta), 0, L tan(theta)}
/// the value is the tent itself. Inside, the convolution reduces to the smoothed
/// ramp R_eps = (x)_+ * phi_eps and its derivative Phi_eps (the cumulative
/// mollifier), both tabulated once on a grid of spacing eps/64 and interpolated
/// with cubic Hermite polynomials.
class MollifiedProfile {
 public:
  explicit MollifiedProfile(const SectorBlockParams& params);

  double value(double x) const;
  double slope(double x) const;

  const SectorBlockParams& params() const noexcept { return params_; }
  std::span<const ProfileSample> corner_samples() const noexcept { return samples_; }
  double sample_spacing() const noexcept { return params_.eps / kSamplesPerEps; }

  /// True when x lies in one of the closed eps-neighbourhoods of a kink.
  bool in_corner_zone(double x) const;

  double half_support() const noexcept { return params_.half_support(); }
  double lipschitz() const noexcept { return params_.cot_theta(); }

  static constexpr int kSamplesPerEps = 64;

 private:
  SectorBlockParams params_;
  std::vector<ProfileSample> samples_;
};

/// Builds the profile; throws QuadratureFailure if the corner-zone table does not converge.
std::shared_ptr<const MollifiedProfile> mollified_profile(const SectorBlockParams& params);

enum class BoundaryTag { RobinTop = 0, SideLeft = 1, SideRight = 2, Bottom = 3 };

inline constexpr std::array<BoundaryTag, 4> kAllTags = {
    BoundaryTag::RobinTop, BoundaryTag::SideLeft, BoundaryTag::SideRight, BoundaryTag::Bottom};

std::string_view tag_name(BoundaryTag tag);
/// Throws UnknownTag for anything but RobinTop, SideLeft, SideRight, Bottom.
BoundaryTag parse_tag(std::string_view name);

/// Small value-type set of boundary tags.
class TagSet {
 public:
  constexpr TagSet() = default;
  constexpr TagSet(std::initializer_list<BoundaryTag> tags) {
    for (auto t : tags) bits_ |= bit(t);
  }
  static constexpr TagSet all() { return TagSet{kAllTags[0], kAllTags[1], kAllTags[2], kAllTags[3]}; }

  constexpr bool contains(BoundaryTag t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr TagSet complement() const {
    TagSet out;
    out.bits_ = static_cast<unsigned>(~bits_) & 0xFu;
    return out;
  }
  constexpr bool intersects(TagSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr bool operator==(const TagSet&) const = default;

 private:
  static constexpr unsigned bit(BoundaryTag t) { return 1u << static_cast<unsigned>(t); }
  unsigned bits_ = 0;
};

/// One interval of the top curve: flat (profile == nullptr) or a shifted, scaled
/// mollified profile H(x) = scale * h((x - center) / scale).
struct ProfileSegment {
  double x0 = 0.0;
  double x1 = 0.0;
  std::shared_ptr<const MollifiedProfile> profile;
  double scale = 1.0;
  double center = 0.0;

  double height(double x) const;
  double slope(double x) const;
};

enum class BoundaryPiece { TopCurve, LeftSide, RightSide, Bottom };

/// Bounded subgraph domain {x_l < x < x_r, -depth < y < H(x)}.
class PlanarDomain {
 public:
  PlanarDomain(double x_left, double x_right, std::vector<double> junctions,
               std::vector<ProfileSegment> segments, double depth);

  double x_left() const noexcept { return x_left_; }
  double x_right() const noexcept { return x_right_; }
  double depth() const noexcept { return depth_; }
  const std::vector<double>& junctions() const noexcept { return junctions_; }
  const std::vector<ProfileSegment>& segments() const noexcept { return segments_; }

  double height(double x) const;
  double slope(double x) const;

  /// max over segments of cot(theta); zero for a flat top.
  double lipschitz() const;
  double max_height() const;

  /// Straight piece of the top curve, the box closure and their tags.
  static constexpr std::array<std::pair<BoundaryPiece, BoundaryTag>, 4> boundary_tags() {
    return {{{BoundaryPiece::TopCurve, BoundaryTag::RobinTop},
             {BoundaryPiece::LeftSide, BoundaryTag::SideLeft},
             {BoundaryPiece::RightSide, BoundaryTag::SideRight},
             {BoundaryPiece::Bottom, BoundaryTag::Bottom}}};
  }

  /// Abscissas where the top curve has features worth resolving: the kink zones
  /// of every block as (lo, hi) intervals in domain coordinates.
  std::vector<std::pair<double, double>> corner_zones() const;

 private:
  const ProfileSegment& segment_at(double x) const;

  double x_left_;
  double x_right_;
  std::vector<double> junctions_;
  std::vector<ProfileSegment> segments_;
  double depth_;
};

/// The block c * U_{theta,L,eps,M} truncated at y = -depth.
PlanarDomain build_block(const SectorBlockParams& params, double c, double depth);

/// Glued chain: flat tail, blocks 1..N, flat tail.
///
/// Block n (1-indexed) uses `block_odd` for odd n and `block_even` for even n and
/// is scaled by t^(n-1), so block 1 has unit scale and block n is matched to the
/// Robin parameter -gamma^(n-1) with gamma = 1/t. The last junction sits at x = 0.
struct ChainSpec {
  SectorBlockParams block_odd = SectorBlockParams::with_margin(kPi / 6, 6.0, 0.0625, 1.0);
  SectorBlockParams block_even = SectorBlockParams::with_margin(kPi / 3, 6.0, 0.1, 1.0);
  double t = 1.0 / 32.0;
  int n_blocks = 2;
  double tail_left = 4.0;
  double tail_right = 4.0;
  /// Empty means max block height + 2.
  std::optional<double> depth;

  void validate() const;
  double gamma() const { return 1.0 / t; }
  double block_scale(int n) const;
  const SectorBlockParams& block(int n) const { return (n % 2 == 1) ? block_odd : block_even; }
  double max_block_height() const;
  double resolved_depth() const;
};

PlanarDomain build_chain_domain(const ChainSpec& spec);

/// Parses the `key = value` domain file format. Missing keys keep the defaults of
/// ChainSpec; angles are in degrees. Throws ConfigError with the line number.
ChainSpec parse_chain_spec(std::string_view text);
ChainSpec load_chain_spec(const std::string& path);
std::string format_chain_spec(const ChainSpec& spec);

}  // namespace robin::geometry
