#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lightplan {

/// Angular intensity distribution of a luminaire.
///
/// Angles follow IES type C conventions: the vertical angle is measured from
/// nadir (0 = straight down, 180 = straight up) and the horizontal angle is a
/// plan-view azimuth in [0, 360).
struct PhotometricProfile {
  enum class Kind { isotropic, cosine_lobe, ies_table };

  Kind kind = Kind::isotropic;
  std::vector<double> vertical_angles;    // degrees, strictly increasing
  std::vector<double> horizontal_angles;  // degrees, strictly increasing
  std::vector<std::vector<double>> candela;  // [horizontal][vertical]
  std::string source;                     // path the table was read from, if any

  static PhotometricProfile isotropic() { return {}; }
  static PhotometricProfile cosine_lobe() {
    PhotometricProfile p;
    p.kind = Kind::cosine_lobe;
    return p;
  }

  /// Candela from the table, bilinear between grid nodes and clamped at the
  /// grid edges. Horizontal symmetry (single angle, 0-90 or 0-180) is unfolded
  /// first. Only meaningful for ies_table.
  double lookup(double vertical_deg, double horizontal_deg) const;

  /// Intensity toward the given direction as a fraction of the luminaire's
  /// peak, in [0, 1].
  double relative_intensity(double vertical_deg, double horizontal_deg) const;

  /// Largest candela value in the table.
  double peak() const;

  friend bool operator==(const PhotometricProfile&, const PhotometricProfile&) = default;
};

/// Parses IES LM-63 text. Only TILT=NONE is accepted; throws ParseError on
/// unsupported tilt, truncated tables, non-monotonic angles or negative values.
/// The candela multiplier is folded into the table.
PhotometricProfile parse_ies(std::string_view text);

/// Reads and parses an IES file; `source` on the result is set to `path`.
PhotometricProfile load_ies(const std::string& path);

}  // namespace lightplan
