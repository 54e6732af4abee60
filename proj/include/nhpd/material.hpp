#pragma once

#include <string_view>

namespace nhpd {

enum class PlaneMode { Stress, Strain };

PlaneMode parse_plane_mode(std::string_view text);
const char* to_string(PlaneMode mode) noexcept;

/// Isotropic elastic-brittle solid in 2D.
struct Material {
  double youngs_modulus = 0.0;     // E [Pa]
  double poisson_ratio = 0.0;      // nu
  double tensile_strength = 0.0;   // F_t [Pa]
  double thickness = 1.0;          // t [m]
  PlaneMode plane = PlaneMode::Stress;

  /// Throws ConfigError for E, F_t or t <= 0, nu outside (-1, 0.5), and for
  /// nu values that make the rotational spring factor negative
  /// (nu > 1/3 in plane stress, nu > 1/4 in plane strain).
  void validate() const;
};

}  // namespace nhpd
