#include "nhpd/material.hpp"

#include <cmath>
#include <string>

#include "nhpd/errors.hpp"

namespace nhpd {

PlaneMode parse_plane_mode(std::string_view text) {
  if (text == "stress") return PlaneMode::Stress;
  if (text == "strain") return PlaneMode::Strain;
  throw ConfigError("material.plane", "expected \"stress\" or \"strain\", got \"" + std::string(text) + "\"");
}

const char* to_string(PlaneMode mode) noexcept {
  return mode == PlaneMode::Stress ? "stress" : "strain";
}

void Material::validate() const {
  if (!(youngs_modulus > 0.0) || !std::isfinite(youngs_modulus))
    throw ConfigError("material.E", "must be positive");
  if (!(tensile_strength > 0.0) || !std::isfinite(tensile_strength))
    throw ConfigError("material.Ft", "must be positive");
  if (!(thickness > 0.0) || !std::isfinite(thickness))
    throw ConfigError("material.thickness", "must be positive");
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5))
    throw ConfigError("material.nu", "must lie in (-1, 0.5)");
  const double limit = plane == PlaneMode::Stress ? 1.0 / 3.0 : 0.25;
  if (poisson_ratio > limit)
    throw ConfigError("material.nu",
                      std::string("rotational/shear spring factor d becomes negative for nu > ") +
                          (plane == PlaneMode::Stress ? "1/3 (plane stress)" : "1/4 (plane strain)"));
}

}  // namespace nhpd
