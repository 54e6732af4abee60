#pragma once

#include <vector>

#include "nhpd/model.hpp"

namespace nhpd {

/// Strain energy density at uniaxial tension with stress F_t.
double critical_energy_density(const Material& material);

/// s0 = sqrt(e0 (V_A + V_B) / (omega alpha V_A V_B c l)).
double critical_stretch(const BondCoefficients& bond, double e0);

/// Energy density at an endpoint implied by this bond's stretch s alone
/// (twice its half share): omega alpha V_A V_B c l s^2 / (V_A + V_B).
/// Equals e0 at s = s0.
double bond_energy_dedication(const BondCoefficients& bond, double stretch);

/// Fills Bond::critical_stretch for every bond from the current omegas.
void assign_critical_stretches(Model& model);

/// stretch - s0; the bond breaks once this is >= 0.
inline double breakage_margin(double stretch, double critical) { return stretch - critical; }

/// 1 - sum (1 - d) omega alpha / sum omega alpha over incident bonds.
/// Points without bonds report 1.
double point_damage(const Model& model, std::size_t point);
std::vector<double> damage_field(const Model& model);

}  // namespace nhpd
