#pragma once

#include <Eigen/Core>
#include <span>

#include "nhpd/horizon.hpp"
#include "nhpd/material.hpp"

namespace nhpd {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec3 = Eigen::Vector3d;

/// Direction cosines and length of the segment A -> B.
struct BondFrame {
  double cos = 1.0;  // (xB - xA) / l
  double sin = 0.0;  // (yB - yA) / l
  double length = 0.0;
};

BondFrame bond_frame(double xa, double ya, double xb, double yb);

/// 6x6 block rotation acting on [uxA, uyA, mA, uxB, uyB, mB].
Mat6 rotation_matrix(const BondFrame& frame);

/// Maps local end displacements to (stretch, shear, relative rotation).
Mat36 kinematic_matrix(double length);

/// Spring stiffness factors of one bond. `c` and `d` are the underlying
/// material factors; normal = c, shear = 12 d / l^2, rotational = d / l.
struct SpringFactors {
  double normal = 0.0;
  double shear = 0.0;
  double rotational = 0.0;
  double c = 0.0;
  double d = 0.0;
};

SpringFactors stiffness_factors(const Material& material, double bond_horizon, double length);

/// Length weight favouring short bonds; endpoints whose bonds all share one
/// length contribute exp(0) = 1.
double length_correction(double length, double a_min, double a_max, double b_min, double b_max);

/// Fills Bond::alpha from the min/max incident bond lengths of both ends.
void assign_length_corrections(std::span<Bond> bonds, const Adjacency& adjacency);

/// Everything needed to evaluate one bond's stiffness and energy.
struct BondCoefficients {
  BondFrame frame;
  SpringFactors springs;
  double omega = 1.0;
  double alpha = 1.0;
  double volume_a = 0.0;
  double volume_b = 0.0;

  double prefactor() const { return omega * alpha * volume_a * volume_b; }
};

struct BondDeformation {
  double stretch = 0.0;   // s
  double shear = 0.0;     // gamma
  double rotation = 0.0;  // theta
};

struct BondForces {
  double normal = 0.0;  // f_n
  double shear = 0.0;   // f_t
  double moment = 0.0;  // m_theta
};

/// K = omega alpha V_A V_B R^T B L D B^T R.
Mat6 element_stiffness(const BondCoefficients& bond);

BondDeformation bond_deformation(const BondFrame& frame, const Vec3& ua, const Vec3& ub);

BondForces bond_forces(const BondDeformation& def, const SpringFactors& springs, double omega, double alpha);

/// V_A V_B (f_n s l + f_t gamma l + m_theta theta) / 2, evaluated from the
/// deformation measures rather than from the assembled matrix.
double bond_energy(const BondCoefficients& bond, const Vec3& ua, const Vec3& ub);

}  // namespace nhpd
