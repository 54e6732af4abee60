#pragma once

// Batched per-bond arithmetic over structure-of-arrays bond tables.
//
// Every kernel has a scalar reference in nhpd::kernels::scalar and, when the
// build supports it, an AVX2 variant in nhpd::kernels::avx2. Both evaluate
// the same operations in the same order without fused multiply-add, so
// per-bond outputs agree bit for bit. Dispatch happens at runtime.

#include <cstdint>
#include <span>
#include <vector>

namespace nhpd::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// Widest available ISA unless NHPD_SIMD=scalar|avx2 overrides it.
Isa default_isa();

/// Bond geometry and stiffness weights in SoA layout.
/// w_normal = P l k_n, w_shear = P l k_t, w_rotation = P k_theta with
/// P = omega alpha V_A V_B, so a bond's energy is
/// (w_normal s^2 + w_shear gamma^2 + w_rotation theta^2) / 2.
struct BondTable {
  std::vector<std::int32_t> a, b;
  std::vector<double> cos, sin, length;
  std::vector<double> w_normal, w_shear, w_rotation;

  std::size_t size() const noexcept { return a.size(); }
  void resize(std::size_t n);
};

struct DeformationSpans {
  std::span<double> stretch, shear, rotation;
};

struct ConstDeformationSpans {
  std::span<const double> stretch, shear, rotation;
};

/// (s, gamma, theta) of every bond for the nodal dof vector u = [ux, uy, m]*.
void deformations(Isa isa, const BondTable& t, std::span<const double> u, DeformationSpans out);

/// Per-bond elastic energy from precomputed deformations.
void energies(Isa isa, const BondTable& t, ConstDeformationSpans def, std::span<double> out);

/// stretch - critical stretch.
void margins(Isa isa, std::span<const double> stretch, std::span<const double> critical, std::span<double> out);

/// Unit-strain probe terms of each bond without the omega alpha V factor:
/// x: l k_n a^4 + l k_t a^2 b^2, y: l k_n b^4 + l k_t a^2 b^2,
/// where (a, b) are the direction cosines.
void probe_terms(Isa isa, std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y);

namespace scalar {
void deformations(const BondTable& t, std::span<const double> u, DeformationSpans out, std::size_t begin,
                  std::size_t end);
void energies(const BondTable& t, ConstDeformationSpans def, std::span<double> out, std::size_t begin,
              std::size_t end);
void margins(std::span<const double> stretch, std::span<const double> critical, std::span<double> out,
             std::size_t begin, std::size_t end);
void probe_terms(std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y, std::size_t begin, std::size_t end);
}  // namespace scalar

#ifdef NHPD_HAVE_AVX2
namespace avx2 {
void deformations(const BondTable& t, std::span<const double> u, DeformationSpans out);
void energies(const BondTable& t, ConstDeformationSpans def, std::span<double> out);
void margins(std::span<const double> stretch, std::span<const double> critical, std::span<double> out);
void probe_terms(std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y);
}  // namespace avx2
#endif

}  // namespace nhpd::kernels
