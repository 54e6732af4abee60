#include <cstdlib>
#include <string_view>

#include "nhpd/errors.hpp"
#include "nhpd/kernels.hpp"

namespace nhpd::kernels {

void BondTable::resize(std::size_t n) {
  a.resize(n);
  b.resize(n);
  cos.resize(n);
  sin.resize(n);
  length.resize(n);
  w_normal.resize(n);
  w_shear.resize(n);
  w_rotation.resize(n);
}

const char* isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::Scalar) return true;
#if defined(NHPD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa default_isa() {
  if (const char* env = std::getenv("NHPD_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2") {
      if (!isa_available(Isa::Avx2)) throw ConfigError("NHPD_SIMD", "avx2 requested but not available");
      return Isa::Avx2;
    }
    throw ConfigError("NHPD_SIMD", "expected scalar or avx2");
  }
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

namespace scalar {

void deformations(const BondTable& t, std::span<const double> u, DeformationSpans out, std::size_t begin,
                  std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) {
    const std::size_t ia = 3 * static_cast<std::size_t>(t.a[k]);
    const std::size_t ib = 3 * static_cast<std::size_t>(t.b[k]);
    const double dx = u[ib] - u[ia];
    const double dy = u[ib + 1] - u[ia + 1];
    const double ma = u[ia + 2], mb = u[ib + 2];
    const double c = t.cos[k], s = t.sin[k], l = t.length[k];
    out.stretch[k] = (c * dx + s * dy) / l;
    out.shear[k] = (c * dy - s * dx) / l + 0.5 * (ma + mb);
    out.rotation[k] = mb - ma;
  }
}

void energies(const BondTable& t, ConstDeformationSpans def, std::span<double> out, std::size_t begin,
              std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) {
    const double s = def.stretch[k], g = def.shear[k], th = def.rotation[k];
    const double en = t.w_normal[k] * s * s;
    const double et = t.w_shear[k] * g * g;
    const double er = t.w_rotation[k] * th * th;
    out[k] = 0.5 * ((en + et) + er);
  }
}

void margins(std::span<const double> stretch, std::span<const double> critical, std::span<double> out,
             std::size_t begin, std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) out[k] = stretch[k] - critical[k];
}

void probe_terms(std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y, std::size_t begin, std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) {
    const double a2 = cos[k] * cos[k];
    const double b2 = sin[k] * sin[k];
    const double ln = length[k] * normal[k];
    const double shear_term = length[k] * shear[k] * (a2 * b2);
    out_x[k] = ln * (a2 * a2) + shear_term;
    out_y[k] = ln * (b2 * b2) + shear_term;
  }
}

}  // namespace scalar

void deformations(Isa isa, const BondTable& t, std::span<const double> u, DeformationSpans out) {
#ifdef NHPD_HAVE_AVX2
  if (isa == Isa::Avx2) return avx2::deformations(t, u, out);
#endif
  (void)isa;
  scalar::deformations(t, u, out, 0, t.size());
}

void energies(Isa isa, const BondTable& t, ConstDeformationSpans def, std::span<double> out) {
#ifdef NHPD_HAVE_AVX2
  if (isa == Isa::Avx2) return avx2::energies(t, def, out);
#endif
  (void)isa;
  scalar::energies(t, def, out, 0, t.size());
}

void margins(Isa isa, std::span<const double> stretch, std::span<const double> critical, std::span<double> out) {
#ifdef NHPD_HAVE_AVX2
  if (isa == Isa::Avx2) return avx2::margins(stretch, critical, out);
#endif
  (void)isa;
  scalar::margins(stretch, critical, out, 0, stretch.size());
}

void probe_terms(Isa isa, std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y) {
#ifdef NHPD_HAVE_AVX2
  if (isa == Isa::Avx2) return avx2::probe_terms(cos, sin, length, normal, shear, out_x, out_y);
#endif
  (void)isa;
  scalar::probe_terms(cos, sin, length, normal, shear, out_x, out_y, 0, cos.size());
}

}  // namespace nhpd::kernels
