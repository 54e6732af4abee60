// Compiled with -mavx2 (no FMA). Mirrors kernels_scalar.cpp lane by lane.
#include <immintrin.h>

#include "nhpd/kernels.hpp"

namespace nhpd::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d gather(const double* base, __m128i idx) { return _mm256_i32gather_pd(base, idx, 8); }

}  // namespace

void deformations(const BondTable& t, std::span<const double> u, DeformationSpans out) {
  const std::size_t n = t.size();
  const std::size_t vec_end = n - n % kLanes;
  const double* ub = u.data();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m128i one = _mm_set1_epi32(1), two = _mm_set1_epi32(2);
  for (std::size_t k = 0; k < vec_end; k += kLanes) {
    const __m128i a = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.a.data() + k));
    const __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(t.b.data() + k));
    const __m128i ia = _mm_add_epi32(_mm_add_epi32(a, a), a);
    const __m128i ib = _mm_add_epi32(_mm_add_epi32(b, b), b);
    const __m256d uxa = gather(ub, ia), uya = gather(ub, _mm_add_epi32(ia, one)), ma = gather(ub, _mm_add_epi32(ia, two));
    const __m256d uxb = gather(ub, ib), uyb = gather(ub, _mm_add_epi32(ib, one)), mb = gather(ub, _mm_add_epi32(ib, two));
    const __m256d dx = _mm256_sub_pd(uxb, uxa);
    const __m256d dy = _mm256_sub_pd(uyb, uya);
    const __m256d c = _mm256_loadu_pd(t.cos.data() + k);
    const __m256d s = _mm256_loadu_pd(t.sin.data() + k);
    const __m256d l = _mm256_loadu_pd(t.length.data() + k);
    const __m256d stretch = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(c, dx), _mm256_mul_pd(s, dy)), l);
    const __m256d shear = _mm256_add_pd(_mm256_div_pd(_mm256_sub_pd(_mm256_mul_pd(c, dy), _mm256_mul_pd(s, dx)), l),
                                        _mm256_mul_pd(half, _mm256_add_pd(ma, mb)));
    _mm256_storeu_pd(out.stretch.data() + k, stretch);
    _mm256_storeu_pd(out.shear.data() + k, shear);
    _mm256_storeu_pd(out.rotation.data() + k, _mm256_sub_pd(mb, ma));
  }
  scalar::deformations(t, u, out, vec_end, n);
}

void energies(const BondTable& t, ConstDeformationSpans def, std::span<double> out) {
  const std::size_t n = t.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d half = _mm256_set1_pd(0.5);
  for (std::size_t k = 0; k < vec_end; k += kLanes) {
    const __m256d s = _mm256_loadu_pd(def.stretch.data() + k);
    const __m256d g = _mm256_loadu_pd(def.shear.data() + k);
    const __m256d th = _mm256_loadu_pd(def.rotation.data() + k);
    const __m256d en = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(t.w_normal.data() + k), s), s);
    const __m256d et = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(t.w_shear.data() + k), g), g);
    const __m256d er = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(t.w_rotation.data() + k), th), th);
    _mm256_storeu_pd(out.data() + k, _mm256_mul_pd(half, _mm256_add_pd(_mm256_add_pd(en, et), er)));
  }
  scalar::energies(t, def, out, vec_end, n);
}

void margins(std::span<const double> stretch, std::span<const double> critical, std::span<double> out) {
  const std::size_t n = stretch.size();
  const std::size_t vec_end = n - n % kLanes;
  for (std::size_t k = 0; k < vec_end; k += kLanes)
    _mm256_storeu_pd(out.data() + k,
                     _mm256_sub_pd(_mm256_loadu_pd(stretch.data() + k), _mm256_loadu_pd(critical.data() + k)));
  scalar::margins(stretch, critical, out, vec_end, n);
}

void probe_terms(std::span<const double> cos, std::span<const double> sin, std::span<const double> length,
                 std::span<const double> normal, std::span<const double> shear, std::span<double> out_x,
                 std::span<double> out_y) {
  const std::size_t n = cos.size();
  const std::size_t vec_end = n - n % kLanes;
  for (std::size_t k = 0; k < vec_end; k += kLanes) {
    const __m256d c = _mm256_loadu_pd(cos.data() + k);
    const __m256d s = _mm256_loadu_pd(sin.data() + k);
    const __m256d l = _mm256_loadu_pd(length.data() + k);
    const __m256d a2 = _mm256_mul_pd(c, c);
    const __m256d b2 = _mm256_mul_pd(s, s);
    const __m256d ln = _mm256_mul_pd(l, _mm256_loadu_pd(normal.data() + k));
    const __m256d shear_term =
        _mm256_mul_pd(_mm256_mul_pd(l, _mm256_loadu_pd(shear.data() + k)), _mm256_mul_pd(a2, b2));
    _mm256_storeu_pd(out_x.data() + k, _mm256_add_pd(_mm256_mul_pd(ln, _mm256_mul_pd(a2, a2)), shear_term));
    _mm256_storeu_pd(out_y.data() + k, _mm256_add_pd(_mm256_mul_pd(ln, _mm256_mul_pd(b2, b2)), shear_term));
  }
  scalar::probe_terms(cos, sin, length, normal, shear, out_x, out_y, vec_end, n);
}

}  // namespace nhpd::kernels::avx2
