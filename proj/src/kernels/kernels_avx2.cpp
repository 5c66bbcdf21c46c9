#include "dobb/kernels.hpp"

#if defined(DOBB_HAVE_AVX2)

#include <immintrin.h>

// AVX2 variants. Operand order matters: the running accumulator sits in the
// second operand of min/max so NaN slab candidates resolve to the accumulator,
// exactly as in the scalar reference (this file is compiled with -mavx2 but
// without FMA contraction, keeping mul+add sequences as written).

namespace dobb::kernels::detail {

void ray_box_8_avx2(const RaySetup& ray, const WideBoxSoA& b, float tMax,
                    float tEnter[kWideLanes]) {
    const __m256 ox = _mm256_set1_ps(ray.origin.x);
    const __m256 oy = _mm256_set1_ps(ray.origin.y);
    const __m256 oz = _mm256_set1_ps(ray.origin.z);
    const __m256 ix = _mm256_set1_ps(ray.invDir.x);
    const __m256 iy = _mm256_set1_ps(ray.invDir.y);
    const __m256 iz = _mm256_set1_ps(ray.invDir.z);

    const __m256 t1x = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.minX), ox), ix);
    const __m256 t2x = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.maxX), ox), ix);
    const __m256 t1y = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.minY), oy), iy);
    const __m256 t2y = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.maxY), oy), iy);
    const __m256 t1z = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.minZ), oz), iz);
    const __m256 t2z = _mm256_mul_ps(_mm256_sub_ps(_mm256_load_ps(b.maxZ), oz), iz);

    __m256 tn = _mm256_set1_ps(ray.tMin);
    __m256 tf = _mm256_set1_ps(tMax);
    tn = _mm256_max_ps(_mm256_min_ps(t1x, t2x), tn);
    tf = _mm256_min_ps(_mm256_max_ps(t1x, t2x), tf);
    tn = _mm256_max_ps(_mm256_min_ps(t1y, t2y), tn);
    tf = _mm256_min_ps(_mm256_max_ps(t1y, t2y), tf);
    tn = _mm256_max_ps(_mm256_min_ps(t1z, t2z), tn);
    tf = _mm256_min_ps(_mm256_max_ps(t1z, t2z), tf);
    tf = _mm256_mul_ps(tf, _mm256_set1_ps(kTFarGuard));

    // Same empty-lane validity test as the scalar path: the inverted empty
    // box would otherwise pass the slab chain untouched.
    const __m256 nonEmpty =
        _mm256_cmp_ps(_mm256_load_ps(b.minX), _mm256_load_ps(b.maxX), _CMP_LE_OQ);
    const __m256 hit = _mm256_and_ps(_mm256_cmp_ps(tn, tf, _CMP_LE_OQ), nonEmpty);
    const __m256 out = _mm256_blendv_ps(_mm256_set1_ps(kMiss), tn, hit);
    // The output array is caller stack memory with no alignment guarantee.
    _mm256_storeu_ps(tEnter, out);
}

void project_minmax_avx2(const Vec3* points, int count, const double* axisX,
                         const double* axisY, const double* axisZ, int paddedAxes,
                         double* minProj, double* maxProj) {
    for (int p = 0; p < count; ++p) {
        const __m256d px = _mm256_set1_pd(points[p].x);
        const __m256d py = _mm256_set1_pd(points[p].y);
        const __m256d pz = _mm256_set1_pd(points[p].z);
        for (int j = 0; j < paddedAxes; j += 4) {
            const __m256d ax = _mm256_loadu_pd(axisX + j);
            const __m256d ay = _mm256_loadu_pd(axisY + j);
            const __m256d az = _mm256_loadu_pd(axisZ + j);
            const __m256d d = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(ax, px), _mm256_mul_pd(ay, py)),
                _mm256_mul_pd(az, pz));
            const __m256d mn = _mm256_loadu_pd(minProj + j);
            const __m256d mx = _mm256_loadu_pd(maxProj + j);
            _mm256_storeu_pd(minProj + j, _mm256_min_pd(d, mn));
            _mm256_storeu_pd(maxProj + j, _mm256_max_pd(d, mx));
        }
    }
}

}  // namespace dobb::kernels::detail

#endif  // DOBB_HAVE_AVX2
