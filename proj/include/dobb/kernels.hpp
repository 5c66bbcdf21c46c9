#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "dobb/geom.hpp"

// Arithmetic inner loops used by DOP projection and wide-node traversal.
// Every kernel has a scalar reference and may have SIMD variants selected at
// runtime; all variants produce bit-identical results (enforced by tests),
// so the chosen backend never changes any measurement.

namespace dobb::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
bool backend_available(Backend b);
void set_backend(Backend b);  // throws std::invalid_argument if unavailable
std::string backend_name(Backend b);

inline constexpr int kWideLanes = 8;
inline constexpr float kMiss = std::numeric_limits<float>::infinity();

// Child boxes of one wide node, struct-of-arrays across lanes. Unused lanes
// hold the inverted-infinity empty box, which can never be hit.
struct alignas(32) WideBoxSoA {
    float minX[kWideLanes], minY[kWideLanes], minZ[kWideLanes];
    float maxX[kWideLanes], maxY[kWideLanes], maxZ[kWideLanes];

    void set(int lane, const Aabb& b) {
        minX[lane] = b.min.x; minY[lane] = b.min.y; minZ[lane] = b.min.z;
        maxX[lane] = b.max.x; maxY[lane] = b.max.y; maxZ[lane] = b.max.z;
    }
    void set_empty(int lane) { set(lane, Aabb::empty()); }
    Aabb get(int lane) const {
        return {{minX[lane], minY[lane], minZ[lane]}, {maxX[lane], maxY[lane], maxZ[lane]}};
    }
};

struct RaySetup {
    Vec3 origin;
    Vec3 invDir;  // IEEE infinities for zero direction components
    float tMin;

    static RaySetup make(const Ray& r) {
        return {r.origin, {1.0f / r.dir.x, 1.0f / r.dir.y, 1.0f / r.dir.z}, r.tMin};
    }
};

// Slab-tests one ray against all 8 box lanes, clipped to [tMin, tMax]. Hit
// lanes receive the clipped entry distance in tEnter, misses receive kMiss.
// The exit side carries a small relative guard so hits exactly on a box face
// survive rounding.
void ray_box_8(const RaySetup& ray, const WideBoxSoA& boxes, float tMax,
               float tEnter[kWideLanes]);

// Folds min/max of dot(point, axis_j) over all points into minProj/maxProj[j].
// Axis components are SoA arrays padded to a multiple of 4 lanes (pad with
// zeros); accumulators are caller-initialized (+inf/-inf).
void project_minmax(const Vec3* points, int count, const double* axisX,
                    const double* axisY, const double* axisZ, int paddedAxes,
                    double* minProj, double* maxProj);

namespace detail {
void ray_box_8_scalar(const RaySetup&, const WideBoxSoA&, float, float[kWideLanes]);
void project_minmax_scalar(const Vec3*, int, const double*, const double*, const double*,
                           int, double*, double*);
#if defined(DOBB_HAVE_AVX2)
void ray_box_8_avx2(const RaySetup&, const WideBoxSoA&, float, float[kWideLanes]);
void project_minmax_avx2(const Vec3*, int, const double*, const double*, const double*,
                         int, double*, double*);
#endif
inline constexpr float kTFarGuard = 1.00000024f;
}  // namespace detail

}  // namespace dobb::kernels
