#include "dobb/kernels.hpp"

// Reference implementations. The select expressions below mirror x86 vector
// min/max semantics exactly (second operand wins on NaN or tie), so the SIMD
// variants are bit-identical without per-lane fixups.

namespace dobb::kernels::detail {

namespace {
inline float vmin(float a, float b) { return a < b ? a : b; }
inline float vmax(float a, float b) { return a > b ? a : b; }
inline double vmin(double a, double b) { return a < b ? a : b; }
inline double vmax(double a, double b) { return a > b ? a : b; }
}  // namespace

void ray_box_8_scalar(const RaySetup& ray, const WideBoxSoA& b, float tMax,
                      float tEnter[kWideLanes]) {
    for (int i = 0; i < kWideLanes; ++i) {
        const float t1x = (b.minX[i] - ray.origin.x) * ray.invDir.x;
        const float t2x = (b.maxX[i] - ray.origin.x) * ray.invDir.x;
        const float t1y = (b.minY[i] - ray.origin.y) * ray.invDir.y;
        const float t2y = (b.maxY[i] - ray.origin.y) * ray.invDir.y;
        const float t1z = (b.minZ[i] - ray.origin.z) * ray.invDir.z;
        const float t2z = (b.maxZ[i] - ray.origin.z) * ray.invDir.z;
        // Accumulation order drops NaN slab candidates (0 * inf) in favor of
        // the running bound, matching the vector blends.
        float tn = ray.tMin;
        float tf = tMax;
        tn = vmax(vmin(t1x, t2x), tn);
        tf = vmin(vmax(t1x, t2x), tf);
        tn = vmax(vmin(t1y, t2y), tn);
        tf = vmin(vmax(t1y, t2y), tf);
        tn = vmax(vmin(t1z, t2z), tn);
        tf = vmin(vmax(t1z, t2z), tf);
        tf *= kTFarGuard;
        // The inverted empty box passes the slab chain untouched (its
        // infinities cancel out of the min/max order), so unused lanes need
        // the explicit min <= max validity check to miss.
        tEnter[i] = (tn <= tf && b.minX[i] <= b.maxX[i]) ? tn : kMiss;
    }
}

void project_minmax_scalar(const Vec3* points, int count, const double* axisX,
                           const double* axisY, const double* axisZ, int paddedAxes,
                           double* minProj, double* maxProj) {
    for (int p = 0; p < count; ++p) {
        const double px = points[p].x, py = points[p].y, pz = points[p].z;
        for (int j = 0; j < paddedAxes; ++j) {
            const double d = (axisX[j] * px + axisY[j] * py) + axisZ[j] * pz;
            minProj[j] = vmin(d, minProj[j]);
            maxProj[j] = vmax(d, maxProj[j]);
        }
    }
}

}  // namespace dobb::kernels::detail
