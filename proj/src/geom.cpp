#include "dobb/geom.hpp"

namespace dobb {

float surface_area(const Aabb& box) {
    if (box.is_empty()) return 0.0f;
    Vec3 d = box.extent();
    return 2.0f * (d.x * d.y + d.y * d.z + d.z * d.x);
}

std::optional<RayInterval> ray_aabb_intersect(const Ray& ray, const Aabb& box) {
    float ix = 1.0f / ray.dir.x, iy = 1.0f / ray.dir.y, iz = 1.0f / ray.dir.z;
    float t1x = (box.min.x - ray.origin.x) * ix, t2x = (box.max.x - ray.origin.x) * ix;
    float t1y = (box.min.y - ray.origin.y) * iy, t2y = (box.max.y - ray.origin.y) * iy;
    float t1z = (box.min.z - ray.origin.z) * iz, t2z = (box.max.z - ray.origin.z) * iz;

    // Accumulation order suppresses NaNs from 0 * inf (origin on a slab of a
    // zero-thickness axis): OP(candidate, acc) keeps acc when candidate is NaN.
    auto minf = [](float a, float b) { return a < b ? a : b; };
    auto maxf = [](float a, float b) { return a > b ? a : b; };
    float tNear = ray.tMin, tFar = ray.tMax;
    tNear = maxf(minf(t1x, t2x), tNear);
    tFar = minf(maxf(t1x, t2x), tFar);
    tNear = maxf(minf(t1y, t2y), tNear);
    tFar = minf(maxf(t1y, t2y), tFar);
    tNear = maxf(minf(t1z, t2z), tNear);
    tFar = minf(maxf(t1z, t2z), tFar);

    if (tNear > tFar) return std::nullopt;
    return RayInterval{tNear, tFar};
}

HitRecord ray_triangle_intersect(const Ray& ray, const Triangle& tri, int32_t primId) {
    Vec3 e1 = tri.v1 - tri.v0;
    Vec3 e2 = tri.v2 - tri.v0;
    Vec3 pvec = cross(ray.dir, e2);
    float det = dot(e1, pvec);
    if (det == 0.0f) return {};

    Vec3 tvec = ray.origin - tri.v0;
    Vec3 qvec = cross(tvec, e1);
    float su = dot(tvec, pvec);
    float sv = dot(ray.dir, qvec);

    // Edge rule evaluated on undivided numerators so sign decisions are exact
    // whenever the inputs are: u >= 0, v >= 0 inclusive, u + v = 1 exclusive.
    if (det > 0.0f) {
        if (su < 0.0f || sv < 0.0f || su + sv >= det) return {};
    } else {
        if (su > 0.0f || sv > 0.0f || su + sv <= det) return {};
    }

    float inv = 1.0f / det;
    float t = dot(e2, qvec) * inv;
    if (t < ray.tMin || t > ray.tMax) return {};

    HitRecord hit;
    hit.primId = primId;
    hit.t = t;
    hit.u = su * inv;
    hit.v = sv * inv;
    return hit;
}

Ray transform_ray(const Ray& ray, const Mat3& rot) {
    Ray out = ray;
    out.origin = rot.transpose_mul(ray.origin);
    out.dir = rot.transpose_mul(ray.dir);
    return out;
}

Mat3d axis_angle_rotation(const Vec3d& axis, double angle) {
    double x = axis.x, y = axis.y, z = axis.z;
    double c = std::cos(angle), s = std::sin(angle);
    double v = 1.0 - c;
    // columns of I + s K + v K^2 with K the cross-product matrix
    return {{c + x * x * v, x * y * v + z * s, x * z * v - y * s},
            {x * y * v - z * s, c + y * y * v, y * z * v + x * s},
            {x * z * v + y * s, y * z * v - x * s, c + z * z * v}};
}

float round_up_to_float(double v) {
    float f = static_cast<float>(v);
    if (static_cast<double>(f) < v)
        f = std::nextafter(f, std::numeric_limits<float>::infinity());
    return f;
}

float round_down_to_float(double v) {
    float f = static_cast<float>(v);
    if (static_cast<double>(f) > v)
        f = std::nextafter(f, -std::numeric_limits<float>::infinity());
    return f;
}

}  // namespace dobb
