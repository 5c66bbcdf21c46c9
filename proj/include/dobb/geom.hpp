#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace dobb {

template <typename T>
struct Vec3t {
    T x = 0, y = 0, z = 0;

    constexpr Vec3t() = default;
    constexpr Vec3t(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    template <typename U>
    explicit constexpr operator Vec3t<U>() const {
        return {static_cast<U>(x), static_cast<U>(y), static_cast<U>(z)};
    }

    constexpr Vec3t operator+(const Vec3t& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3t operator-(const Vec3t& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3t operator*(T s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3t operator/(T s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3t operator-() const { return {-x, -y, -z}; }
    constexpr Vec3t& operator+=(const Vec3t& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3t& operator-=(const Vec3t& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3t& operator*=(T s) { x *= s; y *= s; z *= s; return *this; }
    constexpr bool operator==(const Vec3t& o) const { return x == o.x && y == o.y && z == o.z; }

    constexpr T operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

template <typename T> constexpr Vec3t<T> operator*(T s, const Vec3t<T>& v) { return v * s; }

template <typename T>
constexpr T dot(const Vec3t<T>& a, const Vec3t<T>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
constexpr Vec3t<T> cross(const Vec3t<T>& a, const Vec3t<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T> T length(const Vec3t<T>& v) { return std::sqrt(dot(v, v)); }

template <typename T> Vec3t<T> normalize(const Vec3t<T>& v) { return v / length(v); }

template <typename T>
constexpr Vec3t<T> min(const Vec3t<T>& a, const Vec3t<T>& b) {
    return {a.x < b.x ? a.x : b.x, a.y < b.y ? a.y : b.y, a.z < b.z ? a.z : b.z};
}

template <typename T>
constexpr Vec3t<T> max(const Vec3t<T>& a, const Vec3t<T>& b) {
    return {a.x > b.x ? a.x : b.x, a.y > b.y ? a.y : b.y, a.z > b.z ? a.z : b.z};
}

template <typename T>
constexpr T max_abs_component(const Vec3t<T>& v) {
    T ax = v.x < 0 ? -v.x : v.x, ay = v.y < 0 ? -v.y : v.y, az = v.z < 0 ? -v.z : v.z;
    T m = ax > ay ? ax : ay;
    return m > az ? m : az;
}

template <typename T> bool is_finite(const Vec3t<T>& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

using Vec3 = Vec3t<float>;
using Vec3d = Vec3t<double>;

// Column-major 3x3 matrix. When used as an OBB rotation the columns are the
// box frame's basis vectors (world-from-local); rays are taken into the box
// frame by multiplying with the transpose.
template <typename T>
struct Mat3t {
    Vec3t<T> col[3];

    constexpr Mat3t() = default;
    constexpr Mat3t(const Vec3t<T>& c0, const Vec3t<T>& c1, const Vec3t<T>& c2)
        : col{c0, c1, c2} {}

    static constexpr Mat3t identity() {
        return {{T(1), 0, 0}, {0, T(1), 0}, {0, 0, T(1)}};
    }

    template <typename U>
    explicit constexpr operator Mat3t<U>() const {
        return {static_cast<Vec3t<U>>(col[0]), static_cast<Vec3t<U>>(col[1]),
                static_cast<Vec3t<U>>(col[2])};
    }

    constexpr Vec3t<T> operator*(const Vec3t<T>& v) const {
        return col[0] * v.x + col[1] * v.y + col[2] * v.z;
    }

    constexpr Mat3t operator*(const Mat3t& o) const {
        return {*this * o.col[0], *this * o.col[1], *this * o.col[2]};
    }

    constexpr Mat3t transposed() const {
        return {{col[0].x, col[1].x, col[2].x},
                {col[0].y, col[1].y, col[2].y},
                {col[0].z, col[1].z, col[2].z}};
    }

    // R^T * v without materializing the transpose.
    constexpr Vec3t<T> transpose_mul(const Vec3t<T>& v) const {
        return {dot(col[0], v), dot(col[1], v), dot(col[2], v)};
    }

    constexpr bool operator==(const Mat3t& o) const {
        return col[0] == o.col[0] && col[1] == o.col[1] && col[2] == o.col[2];
    }

    constexpr T trace() const { return col[0].x + col[1].y + col[2].z; }

    T det() const {
        return dot(col[0], cross(col[1], col[2]));
    }

    // max |R R^T - I| over all entries
    T orthonormality_error() const {
        Mat3t g = *this * transposed();
        T e = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                T want = i == j ? T(1) : T(0);
                T d = std::abs(g.col[i][j] - want);
                e = e > d ? e : d;
            }
        return e;
    }
};

using Mat3 = Mat3t<float>;
using Mat3d = Mat3t<double>;

struct Aabb {
    Vec3 min{std::numeric_limits<float>::infinity(), std::numeric_limits<float>::infinity(),
             std::numeric_limits<float>::infinity()};
    Vec3 max{-std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity(),
             -std::numeric_limits<float>::infinity()};

    static Aabb empty() { return {}; }

    bool is_empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }

    void grow(const Vec3& p) { min = dobb::min(min, p); max = dobb::max(max, p); }
    void grow(const Aabb& b) { min = dobb::min(min, b.min); max = dobb::max(max, b.max); }

    Vec3 extent() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5f; }

    bool contains(const Vec3& p, float eps = 0.0f) const {
        return p.x >= min.x - eps && p.x <= max.x + eps && p.y >= min.y - eps &&
               p.y <= max.y + eps && p.z >= min.z - eps && p.z <= max.z + eps;
    }
};

inline Aabb merge(const Aabb& a, const Aabb& b) {
    return {min(a.min, b.min), max(a.max, b.max)};
}

// 2(dx dy + dy dz + dz dx); empty boxes have zero area by definition.
float surface_area(const Aabb& box);

struct Triangle {
    Vec3 v0, v1, v2;
};

struct Ray {
    Vec3 origin;
    Vec3 dir;  // need not be normalized
    float tMin = 0.0f;
    float tMax = std::numeric_limits<float>::infinity();
};

struct HitRecord {
    int32_t primId = -1;
    float t = std::numeric_limits<float>::infinity();
    float u = 0, v = 0;  // hit = (1-u-v) v0 + u v1 + v v2

    bool valid() const { return primId >= 0; }
};

struct RayInterval {
    float tEnter, tExit;
};

// Slab test, clipped to [tMin, tMax]. Zero direction components rely on IEEE
// infinity semantics. Miss is an empty optional.
std::optional<RayInterval> ray_aabb_intersect(const Ray& ray, const Aabb& box);

// Moller-Trumbore with a fixed edge rule: barycentric u = 0 and v = 0 edges
// hit inclusively, the u + v = 1 edge misses. Degenerate triangles and rays
// parallel to the plane (zero determinant) always miss.
HitRecord ray_triangle_intersect(const Ray& ray, const Triangle& tri, int32_t primId = 0);

// Takes a world ray into the frame of `rot` (columns = frame basis), i.e.
// applies the transpose. The t range is untouched.
Ray transform_ray(const Ray& ray, const Mat3& rot);

// Rodrigues rotation about a unit axis, built in double precision.
Mat3d axis_angle_rotation(const Vec3d& axis, double angle);

// Nearest float not below / not above the given double.
float round_up_to_float(double v);
float round_down_to_float(double v);

}  // namespace dobb
