#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "dobb/geom.hpp"
#include "dobb/rng.hpp"
#include "oracles.hpp"

using namespace dobb;

namespace {
constexpr float kInf = std::numeric_limits<float>::infinity();
}

TEST_CASE("vector algebra basics") {
    const Vec3 a{1, 2, 3}, b{4, -5, 6};
    CHECK(dot(a, b) == doctest::Approx(1 * 4 + 2 * -5 + 3 * 6));
    const Vec3 c = cross(a, b);
    CHECK(c.x == doctest::Approx(2 * 6 - 3 * -5));
    CHECK(c.y == doctest::Approx(3 * 4 - 1 * 6));
    CHECK(c.z == doctest::Approx(1 * -5 - 2 * 4));
    CHECK(dot(c, a) == doctest::Approx(0));
    CHECK(dot(c, b) == doctest::Approx(0));
    const Vec3 n = normalize(Vec3{3, 0, 4});
    CHECK(n.x == doctest::Approx(0.6f));
    CHECK(n.z == doctest::Approx(0.8f));
}

TEST_CASE("matrix multiply, transpose, determinant, trace") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        const Mat3d r = oracle::random_rotation(rng);
        CHECK(std::abs(r.det() - 1.0) < 1e-12);
        CHECK(r.orthonormality_error() < 1e-12);
        const Mat3d rt = r.transposed();
        const Mat3d prod = rt * r;  // must be the identity
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k) {
                const double want = (c == k) ? 1.0 : 0.0;
                CHECK(std::abs((&prod.col[c].x)[k] - want) < 1e-12);
            }
        CHECK(prod.trace() == doctest::Approx(3.0));
    }
}

TEST_CASE("matrix * vector matches manual expansion") {
    const Mat3 m{Vec3{1, 2, 3}, Vec3{4, 5, 6}, Vec3{7, 8, 10}};  // columns
    const Vec3 v{1, -1, 2};
    const Vec3 got = m * v;
    CHECK(got.x == doctest::Approx(1 * 1 + 4 * -1 + 7 * 2));
    CHECK(got.y == doctest::Approx(2 * 1 + 5 * -1 + 8 * 2));
    CHECK(got.z == doctest::Approx(3 * 1 + 6 * -1 + 10 * 2));
}

TEST_CASE("aabb grow/merge/contains and surface area") {
    Aabb box;
    CHECK(box.is_empty());
    box.grow({1, 2, 3});
    box.grow({-1, 0, 5});
    CHECK(box.min.x == -1);
    CHECK(box.max.z == 5);
    CHECK(box.contains({0, 1, 4}));
    CHECK(!box.contains({0, 1, 5.1f}));
    Aabb other;
    other.grow({10, 10, 10});
    const Aabb merged = merge(box, other);
    CHECK(merged.max.x == 10);
    CHECK(merged.min.x == -1);
    // 2(wh + wd + hd) for a 2 x 3 x 4 box
    Aabb sa;
    sa.grow({0, 0, 0});
    sa.grow({2, 3, 4});
    CHECK(surface_area(sa) == doctest::Approx(2 * (2 * 3 + 2 * 4 + 3 * 4)));
    CHECK(surface_area(Aabb{}) == 0.0);
}

TEST_CASE("ray-box slab test against f64 oracle") {
    Rng rng(22);
    int hits = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        Aabb box;
        box.grow(oracle::random_point(rng));
        box.grow(oracle::random_point(rng));
        const Ray ray = oracle::random_ray(rng, box, 3.0f);
        const auto got = ray_aabb_intersect(ray, box);
        const auto want = oracle::slab(box.min, box.max, ray);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            ++hits;
            CHECK(got->tEnter == doctest::Approx(want->first).epsilon(1e-5));
        }
    }
    CHECK(hits > 200);  // the sampler must actually exercise the hit path
}

TEST_CASE("ray-box axis-parallel rays use infinity semantics") {
    Aabb box;
    box.grow({0, 0, 0});
    box.grow({1, 1, 1});
    Ray ray;
    ray.origin = {0.5f, 0.5f, -1};
    ray.dir = {0, 0, 1};
    auto hit = ray_aabb_intersect(ray, box);
    REQUIRE(hit);
    CHECK(hit->tEnter == doctest::Approx(1.0f));
    ray.origin = {2.0f, 0.5f, -1};  // parallel, outside the slab
    CHECK(!ray_aabb_intersect(ray, box));
}

TEST_CASE("ray-triangle on exact dyadic data") {
    // All coordinates are small powers of two, so every intermediate product
    // is exact in f32 and the edge rule decisions below are exact, not
    // tolerance-dependent.
    const Triangle tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    Ray ray;
    ray.dir = {0, 0, -1};

    ray.origin = {0.25f, 0.25f, 1};
    HitRecord h = ray_triangle_intersect(ray, tri, 7);
    REQUIRE(h.valid());
    CHECK(h.primId == 7);
    CHECK(h.t == 1.0f);
    CHECK(h.u == 0.25f);
    CHECK(h.v == 0.25f);

    ray.origin = {0, 0, 1};  // u = 0, v = 0 corner: inclusive
    CHECK(ray_triangle_intersect(ray, tri).valid());
    ray.origin = {0.5f, 0, 1};  // v = 0 edge: inclusive
    CHECK(ray_triangle_intersect(ray, tri).valid());
    ray.origin = {0, 0.5f, 1};  // u = 0 edge: inclusive
    CHECK(ray_triangle_intersect(ray, tri).valid());
    ray.origin = {0.5f, 0.5f, 1};  // u + v = 1 edge: exclusive
    CHECK(!ray_triangle_intersect(ray, tri).valid());
    ray.origin = {-0.25f, 0.5f, 1};  // outside
    CHECK(!ray_triangle_intersect(ray, tri).valid());

    // Ray in the triangle plane: zero determinant, always a miss.
    ray.origin = {-1, 0.25f, 0};
    ray.dir = {1, 0, 0};
    CHECK(!ray_triangle_intersect(ray, tri).valid());

    // Degenerate triangle: zero determinant, always a miss.
    const Triangle deg{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
    ray.origin = {1, 1, 2};
    ray.dir = {0, 0, -1};
    CHECK(!ray_triangle_intersect(ray, deg).valid());
}

TEST_CASE("ray-triangle respects the ray t range") {
    const Triangle tri{{-1, -1, 0}, {1, -1, 0}, {0, 2, 0}};
    Ray ray;
    ray.origin = {0, 0, 5};
    ray.dir = {0, 0, -1};
    CHECK(ray_triangle_intersect(ray, tri).t == 5.0f);
    ray.tMax = 4.0f;
    CHECK(!ray_triangle_intersect(ray, tri).valid());
    ray.tMax = kInf;
    ray.tMin = 6.0f;
    CHECK(!ray_triangle_intersect(ray, tri).valid());
}

TEST_CASE("shared edge of adjacent triangles is hit exactly once") {
    // Watertightness along the inclusive edges: two triangles sharing the
    // diagonal of a dyadic quad. A ray through the shared edge must hit
    // exactly one of them (the u=0/v=0 edges are inclusive, u+v=1 exclusive).
    const Triangle lower{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};   // diagonal = u+v=1
    const Triangle upper{{1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    Ray ray;
    ray.dir = {0, 0, -1};
    for (float s = 0.125f; s < 1.0f; s += 0.125f) {
        ray.origin = {s, 1.0f - s, 1.0f};  // on the shared diagonal
        const int hits = ray_triangle_intersect(ray, lower).valid() +
                         ray_triangle_intersect(ray, upper).valid();
        CHECK(hits == 1);
    }
}

TEST_CASE("transform_ray applies the frame transpose and keeps the t range") {
    Rng rng(33);
    for (int iter = 0; iter < 100; ++iter) {
        const Mat3d rd = oracle::random_rotation(rng);
        const Mat3 r = static_cast<Mat3>(rd);
        Ray ray;
        ray.origin = oracle::random_point(rng);
        ray.dir = static_cast<Vec3>(normalize(Vec3d{rng.uniform(-1, 1), rng.uniform(-1, 1),
                                                    rng.uniform(-1, 1)}));
        ray.tMin = 0.5f;
        ray.tMax = 9.0f;
        const Ray local = transform_ray(ray, r);
        CHECK(local.tMin == ray.tMin);
        CHECK(local.tMax == ray.tMax);
        // Rotating a world point into the frame must match transforming the
        // ray: local.origin + t * local.dir == R^T (origin + t * dir).
        const float t = 2.5f;
        const Vec3 world = ray.origin + ray.dir * t;
        const Vec3 viaRay = local.origin + local.dir * t;
        const Vec3 direct = static_cast<Vec3>(rd.transposed() * static_cast<Vec3d>(world));
        CHECK(viaRay.x == doctest::Approx(direct.x).epsilon(1e-4));
        CHECK(viaRay.y == doctest::Approx(direct.y).epsilon(1e-4));
        CHECK(viaRay.z == doctest::Approx(direct.z).epsilon(1e-4));
    }
}

TEST_CASE("axis-angle rotation matches an independent Rodrigues expansion") {
    Rng rng(44);
    for (int iter = 0; iter < 200; ++iter) {
        Vec3d axis{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double len = std::sqrt(dot(axis, axis));
        if (len < 1e-6) continue;
        axis = axis * (1.0 / len);
        const double ang = rng.uniform(-6.4, 6.4);
        const Mat3d r = axis_angle_rotation(axis, ang);
        CHECK(std::abs(r.det() - 1.0) < 1e-12);
        CHECK(r.orthonormality_error() < 1e-12);
        // v rotated = v cos + (k x v) sin + k (k.v)(1 - cos), element by element
        const Vec3d v{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec3d kxv = cross(axis, v);
        const Vec3d want =
            v * std::cos(ang) + kxv * std::sin(ang) + axis * (dot(axis, v) * (1 - std::cos(ang)));
        const Vec3d got = r * v;
        CHECK(std::abs(got.x - want.x) < 1e-12);
        CHECK(std::abs(got.y - want.y) < 1e-12);
        CHECK(std::abs(got.z - want.z) < 1e-12);
        // The axis itself must be fixed.
        const Vec3d fixedAxis = r * axis;
        CHECK(std::abs(fixedAxis.x - axis.x) < 1e-12);
    }
}

TEST_CASE("round_up/round_down bracket the double and are monotone") {
    Rng rng(55);
    for (int iter = 0; iter < 5000; ++iter) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-6, 6));
        const float up = round_up_to_float(v);
        const float dn = round_down_to_float(v);
        CHECK(static_cast<double>(up) >= v);
        CHECK(static_cast<double>(dn) <= v);
        // The bracket is tight: at most one representable float apart.
        CHECK(std::nextafterf(dn, kInf) >= up);
    }
    // Exactly representable doubles pass through unchanged.
    CHECK(round_up_to_float(0.25) == 0.25f);
    CHECK(round_down_to_float(0.25) == 0.25f);
    CHECK(round_up_to_float(0.0) == 0.0f);
    // A double just above a float must round up strictly.
    const double above = static_cast<double>(1.0f) + 1e-12;
    CHECK(round_up_to_float(above) > 1.0f);
    CHECK(round_down_to_float(above) == 1.0f);
}
