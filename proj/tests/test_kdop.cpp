#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "dobb/kdop.hpp"
#include "dobb/rng.hpp"
#include "oracles.hpp"

using namespace dobb;

TEST_CASE("dop_from_points brackets the exact projection on all 13 axes") {
    Rng rng(201);
    const auto& axes = dop_axes();
    for (int iter = 0; iter < 300; ++iter) {
        const auto pts = oracle::random_cloud(rng, 2 + static_cast<int>(rng.next_below(80)));
        const Dop26 dop = dop_from_points(pts);
        REQUIRE(!dop.is_empty());
        for (int j = 0; j < kDopAxes; ++j) {
            const auto want = oracle::project(pts, axes[j]);
            CHECK(static_cast<double>(dop.minProj[j]) <= want.lo);
            CHECK(static_cast<double>(dop.maxProj[j]) >= want.hi);
            // Outward rounding is at most one float step per side.
            CHECK(static_cast<double>(std::nextafterf(dop.minProj[j], 1e30f)) >= want.lo);
            CHECK(static_cast<double>(std::nextafterf(dop.maxProj[j], -1e30f)) <= want.hi);
        }
    }
    CHECK(dop_from_points({}).is_empty());
}

TEST_CASE("dop_merge equals the dop of the union") {
    Rng rng(202);
    for (int iter = 0; iter < 100; ++iter) {
        auto a = oracle::random_cloud(rng, 10);
        auto b = oracle::random_cloud(rng, 15);
        const Dop26 da = dop_from_points(a);
        const Dop26 db = dop_from_points(b);
        const Dop26 merged = dop_merge(da, db);
        for (int j = 0; j < kDopAxes; ++j) {
            CHECK(merged.minProj[j] == std::min(da.minProj[j], db.minProj[j]));
            CHECK(merged.maxProj[j] == std::max(da.maxProj[j], db.maxProj[j]));
        }
        // Merging with an empty proxy is the identity.
        const Dop26 viaEmpty = dop_merge(da, Dop26::empty());
        for (int j = 0; j < kDopAxes; ++j) {
            CHECK(viaEmpty.minProj[j] == da.minProj[j]);
            CHECK(viaEmpty.maxProj[j] == da.maxProj[j]);
        }
    }
}

TEST_CASE("apex map structure: vertices, facets, winding, edge normals") {
    const ApexMap& map = apex_map();
    const auto& axes = dop_axes();
    // Vertices are exactly the +/- canonical axes (f64 twins match too).
    for (int i = 0; i < kDopAxes; ++i) {
        CHECK(map.verticesD[i].x == axes[i].x);
        CHECK(map.verticesD[i].y == axes[i].y);
        CHECK(map.verticesD[i].z == axes[i].z);
        CHECK(map.verticesD[13 + i].x == -axes[i].x);
        CHECK(map.verticesD[13 + i].y == -axes[i].y);
        CHECK(map.verticesD[13 + i].z == -axes[i].z);
    }
    std::set<std::array<int, 3>> seen;
    for (const auto& f : map.facets) {
        for (int idx : f.v) {
            CHECK(idx >= 0);
            CHECK(idx < 26);
        }
        std::array<int, 3> sorted{f.v[0], f.v[1], f.v[2]};
        std::sort(sorted.begin(), sorted.end());
        CHECK(seen.insert(sorted).second);  // no duplicate facets
        // Outward winding: the normal points away from the origin.
        const Vec3d a = map.verticesD[f.v[0]], b = map.verticesD[f.v[1]],
                    c = map.verticesD[f.v[2]];
        CHECK(dot(cross(b - a, c - a), a + b + c) > 0.0);
        // Edge normals: unit, perpendicular to their edge pair, and all
        // three vertices are inside every edge plane (a spherical triangle).
        for (int e = 0; e < 3; ++e) {
            const Vec3d& n = f.edgeNormal[e];
            CHECK(std::abs(dot(n, n) - 1.0) < 1e-12);
            CHECK(std::abs(dot(n, map.verticesD[f.v[e]])) < 1e-12);
            CHECK(std::abs(dot(n, map.verticesD[f.v[(e + 1) % 3]])) < 1e-12);
            CHECK(dot(n, map.verticesD[f.v[(e + 2) % 3]]) > 0.0);
        }
    }
}

TEST_CASE("find_facet locates a containing facet for any direction") {
    const ApexMap& map = apex_map();
    Rng rng(203);
    for (int iter = 0; iter < 2000; ++iter) {
        Vec3d d{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double len = std::sqrt(dot(d, d));
        if (len < 1e-6) continue;
        d = d * (1.0 / len);
        const int fi = find_facet(map, d);
        REQUIRE(fi >= 0);
        REQUIRE(fi < 48);
        const auto& f = map.facets[fi];
        for (int e = 0; e < 3; ++e) CHECK(dot(f.edgeNormal[e], d) >= -1e-9);
    }
    // A facet vertex direction belongs to several facets; the answer must
    // still contain it.
    for (int v = 0; v < 26; ++v) {
        const int fi = find_facet(map, map.verticesD[v]);
        const auto& f = map.facets[fi];
        CHECK((f.v[0] == v || f.v[1] == v || f.v[2] == v));
    }
}

TEST_CASE("apex_extent is conservative and reasonably tight") {
    const ApexMap& map = apex_map();
    Rng rng(204);
    double worstSlack = 0.0;
    for (int iter = 0; iter < 400; ++iter) {
        const auto pts = oracle::random_cloud(rng, 3 + static_cast<int>(rng.next_below(60)));
        const Dop26 dop = dop_from_points(pts);
        for (int q = 0; q < 20; ++q) {
            Vec3d d{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const double len = std::sqrt(dot(d, d));
            if (len < 1e-6) continue;
            d = d * (1.0 / len);
            const float got = apex_extent(dop, map, static_cast<Vec3>(d));
            // Rounding the direction to f32 changes the query; bound the
            // oracle with the f32 direction actually used.
            const Vec3 df = static_cast<Vec3>(d);
            const double want = oracle::support_max(pts, static_cast<Vec3d>(df));
            CHECK(static_cast<double>(got) >= want - 1e-6 * std::abs(want));
            // Tightness: the apex bound may exceed the true support, but only
            // by a bounded geometric factor. Track the worst case.
            const double radius = std::sqrt([&] {
                double r = 0;
                for (const Vec3& p : pts) r = std::max(r, dot(static_cast<Vec3d>(p),
                                                              static_cast<Vec3d>(p)));
                return r;
            }());
            worstSlack = std::max(worstSlack, (static_cast<double>(got) - want) / radius);
        }
    }
    // Mid-facet queries on adversarial clouds can overshoot by a few tenths
    // of the cloud radius with a 26-vertex map; anything approaching 1.0
    // would mean the bound degenerated to the circumradius.
    CHECK(worstSlack < 0.5);
}

TEST_CASE("apex_extent on canonical axes returns stored extents bitwise") {
    const ApexMap& map = apex_map();
    Rng rng(205);
    for (int iter = 0; iter < 100; ++iter) {
        const auto pts = oracle::random_cloud(rng, 20);
        const Dop26 dop = dop_from_points(pts);
        for (int j = 0; j < kDopAxes; ++j) {
            CHECK(apex_extent(dop, map, map.vertices[j]) == dop.maxProj[j]);
            CHECK(apex_extent(dop, map, map.vertices[13 + j]) == -dop.minProj[j]);
        }
    }
}

TEST_CASE("apex_extent input validation") {
    const ApexMap& map = apex_map();
    const Dop26 dop = dop_from_points(std::vector<Vec3>{{0, 0, 0}, {1, 1, 1}});
    CHECK_THROWS_AS(apex_extent(dop, map, Vec3{0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(apex_extent(dop, map, Vec3{2, 0, 0}), std::invalid_argument);
    const float inf = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(apex_extent(dop, map, Vec3{inf, 0, 0}), std::invalid_argument);
    CHECK(apex_extent(Dop26::empty(), map, Vec3{1, 0, 0}) == inf);
}

TEST_CASE("obb_extents contains the exact rotated interval (dictionary rotations)") {
    const RotationSet set = build_rotation_set(13, 4);
    const ApexMap& map = apex_map();
    Rng rng(206);
    for (int iter = 0; iter < 60; ++iter) {
        const auto pts = oracle::random_cloud(rng, 5 + static_cast<int>(rng.next_below(50)));
        const Dop26 dop = dop_from_points(pts);
        for (int r = 0; r < set.size(); r += 7) {  // sample the dictionary
            const auto ext = obb_extents(dop, map, set.rotations[r]);
            for (int c = 0; c < 3; ++c) {
                const Vec3d col = static_cast<Vec3d>(set.rotations[r].col[c]);
                const auto want = oracle::project(pts, col);
                CHECK(static_cast<double>(ext[c].lo) <= want.lo + 1e-9);
                CHECK(static_cast<double>(ext[c].hi) >= want.hi - 1e-9);
            }
        }
    }
}

TEST_CASE("exact axis table deduplicates up to sign") {
    const RotationSet big = build_rotation_set(13, 4);
    const ExactAxisTable table = build_exact_axis_table(big);
    CHECK(table.memberRefs.size() == static_cast<size_t>(big.size()));
    // No two table axes are equal or negated within tolerance.
    for (size_t i = 0; i < table.axes.size(); ++i)
        for (size_t j = i + 1; j < table.axes.size(); ++j) {
            const Vec3d d1 = table.axes[i] - table.axes[j];
            const Vec3d d2 = table.axes[i] + table.axes[j];
            CHECK((std::sqrt(dot(d1, d1)) > 1e-6 && std::sqrt(dot(d2, d2)) > 1e-6));
        }
    // Every member column reconstructs from its reference.
    for (int i = 0; i < big.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const auto ref = table.memberRefs[i][c];
            const Vec3d axis = table.axes[ref.axis] * static_cast<double>(ref.sign);
            const Vec3d col = static_cast<Vec3d>(big.rotations[i].col[c]);
            const Vec3d diff = axis - col;
            CHECK(std::sqrt(dot(diff, diff)) < 1e-5);
        }
    }
    // SoA padding is a multiple of 4 with zero fill.
    CHECK(table.axisX.size() % 4 == 0);
    CHECK(table.axisX.size() >= table.axes.size());
    for (size_t j = table.axes.size(); j < table.axisX.size(); ++j) {
        CHECK(table.axisX[j] == 0.0);
        CHECK(table.axisY[j] == 0.0);
        CHECK(table.axisZ[j] == 0.0);
    }
}

TEST_CASE("dop225 intervals are exact projections") {
    const RotationSet set = build_rotation_set(13, 4);
    const ExactAxisTable table = build_exact_axis_table(set);
    Rng rng(207);
    for (int iter = 0; iter < 40; ++iter) {
        const auto pts = oracle::random_cloud(rng, 4 + static_cast<int>(rng.next_below(40)));
        const Dop225 dop = dop225_from_points(pts, table);
        REQUIRE(!dop.is_empty());
        for (size_t j = 0; j < table.axes.size(); ++j) {
            const auto want = oracle::project(pts, table.axes[j]);
            CHECK(dop.minProj[j] == doctest::Approx(want.lo).epsilon(1e-12));
            CHECK(dop.maxProj[j] == doctest::Approx(want.hi).epsilon(1e-12));
        }
        // exact_extents resolve member columns to the same intervals.
        for (int r = 0; r < set.size(); r += 11) {
            const auto ext = exact_extents(dop, table, make_obb_index(r, set));
            for (int c = 0; c < 3; ++c) {
                const auto want = oracle::project(pts,
                                                  static_cast<Vec3d>(set.rotations[r].col[c]));
                CHECK(ext[c].lo == doctest::Approx(want.lo).epsilon(1e-9));
                CHECK(ext[c].hi == doctest::Approx(want.hi).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("dop225_merge equals the union and identity rotation resolves") {
    const RotationSet set = build_rotation_set(13, 4);
    const ExactAxisTable table = build_exact_axis_table(set);
    Rng rng(208);
    const auto a = oracle::random_cloud(rng, 12);
    const auto b = oracle::random_cloud(rng, 9);
    const Dop225 da = dop225_from_points(a, table);
    const Dop225 db = dop225_from_points(b, table);
    const Dop225 m = dop225_merge(da, db);
    auto all = a;
    all.insert(all.end(), b.begin(), b.end());
    const Dop225 want = dop225_from_points(all, table);
    for (size_t j = 0; j < table.axes.size(); ++j) {
        CHECK(m.minProj[j] == want.minProj[j]);
        CHECK(m.maxProj[j] == want.maxProj[j]);
    }

    // The identity must resolve: coordinate axes are dictionary columns.
    Mat3 id{};
    id.col[0] = {1, 0, 0};
    id.col[1] = {0, 1, 0};
    id.col[2] = {0, 0, 1};
    const auto refs = resolve_rotation_refs(table, id);
    const auto ext = exact_extents(da, refs);
    const auto wantX = oracle::project(a, {1, 0, 0});
    CHECK(ext[0].lo == doctest::Approx(wantX.lo).epsilon(1e-12));
    CHECK(ext[0].hi == doctest::Approx(wantX.hi).epsilon(1e-12));

    // A rotation outside the dictionary must be rejected.
    Rng rr(209);
    const Mat3 alien = static_cast<Mat3>(oracle::random_rotation(rr));
    CHECK_THROWS_AS(resolve_rotation_refs(table, alien), std::invalid_argument);
}

TEST_CASE("13-axis dictionary with m=4 spans exactly 225 distinct directions") {
    const RotationSet set = build_rotation_set(13, 4);
    const ExactAxisTable table = build_exact_axis_table(set);
    CHECK(table.axes.size() == 225);
}
