#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dobb/geom.hpp"
#include "dobb/rotation_set.hpp"

// Discrete-orientation polytope proxies. A Dop26 summarizes geometry by its
// projection intervals on the 13 canonical axes; the apex map turns that
// summary plus an arbitrary direction into a conservative extent, which is
// what lets one proxy serve every candidate orientation. Dop225 is the
// heavyweight oracle: it carries the projection interval for every distinct
// basis vector of a rotation dictionary, so extents along those vectors are
// exact rather than bounded.

namespace dobb {

inline constexpr int kDopAxes = 13;

// Signed projection intervals on the canonical 13 axes. Stored single
// precision, outward-rounded from double accumulation, so an interval may be
// up to one ulp wider than the tightest float pair but never narrower than
// the true extent.
struct Dop26 {
    std::array<float, kDopAxes> minProj;
    std::array<float, kDopAxes> maxProj;

    static Dop26 empty();
    bool is_empty() const { return minProj[0] > maxProj[0]; }
};

// The canonical axes (build_axes(13)) in double, plus SoA forms padded for
// the projection kernel.
const std::array<Vec3d, kDopAxes>& dop_axes();

Dop26 dop_from_points(std::span<const Vec3> points);
Dop26 dop_merge(const Dop26& a, const Dop26& b);

// Triangulated quad-sphere whose 26 vertices are exactly the +/- canonical
// axis directions: vertices[i] = +axis i, vertices[13+i] = -axis i. 48
// facets, deterministic order, outward winding.
struct ApexMap {
    struct Facet {
        std::array<int, 3> v;
        // cross(v[j], v[j+1 mod 3]); all three dots >= 0 iff a direction
        // lies in the facet's spherical triangle
        std::array<Vec3d, 3> edgeNormal;
    };
    std::array<Vec3, 26> vertices;
    std::array<Vec3d, 26> verticesD;
    std::array<Facet, 48> facets;
};

const ApexMap& apex_map();

// Lowest-index facet whose spherical triangle contains dir (shared edges and
// vertices belong to every adjacent facet, so ties resolve to the lowest
// index). A direction squeezed out of all facets by rounding falls back to
// the facet it is deepest inside.
int find_facet(const ApexMap& map, const Vec3d& dir);

// Conservative upper bound on max dot(x, dir) over geometry summarized by
// the proxy: intersects the supporting planes of the containing facet's
// three vertices into the apex point and projects it onto dir. When dir is
// bitwise one of the 26 vertex directions the stored extent is returned
// unchanged, making canonical-axis queries exact. Empty proxy -> +inf.
// Throws std::invalid_argument for a non-finite or non-unit dir.
float apex_extent(const Dop26& dop, const ApexMap& map, const Vec3& dir);

struct Interval {
    float lo, hi;
};
struct IntervalD {
    double lo, hi;
};

// Conservative projection intervals of the proxy on the three basis vectors
// (columns) of rot: [-apex_extent(-col), apex_extent(col)] per column.
std::array<Interval, 3> obb_extents(const Dop26& dop, const ApexMap& map, const Mat3& rot);

// Distinct basis vectors (columns, deduplicated up to sign) of a rotation
// dictionary, with each member's columns resolved to (axis index, sign).
struct ExactAxisTable {
    struct ColRef {
        uint16_t axis;
        int8_t sign;
    };
    std::vector<Vec3d> axes;
    std::vector<std::array<ColRef, 3>> memberRefs;

    // kernel-ready SoA copy of axes, zero-padded to a multiple of 4 lanes
    std::vector<double> axisX, axisY, axisZ;
};

ExactAxisTable build_exact_axis_table(const RotationSet& set);

// Projection intervals along every axis of an ExactAxisTable, double
// precision.
struct Dop225 {
    std::vector<double> minProj;
    std::vector<double> maxProj;

    bool is_empty() const { return minProj.empty() || minProj[0] > maxProj[0]; }
};

Dop225 dop225_from_points(std::span<const Vec3> points, const ExactAxisTable& table);
Dop225 dop225_merge(const Dop225& a, const Dop225& b);

// Exact projection intervals on the columns of rot, which must be a member
// of the table's source dictionary (up to 1e-6 per component, up to sign);
// anything else throws std::invalid_argument.
std::array<IntervalD, 3> exact_extents(const Dop225& dop, const ExactAxisTable& table,
                                       const Mat3& rot);

// Fast member-indexed form.
std::array<IntervalD, 3> exact_extents(const Dop225& dop, const ExactAxisTable& table,
                                       ObbIndex idx);

// Resolves an arbitrary dictionary-member rotation (or the identity, whose
// basis vectors the dictionary always contains) to per-column axis
// references for repeated exact_extents queries.
std::array<ExactAxisTable::ColRef, 3> resolve_rotation_refs(const ExactAxisTable& table,
                                                            const Mat3& rot);
std::array<IntervalD, 3> exact_extents(const Dop225& dop,
                                       const std::array<ExactAxisTable::ColRef, 3>& refs);

}  // namespace dobb
