#include "dobb/kdop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dobb/kernels.hpp"

namespace dobb {

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();
constexpr double kInfD = std::numeric_limits<double>::infinity();

struct CanonicalAxes {
    std::array<Vec3d, kDopAxes> axes;
    // kernel layout, zero-padded to 16 lanes
    std::array<double, 16> x{}, y{}, z{};
};

const CanonicalAxes& canonical_axes() {
    static const CanonicalAxes c = [] {
        CanonicalAxes out;
        const auto axes = build_axes(kDopAxes);
        for (int i = 0; i < kDopAxes; ++i) {
            out.axes[i] = axes[i];
            out.x[i] = axes[i].x;
            out.y[i] = axes[i].y;
            out.z[i] = axes[i].z;
        }
        return out;
    }();
    return c;
}

bool componentwise_close(const Vec3d& a, const Vec3d& b, double tol) {
    return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

ApexMap build_apex_map() {
    ApexMap map;
    const auto& canon = canonical_axes();
    for (int i = 0; i < kDopAxes; ++i) {
        map.verticesD[i] = canon.axes[i];
        map.verticesD[13 + i] = -canon.axes[i];
        map.vertices[i] = static_cast<Vec3>(canon.axes[i]);
        map.vertices[13 + i] = -map.vertices[i];
    }
    auto match = [&](const Vec3d& dir) {
        for (int i = 0; i < 26; ++i)
            if (componentwise_close(dir, map.verticesD[i], 1e-9)) return i;
        throw std::logic_error("apex map: grid direction is not a canonical axis");
    };
    // One subdivision of the cube: per face a 3x3 grid of directions (face
    // center, edge midpoints, corners), 4 cells of 2 triangles each.
    const Vec3d faceN[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const Vec3d faceU[6] = {{0, 1, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}, {1, 0, 0}, {1, 0, 0}};
    const Vec3d faceV[6] = {{0, 0, 1}, {0, 0, 1}, {1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}};
    int facetCount = 0;
    for (int f = 0; f < 6; ++f) {
        int grid[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                grid[a][b] = match(normalize(faceN[f] + faceU[f] * double(a - 1) +
                                             faceV[f] * double(b - 1)));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const int q0 = grid[a][b], q1 = grid[a + 1][b];
                const int q2 = grid[a + 1][b + 1], q3 = grid[a][b + 1];
                for (auto tri : {std::array<int, 3>{q0, q1, q2}, std::array<int, 3>{q0, q2, q3}}) {
                    const Vec3d w0 = map.verticesD[tri[0]], w1 = map.verticesD[tri[1]],
                                w2 = map.verticesD[tri[2]];
                    if (dot(cross(w1 - w0, w2 - w0), w0 + w1 + w2) < 0)
                        std::swap(tri[1], tri[2]);
                    map.facets[facetCount].v = tri;
                    ++facetCount;
                }
            }
    }
    for (auto& facet : map.facets)
        for (int j = 0; j < 3; ++j)
            facet.edgeNormal[j] = normalize(
                cross(map.verticesD[facet.v[j]], map.verticesD[facet.v[(j + 1) % 3]]));
    return map;
}

// Supporting-plane interval of vertex direction vi in proxy coordinates.
IntervalD vertex_interval(const Dop26& dop, int vi) {
    if (vi < kDopAxes) return {double(dop.minProj[vi]), double(dop.maxProj[vi])};
    return {-double(dop.maxProj[vi - kDopAxes]), -double(dop.minProj[vi - kDopAxes])};
}

// Loosest per-vertex bound: split dir into its component along the vertex
// plane normal plus a tangential remainder bounded by the proxy's
// circumradius. Only reachable with a degenerate (near-parallel) facet,
// which the built-in 48-facet map never produces; kept for conservativeness
// with any map.
float single_plane_fallback(const Dop26& dop, const ApexMap& map,
                            const std::array<int, 3>& verts, const Vec3d& d) {
    double r2 = 0;
    for (int i = 0; i < 3; ++i) {
        const double lo = dop.minProj[i], hi = dop.maxProj[i];
        r2 += std::max(lo * lo, hi * hi);
    }
    const double r = std::sqrt(r2);
    double worst = -kInfD;
    for (int vi : verts) {
        const double c = dot(d, map.verticesD[vi]);
        const IntervalD iv = vertex_interval(dop, vi);
        const double along = c >= 0 ? c * iv.hi : c * iv.lo;
        const double tangential = std::sqrt(std::max(0.0, 1.0 - c * c)) * r;
        worst = std::max(worst, along + tangential);
    }
    return round_up_to_float(worst);
}

}  // namespace

Dop26 Dop26::empty() {
    Dop26 d;
    d.minProj.fill(kInf);
    d.maxProj.fill(-kInf);
    return d;
}

const std::array<Vec3d, kDopAxes>& dop_axes() { return canonical_axes().axes; }

Dop26 dop_from_points(std::span<const Vec3> points) {
    if (points.empty()) return Dop26::empty();
    const auto& canon = canonical_axes();
    std::array<double, 16> mn, mx;
    mn.fill(kInfD);
    mx.fill(-kInfD);
    kernels::project_minmax(points.data(), static_cast<int>(points.size()), canon.x.data(),
                            canon.y.data(), canon.z.data(), 16, mn.data(), mx.data());
    Dop26 out;
    for (int i = 0; i < kDopAxes; ++i) {
        out.minProj[i] = round_down_to_float(mn[i]);
        out.maxProj[i] = round_up_to_float(mx[i]);
    }
    return out;
}

Dop26 dop_merge(const Dop26& a, const Dop26& b) {
    Dop26 out;
    for (int i = 0; i < kDopAxes; ++i) {
        out.minProj[i] = std::min(a.minProj[i], b.minProj[i]);
        out.maxProj[i] = std::max(a.maxProj[i], b.maxProj[i]);
    }
    return out;
}

const ApexMap& apex_map() {
    static const ApexMap map = build_apex_map();
    return map;
}

int find_facet(const ApexMap& map, const Vec3d& dir) {
    int deepest = 0;
    double deepestScore = -kInfD;
    for (int f = 0; f < static_cast<int>(map.facets.size()); ++f) {
        const auto& facet = map.facets[f];
        double low = kInfD;
        for (int j = 0; j < 3; ++j) low = std::min(low, dot(dir, facet.edgeNormal[j]));
        if (low >= 0.0) return f;
        if (low > deepestScore) {
            deepestScore = low;
            deepest = f;
        }
    }
    return deepest;
}

float apex_extent(const Dop26& dop, const ApexMap& map, const Vec3& dir) {
    if (!is_finite(dir)) throw std::invalid_argument("apex_extent: non-finite direction");
    const float len2 = dot(dir, dir);
    if (std::abs(len2 - 1.0f) > 2e-3f)
        throw std::invalid_argument("apex_extent: direction must be unit length");
    if (dop.is_empty()) return kInf;
    for (int i = 0; i < 26; ++i)
        if (dir == map.vertices[i])
            return i < kDopAxes ? dop.maxProj[i] : -dop.minProj[i - kDopAxes];

    const Vec3d d = static_cast<Vec3d>(dir);
    const auto& facet = map.facets[find_facet(map, d)];
    const Vec3d n0 = map.verticesD[facet.v[0]], n1 = map.verticesD[facet.v[1]],
                n2 = map.verticesD[facet.v[2]];
    const double h0 = vertex_interval(dop, facet.v[0]).hi;
    const double h1 = vertex_interval(dop, facet.v[1]).hi;
    const double h2 = vertex_interval(dop, facet.v[2]).hi;

    const Vec3d u = cross(n0, n1);
    const double den = dot(u, u);
    if (den < 1e-8) return single_plane_fallback(dop, map, facet.v, d);
    const Vec3d x0 = cross(n1 * h0 - n0 * h1, u) / den;
    const double nu = dot(n2, u);
    if (std::abs(nu) < 1e-8) return single_plane_fallback(dop, map, facet.v, d);
    const double t = (h2 - dot(n2, x0)) / nu;
    const Vec3d apex = x0 + u * t;
    const double extent = dot(apex, d);
    // Guard against the least-significant-digit slop of the plane
    // intersection before rounding outward; keeps the bound >= the true
    // maximum with margin while staying far below float resolution.
    const double guard = 1e-12 * (std::abs(h0) + std::abs(h1) + std::abs(h2) + std::abs(extent));
    return round_up_to_float(extent + guard);
}

std::array<Interval, 3> obb_extents(const Dop26& dop, const ApexMap& map, const Mat3& rot) {
    std::array<Interval, 3> out;
    for (int i = 0; i < 3; ++i) {
        out[i].hi = apex_extent(dop, map, rot.col[i]);
        out[i].lo = -apex_extent(dop, map, -rot.col[i]);
    }
    return out;
}

ExactAxisTable build_exact_axis_table(const RotationSet& set) {
    ExactAxisTable table;
    table.memberRefs.resize(set.size());
    for (int i = 0; i < set.size(); ++i)
        for (int c = 0; c < 3; ++c) {
            const Vec3d col = static_cast<Vec3d>(set.rotations[i].col[c]);
            int idx = -1;
            int8_t sign = 0;
            for (size_t j = 0; j < table.axes.size() && idx < 0; ++j) {
                if (componentwise_close(col, table.axes[j], 1e-6)) {
                    idx = static_cast<int>(j);
                    sign = 1;
                } else if (componentwise_close(-col, table.axes[j], 1e-6)) {
                    idx = static_cast<int>(j);
                    sign = -1;
                }
            }
            if (idx < 0) {
                idx = static_cast<int>(table.axes.size());
                sign = 1;
                table.axes.push_back(col);
            }
            table.memberRefs[i][c] = {static_cast<uint16_t>(idx), sign};
        }
    const int padded = (static_cast<int>(table.axes.size()) + 3) & ~3;
    table.axisX.assign(padded, 0.0);
    table.axisY.assign(padded, 0.0);
    table.axisZ.assign(padded, 0.0);
    for (size_t j = 0; j < table.axes.size(); ++j) {
        table.axisX[j] = table.axes[j].x;
        table.axisY[j] = table.axes[j].y;
        table.axisZ[j] = table.axes[j].z;
    }
    return table;
}

Dop225 dop225_from_points(std::span<const Vec3> points, const ExactAxisTable& table) {
    const int n = static_cast<int>(table.axes.size());
    const int padded = static_cast<int>(table.axisX.size());
    Dop225 out;
    std::vector<double> mn(padded, kInfD), mx(padded, -kInfD);
    if (!points.empty())
        kernels::project_minmax(points.data(), static_cast<int>(points.size()),
                                table.axisX.data(), table.axisY.data(), table.axisZ.data(),
                                padded, mn.data(), mx.data());
    out.minProj.assign(mn.begin(), mn.begin() + n);
    out.maxProj.assign(mx.begin(), mx.begin() + n);
    return out;
}

Dop225 dop225_merge(const Dop225& a, const Dop225& b) {
    if (a.minProj.size() != b.minProj.size())
        throw std::invalid_argument("dop225_merge: mismatched axis counts");
    Dop225 out;
    const size_t n = a.minProj.size();
    out.minProj.resize(n);
    out.maxProj.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.minProj[i] = std::min(a.minProj[i], b.minProj[i]);
        out.maxProj[i] = std::max(a.maxProj[i], b.maxProj[i]);
    }
    return out;
}

namespace {

IntervalD axis_interval(const Dop225& dop, const ExactAxisTable::ColRef& ref) {
    if (ref.sign > 0) return {dop.minProj[ref.axis], dop.maxProj[ref.axis]};
    return {-dop.maxProj[ref.axis], -dop.minProj[ref.axis]};
}

}  // namespace

std::array<ExactAxisTable::ColRef, 3> resolve_rotation_refs(const ExactAxisTable& table,
                                                            const Mat3& rot) {
    std::array<ExactAxisTable::ColRef, 3> refs;
    for (int c = 0; c < 3; ++c) {
        const Vec3d col = static_cast<Vec3d>(rot.col[c]);
        ExactAxisTable::ColRef ref{0, 0};
        for (size_t j = 0; j < table.axes.size() && ref.sign == 0; ++j) {
            if (componentwise_close(col, table.axes[j], 1e-6))
                ref = {static_cast<uint16_t>(j), 1};
            else if (componentwise_close(-col, table.axes[j], 1e-6))
                ref = {static_cast<uint16_t>(j), -1};
        }
        if (ref.sign == 0)
            throw std::invalid_argument(
                "exact_extents: rotation is not a member of the source dictionary");
        refs[c] = ref;
    }
    return refs;
}

std::array<IntervalD, 3> exact_extents(const Dop225& dop,
                                       const std::array<ExactAxisTable::ColRef, 3>& refs) {
    return {axis_interval(dop, refs[0]), axis_interval(dop, refs[1]),
            axis_interval(dop, refs[2])};
}

std::array<IntervalD, 3> exact_extents(const Dop225& dop, const ExactAxisTable& table,
                                       const Mat3& rot) {
    return exact_extents(dop, resolve_rotation_refs(table, rot));
}

std::array<IntervalD, 3> exact_extents(const Dop225& dop, const ExactAxisTable& table,
                                       ObbIndex idx) {
    if (!idx.valid() || idx.value >= table.memberRefs.size())
        throw std::out_of_range("exact_extents: member index out of range");
    std::array<IntervalD, 3> out;
    for (int c = 0; c < 3; ++c) out[c] = axis_interval(dop, table.memberRefs[idx.value][c]);
    return out;
}

}  // namespace dobb
