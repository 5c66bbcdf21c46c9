#include "dobb/rotation_set.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace dobb {

namespace {

constexpr double kPi = std::numbers::pi;

// The 24 orientation-preserving box symmetries as (permutation, signs):
// S maps local axis i to axis perm[i] with sign[i]; det(S) = +1.
struct BoxSym {
    int perm[3];
    int sign[3];
};

const std::array<BoxSym, 24>& box_symmetries() {
    static const std::array<BoxSym, 24> syms = [] {
        std::array<BoxSym, 24> out{};
        int n = 0;
        int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        int parity[6] = {1, -1, -1, 1, 1, -1};
        for (int p = 0; p < 6; ++p)
            for (int s = 0; s < 8; ++s) {
                int sg[3] = {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1, (s & 4) ? -1 : 1};
                if (parity[p] * sg[0] * sg[1] * sg[2] != 1) continue;
                out[n++] = {{perms[p][0], perms[p][1], perms[p][2]}, {sg[0], sg[1], sg[2]}};
            }
        return out;
    }();
    return syms;
}

int lut_cell(const AzElRoll& e) {
    auto bin = [](double v, double lo, double hi, int n) {
        int i = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
        return std::clamp(i, 0, n - 1);
    };
    const int ia = bin(e.az, -kPi, kPi, RotationSet::kLutAz);
    const int ie = bin(e.el, -kPi / 2, kPi / 2, RotationSet::kLutEl);
    const int ir = bin(e.roll, -kPi, kPi, RotationSet::kLutRoll);
    return (ia * RotationSet::kLutEl + ie) * RotationSet::kLutRoll + ir;
}

void build_nearest_lut(RotationSet& set) {
    const int cells = RotationSet::kLutAz * RotationSet::kLutEl * RotationSet::kLutRoll;
    set.nearestLut.assign(cells, 0);
    const int d = set.size();
    for (int ia = 0; ia < RotationSet::kLutAz; ++ia)
        for (int ie = 0; ie < RotationSet::kLutEl; ++ie)
            for (int ir = 0; ir < RotationSet::kLutRoll; ++ir) {
                AzElRoll c{-kPi + (ia + 0.5) * 2 * kPi / RotationSet::kLutAz,
                           -kPi / 2 + (ie + 0.5) * kPi / RotationSet::kLutEl,
                           -kPi + (ir + 0.5) * 2 * kPi / RotationSet::kLutRoll};
                const Mat3d frame = azimuth_to_frame(c);
                int best = 0;
                double bestDist = box_frame_distance(frame, set.rotationsD[0]);
                for (int i = 1; i < d; ++i) {
                    const double dist = box_frame_distance(frame, set.rotationsD[i]);
                    if (dist < bestDist) {
                        bestDist = dist;
                        best = i;
                    }
                }
                set.nearestLut[lut_cell(c)] = static_cast<uint8_t>(best);
            }
    // Pin each member to its own cell so stored members map to themselves
    // (or an earlier symmetry-duplicate). Extraction runs on the stored
    // single-precision matrix — the exact bits queries will present.
    std::vector<bool> pinned(cells, false);
    for (int i = 0; i < d; ++i) {
        const int cell = lut_cell(frame_to_azimuth(static_cast<Mat3d>(set.rotations[i])));
        if (!pinned[cell]) {
            set.nearestLut[cell] = static_cast<uint8_t>(i);
            pinned[cell] = true;
        }
    }
}

}  // namespace

std::vector<double> build_angles(int m) {
    if (m < 1) throw std::invalid_argument("build_angles: m must be >= 1");
    const double delta = kPi / (2 * m);
    std::vector<double> out;
    out.reserve(2 * m);
    for (int k = 1; k <= m; ++k) {
        out.push_back(k * delta);
        out.push_back(-(k * delta));
    }
    return out;
}

std::vector<Vec3d> build_axes(int count) {
    if (count < 3 || count > 13)
        throw std::invalid_argument("build_axes: count must be in [3, 13]");
    static const Vec3d ladder[13] = {
        {1, 0, 0},  {0, 1, 0},  {0, 0, 1},
        {1, 1, 0},  {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1},
        {1, 1, 1},  {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    std::vector<Vec3d> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(normalize(ladder[i]));
    return out;
}

RotationSet build_rotation_set(int axisCount, int m) {
    RotationSet set;
    set.axisCount = axisCount;
    set.m = m;
    set.axes = build_axes(axisCount);
    set.angles = build_angles(m);
    const size_t d = set.axes.size() * set.angles.size();
    if (d > ObbIndex::kNone - 1)
        throw std::invalid_argument("build_rotation_set: |K|*|A| exceeds 7-bit index budget");
    set.rotations.reserve(d);
    set.rotationsD.reserve(d);
    for (const Vec3d& axis : set.axes)
        for (double angle : set.angles) {
            const Mat3d r = axis_angle_rotation(axis, angle);
            set.rotationsD.push_back(r);
            set.rotations.push_back(static_cast<Mat3>(r));
        }
    encode_tables(set);
    build_nearest_lut(set);
    return set;
}

void encode_tables(RotationSet& set) {
    set.floatPool.clear();
    set.matrixRefs.assign(set.rotations.size(), {});
    std::unordered_map<uint32_t, uint16_t> slot;
    auto intern = [&](float f) {
        const uint32_t bits = std::bit_cast<uint32_t>(f);
        auto [it, inserted] = slot.try_emplace(bits, static_cast<uint16_t>(set.floatPool.size()));
        if (inserted) {
            if (set.floatPool.size() > 0xffff)
                throw std::length_error("encode_tables: float pool overflow");
            set.floatPool.push_back(f);
        }
        return it->second;
    };
    intern(0.0f);  // padding target, slot 0
    for (size_t i = 0; i < set.rotations.size(); ++i) {
        auto& refs = set.matrixRefs[i];
        int n = 0;
        for (int c = 0; c < 3; ++c) {
            const Vec3& col = set.rotations[i].col[c];
            refs[n++] = intern(col.x);
            refs[n++] = intern(col.y);
            refs[n++] = intern(col.z);
        }
        refs[9] = refs[10] = refs[11] = 0;
    }
}

Mat3 decode_rotation(const RotationSet& set, ObbIndex idx) {
    if (!idx.valid() || idx.value >= set.size())
        throw std::out_of_range("decode_rotation: index out of range");
    const auto& refs = set.matrixRefs[idx.value];
    Mat3 r;
    for (int c = 0; c < 3; ++c)
        r.col[c] = {set.floatPool[refs[c * 3 + 0]], set.floatPool[refs[c * 3 + 1]],
                    set.floatPool[refs[c * 3 + 2]]};
    return r;
}

ObbIndex make_obb_index(int i, const RotationSet& set) {
    if (i < 0 || i >= set.size())
        throw std::out_of_range("make_obb_index: index out of range");
    return ObbIndex(static_cast<uint8_t>(i));
}

ObbIndex nearest_rotation(const Mat3& frame, const RotationSet& set) {
    const int cell = lut_cell(frame_to_azimuth(static_cast<Mat3d>(frame)));
    return ObbIndex(set.nearestLut[cell]);
}

double box_frame_distance(const Mat3d& a, const Mat3d& b) {
    const Mat3d n = a.transposed() * b;
    double bestTrace = -4.0;
    for (const BoxSym& s : box_symmetries()) {
        // trace(N S) with S the signed permutation: sum_i sign[i] * N[i][perm[i]]
        double tr = 0;
        for (int i = 0; i < 3; ++i) tr += s.sign[i] * n.col[s.perm[i]][i];
        bestTrace = std::max(bestTrace, tr);
    }
    return std::acos(std::clamp((bestTrace - 1.0) / 2.0, -1.0, 1.0));
}

AzElRoll frame_to_azimuth(const Mat3d& r) {
    const Vec3d c0 = r.col[0];
    const double az = std::atan2(c0.y, c0.x);
    const double el = std::asin(std::clamp(c0.z, -1.0, 1.0));
    const Mat3d aligned = axis_angle_rotation({0, 1, 0}, el) *
                          axis_angle_rotation({0, 0, 1}, -az) * r;
    const double roll = std::atan2(aligned.col[1].z, aligned.col[1].y);
    return {az, el, roll};
}

Mat3d azimuth_to_frame(const AzElRoll& e) {
    return axis_angle_rotation({0, 0, 1}, e.az) * axis_angle_rotation({0, 1, 0}, -e.el) *
           axis_angle_rotation({1, 0, 0}, e.roll);
}

double nearest_lut_error_bound() {
    // A cell answer can differ from the exhaustive nearest by at most the
    // frame distance across one cell; bi-invariance of the geodesic metric
    // bounds that by the sum of the per-angle cell widths.
    return 2 * kPi / RotationSet::kLutAz + kPi / RotationSet::kLutEl +
           2 * kPi / RotationSet::kLutRoll;
}

}  // namespace dobb
