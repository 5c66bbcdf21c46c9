#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dobb/geom.hpp"

// Discrete rotation dictionary: D = |K| * |A| rotations built from an axis
// ladder and a symmetric quantized angle set, plus the compact encoding
// tables and the frame -> nearest-member lookup used when orienting nodes.

namespace dobb {

// 7-bit rotation reference. Values 0..D-1 name a dictionary member, kNone
// means "no oriented box". D is capped at 126 so the sentinel also fits in
// 7 bits.
struct ObbIndex {
    static constexpr uint8_t kNone = 0x7f;
    uint8_t value = kNone;

    constexpr ObbIndex() = default;
    explicit constexpr ObbIndex(uint8_t v) : value(v) {}

    constexpr bool valid() const { return value != kNone; }
    constexpr bool operator==(const ObbIndex& o) const { return value == o.value; }
};

struct RotationSet {
    int axisCount = 0;
    int m = 0;

    std::vector<Vec3d> axes;     // |K| unit axes, ladder order
    std::vector<double> angles;  // |A| = 2m values, [+d, -d, +2d, -2d, ...]

    // Member i = axisIdx * |A| + angleIdx. `rotations` is the stored
    // single-precision form every consumer uses; `rotationsD` keeps the
    // double-precision construction for oracle math and frame extraction.
    std::vector<Mat3> rotations;
    std::vector<Mat3d> rotationsD;

    // Two-level encoding: matrixRefs[i][0..8] index floatPool for the nine
    // column-major entries of rotations[i]; [9..11] are padding referencing
    // pool slot 0, which always holds 0.0f. Pool entries are deduplicated by
    // bit pattern, so reconstruction is bit-exact.
    std::vector<float> floatPool;
    std::vector<std::array<uint16_t, 12>> matrixRefs;

    // Quantized (azimuth, elevation, roll) grid; each cell holds the index
    // of the member nearest to the cell-center frame, except cells that
    // contain a member's own frame, which hold that member (makes mapping a
    // stored member exact).
    static constexpr int kLutAz = 32;
    static constexpr int kLutEl = 16;
    static constexpr int kLutRoll = 32;
    std::vector<uint8_t> nearestLut;

    int size() const { return static_cast<int>(rotations.size()); }
};

// Angle ladder {±d, ±2d, ..., ±md}, d = pi / (2m); never contains 0.
// m < 1 -> std::invalid_argument.
std::vector<double> build_angles(int m);

// First `count` axes of the ladder: 3 coordinate axes, 6 normalized face
// diagonals, 4 normalized space diagonals (one per antipodal pair).
// count outside [3, 13] -> std::invalid_argument.
std::vector<Vec3d> build_axes(int count);

// Builds members, encoding tables and nearest-lookup grid.
// Requires |K| * |A| <= 126 so indices plus sentinel fit in 7 bits.
RotationSet build_rotation_set(int axisCount, int m);

// Rebuilds floatPool / matrixRefs from the stored matrices.
void encode_tables(RotationSet& set);

// Reconstructs rotations[idx] from the encoding tables, bit-exact.
Mat3 decode_rotation(const RotationSet& set, ObbIndex idx);

// Checked construction of a member reference.
ObbIndex make_obb_index(int i, const RotationSet& set);

// Grid lookup of the member nearest to an orthonormal frame.
ObbIndex nearest_rotation(const Mat3& frame, const RotationSet& set);

// Geodesic rotation distance (radians) minimized over the 24 orientation-
// preserving box symmetries; frames related by axis permutation / sign flip
// bound the same boxes and compare as distance 0.
double box_frame_distance(const Mat3d& a, const Mat3d& b);

// Frame parametrization used by the lookup grid: azimuth/elevation aim
// column 0, roll spins about it.
struct AzElRoll {
    double az, el, roll;
};
AzElRoll frame_to_azimuth(const Mat3d& r);
Mat3d azimuth_to_frame(const AzElRoll& e);

// Upper bound (radians) on the extra distance a grid answer may carry over
// the exhaustive nearest member.
double nearest_lut_error_bound();

}  // namespace dobb
