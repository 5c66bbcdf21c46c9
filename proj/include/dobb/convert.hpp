#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dobb/bvh.hpp"
#include "dobb/kdop.hpp"
#include "dobb/rotation_set.hpp"

// Bottom-up annotation pass that gives interior nodes a shared child-box
// orientation from the rotation dictionary whenever the oriented bounding
// boxes beat the axis-aligned ones under the surface-area criterion
// C_rotated < alpha * C_identity. Heuristic mode prices candidates with the
// conservative Dop26 apex bound and considers only the candidate propagated
// from the largest child; brute-force mode prices every dictionary member
// exactly via Dop225. The original tree is never modified — annotations sit
// alongside it, so the axis-aligned baseline stays available.

namespace dobb {

enum class ConvertMode { Heuristic, BruteForce };

struct ConversionConfig {
    double alpha = 1.0;  // must be > 0 to ever annotate; recommended (0.9, 1]
    int maxLevelsFromLeaf = -1;  // < 0 = unlimited; 0 = annotate nothing
    ConvertMode mode = ConvertMode::Heuristic;
};

struct DobbAnnotation {
    struct NodeInfo {
        ObbIndex obb;        // accepted orientation; kNone = node keeps its AABBs
        ObbIndex candidate;  // evaluated/propagated candidate, present regardless
        float costRotated = 0.0f;   // C_R at the candidate (0 when not evaluated)
        float costIdentity = 0.0f;  // C_I
        bool evaluated = false;     // false above the level cap
        bool accepted = false;
    };
    std::vector<NodeInfo> nodes;  // parallel to WideBvh::nodes
    // Child boxes in the accepted rotation's frame, outward-rounded; only
    // meaningful where nodes[i].accepted.
    std::vector<kernels::WideBoxSoA> rotatedBoxes;
    int annotatedCount = 0;

    bool empty() const { return annotatedCount == 0; }
};

// Per-leaf / per-node proxies and propagated candidates, kept for inspection
// and cross-checks. The 225-axis vectors are populated in brute mode only.
struct Sideband {
    std::vector<Dop26> leafDop, nodeDop;
    std::vector<Dop225> leafDopWide, nodeDopWide;
    std::vector<ObbIndex> leafCandidate, nodeCandidate;
    std::vector<int> nodeLevel;  // levels from leaf: leaf parents = 1
};

struct ConvertResult {
    DobbAnnotation annotation;
    Sideband sideband;
};

struct LeafFrameResult {
    Mat3 frame;
    bool degenerate = false;  // identity fallback used
};

// Orientation hint of a leaf. Single triangle: first axis = normalized
// second-longest edge, second axis = shortest edge orthogonalized against
// it, third = cross product. Edge-sharing pair: same rule over the four
// non-shared edges of the quad (skipping shortest edges parallel to the
// first axis). Disconnected pair: first triangle only. Length ties break to
// the lower enumeration index (triangle 0 edges 01, 12, 20, then triangle
// 1); collinear/degenerate input falls back to the identity, flagged.
LeafFrameResult leaf_frame(const QuadLeaf& leaf);

// Candidate of the child whose stored box has the largest surface area
// (ties to the lowest slot): leaves contribute nearest_rotation(leaf_frame),
// interior children their propagated candidate.
ObbIndex select_candidate(const WideBvh& bvh, int32_t node, const Sideband& sideband);

struct RotationEvaluation {
    std::array<Aabb, WideBvh::kMaxWidth> childBoxes;  // in the rotated frame
    double cost = 0.0;  // sum of child box surface areas
};

// Conservative pricing from the children's Dop26 proxies.
RotationEvaluation evaluate_rotation(const WideBvh& bvh, int32_t node, const Mat3& rot,
                                     const Sideband& sideband);
// Exact pricing from the children's Dop225 proxies.
RotationEvaluation evaluate_rotation_exact(const WideBvh& bvh, int32_t node,
                                           const std::array<ExactAxisTable::ColRef, 3>& refs,
                                           const Sideband& sideband);

ConvertResult convert(const WideBvh& bvh, const RotationSet& set, const ConversionConfig& cfg);

// Per-node record as a traversal-ready payload: a 7-bit orientation
// reference (high bit clear) and the 48 child-box floats.
struct PackedNodeRecord {
    uint8_t obbBits;
    uint8_t childCount;
    std::array<float, 48> boxes;  // WideBoxSoA layout
};

PackedNodeRecord encode_node(const WideBvh& bvh, const DobbAnnotation& ann, int32_t node,
                             const RotationSet& set);

struct DecodedNode {
    ObbIndex obb;
    Mat3 rotation;  // identity when obb is the sentinel
    kernels::WideBoxSoA boxes;
};

DecodedNode decode_node(const PackedNodeRecord& record, const RotationSet& set);

// Cost of the annotated tree: same accounting as the unannotated overload,
// but annotated nodes contribute their children's rotated-space box areas.
double sah_cost(const WideBvh& bvh, const DobbAnnotation& ann, double traversalCost = 1.0,
                double intersectCost = 1.0);

// Per-node diagnostic dump (orientation index, costs, acceptance).
std::string annotation_to_json(const WideBvh& bvh, const DobbAnnotation& ann,
                               const ConversionConfig& cfg);

}  // namespace dobb
