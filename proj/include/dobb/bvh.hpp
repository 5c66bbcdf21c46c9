#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dobb/geom.hpp"
#include "dobb/kernels.hpp"
#include "dobb/scene_io.hpp"

// Axis-aligned BVH construction: greedy shared-edge triangle pairing into
// quad leaves, a deterministic PLOC-style agglomerative binary build over
// Morton-sorted leaves, and top-down widening to N in {4, 6, 8}.

namespace dobb {

struct QuadLeaf {
    std::array<int32_t, 2> tri{-1, -1};  // original triangle ids
    int triCount = 0;
    std::array<Vec3, 6> verts{};  // cached vertices, 3 per triangle
    Aabb box;

    Triangle triangle(int i) const { return {verts[3 * i], verts[3 * i + 1], verts[3 * i + 2]}; }
};

struct BuildConfig {
    int searchRadius = 16;  // neighbor window of the clustering sweep
};

struct Bvh2 {
    struct Node {
        Aabb box;
        int32_t left = -1, right = -1;
        int32_t leaf = -1;
        bool is_leaf() const { return leaf >= 0; }
    };
    std::vector<Node> nodes;
    std::vector<QuadLeaf> leaves;
    int32_t root = -1;
};

struct WideBvh {
    static constexpr int kMaxWidth = kernels::kWideLanes;

    struct Node {
        kernels::WideBoxSoA boxes;  // lane L bounds child L; empty beyond childCount
        std::array<int32_t, kMaxWidth> child{};  // >= 0: node index; < 0: ~leaf index
        uint8_t childCount = 0;
    };

    int width = 8;
    std::vector<Node> nodes;
    std::vector<QuadLeaf> leaves;
    int32_t rootNode = -1;  // -1 iff the whole tree is the single leaf rootLeaf
    int32_t rootLeaf = -1;
    Aabb rootBox;
    std::vector<int32_t> primOrder;  // triangle ids in leaf-array order

    static constexpr int32_t leaf_ref(int32_t leafIdx) { return ~leafIdx; }
    static constexpr bool is_leaf_ref(int32_t ref) { return ref < 0; }
    static constexpr int32_t leaf_index(int32_t ref) { return ~ref; }
};

// Greedy pairing: triangles sharing an edge (by vertex index) pair up when
// that minimizes the pair's bounding-box surface area; leftovers become
// singleton leaves. Deterministic: triangles scanned in index order, ties to
// the lowest partner id.
std::vector<QuadLeaf> quadify(const Scene& scene);

// Agglomerative binary build: leaves sorted by 30-bit Morton code of their
// box centers (ties by index), then repeated merging of mutually nearest
// neighbors (smallest merged surface area, ties to the lower index) within
// the search window. Sequential and deterministic. Empty scene -> error.
Bvh2 build_bvh2(const Scene& scene, const BuildConfig& cfg = {});

// Top-down collapse of the binary tree: grow each wide node by expanding its
// largest-surface-area interior child (ties to the lowest slot; expansion
// replaces the child with its left child in place and appends the right)
// until width is reached or only leaves remain. width must be 4, 6 or 8.
WideBvh widen(const Bvh2& bvh2, int width);

WideBvh build_wide_bvh(const Scene& scene, int width, const BuildConfig& cfg = {});

// Structural check: every triangle referenced exactly once, every node
// referenced exactly once, child boxes equal the refit union of their
// subtree, interior nodes have >= 2 children. Throws on violation.
void validate_wide_bvh(const WideBvh& bvh, const Scene& scene);

// Surface-area cost: (Ct * sum of interior-node box areas + Ci * sum over
// leaves of box area * triangle count) / root area, every box taken as
// stored in its parent (the root contributes its own box). A single-leaf
// tree costs Ci * triangle count.
double sah_cost(const WideBvh& bvh, double traversalCost = 1.0, double intersectCost = 1.0);

}  // namespace dobb
