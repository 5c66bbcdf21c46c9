#include "dobb/bvh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace dobb {

namespace {

Aabb triangle_box(const Triangle& t) {
    Aabb b;
    b.grow(t.v0);
    b.grow(t.v1);
    b.grow(t.v2);
    return b;
}

uint32_t spread_bits_10(uint32_t v) {
    v &= 0x3ff;
    v = (v | (v << 16)) & 0x030000ff;
    v = (v | (v << 8)) & 0x0300f00f;
    v = (v | (v << 4)) & 0x030c30c3;
    v = (v | (v << 2)) & 0x09249249;
    return v;
}

uint32_t morton30(const Vec3& p, const Aabb& bounds) {
    auto axis = [](float v, float lo, float hi) {
        const float ext = hi - lo;
        const float n = ext > 0 ? (v - lo) / ext : 0.5f;
        return static_cast<uint32_t>(std::clamp(n * 1024.0f, 0.0f, 1023.0f));
    };
    return (spread_bits_10(axis(p.x, bounds.min.x, bounds.max.x)) << 2) |
           (spread_bits_10(axis(p.y, bounds.min.y, bounds.max.y)) << 1) |
           spread_bits_10(axis(p.z, bounds.min.z, bounds.max.z));
}

}  // namespace

std::vector<QuadLeaf> quadify(const Scene& scene) {
    const int n = scene.triangle_count();
    std::vector<Aabb> triBox(n);
    for (int t = 0; t < n; ++t) triBox[t] = triangle_box(scene.triangle(t));

    // edge (lo vertex id, hi vertex id) -> triangles touching it
    std::map<std::pair<int32_t, int32_t>, std::vector<int32_t>> edges;
    for (int t = 0; t < n; ++t) {
        const auto& tri = scene.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int32_t a = tri[e], b = tri[(e + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}].push_back(t);
        }
    }

    std::vector<int32_t> partner(n, -1);
    for (int t = 0; t < n; ++t) {
        if (partner[t] >= 0) continue;
        int32_t best = -1;
        float bestSa = std::numeric_limits<float>::infinity();
        const auto& tri = scene.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int32_t a = tri[e], b = tri[(e + 1) % 3];
            for (int32_t u : edges[{std::min(a, b), std::max(a, b)}]) {
                if (u == t || partner[u] >= 0) continue;
                const float sa = surface_area(merge(triBox[t], triBox[u]));
                if (sa < bestSa || (sa == bestSa && u < best)) {
                    bestSa = sa;
                    best = u;
                }
            }
        }
        if (best >= 0) {
            partner[t] = best;
            partner[best] = t;
        }
    }

    std::vector<QuadLeaf> leaves;
    leaves.reserve(n);
    for (int t = 0; t < n; ++t) {
        if (partner[t] >= 0 && partner[t] < t) continue;  // emitted with its partner
        QuadLeaf leaf;
        leaf.tri[0] = t;
        leaf.triCount = 1;
        const Triangle a = scene.triangle(t);
        leaf.verts[0] = a.v0;
        leaf.verts[1] = a.v1;
        leaf.verts[2] = a.v2;
        leaf.box = triBox[t];
        if (partner[t] >= 0) {
            const int32_t u = partner[t];
            leaf.tri[1] = u;
            leaf.triCount = 2;
            const Triangle b = scene.triangle(u);
            leaf.verts[3] = b.v0;
            leaf.verts[4] = b.v1;
            leaf.verts[5] = b.v2;
            leaf.box = merge(leaf.box, triBox[u]);
        }
        leaves.push_back(leaf);
    }
    return leaves;
}

Bvh2 build_bvh2(const Scene& scene, const BuildConfig& cfg) {
    if (scene.triangle_count() == 0) throw std::invalid_argument("build_bvh2: empty scene");
    Bvh2 bvh;
    bvh.leaves = quadify(scene);
    const int leafCount = static_cast<int>(bvh.leaves.size());

    Aabb centroidBounds;
    for (const QuadLeaf& leaf : bvh.leaves) centroidBounds.grow(leaf.box.center());
    struct Key {
        uint32_t code;
        int32_t leaf;
    };
    std::vector<Key> order(leafCount);
    for (int i = 0; i < leafCount; ++i)
        order[i] = {morton30(bvh.leaves[i].box.center(), centroidBounds), i};
    std::sort(order.begin(), order.end(), [](const Key& a, const Key& b) {
        return a.code != b.code ? a.code < b.code : a.leaf < b.leaf;
    });

    struct Cluster {
        Aabb box;
        int32_t node;
    };
    std::vector<Cluster> clusters(leafCount);
    for (int i = 0; i < leafCount; ++i) {
        const int32_t leaf = order[i].leaf;
        bvh.nodes.push_back({bvh.leaves[leaf].box, -1, -1, leaf});
        clusters[i] = {bvh.leaves[leaf].box, static_cast<int32_t>(bvh.nodes.size()) - 1};
    }

    const int radius = std::max(1, cfg.searchRadius);
    std::vector<int32_t> nn;
    std::vector<Cluster> next;
    while (clusters.size() > 1) {
        const int count = static_cast<int>(clusters.size());
        nn.assign(count, -1);
        for (int i = 0; i < count; ++i) {
            float bestSa = std::numeric_limits<float>::infinity();
            int32_t best = -1;
            const int lo = std::max(0, i - radius), hi = std::min(count - 1, i + radius);
            for (int j = lo; j <= hi; ++j) {
                if (j == i) continue;
                const float sa = surface_area(merge(clusters[i].box, clusters[j].box));
                if (sa < bestSa || (sa == bestSa && j < best)) {
                    bestSa = sa;
                    best = j;
                }
            }
            nn[i] = best;
        }
        next.clear();
        std::vector<bool> merged(count, false);
        for (int i = 0; i < count; ++i) {
            if (merged[i]) continue;
            const int32_t j = nn[i];
            if (j > i && nn[j] == i) {
                const Aabb box = merge(clusters[i].box, clusters[j].box);
                bvh.nodes.push_back({box, clusters[i].node, clusters[j].node, -1});
                next.push_back({box, static_cast<int32_t>(bvh.nodes.size()) - 1});
                merged[i] = merged[j] = true;
            } else {
                next.push_back(clusters[i]);
            }
        }
        clusters.swap(next);
    }
    bvh.root = clusters[0].node;
    return bvh;
}

WideBvh widen(const Bvh2& bvh2, int width) {
    if (width != 4 && width != 6 && width != 8)
        throw std::invalid_argument("widen: width must be 4, 6 or 8");
    WideBvh wide;
    wide.width = width;
    wide.leaves = bvh2.leaves;
    for (const QuadLeaf& leaf : wide.leaves)
        for (int i = 0; i < leaf.triCount; ++i) wide.primOrder.push_back(leaf.tri[i]);
    wide.rootBox = bvh2.nodes[bvh2.root].box;
    if (bvh2.nodes[bvh2.root].is_leaf()) {
        wide.rootLeaf = bvh2.nodes[bvh2.root].leaf;
        return wide;
    }

    // emit(b2Node) creates the wide node for an interior binary node and
    // returns its index; children are emitted depth-first in slot order.
    struct Emitter {
        const Bvh2& b2;
        WideBvh& out;
        int width;

        int32_t emit(int32_t b2Node) {
            std::vector<int32_t> kids = {b2.nodes[b2Node].left, b2.nodes[b2Node].right};
            while (static_cast<int>(kids.size()) < width) {
                int pick = -1;
                float bestSa = -1.0f;
                for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
                    if (b2.nodes[kids[k]].is_leaf()) continue;
                    const float sa = surface_area(b2.nodes[kids[k]].box);
                    if (sa > bestSa) {
                        bestSa = sa;
                        pick = k;
                    }
                }
                if (pick < 0) break;
                const int32_t expanded = kids[pick];
                kids[pick] = b2.nodes[expanded].left;
                kids.push_back(b2.nodes[expanded].right);
            }
            const int32_t self = static_cast<int32_t>(out.nodes.size());
            out.nodes.emplace_back();
            out.nodes[self].childCount = static_cast<uint8_t>(kids.size());
            for (int k = 0; k < WideBvh::kMaxWidth; ++k) {
                if (k < static_cast<int>(kids.size()))
                    out.nodes[self].boxes.set(k, b2.nodes[kids[k]].box);
                else
                    out.nodes[self].boxes.set_empty(k);
            }
            for (int k = 0; k < static_cast<int>(kids.size()); ++k) {
                const auto& child = b2.nodes[kids[k]];
                // note: out.nodes may reallocate inside emit; index self stays valid
                out.nodes[self].child[k] =
                    child.is_leaf() ? WideBvh::leaf_ref(child.leaf) : emit(kids[k]);
            }
            return self;
        }
    };
    Emitter emitter{bvh2, wide, width};
    wide.rootNode = emitter.emit(bvh2.root);
    return wide;
}

WideBvh build_wide_bvh(const Scene& scene, int width, const BuildConfig& cfg) {
    return widen(build_bvh2(scene, cfg), width);
}

namespace {

Aabb refit_and_check(const WideBvh& bvh, int32_t ref, std::vector<int>& nodeSeen,
                     std::vector<int>& leafSeen) {
    if (WideBvh::is_leaf_ref(ref)) {
        const int32_t leaf = WideBvh::leaf_index(ref);
        if (leaf < 0 || leaf >= static_cast<int32_t>(bvh.leaves.size()))
            throw std::runtime_error("wide bvh: leaf reference out of range");
        if (++leafSeen[leaf] > 1) throw std::runtime_error("wide bvh: leaf referenced twice");
        Aabb box;
        const QuadLeaf& l = bvh.leaves[leaf];
        for (int i = 0; i < 3 * l.triCount; ++i) box.grow(l.verts[i]);
        return box;
    }
    if (ref >= static_cast<int32_t>(bvh.nodes.size()))
        throw std::runtime_error("wide bvh: node reference out of range");
    if (++nodeSeen[ref] > 1) throw std::runtime_error("wide bvh: node referenced twice");
    const auto& node = bvh.nodes[ref];
    if (node.childCount < 2) throw std::runtime_error("wide bvh: interior node with < 2 children");
    if (node.childCount > bvh.width)
        throw std::runtime_error("wide bvh: node exceeds configured width");
    Aabb box;
    for (int k = 0; k < node.childCount; ++k) {
        const Aabb sub = refit_and_check(bvh, node.child[k], nodeSeen, leafSeen);
        const Aabb stored = node.boxes.get(k);
        if (!(stored.min == sub.min && stored.max == sub.max))
            throw std::runtime_error("wide bvh: stored child box differs from refit union");
        box = merge(box, sub);
    }
    return box;
}

}  // namespace

void validate_wide_bvh(const WideBvh& bvh, const Scene& scene) {
    std::vector<int> nodeSeen(bvh.nodes.size(), 0), leafSeen(bvh.leaves.size(), 0);
    const int32_t rootRef = bvh.rootNode >= 0 ? bvh.rootNode : WideBvh::leaf_ref(bvh.rootLeaf);
    const Aabb refit = refit_and_check(bvh, rootRef, nodeSeen, leafSeen);
    if (!(refit.min == bvh.rootBox.min && refit.max == bvh.rootBox.max))
        throw std::runtime_error("wide bvh: root box differs from refit union");
    for (size_t i = 0; i < leafSeen.size(); ++i)
        if (leafSeen[i] != 1) throw std::runtime_error("wide bvh: orphaned leaf");
    std::vector<int> triSeen(scene.triangle_count(), 0);
    for (const QuadLeaf& leaf : bvh.leaves)
        for (int i = 0; i < leaf.triCount; ++i) {
            const int32_t t = leaf.tri[i];
            if (t < 0 || t >= scene.triangle_count())
                throw std::runtime_error("wide bvh: triangle id out of range");
            ++triSeen[t];
        }
    for (int t = 0; t < scene.triangle_count(); ++t)
        if (triSeen[t] != 1)
            throw std::runtime_error("wide bvh: triangle " + std::to_string(t) +
                                     " referenced " + std::to_string(triSeen[t]) + " times");
}

double sah_cost(const WideBvh& bvh, double traversalCost, double intersectCost) {
    auto area = [](const Aabb& b) {
        if (b.is_empty()) return 0.0;
        const double dx = double(b.max.x) - b.min.x, dy = double(b.max.y) - b.min.y,
                     dz = double(b.max.z) - b.min.z;
        return 2.0 * (dx * dy + dy * dz + dz * dx);
    };
    if (bvh.rootNode < 0) return intersectCost * bvh.leaves[bvh.rootLeaf].triCount;
    double interior = area(bvh.rootBox);
    double leaf = 0;
    for (const auto& node : bvh.nodes)
        for (int k = 0; k < node.childCount; ++k) {
            const Aabb box = node.boxes.get(k);
            if (WideBvh::is_leaf_ref(node.child[k]))
                leaf += area(box) * bvh.leaves[WideBvh::leaf_index(node.child[k])].triCount;
            else
                interior += area(box);
        }
    return (traversalCost * interior + intersectCost * leaf) / area(bvh.rootBox);
}

}  // namespace dobb
