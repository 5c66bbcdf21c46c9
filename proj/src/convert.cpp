#include "dobb/convert.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>

#include "json.hpp"

namespace dobb {

namespace {

double interval_area(const std::array<IntervalD, 3>& iv) {
    const double dx = iv[0].hi - iv[0].lo, dy = iv[1].hi - iv[1].lo, dz = iv[2].hi - iv[2].lo;
    return 2.0 * (dx * dy + dy * dz + dz * dx);
}

Aabb interval_box(const Interval& x, const Interval& y, const Interval& z) {
    return {{x.lo, y.lo, z.lo}, {x.hi, y.hi, z.hi}};
}

Aabb interval_box_outward(const std::array<IntervalD, 3>& iv) {
    return {{round_down_to_float(iv[0].lo), round_down_to_float(iv[1].lo),
             round_down_to_float(iv[2].lo)},
            {round_up_to_float(iv[0].hi), round_up_to_float(iv[1].hi),
             round_up_to_float(iv[2].hi)}};
}

}  // namespace

LeafFrameResult leaf_frame(const QuadLeaf& leaf) {
    struct Edge {
        Vec3d dir;
        double len2;
    };
    std::vector<Edge> edges;
    auto push_edges = [&](int tri) {
        for (int e = 0; e < 3; ++e) {
            const Vec3d a = static_cast<Vec3d>(leaf.verts[3 * tri + e]);
            const Vec3d b = static_cast<Vec3d>(leaf.verts[3 * tri + (e + 1) % 3]);
            edges.push_back({b - a, dot(b - a, b - a)});
        }
    };
    bool quad = false;
    int sharedA = -1, sharedB = -1;
    if (leaf.triCount == 2) {
        // shared edge = two vertices with identical positions in both
        // triangles (cached from the same source vertices)
        for (int i = 0; i < 3 && sharedB < 0; ++i)
            for (int j = 0; j < 3; ++j)
                if (leaf.verts[i] == leaf.verts[3 + j]) {
                    if (sharedA < 0)
                        sharedA = i;
                    else if (sharedB < 0 && sharedA != i)
                        sharedB = i;
                }
        quad = sharedB >= 0;
    }
    if (quad) {
        push_edges(0);
        push_edges(1);
        // Drop the shared edge — the one connecting the two common vertex
        // positions — once from each triangle. Matching by endpoint
        // positions, not direction: a parallel equal-length outer edge pair
        // (opposite sides of a rectangle) must survive.
        const Vec3 sa = leaf.verts[sharedA], sb = leaf.verts[sharedB];
        const auto is_shared = [&](int tri, int e) {
            const Vec3& u = leaf.verts[3 * tri + e];
            const Vec3& v = leaf.verts[3 * tri + (e + 1) % 3];
            return (u == sa && v == sb) || (u == sb && v == sa);
        };
        for (int j = 0; j < 3; ++j)
            if (is_shared(1, j)) {
                edges.erase(edges.begin() + 3 + j);
                break;
            }
        for (int i = 0; i < 3; ++i)
            if (is_shared(0, i)) {
                edges.erase(edges.begin() + i);
                break;
            }
    } else {
        push_edges(0);
    }

    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& a, const Edge& b) { return a.len2 > b.len2; });
    const LeafFrameResult fallback{Mat3::identity(), true};
    if (edges.size() < 2) return fallback;
    const double longest2 = edges[0].len2;
    const Edge& second = edges[1];
    if (longest2 <= 0.0 || second.len2 <= 1e-18 * longest2) return fallback;
    const Vec3d a0 = normalize(second.dir);
    // shortest edge with a usable component orthogonal to a0
    for (size_t i = edges.size(); i-- > 0;) {
        if (edges[i].len2 <= 0.0) continue;
        const Vec3d e = edges[i].dir;
        const Vec3d orth = e - a0 * dot(a0, e);
        if (dot(orth, orth) > 1e-12 * edges[i].len2) {
            const Vec3d a1 = normalize(orth);
            const Vec3d a2 = cross(a0, a1);
            return {static_cast<Mat3>(Mat3d{a0, a1, a2}), false};
        }
    }
    return fallback;
}

ObbIndex select_candidate(const WideBvh& bvh, int32_t node, const Sideband& sideband) {
    const auto& n = bvh.nodes[node];
    int best = 0;
    float bestSa = -1.0f;
    for (int k = 0; k < n.childCount; ++k) {
        const float sa = surface_area(n.boxes.get(k));
        if (sa > bestSa) {
            bestSa = sa;
            best = k;
        }
    }
    const int32_t ref = n.child[best];
    return WideBvh::is_leaf_ref(ref) ? sideband.leafCandidate[WideBvh::leaf_index(ref)]
                                     : sideband.nodeCandidate[ref];
}

RotationEvaluation evaluate_rotation(const WideBvh& bvh, int32_t node, const Mat3& rot,
                                     const Sideband& sideband) {
    const auto& n = bvh.nodes[node];
    const ApexMap& map = apex_map();
    RotationEvaluation out;
    for (int k = 0; k < n.childCount; ++k) {
        const int32_t ref = n.child[k];
        const Dop26& dop = WideBvh::is_leaf_ref(ref)
                               ? sideband.leafDop[WideBvh::leaf_index(ref)]
                               : sideband.nodeDop[ref];
        if (dop.is_empty()) {
            out.childBoxes[k] = {{0, 0, 0}, {0, 0, 0}};
            continue;
        }
        const auto iv = obb_extents(dop, map, rot);
        out.childBoxes[k] = interval_box(iv[0], iv[1], iv[2]);
        out.cost += interval_area({IntervalD{iv[0].lo, iv[0].hi}, IntervalD{iv[1].lo, iv[1].hi},
                                   IntervalD{iv[2].lo, iv[2].hi}});
    }
    return out;
}

RotationEvaluation evaluate_rotation_exact(const WideBvh& bvh, int32_t node,
                                           const std::array<ExactAxisTable::ColRef, 3>& refs,
                                           const Sideband& sideband) {
    const auto& n = bvh.nodes[node];
    RotationEvaluation out;
    for (int k = 0; k < n.childCount; ++k) {
        const int32_t ref = n.child[k];
        const Dop225& dop = WideBvh::is_leaf_ref(ref)
                                ? sideband.leafDopWide[WideBvh::leaf_index(ref)]
                                : sideband.nodeDopWide[ref];
        if (dop.is_empty()) {
            out.childBoxes[k] = {{0, 0, 0}, {0, 0, 0}};
            continue;
        }
        const auto iv = exact_extents(dop, refs);
        out.childBoxes[k] = interval_box_outward(iv);
        out.cost += interval_area(iv);
    }
    return out;
}

ConvertResult convert(const WideBvh& bvh, const RotationSet& set, const ConversionConfig& cfg) {
    if (cfg.alpha < 0.0) throw std::invalid_argument("convert: alpha must be non-negative");
    const bool brute = cfg.mode == ConvertMode::BruteForce;
    ConvertResult result;
    Sideband& side = result.sideband;
    DobbAnnotation& ann = result.annotation;

    const int leafCount = static_cast<int>(bvh.leaves.size());
    const int nodeCount = static_cast<int>(bvh.nodes.size());
    side.leafDop.resize(leafCount);
    side.leafCandidate.resize(leafCount);
    side.nodeDop.resize(nodeCount);
    side.nodeCandidate.assign(nodeCount, ObbIndex());
    side.nodeLevel.assign(nodeCount, 0);
    ExactAxisTable table;
    std::array<ExactAxisTable::ColRef, 3> identityRefs{};
    if (brute) {
        table = build_exact_axis_table(set);
        identityRefs = resolve_rotation_refs(table, Mat3::identity());
        side.leafDopWide.resize(leafCount);
        side.nodeDopWide.resize(nodeCount);
    }
    for (int l = 0; l < leafCount; ++l) {
        const QuadLeaf& leaf = bvh.leaves[l];
        const std::span<const Vec3> pts(leaf.verts.data(), size_t(3) * leaf.triCount);
        side.leafDop[l] = dop_from_points(pts);
        if (brute) side.leafDopWide[l] = dop225_from_points(pts, table);
        side.leafCandidate[l] = nearest_rotation(leaf_frame(leaf).frame, set);
    }

    ann.nodes.resize(nodeCount);
    ann.rotatedBoxes.resize(nodeCount);
    if (bvh.rootNode < 0) return result;  // single-leaf tree: nothing to annotate

    const int levelCap = cfg.maxLevelsFromLeaf < 0 ? std::numeric_limits<int>::max()
                                                   : cfg.maxLevelsFromLeaf;
    // children are emitted after their parent, so reverse index order is
    // bottom-up: all child data is final before the parent runs
    for (int32_t node = nodeCount - 1; node >= 0; --node) {
        const auto& n = bvh.nodes[node];
        int level = 0;
        Dop26 merged = Dop26::empty();
        for (int k = 0; k < n.childCount; ++k) {
            const int32_t ref = n.child[k];
            if (WideBvh::is_leaf_ref(ref)) {
                merged = dop_merge(merged, side.leafDop[WideBvh::leaf_index(ref)]);
                level = std::max(level, 1);
            } else {
                merged = dop_merge(merged, side.nodeDop[ref]);
                level = std::max(level, side.nodeLevel[ref] + 1);
            }
        }
        side.nodeDop[node] = merged;
        side.nodeLevel[node] = level;
        if (brute) {
            Dop225 mergedWide = dop225_from_points({}, table);
            for (int k = 0; k < n.childCount; ++k) {
                const int32_t ref = n.child[k];
                mergedWide = dop225_merge(
                    mergedWide, WideBvh::is_leaf_ref(ref)
                                    ? side.leafDopWide[WideBvh::leaf_index(ref)]
                                    : side.nodeDopWide[ref]);
            }
            side.nodeDopWide[node] = mergedWide;
        }

        auto& info = ann.nodes[node];
        if (level > levelCap) {
            info.candidate = select_candidate(bvh, node, side);
            side.nodeCandidate[node] = info.candidate;
            continue;
        }
        RotationEvaluation eval;
        ObbIndex candidate;
        double costIdentity;
        if (brute) {
            int bestIdx = 0;
            RotationEvaluation best =
                evaluate_rotation_exact(bvh, node, table.memberRefs[0], side);
            for (int i = 1; i < set.size(); ++i) {
                RotationEvaluation e =
                    evaluate_rotation_exact(bvh, node, table.memberRefs[i], side);
                if (e.cost < best.cost) {
                    best = e;
                    bestIdx = i;
                }
            }
            eval = best;
            candidate = make_obb_index(bestIdx, set);
            costIdentity = evaluate_rotation_exact(bvh, node, identityRefs, side).cost;
        } else {
            candidate = select_candidate(bvh, node, side);
            eval = evaluate_rotation(bvh, node, set.rotations[candidate.value], side);
            costIdentity = evaluate_rotation(bvh, node, Mat3::identity(), side).cost;
        }
        info.candidate = candidate;
        info.evaluated = true;
        info.costRotated = static_cast<float>(eval.cost);
        info.costIdentity = static_cast<float>(costIdentity);
        side.nodeCandidate[node] = candidate;
        if (eval.cost < cfg.alpha * costIdentity) {
            info.accepted = true;
            info.obb = candidate;
            auto& boxes = ann.rotatedBoxes[node];
            for (int k = 0; k < WideBvh::kMaxWidth; ++k) {
                if (k < n.childCount)
                    boxes.set(k, eval.childBoxes[k]);
                else
                    boxes.set_empty(k);
            }
            ++ann.annotatedCount;
        }
    }
    return result;
}

PackedNodeRecord encode_node(const WideBvh& bvh, const DobbAnnotation& ann, int32_t node,
                             const RotationSet& set) {
    const auto& info = ann.nodes.at(node);
    if (info.obb.valid() && info.obb.value >= set.size())
        throw std::invalid_argument("encode_node: orientation index out of dictionary range");
    PackedNodeRecord rec;
    rec.obbBits = info.obb.value;  // 7 bits by construction (kNone = 0x7f)
    rec.childCount = bvh.nodes[node].childCount;
    const kernels::WideBoxSoA& boxes =
        info.accepted ? ann.rotatedBoxes[node] : bvh.nodes[node].boxes;
    static_assert(sizeof(kernels::WideBoxSoA) == sizeof(rec.boxes));
    std::memcpy(rec.boxes.data(), &boxes, sizeof(rec.boxes));
    return rec;
}

DecodedNode decode_node(const PackedNodeRecord& record, const RotationSet& set) {
    if (record.obbBits != ObbIndex::kNone && record.obbBits >= set.size())
        throw std::invalid_argument("decode_node: orientation index out of dictionary range");
    DecodedNode out;
    out.obb = ObbIndex(record.obbBits);
    out.rotation = out.obb.valid() ? decode_rotation(set, out.obb) : Mat3::identity();
    std::memcpy(&out.boxes, record.boxes.data(), sizeof(out.boxes));
    return out;
}

double sah_cost(const WideBvh& bvh, const DobbAnnotation& ann, double traversalCost,
                double intersectCost) {
    auto area = [](const Aabb& b) {
        if (b.is_empty()) return 0.0;
        const double dx = double(b.max.x) - b.min.x, dy = double(b.max.y) - b.min.y,
                     dz = double(b.max.z) - b.min.z;
        return 2.0 * (dx * dy + dy * dz + dz * dx);
    };
    if (bvh.rootNode < 0) return intersectCost * bvh.leaves[bvh.rootLeaf].triCount;
    double interior = area(bvh.rootBox);
    double leaf = 0;
    for (size_t i = 0; i < bvh.nodes.size(); ++i) {
        const auto& node = bvh.nodes[i];
        const kernels::WideBoxSoA& boxes =
            ann.nodes[i].accepted ? ann.rotatedBoxes[i] : node.boxes;
        for (int k = 0; k < node.childCount; ++k) {
            const Aabb box = boxes.get(k);
            if (WideBvh::is_leaf_ref(node.child[k]))
                leaf += area(box) * bvh.leaves[WideBvh::leaf_index(node.child[k])].triCount;
            else
                interior += area(box);
        }
    }
    return (traversalCost * interior + intersectCost * leaf) / area(bvh.rootBox);
}

std::string annotation_to_json(const WideBvh& bvh, const DobbAnnotation& ann,
                               const ConversionConfig& cfg) {
    nlohmann::json j;
    j["mode"] = cfg.mode == ConvertMode::BruteForce ? "brute" : "heuristic";
    j["alpha"] = cfg.alpha;
    j["maxLevelsFromLeaf"] = cfg.maxLevelsFromLeaf;
    j["annotatedCount"] = ann.annotatedCount;
    j["nodeCount"] = bvh.nodes.size();
    nlohmann::json nodes = nlohmann::json::array();
    for (size_t i = 0; i < ann.nodes.size(); ++i) {
        const auto& info = ann.nodes[i];
        nlohmann::json n;
        n["node"] = i;
        n["evaluated"] = info.evaluated;
        n["accepted"] = info.accepted;
        n["obbIndex"] = info.obb.valid() ? nlohmann::json(info.obb.value) : nlohmann::json();
        n["candidate"] =
            info.candidate.valid() ? nlohmann::json(info.candidate.value) : nlohmann::json();
        n["costRotated"] = info.costRotated;
        n["costIdentity"] = info.costIdentity;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2);
}

}  // namespace dobb
