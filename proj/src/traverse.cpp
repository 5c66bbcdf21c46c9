#include "dobb/traverse.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace dobb {

namespace {

struct StackEntry {
    int32_t ref;
    float tEnter;
};

// Slab-tests one box through the 8-wide kernel so root and child boxes share
// identical numerics (including the exit-side guard).
float single_box_enter(const Ray& ray, const Aabb& box) {
    kernels::WideBoxSoA soa;
    soa.set(0, box);
    for (int i = 1; i < kernels::kWideLanes; ++i) soa.set_empty(i);
    float tEnter[kernels::kWideLanes];
    kernels::ray_box_8(kernels::RaySetup::make(ray), soa, ray.tMax, tEnter);
    return tEnter[0];
}

}  // namespace

TraceResult traverse_closest(const WideBvh& bvh, const Ray& ray, const DobbAnnotation* ann,
                             const RotationSet* set) {
    if (ann && !set)
        throw std::invalid_argument("traverse_closest: annotation requires its rotation set");
    if (ann && ann->nodes.size() != bvh.nodes.size())
        throw std::invalid_argument("traverse_closest: annotation does not match tree");
    TraceResult out;
    HitRecord& best = out.hit;
    TraversalStats& st = out.stats;

    out.stats.nodeTests += 1;
    const float rootEnter = single_box_enter(ray, bvh.rootBox);
    if (rootEnter == kernels::kMiss) return out;

    const kernels::RaySetup baseSetup = kernels::RaySetup::make(ray);
    StackEntry stack[192];
    int top = 0;
    stack[top++] = {bvh.rootNode >= 0 ? bvh.rootNode : WideBvh::leaf_ref(bvh.rootLeaf), rootEnter};

    while (top > 0) {
        const StackEntry entry = stack[--top];
        ++st.iterations;
        if (entry.tEnter > best.t) continue;  // stale: a closer hit already exists

        if (WideBvh::is_leaf_ref(entry.ref)) {
            const QuadLeaf& leaf = bvh.leaves[WideBvh::leaf_index(entry.ref)];
            st.triTests += leaf.triCount;
            for (int i = 0; i < leaf.triCount; ++i) {
                const HitRecord hit = ray_triangle_intersect(ray, leaf.triangle(i), leaf.tri[i]);
                if (hit.valid() && hit.t < best.t) best = hit;
            }
            continue;
        }

        const auto& node = bvh.nodes[entry.ref];
        const float tLimit = std::min(ray.tMax, best.t);
        float tEnter[kernels::kWideLanes];
        if (ann && ann->nodes[entry.ref].accepted) {
            const Mat3& rot = set->rotations[ann->nodes[entry.ref].obb.value];
            const Ray local = transform_ray(ray, rot);
            kernels::ray_box_8(kernels::RaySetup::make(local), ann->rotatedBoxes[entry.ref],
                               tLimit, tEnter);
        } else {
            kernels::ray_box_8(baseSetup, node.boxes, tLimit, tEnter);
        }
        st.nodeTests += node.childCount;

        // push hit lanes sorted by descending entry distance so the nearest
        // pops first; equal distances pop in slot order
        StackEntry hits[WideBvh::kMaxWidth];
        int hitCount = 0;
        for (int k = 0; k < node.childCount; ++k) {
            if (tEnter[k] == kernels::kMiss) continue;
            const StackEntry cand{node.child[k], tEnter[k]};
            int pos = hitCount++;
            while (pos > 0 && hits[pos - 1].tEnter < cand.tEnter) {
                hits[pos] = hits[pos - 1];
                --pos;
            }
            hits[pos] = cand;
        }
        if (top + hitCount > static_cast<int>(std::size(stack)))
            throw std::runtime_error("traverse_closest: stack overflow (malformed tree?)");
        for (int i = 0; i < hitCount; ++i) stack[top++] = hits[i];
    }
    return out;
}

BatchStats batch_trace(const WideBvh& bvh, std::span<const Ray> rays, const DobbAnnotation* ann,
                       const RotationSet* set, int threadCount) {
    BatchStats out;
    const size_t n = rays.size();
    out.hits.resize(n);
    out.stats.resize(n);
    const int threads = std::clamp<int>(threadCount, 1, 64);
    auto worker = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            TraceResult r = traverse_closest(bvh, rays[i], ann, set);
            out.hits[i] = r.hit;
            out.stats[i] = r.stats;
        }
    };
    if (threads == 1 || n < 2) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const size_t lo = std::min(n, t * chunk), hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (size_t i = 0; i < n; ++i) {
        out.totalIterations += out.stats[i].iterations;
        out.maxIterations = std::max(out.maxIterations, out.stats[i].iterations);
        if (out.hits[i].valid()) ++out.hitCount;
    }
    out.avgIterations = n > 0 ? double(out.totalIterations) / double(n) : 0.0;
    return out;
}

}  // namespace dobb
