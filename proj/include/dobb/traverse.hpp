#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dobb/bvh.hpp"
#include "dobb/convert.hpp"
#include "dobb/rotation_set.hpp"

// Stack-based closest-hit traversal with iteration accounting, over the
// axis-aligned tree or the same tree plus orientation annotations. The local
// ray of an annotated node is always recomputed from the original ray (never
// chained through parent frames), and triangles are intersected in world
// space, so all variants agree on hit distances bit for bit.

namespace dobb {

struct TraversalStats {
    int64_t iterations = 0;  // stack pops
    int64_t nodeTests = 0;   // box slab tests (root box + every tested child lane)
    int64_t triTests = 0;
};

struct TraceResult {
    HitRecord hit;
    TraversalStats stats;
};

// Closest hit of one ray. ann == nullptr (or a node without an accepted
// orientation) means pure axis-aligned traversal; set is only required when
// ann is given. Candidates pop nearest-entry-first; on equal entry distance
// the lower child slot pops first. Popped entries whose entry distance
// exceeds the current best hit are counted but skipped.
TraceResult traverse_closest(const WideBvh& bvh, const Ray& ray,
                             const DobbAnnotation* ann = nullptr,
                             const RotationSet* set = nullptr);

struct BatchStats {
    std::vector<HitRecord> hits;          // per ray
    std::vector<TraversalStats> stats;    // per ray
    int64_t maxIterations = 0;
    double avgIterations = 0.0;
    int64_t totalIterations = 0;
    int64_t hitCount = 0;
};

// Traces a batch, optionally on several threads over preassigned contiguous
// chunks; per-ray results and all aggregates are byte-identical for any
// thread count.
BatchStats batch_trace(const WideBvh& bvh, std::span<const Ray> rays,
                       const DobbAnnotation* ann = nullptr, const RotationSet* set = nullptr,
                       int threadCount = 1);

}  // namespace dobb
