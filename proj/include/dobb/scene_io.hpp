#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dobb/geom.hpp"

// Mesh ingestion plus the two synthetic generators the measurement suites
// run on: a hairball of thin arbitrarily-oriented tubes (oriented boxes
// should win) and a field of jittered axis-aligned cubes (they should not).

namespace dobb {

struct Scene {
    std::vector<Vec3> vertices;
    std::vector<std::array<int32_t, 3>> triangles;
    // optional per-triangle object id (strand / cube); empty when untagged
    std::vector<int32_t> objectTags;
    Aabb bounds;

    int triangle_count() const { return static_cast<int>(triangles.size()); }
    Triangle triangle(int i) const {
        const auto& t = triangles[i];
        return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
    }
    void compute_bounds();
};

// Throws std::runtime_error on non-finite vertices, out-of-range indices, or
// (when requireNonDegenerate) zero-area triangles.
void validate_scene(const Scene& scene, bool requireNonDegenerate = false);

// Positions and faces only; n-gon faces fan-triangulated; negative OBJ
// indices resolved relative to the current vertex count. Errors carry
// file:line context.
Scene load_obj(const std::string& path);

// Thin square tubes following circular-arc polylines inside a sphere of the
// given radius; every strand gets an independent seed-derived stream, so the
// scene is a pure function of the arguments. 8 triangles per segment (4 side
// quads, no caps). Thickness is clamped to 1e-4 * radius to keep triangles
// non-degenerate.
Scene gen_hairball(uint64_t seed, int strandCount, int segmentsPerStrand, float radius,
                   float thickness);

// Axis-aligned unit cubes (12 triangles each) on a jittered grid; cubes
// never overlap and every face stays axis-aligned.
Scene gen_axis_aligned_grid(uint64_t seed, int count);

}  // namespace dobb
