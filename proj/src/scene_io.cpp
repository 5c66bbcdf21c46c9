#include "dobb/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dobb/rng.hpp"

namespace dobb {

void Scene::compute_bounds() {
    bounds = Aabb::empty();
    for (const Vec3& v : vertices) bounds.grow(v);
}

void validate_scene(const Scene& scene, bool requireNonDegenerate) {
    for (size_t i = 0; i < scene.vertices.size(); ++i)
        if (!is_finite(scene.vertices[i]))
            throw std::runtime_error("scene validation: non-finite vertex " + std::to_string(i));
    const int32_t n = static_cast<int32_t>(scene.vertices.size());
    for (size_t t = 0; t < scene.triangles.size(); ++t)
        for (int32_t idx : scene.triangles[t])
            if (idx < 0 || idx >= n)
                throw std::runtime_error("scene validation: triangle " + std::to_string(t) +
                                         " references vertex " + std::to_string(idx) +
                                         " out of range");
    if (!scene.objectTags.empty() && scene.objectTags.size() != scene.triangles.size())
        throw std::runtime_error("scene validation: tag count does not match triangle count");
    if (requireNonDegenerate)
        for (size_t t = 0; t < scene.triangles.size(); ++t) {
            const Triangle tri = scene.triangle(static_cast<int>(t));
            const Vec3d e1 = static_cast<Vec3d>(tri.v1 - tri.v0);
            const Vec3d e2 = static_cast<Vec3d>(tri.v2 - tri.v0);
            if (dot(cross(e1, e2), cross(e1, e2)) <= 0.0)
                throw std::runtime_error("scene validation: degenerate triangle " +
                                         std::to_string(t));
        }
}

namespace {

[[noreturn]] void obj_error(const std::string& path, int line, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Scene load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open OBJ file: " + path);
    Scene scene;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) obj_error(path, lineNo, "malformed vertex");
            if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
                obj_error(path, lineNo, "non-finite vertex");
            scene.vertices.push_back(
                {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)});
        } else if (tag == "f") {
            std::vector<int32_t> face;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/t", "i//n", "i/t/n" — position index only
                const std::string first = tok.substr(0, tok.find('/'));
                int32_t idx;
                try {
                    idx = std::stoi(first);
                } catch (const std::exception&) {
                    obj_error(path, lineNo, "malformed face index '" + tok + "'");
                }
                const int32_t count = static_cast<int32_t>(scene.vertices.size());
                const int32_t resolved = idx < 0 ? count + idx : idx - 1;
                if (resolved < 0 || resolved >= count)
                    obj_error(path, lineNo, "face index " + std::to_string(idx) + " out of range");
                face.push_back(resolved);
            }
            if (face.size() < 3) obj_error(path, lineNo, "face with fewer than 3 vertices");
            for (size_t i = 1; i + 1 < face.size(); ++i)
                scene.triangles.push_back({face[0], face[i], face[i + 1]});
        }
        // all other directives (vn, vt, o, g, usemtl, ...) are ignored
    }
    scene.compute_bounds();
    validate_scene(scene);
    return scene;
}

namespace {

Vec3d sample_unit_vector(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

void append_cube(Scene& scene, const Vec3d& base, int32_t tag) {
    const int32_t v0 = static_cast<int32_t>(scene.vertices.size());
    for (int c = 0; c < 8; ++c)
        scene.vertices.push_back(static_cast<Vec3>(
            base + Vec3d{double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}));
    static const int quads[6][4] = {{0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                    {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 3, 7, 5}};
    for (const auto& q : quads) {
        scene.triangles.push_back({v0 + q[0], v0 + q[1], v0 + q[2]});
        scene.triangles.push_back({v0 + q[0], v0 + q[2], v0 + q[3]});
        scene.objectTags.push_back(tag);
        scene.objectTags.push_back(tag);
    }
}

}  // namespace

Scene gen_hairball(uint64_t seed, int strandCount, int segmentsPerStrand, float radius,
                   float thickness) {
    if (strandCount < 1 || segmentsPerStrand < 1 || radius <= 0.0f)
        throw std::invalid_argument("gen_hairball: counts and radius must be positive");
    const double half = 0.5 * std::max(double(thickness), 1e-4 * double(radius));
    Scene scene;
    scene.vertices.reserve(size_t(strandCount) * (segmentsPerStrand + 1) * 4);
    scene.triangles.reserve(size_t(strandCount) * segmentsPerStrand * 8);
    for (int s = 0; s < strandCount; ++s) {
        Rng rng = Rng::derive(seed, static_cast<uint64_t>(s));
        // Arc of a circle about the origin: plane normal n, radius rho,
        // random phase and span. Tangents stay in the circle plane, so the
        // plane normal is a safe frame reference for the tube cross-section.
        const Vec3d n = sample_unit_vector(rng);
        const Vec3d helper = std::abs(n.x) < 0.9 ? Vec3d{1, 0, 0} : Vec3d{0, 1, 0};
        const Vec3d e1 = normalize(cross(n, helper));
        const Vec3d e2 = cross(n, e1);
        const double rho = double(radius) * rng.uniform(0.35, 0.9);
        const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double span = rng.uniform(1.9, 5.0);
        std::vector<Vec3d> pts(segmentsPerStrand + 1);
        for (int i = 0; i <= segmentsPerStrand; ++i) {
            const double a = phase + span * i / segmentsPerStrand;
            pts[i] = e1 * (rho * std::cos(a)) + e2 * (rho * std::sin(a));
        }
        const int32_t ringBase = static_cast<int32_t>(scene.vertices.size());
        for (int i = 0; i <= segmentsPerStrand; ++i) {
            const Vec3d prev = pts[std::max(i - 1, 0)];
            const Vec3d next = pts[std::min(i + 1, segmentsPerStrand)];
            const Vec3d t = normalize(next - prev);
            const Vec3d b1 = normalize(cross(t, n));
            const Vec3d b2 = cross(t, b1);
            const Vec3d corner[4] = {b1 + b2, b1 - b2, -b1 - b2, -b1 + b2};
            for (const Vec3d& c : corner)
                scene.vertices.push_back(static_cast<Vec3>(pts[i] + c * half));
        }
        for (int i = 0; i < segmentsPerStrand; ++i) {
            const int32_t r0 = ringBase + 4 * i, r1 = r0 + 4;
            for (int k = 0; k < 4; ++k) {
                const int32_t a = r0 + k, b = r0 + (k + 1) % 4;
                const int32_t c = r1 + (k + 1) % 4, d = r1 + k;
                scene.triangles.push_back({a, b, c});
                scene.triangles.push_back({a, c, d});
                scene.objectTags.push_back(s);
                scene.objectTags.push_back(s);
            }
        }
    }
    scene.compute_bounds();
    validate_scene(scene, true);
    return scene;
}

Scene gen_axis_aligned_grid(uint64_t seed, int count) {
    if (count < 1) throw std::invalid_argument("gen_axis_aligned_grid: count must be positive");
    int side = 1;
    while (side * side * side < count) ++side;
    Scene scene;
    scene.vertices.reserve(size_t(count) * 8);
    scene.triangles.reserve(size_t(count) * 12);
    const double cell = 3.0;
    for (int i = 0; i < count; ++i) {
        Rng rng = Rng::derive(seed, static_cast<uint64_t>(i));
        const Vec3d g{double(i % side), double((i / side) % side), double(i / (side * side))};
        // jitter < cell - 1 keeps unit cubes inside disjoint cells
        const Vec3d jitter{rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
        append_cube(scene, g * cell + jitter, i);
    }
    scene.compute_bounds();
    validate_scene(scene, true);
    return scene;
}

}  // namespace dobb
