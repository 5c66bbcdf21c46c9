#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dobb/bvh.hpp"
#include "dobb/convert.hpp"
#include "dobb/scene_io.hpp"
#include "dobb/traverse.hpp"

// Measurement harness: builds one tree per config, converts it per requested
// mode, traces every variant over byte-identical primary and one-bounce
// ray sets, and emits a CSV report (absolute values + ratios against the
// axis-aligned baseline) plus per-pixel iteration heatmaps.

namespace dobb {

struct CameraConfig {
    Vec3 eye{0, 0, 5};
    Vec3 lookAt{0, 0, 0};
    Vec3 up{0, 1, 0};
    float vfovDeg = 45.0f;
    int width = 256, height = 256;
};

// One pinhole ray per pixel through the pixel center, row-major.
std::vector<Ray> gen_primary_rays(const CameraConfig& cam);

struct GiRays {
    std::vector<Ray> rays;
    std::vector<int32_t> pixel;  // source pixel of each ray
};

// One cosine-weighted bounce ray per primary hit, sampled about the
// geometric normal flipped toward the incoming ray; origins are offset by
// 1e-4 * scene diagonal. Pixels whose primary ray missed produce no ray.
// Deterministic per seed (each pixel draws from its own derived stream).
GiRays gen_gi_rays_from_hits(const Scene& scene, std::span<const Ray> primaryRays,
                             std::span<const HitRecord> primaryHits, uint64_t seed);

// Convenience form that traces the primaries against the tree first.
GiRays gen_gi_rays(const Scene& scene, const WideBvh& bvh, const CameraConfig& cam,
                   uint64_t seed);

struct BenchConfig {
    // scene: "hairball", "grid", or a .obj path
    std::string scene = "hairball";
    uint64_t sceneSeed = 42;
    int strands = 1000;
    int segments = 8;
    float radius = 1.0f;
    float thickness = 0.004f;
    int gridCount = 64;

    int width = 8;       // tree width
    int searchRadius = 16;
    double alpha = 1.0;
    int maxLevelsFromLeaf = -1;
    int axes = 13;
    int m = 4;
    std::vector<std::string> modes{"aabb", "heuristic", "brute"};

    CameraConfig camera;
    bool autoCamera = true;  // frame the scene bounds, ignoring camera pose
    bool gi = true;
    uint64_t giSeed = 7;
    int threads = 1;
    std::string outDir = "bench_out";
};

// JSON file with the same field names; unknown keys rejected.
BenchConfig load_bench_config(const std::string& path);

struct VariantReport {
    std::string mode;  // "aabb" | "heuristic" | "brute"
    double sahCost = 0.0;
    int annotatedNodes = 0;
    double convertMillis = 0.0;  // informational; never written to the CSV
    BatchStats primary;
    BatchStats gi;
};

struct RunReport {
    BenchConfig cfg;
    std::string sceneLabel;
    int dictionarySize = 0;
    int triangleCount = 0;
    double buildMillis = 0.0;  // informational; never written to the CSV
    std::vector<int32_t> giPixel;
    std::vector<VariantReport> variants;  // baseline first
};

// Builds, converts and traces. The baseline variant is always measured
// (ratios are relative to it) and always reported first.
RunReport run_benchmark(const BenchConfig& cfg);

// CSV with one row per variant: absolute metrics and ratios vs baseline,
// printed with %.12g so ratios recompute from the absolute columns.
std::string report_csv(const RunReport& report);

// Writes report.csv plus heatmap_{primary,gi}_<mode>.ppm under cfg.outDir.
// Heatmaps are P6, linear blue-to-red over [0, p99] with the scale shared
// across variants of the same ray kind.
void write_report_files(const RunReport& report);

struct SweepCell {
    int axes = 0;
    int m = 0;
    int dictionarySize = 0;
    double sahBrute = 0.0;
    double sahBaseline = 0.0;
};

// Brute-converted SAH for every (axes, m) grid cell over one shared tree.
std::vector<SweepCell> sweep_rotation_sets(const Scene& scene, std::span<const int> axisCounts,
                                           std::span<const int> mValues, int width = 8,
                                           double alpha = 1.0);

std::string sweep_csv(std::span<const SweepCell> cells);

}  // namespace dobb
