#include "dobb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "dobb/rng.hpp"

namespace dobb {

namespace {

double length(const Vec3d& v) { return std::sqrt(dot(v, v)); }

Vec3d normalize_checked(const Vec3d& v, const char* what) {
    const double len = length(v);
    if (!(len > 0.0)) throw std::invalid_argument(std::string(what) + " has zero length");
    return v * (1.0 / len);
}

// Branchless orthonormal basis about a unit vector (Duff et al. construction).
void basis_about(const Vec3d& n, Vec3d& t, Vec3d& b) {
    const double s = n.z >= 0.0 ? 1.0 : -1.0;
    const double a = -1.0 / (s + n.z);
    const double c = n.x * n.y * a;
    t = {1.0 + s * n.x * n.x * a, s * c, -s * n.x};
    b = {c, s + n.y * n.y * a, -n.y};
}

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::vector<Ray> gen_primary_rays(const CameraConfig& cam) {
    if (cam.width < 1 || cam.height < 1) throw std::invalid_argument("image size must be positive");
    if (!(cam.vfovDeg > 0.0f && cam.vfovDeg < 180.0f))
        throw std::invalid_argument("vertical fov must lie in (0, 180) degrees");

    const Vec3d eye = static_cast<Vec3d>(cam.eye);
    const Vec3d forward = normalize_checked(static_cast<Vec3d>(cam.lookAt) - eye, "view direction");
    Vec3d right = cross(forward, static_cast<Vec3d>(cam.up));
    right = normalize_checked(right, "camera right axis (up parallel to view?)");
    const Vec3d upv = cross(right, forward);

    const double halfH = std::tan(0.5 * cam.vfovDeg * std::numbers::pi / 180.0);
    const double halfW = halfH * static_cast<double>(cam.width) / static_cast<double>(cam.height);

    std::vector<Ray> rays;
    rays.reserve(static_cast<size_t>(cam.width) * cam.height);
    for (int j = 0; j < cam.height; ++j) {
        for (int i = 0; i < cam.width; ++i) {
            const double sx = (2.0 * (i + 0.5) / cam.width - 1.0) * halfW;
            const double sy = (1.0 - 2.0 * (j + 0.5) / cam.height) * halfH;
            const Vec3d dir = forward + right * sx + upv * sy;
            const Vec3d unit = dir * (1.0 / length(dir));
            Ray ray;
            ray.origin = cam.eye;
            ray.dir = static_cast<Vec3>(unit);
            rays.push_back(ray);
        }
    }
    return rays;
}

GiRays gen_gi_rays_from_hits(const Scene& scene, std::span<const Ray> primaryRays,
                             std::span<const HitRecord> primaryHits, uint64_t seed) {
    if (primaryRays.size() != primaryHits.size())
        throw std::invalid_argument("primary rays and hits must pair up");

    const Vec3d extent =
        static_cast<Vec3d>(scene.bounds.max) - static_cast<Vec3d>(scene.bounds.min);
    const double eps = 1e-4 * length(extent);

    GiRays out;
    for (size_t p = 0; p < primaryRays.size(); ++p) {
        const HitRecord& hit = primaryHits[p];
        if (hit.primId < 0) continue;  // miss: no bounce ray

        const Triangle tri = scene.triangle(hit.primId);
        const Vec3d v0 = static_cast<Vec3d>(tri.v0);
        Vec3d n = cross(static_cast<Vec3d>(tri.v1) - v0, static_cast<Vec3d>(tri.v2) - v0);
        const double nlen = length(n);
        if (!(nlen > 0.0)) continue;  // degenerate face
        n = n * (1.0 / nlen);

        const Vec3d rdir = static_cast<Vec3d>(primaryRays[p].dir);
        if (dot(n, rdir) > 0.0) n = n * -1.0;  // face the incoming ray

        Rng rng = Rng::derive(seed, static_cast<uint64_t>(p));
        // Clamp keeps the cosine strictly positive after float rounding.
        const double u1 = std::min(rng.next_double(), 1.0 - 1e-6);
        const double u2 = rng.next_double();
        const double r = std::sqrt(u1);
        const double phi = 2.0 * std::numbers::pi * u2;
        Vec3d t, b;
        basis_about(n, t, b);
        const Vec3d dir =
            t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * std::sqrt(1.0 - u1);

        const Vec3d pos = static_cast<Vec3d>(primaryRays[p].origin) +
                          rdir * static_cast<double>(hit.t) + n * eps;
        Ray ray;
        ray.origin = static_cast<Vec3>(pos);
        ray.dir = static_cast<Vec3>(dir);
        out.rays.push_back(ray);
        out.pixel.push_back(static_cast<int32_t>(p));
    }
    return out;
}

GiRays gen_gi_rays(const Scene& scene, const WideBvh& bvh, const CameraConfig& cam,
                   uint64_t seed) {
    const std::vector<Ray> primary = gen_primary_rays(cam);
    const BatchStats stats = batch_trace(bvh, primary);
    return gen_gi_rays_from_hits(scene, primary, stats.hits, seed);
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

    static const std::set<std::string> known{
        "scene",  "sceneSeed", "strands", "segments", "radius",     "thickness",
        "gridCount", "width", "searchRadius", "alpha", "maxLevelsFromLeaf", "axes",
        "m",      "modes",     "camera",  "autoCamera", "gi",       "giSeed",
        "threads", "outDir"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw std::runtime_error("unknown config key: " + key);
    }

    BenchConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("scene", cfg.scene);
    get("sceneSeed", cfg.sceneSeed);
    get("strands", cfg.strands);
    get("segments", cfg.segments);
    get("radius", cfg.radius);
    get("thickness", cfg.thickness);
    get("gridCount", cfg.gridCount);
    get("width", cfg.width);
    get("searchRadius", cfg.searchRadius);
    get("alpha", cfg.alpha);
    get("maxLevelsFromLeaf", cfg.maxLevelsFromLeaf);
    get("axes", cfg.axes);
    get("m", cfg.m);
    get("modes", cfg.modes);
    get("autoCamera", cfg.autoCamera);
    get("gi", cfg.gi);
    get("giSeed", cfg.giSeed);
    get("threads", cfg.threads);
    get("outDir", cfg.outDir);
    if (j.contains("camera")) {
        const auto& c = j.at("camera");
        static const std::set<std::string> knownCam{"eye", "lookAt", "up", "vfovDeg", "width",
                                                    "height"};
        for (const auto& [key, value] : c.items()) {
            (void)value;
            if (!knownCam.count(key)) throw std::runtime_error("unknown camera key: " + key);
        }
        auto vec = [&](const char* key, Vec3& field) {
            if (!c.contains(key)) return;
            const auto& a = c.at(key);
            if (!a.is_array() || a.size() != 3)
                throw std::runtime_error(std::string("camera.") + key + " must be [x, y, z]");
            field = {a[0].get<float>(), a[1].get<float>(), a[2].get<float>()};
        };
        vec("eye", cfg.camera.eye);
        vec("lookAt", cfg.camera.lookAt);
        vec("up", cfg.camera.up);
        if (c.contains("vfovDeg")) c.at("vfovDeg").get_to(cfg.camera.vfovDeg);
        if (c.contains("width")) c.at("width").get_to(cfg.camera.width);
        if (c.contains("height")) c.at("height").get_to(cfg.camera.height);
        cfg.autoCamera = j.value("autoCamera", false);
    }
    return cfg;
}

namespace {

struct PreparedScene {
    Scene scene;
    std::string label;
};

PreparedScene prepare_scene(const BenchConfig& cfg) {
    PreparedScene out;
    if (cfg.scene == "hairball") {
        out.scene = gen_hairball(cfg.sceneSeed, cfg.strands, cfg.segments, cfg.radius,
                                 cfg.thickness);
        out.label = "hairball";
    } else if (cfg.scene == "grid") {
        out.scene = gen_axis_aligned_grid(cfg.sceneSeed, cfg.gridCount);
        out.label = "grid";
    } else if (cfg.scene.size() > 4 && cfg.scene.substr(cfg.scene.size() - 4) == ".obj") {
        out.scene = load_obj(cfg.scene);
        out.label = std::filesystem::path(cfg.scene).stem().string();
    } else {
        throw std::invalid_argument("scene must be 'hairball', 'grid' or a .obj path, got '" +
                                    cfg.scene + "'");
    }
    return out;
}

CameraConfig frame_scene(const Scene& scene, const CameraConfig& base) {
    const Vec3d lo = static_cast<Vec3d>(scene.bounds.min);
    const Vec3d hi = static_cast<Vec3d>(scene.bounds.max);
    const Vec3d center = (lo + hi) * 0.5;
    const double radius = 0.5 * length(hi - lo);
    const Vec3d viewDir = normalize_checked({0.6, 0.35, 0.7}, "view direction");
    CameraConfig cam = base;
    cam.eye = static_cast<Vec3>(center + viewDir * (2.2 * std::max(radius, 1e-6)));
    cam.lookAt = static_cast<Vec3>(center);
    cam.up = {0, 1, 0};
    return cam;
}

ConversionConfig mode_config(const BenchConfig& cfg, ConvertMode mode) {
    ConversionConfig cc;
    cc.alpha = cfg.alpha;
    cc.maxLevelsFromLeaf = cfg.maxLevelsFromLeaf;
    cc.mode = mode;
    return cc;
}

}  // namespace

RunReport run_benchmark(const BenchConfig& cfg) {
    if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
    bool wantHeuristic = false, wantBrute = false;
    for (const std::string& m : cfg.modes) {
        if (m == "aabb") continue;  // baseline always runs
        if (m == "heuristic") wantHeuristic = true;
        else if (m == "brute") wantBrute = true;
        else if (m == "all") wantHeuristic = wantBrute = true;
        else throw std::invalid_argument("unknown mode '" + m + "'");
    }

    using Clock = std::chrono::steady_clock;
    auto millis = [](Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    RunReport report;
    report.cfg = cfg;

    PreparedScene prep = prepare_scene(cfg);
    report.sceneLabel = prep.label;
    report.triangleCount = prep.scene.triangle_count();

    const auto t0 = Clock::now();
    const WideBvh bvh = build_wide_bvh(prep.scene, cfg.width, BuildConfig{cfg.searchRadius});
    report.buildMillis = millis(t0, Clock::now());

    const RotationSet set = build_rotation_set(cfg.axes, cfg.m);
    report.dictionarySize = static_cast<int>(set.size());

    const CameraConfig cam = cfg.autoCamera ? frame_scene(prep.scene, cfg.camera) : cfg.camera;
    const std::vector<Ray> primary = gen_primary_rays(cam);

    // Baseline first; its hits also seed the bounce rays every variant shares.
    VariantReport base;
    base.mode = "aabb";
    base.primary = batch_trace(bvh, primary, nullptr, nullptr, cfg.threads);
    base.sahCost = sah_cost(bvh);

    GiRays giRays;
    if (cfg.gi) {
        giRays = gen_gi_rays_from_hits(prep.scene, primary, base.primary.hits, cfg.giSeed);
        base.gi = batch_trace(bvh, giRays.rays, nullptr, nullptr, cfg.threads);
    }
    report.giPixel = giRays.pixel;
    report.variants.push_back(std::move(base));

    auto runVariant = [&](const char* name, ConvertMode mode) {
        VariantReport v;
        v.mode = name;
        const auto c0 = Clock::now();
        const ConvertResult conv = convert(bvh, set, mode_config(cfg, mode));
        v.convertMillis = millis(c0, Clock::now());
        v.annotatedNodes = conv.annotation.annotatedCount;
        v.sahCost = sah_cost(bvh, conv.annotation);
        v.primary = batch_trace(bvh, primary, &conv.annotation, &set, cfg.threads);
        if (cfg.gi) v.gi = batch_trace(bvh, giRays.rays, &conv.annotation, &set, cfg.threads);
        report.variants.push_back(std::move(v));
    };
    if (wantHeuristic) runVariant("heuristic", ConvertMode::Heuristic);
    if (wantBrute) runVariant("brute", ConvertMode::BruteForce);
    return report;
}

std::string report_csv(const RunReport& report) {
    std::string csv =
        "scene,mode,triangles,treeWidth,dictionarySize,alpha,annotatedNodes,sahCost,"
        "primAvgIters,primMaxIters,primHits,giAvgIters,giMaxIters,giHits,"
        "sahRatio,primAvgRatio,primMaxRatio,giAvgRatio,giMaxRatio\n";
    if (report.variants.empty()) return csv;
    const VariantReport& base = report.variants.front();

    auto ratio = [](double num, double den) { return den != 0.0 ? num / den : 1.0; };
    for (const VariantReport& v : report.variants) {
        csv += report.sceneLabel;
        csv += ',' + v.mode;
        csv += ',' + std::to_string(report.triangleCount);
        csv += ',' + std::to_string(report.cfg.width);
        csv += ',' + std::to_string(report.dictionarySize);
        csv += ',' + format_g(report.cfg.alpha);
        csv += ',' + std::to_string(v.annotatedNodes);
        csv += ',' + format_g(v.sahCost);
        csv += ',' + format_g(v.primary.avgIterations);
        csv += ',' + std::to_string(v.primary.maxIterations);
        csv += ',' + std::to_string(v.primary.hitCount);
        csv += ',' + format_g(v.gi.avgIterations);
        csv += ',' + std::to_string(v.gi.maxIterations);
        csv += ',' + std::to_string(v.gi.hitCount);
        csv += ',' + format_g(ratio(v.sahCost, base.sahCost));
        csv += ',' + format_g(ratio(v.primary.avgIterations, base.primary.avgIterations));
        csv += ',' + format_g(ratio(static_cast<double>(v.primary.maxIterations),
                                    static_cast<double>(base.primary.maxIterations)));
        csv += ',' + format_g(ratio(v.gi.avgIterations, base.gi.avgIterations));
        csv += ',' + format_g(ratio(static_cast<double>(v.gi.maxIterations),
                                    static_cast<double>(base.gi.maxIterations)));
        csv += '\n';
    }
    return csv;
}

namespace {

int64_t percentile99(std::vector<int64_t> values) {
    if (values.empty()) return 1;
    std::sort(values.begin(), values.end());
    const size_t idx = static_cast<size_t>(0.99 * static_cast<double>(values.size() - 1));
    return std::max<int64_t>(values[idx], 1);
}

// Linear blue-to-red ramp, clamped.
void ramp(double t, uint8_t rgb[3]) {
    t = std::clamp(t, 0.0, 1.0);
    rgb[0] = static_cast<uint8_t>(std::lround(255.0 * t));
    rgb[1] = 0;
    rgb[2] = static_cast<uint8_t>(std::lround(255.0 * (1.0 - t)));
}

void write_ppm(const std::string& path, int width, int height,
               std::span<const int64_t> perPixel, int64_t scale) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P6\n" << width << ' ' << height << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(width) * 3);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            uint8_t rgb[3];
            ramp(static_cast<double>(perPixel[static_cast<size_t>(j) * width + i]) /
                     static_cast<double>(scale),
                 rgb);
            row[3 * i + 0] = rgb[0];
            row[3 * i + 1] = rgb[1];
            row[3 * i + 2] = rgb[2];
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

}  // namespace

void write_report_files(const RunReport& report) {
    const std::filesystem::path dir(report.cfg.outDir);
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "report.csv", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report.csv");
        out << report_csv(report);
    }

    const int w = report.cfg.camera.width, h = report.cfg.camera.height;
    const size_t pixels = static_cast<size_t>(w) * h;

    // Per-pixel iteration images; pixels without a bounce ray stay zero.
    std::vector<std::vector<int64_t>> primImg, giImg;
    for (const VariantReport& v : report.variants) {
        std::vector<int64_t> img(pixels, 0);
        for (size_t p = 0; p < v.primary.stats.size() && p < pixels; ++p)
            img[p] = v.primary.stats[p].iterations;
        primImg.push_back(std::move(img));
        img.assign(pixels, 0);
        for (size_t k = 0; k < v.gi.stats.size(); ++k)
            img[static_cast<size_t>(report.giPixel[k])] = v.gi.stats[k].iterations;
        giImg.push_back(std::move(img));
    }

    // One scale per ray kind, shared across variants.
    std::vector<int64_t> allPrim, allGi;
    for (const auto& img : primImg) allPrim.insert(allPrim.end(), img.begin(), img.end());
    for (const auto& img : giImg) allGi.insert(allGi.end(), img.begin(), img.end());
    const int64_t primScale = percentile99(std::move(allPrim));
    const int64_t giScale = percentile99(std::move(allGi));

    for (size_t i = 0; i < report.variants.size(); ++i) {
        const std::string& mode = report.variants[i].mode;
        write_ppm((dir / ("heatmap_primary_" + mode + ".ppm")).string(), w, h, primImg[i],
                  primScale);
        if (report.cfg.gi)
            write_ppm((dir / ("heatmap_gi_" + mode + ".ppm")).string(), w, h, giImg[i], giScale);
    }
}

std::vector<SweepCell> sweep_rotation_sets(const Scene& scene, std::span<const int> axisCounts,
                                           std::span<const int> mValues, int width,
                                           double alpha) {
    const WideBvh bvh = build_wide_bvh(scene, width);
    const double base = sah_cost(bvh);

    std::vector<SweepCell> cells;
    for (int axes : axisCounts) {
        for (int m : mValues) {
            const RotationSet set = build_rotation_set(axes, m);
            ConversionConfig cc;
            cc.alpha = alpha;
            cc.mode = ConvertMode::BruteForce;
            const ConvertResult conv = convert(bvh, set, cc);
            SweepCell cell;
            cell.axes = axes;
            cell.m = m;
            cell.dictionarySize = static_cast<int>(set.size());
            cell.sahBrute = sah_cost(bvh, conv.annotation);
            cell.sahBaseline = base;
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string sweep_csv(std::span<const SweepCell> cells) {
    std::string csv = "axes,m,dictionarySize,sahBrute,sahBaseline,sahRatio\n";
    for (const SweepCell& c : cells) {
        csv += std::to_string(c.axes);
        csv += ',' + std::to_string(c.m);
        csv += ',' + std::to_string(c.dictionarySize);
        csv += ',' + format_g(c.sahBrute);
        csv += ',' + format_g(c.sahBaseline);
        csv += ',' + format_g(c.sahBaseline != 0.0 ? c.sahBrute / c.sahBaseline : 1.0);
        csv += '\n';
    }
    return csv;
}

}  // namespace dobb
