#include "dobb/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace dobb::kernels {

namespace {

bool detect_avx2() {
#if defined(DOBB_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend default_backend() { return detect_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend> g_backend{default_backend()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool backend_available(Backend b) {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2: return detect_avx2();
    }
    return false;
}

void set_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument("kernel backend not available on this host: " + backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

void ray_box_8(const RaySetup& ray, const WideBoxSoA& boxes, float tMax,
               float tEnter[kWideLanes]) {
#if defined(DOBB_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) {
        detail::ray_box_8_avx2(ray, boxes, tMax, tEnter);
        return;
    }
#endif
    detail::ray_box_8_scalar(ray, boxes, tMax, tEnter);
}

void project_minmax(const Vec3* points, int count, const double* axisX,
                    const double* axisY, const double* axisZ, int paddedAxes,
                    double* minProj, double* maxProj) {
#if defined(DOBB_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) {
        detail::project_minmax_avx2(points, count, axisX, axisY, axisZ, paddedAxes,
                                    minProj, maxProj);
        return;
    }
#endif
    detail::project_minmax_scalar(points, count, axisX, axisY, axisZ, paddedAxes,
                                  minProj, maxProj);
}

}  // namespace dobb::kernels
