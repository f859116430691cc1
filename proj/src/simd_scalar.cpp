#include "tfw/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace tfw::simd {

namespace {

void axpy_real(cplx* y, const double* w, cplx a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += w[i] * a;
}

cplx dot_real(const cplx* x, const double* w, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += w[i] * x[i].real();
        im += w[i] * x[i].imag();
    }
    return {re, im};
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", axpy_real, dot_real, cmul};
    return k;
}

const Kernels* avx2_kernels_impl();

const Kernels* avx2_kernels() {
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_kernels_impl();
    return nullptr;
}

const Kernels& active() {
    static const Kernels* chosen = [] {
        const char* env = std::getenv("TFW_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        const Kernels* k = avx2_kernels();
        return k ? k : &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace tfw::simd
