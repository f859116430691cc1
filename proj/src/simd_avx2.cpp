// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "tfw/simd.hpp"

namespace tfw::simd {

namespace {

// two complex values per register: [re0 im0 re1 im1]
void axpy_real(cplx* y, const double* w, cplx a, std::size_t n) {
    double* yd = reinterpret_cast<double*>(y);
    const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d wv = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        yv = _mm256_fmadd_pd(wv, av, yv);
        _mm256_storeu_pd(yd + 2 * i, yv);
    }
    for (; i < n; ++i) y[i] += w[i] * a;
}

cplx dot_real(const cplx* x, const double* w, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w0 = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
        const __m256d w1 = _mm256_setr_pd(w[i + 2], w[i + 2], w[i + 3], w[i + 3]);
        acc0 = _mm256_fmadd_pd(w0, _mm256_loadu_pd(xd + 2 * i), acc0);
        acc1 = _mm256_fmadd_pd(w1, _mm256_loadu_pd(xd + 2 * i + 4), acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d w0 = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
        acc0 = _mm256_fmadd_pd(w0, _mm256_loadu_pd(xd + 2 * i), acc0);
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    double re = t[0] + t[2], im = t[1] + t[3];
    for (; i < n; ++i) {
        re += w[i] * x[i].real();
        im += w[i] * x[i].imag();
    }
    return {re, im};
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    double* od = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ad + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
        const __m256d are = _mm256_movedup_pd(av);        // ar ar
        const __m256d aim = _mm256_permute_pd(av, 0xF);   // ai ai
        const __m256d bsw = _mm256_permute_pd(bv, 0x5);   // bi br
        // [ar*br - ai*bi, ar*bi + ai*br]
        const __m256d r = _mm256_fmaddsub_pd(are, bv, _mm256_mul_pd(aim, bsw));
        _mm256_storeu_pd(od + 2 * i, r);
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
    static const Kernels k{"avx2", axpy_real, dot_real, cmul};
    return &k;
}

}  // namespace tfw::simd
