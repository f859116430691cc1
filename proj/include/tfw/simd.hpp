#pragma once
// Inner loops of the NUFFT and of diagonal modulations, with a scalar reference
// and an AVX2+FMA variant chosen at runtime.

#include <complex>
#include <cstddef>
#include <string>

namespace tfw::simd {

using cplx = std::complex<double>;

struct Kernels {
    const char* name;
    // y[i] += w[i] * a
    void (*axpy_real)(cplx* y, const double* w, cplx a, std::size_t n);
    // sum_i w[i] * x[i]
    cplx (*dot_real)(const cplx* x, const double* w, std::size_t n);
    // out[i] = a[i] * b[i]
    void (*cmul)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the CPU lacks AVX2/FMA
const Kernels* avx2_kernels();
// AVX2 when supported unless TFW_SIMD=scalar is set
const Kernels& active();

}  // namespace tfw::simd
