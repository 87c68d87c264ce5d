#include <immintrin.h>

#include "twpa/kernels.hpp"

namespace twpa::kernels::avx2 {

namespace {

// acc_r += a * re(b), acc_i += swap(a) * im(b); the product is addsub(acc_r, acc_i).
inline void cmac(__m256d a, __m256d br, __m256d bi, __m256d& acc_r, __m256d& acc_i) {
    acc_r = _mm256_fmadd_pd(a, br, acc_r);
    acc_i = _mm256_fmadd_pd(_mm256_permute_pd(a, 0x5), bi, acc_i);
}

// y = x + s * z over `count` doubles
inline void axpy(std::ptrdiff_t count, const double* x, double s, const double* z, double* y) {
    const __m256d vs = _mm256_set1_pd(s);
    std::ptrdiff_t i = 0;
    for (; i + 4 <= count; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(z + i), _mm256_loadu_pd(x + i)));
    for (; i < count; ++i) y[i] = x[i] + s * z[i];
}

}  // namespace

void matmul(int n, const cplx* a, const cplx* b, cplx* c) {
    const double* ad = reinterpret_cast<const double*>(a);
    const std::ptrdiff_t ld = 2 * static_cast<std::ptrdiff_t>(n);
    for (int j = 0; j < n; ++j) {
        const cplx* bj = b + static_cast<std::ptrdiff_t>(j) * n;
        double* cj = reinterpret_cast<double*>(c + static_cast<std::ptrdiff_t>(j) * n);
        int i = 0;
        for (; i + 4 <= n; i += 4) {
            __m256d r0 = _mm256_setzero_pd(), i0 = _mm256_setzero_pd();
            __m256d r1 = _mm256_setzero_pd(), i1 = _mm256_setzero_pd();
            for (int k = 0; k < n; ++k) {
                const __m256d br = _mm256_set1_pd(bj[k].real());
                const __m256d bi = _mm256_set1_pd(bj[k].imag());
                const double* ak = ad + k * ld + 2 * i;
                cmac(_mm256_loadu_pd(ak), br, bi, r0, i0);
                cmac(_mm256_loadu_pd(ak + 4), br, bi, r1, i1);
            }
            _mm256_storeu_pd(cj + 2 * i, _mm256_addsub_pd(r0, i0));
            _mm256_storeu_pd(cj + 2 * i + 4, _mm256_addsub_pd(r1, i1));
        }
        for (; i + 2 <= n; i += 2) {
            __m256d r0 = _mm256_setzero_pd(), i0 = _mm256_setzero_pd();
            for (int k = 0; k < n; ++k) {
                const __m256d br = _mm256_set1_pd(bj[k].real());
                const __m256d bi = _mm256_set1_pd(bj[k].imag());
                cmac(_mm256_loadu_pd(ad + k * ld + 2 * i), br, bi, r0, i0);
            }
            _mm256_storeu_pd(cj + 2 * i, _mm256_addsub_pd(r0, i0));
        }
        for (; i < n; ++i) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) s += a[i + static_cast<std::ptrdiff_t>(k) * n] * bj[k];
            cj[2 * i] = s.real();
            cj[2 * i + 1] = s.imag();
        }
    }
}

void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work) {
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n) * n;
    const std::ptrdiff_t cnt = 2 * nn;
    cplx* k = work;
    cplx* t = work + nn;
    cplx* acc = work + 2 * nn;
    double* kd = reinterpret_cast<double*>(k);
    double* td = reinterpret_cast<double*>(t);
    double* ad = reinterpret_cast<double*>(acc);
    double* yd = reinterpret_cast<double*>(y);

    matmul(n, g1, y, k);
    for (std::ptrdiff_t i = 0; i < cnt; ++i) ad[i] = kd[i];
    axpy(cnt, yd, 0.5 * h, kd, td);
    matmul(n, g2, t, k);
    axpy(cnt, ad, 2.0, kd, ad);
    axpy(cnt, yd, 0.5 * h, kd, td);
    matmul(n, g2, t, k);
    axpy(cnt, ad, 2.0, kd, ad);
    axpy(cnt, yd, h, kd, td);
    matmul(n, g3, t, k);
    axpy(cnt, ad, 1.0, kd, ad);
    axpy(cnt, yd, h / 6.0, ad, yd);
}

}  // namespace twpa::kernels::avx2
