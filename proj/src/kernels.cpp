#include "twpa/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace twpa::kernels {

namespace scalar {

void matmul(int n, const cplx* a, const cplx* b, cplx* c) {
    for (int j = 0; j < n; ++j) {
        cplx* cj = c + static_cast<std::ptrdiff_t>(j) * n;
        for (int i = 0; i < n; ++i) cj[i] = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx bkj = b[k + static_cast<std::ptrdiff_t>(j) * n];
            const cplx* ak = a + static_cast<std::ptrdiff_t>(k) * n;
            for (int i = 0; i < n; ++i) cj[i] += ak[i] * bkj;
        }
    }
}

void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work) {
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n) * n;
    cplx* k = work;           // current stage slope
    cplx* t = work + nn;      // stage argument
    cplx* acc = work + 2 * nn;

    matmul(n, g1, y, k);
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        acc[i] = k[i];
        t[i] = y[i] + 0.5 * h * k[i];
    }
    matmul(n, g2, t, k);
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        acc[i] += 2.0 * k[i];
        t[i] = y[i] + 0.5 * h * k[i];
    }
    matmul(n, g2, t, k);
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        acc[i] += 2.0 * k[i];
        t[i] = y[i] + h * k[i];
    }
    matmul(n, g3, t, k);
    for (std::ptrdiff_t i = 0; i < nn; ++i) y[i] += (h / 6.0) * (acc[i] + k[i]);
}

}  // namespace scalar

namespace {

Isa detect() {
    if (const char* env = std::getenv("TWPA_ISA"); env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_supported()) throw std::runtime_error("AVX2 not supported on this CPU");
    current().store(isa, std::memory_order_relaxed);
}

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void matmul(int n, const cplx* a, const cplx* b, cplx* c) {
    if (active_isa() == Isa::avx2)
        avx2::matmul(n, a, b, c);
    else
        scalar::matmul(n, a, b, c);
}

void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work) {
    if (active_isa() == Isa::avx2)
        avx2::rk4_apply(n, g1, g2, g3, h, y, work);
    else
        scalar::rk4_apply(n, g1, g2, g3, h, y, work);
}

}  // namespace twpa::kernels
