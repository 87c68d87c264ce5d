#pragma once

#include <string>

#include "twpa/types.hpp"

// Dense complex kernels for the propagation loop. All matrices are n x n,
// column-major, contiguous. The AVX2 path is picked at runtime when the CPU
// supports AVX2+FMA; TWPA_ISA=scalar in the environment forces the reference.
namespace twpa::kernels {

enum class Isa { scalar, avx2 };

bool avx2_supported();
Isa active_isa();
void set_isa(Isa isa);  // throws if the ISA is not supported
std::string isa_name(Isa isa);

// c = a * b
void matmul(int n, const cplx* a, const cplx* b, cplx* c);

// One classical RK4 step of Y' = G(x) Y in place, with G1 = G(x), G2 = G(x + h/2),
// G3 = G(x + h). `work` must hold 3 n^2 entries.
void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work);

namespace scalar {
void matmul(int n, const cplx* a, const cplx* b, cplx* c);
void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work);
}  // namespace scalar

namespace avx2 {
void matmul(int n, const cplx* a, const cplx* b, cplx* c);
void rk4_apply(int n, const cplx* g1, const cplx* g2, const cplx* g3, double h, cplx* y, cplx* work);
}  // namespace avx2

}  // namespace twpa::kernels
