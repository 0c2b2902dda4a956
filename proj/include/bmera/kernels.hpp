#pragma once

#include <cstdint>
#include <span>

#include "bmera/common.hpp"

// Data-parallel inner kernels. Every kernel has a serial reference path and
// an OpenMP path selected by Exec; results agree up to floating-point
// summation order. The benchmark tool compares the two.

namespace bmera::kernels {

// C = A * B, row-major dense, C is m x n, A is m x k, B is k x n.
void gemm(cplx* c, const cplx* a, const cplx* b, std::int64_t m, std::int64_t n, std::int64_t k,
          Exec exec);

// y = A * x, A row-major m x n.
void gemv(cplx* y, const cplx* a, const cplx* x, std::int64_t m, std::int64_t n, Exec exec);

// Strided permutation copy: dst axis i enumerates src axis order[i].
void permute_copy(cplx* dst, const cplx* src, std::span<const std::int64_t> src_shape,
                  std::span<const int> order, Exec exec);

int thread_count();

} // namespace bmera::kernels
