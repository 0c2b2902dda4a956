#include "bmera/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bmera {

namespace {
std::atomic<Exec> g_default_exec{Exec::Parallel};
}

Exec default_exec() { return g_default_exec.load(); }
void set_default_exec(Exec e) { g_default_exec.store(e); }

namespace kernels {

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

constexpr std::int64_t kRowBlock = 32;
constexpr std::int64_t kDepthBlock = 256;

// Row-saxpy form: streams rows of B, accumulates into rows of C.
inline void gemm_block(cplx* c, const cplx* a, const cplx* b, std::int64_t i0, std::int64_t i1,
                       std::int64_t n, std::int64_t k) {
    for (std::int64_t kk = 0; kk < k; kk += kDepthBlock) {
        const std::int64_t k1 = std::min(kk + kDepthBlock, k);
        for (std::int64_t i = i0; i < i1; ++i) {
            cplx* ci = c + i * n;
            const cplx* ai = a + i * k;
            for (std::int64_t p = kk; p < k1; ++p) {
                const cplx av = ai[p];
                if (av == cplx{}) continue;
                const cplx* bp = b + p * n;
                const double ar = av.real(), aim = av.imag();
                for (std::int64_t j = 0; j < n; ++j) {
                    const double br = bp[j].real(), bi = bp[j].imag();
                    ci[j] += cplx{ar * br - aim * bi, ar * bi + aim * br};
                }
            }
        }
    }
}

} // namespace

void gemm(cplx* c, const cplx* a, const cplx* b, std::int64_t m, std::int64_t n, std::int64_t k,
          Exec exec) {
    std::fill(c, c + m * n, cplx{});
    if (m == 0 || n == 0 || k == 0) return;
#ifdef _OPENMP
    if (exec == Exec::Parallel && m * n * k > (std::int64_t)1 << 14) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i0 = 0; i0 < m; i0 += kRowBlock)
            gemm_block(c, a, b, i0, std::min(i0 + kRowBlock, m), n, k);
        return;
    }
#else
    (void)exec;
#endif
    gemm_block(c, a, b, 0, m, n, k);
}

void gemv(cplx* y, const cplx* a, const cplx* x, std::int64_t m, std::int64_t n, Exec exec) {
#ifdef _OPENMP
    if (exec == Exec::Parallel && m * n > (std::int64_t)1 << 14) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < m; ++i) {
            cplx acc{};
            const cplx* ai = a + i * n;
            for (std::int64_t j = 0; j < n; ++j) acc += ai[j] * x[j];
            y[i] = acc;
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::int64_t i = 0; i < m; ++i) {
        cplx acc{};
        const cplx* ai = a + i * n;
        for (std::int64_t j = 0; j < n; ++j) acc += ai[j] * x[j];
        y[i] = acc;
    }
}

void permute_copy(cplx* dst, const cplx* src, std::span<const std::int64_t> src_shape,
                  std::span<const int> order, Exec exec) {
    const int r = static_cast<int>(src_shape.size());
    std::int64_t total = 1;
    std::vector<std::int64_t> sstride(r, 1);
    for (int i = r - 2; i >= 0; --i) sstride[i] = sstride[i + 1] * src_shape[i + 1];
    std::vector<std::int64_t> dshape(r), dstride_in_src(r);
    for (int i = 0; i < r; ++i) {
        dshape[i] = src_shape[order[i]];
        dstride_in_src[i] = sstride[order[i]];
        total *= dshape[i];
    }
    if (r == 0) {
        dst[0] = src[0];
        return;
    }
    // Innermost dst axis handled as a contiguous-ish inner loop.
    const std::int64_t inner = dshape[r - 1];
    const std::int64_t inner_sstride = dstride_in_src[r - 1];
    const std::int64_t outer = total / inner;

    auto run = [&](std::int64_t o0, std::int64_t o1) {
        std::vector<std::int64_t> idx(r - 1, 0);
        // position idx at o0
        std::int64_t rem = o0;
        for (int i = r - 2; i >= 0; --i) {
            idx[i] = rem % dshape[i];
            rem /= dshape[i];
        }
        std::int64_t src_base = 0;
        for (int i = 0; i < r - 1; ++i) src_base += idx[i] * dstride_in_src[i];
        for (std::int64_t o = o0; o < o1; ++o) {
            cplx* d = dst + o * inner;
            const cplx* s = src + src_base;
            if (inner_sstride == 1) {
                std::memcpy(d, s, sizeof(cplx) * inner);
            } else {
                for (std::int64_t j = 0; j < inner; ++j) d[j] = s[j * inner_sstride];
            }
            for (int i = r - 2; i >= 0; --i) {
                src_base += dstride_in_src[i];
                if (++idx[i] < dshape[i]) break;
                src_base -= dshape[i] * dstride_in_src[i];
                idx[i] = 0;
            }
        }
    };

#ifdef _OPENMP
    if (exec == Exec::Parallel && total > (std::int64_t)1 << 16 && outer > 1) {
        const int nt = thread_count();
        const std::int64_t chunk = (outer + nt - 1) / nt;
#pragma omp parallel for schedule(static, 1)
        for (int t = 0; t < nt; ++t) {
            const std::int64_t o0 = t * chunk;
            const std::int64_t o1 = std::min(o0 + chunk, outer);
            if (o0 < o1) run(o0, o1);
        }
        return;
    }
#else
    (void)exec;
#endif
    run(0, outer);
}

} // namespace kernels
} // namespace bmera
