#pragma once

// Shared test scaffolding: seeded inputs, independent brute-force oracles
// (plain index loops, no library contraction paths), and purpose-built
// networks with known behavior.

#include <vector>

#include "bmera/density.hpp"
#include "bmera/linalg.hpp"
#include "bmera/network.hpp"
#include "bmera/rng.hpp"
#include "bmera/tensor.hpp"

namespace testsupport {

using bmera::cplx;
using bmera::Tensor;

inline Tensor random_tensor(std::uint64_t seed, std::vector<std::int64_t> shape) {
    bmera::Rng rng(seed);
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.cgauss();
    return t;
}

inline Tensor random_hermitian(std::uint64_t seed, std::int64_t n) {
    Tensor g = random_tensor(seed, {n, n});
    Tensor h = g + bmera::dagger(g);
    h *= 0.5;
    return h;
}

inline bmera::DensityMatrix random_density(std::uint64_t seed, std::vector<std::int64_t> dims) {
    std::int64_t n = 1;
    for (auto d : dims) n *= d;
    Tensor g = random_tensor(seed, {n, n});
    Tensor h = bmera::matmul(g, bmera::dagger(g));
    const cplx tr = bmera::mat_trace(h);
    h *= 1.0 / tr.real();
    return {std::move(h), std::move(dims), {}};
}

// Independent contraction oracle: explicit summation loops over multi-indices.
inline Tensor loop_contract(const Tensor& a, const Tensor& b,
                            const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> free_a, free_b;
    std::vector<char> ua(a.rank(), 0), ub(b.rank(), 0);
    for (auto [pa, pb] : pairs) ua[pa] = ub[pb] = 1;
    for (int i = 0; i < a.rank(); ++i)
        if (!ua[i]) free_a.push_back(i);
    for (int i = 0; i < b.rank(); ++i)
        if (!ub[i]) free_b.push_back(i);
    std::vector<std::int64_t> oshape;
    for (int i : free_a) oshape.push_back(a.dim(i));
    for (int i : free_b) oshape.push_back(b.dim(i));
    Tensor out(oshape.empty() ? std::vector<std::int64_t>{} : oshape);

    std::vector<std::int64_t> ia(a.rank(), 0), ib(b.rank(), 0), io(oshape.size(), 0),
        ip(pairs.size(), 0);
    const std::int64_t osize = out.size();
    std::int64_t psize = 1;
    for (auto [pa, pb] : pairs) psize *= a.dim(pa);
    for (std::int64_t o = 0; o < osize; ++o) {
        std::int64_t rem = o;
        for (int i = static_cast<int>(oshape.size()) - 1; i >= 0; --i) {
            io[i] = rem % oshape[i];
            rem /= oshape[i];
        }
        for (size_t i = 0; i < free_a.size(); ++i) ia[free_a[i]] = io[i];
        for (size_t i = 0; i < free_b.size(); ++i) ib[free_b[i]] = io[free_a.size() + i];
        cplx acc{};
        for (std::int64_t p = 0; p < psize; ++p) {
            std::int64_t prem = p;
            for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
                ip[i] = prem % a.dim(pairs[i].first);
                prem /= a.dim(pairs[i].first);
            }
            for (size_t i = 0; i < pairs.size(); ++i) {
                ia[pairs[i].first] = ip[i];
                ib[pairs[i].second] = ip[i];
            }
            acc += a.at(std::span<const std::int64_t>(ia)) * b.at(std::span<const std::int64_t>(ib));
        }
        out[o] = acc;
    }
    return out;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    Tensor d = a;
    d -= b;
    return d.max_abs();
}

// Distance between two complex multisets: greedy nearest matching after a
// deterministic sort. Robust against degenerate moduli, where lexicographic
// pairing breaks down.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
    if (a.size() != b.size()) return 1e300;
    auto key = [](const cplx& z) { return std::make_tuple(-std::abs(z), -z.real(), -z.imag()); };
    auto cmp = [&](const cplx& x, const cplx& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), cmp);
    std::sort(b.begin(), b.end(), cmp);
    std::vector<char> used(b.size(), 0);
    double worst = 0.0;
    for (const cplx& x : a) {
        double best = 1e300;
        size_t best_j = 0;
        // values are modulus-sorted, so the match is nearby
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = 1;
        worst = std::max(worst, best);
    }
    return worst;
}

inline Tensor pauli(char which) {
    Tensor p({2, 2});
    switch (which) {
    case 'I': p[0] = 1; p[3] = 1; break;
    case 'X': p[1] = 1; p[2] = 1; break;
    case 'Y': p[1] = cplx{0, -1}; p[2] = cplx{0, 1}; break;
    case 'Z': p[0] = 1; p[3] = -1; break;
    }
    return p;
}

inline Tensor pauli_string3(const char* s) {
    return bmera::kron(bmera::kron(pauli(s[0]), pauli(s[1])), pauli(s[2]));
}

// Purpose-built network with an exactly depolarizing left-boundary map:
// product renormalizer lambda^u_{l1,l2} = w_{l1} delta^u_{l2}, swap
// disentangler, m = 1. The (1,2) boundary block relaxes to its fixed point
// in a single step, which pins thermodynamic-limit identities at small n.
inline bmera::MeraTensors product_mera(std::uint64_t seed, bool swap_chi = true) {
    bmera::MeraConfig cfg;
    cfg.d = 2;
    cfg.m = 1;
    cfg.seed = seed;
    bmera::MeraTensors t;
    t.config = cfg;
    bmera::Rng rng(seed);
    // unit vector w
    cplx w0 = rng.cgauss(), w1 = rng.cgauss();
    const double nw = std::sqrt(std::norm(w0) + std::norm(w1));
    w0 /= nw;
    w1 /= nw;
    Tensor lambda({2, 2, 2});
    for (std::int64_t u = 0; u < 2; ++u)
        for (std::int64_t l1 = 0; l1 < 2; ++l1)
            for (std::int64_t l2 = 0; l2 < 2; ++l2)
                lambda.at({u, l1, l2}) = (l1 == 0 ? w0 : w1) * cplx{l2 == u ? 1.0 : 0.0, 0.0};
    t.lambda = lambda;
    Tensor chi({2, 2, 2, 2});
    for (std::int64_t u1 = 0; u1 < 2; ++u1)
        for (std::int64_t u2 = 0; u2 < 2; ++u2)
            for (std::int64_t l1 = 0; l1 < 2; ++l1)
                for (std::int64_t l2 = 0; l2 < 2; ++l2)
                    chi.at({u1, u2, l1, l2}) =
                        swap_chi ? cplx{(l1 == u2 && l2 == u1) ? 1.0 : 0.0, 0.0}
                                 : cplx{(l1 == u1 && l2 == u2) ? 1.0 : 0.0, 0.0};
    t.chi = chi;
    // generic boundary unitary (m*d = 2)
    t.alpha_l = bmera::linalg::orthonormal_rows(random_tensor(seed + 17, {2, 2}))
                    .reshaped({1, 2, 1, 2});
    t.alpha_r = t.alpha_l;
    Tensor hat = random_tensor(seed + 23, {1, 2, 2, 2, 2, 1});
    hat *= cplx{1.0 / hat.frobenius_norm(), 0.0};
    t.hat = hat;
    return t;
}

} // namespace testsupport
