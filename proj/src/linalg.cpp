#include "bmera/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "bmera/kernels.hpp"
#include "bmera/rng.hpp"

// LAPACK (LP64). Row-major tensors are bridged to column-major storage
// explicitly at each call site; see the per-wrapper notes.
extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, bmera::cplx* a, const int* lda,
            bmera::cplx* w, bmera::cplx* vl, const int* ldvl, bmera::cplx* vr, const int* ldvr,
            bmera::cplx* work, const int* lwork, double* rwork, int* info);
void zheev_(const char* jobz, const char* uplo, const int* n, bmera::cplx* a, const int* lda,
            double* w, bmera::cplx* work, const int* lwork, double* rwork, int* info);
void zgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, bmera::cplx* a,
             const int* lda, double* s, bmera::cplx* u, const int* ldu, bmera::cplx* vt,
             const int* ldvt, bmera::cplx* work, const int* lwork, double* rwork, int* info);
void zgeqrf_(const int* m, const int* n, bmera::cplx* a, const int* lda, bmera::cplx* tau,
             bmera::cplx* work, const int* lwork, int* info);
void zungqr_(const int* m, const int* n, const int* k, bmera::cplx* a, const int* lda,
             const bmera::cplx* tau, bmera::cplx* work, const int* lwork, int* info);
void zgesv_(const int* n, const int* nrhs, bmera::cplx* a, const int* lda, int* ipiv,
            bmera::cplx* b, const int* ldb, int* info);
void dsyev_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w,
            double* work, const int* lwork, int* info);
}

namespace bmera::linalg {

namespace {

void require_matrix(const Tensor& m) {
    if (m.rank() != 2) fail(Errc::DimensionMismatch, "matrix (rank-2 tensor) required");
}

void require_square(const Tensor& m) {
    require_matrix(m);
    if (m.dim(0) != m.dim(1)) fail(Errc::DimensionMismatch, "square matrix required");
}

struct SvdRaw {
    Tensor u;  // mrows x r
    Tensor vh; // r x ncols
    std::vector<double> s;
};

// Economy SVD. The row-major buffer of M is the column-major image of M^T,
// so LAPACK factors A = M^T and the outputs transpose back without copies:
// M = (U_A S VT_A)^T gives U_M = VT_A^T and Vh_M = U_A^T.
SvdRaw svd_raw(const Tensor& m) {
    require_matrix(m);
    const int mrows = static_cast<int>(m.dim(0));
    const int ncols = static_cast<int>(m.dim(1));
    const int ma = ncols, na = mrows;
    const int r = std::min(mrows, ncols);
    std::vector<cplx> a(m.data(), m.data() + m.size());
    std::vector<double> s(r);
    std::vector<cplx> u_a(static_cast<size_t>(ma) * r), vt_a(static_cast<size_t>(r) * na);
    std::vector<double> rwork(5 * static_cast<size_t>(std::max(ma, na)));
    int info = 0, lwork = -1;
    cplx wq;
    zgesvd_("S", "S", &ma, &na, a.data(), &ma, s.data(), u_a.data(), &ma, vt_a.data(), &r, &wq,
            &lwork, rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(lwork);
    zgesvd_("S", "S", &ma, &na, a.data(), &ma, s.data(), u_a.data(), &ma, vt_a.data(), &r,
            work.data(), &lwork, rwork.data(), &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zgesvd failed, info=" + std::to_string(info));
    SvdRaw out;
    out.u = Tensor({mrows, r}, std::move(vt_a));
    out.vh = Tensor({r, ncols}, std::move(u_a));
    out.s = std::move(s);
    return out;
}

Tensor diag_matrix(const std::vector<double>& s) {
    const auto r = static_cast<std::int64_t>(s.size());
    Tensor d({r, r});
    for (std::int64_t i = 0; i < r; ++i) d[i * r + i] = s[i];
    return d;
}

} // namespace

Factors factorize(const Tensor& t, int row_rank, Factorization kind) {
    if (row_rank < 0 || row_rank > t.rank())
        fail(Errc::AxisOutOfRange, "factorize: invalid axis bipartition");
    std::int64_t rows = 1, cols = 1;
    for (int i = 0; i < t.rank(); ++i) (i < row_rank ? rows : cols) *= t.dim(i);
    const Tensor m = t.reshaped({rows, cols});

    switch (kind) {
    case Factorization::Svd: {
        SvdRaw s = svd_raw(m);
        return {std::move(s.u), std::move(s.vh), std::move(s.s)};
    }
    case Factorization::Polar: {
        SvdRaw s = svd_raw(m);
        const Tensor up = matmul(s.u, s.vh);
        if (rows >= cols) {
            // M = up * p with p = V S V^H
            Tensor p = matmul(matmul(dagger(s.vh), diag_matrix(s.s)), s.vh);
            return {up, std::move(p), std::move(s.s)};
        }
        // M = p * up with p = U S U^H
        Tensor p = matmul(matmul(s.u, diag_matrix(s.s)), dagger(s.u));
        return {std::move(p), up, std::move(s.s)};
    }
    case Factorization::Qr: {
        const int mr = static_cast<int>(rows), nc = static_cast<int>(cols);
        const int k = std::min(mr, nc);
        // Column-major buffer of M is built by explicit transpose.
        Tensor mt = permute(m, {1, 0});
        std::vector<cplx> a(mt.data(), mt.data() + mt.size());
        std::vector<cplx> tau(k);
        int info = 0, lwork = -1;
        cplx wq;
        zgeqrf_(&mr, &nc, a.data(), &mr, tau.data(), &wq, &lwork, &info);
        lwork = static_cast<int>(wq.real());
        std::vector<cplx> work(lwork);
        zgeqrf_(&mr, &nc, a.data(), &mr, tau.data(), work.data(), &lwork, &info);
        if (info != 0) fail(Errc::ConvergenceFailure, "zgeqrf failed");
        // R: k x cols from the upper triangle (column-major a).
        Tensor rfac({k, cols});
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < std::min(j + 1, k); ++i)
                rfac[static_cast<std::int64_t>(i) * cols + j] = a[static_cast<size_t>(j) * mr + i];
        lwork = -1;
        zungqr_(&mr, &k, &k, a.data(), &mr, tau.data(), &wq, &lwork, &info);
        lwork = static_cast<int>(wq.real());
        work.resize(lwork);
        zungqr_(&mr, &k, &k, a.data(), &mr, tau.data(), work.data(), &lwork, &info);
        if (info != 0) fail(Errc::ConvergenceFailure, "zungqr failed");
        // a is Q column-major (rows x k); row-major read with swapped dims is Q^T.
        Tensor q = permute(Tensor({k, rows}, std::move(a)), {1, 0});
        return {std::move(q), std::move(rfac), {}};
    }
    }
    fail(Errc::Generic, "unreachable");
}

Tensor svd_reconstruct(const Factors& f) {
    return matmul(matmul(f.a, diag_matrix(f.singular_values)), f.b);
}

Tensor polar_unitary(const Tensor& m) {
    require_matrix(m);
    SvdRaw s = svd_raw(m);
    return matmul(s.u, s.vh);
}

Tensor orthonormal_rows(const Tensor& g) {
    require_matrix(g);
    const std::int64_t d = g.dim(0), n = g.dim(1);
    if (d > n) fail(Errc::DimensionMismatch, "orthonormal_rows: more rows than columns");
    // QR of G^H: the column-major buffer of G^H equals conj(row-major G).
    const int mr = static_cast<int>(n), nc = static_cast<int>(d);
    std::vector<cplx> a(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i) a[i] = std::conj(g[i]);
    std::vector<cplx> tau(nc);
    int info = 0, lwork = -1;
    cplx wq;
    zgeqrf_(&mr, &nc, a.data(), &mr, tau.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(lwork);
    zgeqrf_(&mr, &nc, a.data(), &mr, tau.data(), work.data(), &lwork, &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zgeqrf failed");
    lwork = -1;
    zungqr_(&mr, &nc, &nc, a.data(), &mr, tau.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq.real());
    work.resize(lwork);
    zungqr_(&mr, &nc, &nc, a.data(), &mr, tau.data(), work.data(), &lwork, &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zungqr failed");
    // Q^H row-major = conj of the column-major Q buffer, elementwise.
    std::vector<cplx> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
    return Tensor({d, n}, std::move(out));
}

namespace {

std::vector<int> sorted_order(const std::vector<cplx>& w) {
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
        const double mi = std::abs(w[i]), mj = std::abs(w[j]);
        if (mi != mj) return mi > mj;
        if (w[i].real() != w[j].real()) return w[i].real() > w[j].real();
        return w[i].imag() > w[j].imag();
    });
    return idx;
}

} // namespace

std::vector<cplx> eig_values(const Tensor& m) {
    require_square(m);
    const int n = static_cast<int>(m.dim(0));
    std::vector<cplx> a(m.data(), m.data() + m.size()); // column-major image of M^T; same spectrum
    std::vector<cplx> w(n);
    std::vector<double> rwork(2 * n);
    int info = 0, lwork = -1, one = 1;
    cplx wq;
    zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &one, nullptr, &one, &wq, &lwork,
           rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(lwork);
    zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &one, nullptr, &one, work.data(), &lwork,
           rwork.data(), &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zgeev failed, info=" + std::to_string(info));
    const auto order = sorted_order(w);
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = w[order[i]];
    return out;
}

Eig eig(const Tensor& m) {
    require_square(m);
    const int n = static_cast<int>(m.dim(0));
    Tensor mt = permute(m, {1, 0}); // column-major image of M
    std::vector<cplx> a(mt.data(), mt.data() + mt.size());
    std::vector<cplx> w(n), vr(static_cast<size_t>(n) * n);
    std::vector<double> rwork(2 * n);
    int info = 0, lwork = -1, one = 1;
    cplx wq;
    zgeev_("N", "V", &n, a.data(), &n, w.data(), nullptr, &one, vr.data(), &n, &wq, &lwork,
           rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(lwork);
    zgeev_("N", "V", &n, a.data(), &n, w.data(), nullptr, &one, vr.data(), &n, work.data(), &lwork,
           rwork.data(), &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zgeev failed, info=" + std::to_string(info));

    // vr column-major: row-major read with same n x n dims is VR^T (rows are
    // eigenvectors); sort rows, then transpose so columns are eigenvectors.
    const Tensor rows({n, n}, std::move(vr));
    const auto order = sorted_order(w);
    Eig out;
    out.values.resize(n);
    Tensor sorted_rows({n, n});
    for (int i = 0; i < n; ++i) {
        out.values[i] = w[order[i]];
        std::memcpy(sorted_rows.data() + static_cast<std::int64_t>(i) * n,
                    rows.data() + static_cast<std::int64_t>(order[i]) * n, sizeof(cplx) * n);
    }
    out.right = permute(sorted_rows, {1, 0});

    const double scale = m.frobenius_norm();
    const Tensor mv = matmul(m, out.right);
    for (int i = 0; i < n; ++i) {
        double resid = 0.0;
        for (int r = 0; r < n; ++r)
            resid += std::norm(mv[static_cast<std::int64_t>(r) * n + i] -
                               out.values[i] * out.right[static_cast<std::int64_t>(r) * n + i]);
        if (std::sqrt(resid) > 1e-10 * std::max(scale, 1e-300))
            fail(Errc::ConvergenceFailure, "eigenpair residual exceeds 1e-10 * ||M||");
    }
    out.vec_condition = condition_2norm(out.right);
    return out;
}

EigH eigh(const Tensor& m) {
    require_square(m);
    const int n = static_cast<int>(m.dim(0));
    // Row-major buffer of Hermitian M is the column-major image of conj(M);
    // zheev then returns eigenvectors of conj(M), and conj(V) recovers those
    // of M. The dagger of the row-major read performs exactly that.
    std::vector<cplx> a(m.data(), m.data() + m.size());
    std::vector<double> w(n);
    std::vector<double> rwork(std::max(1, 3 * n - 2));
    int info = 0, lwork = -1;
    cplx wq;
    zheev_("V", "L", &n, a.data(), &n, w.data(), &wq, &lwork, rwork.data(), &info);
    lwork = static_cast<int>(wq.real());
    std::vector<cplx> work(lwork);
    zheev_("V", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, rwork.data(), &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zheev failed, info=" + std::to_string(info));
    EigH out;
    out.values = std::move(w);
    out.vectors = dagger(Tensor({n, n}, std::move(a)));
    return out;
}

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
    std::vector<double> w(n);
    int info = 0, lwork = -1;
    double wq;
    dsyev_("N", "L", &n, a.data(), &n, w.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq);
    std::vector<double> work(lwork);
    dsyev_("N", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "dsyev failed");
    return w;
}

ExtremalEig hermitian_extremal(const Tensor& m, int max_iter, double tol) {
    require_square(m);
    const std::int64_t n = m.dim(0);
    if (n == 1) return {m[0].real(), m[0].real()};
    const int kmax = static_cast<int>(std::min<std::int64_t>(max_iter, n));
    const double scale = std::max(m.frobenius_norm(), 1e-300);

    Rng rng(0x5eedULL);
    std::vector<cplx> v(n), w(n), prev(n, cplx{});
    std::vector<std::vector<cplx>> basis;
    double nv = 0.0;
    for (auto& x : v) {
        x = rng.cgauss();
        nv += std::norm(x);
    }
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;

    std::vector<double> alpha, beta;
    ExtremalEig result{0.0, 0.0};
    double last_min = 1e300, last_max = -1e300;
    for (int k = 0; k < kmax; ++k) {
        basis.push_back(v);
        kernels::gemv(w.data(), m.data(), v.data(), n, n, default_exec());
        cplx adot{};
        for (std::int64_t i = 0; i < n; ++i) adot += std::conj(v[i]) * w[i];
        alpha.push_back(adot.real());
        const double b_prev = beta.empty() ? 0.0 : beta.back();
        for (std::int64_t i = 0; i < n; ++i) w[i] -= adot.real() * v[i] + b_prev * prev[i];
        // full reorthogonalization, two passes
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) {
                cplx proj{};
                for (std::int64_t i = 0; i < n; ++i) proj += std::conj(u[i]) * w[i];
                for (std::int64_t i = 0; i < n; ++i) w[i] -= proj * u[i];
            }
        }
        double nb = 0.0;
        for (const auto& x : w) nb += std::norm(x);
        nb = std::sqrt(nb);

        const int kk = static_cast<int>(alpha.size());
        std::vector<double> tri(static_cast<size_t>(kk) * kk, 0.0);
        for (int i = 0; i < kk; ++i) {
            tri[static_cast<size_t>(i) * kk + i] = alpha[i];
            if (i + 1 < kk) {
                tri[static_cast<size_t>(i) * kk + i + 1] = beta[i];
                tri[static_cast<size_t>(i + 1) * kk + i] = beta[i];
            }
        }
        const auto ritz = sym_eigenvalues(std::move(tri), kk);
        result = {ritz.front(), ritz.back()};
        if (nb < tol * scale) break; // invariant subspace reached
        if (kk >= 16 && kk % 8 == 0) {
            // convergence detected by stabilization of the extreme Ritz values
            if (std::abs(result.min - last_min) < tol * scale &&
                std::abs(result.max - last_max) < tol * scale)
                break;
            last_min = result.min;
            last_max = result.max;
        }
        beta.push_back(nb);
        prev = basis.back();
        for (std::int64_t i = 0; i < n; ++i) v[i] = w[i] / nb;
    }
    return result;
}

Tensor solve(const Tensor& a, const Tensor& b) {
    require_square(a);
    require_matrix(b);
    if (b.dim(0) != a.dim(0)) fail(Errc::DimensionMismatch, "solve: rhs rows mismatch");
    const int n = static_cast<int>(a.dim(0));
    const int nrhs = static_cast<int>(b.dim(1));
    Tensor at = permute(a, {1, 0});
    Tensor bt = permute(b, {1, 0});
    std::vector<cplx> abuf(at.data(), at.data() + at.size());
    std::vector<cplx> bbuf(bt.data(), bt.data() + bt.size());
    std::vector<int> ipiv(n);
    int info = 0;
    zgesv_(&n, &nrhs, abuf.data(), &n, ipiv.data(), bbuf.data(), &n, &info);
    if (info != 0) fail(Errc::ConvergenceFailure, "zgesv failed, info=" + std::to_string(info));
    return permute(Tensor({nrhs, n}, std::move(bbuf)), {1, 0});
}

double condition_2norm(const Tensor& m) {
    SvdRaw s = svd_raw(m);
    const double lo = s.s.back();
    if (lo <= 0.0) return 1e300;
    return s.s.front() / lo;
}

} // namespace bmera::linalg
