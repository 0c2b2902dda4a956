#include "bmera/density.hpp"

#include <cmath>

#include "bmera/linalg.hpp"

namespace bmera {

cplx dm_trace(const DensityMatrix& rho) { return mat_trace(rho.mat); }

double hermiticity_defect(const DensityMatrix& rho) {
    return (rho.mat - dagger(rho.mat)).max_abs();
}

double min_eigenvalue(const DensityMatrix& rho) {
    Tensor h = rho.mat + dagger(rho.mat);
    h *= 0.5;
    const auto e = linalg::eigh(h);
    return e.values.front();
}

double trace_norm(const Tensor& herm) {
    Tensor h = herm + dagger(herm);
    h *= 0.5;
    const auto e = linalg::eigh(h);
    double s = 0.0;
    for (double v : e.values) s += std::abs(v);
    return s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return 0.5 * trace_norm(a.mat - b.mat);
}

DensityMatrix maximally_mixed(std::vector<std::int64_t> site_dims) {
    std::int64_t n = 1;
    for (auto d : site_dims) n *= d;
    Tensor m = Tensor::identity(n);
    m *= cplx{1.0 / static_cast<double>(n), 0.0};
    return {std::move(m), std::move(site_dims), {}};
}

DensityMatrix canonicalize(DensityMatrix rho) {
    cplx tr = mat_trace(rho.mat);
    if (std::abs(tr) > 1e-300) rho.mat *= std::conj(tr) / std::abs(tr);
    Tensor h = rho.mat + dagger(rho.mat);
    h *= 0.5;
    const cplx tr2 = mat_trace(h);
    if (std::abs(tr2) < 1e-300) fail(Errc::ConvergenceFailure, "density matrix has zero trace");
    h *= 1.0 / tr2.real();
    rho.mat = std::move(h);
    return rho;
}

cplx expectation(const Tensor& theta, const DensityMatrix& rho) {
    const std::int64_t n = rho.site_dims.empty() ? rho.mat.dim(0) : rho.dim();
    if (theta.rank() != 2 || theta.dim(0) != n || theta.dim(1) != n ||
        rho.mat.dim(0) != n)
        fail(Errc::DimensionMismatch, "expectation: operator dimension mismatch");
    return trace_product(theta, rho.mat);
}

cplx trace_product(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != a.dim(1) || b.dim(0) != b.dim(1) ||
        a.dim(0) != b.dim(0))
        fail(Errc::DimensionMismatch, "trace_product: square matrices of equal dim required");
    const std::int64_t n = a.dim(0);
    cplx v{};
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) v += a[i * n + j] * b[j * n + i];
    return v;
}

LocalOperator identity_operator(std::int64_t d) {
    return {Tensor::identity(d * d * d), true};
}

Hamiltonian3 embed_two_site(const Tensor& h2, std::int64_t d) {
    if (h2.rank() != 2 || h2.dim(0) != d * d || h2.dim(1) != d * d)
        fail(Errc::DimensionMismatch, "embed_two_site: h must be d^2 x d^2");
    const Tensor id = Tensor::identity(d);
    Tensor h3 = kron(h2, id) + kron(id, h2);
    h3 *= 0.5;
    return {std::move(h3), 3};
}

} // namespace bmera
