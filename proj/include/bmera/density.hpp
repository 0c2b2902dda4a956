#pragma once

#include <string>
#include <vector>

#include "bmera/tensor.hpp"

namespace bmera {

// Positive unit-trace operator on an ordered list of sites. `mat` is D x D
// with D the product of site_dims; rows/columns are row-major composites of
// the per-site indices.
struct DensityMatrix {
    Tensor mat;
    std::vector<std::int64_t> site_dims;
    std::vector<std::string> site_names; // optional, same length as site_dims or empty

    std::int64_t dim() const {
        std::int64_t n = 1;
        for (auto d : site_dims) n *= d;
        return n;
    }
};

cplx dm_trace(const DensityMatrix& rho);
double hermiticity_defect(const DensityMatrix& rho);        // max |rho - rho^dag|
double min_eigenvalue(const DensityMatrix& rho);            // of the hermitized matrix
double trace_norm(const Tensor& herm);                      // sum |eigenvalues|
double trace_distance(const DensityMatrix& a, const DensityMatrix& b); // (1/2)||a-b||_1

DensityMatrix maximally_mixed(std::vector<std::int64_t> site_dims);

// Hermitize and normalize to unit trace (phase-rotating first so the trace
// is real positive).
DensityMatrix canonicalize(DensityMatrix rho);

// Expectation value Tr[theta * rho].
cplx expectation(const Tensor& theta, const DensityMatrix& rho);

// Tr[a * b] for square matrices of equal dimension.
cplx trace_product(const Tensor& a, const Tensor& b);

// Observable on three contiguous sites.
struct LocalOperator {
    Tensor mat; // d^3 x d^3
    bool hermitian = false;
};

LocalOperator identity_operator(std::int64_t d);

// Three-site interaction term of a local Hamiltonian.
struct Hamiltonian3 {
    Tensor h3; // d^3 x d^3, Hermitian
    int nu = 3;
};

// Embed a two-site term h as H3 = (h x I + I x h) / 2.
Hamiltonian3 embed_two_site(const Tensor& h2, std::int64_t d);

} // namespace bmera
