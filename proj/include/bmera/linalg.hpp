#pragma once

#include <optional>
#include <vector>

#include "bmera/common.hpp"
#include "bmera/tensor.hpp"

// Dense factorizations and eigensolvers, backed by LAPACK. Matrices are
// rank-2 row-major tensors.

namespace bmera::linalg {

enum class Factorization { Svd, Polar, Qr };

// factorize(t, row_rank, kind) matricizes t with its first row_rank axes as
// rows and returns factors of the matricization:
//   Svd:   a = U, b = V^H, singular_values descending; M = U diag(s) V^H.
//   Polar: M = a * b with the isometric factor on the smaller side
//          (rows >= cols: a isometry, b Hermitian PSD; else a Hermitian PSD,
//          b co-isometry).
//   Qr:    a = Q (orthonormal columns), b = R upper triangular.
struct Factors {
    Tensor a, b;
    std::vector<double> singular_values;
};
Factors factorize(const Tensor& t, int row_rank, Factorization kind);

Tensor svd_reconstruct(const Factors& f);

// Unitary polar factor U V^H of a matrix (isometry on the smaller side).
Tensor polar_unitary(const Tensor& m);

// Orthonormalizes the rows of g (rows <= cols required): result r satisfies
// r r^H = I.
Tensor orthonormal_rows(const Tensor& g);

// General complex eigenproblem. Eigenvalues sorted by descending modulus,
// ties by descending real part, then descending imaginary part. Right
// eigenvectors are the columns of `right` (in the sorted order), each of
// unit 2-norm, and are verified to satisfy ||M v - w v|| <= 1e-10 ||M||_F.
struct Eig {
    std::vector<cplx> values;
    Tensor right;          // n x n, columns are eigenvectors
    double vec_condition;  // 2-norm condition estimate of the eigenvector matrix
};
Eig eig(const Tensor& m);
std::vector<cplx> eig_values(const Tensor& m); // values only, no residual contract

// Hermitian eigenproblem, values ascending, vectors as columns.
struct EigH {
    std::vector<double> values;
    Tensor vectors;
};
EigH eigh(const Tensor& m);

// Real symmetric eigenproblem (values ascending) for small real matrices
// passed as flattened row-major doubles.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

// Extremal eigenvalues of a dense Hermitian matrix via Lanczos with full
// reorthogonalization; cheap for large matrices when only the edge of the
// spectrum is needed.
struct ExtremalEig {
    double min;
    double max;
};
ExtremalEig hermitian_extremal(const Tensor& m, int max_iter = 300, double tol = 1e-12);

// Solve A X = B (general square A).
Tensor solve(const Tensor& a, const Tensor& b);

double condition_2norm(const Tensor& m);

} // namespace bmera::linalg
