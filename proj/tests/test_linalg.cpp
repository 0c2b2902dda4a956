#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bmera/linalg.hpp"
#include "support.hpp"

using namespace bmera;
using namespace testsupport;
namespace la = bmera::linalg;

TEST_CASE("svd of the 4x4 identity gives unit singular values") {
    const auto f = la::factorize(Tensor::identity(4), 1, la::Factorization::Svd);
    REQUIRE(f.singular_values.size() == 4);
    for (double s : f.singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd reconstructs a seeded 4x2 matrix") {
    const Tensor m = random_tensor(404, {4, 2});
    const auto f = la::factorize(m, 1, la::Factorization::Svd);
    CHECK(f.singular_values[0] >= f.singular_values[1]);
    CHECK(f.singular_values[1] >= 0.0);
    const Tensor rec = la::svd_reconstruct(f);
    CHECK(max_abs_diff(rec, m) < 1e-12 * m.frobenius_norm());
}

TEST_CASE("polar factor of a full-rank square matrix is unitary") {
    const Tensor m = random_tensor(405, {3, 3});
    const auto f = la::factorize(m, 1, la::Factorization::Polar);
    const Tensor u = f.a;
    Tensor g = matmul(dagger(u), u);
    g -= Tensor::identity(3);
    CHECK(g.max_abs() < 1e-12);
    CHECK(max_abs_diff(matmul(f.a, f.b), m) < 1e-12 * m.frobenius_norm());
}

TEST_CASE("qr factors reconstruct and q has orthonormal columns") {
    const Tensor m = random_tensor(406, {5, 3});
    const auto f = la::factorize(m, 1, la::Factorization::Qr);
    Tensor g = matmul(dagger(f.a), f.a);
    g -= Tensor::identity(3);
    CHECK(g.max_abs() < 1e-12);
    CHECK(max_abs_diff(matmul(f.a, f.b), m) < 1e-12 * m.frobenius_norm());
}

TEST_CASE("factorize reconstruction on a rank-3 tensor bipartition") {
    const Tensor t = random_tensor(407, {2, 3, 4});
    const auto f = la::factorize(t, 2, la::Factorization::Svd);
    const Tensor rec = la::svd_reconstruct(f);
    CHECK(max_abs_diff(rec, t.reshaped({6, 4})) < 1e-12 * t.frobenius_norm());
}

TEST_CASE("eig of a diagonal matrix is sorted descending") {
    Tensor d({3, 3});
    d.at({0, 0}) = 0.25;
    d.at({1, 1}) = 1.0;
    d.at({2, 2}) = 0.5;
    const auto e = la::eig(d);
    CHECK(e.values[0] == cplx{1.0, 0});
    CHECK(e.values[1] == cplx{0.5, 0});
    CHECK(e.values[2] == cplx{0.25, 0});
}

TEST_CASE("eig of a 90-degree rotation gives +-i on the unit circle") {
    Tensor r({2, 2});
    r.at({0, 1}) = -1.0;
    r.at({1, 0}) = 1.0;
    const auto e = la::eig(r);
    const double to_plus = std::min(std::abs(e.values[0] - cplx{0, 1}),
                                    std::abs(e.values[1] - cplx{0, 1}));
    const double to_minus = std::min(std::abs(e.values[0] - cplx{0, -1}),
                                     std::abs(e.values[1] - cplx{0, -1}));
    CHECK(to_plus < 1e-12);
    CHECK(to_minus < 1e-12);
    CHECK(std::abs(std::abs(e.values[0]) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(e.values[1]) - 1.0) < 1e-12);
}

TEST_CASE("eigenpair residuals of a seeded 8x8 matrix stay below 1e-10 |M|") {
    const Tensor m = random_tensor(408, {8, 8});
    const auto e = la::eig(m); // the residual contract is enforced inside eig()
    const double scale = m.frobenius_norm();
    const Tensor mv = matmul(m, e.right);
    for (int i = 0; i < 8; ++i) {
        double resid = 0;
        for (int r = 0; r < 8; ++r)
            resid += std::norm(mv[r * 8 + i] - e.values[i] * e.right[r * 8 + i]);
        CHECK(std::sqrt(resid) <= 1e-10 * scale);
    }
}

TEST_CASE("eig_values agrees with eig on the sorted spectrum") {
    const Tensor m = random_tensor(409, {12, 12});
    const auto v1 = la::eig_values(m);
    const auto v2 = la::eig(m).values;
    for (size_t i = 0; i < v1.size(); ++i) CHECK(std::abs(v1[i] - v2[i]) < 1e-10);
}

TEST_CASE("eigh diagonalizes a seeded Hermitian matrix") {
    const Tensor h = random_hermitian(410, 6);
    const auto e = la::eigh(h);
    for (int i = 1; i < 6; ++i) CHECK(e.values[i - 1] <= e.values[i]);
    // M v = w v columnwise
    const Tensor mv = matmul(h, e.vectors);
    for (int i = 0; i < 6; ++i)
        for (int r = 0; r < 6; ++r)
            CHECK(std::abs(mv[r * 6 + i] - e.values[i] * e.vectors[r * 6 + i]) < 1e-10);
}

TEST_CASE("orthonormal_rows produces exact row isometries") {
    const Tensor g = random_tensor(411, {3, 9});
    const Tensor r = la::orthonormal_rows(g);
    Tensor gram = contract(r, r.conjugate(), {{1, 1}});
    gram -= Tensor::identity(3);
    CHECK(gram.max_abs() < 1e-13);
}

TEST_CASE("hermitian_extremal matches eigh on a seeded matrix") {
    const Tensor h = random_hermitian(412, 40);
    const auto full = la::eigh(h);
    const auto ex = la::hermitian_extremal(h);
    CHECK(std::abs(ex.min - full.values.front()) < 1e-9 * h.frobenius_norm());
    CHECK(std::abs(ex.max - full.values.back()) < 1e-9 * h.frobenius_norm());
}

TEST_CASE("solve inverts a seeded system") {
    const Tensor a = random_tensor(413, {5, 5});
    const Tensor x = random_tensor(414, {5, 2});
    const Tensor b = matmul(a, x);
    const Tensor xs = la::solve(a, b);
    CHECK(max_abs_diff(xs, x) < 1e-10);
}
