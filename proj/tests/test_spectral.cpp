#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bmera/channels.hpp"
#include "bmera/spectral.hpp"
#include "support.hpp"

using namespace bmera;
using namespace testsupport;
namespace sp = bmera::spectral;

namespace {

MeraTensors seeded(std::uint64_t seed, std::int64_t d = 2, std::int64_t m = 2) {
    MeraConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.seed = seed;
    return random_isometric(cfg);
}

// rho -> (1-p) rho + p I/D tr(rho)
Superoperator depolarizing(std::int64_t dim, double p) {
    Tensor mat({dim * dim, dim * dim});
    for (std::int64_t a = 0; a < dim; ++a)
        for (std::int64_t b = 0; b < dim; ++b) {
            mat[(a * dim + b) * dim * dim + a * dim + b] += 1.0 - p;
            for (std::int64_t i = 0; i < dim; ++i)
                if (a == b) mat[(a * dim + a) * dim * dim + i * dim + i] += p / dim;
        }
    return {"D", {dim}, {dim}, std::move(mat)};
}

Superoperator pauli_mix(double p0, double p1, double p2, double p3) {
    const Tensor k[4] = {pauli('I'), pauli('X'), pauli('Y'), pauli('Z')};
    const double p[4] = {p0, p1, p2, p3};
    Tensor mat({4, 4});
    for (int q = 0; q < 4; ++q)
        for (std::int64_t a = 0; a < 2; ++a)
            for (std::int64_t b = 0; b < 2; ++b)
                for (std::int64_t i = 0; i < 2; ++i)
                    for (std::int64_t j = 0; j < 2; ++j)
                        mat[(a * 2 + b) * 4 + i * 2 + j] +=
                            p[q] * k[q].at({a, i}) * std::conj(k[q].at({b, j}));
    return {"D", {2}, {2}, std::move(mat)};
}

} // namespace

TEST_CASE("completely depolarizing channel fixes the maximally mixed state") {
    const Superoperator s = depolarizing(4, 1.0);
    for (auto method : {sp::FixedPointMethod::Eig, sp::FixedPointMethod::Power}) {
        const DensityMatrix rho = sp::fixed_point(s, method);
        const DensityMatrix mixed = maximally_mixed({4});
        CHECK(trace_distance(rho, mixed) <= 1e-12);
    }
}

TEST_CASE("both fixed-point methods agree on a boundary-stable map") {
    const MeraTensors t = seeded(7);
    const Superoperator bl = build_boundary_stable(t, Side::Left);
    const DensityMatrix a = sp::fixed_point(bl, sp::FixedPointMethod::Eig);
    const DensityMatrix b = sp::fixed_point(bl, sp::FixedPointMethod::Power, 1e-13);
    CHECK(trace_distance(a, b) <= 1e-10);
    CHECK(std::abs(dm_trace(a) - cplx{1, 0}) <= 1e-12);
    CHECK(min_eigenvalue(a) >= -1e-10);
}

TEST_CASE("the identity channel is rejected as non-mixing") {
    Superoperator id{"D", {2}, {2}, Tensor::identity(4)};
    CHECK_THROWS_AS((void)sp::fixed_point(id, sp::FixedPointMethod::Eig), Error);
    CHECK_THROWS_AS((void)sp::fixed_point(id, sp::FixedPointMethod::Power), Error);
    try {
        (void)sp::fixed_point(id, sp::FixedPointMethod::Eig);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotMixing);
    }
}

TEST_CASE("depolarizing qubit spectrum is {1, 1-p x3}") {
    const double p = 0.37;
    const auto rep = sp::spectrum(depolarizing(2, p));
    REQUIRE(rep.eigenvalues.size() == 4);
    CHECK(std::abs(rep.eigenvalues[0] - cplx{1, 0}) <= 1e-12);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(rep.eigenvalues[i] - cplx{1 - p, 0}) <= 1e-12);
    CHECK(rep.mixing);
    CHECK(rep.gap == doctest::Approx(p).epsilon(1e-10));
    REQUIRE(rep.fixed_point.has_value());
    CHECK(rep.exponents[0] == std::nullopt);
    CHECK(*rep.exponents[1] == doctest::Approx(-std::log2(1 - p)).epsilon(1e-10));
}

TEST_CASE("diagonal-Kraus qubit channel matches hand Pauli transfer values") {
    const double p0 = 0.5, p1 = 0.2, p2 = 0.2, p3 = 0.1;
    const Superoperator s = pauli_mix(p0, p1, p2, p3);
    // hand-computed Pauli transfer eigenvalues
    const double lx = p0 + p1 - p2 - p3;
    const double ly = p0 - p1 + p2 - p3;
    const double lz = p0 - p1 - p2 + p3;
    std::vector<cplx> expect = {cplx{1, 0}, cplx{lx, 0}, cplx{ly, 0}, cplx{lz, 0}};
    const auto got = bmera::linalg::eig_values(s.mat);
    CHECK(multiset_distance(got, expect) <= 1e-12);
    // independent oracle: transfer coefficients via explicit conjugation
    const Tensor sx = pauli('X');
    const Tensor out = apply_matrix(s, sx);
    cplx coef{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) coef += sx.at({i, j}) * out.at({j, i});
    CHECK(std::abs(coef * 0.5 - cplx{lx, 0}) <= 1e-12);
}

TEST_CASE("seeded descend spectrum sits inside the closed unit disc") {
    const MeraTensors t = seeded(42);
    const Superoperator d = average_descend(build_descend(t, Side::Left),
                                            build_descend(t, Side::Right));
    const auto rep = sp::spectrum(d);
    CHECK(std::abs(std::abs(rep.eigenvalues[0]) - 1.0) <= 1e-10);
    for (size_t i = 1; i < rep.eigenvalues.size(); ++i)
        CHECK(std::abs(rep.eigenvalues[i]) < 1.0);
    CHECK(rep.mixing);
}

TEST_CASE("spectrum is stable under the Choi round-trip") {
    const MeraTensors t = seeded(17);
    const Superoperator bl = build_boundary_stable(t, Side::Left);
    const Tensor c = choi(bl);
    // rebuild the map from its Choi matrix by inverting the index shuffle
    const std::int64_t di = bl.din(), dout = bl.dout();
    Tensor mat({dout * dout, di * di});
    for (std::int64_t a = 0; a < dout; ++a)
        for (std::int64_t b = 0; b < dout; ++b)
            for (std::int64_t r = 0; r < di; ++r)
                for (std::int64_t cc = 0; cc < di; ++cc)
                    mat[(a * dout + b) * di * di + r * di + cc] =
                        c[(r * dout + a) * di * dout + cc * dout + b];
    const auto s1 = bmera::linalg::eig_values(bl.mat);
    const auto s2 = bmera::linalg::eig_values(mat);
    CHECK(multiset_distance(s1, s2) <= 1e-8);
}

TEST_CASE("powers of a mixing channel converge monotonically to the fixed point") {
    const MeraTensors t = seeded(19);
    const Superoperator bl = build_boundary_stable(t, Side::Left);
    const auto rep = sp::spectrum(bl);
    REQUIRE(rep.mixing);
    const DensityMatrix fp = sp::fixed_point(bl);
    const double k2 = std::abs(rep.eigenvalues[1]);
    const int kmax = std::min(2000, static_cast<int>(std::ceil(200.0 / -std::log(k2))) );
    DensityMatrix rho = random_density(77, bl.in_dims);
    double prev = trace_distance(rho, fp);
    for (int k = 0; k < kmax; ++k) {
        rho = apply(bl, rho);
        const double d = trace_distance(rho, fp);
        CHECK(d <= prev + 1e-12); // CPT maps are trace-distance contractions
        prev = d;
    }
    CHECK(prev <= 1e-8);
}

TEST_CASE("scaling operators of the depolarizing channel span the Paulis") {
    const double p = 0.25;
    const Superoperator s = depolarizing(2, p);
    const auto ops = sp::scaling_operators(s, 3);
    REQUIRE(ops.size() == 3);
    for (const auto& so : ops) {
        CHECK(std::abs(so.eigenvalue - cplx{1 - p, 0}) <= 1e-10);
        CHECK(so.exponent == doctest::Approx(-std::log2(1 - p)).epsilon(1e-9));
        CHECK(so.degenerate);
        // traceless: lies in the Pauli span
        CHECK(std::abs(mat_trace(so.op)) <= 1e-10);
        CHECK(std::abs(so.op.frobenius_norm() - 1.0) <= 1e-10);
    }
}

TEST_CASE("scaling operators satisfy the adjoint eigenrelation and pairing") {
    const MeraTensors t = seeded(42);
    const Superoperator d = average_descend(build_descend(t, Side::Left),
                                            build_descend(t, Side::Right));
    const DensityMatrix fp = sp::fixed_point(d);
    const auto ops = sp::scaling_operators(d, 10);
    REQUIRE(!ops.empty());
    for (const auto& so : ops) {
        Tensor resid = adjoint_apply(d, so.op);
        resid -= so.eigenvalue * so.op;
        CHECK(resid.frobenius_norm() <= 1e-8);
        CHECK(std::abs(expectation(so.op, fp)) <= 1e-8);
    }
}

TEST_CASE("a defective map is flagged through the eigenbasis condition") {
    Tensor m({4, 4});
    m.at({0, 0}) = 0.5;
    m.at({0, 1}) = 1.0;
    m.at({1, 1}) = 0.5;
    m.at({2, 2}) = 0.1;
    m.at({3, 3}) = 0.05;
    Superoperator s{"test", {2}, {2}, m};
    const auto rep = sp::spectrum(s);
    CHECK(rep.defective);
}

TEST_CASE("report serialization carries one line per eigenvalue") {
    const auto rep = sp::spectrum(depolarizing(2, 0.5));
    std::stringstream ss;
    sp::write_report(rep, ss);
    int lines = 0;
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++lines;
    CHECK(lines == 4);
}
