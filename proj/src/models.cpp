#include "bmera/models.hpp"

#include <cmath>
#include <vector>

#include "bmera/linalg.hpp"
#include "bmera/rng.hpp"

namespace bmera::models {

Tensor pauli(char which) {
    Tensor p({2, 2});
    switch (which) {
    case 'I': p[0] = 1; p[3] = 1; break;
    case 'X': p[1] = 1; p[2] = 1; break;
    case 'Y': p[1] = cplx{0, -1}; p[2] = cplx{0, 1}; break;
    case 'Z': p[0] = 1; p[3] = -1; break;
    default: fail(Errc::InvalidConfig, "unknown Pauli label");
    }
    return p;
}

Tensor ising_h2(double g, double j) {
    const Tensor x = pauli('X'), z = pauli('Z'), id = pauli('I');
    Tensor h = cplx{-j, 0} * kron(x, x);
    h += cplx{-0.5 * g, 0} * kron(z, id);
    h += cplx{-0.5 * g, 0} * kron(id, z);
    return h;
}

Hamiltonian3 ising_h3(double g, double j) { return embed_two_site(ising_h2(g, j), 2); }

double ising_open_ground_energy(int nsites, double g, double j) {
    // Jordan-Wigner: H = sum c^ A c + (1/2)(c^ B c^ + h.c.) - g N with
    // A_jj = 2g, A_{j,j+1} = -J, B_{j,j+1} = -J (antisymmetric), and
    // E0 = -g N + (1/2) Tr A - (1/2) sum_k s_k(A + B) = -(1/2) sum_k s_k.
    const int n = nsites;
    std::vector<double> ab(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) ab[static_cast<size_t>(i) * n + i] = 2.0 * g;
    for (int i = 0; i + 1 < n; ++i) {
        ab[static_cast<size_t>(i) * n + i + 1] += -j - j; // A + B upper
        // A lower: -j, B lower: +j -> cancels
    }
    // singular values via the symmetric eigenproblem of (A+B)(A+B)^T
    std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0;
            for (int k = 0; k < n; ++k)
                acc += ab[static_cast<size_t>(r) * n + k] * ab[static_cast<size_t>(c) * n + k];
            m[static_cast<size_t>(r) * n + c] = acc;
        }
    const auto ev = linalg::sym_eigenvalues(std::move(m), n);
    double e0 = 0;
    for (double v : ev) e0 -= 0.5 * std::sqrt(std::max(v, 0.0));
    return e0;
}

double ising_open_ground_energy_ed(int nsites, double g, double j) {
    if (nsites > 20) fail(Errc::BudgetExceeded, "ED limited to 20 sites");
    const std::int64_t dim = std::int64_t{1} << nsites;
    // diagonal (field) part: -g sum_j z_j with z = +1 for bit 0
    std::vector<double> diag(dim, 0.0);
    for (std::int64_t s = 0; s < dim; ++s) {
        int up = 0;
        for (int b = 0; b < nsites; ++b) up += (s >> b) & 1 ? -1 : 1;
        diag[s] = -g * up;
    }
    auto matvec = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
        for (std::int64_t s = 0; s < dim; ++s) y[s] = diag[s] * x[s];
        for (int b = 0; b + 1 < nsites; ++b) {
            const std::int64_t mask = (std::int64_t{1} << b) | (std::int64_t{1} << (b + 1));
            for (std::int64_t s = 0; s < dim; ++s) y[s ^ mask] += -j * x[s];
        }
    };
    // Lanczos with full reorthogonalization
    Rng rng(0x15ef);
    std::vector<cplx> v(dim), w(dim);
    double norm = 0;
    for (auto& c : v) {
        c = rng.cgauss();
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    for (auto& c : v) c /= norm;
    std::vector<std::vector<cplx>> basis;
    std::vector<double> alpha, beta;
    double last = 1e300;
    for (int it = 0; it < 200; ++it) {
        basis.push_back(v);
        matvec(v, w);
        cplx a{};
        for (std::int64_t i = 0; i < dim; ++i) a += std::conj(v[i]) * w[i];
        alpha.push_back(a.real());
        const double bp = beta.empty() ? 0.0 : beta.back();
        const auto& prev = basis.size() >= 2 ? basis[basis.size() - 2] : basis.back();
        for (std::int64_t i = 0; i < dim; ++i)
            w[i] -= a.real() * v[i] + (basis.size() >= 2 ? bp * prev[i] : cplx{});
        for (const auto& u : basis) {
            cplx proj{};
            for (std::int64_t i = 0; i < dim; ++i) proj += std::conj(u[i]) * w[i];
            for (std::int64_t i = 0; i < dim; ++i) w[i] -= proj * u[i];
        }
        double nb = 0;
        for (const auto& c : w) nb += std::norm(c);
        nb = std::sqrt(nb);
        const int k = static_cast<int>(alpha.size());
        std::vector<double> tri(static_cast<size_t>(k) * k, 0.0);
        for (int i = 0; i < k; ++i) {
            tri[static_cast<size_t>(i) * k + i] = alpha[i];
            if (i + 1 < k) {
                tri[static_cast<size_t>(i) * k + i + 1] = beta[i];
                tri[static_cast<size_t>(i + 1) * k + i] = beta[i];
            }
        }
        const double e0 = linalg::sym_eigenvalues(std::move(tri), k).front();
        if (std::abs(e0 - last) < 1e-12 * std::max(1.0, std::abs(e0)) || nb < 1e-13) return e0;
        last = e0;
        beta.push_back(nb);
        for (std::int64_t i = 0; i < dim; ++i) v[i] = w[i] / nb;
    }
    return last;
}

} // namespace bmera::models
