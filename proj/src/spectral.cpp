#include "bmera/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "bmera/linalg.hpp"
#include "bmera/rng.hpp"

namespace bmera::spectral {

namespace {

constexpr double kMixingThreshold = 1e-9; // on 1 - |k_2|

void require_endomorphism(const Superoperator& s) {
    if (s.in_dims != s.out_dims)
        fail(Errc::DimensionMismatch, "endomorphism (equal in/out dims) required");
}

bool is_channel_label(const std::string& label) {
    return label == "DL" || label == "DR" || label == "D" || label == "DD" || label == "KL" ||
           label == "KR" || label == "BL" || label == "BR";
}

DensityMatrix fixed_point_from_vector(const Superoperator& s, const Tensor& col) {
    const std::int64_t dd = s.din();
    DensityMatrix rho{col.reshaped({dd, dd}), s.in_dims, {}};
    return canonicalize(std::move(rho));
}

} // namespace

SpectrumReport spectrum(const Superoperator& s) {
    require_endomorphism(s);
    SpectrumReport r;
    r.label = s.label;
    if (s.mat.dim(0) > 1024) {
        // values-only path for large maps; the fixed point comes from power
        // iteration and the defectiveness probe (an eigenbasis condition
        // estimate) is limited to small dimensions.
        r.eigenvalues = linalg::eig_values(s.mat);
        const int n = static_cast<int>(r.eigenvalues.size());
        if (is_channel_label(s.label) && std::abs(r.eigenvalues.front()) > 1.0 + 1e-10)
            fail(Errc::ConstraintViolation, "channel eigenvalue escapes the unit circle");
        for (const cplx& k : r.eigenvalues) {
            const double mod = std::abs(k);
            if (mod < 1.0 - 1e-12 && mod > 0.0)
                r.exponents.push_back(-std::log2(mod));
            else
                r.exponents.push_back(std::nullopt);
        }
        int near_one = 0;
        for (const cplx& k : r.eigenvalues)
            if (std::abs(k) >= 1.0 - kMixingThreshold) ++near_one;
        r.mixing = near_one == 1;
        r.gap = n >= 2 ? 1.0 - std::abs(r.eigenvalues[1]) : 1.0;
        r.defective = false;
        if (r.mixing) r.fixed_point = fixed_point(s, FixedPointMethod::Power, 1e-12);
        return r;
    }
    const auto e = linalg::eig(s.mat);
    r.eigenvalues = e.values;
    const int n = static_cast<int>(e.values.size());
    if (is_channel_label(s.label) && std::abs(e.values.front()) > 1.0 + 1e-10)
        fail(Errc::ConstraintViolation, "channel eigenvalue escapes the unit circle");
    for (const cplx& k : e.values) {
        const double mod = std::abs(k);
        if (mod < 1.0 - 1e-12 && mod > 0.0)
            r.exponents.push_back(-std::log2(mod));
        else
            r.exponents.push_back(std::nullopt);
    }
    int near_one = 0;
    for (const cplx& k : e.values)
        if (std::abs(k) >= 1.0 - kMixingThreshold) ++near_one;
    r.mixing = near_one == 1;
    r.gap = n >= 2 ? 1.0 - std::abs(e.values[1]) : 1.0;
    r.defective = e.vec_condition > 1e8;
    if (r.mixing) {
        const std::int64_t nn = s.mat.dim(0);
        Tensor col({nn, 1});
        for (std::int64_t i = 0; i < nn; ++i) col[i] = e.right[i * nn + 0];
        r.fixed_point = fixed_point_from_vector(s, col);
    }
    return r;
}

void write_report(const SpectrumReport& r, std::ostream& os) {
    char buf[128];
    os << "# spectrum label=" << r.label << " mixing=" << (r.mixing ? 1 : 0);
    std::snprintf(buf, sizeof(buf), " gap=%.17g defective=%d\n", r.gap, r.defective ? 1 : 0);
    os << buf;
    os << "# re im modulus exponent\n";
    for (size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const cplx k = r.eigenvalues[i];
        if (r.exponents[i])
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", k.real(), k.imag(),
                          std::abs(k), *r.exponents[i]);
        else
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g nan\n", k.real(), k.imag(),
                          std::abs(k));
        os << buf;
    }
}

DensityMatrix fixed_point(const Superoperator& s, FixedPointMethod method, double tol,
                          int max_iter) {
    require_endomorphism(s);
    const std::int64_t dd = s.din();
    if (method == FixedPointMethod::Eig) {
        const auto e = linalg::eig(s.mat);
        if (e.values.size() >= 2 && std::abs(e.values[1]) >= 1.0 - kMixingThreshold)
            fail(Errc::NotMixing, "fixed point not unique: degenerate leading eigenvalue");
        const std::int64_t nn = s.mat.dim(0);
        Tensor col({nn, 1});
        for (std::int64_t i = 0; i < nn; ++i) col[i] = e.right[i * nn + 0];
        DensityMatrix rho = fixed_point_from_vector(s, col);
        const Tensor resid = apply_matrix(s, rho.mat) - rho.mat;
        if (trace_norm(resid) > std::max(tol, 1e-12) * 10)
            fail(Errc::ConvergenceFailure, "fixed point residual above tolerance");
        return rho;
    }

    auto iterate = [&](DensityMatrix rho) {
        for (int it = 0; it < max_iter; ++it) {
            DensityMatrix next = canonicalize(apply(s, rho));
            const double delta = trace_norm(next.mat - rho.mat);
            rho = std::move(next);
            if (delta <= tol) return rho;
        }
        fail(Errc::ConvergenceFailure, "power iteration exceeded max_iter");
    };
    DensityMatrix rho = iterate(maximally_mixed(s.in_dims));
    // uniqueness probe from an independent start
    Rng rng(0xf1dU);
    Tensor g({dd, dd});
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] = rng.cgauss();
    Tensor h = matmul(g, dagger(g));
    DensityMatrix probe = iterate(canonicalize(DensityMatrix{std::move(h), s.in_dims, {}}));
    if (trace_distance(rho, probe) > 1000 * tol + 1e-9)
        fail(Errc::NotMixing, "fixed point not unique: probe start converged elsewhere");
    return rho;
}

std::vector<ScalingOperator> scaling_operators(const Superoperator& s, int count) {
    require_endomorphism(s);
    const SpectrumReport rep = spectrum(s);
    if (!rep.mixing) fail(Errc::NotMixing, "scaling operators require a mixing channel");
    const DensityMatrix rho_f = fixed_point(s, FixedPointMethod::Eig);

    const Tensor adj = adjoint_matrix(s);
    const auto e = linalg::eig(adj);
    const std::int64_t nn = adj.dim(0);
    const std::int64_t dd = s.din();
    std::vector<ScalingOperator> out;
    for (std::int64_t i = 0; i < nn && static_cast<int>(out.size()) < count; ++i) {
        const cplx k = e.values[i];
        if (std::abs(k) >= 1.0 - 1e-12) continue;
        Tensor op({dd, dd});
        for (std::int64_t r = 0; r < nn; ++r) op[r] = e.right[r * nn + i];
        const double norm = op.frobenius_norm();
        if (norm < 1e-300) continue;
        op *= cplx{1.0 / norm, 0.0};
        bool degen = false;
        if (i > 0 && std::abs(e.values[i - 1] - k) < 1e-9) degen = true;
        if (i + 1 < nn && std::abs(e.values[i + 1] - k) < 1e-9) degen = true;
        const double mod = std::abs(k);
        out.push_back({std::move(op), k, mod > 0 ? -std::log2(mod) : 1e300, degen});
    }
    // biorthogonality against the fixed point, up to numerical defectiveness
    for (const auto& so : out) {
        const cplx pairing = expectation(so.op, rho_f);
        if (std::abs(pairing) > 1e-6)
            fail(Errc::ConvergenceFailure, "scaling operator not orthogonal to the fixed point");
    }
    return out;
}

} // namespace bmera::spectral
