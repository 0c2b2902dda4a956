#include "bmera/observables.hpp"

#include <bit>
#include <cmath>

#include "bmera/linalg.hpp"

namespace bmera::observables {

DescentPath resolve_path(int n, std::int64_t ell) {
    if (n < 0) fail(Errc::InvalidConfig, "resolve_path: negative depth");
    const std::int64_t nsites = std::int64_t{1} << (n + 2);
    if (ell < 1 || ell > nsites - 2) fail(Errc::SiteOutOfRange, "site index out of range");
    std::vector<Step> up; // collected bottom to top
    std::int64_t j = ell;
    int k = n;
    BaseBlock base;
    for (;; --k) {
        if (k == 0) {
            if (j == 1)
                base = BaseBlock::T1;
            else if (j == 2)
                base = BaseBlock::T2;
            else
                fail(Errc::PathUnresolvable, "descent did not land on a top block");
            break;
        }
        const std::int64_t nk = std::int64_t{1} << (k + 2);
        if (j == 1) {
            up.push_back(Step::KL);
            for (int r = 0; r < k - 1; ++r) up.push_back(Step::BL);
            base = BaseBlock::Left;
            break;
        }
        if (j == nk - 2) {
            up.push_back(Step::KR);
            for (int r = 0; r < k - 1; ++r) up.push_back(Step::BR);
            base = BaseBlock::Right;
            break;
        }
        if (j % 2 == 0) {
            up.push_back(Step::DL);
            j /= 2;
        } else {
            up.push_back(Step::DR);
            j = (j - 1) / 2;
        }
    }
    DescentPath path;
    path.base = base;
    path.steps.assign(up.rbegin(), up.rend());
    return path;
}

Engine::Engine(const MeraTensors& t) : tensors_(t), channels_(build_channels(t)) {}

const TopBlocks& Engine::top() const {
    if (!top_) top_ = top_density_matrices(tensors_);
    return *top_;
}

const DensityMatrix& Engine::bulk_fixed_point() const {
    if (!rho_f3_) rho_f3_ = spectral::fixed_point(channels_.davg);
    return *rho_f3_;
}

const DensityMatrix& Engine::boundary_fixed_point() const {
    if (!rho_fb_) rho_fb_ = spectral::fixed_point(channels_.bl);
    return *rho_fb_;
}

const Superoperator& Engine::twopoint() const {
    if (!twopoint_) twopoint_ = build_twopoint(channels_.davg, channels_.davg);
    return *twopoint_;
}

cplx local_average_finite(const Engine& e, const LocalOperator& theta, std::int64_t ell, int n) {
    const DescentPath path = resolve_path(n, ell);
    const TopBlocks& top = e.top();
    DensityMatrix rho = path.base == BaseBlock::Left    ? top.left
                        : path.base == BaseBlock::T1    ? top.t1
                        : path.base == BaseBlock::T2    ? top.t2
                                                        : top.right;
    const BoundaryChannels& ch = e.channels();
    for (Step s : path.steps) {
        switch (s) {
        case Step::DL: rho = apply(ch.dl, rho); break;
        case Step::DR: rho = apply(ch.dr, rho); break;
        case Step::KL: rho = apply(ch.kl, rho); break;
        case Step::KR: rho = apply(ch.kr, rho); break;
        case Step::BL: rho = apply(ch.bl, rho); break;
        case Step::BR: rho = apply(ch.br, rho); break;
        }
    }
    return expectation(theta.mat, rho);
}

namespace {

int floor_log2(std::int64_t ell) { return std::bit_width(static_cast<std::uint64_t>(ell)) - 1; }

} // namespace

cplx local_average_infinite(const Engine& e, const LocalOperator& theta, std::int64_t ell) {
    if (ell < 1) fail(Errc::SiteOutOfRange, "infinite-volume average needs ell >= 1");
    const int k = floor_log2(ell);
    DensityMatrix rho = apply(e.channels().kl, e.boundary_fixed_point());
    for (int i = 0; i < k; ++i) rho = apply(e.channels().davg, rho);
    return expectation(theta.mat, rho);
}

namespace {

struct LineFit {
    double slope, intercept, rms;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double rms = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - slope * xs[i] - intercept;
        rms += r * r;
    }
    return {slope, intercept, std::sqrt(rms / n)};
}

} // namespace

ProfileResult boundary_profile(const Engine& e, const LocalOperator& theta, FitWindow w) {
    if (w.k_lo < 0 || w.k_hi <= w.k_lo) fail(Errc::InvalidConfig, "invalid fit window");
    ProfileResult out;
    out.bulk = expectation(theta.mat, e.bulk_fixed_point());
    DensityMatrix rho = apply(e.channels().kl, e.boundary_fixed_point());
    for (int k = 0; k <= w.k_hi; ++k) {
        out.ells.push_back(std::int64_t{1} << k);
        out.values.push_back(expectation(theta.mat, rho));
        rho = apply(e.channels().davg, rho);
    }
    std::vector<double> xs, ys;
    bool above_floor = false;
    for (int k = w.k_lo; k <= w.k_hi; ++k) {
        const double dev = std::abs(out.values[k] - out.bulk);
        if (dev >= 1e-13) above_floor = true;
    }
    if (!above_floor)
        fail(Errc::SignalBelowFloor, "profile deviation below 1e-13 across the fit window");
    for (int k = w.k_lo; k <= w.k_hi; ++k) {
        const double dev = std::abs(out.values[k] - out.bulk);
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log2(std::max(dev, 1e-300)));
    }
    const LineFit fit = fit_line(xs, ys);
    out.exponent = -fit.slope;
    out.amplitude = std::exp2(fit.intercept);
    out.residual = fit.rms;
    return out;
}

Tensor shift_embed(const Tensor& rho4, std::int64_t d) {
    const std::int64_t d4 = d * d * d * d;
    if (rho4.rank() != 2 || rho4.dim(0) != d4)
        fail(Errc::DimensionMismatch, "shift_embed: rho4 must be d^4 x d^4");
    const std::int64_t d3 = d * d * d, d6 = d3 * d3;
    Tensor sigma({d6, d6});
    // sigma[(r1 r2 r3)(r4 r5 r6), (c1 c2 c3)(c4 c5 c6)] =
    //   delta(c4,r2) delta(c5,r3) rho4[(r1 r4 r5 r6),(c1 c2 c3 c6)]
    for (std::int64_t r1 = 0; r1 < d; ++r1)
        for (std::int64_t r4 = 0; r4 < d; ++r4)
            for (std::int64_t r5 = 0; r5 < d; ++r5)
                for (std::int64_t r6 = 0; r6 < d; ++r6)
                    for (std::int64_t c1 = 0; c1 < d; ++c1)
                        for (std::int64_t c2 = 0; c2 < d; ++c2)
                            for (std::int64_t c3 = 0; c3 < d; ++c3)
                                for (std::int64_t c6 = 0; c6 < d; ++c6) {
                                    const cplx v =
                                        rho4[(((r1 * d + r4) * d + r5) * d + r6) * d4 +
                                             ((c1 * d + c2) * d + c3) * d + c6];
                                    if (v == cplx{}) continue;
                                    for (std::int64_t r2 = 0; r2 < d; ++r2)
                                        for (std::int64_t r3 = 0; r3 < d; ++r3) {
                                            const std::int64_t row =
                                                ((r1 * d + r2) * d + r3) * d3 +
                                                (r4 * d + r5) * d + r6;
                                            const std::int64_t col =
                                                ((c1 * d + c2) * d + c3) * d3 +
                                                (r2 * d + r3) * d + c6;
                                            sigma[row * d6 + col] += v;
                                        }
                                }
    return sigma;
}

Tensor twopoint_seed(const Engine& e) {
    const std::int64_t d = e.tensors().config.d;
    const Superoperator d4 = build_descend4(e.tensors());
    const Tensor rho4 = apply_matrix(d4, e.bulk_fixed_point().mat);
    Tensor sigma = shift_embed(rho4, d);
    const Tensor& rf3 = e.bulk_fixed_point().mat;
    sigma -= kron(rf3, rf3);
    if (std::abs(mat_trace(sigma)) > 1e-10)
        fail(Errc::ConvergenceFailure, "two-point seed is not traceless");
    return sigma;
}

cplx bulk_correlator(const Engine& e, const LocalOperator& theta, int m) {
    if (m < 0) fail(Errc::InvalidConfig, "bulk_correlator: negative dyadic separation");
    const Superoperator& dd = e.twopoint();
    Tensor x = twopoint_seed(e);
    for (int i = 0; i < m; ++i) x = apply_matrix(dd, x);
    return trace_product(kron(theta.mat, theta.mat), x);
}

CorrelatorResult correlator_profile(const Engine& e, const LocalOperator& theta, FitWindow w) {
    CorrelatorResult out;
    const Superoperator& dd = e.twopoint();
    const Tensor pair = kron(theta.mat, theta.mat);
    Tensor x = twopoint_seed(e);
    std::vector<double> xs, ys;
    for (int m = 0; m <= w.k_hi; ++m) {
        const cplx v = trace_product(pair, x);
        out.ms.push_back(m);
        out.values.push_back(v);
        if (m >= w.k_lo && std::abs(v) > 1e-300) {
            xs.push_back(static_cast<double>(m));
            ys.push_back(std::log2(std::abs(v)));
        }
        if (m < w.k_hi) x = apply_matrix(dd, x);
    }
    if (xs.size() < 2) fail(Errc::SignalBelowFloor, "correlator signal below floor");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double rms = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - slope * xs[i] - intercept;
        rms += r * r;
    }
    out.exponent = -slope;
    out.residual = std::sqrt(rms / n);
    return out;
}

double block_energy(const Engine& e, const Hamiltonian3& h, int tau) {
    if (tau < 1) fail(Errc::InvalidConfig, "block_energy: tau must be >= 1");
    Tensor x = apply(e.channels().kl, e.boundary_fixed_point()).mat;
    double total = 0;
    double weight = 1;
    for (int p = 0; p < tau; ++p) {
        total += weight * trace_product(h.h3, x).real();
        if (p + 1 < tau) {
            x = apply_matrix(e.channels().davg, x);
            weight *= 2;
        }
    }
    return total;
}

DeviationReport deviation_from_seed(const Superoperator& davg, const Hamiltonian3& h,
                                    const Tensor& seed, int tau) {
    if (tau < 1) fail(Errc::InvalidConfig, "deviation: tau must be >= 1");
    DeviationReport rep;
    // partial sum for the first 2^tau - 1 sites
    {
        Tensor x = seed;
        double weight = 1;
        for (int p = 0; p < tau; ++p) {
            const cplx term = trace_product(h.h3, x);
            rep.value += weight * term.real();
            if (p + 1 < tau) {
                x = apply_matrix(davg, x);
                weight *= 2;
            }
        }
    }
    // component analysis in the eigenbasis of the averaged map
    const auto eg = linalg::eig(davg.mat);
    rep.kappas = eg.values;
    if (eg.vec_condition <= 1e8) {
        const std::int64_t nn = davg.mat.dim(0);
        Tensor rhs({nn, 1});
        for (std::int64_t i = 0; i < nn; ++i) rhs[i] = seed[i];
        const Tensor coef = linalg::solve(eg.right, rhs);
        rep.component_norms.resize(nn);
        for (std::int64_t i = 0; i < nn; ++i) rep.component_norms[i] = std::abs(coef[i]);
        rep.kappa_one_component = rep.component_norms[0];
        for (std::int64_t i = 1; i < nn; ++i)
            if (std::abs(eg.values[i]) >= 0.5 - 1e-12 && rep.component_norms[i] > 1e-10)
                rep.divergence = true;
    } else {
        // ill-conditioned eigenbasis: decide by growth of the term sequence
        rep.used_fallback = true;
        std::vector<double> terms;
        Tensor x = seed;
        double weight = 1;
        for (int p = 0; p < 40; ++p) {
            terms.push_back(weight * std::abs(trace_product(h.h3, x)));
            x = apply_matrix(davg, x);
            weight *= 2;
        }
        double early = 0, late = 0;
        for (int p = 10; p < 20; ++p) early = std::max(early, terms[p]);
        for (int p = 30; p < 40; ++p) late = std::max(late, terms[p]);
        rep.divergence = late > early * (1 + 1e-9) && late > 1e-14;
    }
    return rep;
}

DeviationReport boundary_energy_deviation(const Engine& e, const Hamiltonian3& h, int tau) {
    Tensor seed = apply(e.channels().kl, e.boundary_fixed_point()).mat;
    seed -= e.bulk_fixed_point().mat;
    return deviation_from_seed(e.channels().davg, h, seed, tau);
}

} // namespace bmera::observables
