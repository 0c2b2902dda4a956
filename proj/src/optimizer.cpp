#include "bmera/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bmera/channels.hpp"
#include "bmera/labnet.hpp"
#include "bmera/linalg.hpp"
#include "bmera/rng.hpp"
#include "bmera/observables.hpp"
#include "bmera/spectral.hpp"

namespace bmera::optimizer {

namespace {

using labnet::Lab;

enum class Frag { DL, DR, KL, KR, BL, BR };

// Descend-layout gates plus conjugates; every environment network below is
// assembled from these.
struct GateSet {
    Tensor dl, gx, gal, gar;
    Tensor dlb, gxb, galb, garb;
    explicit GateSet(const MeraTensors& t)
        : dl(descend_lambda(t)), gx(descend_chi(t)), gal(descend_alpha(t, Side::Left)),
          gar(descend_alpha(t, Side::Right)), dlb(dl.conjugate()), gxb(gx.conjugate()),
          galb(gal.conjugate()), garb(gar.conjugate()) {}
};

// Environment accumulators in storage layouts.
struct EnvAccum {
    bool want_lambda = false, want_chi = false, want_al = false, want_ar = false;
    Tensor lambda, chi, alpha_l, alpha_r;
};

struct Node {
    Lab lab;
    int cls; // 0 plain, 1 lambda-bra, 2 chi-bra, 3 alphaL-bra, 4 alphaR-bra
};

Tensor rank6(const Tensor& mat, const std::vector<std::int64_t>& dims) {
    std::vector<std::int64_t> shape = dims;
    shape.insert(shape.end(), dims.begin(), dims.end());
    return mat.reshaped(std::move(shape));
}

// Networks for Tr[phi * Frag(rho)]. Wire labels are local to each build.
std::vector<Node> build_net(Frag f, const GateSet& g, const Tensor& phi, const Tensor& rho,
                            std::int64_t d, std::int64_t m) {
    std::vector<Node> net;
    auto add = [&](Tensor t, std::vector<int> lab, int cls = 0) {
        net.push_back({{std::move(t), std::move(lab)}, cls});
    };
    switch (f) {
    case Frag::DL:
    case Frag::DR: {
        add(rank6(rho, {d, d, d}), {1, 2, 3, 4, 5, 6});
        add(g.dl, {10, 11, 1});
        add(g.dl, {12, 13, 2});
        add(g.dl, {14, 15, 3});
        add(g.gx, {30, 31, 11, 12});
        add(g.gx, {32, 33, 13, 14});
        if (f == Frag::DL) {
            // traced: f1 (10), f5 (33), f6 (15); kept ket (30,31,32)
            add(g.dlb, {10, 21, 4}, 1);
            add(g.dlb, {22, 23, 5}, 1);
            add(g.dlb, {24, 15, 6}, 1);
            add(g.gxb, {40, 41, 21, 22}, 2);
            add(g.gxb, {42, 33, 23, 24}, 2);
            add(rank6(phi, {d, d, d}), {40, 41, 42, 30, 31, 32});
        } else {
            // traced: f1 (10), f2 (30), f6 (15); kept ket (31,32,33)
            add(g.dlb, {10, 21, 4}, 1);
            add(g.dlb, {22, 23, 5}, 1);
            add(g.dlb, {24, 15, 6}, 1);
            add(g.gxb, {30, 41, 21, 22}, 2);
            add(g.gxb, {42, 43, 23, 24}, 2);
            add(rank6(phi, {d, d, d}), {41, 42, 43, 31, 32, 33});
        }
        break;
    }
    case Frag::KL:
    case Frag::BL: {
        add(rank6(rho, {m, d, d}), {1, 2, 3, 4, 5, 6});
        add(g.dl, {10, 11, 2});
        add(g.dl, {12, 13, 3});
        add(g.gal, {16, 17, 1, 10});
        add(g.gx, {30, 31, 11, 12});
        if (f == Frag::KL) {
            // traced: anc out (16), site4 (13); kept ket (17,30,31)
            add(g.dlb, {20, 21, 5}, 1);
            add(g.dlb, {22, 13, 6}, 1);
            add(g.galb, {16, 47, 4, 20}, 3);
            add(g.gxb, {45, 46, 21, 22}, 2);
            add(rank6(phi, {d, d, d}), {47, 45, 46, 17, 30, 31});
        } else {
            // traced: site3 (31), site4 (13); kept ket (16,17,30)
            add(g.dlb, {20, 21, 5}, 1);
            add(g.dlb, {22, 13, 6}, 1);
            add(g.galb, {26, 27, 4, 20}, 3);
            add(g.gxb, {28, 31, 21, 22}, 2);
            add(rank6(phi, {m, d, d}), {26, 27, 28, 16, 17, 30});
        }
        break;
    }
    case Frag::KR:
    case Frag::BR: {
        add(rank6(rho, {d, d, m}), {1, 2, 3, 4, 5, 6});
        add(g.dl, {10, 11, 1});
        add(g.dl, {12, 13, 2});
        add(g.gar, {16, 17, 3, 13});
        add(g.gx, {30, 31, 11, 12});
        if (f == Frag::KR) {
            // traced: g1 (10), anc out (16); kept ket (30,31,17)
            add(g.dlb, {10, 21, 4}, 1);
            add(g.dlb, {22, 23, 5}, 1);
            add(g.garb, {16, 47, 6, 23}, 4);
            add(g.gxb, {45, 46, 21, 22}, 2);
            add(rank6(phi, {d, d, d}), {45, 46, 47, 30, 31, 17});
        } else {
            // traced: g1 (10), g2 (30); kept ket (31,17,16)
            add(g.dlb, {10, 21, 4}, 1);
            add(g.dlb, {22, 23, 5}, 1);
            add(g.garb, {26, 27, 6, 23}, 4);
            add(g.gxb, {30, 41, 21, 22}, 2);
            add(rank6(phi, {d, d, m}), {41, 27, 26, 31, 17, 16});
        }
        break;
    }
    }
    return net;
}

void axpy(Tensor& acc, const Tensor& x, double w) {
    if (acc.size() == 0)
        acc = Tensor(x.shape());
    Tensor scaled = x;
    scaled *= cplx{w, 0};
    acc += scaled;
}

void accumulate_term(Frag f, const GateSet& g, const Tensor& phi, const Tensor& rho, double w,
                     std::int64_t d, std::int64_t m, EnvAccum& acc) {
    const std::vector<Node> net = build_net(f, g, phi, rho, d, m);
    for (size_t hole = 0; hole < net.size(); ++hole) {
        const int cls = net[hole].cls;
        if (cls == 0) continue;
        if (cls == 1 && !acc.want_lambda) continue;
        if (cls == 2 && !acc.want_chi) continue;
        if (cls == 3 && !acc.want_al) continue;
        if (cls == 4 && !acc.want_ar) continue;
        Lab e;
        bool first = true;
        for (size_t i = 0; i < net.size(); ++i) {
            if (i == hole) continue;
            if (first) {
                e = net[i].lab;
                first = false;
            } else {
                e = labnet::contract_shared(e, net[i].lab);
            }
        }
        const Tensor env = labnet::ordered(e, net[hole].lab.lab);
        switch (cls) {
        case 1: axpy(acc.lambda, permute(env, {2, 0, 1}), w); break;       // (u,l1,l2)
        case 2: axpy(acc.chi, permute(env, {2, 3, 0, 1}), w); break;       // (u1,u2,l1,l2)
        case 3: axpy(acc.alpha_l, permute(env, {2, 3, 0, 1}), w); break;
        case 4: axpy(acc.alpha_r, permute(env, {2, 3, 0, 1}), w); break;
        }
    }
}

struct Prepared {
    BoundaryChannels ch;
    Tensor rho_f3;       // bulk fixed point (matrix)
    Tensor b_l, b_r;     // boundary fixed points
    Tensor x_l, x_r;     // deviation seeds
};

Prepared prepare(const MeraTensors& t) {
    Prepared p{build_channels(t), {}, {}, {}, {}, {}};
    p.rho_f3 = spectral::fixed_point(p.ch.davg).mat;
    p.b_l = spectral::fixed_point(p.ch.bl).mat;
    p.b_r = spectral::fixed_point(p.ch.br).mat;
    p.x_l = apply_matrix(p.ch.kl, p.b_l) - p.rho_f3;
    p.x_r = apply_matrix(p.ch.kr, p.b_r) - p.rho_f3;
    return p;
}

double deviation_value(const Superoperator& davg, const Hamiltonian3& h, const Tensor& seed,
                       int tau) {
    Tensor x = seed;
    double total = 0, weight = 1;
    for (int p = 0; p < tau; ++p) {
        total += weight * trace_product(h.h3, x).real();
        if (p + 1 < tau) {
            x = apply_matrix(davg, x);
            weight *= 2;
        }
    }
    return total;
}

double edge_weight(const OptimizeConfig& cfg) {
    if (cfg.boundary_weight >= 0) return cfg.boundary_weight;
    return 1.0 / (2.0 * static_cast<double>((std::int64_t{1} << cfg.tau) - 1));
}

double objective(const Prepared& p, const Hamiltonian3& h, const OptimizeConfig& cfg) {
    const double bulk = trace_product(h.h3, p.rho_f3).real();
    const double dev = deviation_value(p.ch.davg, h, p.x_l, cfg.tau) +
                       deviation_value(p.ch.davg, h, p.x_r, cfg.tau);
    return bulk + edge_weight(cfg) * dev;
}

// Total environment of one tensor class in the cost
//   bulk density + weight * (left + right boundary deviation),
// with the fixed points frozen and their sensitivity restored through
// finite ascending/descending towers.
EnvAccum environments(const MeraTensors& t, const Prepared& p, const Hamiltonian3& h,
                      const OptimizeConfig& cfg, TensorClass cls) {
    const std::int64_t d = t.config.d, m = t.config.m;
    const GateSet g(t);
    EnvAccum acc;
    acc.want_lambda = cls == TensorClass::Lambda;
    acc.want_chi = cls == TensorClass::Chi;
    acc.want_al = cls == TensorClass::AlphaL;
    acc.want_ar = cls == TensorClass::AlphaR ||
                  (cls == TensorClass::AlphaL && !t.config.independent_boundaries);
    const double w = edge_weight(cfg);
    const int kmax = cfg.tower_layers;
    const int tau = cfg.tau;

    // adjoint-ascended Hamiltonians
    std::vector<Tensor> phi(std::max(kmax, tau));
    phi[0] = h.h3;
    for (size_t i = 1; i < phi.size(); ++i) phi[i] = adjoint_apply(p.ch.davg, phi[i - 1]);
    Tensor psi = phi[0];
    {
        double weight = 2;
        for (int q = 1; q < tau; ++q) {
            Tensor term = phi[q];
            term *= cplx{weight, 0};
            psi += term;
            weight *= 2;
        }
    }

    const bool bulk_classes = acc.want_lambda || acc.want_chi;
    if (bulk_classes) {
        // bulk density through the descending tower
        for (int k = 0; k < kmax; ++k) {
            accumulate_term(Frag::DL, g, phi[k], p.rho_f3, 0.5, d, m, acc);
            accumulate_term(Frag::DR, g, phi[k], p.rho_f3, 0.5, d, m, acc);
        }
        // deviation: descending chains acting on the seeds
        for (const Tensor* seed : {&p.x_l, &p.x_r}) {
            std::vector<Tensor> ys = {*seed};
            for (int i = 1; i < tau; ++i) ys.push_back(apply_matrix(p.ch.davg, ys.back()));
            double weight = 2; // 2^q
            for (int q = 1; q < tau; ++q) {
                for (int r = 0; r < q; ++r) {
                    accumulate_term(Frag::DL, g, phi[r], ys[q - 1 - r], 0.5 * w * weight, d, m,
                                    acc);
                    accumulate_term(Frag::DR, g, phi[r], ys[q - 1 - r], 0.5 * w * weight, d, m,
                                    acc);
                }
                weight *= 2;
            }
        }
        // deviation: the -rho_f3 references, sensitivity through the tower
        Tensor psi_p = psi;
        for (int k = 0; k < kmax; ++k) {
            accumulate_term(Frag::DL, g, psi_p, p.rho_f3, -0.5 * 2.0 * w, d, m, acc);
            accumulate_term(Frag::DR, g, psi_p, p.rho_f3, -0.5 * 2.0 * w, d, m, acc);
            if (k + 1 < kmax) psi_p = adjoint_apply(p.ch.davg, psi_p);
        }
    }
    // absorbing fragments (lambda, chi, alpha all appear here)
    if (acc.want_lambda || acc.want_chi || acc.want_al)
        accumulate_term(Frag::KL, g, psi, p.b_l, w, d, m, acc);
    if (acc.want_lambda || acc.want_chi || acc.want_ar)
        accumulate_term(Frag::KR, g, psi, p.b_r, w, d, m, acc);
    // boundary-stable towers feeding the frozen fixed points
    {
        Tensor xl = adjoint_apply(p.ch.kl, psi);
        Tensor xr = adjoint_apply(p.ch.kr, psi);
        for (int s = 0; s < cfg.boundary_tower; ++s) {
            if (acc.want_lambda || acc.want_chi || acc.want_al)
                accumulate_term(Frag::BL, g, xl, p.b_l, w, d, m, acc);
            if (acc.want_lambda || acc.want_chi || acc.want_ar)
                accumulate_term(Frag::BR, g, xr, p.b_r, w, d, m, acc);
            if (s + 1 < cfg.boundary_tower) {
                xl = adjoint_apply(p.ch.bl, xl);
                xr = adjoint_apply(p.ch.br, xr);
            }
        }
    }
    return acc;
}

Tensor polar_update(const Tensor& env, int row_rank) {
    std::int64_t rows = 1, cols = 1;
    for (int i = 0; i < env.rank(); ++i) (i < row_rank ? rows : cols) *= env.dim(i);
    Tensor u = linalg::polar_unitary(env.reshaped({rows, cols}));
    u *= cplx{-1, 0};
    return u.reshaped(env.shape());
}

// ---- finite-size hat objective ------------------------------------------

Tensor hat_quadratic_form(const MeraTensors& t, const BoundaryChannels& ch,
                          const Hamiltonian3& h, int depth) {
    const std::int64_t d = t.config.d, m = t.config.m;
    const std::int64_t nsites = std::int64_t{1} << (depth + 2);
    // ascended observables per top block
    const std::int64_t d3 = d * d * d;
    const std::int64_t dbl = m * d * d;
    Tensor xi_left({dbl, dbl}), xi_t1({d3, d3}), xi_t2({d3, d3}), xi_right({dbl, dbl});
    for (std::int64_t j = 1; j <= nsites - 2; ++j) {
        const auto path = observables::resolve_path(depth, j);
        Tensor theta = h.h3;
        for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
            switch (*it) {
            case observables::Step::DL: theta = adjoint_apply(ch.dl, theta); break;
            case observables::Step::DR: theta = adjoint_apply(ch.dr, theta); break;
            case observables::Step::KL: theta = adjoint_apply(ch.kl, theta); break;
            case observables::Step::KR: theta = adjoint_apply(ch.kr, theta); break;
            case observables::Step::BL: theta = adjoint_apply(ch.bl, theta); break;
            case observables::Step::BR: theta = adjoint_apply(ch.br, theta); break;
            }
        }
        switch (path.base) {
        case observables::BaseBlock::Left: xi_left += theta; break;
        case observables::BaseBlock::T1: xi_t1 += theta; break;
        case observables::BaseBlock::T2: xi_t2 += theta; break;
        case observables::BaseBlock::Right: xi_right += theta; break;
        }
    }
    // lift each block observable onto the hat index space
    const std::int64_t dh = m * d * d * d * d * m;
    const std::int64_t hdims[6] = {m, d, d, d, d, m};
    Tensor mq({dh, dh});
    auto lift = [&](const Tensor& xi, const int kept[3]) {
        std::int64_t kdim = 1;
        for (int i = 0; i < 3; ++i) kdim *= hdims[kept[i]];
        bool is_kept[6] = {};
        for (int i = 0; i < 3; ++i) is_kept[kept[i]] = true;
        std::int64_t idx_a[6], idx_b[6];
        for (std::int64_t ha = 0; ha < dh; ++ha) {
            std::int64_t rem = ha;
            for (int i = 5; i >= 0; --i) {
                idx_a[i] = rem % hdims[i];
                rem /= hdims[i];
            }
            for (std::int64_t hb = 0; hb < dh; ++hb) {
                rem = hb;
                bool same_traced = true;
                for (int i = 5; i >= 0; --i) {
                    idx_b[i] = rem % hdims[i];
                    rem /= hdims[i];
                }
                for (int i = 0; i < 6; ++i)
                    if (!is_kept[i] && idx_a[i] != idx_b[i]) same_traced = false;
                if (!same_traced) continue;
                std::int64_t ka = 0, kb = 0;
                for (int i = 0; i < 3; ++i) {
                    ka = ka * hdims[kept[i]] + idx_a[kept[i]];
                    kb = kb * hdims[kept[i]] + idx_b[kept[i]];
                }
                mq[ha * dh + hb] += xi[ka * kdim + kb];
            }
        }
    };
    const int kl[3] = {0, 1, 2}, k1[3] = {1, 2, 3}, k2[3] = {2, 3, 4}, kr[3] = {3, 4, 5};
    lift(xi_left, kl);
    lift(xi_t1, k1);
    lift(xi_t2, k2);
    lift(xi_right, kr);
    // hermitize against roundoff
    Tensor mh = mq + dagger(mq);
    mh *= 0.5;
    return mh;
}

double hat_energy(const Tensor& mq, const Tensor& hat) {
    const std::int64_t dh = hat.size();
    const Tensor v = hat.reshaped({dh, 1});
    const Tensor mv = matmul(mq, v);
    cplx acc{};
    for (std::int64_t i = 0; i < dh; ++i) acc += std::conj(v[i]) * mv[i];
    return acc.real();
}

} // namespace

MeraTensors warm_start(const MeraConfig& config, const Tensor& h2, double epsilon) {
    config.validate();
    const auto d = config.d, m = config.m;
    if (h2.rank() != 2 || h2.dim(0) != d * d)
        fail(Errc::DimensionMismatch, "warm_start: h2 must be d^2 x d^2");
    Rng rng(config.seed);
    auto jitter = [&](std::int64_t rows, std::int64_t cols, const Tensor& base) {
        Tensor g({rows, cols});
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] = epsilon * rng.cgauss();
        g += base;
        return linalg::polar_unitary(g);
    };
    MeraTensors t;
    t.config = config;
    // lambda: rows span the lowest-energy two-site subspace
    Tensor hh = h2 + dagger(h2);
    hh *= 0.5;
    const auto eig = linalg::eigh(hh);
    Tensor lam({d, d * d});
    for (std::int64_t u = 0; u < d; ++u)
        for (std::int64_t l = 0; l < d * d; ++l)
            lam[u * d * d + l] = std::conj(eig.vectors[l * d * d + u]);
    {
        Tensor g({d, d * d});
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] = epsilon * rng.cgauss();
        g += lam;
        t.lambda = linalg::polar_unitary(g).reshaped({d, d, d});
    }
    t.chi = jitter(d * d, d * d, Tensor::identity(d * d)).reshaped({d, d, d, d});
    t.alpha_l = jitter(m * d, m * d, Tensor::identity(m * d)).reshaped({m, d, m, d});
    t.alpha_r = config.independent_boundaries
                    ? jitter(m * d, m * d, Tensor::identity(m * d)).reshaped({m, d, m, d})
                    : t.alpha_l;
    Tensor hat({m, d, d, d, d, m});
    for (std::int64_t i = 0; i < hat.size(); ++i) hat[i] = rng.cgauss();
    hat *= cplx{1.0 / hat.frobenius_norm(), 0.0};
    t.hat = hat;
    return t;
}

std::pair<double, double> energy_functional(const MeraTensors& t, const Hamiltonian3& h,
                                            int tau) {
    const Prepared p = prepare(t);
    const double bulk = trace_product(h.h3, p.rho_f3).real();
    const double dev = deviation_value(p.ch.davg, h, p.x_l, tau);
    return {bulk, dev};
}

OptimizeResult optimize(const MeraTensors& t0, const Hamiltonian3& h,
                        const OptimizeConfig& cfg) {
    if (cfg.sweeps < 1) fail(Errc::InvalidConfig, "optimize: sweeps must be >= 1");
    if (h.h3.frobenius_norm() == 0.0) {
        // zero Hamiltonian: zero environment, tensors unchanged by convention
        OptimizeResult r{t0, std::vector<double>(cfg.sweeps, 0.0), false, 0};
        return r;
    }

    OptimizeResult result;
    for (int attempt = 0;; ++attempt) {
        MeraTensors t = attempt == 0 ? t0 : [&] {
            MeraConfig c = t0.config;
            c.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * attempt;
            return random_isometric(c);
        }();
        try {
            Prepared p = prepare(t);
            double current = objective(p, h, cfg);
            std::vector<double> trace;
            int flat_sweeps = 0;
            bool stalled = false;
            Tensor hat_form;
            double hat_current = 0;
            const bool do_hat = std::count(cfg.which.begin(), cfg.which.end(),
                                           TensorClass::Hat) > 0;
            for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
                const double sweep_start = current;
                for (int inner = 0; inner < std::max(1, cfg.inner_iterations); ++inner)
                for (TensorClass cls : cfg.which) {
                    if (cls == TensorClass::Hat) continue; // handled after the classes
                    if (cls == TensorClass::AlphaR && !t.config.independent_boundaries)
                        continue; // mirrors alpha_l
                    const EnvAccum acc = environments(t, p, h, cfg, cls);
                    MeraTensors cand = t;
                    switch (cls) {
                    case TensorClass::Chi:
                        if (acc.chi.size() == 0) continue;
                        cand.chi = polar_update(acc.chi, 2);
                        break;
                    case TensorClass::Lambda:
                        if (acc.lambda.size() == 0) continue;
                        cand.lambda = polar_update(acc.lambda, 1);
                        break;
                    case TensorClass::AlphaL: {
                        if (acc.alpha_l.size() == 0) continue;
                        Tensor env = acc.alpha_l;
                        if (!t.config.independent_boundaries && acc.alpha_r.size() != 0)
                            env += acc.alpha_r; // tied couplers share the update
                        cand.alpha_l = polar_update(env, 2);
                        if (!t.config.independent_boundaries) cand.alpha_r = cand.alpha_l;
                        break;
                    }
                    case TensorClass::AlphaR:
                        if (acc.alpha_r.size() == 0) continue;
                        cand.alpha_r = polar_update(acc.alpha_r, 2);
                        break;
                    default: break;
                    }
                    const Prepared pc = prepare(cand);
                    const double next = objective(pc, h, cfg);
                    if (next < current) {
                        t = std::move(cand);
                        p = std::move(pc);
                        current = next;
                    }
                }
                if (do_hat) {
                    hat_form = hat_quadratic_form(t, p.ch, h, cfg.hat_depth);
                    hat_current = hat_energy(hat_form, t.hat);
                    const auto eh = linalg::eigh(hat_form);
                    const std::int64_t dh = t.hat.size();
                    Tensor cand_hat(t.hat.shape());
                    for (std::int64_t i = 0; i < dh; ++i)
                        cand_hat[i] = eh.vectors[i * dh + 0];
                    const double next = eh.values.front();
                    if (next < hat_current) {
                        t.hat = std::move(cand_hat);
                        hat_current = next;
                    }
                }
                trace.push_back(current);
                if (sweep_start - current < cfg.tol_energy) {
                    if (++flat_sweeps >= 5) {
                        stalled = true;
                        break;
                    }
                } else {
                    flat_sweeps = 0;
                }
            }
            result.tensors = std::move(t);
            result.trace = std::move(trace);
            result.stalled = stalled;
            result.restarts = attempt;
            return result;
        } catch (const Error& e) {
            if (e.code() != Errc::NotMixing || attempt >= 3) throw;
        }
    }
}

namespace {
constexpr char kCkptMagic[8] = {'B', 'M', 'E', 'R', 'A', 'C', 'K', '1'};
}

void save_checkpoint(const std::string& path, const MeraTensors& t,
                     const std::vector<double>& trace) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(Errc::IoError, "cannot open checkpoint for writing: " + path);
    os.write(kCkptMagic, sizeof(kCkptMagic));
    const std::uint64_t n = trace.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(trace.data()), sizeof(double) * trace.size());
    write_tensors(t, os);
    if (!os) fail(Errc::IoError, "checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Errc::IoError, "cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCkptMagic, sizeof(kCkptMagic)) != 0)
        fail(Errc::IoError, "not a checkpoint file");
    std::uint64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    Checkpoint c;
    c.trace.resize(n);
    is.read(reinterpret_cast<char*>(c.trace.data()), sizeof(double) * n);
    c.tensors = read_tensors(is);
    if (!is) fail(Errc::IoError, "truncated checkpoint");
    return c;
}

} // namespace bmera::optimizer
