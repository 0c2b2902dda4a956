// Batch front end: every computation is driven by a config file and writes
// deterministic CSV-style tables. Exit codes: 0 ok, 2 constraint failure,
// 3 not mixing, 4 oracle mismatch, 5 budget exceeded, 1 anything else.

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bmera/channels.hpp"
#include "bmera/config.hpp"
#include "bmera/linalg.hpp"
#include "bmera/models.hpp"
#include "bmera/network.hpp"
#include "bmera/observables.hpp"
#include "bmera/optimizer.hpp"
#include "bmera/oracle.hpp"
#include "bmera/rng.hpp"
#include "bmera/spectral.hpp"

using namespace bmera;
namespace fs = std::filesystem;

namespace {

struct Args {
    std::string command, config_path, out_dir = ".";
};

void usage() {
    std::fprintf(stderr,
                 "usage: bmera <check|spectrum|profile|correlator|energy|optimize|exact> "
                 "--config PATH [--out DIR]\n");
}

std::ofstream open_out(const Args& a, const config::RunConfig& cfg, const std::string& name) {
    fs::create_directories(a.out_dir);
    const fs::path p = fs::path(a.out_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) fail(Errc::IoError, "cannot open output: " + p.string());
    os << "# bmera " << a.command << " config=" << config::hash_hex(cfg.hash)
       << " seed=" << cfg.mera.seed << "\n";
    return os;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

MeraTensors tensors_for(const config::RunConfig& cfg) {
    if (!cfg.tensors_path.empty()) return load_tensors(cfg.tensors_path);
    return random_isometric(cfg.mera);
}

LocalOperator make_operator(const config::RunConfig& cfg, const observables::Engine& e) {
    const std::int64_t d = cfg.mera.d;
    const std::int64_t d3 = d * d * d;
    if (cfg.op_type == "identity") return identity_operator(d);
    if (cfg.op_type == "pauli") {
        if (d != 2 || cfg.op_pauli.size() != 3)
            fail(Errc::InvalidConfig, "pauli operators need d=2 and a 3-letter string");
        Tensor m = kron(kron(models::pauli(cfg.op_pauli[0]), models::pauli(cfg.op_pauli[1])),
                        models::pauli(cfg.op_pauli[2]));
        return {std::move(m), true};
    }
    if (cfg.op_type == "scaling") {
        auto ops = spectral::scaling_operators(e.channels().davg, cfg.op_index + 1);
        if (static_cast<int>(ops.size()) <= cfg.op_index)
            fail(Errc::InvalidConfig, "scaling operator index out of range");
        return {ops[cfg.op_index].op, false};
    }
    // random_hermitian
    Rng rng(cfg.op_seed);
    Tensor g({d3, d3});
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] = rng.cgauss();
    Tensor h = g + dagger(g);
    h *= 0.5;
    return {std::move(h), true};
}

int cmd_check(const Args& a, const config::RunConfig& cfg) {
    const MeraTensors t = tensors_for(cfg);
    const ConstraintReport rep = check_constraints(t);
    auto os = open_out(a, cfg, "check.csv");
    os << "# tensor,defect,pass\n";
    const std::pair<const char*, double> rows[] = {{"lambda", rep.lambda_defect},
                                                   {"chi", rep.chi_defect},
                                                   {"alpha_l", rep.alpha_l_defect},
                                                   {"alpha_r", rep.alpha_r_defect},
                                                   {"hat", rep.hat_defect}};
    bool ok = true;
    for (const auto& [name, defect] : rows) {
        const bool pass = defect <= cfg.check_tolerance;
        ok = ok && pass;
        os << name << ',' << fmt(defect) << ',' << (pass ? 1 : 0) << "\n";
        if (!pass) std::fprintf(stderr, "constraint failure: %s defect %.3e\n", name, defect);
    }
    return ok ? 0 : 2;
}

int cmd_spectrum(const Args& a, const config::RunConfig& cfg) {
    const MeraTensors t = tensors_for(cfg);
    const BoundaryChannels ch = build_channels(t);
    auto write_one = [&](const Superoperator& s, const std::string& name,
                         const std::string& extra = "") {
        auto os = open_out(a, cfg, "spectrum_" + name + ".csv");
        if (!extra.empty()) os << extra;
        spectral::write_report(spectral::spectrum(s), os);
        if (cfg.dump_maps) {
            auto od = open_out(a, cfg, "superop_" + name + ".txt");
            dump(s, od);
        }
    };
    write_one(ch.dl, "DL");
    write_one(ch.dr, "DR");
    write_one(ch.davg, "D");
    write_one(ch.bl, "BL");
    write_one(ch.br, "BR");
    if (cfg.twopoint) {
        const Superoperator dd = build_twopoint(ch.davg, ch.davg);
        // eigenvalues of the doubled map against pairwise products
        const auto base = linalg::eig_values(ch.davg.mat);
        auto got = linalg::eig_values(dd.mat);
        std::vector<cplx> prod;
        for (const cplx& x : base)
            for (const cplx& y : base) prod.push_back(x * y);
        auto key = [](const cplx& z) {
            return std::make_tuple(-std::abs(z), -z.real(), -z.imag());
        };
        std::sort(prod.begin(), prod.end(),
                  [&](const cplx& x, const cplx& y) { return key(x) < key(y); });
        std::sort(got.begin(), got.end(),
                  [&](const cplx& x, const cplx& y) { return key(x) < key(y); });
        double worst = 0;
        std::vector<char> used(prod.size(), 0);
        for (const cplx& x : got) {
            double best = 1e300;
            size_t bj = 0;
            for (size_t j = 0; j < prod.size(); ++j) {
                if (used[j]) continue;
                const double dd2 = std::abs(x - prod[j]);
                if (dd2 < best) {
                    best = dd2;
                    bj = j;
                }
            }
            used[bj] = 1;
            worst = std::max(worst, best);
        }
        write_one(dd, "DD", "# product_check_max_dist=" + fmt(worst) + "\n");
    }
    return 0;
}

int cmd_profile(const Args& a, const config::RunConfig& cfg) {
    const MeraTensors t = tensors_for(cfg);
    const observables::Engine e(t);
    const LocalOperator theta = make_operator(cfg, e);
    const auto prof = observables::boundary_profile(e, theta, {cfg.k_lo, cfg.k_hi});
    auto os = open_out(a, cfg, "profile.csv");
    os << "# bulk_re=" << fmt(prof.bulk.real()) << " bulk_im=" << fmt(prof.bulk.imag())
       << " exponent=" << fmt(prof.exponent) << " amplitude=" << fmt(prof.amplitude)
       << " residual=" << fmt(prof.residual) << "\n";
    os << "# ell,value_re,value_im,absdev\n";
    for (size_t i = 0; i < prof.ells.size(); ++i)
        os << prof.ells[i] << ',' << fmt(prof.values[i].real()) << ','
           << fmt(prof.values[i].imag()) << ',' << fmt(std::abs(prof.values[i] - prof.bulk))
           << "\n";
    return 0;
}

int cmd_correlator(const Args& a, const config::RunConfig& cfg) {
    const MeraTensors t = tensors_for(cfg);
    const observables::Engine e(t);
    const LocalOperator theta = make_operator(cfg, e);
    const auto prof = observables::correlator_profile(e, theta, {cfg.m_lo, cfg.m_hi});
    auto os = open_out(a, cfg, "correlator.csv");
    os << "# exponent=" << fmt(prof.exponent) << " residual=" << fmt(prof.residual) << "\n";
    os << "# m,separation,value_re,value_im\n";
    for (size_t i = 0; i < prof.ms.size(); ++i)
        os << prof.ms[i] << ',' << (std::int64_t{1} << prof.ms[i]) << ','
           << fmt(prof.values[i].real()) << ',' << fmt(prof.values[i].imag()) << "\n";
    return 0;
}

int cmd_energy(const Args& a, const config::RunConfig& cfg) {
    if (cfg.model != "ising") fail(Errc::InvalidConfig, "unknown model: " + cfg.model);
    const MeraTensors t = tensors_for(cfg);
    const observables::Engine e(t);
    const Hamiltonian3 h = models::ising_h3(cfg.g, cfg.jcoup);
    auto os = open_out(a, cfg, "energy.csv");
    os << "# tau,block_energy,deviation,divergence\n";
    for (int tau = 1; tau <= cfg.tau; ++tau) {
        const double be = observables::block_energy(e, h, tau);
        const auto dev = observables::boundary_energy_deviation(e, h, tau);
        os << tau << ',' << fmt(be) << ',' << fmt(dev.value) << ',' << (dev.divergence ? 1 : 0)
           << "\n";
    }
    return 0;
}

int cmd_optimize(const Args& a, const config::RunConfig& cfg) {
    if (cfg.model != "ising") fail(Errc::InvalidConfig, "unknown model: " + cfg.model);
    const Hamiltonian3 h = models::ising_h3(cfg.g, cfg.jcoup);
    std::vector<double> prior_trace;
    MeraTensors t0;
    if (!cfg.resume.empty()) {
        auto ck = optimizer::load_checkpoint(cfg.resume);
        t0 = std::move(ck.tensors);
        prior_trace = std::move(ck.trace);
    } else if (cfg.warm) {
        t0 = optimizer::warm_start(cfg.mera, models::ising_h2(cfg.g, cfg.jcoup), cfg.epsilon);
    } else {
        t0 = tensors_for(cfg);
    }
    optimizer::OptimizeConfig oc;
    oc.sweeps = cfg.sweeps;
    oc.tol_energy = cfg.tol_energy;
    oc.seed = cfg.mera.seed;
    oc.tau = cfg.opt_tau;
    oc.boundary_weight = cfg.weight;
    oc.hat_depth = cfg.hat_depth;
    oc.which.clear();
    std::string token;
    std::istringstream ws(cfg.which);
    while (std::getline(ws, token, ',')) {
        if (token == "chi") oc.which.push_back(optimizer::TensorClass::Chi);
        else if (token == "lambda") oc.which.push_back(optimizer::TensorClass::Lambda);
        else if (token == "alpha_l") oc.which.push_back(optimizer::TensorClass::AlphaL);
        else if (token == "alpha_r") oc.which.push_back(optimizer::TensorClass::AlphaR);
        else if (token == "hat") oc.which.push_back(optimizer::TensorClass::Hat);
        else fail(Errc::InvalidConfig, "unknown tensor class: " + token);
    }
    const auto r = optimizer::optimize(t0, h, oc);
    std::vector<double> full_trace = prior_trace;
    full_trace.insert(full_trace.end(), r.trace.begin(), r.trace.end());
    const fs::path ckpt = fs::path(a.out_dir) / cfg.checkpoint;
    fs::create_directories(a.out_dir);
    optimizer::save_checkpoint(ckpt.string(), r.tensors, full_trace);
    const auto [bulk, dev] = optimizer::energy_functional(r.tensors, h, cfg.opt_tau);
    auto os = open_out(a, cfg, "optimize_trace.csv");
    os << "# final_bulk=" << fmt(bulk) << " final_deviation=" << fmt(dev)
       << " stalled=" << (r.stalled ? 1 : 0) << " restarts=" << r.restarts << "\n";
    os << "# sweep,objective\n";
    for (size_t i = 0; i < full_trace.size(); ++i)
        os << i + 1 << ',' << fmt(full_trace[i]) << "\n";
    return 0;
}

int cmd_exact(const Args& a, const config::RunConfig& cfg) {
    const MeraTensors t = tensors_for(cfg);
    const int n = cfg.exact_n;
    const BoundaryChannels ch = build_channels(t);
    const TopBlocks top = top_density_matrices(t);
    // channel recursion down to level n
    std::map<std::int64_t, DensityMatrix> triples;
    triples[1] = top.t1;
    triples[2] = top.t2;
    DensityMatrix left = top.left, right = top.right;
    for (int k = 1; k <= n; ++k) {
        std::map<std::int64_t, DensityMatrix> next;
        const std::int64_t nk = std::int64_t{1} << (k + 2);
        DensityMatrix nleft = apply(ch.bl, left);
        DensityMatrix nright = apply(ch.br, right);
        for (std::int64_t j = 1; j <= nk - 2; ++j) {
            if (j == 1) next[j] = apply(ch.kl, left);
            else if (j == nk - 2) next[j] = apply(ch.kr, right);
            else if (j % 2 == 0) next[j] = apply(ch.dl, triples.at(j / 2));
            else next[j] = apply(ch.dr, triples.at((j - 1) / 2));
        }
        triples = std::move(next);
        left = std::move(nleft);
        right = std::move(nright);
    }
    const oracle::ExactBlocks blocks(t, n);
    const std::int64_t nsites = blocks.sites();
    auto os = open_out(a, cfg, "exact.csv");
    os << "# block,discrepancy\n";
    double worst = 0;
    auto diff = [](const DensityMatrix& x, const DensityMatrix& y) {
        Tensor d = x.mat;
        d -= y.mat;
        return d.max_abs();
    };
    for (std::int64_t j = 1; j <= nsites - 2; ++j) {
        const double d = diff(triples.at(j), blocks.triple(j));
        worst = std::max(worst, d);
        os << "t" << j << ',' << fmt(d) << "\n";
    }
    {
        const double d = diff(left, blocks.block({0, 1, 2}));
        worst = std::max(worst, d);
        os << "left," << fmt(d) << "\n";
    }
    {
        const int e = static_cast<int>(nsites);
        const double d = diff(right, blocks.block({e - 1, e, e + 1}));
        worst = std::max(worst, d);
        os << "right," << fmt(d) << "\n";
    }
    os << "# max_discrepancy=" << fmt(worst) << "\n";
    if (worst > cfg.exact_tolerance) {
        std::fprintf(stderr, "oracle mismatch: max discrepancy %.3e\n", worst);
        return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Args a;
    if (argc < 2) {
        usage();
        return 1;
    }
    a.command = argv[1];
    for (int i = 2; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) a.config_path = argv[++i];
        else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) a.out_dir = argv[++i];
        else {
            usage();
            return 1;
        }
    }
    if (a.config_path.empty()) {
        usage();
        return 1;
    }
    try {
        const config::RunConfig cfg = config::parse_config_file(a.config_path);
        if (a.command == "check") return cmd_check(a, cfg);
        if (a.command == "spectrum") return cmd_spectrum(a, cfg);
        if (a.command == "profile") return cmd_profile(a, cfg);
        if (a.command == "correlator") return cmd_correlator(a, cfg);
        if (a.command == "energy") return cmd_energy(a, cfg);
        if (a.command == "optimize") return cmd_optimize(a, cfg);
        if (a.command == "exact") return cmd_exact(a, cfg);
        usage();
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.code()) {
        case Errc::ConstraintViolation: return 2;
        case Errc::NotMixing: return 3;
        case Errc::OracleMismatch: return 4;
        case Errc::BudgetExceeded: return 5;
        default: return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
