// Benchmark comparing the serial reference kernels against the OpenMP path
// on the shapes this project actually runs: dense contractions, permutes,
// channel builds, and the layer-chain sweep.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "bmera/channels.hpp"
#include "bmera/kernels.hpp"
#include "bmera/network.hpp"
#include "bmera/oracle.hpp"
#include "bmera/rng.hpp"
#include "bmera/tensor.hpp"

using namespace bmera;

namespace {

template <typename F> double time_it(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

Tensor random_tensor(Rng& rng, std::vector<std::int64_t> shape) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.cgauss();
    return t;
}

void row(const std::string& name, double serial, double parallel) {
    std::printf("%-32s %10.4fs %10.4fs %8.2fx\n", name.c_str(), serial, parallel,
                serial / parallel);
}

} // namespace

int main() {
    std::printf("threads: %d\n", kernels::thread_count());
    std::printf("%-32s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

    Rng rng(1);
    {
        const std::int64_t n = 512;
        const Tensor a = random_tensor(rng, {n, n});
        const Tensor b = random_tensor(rng, {n, n});
        Tensor c({n, n});
        const double ts = time_it([&] { kernels::gemm(c.data(), a.data(), b.data(), n, n, n, Exec::Serial); });
        const double tp = time_it([&] { kernels::gemm(c.data(), a.data(), b.data(), n, n, n, Exec::Parallel); });
        row("gemm 512x512 complex", ts, tp);
    }
    {
        const Tensor a = random_tensor(rng, {64, 64, 64, 16});
        const std::vector<int> order = {3, 1, 0, 2};
        const double ts = time_it([&] { (void)permute(a, order, Exec::Serial); });
        const double tp = time_it([&] { (void)permute(a, order, Exec::Parallel); });
        row("permute 64x64x64x16", ts, tp);
    }
    {
        MeraConfig cfg;
        cfg.d = 2;
        cfg.m = 2;
        cfg.seed = 7;
        const MeraTensors t = random_isometric(cfg);
        const double ts = time_it([&] {
            set_default_exec(Exec::Serial);
            (void)build_channels(t);
        });
        const double tp = time_it([&] {
            set_default_exec(Exec::Parallel);
            (void)build_channels(t);
        });
        set_default_exec(Exec::Parallel);
        row("build_channels d=2 m=2", ts, tp);
    }
    {
        MeraConfig cfg;
        cfg.d = 2;
        cfg.m = 1;
        cfg.seed = 3;
        const MeraTensors t = random_isometric(cfg);
        const oracle::FullState parent = oracle::build_state(t, 2);
        const oracle::LayerOracle layer(t, parent);
        const std::vector<int> sites = {15, 16, 17};
        const double ts = time_it(
            [&] {
                set_default_exec(Exec::Serial);
                (void)layer.block(sites);
            },
            1);
        const double tp = time_it(
            [&] {
                set_default_exec(Exec::Parallel);
                (void)layer.block(sites);
            },
            1);
        set_default_exec(Exec::Parallel);
        row("layer chain block n=3 m=1", ts, tp);
    }
    return 0;
}
