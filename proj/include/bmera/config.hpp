#pragma once

#include <cstdint>
#include <string>

#include "bmera/network.hpp"

namespace bmera::config {

// One structured-text config file drives every command; unknown sections or
// keys are rejected so a run is reproducible from the file alone.
struct RunConfig {
    MeraConfig mera; // [run] d, m, n, seed, independent_boundaries

    // [check]
    double check_tolerance = 1e-10;
    std::string tensors_path; // load instead of drawing random tensors

    // [spectrum]
    bool dump_maps = false;
    bool twopoint = true;

    // [operator]
    std::string op_type = "random_hermitian"; // identity|pauli|scaling|random_hermitian
    std::string op_pauli = "XXX";
    int op_index = 0;
    std::uint64_t op_seed = 1;

    // [profile]
    int k_lo = 3, k_hi = 10;

    // [correlator]
    int m_lo = 1, m_hi = 6;

    // [energy]
    int tau = 4;
    std::string model = "ising";
    double g = 1.0, jcoup = 1.0;

    // [optimize]
    int sweeps = 50;
    double tol_energy = 1e-9;
    std::string which = "chi,lambda,alpha_l,alpha_r";
    int opt_tau = 4;
    double weight = -1.0;
    bool warm = true;
    double epsilon = 0.35;
    int hat_depth = 2;
    std::string checkpoint = "optimize.ckpt";
    std::string resume;

    // [exact]
    int exact_n = 2;
    double exact_tolerance = 1e-8;

    std::uint64_t hash = 0; // FNV-1a of the raw config bytes
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

std::string hash_hex(std::uint64_t h);

} // namespace bmera::config
