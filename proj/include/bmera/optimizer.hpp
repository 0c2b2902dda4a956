#pragma once

#include <string>
#include <vector>

#include "bmera/density.hpp"
#include "bmera/network.hpp"

namespace bmera::optimizer {

enum class TensorClass { Chi, Lambda, AlphaL, AlphaR, Hat };

struct OptimizeConfig {
    int sweeps = 50;
    std::vector<TensorClass> which = {TensorClass::Chi, TensorClass::Lambda,
                                      TensorClass::AlphaL, TensorClass::AlphaR};
    double tol_energy = 1e-9;
    std::uint64_t seed = 0;    // base seed for restarts after NotMixing
    int tower_layers = 6;      // descending layers in the bulk gradient tower
    int boundary_tower = 3;    // boundary-map layers in the edge gradient tower
    // weight of the two edge deviations in the cost; negative selects the
    // per-site normalization 1 / (2 (2^tau - 1)) that keeps the bulk term
    // dominant (a raw unit weight lets the edge term swamp the bulk)
    double boundary_weight = -1.0;
    int inner_iterations = 2;  // linearize-and-project passes per sweep
    int tau = 4;               // block size 2^tau - 1 for the edge deviation
    int hat_depth = 2;         // finite-size depth for the hat objective
};

struct OptimizeResult {
    MeraTensors tensors;
    std::vector<double> trace; // objective after each sweep
    bool stalled = false;
    int restarts = 0;
};

// (bulk energy density, boundary energy deviation at tau)
std::pair<double, double> energy_functional(const MeraTensors& t, const Hamiltonian3& h,
                                            int tau = 4);

// Variational sweep optimization: each selected tensor is replaced by the
// polar isometry of minus its linear environment in the cost, with uphill
// moves rejected.
OptimizeResult optimize(const MeraTensors& t0, const Hamiltonian3& h, const OptimizeConfig& cfg);

// Physically motivated start: the renormalizer projects onto the lowest
// two-site eigenstates of h2, the unitaries sit near the identity, all
// perturbed by a seeded rotation of strength epsilon.
MeraTensors warm_start(const MeraConfig& config, const Tensor& h2, double epsilon = 0.3);

struct Checkpoint {
    MeraTensors tensors;
    std::vector<double> trace;
};
void save_checkpoint(const std::string& path, const MeraTensors& t,
                     const std::vector<double>& trace);
Checkpoint load_checkpoint(const std::string& path);

} // namespace bmera::optimizer
