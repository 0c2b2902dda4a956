#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "bmera/channels.hpp"
#include "bmera/density.hpp"

namespace bmera::spectral {

struct SpectrumReport {
    std::string label;
    std::vector<cplx> eigenvalues;                 // descending modulus
    std::vector<std::optional<double>> exponents;  // -log2|k| where |k| < 1 - 1e-12
    bool mixing = false;                           // exactly one modulus >= 1 - 1e-9
    double gap = 0.0;                              // 1 - |k_2|
    bool defective = false;                        // eigenbasis condition > 1e8
    std::optional<DensityMatrix> fixed_point;      // present when mixing
};

SpectrumReport spectrum(const Superoperator& s);
void write_report(const SpectrumReport& r, std::ostream& os);

enum class FixedPointMethod { Eig, Power };

DensityMatrix fixed_point(const Superoperator& s, FixedPointMethod method = FixedPointMethod::Eig,
                          double tol = 1e-12, int max_iter = 100000);

struct ScalingOperator {
    Tensor op;        // unit Hilbert-Schmidt norm, Tr[op rho_f] ~ 0
    cplx eigenvalue;
    double exponent;  // -log2|eigenvalue|
    bool degenerate = false;
};

// The `count` leading eigenoperators of the Heisenberg adjoint with
// modulus < 1. Degenerate groups are flagged; within a group the returned
// operators are an arbitrary basis of the subspace.
std::vector<ScalingOperator> scaling_operators(const Superoperator& s, int count);

} // namespace bmera::spectral
