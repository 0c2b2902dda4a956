#pragma once

#include "bmera/density.hpp"

namespace bmera::models {

Tensor pauli(char which); // 'I', 'X', 'Y', 'Z'

// Transverse-field Ising chain H = -J sum sx sx - g sum sz, embedded as a
// three-site term H3 = (h (x) I + I (x) h)/2 with the field split evenly
// across the two-site term. Tr[H3 rho3] is then the bulk energy per site.
Hamiltonian3 ising_h3(double g = 1.0, double j = 1.0);
Tensor ising_h2(double g = 1.0, double j = 1.0); // the two-site term

// Open-chain ground energy from the free-fermion solution
// (quadratic form diagonalized through the singular values of A + B).
double ising_open_ground_energy(int nsites, double g = 1.0, double j = 1.0);

// Independent cross-check: Lanczos on the 2^n many-body Hamiltonian.
double ising_open_ground_energy_ed(int nsites, double g = 1.0, double j = 1.0);

} // namespace bmera::models
