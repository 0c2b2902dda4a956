#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bmera/density.hpp"
#include "bmera/network.hpp"
#include "bmera/tensor.hpp"

namespace bmera {

// Linear map on operator space, stored dense. Vectorization is row-major:
// vec(rho)[r*D + c] = rho[r,c], so a map rho -> A rho B^H has matrix
// A (x) conj(B). `mat` has prod(out_dims)^2 rows and prod(in_dims)^2 columns.
struct Superoperator {
    std::string label;
    std::vector<std::int64_t> in_dims, out_dims;
    Tensor mat;

    std::int64_t din() const {
        std::int64_t n = 1;
        for (auto d : in_dims) n *= d;
        return n;
    }
    std::int64_t dout() const {
        std::int64_t n = 1;
        for (auto d : out_dims) n *= d;
        return n;
    }
};

// Descending bulk map (3 coarse sites -> 3 fine sites). Depends only on
// lambda and chi.
Superoperator build_descend(const MeraTensors& t, Side side);

// Boundary-absorbing map: (A,1,2) block -> (1,2,3) sites (and mirror).
Superoperator build_boundary_absorb(const MeraTensors& t, Side side);

// Boundary-stable map: endomorphism of the (A,1,2) block (and mirror).
Superoperator build_boundary_stable(const MeraTensors& t, Side side);

// Four-site descending map used to seed the two-point correlator
// (3 coarse sites -> the even-aligned 4-site fine block).
Superoperator build_descend4(const MeraTensors& t);

Superoperator average_descend(const Superoperator& dl, const Superoperator& dr);

// Two-point map on the doubled operator space: (dl x dl + dr x dr) / 2.
Superoperator build_twopoint(const Superoperator& dl, const Superoperator& dr);

DensityMatrix apply(const Superoperator& s, const DensityMatrix& rho);
Tensor apply_matrix(const Superoperator& s, const Tensor& op);     // raw linear action
Tensor adjoint_apply(const Superoperator& s, const Tensor& obs);   // Heisenberg adjoint
Tensor adjoint_matrix(const Superoperator& s);
Tensor choi(const Superoperator& s);

struct CptReport {
    double choi_min_eig = 0;      // >= -1e-10 for a CP map
    double unitality_defect = 0;  // max-abs of adjoint(I) - I
};
CptReport check_cpt(const Superoperator& s);

void dump(const Superoperator& s, std::ostream& os);

// All channels of one network, built together.
struct BoundaryChannels {
    Superoperator dl, dr, davg, kl, kr, bl, br;
};
BoundaryChannels build_channels(const MeraTensors& t);

} // namespace bmera
