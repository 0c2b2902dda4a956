#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bmera/density.hpp"
#include "bmera/tensor.hpp"

namespace bmera {

enum class Side { Left, Right };

struct MeraConfig {
    std::int64_t d = 2; // local site dimension
    std::int64_t m = 2; // ancilla dimension
    int n = 2;          // depth; finite-size system has N = 2^(n+2) sites
    std::uint64_t seed = 0;
    bool independent_boundaries = false; // draw alpha_r separately from alpha_l

    std::int64_t sites() const { return std::int64_t{1} << (n + 2); }
    void validate() const;
};

// The uniform structural elements. Index conventions (upper = coarse side):
//   lambda  (d,d,d)      lambda^{u}_{l1,l2}
//   chi     (d,d,d,d)    chi^{u1,u2}_{l1,l2}
//   alpha_* (m,d,m,d)    alpha^{u1,u2}_{l1,l2}, u1/l1 ancilla-sided
//   hat     (m,d,d,d,d,m) C_{a,l1,l2,l3,l4,a'}
struct MeraTensors {
    MeraConfig config;
    Tensor chi, lambda, alpha_l, alpha_r, hat;
};

// Seeded isometric/unitary initialization; deterministic per seed.
MeraTensors random_isometric(const MeraConfig& config);

struct ConstraintReport {
    double lambda_defect = 0, chi_defect = 0, alpha_l_defect = 0, alpha_r_defect = 0,
           hat_defect = 0;
    double max_defect() const;
    bool pass(double tol = 1e-10) const { return max_defect() <= tol; }
};
ConstraintReport check_constraints(const MeraTensors& t);

// Reduced density matrices of the six-leg top state: (A,1,2), (1,2,3),
// (2,3,4), (3,4,A'). These are the base case of the finite-size recursion.
struct TopBlocks {
    DensityMatrix left, t1, t2, right;
};
TopBlocks top_density_matrices(const MeraTensors& t, double tol = 1e-8);

// Descending-direction gate views (generative, coarse to fine):
//   descend_lambda: [f1, f2; c]           entries lambda^{c}_{f1,f2}
//   descend_chi:    [l1, l2; u1, u2]      entries chi^{u1,u2}_{l1,l2}
//   descend_alpha:  [la, ls; ua, us]      entries alpha^{ua,us}_{la,ls}
// Each is an exact isometry/unitary when the constraints hold.
Tensor descend_lambda(const MeraTensors& t);
Tensor descend_chi(const MeraTensors& t);
Tensor descend_alpha(const MeraTensors& t, Side side);

// Spatially mirrored network: value-preserving under site reversal.
MeraTensors mirrored(const MeraTensors& t);

// Binary container round-trip (bit-exact).
void save_tensors(const MeraTensors& t, const std::string& path);
MeraTensors load_tensors(const std::string& path);
void write_tensors(const MeraTensors& t, std::ostream& os);
MeraTensors read_tensors(std::istream& is);

} // namespace bmera
