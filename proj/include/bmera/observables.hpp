#pragma once

#include <optional>
#include <vector>

#include "bmera/channels.hpp"
#include "bmera/density.hpp"
#include "bmera/spectral.hpp"

namespace bmera::observables {

// Descent step kinds, applied top to bottom when evaluating finite sizes.
enum class Step { DL, DR, KL, KR, BL, BR };
enum class BaseBlock { Left, T1, T2, Right };

// Unique map path from the hat base case down to the 3-site block
// (ell, ell+1, ell+2) at level n. `steps` is ordered top to bottom.
struct DescentPath {
    BaseBlock base;
    std::vector<Step> steps;
};
DescentPath resolve_path(int n, std::int64_t ell);

// Channels, top blocks and fixed points of one network, built once and
// shared across evaluations.
class Engine {
  public:
    explicit Engine(const MeraTensors& t);
    const MeraTensors& tensors() const { return tensors_; }
    const BoundaryChannels& channels() const { return channels_; }
    const TopBlocks& top() const;
    const DensityMatrix& bulk_fixed_point() const;      // of the averaged descend
    const DensityMatrix& boundary_fixed_point() const;  // of B_L
    const Superoperator& twopoint() const;              // tensor square of the average

  private:
    MeraTensors tensors_;
    BoundaryChannels channels_;
    mutable std::optional<TopBlocks> top_;
    mutable std::optional<DensityMatrix> rho_f3_, rho_fb_;
    mutable std::optional<Superoperator> twopoint_;
};

cplx local_average_finite(const Engine& e, const LocalOperator& theta, std::int64_t ell, int n);
cplx local_average_infinite(const Engine& e, const LocalOperator& theta, std::int64_t ell);

struct FitWindow {
    int k_lo = 3;
    int k_hi = 10;
};

struct ProfileResult {
    std::vector<std::int64_t> ells; // dyadic distances 2^k, k = 0..k_hi
    std::vector<cplx> values;
    cplx bulk;
    double exponent = 0;  // from the least-squares slope over the window
    double amplitude = 0;
    double residual = 0;  // rms in log2 space
};
ProfileResult boundary_profile(const Engine& e, const LocalOperator& theta, FitWindow w = {});

cplx bulk_correlator(const Engine& e, const LocalOperator& theta, int m);

struct CorrelatorResult {
    std::vector<int> ms; // separations 2^m
    std::vector<cplx> values;
    double exponent = 0;
    double residual = 0;
};
CorrelatorResult correlator_profile(const Engine& e, const LocalOperator& theta,
                                    FitWindow w = {1, 6});

double block_energy(const Engine& e, const Hamiltonian3& h, int tau);

struct DeviationReport {
    double value = 0;
    bool divergence = false;
    double kappa_one_component = 0;     // must vanish for a traceless seed
    std::vector<cplx> kappas;           // eigenvalues of the averaged descend
    std::vector<double> component_norms;
    bool used_fallback = false;         // ill-conditioned eigenbasis path
};
DeviationReport boundary_energy_deviation(const Engine& e, const Hamiltonian3& h, int tau);

// Deviation sum for an explicit traceless seed; boundary_energy_deviation
// uses seed = K_L(rho_f_B) - rho_f3.
DeviationReport deviation_from_seed(const Superoperator& davg, const Hamiltonian3& h,
                                    const Tensor& seed, int tau);

// Traceless seed of the two-point formula: the unit-shift embedding of the
// descended 4-site fixed block minus the factorized bulk block.
Tensor twopoint_seed(const Engine& e);

// Operator embedding with a one-site shift: sigma on 3+3 virtual sites such
// that Tr[(A (x) B) sigma] = Tr[A_{123} B_{234} rho4] for all A, B.
Tensor shift_embed(const Tensor& rho4, std::int64_t d);

} // namespace bmera::observables
