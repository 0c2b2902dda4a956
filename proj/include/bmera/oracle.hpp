#pragma once

#include <memory>
#include <span>

#include "bmera/density.hpp"
#include "bmera/network.hpp"

// Brute-force ground truth: the full pure state from contracting the entire
// network, exact partial traces, exact expectation values. Site references:
// 0 = left ancilla, 1..N = physical sites, N+1 = right ancilla.

namespace bmera::oracle {

inline constexpr std::int64_t kDefaultAmplitudeBudget = std::int64_t{1} << 28;

struct FullState {
    Tensor amps; // axes [a, s1..sN, a']
    int n = 0;
    std::int64_t d = 0, m = 0;

    std::int64_t sites() const { return std::int64_t{1} << (n + 2); }
    double norm() const { return amps.frobenius_norm(); }
};

FullState build_state(const MeraTensors& t, int n,
                      std::int64_t amplitude_budget = kDefaultAmplitudeBudget);

DensityMatrix reduced_dm(const FullState& s, std::span<const int> sites);
DensityMatrix reduced_dm(const FullState& s, std::initializer_list<int> sites);

// Exact expectation of a 3-site observable at sites (ell, ell+1, ell+2).
cplx exact_expectation(const FullState& s, const Tensor& theta3, std::int64_t ell);

// Exact connected correlator of two 3-site observables at ell and ellp
// (supports must not overlap).
cplx exact_correlator(const FullState& s, const Tensor& theta3, std::int64_t ell,
                      std::int64_t ellp);

// Exact reduced blocks one layer below a dense parent state, contracted as a
// transfer chain across the added layer; memory stays near the parent size.
// Makes level n reachable when the dense level-n state would not fit.
class LayerOracle {
  public:
    LayerOracle(const MeraTensors& t, FullState parent);
    DensityMatrix block(std::span<const int> sites) const; // ascending site refs
    int level() const { return parent_.n + 1; }

  private:
    FullState parent_;
    std::int64_t d_, m_, msites_;
    Tensor dl_, gx_, gal_, gar_;
};

// Facade picking the dense state or the layer chain for level n.
class ExactBlocks {
  public:
    ExactBlocks(const MeraTensors& t, int n,
                std::int64_t amplitude_budget = kDefaultAmplitudeBudget);
    DensityMatrix block(std::span<const int> sites) const;
    DensityMatrix block(std::initializer_list<int> sites) const;
    DensityMatrix triple(std::int64_t ell) const; // (ell, ell+1, ell+2)
    bool dense() const { return state_ != nullptr; }
    const FullState* state() const { return state_.get(); }
    std::int64_t sites() const { return std::int64_t{1} << (n_ + 2); }

  private:
    int n_;
    std::unique_ptr<FullState> state_;
    std::unique_ptr<LayerOracle> layer_;
};

// Oracle-averaged 3-site density matrix over all triples of level n.
DensityMatrix averaged_rho3(const ExactBlocks& blocks);

} // namespace bmera::oracle
