#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "bmera/common.hpp"

namespace bmera {

// Deterministic Gaussian source. Box-Muller is hand-rolled because the
// distribution adapters in <random> are not bit-reproducible across
// standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { // in [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586476925287 * u2);
        have_spare_ = true;
        return r * std::cos(6.283185307179586476925287 * u2);
    }

    cplx cgauss() {
        const double re = gauss();
        const double im = gauss();
        return {re, im};
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bmera
