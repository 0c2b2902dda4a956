#pragma once

#include <vector>

#include "bmera/tensor.hpp"

// Tiny labeled-wire contraction helper. Axes carrying equal labels are
// contracted when two labeled tensors meet; open axes keep their labels.

namespace bmera::labnet {

struct Lab {
    Tensor t;
    std::vector<int> lab;
};

// Contract every shared label between a and b.
Lab contract_shared(const Lab& a, const Lab& b);

// Fold a node list left to right.
Lab contract_all(const std::vector<Lab>& nodes);

// ket (x) conj(ket) with the listed ket axes traced between the two copies;
// remaining axes carry ket_labels then bra_labels.
Lab doubled(const Tensor& ket, const std::vector<int>& ket_labels,
            const std::vector<int>& bra_labels, const std::vector<int>& traced_axes);

// Permute an open result so its axes follow `want` (a label list).
Tensor ordered(const Lab& e, const std::vector<int>& want);

} // namespace bmera::labnet
