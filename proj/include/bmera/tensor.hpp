#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "bmera/common.hpp"

namespace bmera {

// Dense complex tensor, row-major linearization (last index fastest).
// Values are immutable by convention once a tensor leaves its builder;
// all operations below return fresh tensors.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<std::int64_t> shape);
    Tensor(std::vector<std::int64_t> shape, std::vector<cplx> data);

    static Tensor scalar(cplx v);
    static Tensor identity(std::int64_t n);

    int rank() const { return static_cast<int>(shape_.size()); }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::int64_t dim(int axis) const;

    const cplx* data() const { return data_.data(); }
    cplx* data() { return data_.data(); }
    cplx operator[](std::int64_t i) const { return data_[i]; }
    cplx& operator[](std::int64_t i) { return data_[i]; }

    cplx at(std::span<const std::int64_t> idx) const;
    cplx& at(std::span<const std::int64_t> idx);
    cplx at(std::initializer_list<std::int64_t> idx) const {
        return at(std::span<const std::int64_t>(idx.begin(), idx.size()));
    }
    cplx& at(std::initializer_list<std::int64_t> idx) {
        return at_ref(std::span<const std::int64_t>(idx.begin(), idx.size()));
    }
    cplx& at_ref(std::span<const std::int64_t> idx);

    // Metadata-only reshape; the linearized data is untouched.
    Tensor reshaped(std::vector<std::int64_t> shape) const;

    Tensor conjugate() const;

    Tensor& operator+=(const Tensor& o);
    Tensor& operator-=(const Tensor& o);
    Tensor& operator*=(cplx s);

    double max_abs() const;
    double frobenius_norm() const;

  private:
    std::vector<std::int64_t> shape_;
    std::vector<cplx> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(cplx s, Tensor a);

using AxisPair = std::pair<int, int>;

// Sum over paired axes; result carries the unpaired axes of `a` followed by
// the unpaired axes of `b` (in their original order).
Tensor contract(const Tensor& a, const Tensor& b, std::span<const AxisPair> pairs,
                Exec exec = default_exec());
Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<AxisPair> pairs,
                Exec exec = default_exec());

// Result axis i enumerates input axis order[i].
Tensor permute(const Tensor& a, std::span<const int> order, Exec exec = default_exec());
Tensor permute(const Tensor& a, std::initializer_list<int> order, Exec exec = default_exec());

Tensor outer(const Tensor& a, const Tensor& b, Exec exec = default_exec());

// Matrix helpers (rank-2 tensors).
Tensor matmul(const Tensor& a, const Tensor& b, Exec exec = default_exec());
Tensor dagger(const Tensor& m);
cplx mat_trace(const Tensor& m);
Tensor kron(const Tensor& a, const Tensor& b); // standard Kronecker product of matrices

// Contract a gate into `state`. The gate has rank 2*k with axes
// (out_1..out_k, in_1..in_k); in_j is contracted against state axis axes[j]
// and out_j takes its place, preserving the state's axis order.
Tensor apply_gate(const Tensor& state, const Tensor& gate, std::span<const int> axes,
                  Exec exec = default_exec());
Tensor apply_gate(const Tensor& state, const Tensor& gate, std::initializer_list<int> axes,
                  Exec exec = default_exec());

} // namespace bmera
