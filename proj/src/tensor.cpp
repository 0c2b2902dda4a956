#include "bmera/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmera/kernels.hpp"

namespace bmera {

namespace {
std::int64_t shape_product(std::span<const std::int64_t> shape) {
    std::int64_t n = 1;
    for (auto d : shape) {
        if (d <= 0) fail(Errc::DimensionMismatch, "tensor dimensions must be positive");
        n *= d;
    }
    return n;
}
} // namespace

Tensor::Tensor(std::vector<std::int64_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), cplx{}) {}

Tensor::Tensor(std::vector<std::int64_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != static_cast<std::int64_t>(data_.size()))
        fail(Errc::DimensionMismatch, "data size does not match shape");
}

Tensor Tensor::scalar(cplx v) { return Tensor({}, {v}); }

Tensor Tensor::identity(std::int64_t n) {
    Tensor t({n, n});
    for (std::int64_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
    return t;
}

std::int64_t Tensor::dim(int axis) const {
    if (axis < 0 || axis >= rank()) fail(Errc::AxisOutOfRange, "axis out of range");
    return shape_[axis];
}

cplx Tensor::at(std::span<const std::int64_t> idx) const {
    return const_cast<Tensor*>(this)->at_ref(idx);
}

cplx& Tensor::at(std::span<const std::int64_t> idx) { return at_ref(idx); }

cplx& Tensor::at_ref(std::span<const std::int64_t> idx) {
    if (static_cast<int>(idx.size()) != rank()) fail(Errc::AxisOutOfRange, "index rank mismatch");
    std::int64_t lin = 0;
    for (int i = 0; i < rank(); ++i) {
        if (idx[i] < 0 || idx[i] >= shape_[i]) fail(Errc::AxisOutOfRange, "index out of range");
        lin = lin * shape_[i] + idx[i];
    }
    return data_[lin];
}

Tensor Tensor::reshaped(std::vector<std::int64_t> shape) const {
    if (shape_product(shape) != size())
        fail(Errc::DimensionMismatch, "reshape must preserve element count");
    return Tensor(std::move(shape), data_);
}

Tensor Tensor::conjugate() const {
    Tensor r(shape_, data_);
    for (auto& v : r.data_) v = std::conj(v);
    return r;
}

Tensor& Tensor::operator+=(const Tensor& o) {
    if (shape_ != o.shape_) fail(Errc::DimensionMismatch, "shape mismatch in +=");
    for (std::int64_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
    if (shape_ != o.shape_) fail(Errc::DimensionMismatch, "shape mismatch in -=");
    for (std::int64_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

double Tensor::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Tensor::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(cplx s, Tensor a) { return a *= s; }

Tensor contract(const Tensor& a, const Tensor& b, std::span<const AxisPair> pairs, Exec exec) {
    const int ra = a.rank(), rb = b.rank();
    std::vector<char> used_a(ra, 0), used_b(rb, 0);
    for (const auto& [pa, pb] : pairs) {
        if (pa < 0 || pa >= ra || pb < 0 || pb >= rb)
            fail(Errc::AxisOutOfRange, "contract: axis out of range");
        if (used_a[pa] || used_b[pb]) fail(Errc::AxisOutOfRange, "contract: axis paired twice");
        used_a[pa] = used_b[pb] = 1;
        if (a.dim(pa) != b.dim(pb))
            fail(Errc::DimensionMismatch, "contract: paired dimensions differ");
    }

    std::vector<int> free_a, free_b, perm_a, perm_b;
    for (int i = 0; i < ra; ++i)
        if (!used_a[i]) free_a.push_back(i);
    for (int i = 0; i < rb; ++i)
        if (!used_b[i]) free_b.push_back(i);
    perm_a = free_a;
    for (const auto& [pa, pb] : pairs) perm_a.push_back(pa);
    for (const auto& [pa, pb] : pairs) perm_b.push_back(pb);
    for (int i : free_b) perm_b.push_back(i);

    std::int64_t m = 1, k = 1, n = 1;
    std::vector<std::int64_t> out_shape;
    for (int i : free_a) {
        m *= a.dim(i);
        out_shape.push_back(a.dim(i));
    }
    for (const auto& [pa, pb] : pairs) k *= a.dim(pa);
    for (int i : free_b) {
        n *= b.dim(i);
        out_shape.push_back(b.dim(i));
    }

    const Tensor pa_t = permute(a, perm_a, exec);
    const Tensor pb_t = permute(b, perm_b, exec);
    Tensor out(std::move(out_shape));
    kernels::gemm(out.data(), pa_t.data(), pb_t.data(), m, n, k, exec);
    return out;
}

Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<AxisPair> pairs,
                Exec exec) {
    return contract(a, b, std::span<const AxisPair>(pairs.begin(), pairs.size()), exec);
}

Tensor permute(const Tensor& a, std::span<const int> order, Exec exec) {
    const int r = a.rank();
    if (static_cast<int>(order.size()) != r)
        fail(Errc::InvalidPermutation, "permute: order length mismatch");
    std::vector<char> seen(r, 0);
    for (int i : order) {
        if (i < 0 || i >= r || seen[i]) fail(Errc::InvalidPermutation, "permute: not a permutation");
        seen[i] = 1;
    }
    bool trivial = true;
    for (int i = 0; i < r; ++i) trivial = trivial && order[i] == i;
    if (trivial) return a;

    std::vector<std::int64_t> out_shape(r);
    for (int i = 0; i < r; ++i) out_shape[i] = a.dim(order[i]);
    Tensor out(std::move(out_shape));
    kernels::permute_copy(out.data(), a.data(), a.shape(), order, exec);
    return out;
}

Tensor permute(const Tensor& a, std::initializer_list<int> order, Exec exec) {
    return permute(a, std::span<const int>(order.begin(), order.size()), exec);
}

Tensor outer(const Tensor& a, const Tensor& b, Exec exec) {
    return contract(a, b, std::span<const AxisPair>{}, exec);
}

Tensor matmul(const Tensor& a, const Tensor& b, Exec exec) {
    if (a.rank() != 2 || b.rank() != 2) fail(Errc::DimensionMismatch, "matmul: rank-2 required");
    return contract(a, b, {{1, 0}}, exec);
}

Tensor dagger(const Tensor& m) {
    if (m.rank() != 2) fail(Errc::DimensionMismatch, "dagger: rank-2 required");
    return permute(m, {1, 0}).conjugate();
}

cplx mat_trace(const Tensor& m) {
    if (m.rank() != 2 || m.dim(0) != m.dim(1)) fail(Errc::DimensionMismatch, "trace: square required");
    cplx t{};
    const std::int64_t n = m.dim(0);
    for (std::int64_t i = 0; i < n; ++i) t += m[i * n + i];
    return t;
}

Tensor kron(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) fail(Errc::DimensionMismatch, "kron: rank-2 required");
    Tensor t = outer(a, b); // axes (i, j, k, l) -> value a[i,j] b[k,l]
    t = permute(t, {0, 2, 1, 3});
    return t.reshaped({a.dim(0) * b.dim(0), a.dim(1) * b.dim(1)});
}

Tensor apply_gate(const Tensor& state, const Tensor& gate, std::span<const int> axes, Exec exec) {
    const int k = static_cast<int>(axes.size());
    if (gate.rank() != 2 * k) fail(Errc::DimensionMismatch, "apply_gate: gate rank mismatch");
    std::vector<AxisPair> pairs(k);
    for (int j = 0; j < k; ++j) pairs[j] = {axes[j], k + j};
    // contract: result axes = (state free axes in order, gate out axes).
    Tensor r = contract(state, gate, pairs, exec);
    // Move gate outputs back to the original axis positions.
    const int rs = state.rank();
    std::vector<int> order(rs);
    std::vector<char> is_gate_axis(rs, 0);
    for (int j = 0; j < k; ++j) is_gate_axis[axes[j]] = 1;
    int free_pos = 0;
    std::vector<int> gate_slot(rs, -1);
    for (int j = 0; j < k; ++j) gate_slot[axes[j]] = rs - k + j;
    for (int i = 0; i < rs; ++i) order[i] = is_gate_axis[i] ? gate_slot[i] : free_pos++;
    return permute(r, order, exec);
}

Tensor apply_gate(const Tensor& state, const Tensor& gate, std::initializer_list<int> axes,
                  Exec exec) {
    return apply_gate(state, gate, std::span<const int>(axes.begin(), axes.size()), exec);
}

} // namespace bmera
