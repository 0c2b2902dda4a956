#include "bmera/channels.hpp"

#include <ostream>

#include "bmera/linalg.hpp"

namespace bmera {

namespace {

// W carries the generative layer fragment as an isometry: axes are
// [fine outputs..., inputs...]. The channel keeps `kept` outputs, traces the
// rest, so S[(k,k'),(c,c')] = sum_tr W[k,tr,c] conj(W[k',tr,c']).
Superoperator superop_from_isometry(const Tensor& w, std::vector<int> kept,
                                    std::vector<int> traced, int in_rank,
                                    std::vector<std::int64_t> in_dims,
                                    std::vector<std::int64_t> out_dims, std::string label) {
    std::vector<AxisPair> pairs;
    pairs.reserve(traced.size());
    for (int ax : traced) pairs.push_back({ax, ax});
    Tensor s = contract(w, w.conjugate(), pairs);
    // Free axes of each factor are [kept..., in...] in ascending order
    // (outputs precede inputs in w), so s has axes [k, c, k', c'].
    const int nk = static_cast<int>(kept.size());
    std::vector<int> order;
    for (int i = 0; i < nk; ++i) order.push_back(i);
    for (int i = 0; i < nk; ++i) order.push_back(nk + in_rank + i);
    for (int i = 0; i < in_rank; ++i) order.push_back(nk + i);
    for (int i = 0; i < in_rank; ++i) order.push_back(nk + in_rank + nk + i);
    s = permute(s, order);
    std::int64_t di = 1, dout = 1;
    for (auto d : in_dims) di *= d;
    for (auto d : out_dims) dout *= d;
    return {std::move(label), std::move(in_dims), std::move(out_dims),
            s.reshaped({dout * dout, di * di})};
}

void require_constraints(const MeraTensors& t) {
    if (!check_constraints(t).pass(1e-8))
        fail(Errc::ConstraintViolation, "network constraints violated beyond 1e-8");
}

// Bulk layer fragment: three renormalizers and the two disentanglers inside
// the causal cone. Axes [f1..f6, c1, c2, c3]; f1..f6 are the fine sites
// (2l-1 .. 2l+4) when the input triple sits at coarse sites (l, l+1, l+2).
Tensor bulk_fragment(const MeraTensors& t) {
    const Tensor dl = descend_lambda(t);
    const Tensor gx = descend_chi(t);
    Tensor w = outer(outer(dl, dl), dl); // [p1 v1 c1 p2 v2 c2 p3 v3 c3]
    w = permute(w, {0, 1, 3, 4, 6, 7, 2, 5, 8});
    w = apply_gate(w, gx, {1, 2});
    w = apply_gate(w, gx, {3, 4});
    return w;
}

// Left boundary fragment: alpha, two renormalizers, one disentangler.
// Axes [a, f1, f2, f3, f4, a_in, c1, c2].
Tensor left_fragment(const MeraTensors& t) {
    const Tensor dl = descend_lambda(t);
    const Tensor gx = descend_chi(t);
    const Tensor ga = descend_alpha(t, Side::Left);
    const Tensor im = Tensor::identity(t.config.m);
    Tensor w = outer(outer(im, dl), dl); // [x y p1 v1 c1 p2 v2 c2]
    w = permute(w, {0, 2, 3, 5, 6, 1, 4, 7});
    w = apply_gate(w, ga, {0, 1});
    w = apply_gate(w, gx, {2, 3});
    return w;
}

// Right boundary fragment, mirror wiring. Axes
// [g1, g2, g3, g4, a', c1, c2, a_in'] with (g1..g4) the last four fine sites.
Tensor right_fragment(const MeraTensors& t) {
    const Tensor dl = descend_lambda(t);
    const Tensor gx = descend_chi(t);
    const Tensor ga = descend_alpha(t, Side::Right);
    const Tensor im = Tensor::identity(t.config.m);
    Tensor w = outer(outer(dl, dl), im); // [p1 v1 c1 p2 v2 c2 x y]
    w = permute(w, {0, 1, 3, 4, 6, 2, 5, 7});
    w = apply_gate(w, ga, {4, 3});
    w = apply_gate(w, gx, {1, 2});
    return w;
}

} // namespace

Superoperator build_descend(const MeraTensors& t, Side side) {
    require_constraints(t);
    const auto d = t.config.d;
    const Tensor w = bulk_fragment(t);
    if (side == Side::Left)
        return superop_from_isometry(w, {1, 2, 3}, {0, 4, 5}, 3, {d, d, d}, {d, d, d}, "DL");
    return superop_from_isometry(w, {2, 3, 4}, {0, 1, 5}, 3, {d, d, d}, {d, d, d}, "DR");
}

Superoperator build_descend4(const MeraTensors& t) {
    require_constraints(t);
    const auto d = t.config.d;
    const Tensor w = bulk_fragment(t);
    return superop_from_isometry(w, {1, 2, 3, 4}, {0, 5}, 3, {d, d, d}, {d, d, d, d}, "D4");
}

Superoperator build_boundary_absorb(const MeraTensors& t, Side side) {
    require_constraints(t);
    const auto d = t.config.d, m = t.config.m;
    if (side == Side::Left) {
        const Tensor w = left_fragment(t);
        return superop_from_isometry(w, {1, 2, 3}, {0, 4}, 3, {m, d, d}, {d, d, d}, "KL");
    }
    const Tensor w = right_fragment(t);
    return superop_from_isometry(w, {1, 2, 3}, {0, 4}, 3, {d, d, m}, {d, d, d}, "KR");
}

Superoperator build_boundary_stable(const MeraTensors& t, Side side) {
    require_constraints(t);
    const auto d = t.config.d, m = t.config.m;
    if (side == Side::Left) {
        const Tensor w = left_fragment(t);
        return superop_from_isometry(w, {0, 1, 2}, {3, 4}, 3, {m, d, d}, {m, d, d}, "BL");
    }
    const Tensor w = right_fragment(t);
    return superop_from_isometry(w, {2, 3, 4}, {0, 1}, 3, {d, d, m}, {d, d, m}, "BR");
}

Superoperator average_descend(const Superoperator& dl, const Superoperator& dr) {
    if (dl.in_dims != dr.in_dims || dl.out_dims != dr.out_dims)
        fail(Errc::DimensionMismatch, "average_descend: dimension mismatch");
    Tensor m = dl.mat + dr.mat;
    m *= 0.5;
    return {"D", dl.in_dims, dl.out_dims, std::move(m)};
}

Superoperator build_twopoint(const Superoperator& dl, const Superoperator& dr) {
    if (dl.in_dims != dr.in_dims || dl.out_dims != dr.out_dims)
        fail(Errc::DimensionMismatch, "build_twopoint: dimension mismatch");
    const std::int64_t di = dl.din(), dout = dl.dout();
    auto square = [&](const Superoperator& s) {
        const Tensor s4 = s.mat.reshaped({dout, dout, di, di});
        Tensor t = outer(s4, s4); // [o1 o1' i1 i1' o2 o2' i2 i2']
        t = permute(t, {0, 4, 1, 5, 2, 6, 3, 7});
        return t.reshaped({dout * dout * dout * dout, di * di * di * di});
    };
    Tensor m = square(dl) + square(dr);
    m *= 0.5;
    std::vector<std::int64_t> in2 = dl.in_dims, out2 = dl.out_dims;
    in2.insert(in2.end(), dl.in_dims.begin(), dl.in_dims.end());
    out2.insert(out2.end(), dl.out_dims.begin(), dl.out_dims.end());
    return {"DD", std::move(in2), std::move(out2), std::move(m)};
}

Tensor apply_matrix(const Superoperator& s, const Tensor& op) {
    const std::int64_t di = s.din(), dout = s.dout();
    if (op.rank() != 2 || op.dim(0) != di || op.dim(1) != di)
        fail(Errc::DimensionMismatch, "apply: operator dimension mismatch");
    Tensor v = contract(s.mat, op.reshaped({di * di, 1}), {{1, 0}});
    return v.reshaped({dout, dout});
}

DensityMatrix apply(const Superoperator& s, const DensityMatrix& rho) {
    if (!rho.site_dims.empty() && rho.site_dims != s.in_dims)
        fail(Errc::DimensionMismatch, "apply: site dimensions mismatch");
    return {apply_matrix(s, rho.mat), s.out_dims, {}};
}

Tensor adjoint_matrix(const Superoperator& s) {
    const std::int64_t di = s.din(), dout = s.dout();
    Tensor adj({di * di, dout * dout});
    for (std::int64_t a = 0; a < di; ++a)
        for (std::int64_t b = 0; b < di; ++b)
            for (std::int64_t i = 0; i < dout; ++i)
                for (std::int64_t j = 0; j < dout; ++j)
                    adj[(a * di + b) * dout * dout + i * dout + j] =
                        s.mat[(j * dout + i) * di * di + (b * di + a)];
    return adj;
}

Tensor adjoint_apply(const Superoperator& s, const Tensor& obs) {
    const std::int64_t di = s.din(), dout = s.dout();
    if (obs.rank() != 2 || obs.dim(0) != dout || obs.dim(1) != dout)
        fail(Errc::DimensionMismatch, "adjoint_apply: observable dimension mismatch");
    Tensor out({di, di});
    for (std::int64_t a = 0; a < di; ++a)
        for (std::int64_t b = 0; b < di; ++b) {
            cplx acc{};
            for (std::int64_t i = 0; i < dout; ++i)
                for (std::int64_t j = 0; j < dout; ++j)
                    acc += s.mat[(j * dout + i) * di * di + (b * di + a)] * obs[i * dout + j];
            out[a * di + b] = acc;
        }
    return out;
}

Tensor choi(const Superoperator& s) {
    const std::int64_t di = s.din(), dout = s.dout();
    Tensor c({di * dout, di * dout});
    for (std::int64_t r = 0; r < di; ++r)
        for (std::int64_t a = 0; a < dout; ++a)
            for (std::int64_t cc = 0; cc < di; ++cc)
                for (std::int64_t b = 0; b < dout; ++b)
                    c[(r * dout + a) * di * dout + cc * dout + b] =
                        s.mat[(a * dout + b) * di * di + r * di + cc];
    return c;
}

CptReport check_cpt(const Superoperator& s) {
    CptReport rep;
    const Tensor c = choi(s);
    if (c.dim(0) <= 1024) {
        Tensor h = c + dagger(c);
        h *= 0.5;
        rep.choi_min_eig = linalg::eigh(h).values.front();
    } else {
        rep.choi_min_eig = linalg::hermitian_extremal(c).min;
    }
    Tensor u = adjoint_apply(s, Tensor::identity(s.dout()));
    u -= Tensor::identity(s.din());
    rep.unitality_defect = u.max_abs();
    return rep;
}

void dump(const Superoperator& s, std::ostream& os) {
    os << "# superoperator label=" << s.label << "\n# in_dims =";
    for (auto d : s.in_dims) os << ' ' << d;
    os << "\n# out_dims =";
    for (auto d : s.out_dims) os << ' ' << d;
    os << "\n# rows cols = " << s.mat.dim(0) << ' ' << s.mat.dim(1) << "\n";
    char buf[64];
    for (std::int64_t r = 0; r < s.mat.dim(0); ++r) {
        for (std::int64_t c = 0; c < s.mat.dim(1); ++c) {
            const cplx v = s.mat[r * s.mat.dim(1) + c];
            std::snprintf(buf, sizeof(buf), "%.17g %.17g", v.real(), v.imag());
            os << buf << (c + 1 == s.mat.dim(1) ? "" : "  ");
        }
        os << "\n";
    }
}

BoundaryChannels build_channels(const MeraTensors& t) {
    BoundaryChannels ch;
    ch.dl = build_descend(t, Side::Left);
    ch.dr = build_descend(t, Side::Right);
    ch.davg = average_descend(ch.dl, ch.dr);
    ch.kl = build_boundary_absorb(t, Side::Left);
    ch.kr = build_boundary_absorb(t, Side::Right);
    ch.bl = build_boundary_stable(t, Side::Left);
    ch.br = build_boundary_stable(t, Side::Right);
    return ch;
}

} // namespace bmera
