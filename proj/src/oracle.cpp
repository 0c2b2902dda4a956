#include "bmera/oracle.hpp"

#include "bmera/labnet.hpp"

#include <algorithm>
#include <cmath>

namespace bmera::oracle {

namespace {

// Expand state axis `axis` (a coarse site) into a fine pair via the
// renormalizer; the two new axes take the expanded axis position.
Tensor expand_axis(const Tensor& state, int axis, const Tensor& dl) {
    Tensor r = contract(state, dl, {{axis, 2}}); // axes [others..., p, v]
    const int rs = state.rank();
    std::vector<int> order;
    order.reserve(rs + 1);
    for (int i = 0; i < axis; ++i) order.push_back(i);
    order.push_back(rs - 1);
    order.push_back(rs);
    for (int i = axis; i < rs - 1; ++i) order.push_back(i);
    return permute(r, order);
}

} // namespace

FullState build_state(const MeraTensors& t, int n, std::int64_t amplitude_budget) {
    t.config.validate();
    if (n < 0) fail(Errc::InvalidConfig, "build_state: negative depth");
    if (!check_constraints(t).pass(1e-8))
        fail(Errc::ConstraintViolation, "network constraints violated beyond 1e-8");
    const auto d = t.config.d, m = t.config.m;

    const Tensor dl = descend_lambda(t);
    const Tensor gx = descend_chi(t);
    const Tensor gal = descend_alpha(t, Side::Left);
    const Tensor gar = descend_alpha(t, Side::Right);

    Tensor state = t.hat; // [a, c1..c4, a']
    for (int layer = 1; layer <= n; ++layer) {
        const std::int64_t msites = std::int64_t{1} << (layer + 1); // coarse sites this layer
        double amps = static_cast<double>(m) * m;
        for (std::int64_t i = 0; i < 2 * msites; ++i) amps *= static_cast<double>(d);
        if (amps > static_cast<double>(amplitude_budget))
            fail(Errc::BudgetExceeded, "build_state: amplitude budget exceeded at layer " +
                                           std::to_string(layer));
        for (std::int64_t j = msites; j >= 1; --j)
            state = expand_axis(state, static_cast<int>(j), dl);
        const int last = static_cast<int>(2 * msites); // fine site count
        state = apply_gate(state, gal, {0, 1});
        state = apply_gate(state, gar, {last + 1, last});
        for (std::int64_t j = 1; j <= msites - 1; ++j)
            state = apply_gate(state, gx, {static_cast<int>(2 * j), static_cast<int>(2 * j + 1)});
    }
    return {std::move(state), n, d, m};
}

namespace {

int site_axis(const FullState& s, int ref) {
    const std::int64_t nsites = s.sites();
    if (ref < 0 || ref > nsites + 1) fail(Errc::SiteOutOfRange, "site reference out of range");
    return ref; // axes are laid out [a, 1..N, a'] so references are axes
}

} // namespace

DensityMatrix reduced_dm(const FullState& s, std::span<const int> sites) {
    if (sites.empty()) fail(Errc::SiteOutOfRange, "reduced_dm: empty site list");
    const int rank = s.amps.rank();
    std::vector<char> kept(rank, 0);
    std::vector<int> order;
    std::vector<std::int64_t> dims;
    for (int ref : sites) {
        const int ax = site_axis(s, ref);
        if (kept[ax]) fail(Errc::SiteOutOfRange, "reduced_dm: repeated site");
        kept[ax] = 1;
        order.push_back(ax);
        dims.push_back(s.amps.dim(ax));
    }
    std::int64_t kdim = 1, tdim = 1;
    for (auto d : dims) kdim *= d;
    for (int i = 0; i < rank; ++i)
        if (!kept[i]) {
            order.push_back(i);
            tdim *= s.amps.dim(i);
        }
    const Tensor psi = permute(s.amps, order).reshaped({kdim, tdim});
    Tensor rho = contract(psi, psi.conjugate(), {{1, 1}});
    std::vector<std::string> names;
    for (int ref : sites)
        names.push_back(ref == 0 ? "A" : ref == s.sites() + 1 ? "A'" : std::to_string(ref));
    return {std::move(rho), std::move(dims), std::move(names)};
}

DensityMatrix reduced_dm(const FullState& s, std::initializer_list<int> sites) {
    return reduced_dm(s, std::span<const int>(sites.begin(), sites.size()));
}

cplx exact_expectation(const FullState& s, const Tensor& theta3, std::int64_t ell) {
    if (ell < 1 || ell + 2 > s.sites()) fail(Errc::SiteOutOfRange, "expectation site out of range");
    const int e = static_cast<int>(ell);
    const DensityMatrix rho = reduced_dm(s, {e, e + 1, e + 2});
    return expectation(theta3, rho);
}

cplx exact_correlator(const FullState& s, const Tensor& theta3, std::int64_t ell,
                      std::int64_t ellp) {
    if (ell < 1 || ell + 2 > s.sites() || ellp < 1 || ellp + 2 > s.sites())
        fail(Errc::SiteOutOfRange, "correlator site out of range");
    if (std::abs(ell - ellp) < 3) fail(Errc::OverlappingSupports, "correlator supports overlap");
    const int a = static_cast<int>(ell), b = static_cast<int>(ellp);
    const DensityMatrix rho6 = reduced_dm(s, {a, a + 1, a + 2, b, b + 1, b + 2});
    const cplx joint = expectation(kron(theta3, theta3), rho6);
    return joint - exact_expectation(s, theta3, ell) * exact_expectation(s, theta3, ellp);
}

// ---------------------------------------------------------------------------
// LayerOracle: one exact layer on top of a dense parent.
//
// The added layer is contracted against the parent state and its conjugate as
// a left-to-right (or mirrored) chain over coarse positions. Between
// positions the chain carries only the pre-disentangler wire pair, so the
// working set stays near |parent| * d^2 * (kept block)^2. No isometry or
// causal-cone identity is assumed anywhere.
// ---------------------------------------------------------------------------

namespace {

using labnet::Lab;
using labnet::contract_shared;
using labnet::doubled;

constexpr int kKetBase = 1;      // parent ket axes: a -> 1, c_j -> 1+j, a' -> M+2
constexpr int kBraOffset = 5000; // parent bra axes
constexpr int kBondBase = 10000; // bond after position j: ket 2j, bra 2j+1
constexpr int kOpenBase = 100000;

} // namespace

LayerOracle::LayerOracle(const MeraTensors& t, FullState parent)
    : parent_(std::move(parent)), d_(t.config.d), m_(t.config.m),
      msites_(parent_.sites()), dl_(descend_lambda(t)), gx_(descend_chi(t)),
      gal_(descend_alpha(t, Side::Left)), gar_(descend_alpha(t, Side::Right)) {
    if (!check_constraints(t).pass(1e-8))
        fail(Errc::ConstraintViolation, "network constraints violated beyond 1e-8");
}

DensityMatrix LayerOracle::block(std::span<const int> sites) const {
    const std::int64_t mcoarse = msites_;
    const std::int64_t nfine = 2 * mcoarse;
    if (sites.empty()) fail(Errc::SiteOutOfRange, "block: empty site list");
    for (size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] < 0 || sites[i] > nfine + 1)
            fail(Errc::SiteOutOfRange, "block: site reference out of range");
        if (i > 0 && sites[i] <= sites[i - 1])
            fail(Errc::SiteOutOfRange, "block: sites must be strictly ascending");
    }
    // open labels per kept reference
    std::vector<int> open_ket(nfine + 2, -1), open_bra(nfine + 2, -1);
    for (size_t k = 0; k < sites.size(); ++k) {
        open_ket[sites[k]] = kOpenBase + static_cast<int>(4 * k);
        open_bra[sites[k]] = kOpenBase + static_cast<int>(4 * k) + 1;
    }
    auto bond_ket = [](std::int64_t j) { return kBondBase + static_cast<int>(2 * j); };
    auto bond_bra = [](std::int64_t j) { return kBondBase + static_cast<int>(2 * j) + 1; };

    std::vector<Lab> chain;
    // Position 1: boundary coupler + first renormalizer; emits final site 1
    // and the left ancilla.
    {
        Tensor k1 = contract(gal_, dl_, {{3, 0}}); // [la, ls, ua, v, c]
        std::vector<int> kl = {open_ket[0], open_ket[1], kKetBase, bond_ket(1), kKetBase + 1};
        std::vector<int> bl = {open_bra[0], open_bra[1], kKetBase + kBraOffset, bond_bra(1),
                               kKetBase + 1 + kBraOffset};
        std::vector<int> traced;
        if (open_ket[0] < 0) traced.push_back(0);
        if (open_ket[1] < 0) traced.push_back(1);
        chain.push_back(doubled(k1, kl, bl, traced));
    }
    // Positions 2..M: disentangler between positions j-1 and j plus the j-th
    // renormalizer; emits final sites 2(j-1) and 2j-1.
    for (std::int64_t j = 2; j <= mcoarse; ++j) {
        Tensor kj = contract(gx_, dl_, {{3, 0}}); // [w, q, vin, v, c]
        const int s_even = static_cast<int>(2 * (j - 1));
        const int s_odd = static_cast<int>(2 * j - 1);
        std::vector<int> kl = {open_ket[s_even], open_ket[s_odd], bond_ket(j - 1), bond_ket(j),
                               kKetBase + static_cast<int>(j)};
        std::vector<int> bl = {open_bra[s_even], open_bra[s_odd], bond_bra(j - 1), bond_bra(j),
                               kKetBase + static_cast<int>(j) + kBraOffset};
        std::vector<int> traced;
        if (open_ket[s_even] < 0) traced.push_back(0);
        if (open_ket[s_odd] < 0) traced.push_back(1);
        chain.push_back(doubled(kj, kl, bl, traced));
    }
    // Right ancilla position: boundary coupler on (A', site 2M).
    {
        const int s_last = static_cast<int>(nfine);
        std::vector<int> kl = {open_ket[s_last + 1], open_ket[s_last],
                               kKetBase + static_cast<int>(mcoarse) + 1, bond_ket(mcoarse)};
        std::vector<int> bl = {open_bra[s_last + 1], open_bra[s_last],
                               kKetBase + static_cast<int>(mcoarse) + 1 + kBraOffset,
                               bond_bra(mcoarse)};
        std::vector<int> traced;
        if (open_ket[s_last + 1] < 0) traced.push_back(0);
        if (open_ket[s_last] < 0) traced.push_back(1);
        chain.push_back(doubled(gar_, kl, bl, traced));
    }

    Lab psi;
    psi.t = parent_.amps;
    psi.lab.push_back(kKetBase);
    for (std::int64_t j = 1; j <= mcoarse; ++j) psi.lab.push_back(kKetBase + static_cast<int>(j));
    psi.lab.push_back(kKetBase + static_cast<int>(mcoarse) + 1);
    Lab psi_bra;
    psi_bra.t = parent_.amps.conjugate();
    for (int l : psi.lab) psi_bra.lab.push_back(l + kBraOffset);

    // Sweep from the side farther from the kept block so the open legs ride
    // along for as few steps as possible.
    double center = 0;
    for (int sr : sites) center += sr;
    center /= static_cast<double>(sites.size());
    Lab e = psi;
    if (center > static_cast<double>(nfine) / 2) {
        for (const auto& tj : chain) e = contract_shared(e, tj);
    } else {
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) e = contract_shared(e, *it);
    }
    e = contract_shared(e, psi_bra);

    // Remaining axes are exactly the open labels; order them (ket..., bra...).
    std::vector<int> order;
    for (size_t k = 0; k < sites.size(); ++k) {
        const int want = kOpenBase + static_cast<int>(4 * k);
        for (size_t i = 0; i < e.lab.size(); ++i)
            if (e.lab[i] == want) order.push_back(static_cast<int>(i));
    }
    for (size_t k = 0; k < sites.size(); ++k) {
        const int want = kOpenBase + static_cast<int>(4 * k) + 1;
        for (size_t i = 0; i < e.lab.size(); ++i)
            if (e.lab[i] == want) order.push_back(static_cast<int>(i));
    }
    if (order.size() != e.lab.size())
        fail(Errc::Generic, "layer chain left unexpected open axes");
    Tensor rho = permute(e.t, order);

    std::vector<std::int64_t> dims;
    std::vector<std::string> names;
    std::int64_t kdim = 1;
    for (int sr : sites) {
        const std::int64_t dd = (sr == 0 || sr == nfine + 1) ? m_ : d_;
        dims.push_back(dd);
        kdim *= dd;
        names.push_back(sr == 0 ? "A" : sr == nfine + 1 ? "A'" : std::to_string(sr));
    }
    return {rho.reshaped({kdim, kdim}), std::move(dims), std::move(names)};
}

ExactBlocks::ExactBlocks(const MeraTensors& t, int n, std::int64_t amplitude_budget) : n_(n) {
    const auto d = t.config.d, m = t.config.m;
    double amps = static_cast<double>(m) * m;
    for (std::int64_t i = 0; i < (std::int64_t{1} << (n + 2)); ++i) amps *= static_cast<double>(d);
    if (amps <= static_cast<double>(amplitude_budget)) {
        state_ = std::make_unique<FullState>(build_state(t, n, amplitude_budget));
    } else {
        layer_ = std::make_unique<LayerOracle>(t, build_state(t, n - 1, amplitude_budget));
    }
}

DensityMatrix ExactBlocks::block(std::span<const int> sites) const {
    if (state_) return reduced_dm(*state_, sites);
    return layer_->block(sites);
}

DensityMatrix ExactBlocks::block(std::initializer_list<int> sites) const {
    return block(std::span<const int>(sites.begin(), sites.size()));
}

DensityMatrix ExactBlocks::triple(std::int64_t ell) const {
    if (ell < 1 || ell + 2 > sites()) fail(Errc::SiteOutOfRange, "triple out of range");
    const int e = static_cast<int>(ell);
    return block({e, e + 1, e + 2});
}

DensityMatrix averaged_rho3(const ExactBlocks& blocks) {
    const std::int64_t nsites = blocks.sites();
    DensityMatrix acc = blocks.triple(1);
    for (std::int64_t j = 2; j <= nsites - 2; ++j) acc.mat += blocks.triple(j).mat;
    acc.mat *= cplx{1.0 / static_cast<double>(nsites - 2), 0.0};
    acc.site_names.clear();
    return acc;
}

} // namespace bmera::oracle
