#include "bmera/labnet.hpp"

namespace bmera::labnet {

Lab contract_shared(const Lab& a, const Lab& b) {
    std::vector<AxisPair> pairs;
    std::vector<char> used_b(b.lab.size(), 0);
    for (int i = 0; i < static_cast<int>(a.lab.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.lab.size()); ++j)
            if (!used_b[j] && a.lab[i] == b.lab[j]) {
                pairs.push_back({i, j});
                used_b[j] = 1;
                break;
            }
    Lab out;
    out.t = contract(a.t, b.t, pairs);
    std::vector<char> paired_a(a.lab.size(), 0);
    for (const auto& [pa, pb] : pairs) paired_a[pa] = 1;
    for (size_t i = 0; i < a.lab.size(); ++i)
        if (!paired_a[i]) out.lab.push_back(a.lab[i]);
    for (size_t j = 0; j < b.lab.size(); ++j)
        if (!used_b[j]) out.lab.push_back(b.lab[j]);
    return out;
}

Lab contract_all(const std::vector<Lab>& nodes) {
    if (nodes.empty()) fail(Errc::Generic, "empty network");
    Lab e = nodes.front();
    for (size_t i = 1; i < nodes.size(); ++i) e = contract_shared(e, nodes[i]);
    return e;
}

Lab doubled(const Tensor& ket, const std::vector<int>& ket_labels,
            const std::vector<int>& bra_labels, const std::vector<int>& traced_axes) {
    std::vector<AxisPair> pairs;
    for (int ax : traced_axes) pairs.push_back({ax, ax});
    Lab out;
    out.t = contract(ket, ket.conjugate(), pairs);
    std::vector<char> traced(ket_labels.size(), 0);
    for (int ax : traced_axes) traced[ax] = 1;
    for (size_t i = 0; i < ket_labels.size(); ++i)
        if (!traced[i]) out.lab.push_back(ket_labels[i]);
    for (size_t i = 0; i < bra_labels.size(); ++i)
        if (!traced[i]) out.lab.push_back(bra_labels[i]);
    return out;
}

Tensor ordered(const Lab& e, const std::vector<int>& want) {
    if (want.size() != e.lab.size()) fail(Errc::Generic, "ordered: label count mismatch");
    std::vector<int> order;
    for (int w : want) {
        bool found = false;
        for (size_t i = 0; i < e.lab.size(); ++i)
            if (e.lab[i] == w) {
                order.push_back(static_cast<int>(i));
                found = true;
                break;
            }
        if (!found) fail(Errc::Generic, "ordered: label missing");
    }
    return permute(e.t, order);
}

} // namespace bmera::labnet
