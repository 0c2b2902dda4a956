#include "bmera/network.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "bmera/linalg.hpp"
#include "bmera/rng.hpp"

namespace bmera {

void MeraConfig::validate() const {
    if (d < 2) fail(Errc::InvalidConfig, "d must be >= 2");
    if (m < 1) fail(Errc::InvalidConfig, "m must be >= 1");
    if (n < 1) fail(Errc::InvalidConfig, "n must be >= 1");
}

namespace {

Tensor gaussian_tensor(Rng& rng, std::vector<std::int64_t> shape) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.cgauss();
    return t;
}

Tensor random_row_isometry(Rng& rng, std::int64_t rows, std::int64_t cols) {
    return linalg::orthonormal_rows(gaussian_tensor(rng, {rows, cols}));
}

double row_isometry_defect(const Tensor& t, std::int64_t rows, std::int64_t cols) {
    const Tensor m = t.reshaped({rows, cols});
    Tensor g = contract(m, m.conjugate(), {{1, 1}});
    g -= Tensor::identity(rows);
    return g.max_abs();
}

} // namespace

MeraTensors random_isometric(const MeraConfig& config) {
    config.validate();
    const auto d = config.d, m = config.m;
    Rng rng(config.seed);
    MeraTensors t;
    t.config = config;
    t.lambda = random_row_isometry(rng, d, d * d).reshaped({d, d, d});
    t.chi = random_row_isometry(rng, d * d, d * d).reshaped({d, d, d, d});
    t.alpha_l = random_row_isometry(rng, m * d, m * d).reshaped({m, d, m, d});
    t.alpha_r = config.independent_boundaries
                    ? random_row_isometry(rng, m * d, m * d).reshaped({m, d, m, d})
                    : t.alpha_l;
    Tensor hat = gaussian_tensor(rng, {m, d, d, d, d, m});
    hat *= cplx{1.0 / hat.frobenius_norm(), 0.0};
    t.hat = std::move(hat);
    return t;
}

double ConstraintReport::max_defect() const {
    return std::max({lambda_defect, chi_defect, alpha_l_defect, alpha_r_defect, hat_defect});
}

ConstraintReport check_constraints(const MeraTensors& t) {
    const auto d = t.config.d, m = t.config.m;
    ConstraintReport r;
    r.lambda_defect = row_isometry_defect(t.lambda, d, d * d);
    r.chi_defect = row_isometry_defect(t.chi, d * d, d * d);
    r.alpha_l_defect = row_isometry_defect(t.alpha_l, m * d, m * d);
    r.alpha_r_defect = row_isometry_defect(t.alpha_r, m * d, m * d);
    const double nrm = t.hat.frobenius_norm();
    r.hat_defect = std::abs(nrm * nrm - 1.0);
    return r;
}

TopBlocks top_density_matrices(const MeraTensors& t, double tol) {
    const auto d = t.config.d, m = t.config.m;
    const ConstraintReport rep = check_constraints(t);
    if (rep.hat_defect > tol)
        fail(Errc::ConstraintViolation, "hat normalization defect exceeds tolerance");

    const Tensor& c = t.hat;
    const Tensor cc = c.conjugate();
    auto block = [&](std::initializer_list<AxisPair> traced,
                     std::vector<std::int64_t> dims, std::vector<std::string> names) {
        Tensor rho = contract(c, cc, traced);
        std::int64_t dtot = 1;
        for (auto dd : dims) dtot *= dd;
        return DensityMatrix{rho.reshaped({dtot, dtot}), std::move(dims), std::move(names)};
    };
    TopBlocks out;
    out.left = block({{3, 3}, {4, 4}, {5, 5}}, {m, d, d}, {"A", "1", "2"});
    out.t1 = block({{0, 0}, {4, 4}, {5, 5}}, {d, d, d}, {"1", "2", "3"});
    out.t2 = block({{0, 0}, {1, 1}, {5, 5}}, {d, d, d}, {"2", "3", "4"});
    out.right = block({{0, 0}, {1, 1}, {2, 2}}, {d, d, m}, {"3", "4", "A'"});
    return out;
}

Tensor descend_lambda(const MeraTensors& t) { return permute(t.lambda, {1, 2, 0}); }

Tensor descend_chi(const MeraTensors& t) { return permute(t.chi, {2, 3, 0, 1}); }

Tensor descend_alpha(const MeraTensors& t, Side side) {
    const Tensor& a = side == Side::Left ? t.alpha_l : t.alpha_r;
    return permute(a, {2, 3, 0, 1});
}

MeraTensors mirrored(const MeraTensors& t) {
    MeraTensors r;
    r.config = t.config;
    r.lambda = permute(t.lambda, {0, 2, 1});
    r.chi = permute(t.chi, {1, 0, 3, 2});
    r.alpha_l = t.alpha_r;
    r.alpha_r = t.alpha_l;
    r.hat = permute(t.hat, {5, 4, 3, 2, 1, 0});
    return r;
}

namespace {

constexpr char kMagic[8] = {'B', 'M', 'E', 'R', 'A', 'T', 'N', '1'};

void write_tensor(std::ostream& os, const Tensor& t) {
    const std::uint32_t rank = static_cast<std::uint32_t>(t.rank());
    os.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
    for (int i = 0; i < t.rank(); ++i) {
        const std::int64_t d = t.dim(i);
        os.write(reinterpret_cast<const char*>(&d), sizeof(d));
    }
    os.write(reinterpret_cast<const char*>(t.data()), sizeof(cplx) * t.size());
}

Tensor read_tensor(std::istream& is) {
    std::uint32_t rank = 0;
    is.read(reinterpret_cast<char*>(&rank), sizeof(rank));
    std::vector<std::int64_t> shape(rank);
    std::int64_t total = 1;
    for (auto& d : shape) {
        is.read(reinterpret_cast<char*>(&d), sizeof(d));
        total *= d;
    }
    std::vector<cplx> data(total);
    is.read(reinterpret_cast<char*>(data.data()), sizeof(cplx) * total);
    if (!is) fail(Errc::IoError, "truncated tensor container");
    return Tensor(std::move(shape), std::move(data));
}

} // namespace

void write_tensors(const MeraTensors& t, std::ostream& os) {
    os.write(kMagic, sizeof(kMagic));
    const std::int64_t d = t.config.d, m = t.config.m;
    const std::int64_t n = t.config.n;
    const std::uint64_t seed = t.config.seed;
    const std::uint8_t indep = t.config.independent_boundaries ? 1 : 0;
    os.write(reinterpret_cast<const char*>(&d), sizeof(d));
    os.write(reinterpret_cast<const char*>(&m), sizeof(m));
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
    os.write(reinterpret_cast<const char*>(&indep), sizeof(indep));
    for (const Tensor* x : {&t.chi, &t.lambda, &t.alpha_l, &t.alpha_r, &t.hat})
        write_tensor(os, *x);
}

MeraTensors read_tensors(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        fail(Errc::IoError, "not a mera tensor container");
    MeraTensors t;
    std::int64_t d = 0, m = 0, n = 0;
    std::uint64_t seed = 0;
    std::uint8_t indep = 0;
    is.read(reinterpret_cast<char*>(&d), sizeof(d));
    is.read(reinterpret_cast<char*>(&m), sizeof(m));
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    is.read(reinterpret_cast<char*>(&seed), sizeof(seed));
    is.read(reinterpret_cast<char*>(&indep), sizeof(indep));
    t.config.d = d;
    t.config.m = m;
    t.config.n = static_cast<int>(n);
    t.config.seed = seed;
    t.config.independent_boundaries = indep != 0;
    t.chi = read_tensor(is);
    t.lambda = read_tensor(is);
    t.alpha_l = read_tensor(is);
    t.alpha_r = read_tensor(is);
    t.hat = read_tensor(is);
    return t;
}

void save_tensors(const MeraTensors& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(Errc::IoError, "cannot open for writing: " + path);
    write_tensors(t, os);
    if (!os) fail(Errc::IoError, "write failed: " + path);
}

MeraTensors load_tensors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(Errc::IoError, "cannot open for reading: " + path);
    return read_tensors(is);
}

} // namespace bmera
