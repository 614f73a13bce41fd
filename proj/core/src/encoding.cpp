#include "nuclat/encoding.hpp"

#include <bitset>
#include <cmath>
#include <stdexcept>

namespace nuclat {

// ---------------------------------------------------------------------------
// Gray code
// ---------------------------------------------------------------------------

std::uint32_t gray_code_value(std::uint32_t k) { return k ^ (k >> 1); }

std::string gray_code(std::int64_t k, int eta) {
    if (eta < 0 || eta > 30) throw std::domain_error("gray_code: eta out of range");
    if (k < 0 || k >= (std::int64_t(1) << eta)) throw std::domain_error("gray_code: k out of range");
    const std::uint32_t g = gray_code_value(static_cast<std::uint32_t>(k));
    std::string s(eta, '0');
    for (int b = 0; b < eta; ++b)
        if ((g >> (eta - 1 - b)) & 1u) s[b] = '1';
    return s;
}

int ceil_log2(std::uint64_t n) {
    if (n == 0) throw std::domain_error("ceil_log2: zero argument");
    int e = 0;
    while ((std::uint64_t(1) << e) < n) ++e;
    return e;
}

GrayCodeMap make_gray_map(int dim, std::optional<int> eta) {
    if (dim < 1) throw std::domain_error("make_gray_map: dim must be >= 1");
    GrayCodeMap map;
    map.dim = dim;
    const int min_eta = ceil_log2(static_cast<std::uint64_t>(dim));
    map.eta = eta.value_or(min_eta);
    if (map.eta < min_eta || map.eta > 20)
        throw std::domain_error("make_gray_map: eta out of range");
    map.codes.resize(dim);
    for (int k = 0; k < dim; ++k) map.codes[k] = gray_code_value(static_cast<std::uint32_t>(k));
    return map;
}

// ---------------------------------------------------------------------------
// Gray-code dense encoding
// ---------------------------------------------------------------------------

PauliSum encode_gray(const Eigen::MatrixXd& block, const GrayCodeMap& map) {
    const int n = map.dim;
    if (block.rows() != n || block.cols() != n)
        throw std::invalid_argument("encode_gray: block size does not match the map");
    const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
    if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::domain_error("encode_gray: block is not symmetric");
    const int eta = map.eta;
    if (eta > 10) throw std::runtime_error("encode_gray: more than 10 qubits");
    const std::uint32_t dim2 = std::uint32_t(1) << eta;

    // Dense embedding at the codeword indices, plus the set of index
    // differences that actually occur (flip masks with any support).
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim2, dim2);
    std::bitset<2048> realized;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            e(map.codes[i], map.codes[j]) = block(i, j);
            realized.set(map.codes[i] ^ map.codes[j]);
        }

    // Coefficient of the string P(xmask, zmask): Tr(P e)/2^eta =
    // i^{#Y} / 2^eta * sum_b (-1)^{parity(b & zmask)} e(b, b ^ xmask).
    // Real symmetric input kills every odd-Y coefficient.
    PauliSum out(eta);
    for (std::uint32_t xmask = 0; xmask < dim2; ++xmask) {
        if (!realized.test(xmask)) continue;
        for (std::uint32_t zmask = 0; zmask < dim2; ++zmask) {
            const int y = __builtin_popcount(xmask & zmask);
            if (y & 1) continue;
            double acc = 0.0;
            for (std::uint32_t b = 0; b < dim2; ++b) {
                const double v = e(b, b ^ xmask);
                acc += __builtin_parity(b & zmask) ? -v : v;
            }
            double c = acc / static_cast<double>(dim2);
            if (y & 2) c = -c; // i^y for even y
            if (std::abs(c) <= PauliSum::kPruneThreshold) continue;
            PauliString p(eta);
            for (int q = 0; q < eta; ++q) {
                const bool x = (xmask >> q) & 1u;
                const bool z = (zmask >> q) & 1u;
                if (x && z)
                    p.set(q, PauliString::Y);
                else if (x)
                    p.set(q, PauliString::X);
                else if (z)
                    p.set(q, PauliString::Z);
            }
            out.add(p, c);
        }
    }
    return out;
}

PauliSum encode_gray(const ReducedHamiltonian& h) {
    return encode_gray(h.matrix(), make_gray_map(h.dim()));
}

PauliSum add_penalty(const PauliSum& hq, const GrayCodeMap& map, double lambda) {
    if (lambda < 0) throw std::domain_error("add_penalty: lambda must be >= 0");
    PauliSum out = hq;
    if (lambda == 0.0 || map.n_unused() == 0) return out;
    const int eta = map.eta;
    const std::uint32_t dim2 = std::uint32_t(1) << eta;
    for (std::uint32_t zmask = 0; zmask < dim2; ++zmask) {
        double acc = 0.0;
        for (int k = 0; k < map.n_unused(); ++k)
            acc += __builtin_parity(map.unused_code(k) & zmask) ? -1.0 : 1.0;
        const double c = lambda * acc / static_cast<double>(dim2);
        if (std::abs(c) <= PauliSum::kPruneThreshold) continue;
        PauliString p(eta);
        for (int q = 0; q < eta; ++q)
            if ((zmask >> q) & 1u) p.set(q, PauliString::Z);
        out.add(p, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Jordan-Wigner encoding
// ---------------------------------------------------------------------------

PauliSum jordan_wigner_op(int mode, bool create, int n_modes) {
    if (mode < 0 || mode >= n_modes) throw std::domain_error("jordan_wigner_op: mode out of range");
    PauliSum out(n_modes);
    PauliString px(n_modes), py(n_modes);
    for (int k = 0; k < mode; ++k) {
        px.set(k, PauliString::Z);
        py.set(k, PauliString::Z);
    }
    px.set(mode, PauliString::X);
    py.set(mode, PauliString::Y);
    out.add(px, 0.5);
    out.add(py, create ? std::complex<double>(0.0, -0.5) : std::complex<double>(0.0, 0.5));
    return out;
}

PauliSum jordan_wigner_number(int mode, int n_modes) {
    if (mode < 0 || mode >= n_modes) throw std::domain_error("jordan_wigner_number: mode out of range");
    PauliSum out(n_modes);
    PauliString z(n_modes);
    z.set(mode, PauliString::Z);
    out.add(PauliString(n_modes), 0.5);
    out.add(z, -0.5);
    return out;
}

namespace {

/// Kinetic PauliSum for an explicit symmetric site-hopping matrix, replicated
/// over the four flavors (mode = flavor * V + site).
PauliSum jw_kinetic(const Eigen::MatrixXd& t, double rel_cut) {
    const int v = static_cast<int>(t.rows());
    const int m = 4 * v;
    const double cut = rel_cut * std::max(1.0, t.cwiseAbs().maxCoeff());
    PauliSum h(m);
    for (int f = 0; f < 4; ++f)
        for (int l = 0; l < v; ++l) {
            const int i = f * v + l;
            if (std::abs(t(l, l)) > cut) h.add(jordan_wigner_number(i, m), t(l, l));
            for (int lp = l + 1; lp < v; ++lp) {
                if (std::abs(t(l, lp)) <= cut) continue;
                const int j = f * v + lp;
                PauliSum hop = jordan_wigner_op(j, true, m) * jordan_wigner_op(i, false, m);
                hop.add(jordan_wigner_op(i, true, m) * jordan_wigner_op(j, false, m));
                h.add(hop, t(l, lp));
            }
        }
    return h;
}

/// Same-site two- and three-flavor contact terms.
PauliSum jw_contact(int v, double c2, double c3) {
    const int m = 4 * v;
    PauliSum h(m);
    for (int l = 0; l < v; ++l) {
        std::vector<PauliSum> n_op;
        for (int f = 0; f < 4; ++f) n_op.push_back(jordan_wigner_number(f * v + l, m));
        for (int f1 = 0; f1 < 4; ++f1)
            for (int f2 = f1 + 1; f2 < 4; ++f2) {
                h.add(n_op[f1] * n_op[f2], c2);
                for (int f3 = f2 + 1; f3 < 4; ++f3) h.add(n_op[f1] * n_op[f2] * n_op[f3], c3);
            }
    }
    return h;
}

} // namespace

PauliSum jw_hamiltonian(const LatticeConfig& cfg) {
    cfg.validate();
    PauliSum h = jw_kinetic(kinetic_matrix(cfg), 1e-12);
    h.add(jw_contact(cfg.n_sites(), cfg.c2_mev, cfg.c3_mev));
    return h;
}

JwCensus jw_census(int L) {
    if (L < 2 || L > 4) throw std::domain_error("jw_census: L must be in [2, 4]");
    JwCensus out;
    out.L = L;
    const int v = L * L * L;

    // Generic symmetric profile: every pair coupled, all entries distinct.
    Eigen::MatrixXd generic(v, v);
    for (int l = 0; l < v; ++l)
        for (int lp = 0; lp < v; ++lp) generic(l, lp) = 1.0 + 1.0 / (2.0 + l + lp);
    out.kinetic_terms = static_cast<long long>(jw_kinetic(generic, 0.0).n_terms());

    out.onsite_terms = static_cast<long long>(jw_contact(v, 1.0, 1.0).n_terms());

    LatticeConfig cfg;
    cfg.L = L;
    out.physical_kinetic_terms =
        static_cast<long long>(jw_kinetic(kinetic_matrix(cfg), 1e-12).n_terms());
    return out;
}

// ---------------------------------------------------------------------------
// Qubit-resource report
// ---------------------------------------------------------------------------

std::vector<QubitReportRow> qubit_report(const std::vector<int>& l_list, const SectorSpec& sector,
                                         std::optional<double> spin_s) {
    std::vector<QubitReportRow> rows;
    rows.reserve(l_list.size());
    for (const int L : l_list) {
        LatticeConfig cfg;
        cfg.L = L;
        const ReducedBasis basis = build_reduced_basis(cfg, sector, spin_s);
        QubitReportRow r;
        r.L = L;
        r.dim = basis.dim();
        r.n_q_gray = r.dim <= 1 ? 0 : ceil_log2(static_cast<std::uint64_t>(r.dim));
        r.n_q_jw_mode = 4 * L * L * L;
        r.n_q_jw_site = 3 * L * L * L;
        rows.push_back(r);
    }
    return rows;
}

} // namespace nuclat
