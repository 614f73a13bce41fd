#include "nuclat/symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace nuclat {

// ---------------------------------------------------------------------------
// Point group
// ---------------------------------------------------------------------------

const std::array<PointOp, 48>& octahedral_ops() {
    static const std::array<PointOp, 48> ops = [] {
        static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                            {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        std::array<PointOp, 48> out{};
        int idx = 0;
        for (const auto& p : perms)
            for (int bits = 0; bits < 8; ++bits)
                out[idx++] = PointOp{{p[0], p[1], p[2]},
                                     {(bits & 1) ? -1 : 1, (bits & 2) ? -1 : 1,
                                      (bits & 4) ? -1 : 1}};
        return out;
    }();
    return ops;
}

// ---------------------------------------------------------------------------
// SymmetryContext
// ---------------------------------------------------------------------------

SymmetryContext::SymmetryContext(int L) : L_(L), V_(L * L * L) {
    if (L < 1 || L > 12) throw std::invalid_argument("SymmetryContext: L out of range [1, 12]");
    cx_.resize(V_);
    cy_.resize(V_);
    cz_.resize(V_);
    for (int site = 0; site < V_; ++site) {
        cx_[site] = static_cast<std::uint8_t>(site % L);
        cy_[site] = static_cast<std::uint8_t>((site / L) % L);
        cz_[site] = static_cast<std::uint8_t>(site / (L * L));
    }
    wrap_.resize(3 * L);
    for (int v = -L; v < 2 * L; ++v)
        wrap_[v + L] = static_cast<std::uint8_t>(((v % L) + L) % L);

    const auto& ops = octahedral_ops();
    point_table_.resize(48 * static_cast<std::size_t>(V_));
    for (int r = 0; r < 48; ++r) {
        const PointOp& op = ops[r];
        for (int site = 0; site < V_; ++site) {
            const int in[3] = {cx_[site], cy_[site], cz_[site]};
            const int ox = wrap(op.sign[0] * in[op.perm[0]]);
            const int oy = wrap(op.sign[1] * in[op.perm[1]]);
            const int oz = wrap(op.sign[2] * in[op.perm[2]]);
            point_table_[r * static_cast<std::size_t>(V_) + site] =
                static_cast<std::uint16_t>(site_at(ox, oy, oz));
        }
    }
}

std::pair<FockState, int> act(const SymmetryContext& ctx, const GroupElement& g,
                              const FockState& s) {
    const int V = ctx.n_sites();
    const int L = ctx.L();
    const int sx = ((g.shift.x % L) + L) % L;
    const int sy = ((g.shift.y % L) + L) % L;
    const int sz = ((g.shift.z % L) + L) % L;

    Mode img[FockState::kMaxOccupied];
    for (int i = 0; i < s.count; ++i) {
        const int f = s.modes[i] / V;
        const int ps = ctx.point_site(g.point, s.modes[i] % V);
        const Coord c = ctx.coords(ps);
        img[i] = static_cast<Mode>(
            f * V + ctx.site_at(ctx.wrap(c.x + sx), ctx.wrap(c.y + sy), ctx.wrap(c.z + sz)));
    }
    int inversions = 0;
    for (int i = 0; i < s.count; ++i)
        for (int j = i + 1; j < s.count; ++j)
            if (img[i] > img[j]) ++inversions;

    FockState out;
    out.count = s.count;
    for (int i = 0; i < s.count; ++i) {
        int j = i;
        const Mode v = img[i];
        while (j > 0 && out.modes[j - 1] > v) {
            out.modes[j] = out.modes[j - 1];
            --j;
        }
        out.modes[j] = v;
    }
    return {out, (inversions & 1) ? -1 : 1};
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

namespace {

/// Copy the distinct values of in[0..n) into out, ascending; returns how many.
int distinct_sorted(const int* in, int n, int* out) {
    int k = 0;
    for (int i = 0; i < n; ++i) {
        const int v = in[i];
        int j = k;
        while (j > 0 && out[j - 1] >= v) {
            if (out[j - 1] == v) goto next; // already present
            --j;
        }
        for (int m = k; m > j; --m) out[m] = out[m - 1];
        out[j] = v;
        ++k;
    next:;
    }
    return k;
}

} // namespace

Canonical canonicalize(const SymmetryContext& ctx, const FockState& s) {
    if (s.count == 0) return {s, 1, GroupElement{}};
    if (s.count > 5) throw std::invalid_argument("canonicalize: supports at most 5 particles");
    const int n = s.count;
    const int V = ctx.n_sites();
    const int L = ctx.L();

    int fbase[5], bx[5], by[5], bz[5];
    for (int i = 0; i < n; ++i) {
        fbase[i] = (s.modes[i] / V) * V;
        const Coord c = ctx.coords(s.modes[i] % V);
        bx[i] = c.x;
        by[i] = c.y;
        bz[i] = c.z;
    }
    // Modes are sorted, so the highest-flavor particles form the tail; the
    // largest mode of any image comes from this group, giving the top packed
    // field and a cheap reject test per candidate.
    int top_begin = n - 1;
    while (top_begin > 0 && fbase[top_begin - 1] == fbase[n - 1]) --top_begin;
    const std::uint64_t top_base = static_cast<std::uint64_t>(fbase[n - 1]);

    std::uint64_t best_key = ~0ull;
    int best_r = 0, best_tx = 0, best_ty = 0, best_tz = 0;

    const auto& ops = octahedral_ops();
    int px[5], py[5], pz[5];
    int txs[5], tys[5], tzs[5];
    for (int r = 0; r < 48; ++r) {
        const PointOp& op = ops[r];
        for (int i = 0; i < n; ++i) {
            const int in[3] = {bx[i], by[i], bz[i]};
            px[i] = ctx.wrap(op.sign[0] * in[op.perm[0]]);
            py[i] = ctx.wrap(op.sign[1] * in[op.perm[1]]);
            pz[i] = ctx.wrap(op.sign[2] * in[op.perm[2]]);
        }
        // Only translations aligning some occupied coordinate with zero per
        // axis can reach the minimum: shifting all of an axis's coordinates
        // away from zero can only raise every site index.
        const int ntx = distinct_sorted(px, n, txs);
        const int nty = distinct_sorted(py, n, tys);
        const int ntz = distinct_sorted(pz, n, tzs);
        for (int iz = 0; iz < ntz; ++iz)
            for (int iy = 0; iy < nty; ++iy)
                for (int ix = 0; ix < ntx; ++ix) {
                    const int tx = txs[ix], ty = tys[iy], tz = tzs[iz];
                    int topmax = -1;
                    for (int i = top_begin; i < n; ++i) {
                        const int site = ctx.wrap(px[i] - tx) +
                                         L * (ctx.wrap(py[i] - ty) + L * ctx.wrap(pz[i] - tz));
                        if (site > topmax) topmax = site;
                    }
                    if (top_base + topmax > (best_key >> 53)) continue;
                    int m[5];
                    for (int i = 0; i < n; ++i)
                        m[i] = fbase[i] + ctx.wrap(px[i] - tx) +
                               L * (ctx.wrap(py[i] - ty) + L * ctx.wrap(pz[i] - tz));
                    for (int i = 1; i < n; ++i) { // sort descending
                        const int v = m[i];
                        int j = i;
                        while (j > 0 && m[j - 1] < v) {
                            m[j] = m[j - 1];
                            --j;
                        }
                        m[j] = v;
                    }
                    std::uint64_t key = static_cast<std::uint64_t>(n);
                    for (int i = 0; i < n; ++i)
                        key |= static_cast<std::uint64_t>(m[i]) << (53 - 11 * i);
                    if (key < best_key) {
                        best_key = key;
                        best_r = r;
                        best_tx = tx;
                        best_ty = ty;
                        best_tz = tz;
                    }
                }
    }
    GroupElement g{best_r,
                   Coord{(L - best_tx) % L, (L - best_ty) % L, (L - best_tz) % L}};
    auto [rep, sign] = act(ctx, g, s);
    return {rep, sign, g};
}

OrbitStats orbit_stats(const SymmetryContext& ctx, const FockState& rep) {
    OrbitStats st{};
    const int n = rep.count;
    if (n == 0) {
        st.stabilizer_order = static_cast<std::uint32_t>(ctx.group_order());
        st.sign_sum = ctx.group_order();
        st.orbit_size = 1;
        return st;
    }
    const int V = ctx.n_sites();
    const int L = ctx.L();

    int fbase[FockState::kMaxOccupied];
    int bx[FockState::kMaxOccupied], by[FockState::kMaxOccupied], bz[FockState::kMaxOccupied];
    for (int i = 0; i < n; ++i) {
        fbase[i] = (rep.modes[i] / V) * V;
        const Coord c = ctx.coords(rep.modes[i] % V);
        bx[i] = c.x;
        by[i] = c.y;
        bz[i] = c.z;
    }
    // Particles sharing particle 0's flavor are the prefix of the sorted list;
    // a stabilizing element must send particle 0's image onto one of them,
    // which pins the translation.
    int k = 1;
    while (k < n && fbase[k] == fbase[0]) ++k;

    const auto& ops = octahedral_ops();
    int ix[FockState::kMaxOccupied], iy[FockState::kMaxOccupied], iz[FockState::kMaxOccupied];
    for (int r = 0; r < 48; ++r) {
        const PointOp& op = ops[r];
        for (int i = 0; i < n; ++i) {
            const int in[3] = {bx[i], by[i], bz[i]};
            ix[i] = ctx.wrap(op.sign[0] * in[op.perm[0]]);
            iy[i] = ctx.wrap(op.sign[1] * in[op.perm[1]]);
            iz[i] = ctx.wrap(op.sign[2] * in[op.perm[2]]);
        }
        for (int j = 0; j < k; ++j) {
            const int ux = ctx.wrap(bx[j] - ix[0]);
            const int uy = ctx.wrap(by[j] - iy[0]);
            const int uz = ctx.wrap(bz[j] - iz[0]);
            int img[FockState::kMaxOccupied];
            for (int i = 0; i < n; ++i)
                img[i] = fbase[i] + ctx.wrap(ix[i] + ux) +
                         L * (ctx.wrap(iy[i] + uy) + L * ctx.wrap(iz[i] + uz));
            int sorted[FockState::kMaxOccupied];
            int inversions = 0;
            for (int i = 0; i < n; ++i) {
                const int v = img[i];
                int p = i;
                while (p > 0 && sorted[p - 1] > v) {
                    sorted[p] = sorted[p - 1];
                    --p;
                }
                sorted[p] = v;
                inversions += i - p;
            }
            bool match = true;
            for (int i = 0; i < n; ++i)
                if (sorted[i] != rep.modes[i]) {
                    match = false;
                    break;
                }
            if (!match) continue;
            ++st.stabilizer_order;
            st.sign_sum += (inversions & 1) ? -1 : 1;
        }
    }
    st.orbit_size = static_cast<std::uint64_t>(ctx.group_order()) / st.stabilizer_order;
    return st;
}

// ---------------------------------------------------------------------------
// Reduced basis
// ---------------------------------------------------------------------------

std::optional<std::pair<int, int>>
ReducedBasis::spatial_index_of(const SymmetryContext& ctx, const FockState& s) const {
    FockState pinned = s;
    int sign = 1;
    if (s.count > 0) {
        const int site0 = s.modes[0] % ctx.n_sites();
        if (site0 != 0) {
            const int L = ctx.L();
            const Coord c = ctx.coords(site0);
            const GroupElement g{0, Coord{(L - c.x) % L, (L - c.y) % L, (L - c.z) % L}};
            auto [img, sg] = act(ctx, g, s);
            pinned = img;
            sign = sg;
        }
    }
    const std::uint64_t key = pack_key(pinned);
    const auto it = std::lower_bound(
        pinned_index.begin(), pinned_index.end(), key,
        [](const std::pair<std::uint64_t, std::uint32_t>& e, std::uint64_t k) {
            return e.first < k;
        });
    if (it == pinned_index.end() || it->first != key) return std::nullopt;
    const int idx = static_cast<int>(it->second >> 1);
    if (it->second & 1u) sign = -sign;
    return std::make_pair(idx, sign);
}

ReducedBasis build_reduced_basis(const LatticeConfig& cfg, const SectorSpec& sector,
                                 std::optional<double> spin_s) {
    cfg.validate();
    sector.validate(cfg.n_sites());
    if (spin_s) {
        if (!sector.two_sz)
            throw std::invalid_argument("build_reduced_basis: spin selection requires fixed two_sz");
        if (*spin_s < 0.0)
            throw std::invalid_argument("build_reduced_basis: spin_s must be nonnegative");
        const double twice = 2.0 * *spin_s;
        if (std::abs(twice - std::lround(twice)) > 1e-9)
            throw std::invalid_argument("build_reduced_basis: spin_s must be a multiple of 1/2");
    }

    const SymmetryContext ctx(cfg.L);
    ReducedBasis basis;
    basis.cfg = cfg;
    basis.sector = sector;

    // Pass 1: canonicalize every pinned sector state, remembering which orbit
    // representative it reaches and with what sign (stashed in the free bit 3
    // of the packed key).
    struct Pin {
        std::uint64_t pin_key;
        std::uint64_t rep_key_sign;
    };
    std::vector<Pin> pins;
    std::unordered_set<std::uint64_t> rep_set;
    for_each_pinned_state(cfg, sector, [&](const FockState& s) {
        const Canonical can = canonicalize(ctx, s);
        const std::uint64_t rk = pack_key(can.rep);
        rep_set.insert(rk);
        pins.push_back({pack_key(s), rk | (can.sign < 0 ? 8ull : 0ull)});
    });

    // Pass 2: orbit statistics; orbits whose stabilizer carries a nontrivial
    // sign character project to zero and are dropped.
    std::vector<std::uint64_t> reps(rep_set.begin(), rep_set.end());
    std::sort(reps.begin(), reps.end());
    rep_set = {};
    std::unordered_map<std::uint64_t, std::uint32_t> index_of;
    const double group_order = static_cast<double>(ctx.group_order());
    for (const std::uint64_t rk : reps) {
        const FockState rep = unpack_key(rk);
        const OrbitStats st = orbit_stats(ctx, rep);
        if (st.sign_sum == 0) continue;
        index_of.emplace(rk, static_cast<std::uint32_t>(basis.states.size()));
        basis.states.push_back(
            {rep, static_cast<std::uint32_t>(st.orbit_size),
             std::sqrt(static_cast<double>(st.sign_sum) / group_order)});
    }
    reps = {};

    basis.pinned_index.reserve(pins.size());
    for (const Pin& p : pins) {
        const auto it = index_of.find(p.rep_key_sign & ~8ull);
        if (it == index_of.end()) continue; // orbit projected to zero
        const std::uint32_t sign_bit = (p.rep_key_sign & 8ull) ? 1u : 0u;
        basis.pinned_index.emplace_back(p.pin_key, it->second * 2 + sign_bit);
    }
    pins = {};
    std::sort(basis.pinned_index.begin(), basis.pinned_index.end());

    if (spin_s) {
        const int d = basis.spatial_dim();
        if (d > 16384)
            throw std::runtime_error(
                "build_reduced_basis: spin selection needs a dense spatial solve; "
                "dimension too large");
        if (d == 0) {
            basis.spin_vectors.resize(0, 0);
            basis.spin_s = spin_s;
            return basis;
        }
        // Channel selection in two stages: first the minimal eigenvalue
        // n(5-n) of the flavor-exchange Casimir (flavor-antisymmetric, i.e.
        // spatially symmetric multiplets), then S(S+1) of S^2 inside it.
        const auto select = [](const Eigen::MatrixXd& op, double target) {
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op);
            if (es.info() != Eigen::Success)
                throw std::runtime_error("build_reduced_basis: channel eigensolve failed");
            std::vector<int> cols;
            for (int i = 0; i < op.rows(); ++i)
                if (std::abs(es.eigenvalues()[i] - target) <= 1e-6) cols.push_back(i);
            Eigen::MatrixXd q(op.rows(), static_cast<int>(cols.size()));
            for (std::size_t j = 0; j < cols.size(); ++j)
                q.col(static_cast<int>(j)) = es.eigenvectors().col(cols[j]);
            return q;
        };
        const int n = sector.n_particles();
        const Eigen::MatrixXd casimir = flavor_casimir_reduced(ctx, basis);
        const Eigen::MatrixXd q1 = select(casimir, static_cast<double>(n * (5 - n)));
        const Eigen::MatrixXd s2 = s_squared_reduced(ctx, basis);
        const Eigen::MatrixXd q2 =
            select(q1.transpose() * s2 * q1, *spin_s * (*spin_s + 1.0));
        basis.spin_vectors = q1 * q2;
        basis.spin_s = spin_s;
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Total spin
// ---------------------------------------------------------------------------

std::vector<std::pair<FockState, double>> s_squared_apply(const FockState& s, int n_sites) {
    std::vector<std::pair<FockState, double>> out;
    const auto add = [&out](const FockState& t, double c) {
        for (auto& [u, v] : out)
            if (u == t) {
                v += c;
                return;
            }
        out.emplace_back(t, c);
    };
    const double sz = 0.5 * two_sz_of(s, n_sites);
    add(s, sz * (sz + 1.0));

    // S^2 = S_- S_+ + Sz (Sz + 1). Raising moves a particle from a spin-down
    // flavor (1 or 3) to the matching spin-up flavor (0 or 2) on its own site.
    for (int i = 0; i < s.count; ++i) {
        const int f = s.modes[i] / n_sites;
        if (f != 1 && f != 3) continue;
        const Mode up = static_cast<Mode>(s.modes[i] - n_sites);
        const auto ann = apply_annihilation(s, s.modes[i]);
        const auto cre = apply_creation(ann->first, up);
        if (!cre) continue;
        const int sign1 = ann->second * cre->second;
        const FockState s1 = cre->first;
        for (int j = 0; j < s1.count; ++j) {
            const int f2 = s1.modes[j] / n_sites;
            if (f2 != 0 && f2 != 2) continue;
            const Mode dn = static_cast<Mode>(s1.modes[j] + n_sites);
            const auto ann2 = apply_annihilation(s1, s1.modes[j]);
            const auto cre2 = apply_creation(ann2->first, dn);
            if (!cre2) continue;
            add(cre2->first, static_cast<double>(sign1 * ann2->second * cre2->second));
        }
    }
    return out;
}

namespace {

Eigen::MatrixXd reduce_terms(
    const SymmetryContext& ctx, const ReducedBasis& basis,
    const std::function<std::vector<std::pair<FockState, double>>(const FockState&, int)>&
        apply) {
    const int d = basis.spatial_dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    const int V = ctx.n_sites();
    for (int b = 0; b < d; ++b) {
        const SymBasisState& src = basis.states[b];
        for (const auto& [t, coeff] : apply(src.rep, V)) {
            const auto hit = basis.spatial_index_of(ctx, t);
            if (!hit) continue;
            m(hit->first, b) +=
                coeff * hit->second * (basis.states[hit->first].norm / src.norm);
        }
    }
    return m;
}

} // namespace

Eigen::MatrixXd s_squared_reduced(const SymmetryContext& ctx, const ReducedBasis& basis) {
    return reduce_terms(ctx, basis, s_squared_apply);
}

std::vector<std::pair<FockState, double>> flavor_casimir_apply(const FockState& s,
                                                               int n_sites) {
    std::vector<std::pair<FockState, double>> out;
    const auto add = [&out](const FockState& t, double c) {
        for (auto& [u, v] : out)
            if (u == t) {
                v += c;
                return;
            }
        out.emplace_back(t, c);
    };
    for (int sigma = 0; sigma < 4; ++sigma)
        for (int tau = 0; tau < 4; ++tau) {
            for (int i = 0; i < s.count; ++i) {
                if (s.modes[i] / n_sites != sigma) continue;
                const int l = s.modes[i] % n_sites;
                const auto a1 = apply_annihilation(s, s.modes[i]);
                const auto c1 =
                    apply_creation(a1->first, static_cast<Mode>(tau * n_sites + l));
                if (!c1) continue;
                const int sign1 = a1->second * c1->second;
                const FockState s1 = c1->first;
                for (int j = 0; j < s1.count; ++j) {
                    if (s1.modes[j] / n_sites != tau) continue;
                    const int lp = s1.modes[j] % n_sites;
                    const auto a2 = apply_annihilation(s1, s1.modes[j]);
                    const auto c2 =
                        apply_creation(a2->first, static_cast<Mode>(sigma * n_sites + lp));
                    if (!c2) continue;
                    add(c2->first, static_cast<double>(sign1 * a2->second * c2->second));
                }
            }
        }
    return out;
}

Eigen::MatrixXd flavor_casimir_reduced(const SymmetryContext& ctx, const ReducedBasis& basis) {
    return reduce_terms(ctx, basis, flavor_casimir_apply);
}

// ---------------------------------------------------------------------------
// Estimates
// ---------------------------------------------------------------------------

std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        const std::uint64_t f = static_cast<std::uint64_t>(n - k + i);
        if (r > (~0ull) / f) throw std::overflow_error("binomial_u64: overflow");
        r = r * f / i;
    }
    return r;
}

double dim_estimate_total(int L, int n) {
    const double modes = 4.0 * L * L * L;
    const double log_binom =
        std::lgamma(modes + 1.0) - std::lgamma(n + 1.0) - std::lgamma(modes - n + 1.0);
    return std::exp(log_binom) / (48.0 * L * L * L);
}

double dim_estimate_sector(int L, int n_protons, int n_neutrons) {
    const int n = n_protons + n_neutrons;
    const double volume = static_cast<double>(L) * L * L;
    return std::pow(2.0, n) * std::pow(volume, n - 1) /
           (48.0 * std::tgamma(n_protons + 1.0) * std::tgamma(n_neutrons + 1.0));
}

double qubit_estimate(int L, int n) {
    const double log2_fact = std::lgamma(n + 1.0) / std::log(2.0);
    return 2.0 * n + (n - 1) * 3.0 * std::log2(static_cast<double>(L)) - log2_fact -
           std::log2(48.0);
}

} // namespace nuclat
