#include "nuclat/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace nuclat {

// ---------------------------------------------------------------------------
// SparseMatrix
// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(int dim, std::vector<std::int64_t> col_start, std::vector<int> row,
                           std::vector<double> val)
    : dim_(dim),
      col_start_(std::move(col_start)),
      row_(std::move(row)),
      val_(std::move(val)) {
    if (static_cast<int>(col_start_.size()) != dim_ + 1)
        throw std::invalid_argument("SparseMatrix: col_start size mismatch");
    if (row_.size() != val_.size() ||
        static_cast<std::int64_t>(row_.size()) != col_start_.back())
        throw std::invalid_argument("SparseMatrix: entry count mismatch");
}

void SparseMatrix::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero(dim_);
    for (int c = 0; c < dim_; ++c) {
        const double xc = x[c];
        for (std::int64_t i = col_start_[c]; i < col_start_[c + 1]; ++i)
            y[row_[i]] += val_[i] * xc;
    }
}

Eigen::MatrixXd SparseMatrix::dense() const {
    if (dim_ > 8192) throw std::runtime_error("SparseMatrix::dense: dimension above 8192");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int c = 0; c < dim_; ++c)
        for (std::int64_t i = col_start_[c]; i < col_start_[c + 1]; ++i)
            m(row_[i], c) += val_[i];
    return m;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

struct SpatialBlocks {
    SparseMatrix kinetic;
    Eigen::VectorXd pair_diag, triple_diag;
};

SpatialBlocks assemble_spatial(const ReducedBasis& basis, const LatticeConfig& cfg) {
    const SymmetryContext ctx(cfg.L);
    const HopTable hops = hop_table(cfg);
    const int V = cfg.n_sites();
    const int d = basis.spatial_dim();

    std::vector<std::int64_t> col_start(d + 1, 0);
    std::vector<int> rows;
    std::vector<double> vals;
    Eigen::VectorXd d2(d), d3(d);
    std::vector<std::pair<int, double>> entries;

    for (int b = 0; b < d; ++b) {
        const FockState& rep = basis.states[b].rep;
        const double nb = basis.states[b].norm;
        entries.clear();
        entries.emplace_back(b, rep.count * hops.diagonal);
        for (int i = 0; i < rep.count; ++i) {
            const Mode m = rep.modes[i];
            const int f = m / V;
            const int l = m % V;
            const auto ann = apply_annihilation(rep, m);
            for (const auto& [lp, amp] : hops.targets[l]) {
                const auto cre = apply_creation(ann->first, static_cast<Mode>(f * V + lp));
                if (!cre) continue;
                const auto hit = basis.spatial_index_of(ctx, cre->first);
                if (!hit) continue; // image orbit projects to zero
                entries.emplace_back(hit->first, amp * ann->second * cre->second *
                                                     hit->second *
                                                     (basis.states[hit->first].norm / nb));
            }
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b2) { return a.first < b2.first; });
        for (std::size_t i = 0; i < entries.size();) {
            double sum = entries[i].second;
            std::size_t j = i + 1;
            while (j < entries.size() && entries[j].first == entries[i].first)
                sum += entries[j++].second;
            rows.push_back(entries[i].first);
            vals.push_back(sum);
            i = j;
        }
        col_start[b + 1] = static_cast<std::int64_t>(rows.size());
        d2[b] = pair_count(rep, V);
        d3[b] = triple_count(rep, V);
    }
    return {SparseMatrix(d, std::move(col_start), std::move(rows), std::move(vals)),
            std::move(d2), std::move(d3)};
}

} // namespace

ReducedHamiltonian build_reduced_hamiltonian(const LatticeConfig& cfg, const SectorSpec& sector,
                                             std::optional<double> spin_s) {
    ReducedHamiltonian h;
    h.basis = build_reduced_basis(cfg, sector, spin_s);
    SpatialBlocks blocks = assemble_spatial(h.basis, cfg);
    h.kinetic = std::move(blocks.kinetic);
    h.pair_diag = std::move(blocks.pair_diag);
    h.triple_diag = std::move(blocks.triple_diag);
    h.c2_mev = cfg.c2_mev;
    h.c3_mev = cfg.c3_mev;
    if (h.basis.spin_s) {
        const Eigen::MatrixXd& q = h.basis.spin_vectors;
        Eigen::MatrixXd kq(q.rows(), q.cols());
        Eigen::VectorXd col(q.rows()), out(q.rows());
        for (int j = 0; j < q.cols(); ++j) {
            col = q.col(j);
            h.kinetic.apply(col, out);
            kq.col(j) = out;
        }
        h.kinetic_sel = q.transpose() * kq;
        h.pair_sel = q.transpose() * h.pair_diag.asDiagonal() * q;
        h.triple_sel = q.transpose() * h.triple_diag.asDiagonal() * q;
    }
    return h;
}

void ReducedHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    if (basis.spin_s) {
        y.noalias() = kinetic_sel * x;
        y.noalias() += c2_mev * (pair_sel * x);
        y.noalias() += c3_mev * (triple_sel * x);
        return;
    }
    kinetic.apply(x, y);
    y.array() += (c2_mev * pair_diag + c3_mev * triple_diag).array() * x.array();
}

Eigen::MatrixXd ReducedHamiltonian::matrix() const {
    if (basis.spin_s) return kinetic_sel + c2_mev * pair_sel + c3_mev * triple_sel;
    Eigen::MatrixXd m = kinetic.dense();
    m.diagonal() += c2_mev * pair_diag + c3_mev * triple_diag;
    return m;
}

// ---------------------------------------------------------------------------
// Ground state
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64_step(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

GroundState lanczos_ground(const ReducedHamiltonian& h, std::uint64_t seed) {
    const int d = h.dim();
    constexpr int kMaxKrylov = 320;
    constexpr int kMaxRestarts = 8;
    constexpr double kTol = 1e-9;

    Eigen::VectorXd v(d);
    std::uint64_t state = seed ^ 0x243F6A8885A308D3ull;
    for (int i = 0; i < d; ++i)
        v[i] = static_cast<double>(splitmix64_step(state) >> 11) * 0x1.0p-53 - 0.5;
    v.normalize();

    int total_iters = 0;
    for (int restart = 0; restart < kMaxRestarts; ++restart) {
        std::vector<Eigen::VectorXd> vs;
        vs.push_back(v);
        std::vector<double> alpha, beta;
        Eigen::VectorXd w(d);
        for (int j = 0; j < kMaxKrylov; ++j) {
            h.apply(vs[j], w);
            ++total_iters;
            const double a = vs[j].dot(w);
            alpha.push_back(a);
            w -= a * vs[j];
            if (j > 0) w -= beta[j - 1] * vs[j - 1];
            for (int pass = 0; pass < 2; ++pass)
                for (const Eigen::VectorXd& u : vs) w -= u.dot(w) * u;
            const double b = w.norm();

            const int k = j + 1;
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) t(i, i) = alpha[i];
            for (int i = 0; i + 1 < k; ++i) {
                t(i, i + 1) = beta[i];
                t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            const double theta = es.eigenvalues()[0];
            const double ritz_residual = b * std::abs(es.eigenvectors().col(0)[k - 1]);
            const bool krylov_exhausted = b < 1e-13;
            if (ritz_residual <= kTol * std::max(1.0, std::abs(theta)) || krylov_exhausted ||
                j + 1 == kMaxKrylov) {
                Eigen::VectorXd gv = Eigen::VectorXd::Zero(d);
                for (int i = 0; i < k; ++i) gv += es.eigenvectors().col(0)[i] * vs[i];
                gv.normalize();
                Eigen::VectorXd hv(d);
                h.apply(gv, hv);
                const double energy = gv.dot(hv);
                const double residual = (hv - energy * gv).norm();
                if (residual <= 10 * kTol * std::max(1.0, std::abs(energy)) ||
                    krylov_exhausted)
                    return {energy, std::move(gv), total_iters, residual};
                v = std::move(gv); // restart from the best Ritz vector
                break;
            }
            beta.push_back(b);
            vs.push_back(w / b);
        }
    }
    throw std::runtime_error("ground_state: Lanczos failed to converge");
}

} // namespace

GroundState ground_state(const ReducedHamiltonian& h, std::uint64_t seed) {
    const int d = h.dim();
    if (d == 0) throw std::invalid_argument("ground_state: empty basis");
    if (d <= 2048) {
        const Eigen::MatrixXd m = h.matrix();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("ground_state: dense eigensolve failed");
        GroundState g;
        g.energy_mev = es.eigenvalues()[0];
        g.vector = es.eigenvectors().col(0);
        g.residual = (m * g.vector - g.energy_mev * g.vector).norm();
        return g;
    }
    return lanczos_ground(h, seed);
}

// ---------------------------------------------------------------------------
// Dense sector oracle
// ---------------------------------------------------------------------------

Eigen::MatrixXd dense_sector_hamiltonian(const LatticeConfig& cfg, const SectorSpec& sector) {
    const std::vector<FockState> states = enumerate_sector(cfg, sector);
    const int d = static_cast<int>(states.size());
    if (d > 8192)
        throw std::runtime_error("dense_sector_hamiltonian: dimension above 8192");
    std::unordered_map<FockState, int, FockHash> index;
    index.reserve(states.size() * 2);
    for (int i = 0; i < d; ++i) index.emplace(states[i], i);

    const HopTable hops = hop_table(cfg);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (const FockTerm& term : apply_hamiltonian(states[j], cfg, hops))
            m(index.at(term.state), j) += term.amp;
    return m;
}

// ---------------------------------------------------------------------------
// Coupling fit
// ---------------------------------------------------------------------------

namespace {

/// Root of the nondecreasing function f on [lo, hi] (bracket auto-expanded):
/// returns c with |f(c) - target| <= tol.
double solve_monotone(const std::function<double(double)>& f, double target, double lo,
                      double hi, double tol) {
    const double span = std::max(hi - lo, 1.0);
    double flo = f(lo);
    double fhi = f(hi);
    for (int guard = 0; flo > target && guard < 60; ++guard) {
        lo -= span;
        flo = f(lo);
    }
    for (int guard = 0; fhi < target && guard < 60; ++guard) {
        hi += span;
        fhi = f(hi);
    }
    if (flo > target || fhi < target)
        throw std::runtime_error("fit_couplings: could not bracket the target energy");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm - target) <= tol) return mid;
        if (fm < target)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("fit_couplings: bisection did not reach tolerance");
}

} // namespace

FitResult fit_couplings(const LatticeConfig& base, const FitOptions& options,
                        const FitTargets& targets) {
    LatticeConfig cfg = base;
    cfg.L = options.fit_L;
    cfg.validate();

    FitResult out;

    ReducedHamiltonian h2 = build_reduced_hamiltonian(cfg, SectorSpec{1, 1, +2});
    const auto two_body_energy = [&](double c2) {
        h2.set_couplings(c2, 0.0);
        ++out.deuteron_solves;
        return ground_state(h2).energy_mev;
    };
    out.c2_mev = solve_monotone(two_body_energy, targets.deuteron_mev, options.c2_lo,
                                options.c2_hi, options.tol_mev);
    out.deuteron_energy_mev = two_body_energy(out.c2_mev);

    ReducedHamiltonian h3 = build_reduced_hamiltonian(cfg, SectorSpec{1, 2, +1}, 0.5);
    const auto three_body_energy = [&](double c3) {
        h3.set_couplings(out.c2_mev, c3);
        ++out.triton_solves;
        return ground_state(h3).energy_mev;
    };
    out.c3_mev = solve_monotone(three_body_energy, targets.triton_mev, options.c3_lo,
                                options.c3_hi, options.tol_mev);
    out.triton_energy_mev = three_body_energy(out.c3_mev);

    if (options.with_he4) {
        LatticeConfig cfg4 = base;
        cfg4.L = options.he4_L;
        cfg4.c2_mev = out.c2_mev;
        cfg4.c3_mev = out.c3_mev;
        const ReducedHamiltonian h4 = build_reduced_hamiltonian(cfg4, SectorSpec{2, 2, 0});
        out.he4_energy_mev = ground_state(h4).energy_mev;
    }
    return out;
}

} // namespace nuclat
