#include "nuclat/hamiltonian.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

using namespace nuclat;

namespace {

// Frozen ground-state energies at the shipped couplings; regenerating them
// only needs this library (ground_state on the matching sector), so any drift
// here means the physics changed, not the bookkeeping.
constexpr double kDeuteronL2 = -24.444135;
constexpr double kDeuteronL3 = -11.650240;
constexpr double kTritonL2 = -68.338503;
constexpr double kTritonL6 = -8.481743;
constexpr double kFrozenTol = 2e-5;

LatticeConfig config_at(int L) {
    LatticeConfig cfg;
    cfg.L = L;
    return cfg;
}

double dense_ground(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
        .eigenvalues()[0];
}

} // namespace

TEST_CASE("sparse matrix: apply equals dense, constructor validates shapes") {
    // Column-compressed [[1, 0], [2, 3]]: column 0 holds rows {0, 1}.
    const SparseMatrix m(2, {0, 2, 3}, {0, 1, 1}, {1.0, 2.0, 3.0});
    CHECK(m.dim() == 2);
    CHECK(m.nonzeros() == 3);

    Eigen::VectorXd x(2), y;
    x << 5.0, 7.0;
    m.apply(x, y);
    CHECK(y[0] == doctest::Approx(5.0));
    CHECK(y[1] == doctest::Approx(10.0 + 21.0));

    const Eigen::MatrixXd d = m.dense();
    CHECK(d(0, 0) == 1.0);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(1, 0) == 2.0);
    CHECK(d(1, 1) == 3.0);
    CHECK((d * x - y).norm() == doctest::Approx(0.0));

    CHECK_THROWS_AS(SparseMatrix(2, {0, 1}, {0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix(2, {0, 1, 3}, {0, 1}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix(2, {0, 1, 2}, {0, 1}, {1.0}), std::invalid_argument);
}

TEST_CASE("two nucleons, smallest volume: reduced solve matches the raw-sector oracle") {
    const LatticeConfig cfg = config_at(2);
    const SectorSpec sector{1, 1, +2};

    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, sector);
    CHECK(h.dim() == 4);
    CHECK(h.spatial_dim() == 4);

    const GroundState g = ground_state(h);
    CHECK(g.lanczos_iterations == 0); // dense path
    CHECK(g.residual <= 1e-8);

    // Oracle: the same sector without any symmetry reduction (dim 64).
    const Eigen::MatrixXd full = dense_sector_hamiltonian(cfg, sector);
    REQUIRE(full.rows() == 64);
    CHECK((full - full.transpose()).norm() <= 1e-10);
    CHECK(g.energy_mev == doctest::Approx(dense_ground(full)).epsilon(1e-10));

    CHECK(std::abs(g.energy_mev - kDeuteronL2) <= kFrozenTol);
}

TEST_CASE("two nucleons scale check at L = 3 plus coupling monotonicity") {
    const LatticeConfig cfg = config_at(3);
    const SectorSpec sector{1, 1, +2};

    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, sector);
    CHECK(h.dim() == 4);
    const double e = ground_state(h).energy_mev;
    CHECK(std::abs(e - kDeuteronL3) <= kFrozenTol);

    const Eigen::MatrixXd full = dense_sector_hamiltonian(cfg, sector); // dim 729
    CHECK(e == doctest::Approx(dense_ground(full)).epsilon(1e-9));

    // Kinetic-only ground state is the zero-momentum pair: energy ~ 0.
    h.set_couplings(0.0, 0.0);
    CHECK(std::abs(ground_state(h).energy_mev) <= 1e-8);

    // More attractive c2 never raises the ground state, and the two-particle
    // energy is exactly c3-independent (no same-site triples exist).
    h.set_couplings(cfg.c2_mev - 20.0, cfg.c3_mev);
    const double deeper = ground_state(h).energy_mev;
    CHECK(deeper <= e - 1.0);
    h.set_couplings(cfg.c2_mev - 20.0, cfg.c3_mev + 500.0);
    CHECK(ground_state(h).energy_mev == doctest::Approx(deeper).epsilon(1e-12));
}

TEST_CASE("three nucleons, smallest volume: channel, spatial, and raw sector agree") {
    const LatticeConfig cfg = config_at(2);
    const SectorSpec sector{1, 2, +1};

    ReducedHamiltonian channel = build_reduced_hamiltonian(cfg, sector, 0.5);
    CHECK(channel.dim() == 7);
    CHECK(channel.spatial_dim() == 27);
    const double e_channel = ground_state(channel).energy_mev;
    CHECK(std::abs(e_channel - kTritonL2) <= kFrozenTol);

    // The spin-1/2 channel must carry the true sector ground state.
    ReducedHamiltonian spatial = build_reduced_hamiltonian(cfg, sector);
    CHECK(spatial.dim() == 27);
    CHECK(ground_state(spatial).energy_mev == doctest::Approx(e_channel).epsilon(1e-10));

    const Eigen::MatrixXd full = dense_sector_hamiltonian(cfg, sector);
    REQUIRE(full.rows() == 736);
    CHECK(e_channel == doctest::Approx(dense_ground(full)).epsilon(1e-9));
}

TEST_CASE("matrix-free apply agrees with the assembled dense matrix") {
    const LatticeConfig cfg = config_at(3);
    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, {1, 2, +1}, 0.5);
    REQUIRE(h.dim() == 14);

    const Eigen::MatrixXd m = h.matrix();
    CHECK((m - m.transpose()).norm() <= 1e-9);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd x =
            Eigen::VectorXd::NullaryExpr(h.dim(), [&](Eigen::Index i) {
                return std::sin(0.7 * static_cast<double>(i + 1) * (trial + 1));
            });
        Eigen::VectorXd y;
        h.apply(x, y);
        CHECK((y - m * x).norm() <= 1e-9 * (1.0 + y.norm()));
    }
}

TEST_CASE("iterative path: three nucleons at L = 6 reach the frozen energy") {
    const LatticeConfig cfg = config_at(6);
    ReducedHamiltonian h = build_reduced_hamiltonian(cfg, {1, 2, +1});
    REQUIRE(h.dim() == 2261); // above the dense cutoff, so Lanczos runs

    const GroundState g = ground_state(h);
    CHECK(g.lanczos_iterations > 0);
    CHECK(g.residual <= 1e-6 * std::abs(g.energy_mev));
    CHECK(std::abs(g.energy_mev - kTritonL6) <= kFrozenTol);

    // Rayleigh quotient of the returned vector reproduces the eigenvalue.
    Eigen::VectorXd y;
    h.apply(g.vector, y);
    CHECK(g.vector.dot(y) == doctest::Approx(g.energy_mev).epsilon(1e-9));
}

TEST_CASE("four nucleons, smallest volume: spin channel matches the spatial solve") {
    const LatticeConfig cfg = config_at(2);
    ReducedHamiltonian channel = build_reduced_hamiltonian(cfg, {2, 2, 0}, 0.0);
    CHECK(channel.dim() == 19);
    CHECK(channel.spatial_dim() == 166);

    ReducedHamiltonian spatial = build_reduced_hamiltonian(cfg, {2, 2, 0});
    const double e_spatial = ground_state(spatial).energy_mev;
    CHECK(ground_state(channel).energy_mev == doctest::Approx(e_spatial).epsilon(1e-10));
}

TEST_CASE("oracle guard: raw-sector dense assembly refuses oversized sectors") {
    CHECK_THROWS_AS(dense_sector_hamiltonian(config_at(3), {1, 2, +1}), std::runtime_error);
}

TEST_CASE("coupling fit: bracket-independent and exact on synthetic targets") {
    const LatticeConfig base = config_at(2);

    FitTargets targets;
    targets.deuteron_mev = -20.0;
    targets.triton_mev = -60.0;

    FitOptions opts;
    opts.fit_L = 2;
    opts.tol_mev = 1e-9;

    const FitResult fit = fit_couplings(base, opts, targets);
    CHECK(std::abs(fit.deuteron_energy_mev - targets.deuteron_mev) <= 1e-8);
    CHECK(std::abs(fit.triton_energy_mev - targets.triton_mev) <= 1e-8);
    CHECK(fit.deuteron_solves > 0);
    CHECK(fit.triton_solves > 0);
    CHECK_FALSE(fit.he4_energy_mev.has_value());

    // The fitted couplings actually reproduce the targets on fresh solves.
    LatticeConfig fitted = base;
    fitted.c2_mev = fit.c2_mev;
    fitted.c3_mev = fit.c3_mev;
    CHECK(std::abs(ground_state(build_reduced_hamiltonian(fitted, {1, 1, +2})).energy_mev -
                   targets.deuteron_mev) <= 1e-7);
    CHECK(std::abs(ground_state(build_reduced_hamiltonian(fitted, {1, 2, +1}, 0.5)).energy_mev -
                   targets.triton_mev) <= 1e-7);

    // A different (valid) starting bracket lands on the same couplings.
    FitOptions other = opts;
    other.c3_lo = 50.0;
    other.c3_hi = 350.0;
    other.c2_lo = -300.0;
    const FitResult fit2 = fit_couplings(base, other, targets);
    CHECK(fit2.c2_mev == doctest::Approx(fit.c2_mev).epsilon(1e-9));
    CHECK(fit2.c3_mev == doctest::Approx(fit.c3_mev).epsilon(1e-9));
}

TEST_CASE("coupling fit at the production volume pins both physical targets") {
    const FitResult fit = fit_couplings(config_at(6)); // defaults: fit_L = 6, 1e-6
    CHECK(std::abs(fit.deuteron_energy_mev - (-2.22)) <= 1e-6);
    CHECK(std::abs(fit.triton_energy_mev - (-8.48)) <= 1e-6);
    CHECK(fit.c2_mev > -144.0);
    CHECK(fit.c2_mev < -142.0);
    CHECK(fit.c3_mev > 105.0);
    CHECK(fit.c3_mev < 108.0);
}

TEST_CASE("in-house eigensolver helper agrees with Eigen on a dense sample") {
    const LatticeConfig cfg = config_at(2);
    const Eigen::MatrixXd full = dense_sector_hamiltonian(cfg, {1, 1, +2});
    const double direct = dense_ground(full);
    const double via_helper = testutil::lowest_eigenvalue(
        static_cast<int>(full.rows()),
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = full * x; });
    CHECK(via_helper == doctest::Approx(direct).epsilon(1e-8));
}
