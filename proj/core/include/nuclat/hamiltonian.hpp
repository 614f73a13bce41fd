#pragma once

#include "nuclat/fock.hpp"
#include "nuclat/lattice.hpp"
#include "nuclat/symmetry.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace nuclat {

/// Compressed-sparse-column matrix with a matrix-free apply. Built once from
/// per-column entries; immutable afterwards.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int dim, std::vector<std::int64_t> col_start, std::vector<int> row,
                 std::vector<double> val);

    int dim() const { return dim_; }
    std::int64_t nonzeros() const { return static_cast<std::int64_t>(val_.size()); }

    /// y = A x (y is overwritten; x and y must have size dim()).
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::MatrixXd dense() const;

private:
    int dim_ = 0;
    std::vector<std::int64_t> col_start_;
    std::vector<int> row_;
    std::vector<double> val_;
};

/// Sector Hamiltonian on the symmetry-reduced basis, split so that coupling
/// changes never force reassembly: H = K + c2 * diag(pair) + c3 * diag(triple)
/// on the spatial orbit basis; when the basis carries a channel selection the
/// three blocks are also stored projected into the selected basis.
struct ReducedHamiltonian {
    ReducedBasis basis;
    SparseMatrix kinetic;        ///< spatial basis; includes the n*T(0) diagonal
    Eigen::VectorXd pair_diag;   ///< same-site flavor pairs per representative
    Eigen::VectorXd triple_diag; ///< same-site flavor triples per representative

    /// Projections into the selected basis (empty when no selection).
    Eigen::MatrixXd kinetic_sel, pair_sel, triple_sel;

    double c2_mev = 0.0;
    double c3_mev = 0.0;

    int spatial_dim() const { return basis.spatial_dim(); }
    int dim() const { return basis.dim(); }

    void set_couplings(double c2, double c3) {
        c2_mev = c2;
        c3_mev = c3;
    }

    /// y = H x in the current basis (selected when the basis is selected,
    /// spatial otherwise).
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

    /// Dense Hamiltonian in the current basis. Guarded against dimensions
    /// above 8192 (use apply + iterative methods there).
    Eigen::MatrixXd matrix() const;
};

ReducedHamiltonian build_reduced_hamiltonian(const LatticeConfig& cfg, const SectorSpec& sector,
                                             std::optional<double> spin_s = std::nullopt);

/// Lowest eigenpair of a reduced Hamiltonian. Dense solve for dim <= 2048;
/// otherwise matrix-free Lanczos with full reorthogonalization (residual
/// tolerance 1e-9 relative, deterministic seeded start vector, restarts).
struct GroundState {
    double energy_mev = 0.0;
    Eigen::VectorXd vector;      ///< in the Hamiltonian's current basis
    int lanczos_iterations = 0;  ///< 0 on the dense path
    double residual = 0.0;       ///< ||H v - E v||
};

GroundState ground_state(const ReducedHamiltonian& h, std::uint64_t seed = 0);

/// Dense Hamiltonian over the explicit sector enumeration, in the order of
/// enumerate_sector. Independent of the orbit machinery; oracle scale only
/// (dimension guard 8192).
Eigen::MatrixXd dense_sector_hamiltonian(const LatticeConfig& cfg, const SectorSpec& sector);

// ---------------------------------------------------------------------------
// Coupling fit
// ---------------------------------------------------------------------------

struct FitTargets {
    double deuteron_mev = -2.22;
    double triton_mev = -8.48;
    double he4_mev = -28.30; ///< prediction reference, not fitted
};

struct FitOptions {
    int fit_L = 6;            ///< lattice size the couplings are fixed at
    double tol_mev = 1e-6;    ///< |E - target| convergence tolerance
    bool with_he4 = false;    ///< also compute the 4-particle prediction
    int he4_L = 6;            ///< lattice size for that prediction
    double c2_lo = -400.0;    ///< initial two-body bracket (expanded if needed)
    double c2_hi = 0.0;
    double c3_lo = 0.0;       ///< initial three-body bracket (expanded if needed)
    double c3_hi = 400.0;
};

struct FitResult {
    double c2_mev = 0.0;
    double c3_mev = 0.0;
    double deuteron_energy_mev = 0.0; ///< at fit_L with fitted couplings
    double triton_energy_mev = 0.0;
    std::optional<double> he4_energy_mev;
    int deuteron_solves = 0;
    int triton_solves = 0;
};

/// Sequential fit at fit_L: c2 against the two-nucleon target (whose energy is
/// c3-independent: two particles form no same-site triples), then c3 against
/// the three-nucleon target in the spin-1/2 channel. Both energies are
/// monotone in their coupling, so bracketing plus bisection converges
/// unconditionally; brackets are auto-expanded when needed.
FitResult fit_couplings(const LatticeConfig& base, const FitOptions& options = {},
                        const FitTargets& targets = {});

} // namespace nuclat
