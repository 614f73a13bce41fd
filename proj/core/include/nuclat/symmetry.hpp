#pragma once

#include "nuclat/fock.hpp"
#include "nuclat/lattice.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace nuclat {

// ---------------------------------------------------------------------------
// Space group of the periodic lattice: translations semidirect the 48
// signed-permutation point operations (rotations + reflections about the
// origin). Order 48 L^3.
// ---------------------------------------------------------------------------

/// Signed axis permutation: output coordinate i reads sign[i] * input[perm[i]].
struct PointOp {
    std::array<int, 3> perm;
    std::array<int, 3> sign;
};

/// All 48 point operations in a fixed deterministic order; index 0 is the
/// identity. Verified closed under composition and inversion by the tests.
const std::array<PointOp, 48>& octahedral_ops();

/// Group element: point operation followed by a translation,
/// site -> point(site) + shift (mod L per axis).
struct GroupElement {
    int point = 0; ///< index into octahedral_ops()
    Coord shift{};
};

/// Per-volume lookup tables for fast group action on sites.
class SymmetryContext {
public:
    explicit SymmetryContext(int L);

    int L() const { return L_; }
    int n_sites() const { return V_; }
    long group_order() const { return 48L * V_; }

    /// image of `site` under point op r (about the origin, wrapped)
    int point_site(int r, int site) const { return point_table_[r * V_ + site]; }
    Coord coords(int site) const { return {cx_[site], cy_[site], cz_[site]}; }
    int wrap(int v) const { return wrap_[v + L_]; } ///< v in [-L, 2L) -> [0, L)

    int site_at(int x, int y, int z) const { return x + L_ * (y + L_ * z); }

private:
    int L_, V_;
    std::vector<std::uint16_t> point_table_; // [48][V]
    std::vector<std::uint8_t> cx_, cy_, cz_; // site -> coordinates
    std::vector<std::uint8_t> wrap_;         // [v + L] = v mod L
};

/// Apply a group element to a Fock state. Returns (image state, sign), where
/// the sign is the fermionic reordering parity of the relabeled modes.
std::pair<FockState, int> act(const SymmetryContext& ctx, const GroupElement& g,
                              const FockState& s);

// ---------------------------------------------------------------------------
// Orbit machinery
// ---------------------------------------------------------------------------

struct Canonical {
    FockState rep;        ///< minimum occupation-bitset value over the orbit
    int sign = 1;         ///< g|s> = sign |rep> for the element below
    GroupElement element; ///< first group element reaching the minimum
};

/// Canonical orbit representative of `s` with mapping sign. Scans the 48 point
/// images, but only translations that move some occupied coordinate to zero on
/// each axis: any other translate is strictly reducible, so the minimum is
/// always among these <= 48 n^3 candidates. Requires s.count <= 5.
Canonical canonicalize(const SymmetryContext& ctx, const FockState& s);

struct OrbitStats {
    std::uint32_t stabilizer_order = 0;
    long sign_sum = 0; ///< sum of signs over the stabilizer; 0 or stabilizer_order
    std::uint64_t orbit_size = 0;
};

/// Stabilizer subgroup statistics of `rep`. The projected norm of the orbit is
/// sqrt(sign_sum / group_order); orbits with sign_sum == 0 project to zero.
OrbitStats orbit_stats(const SymmetryContext& ctx, const FockState& rep);

// ---------------------------------------------------------------------------
// Symmetry-reduced basis (zero total momentum, trivial point-group irrep,
// optionally a fixed total-spin eigenspace)
// ---------------------------------------------------------------------------

struct SymBasisState {
    FockState rep;
    std::uint32_t orbit_size = 0;
    double norm = 0.0; ///< norm of the projected orbit vector
};

struct ReducedBasis {
    LatticeConfig cfg;
    SectorSpec sector;
    std::vector<SymBasisState> states; ///< ascending by rep bitset value
    std::optional<double> spin_s;      ///< total spin S if the basis is S^2-selected
    Eigen::MatrixXd spin_vectors;      ///< spatial_dim x dim orthonormal columns

    /// sorted (pinned-state key, index*2 + sign bit) pairs over every sector
    /// state whose lowest occupied mode sits at site 0; backs fast lookups
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pinned_index;

    int spatial_dim() const { return static_cast<int>(states.size()); }
    int dim() const { return spin_s ? static_cast<int>(spin_vectors.cols()) : spatial_dim(); }

    /// Map an arbitrary sector state to (spatial basis index, sign), or
    /// nullopt when its orbit projects to zero.
    std::optional<std::pair<int, int>> spatial_index_of(const SymmetryContext& ctx,
                                                        const FockState& s) const;
};

/// Enumerate orbit representatives of the sector and discard zero-norm
/// orbits. When spin_s is given (e.g. 0.5), additionally restrict to the
/// ground-state channel of attractive flavor-blind forces: the joint
/// eigenspace of the flavor-exchange Casimir at its minimal value n(5-n)
/// (flavor-antisymmetric, i.e. spatially symmetric multiplets) and of S^2 at
/// S(S+1), both matched within 1e-6. Passing spin_s requires a fixed two_sz
/// in the sector and a spatial dimension small enough for dense solves.
ReducedBasis build_reduced_basis(const LatticeConfig& cfg, const SectorSpec& sector,
                                 std::optional<double> spin_s = std::nullopt);

/// Total-spin-squared operator on the spatial orbit basis (dense symmetric,
/// spatial_dim^2). Uses S^2 = S_- S_+ + Sz (Sz + 1).
Eigen::MatrixXd s_squared_reduced(const SymmetryContext& ctx, const ReducedBasis& basis);

/// S^2 applied to one Fock state: list of (state, coefficient) terms.
std::vector<std::pair<FockState, double>> s_squared_apply(const FockState& s, int n_sites);

/// Flavor-exchange Casimir C = sum_{sigma,tau} F_{sigma tau} F_{tau sigma}
/// with F_{tau sigma} = sum_l c^dag_{l,tau} c_{l,sigma}. Commutes with every
/// spatial operation and with flavor-blind Hamiltonians; its eigenvalues
/// label the flavor permutation symmetry classes (for n particles the
/// flavor-antisymmetric class sits at the minimum, n(5-n)).
std::vector<std::pair<FockState, double>> flavor_casimir_apply(const FockState& s, int n_sites);

/// The Casimir above on the spatial orbit basis (dense symmetric).
Eigen::MatrixXd flavor_casimir_reduced(const SymmetryContext& ctx, const ReducedBasis& basis);

// ---------------------------------------------------------------------------
// Dimension and qubit-count estimates
// ---------------------------------------------------------------------------

std::uint64_t binomial_u64(int n, int k);

/// C(4 L^3, n) / (48 L^3): generic estimate at fixed total particle number.
double dim_estimate_total(int L, int n);

/// 2^n (L^3)^(n-1) / (48 Np! Nn!): estimate at fixed proton/neutron numbers.
double dim_estimate_sector(int L, int n_protons, int n_neutrons);

/// 2n + (n-1) log2(L^3) - log2(n!) - log2(48): compact-encoding qubit estimate.
double qubit_estimate(int L, int n);

} // namespace nuclat
