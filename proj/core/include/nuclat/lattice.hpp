#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace nuclat {

/// Physical and geometric parameters of a periodic L^3 lattice of nucleons.
/// Energies are in MeV, lengths in fm throughout.
struct LatticeConfig {
    int L = 4;                          ///< sites per dimension
    double a_fm = 1.160747;             ///< lattice spacing
    double mass_mev = 938.9187;         ///< nucleon mass
    double hbar_c_mev_fm = 197.3269804; ///< conversion constant
    double c2_mev = -143.202887;        ///< two-body contact coupling
    double c3_mev = 107.232753;         ///< three-body contact coupling

    int n_sites() const { return L * L * L; }
    int n_modes() const { return 4 * L * L * L; }

    /// Throws std::invalid_argument unless 2 <= L <= 8 and a_fm, mass_mev,
    /// hbar_c_mev_fm are positive.
    void validate() const;
};

/// Parse "key = value" lines ('#' starts a comment). Recognized keys:
/// L, a_fm, mass_mev, hbar_c_mev_fm, c2_mev, c3_mev. Unknown keys throw.
LatticeConfig parse_config(std::istream& in);

/// Load and validate a config file; throws std::runtime_error if unreadable.
LatticeConfig load_config(const std::string& path);

// ---------------------------------------------------------------------------
// site/coordinate indexing: idx = x + L*y + L^2*z, x fastest
// ---------------------------------------------------------------------------

struct Coord {
    int x = 0, y = 0, z = 0;
    bool operator==(const Coord&) const = default;
};

int site_index(Coord c, int L);
Coord site_coords(int idx, int L);

/// All L^3 integer momentum-mode triples, each component running over
/// {-floor(L/2), ..., ceil(L/2)-1}; x component fastest.
std::vector<Coord> momentum_modes(int L);

/// Free-particle energy (hbar c)^2 |k|^2 / (2 m) in MeV for the mode triple n,
/// where k_i = 2 pi n_i / (L a).
double dispersion(const LatticeConfig& cfg, Coord mode);

/// Kinetic hopping profile per displacement class:
/// t[d] = (1/L^3) sum_modes E(k) cos(2 pi n.d / L), indexed by site_index(d).
/// The quadratic dispersion separates per axis, so t[d] vanishes whenever two
/// or more components of d are nonzero; hops are axis-aligned.
std::vector<double> kinetic_profile(const LatticeConfig& cfg);

/// Dense L^3 x L^3 hopping matrix T with T(l,l') = t[(r_l - r_l') mod L].
/// Real symmetric; eigenvalues reproduce the dispersion multiset exactly.
Eigen::MatrixXd kinetic_matrix(const LatticeConfig& cfg);

/// Off-diagonal hops reachable from one site: pairs (site', amplitude) with
/// |amplitude| above `rel_cut` * max|t|. Diagonal excluded. Same list shape
/// for every source site; `hop_targets(cfg)[l]` lists absolute target sites.
struct HopTable {
    std::vector<std::vector<std::pair<int, double>>> targets; // [site] -> (site', t)
    double diagonal = 0.0;                                    // t[0]
};
HopTable hop_table(const LatticeConfig& cfg, double rel_cut = 1e-12);

} // namespace nuclat
