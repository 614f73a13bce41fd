#pragma once

#include "nuclat/hamiltonian.hpp"
#include "nuclat/lattice.hpp"
#include "nuclat/pauli.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nuclat {

// ---------------------------------------------------------------------------
// Gray code
// ---------------------------------------------------------------------------

/// k-th Gray code as an integer: k XOR (k >> 1).
std::uint32_t gray_code_value(std::uint32_t k);

/// k-th Gray code as an eta-bit string, most-significant bit first.
/// Throws std::domain_error unless 0 <= k < 2^eta and 0 <= eta <= 30.
std::string gray_code(std::int64_t k, int eta);

/// Dense head of the Gray sequence: basis state k of an N-dimensional space
/// maps to codeword gray_code_value(k) on eta = ceil(log2 N) qubits (an
/// explicit larger eta may be forced). The unused codewords are the tail of
/// the sequence, k = N .. 2^eta - 1.
struct GrayCodeMap {
    int dim = 0;
    int eta = 0;
    std::vector<std::uint32_t> codes; ///< codes[k] for k < dim

    std::uint32_t unused_code(int k) const { return gray_code_value(static_cast<std::uint32_t>(dim + k)); }
    int n_unused() const { return static_cast<int>((std::uint32_t(1) << eta) - std::uint32_t(dim)); }
};

GrayCodeMap make_gray_map(int dim, std::optional<int> eta = std::nullopt);

// ---------------------------------------------------------------------------
// Gray-code dense encoding
// ---------------------------------------------------------------------------

/// Pauli decomposition of the operator sum_{ij} block(i,j) |g_i><g_j| on
/// map.eta qubits: the dense matrix of the result equals `block` on the
/// codeword rows/columns and is zero on unused codewords. `block` must be
/// symmetric (real Hermitian). Guarded against eta > 10.
PauliSum encode_gray(const Eigen::MatrixXd& block, const GrayCodeMap& map);

/// Convenience: encode the Hamiltonian's dense matrix in its current basis
/// with the default map for its dimension.
PauliSum encode_gray(const ReducedHamiltonian& h);

/// Hq + lambda * (projector onto the unused codewords). The physical block is
/// unchanged; lambda >= 0.
PauliSum add_penalty(const PauliSum& hq, const GrayCodeMap& map, double lambda);

// ---------------------------------------------------------------------------
// Jordan-Wigner encoding
// ---------------------------------------------------------------------------

/// Ladder operator on an n_modes-qubit register (qubit q = mode q, |1> =
/// occupied): (X -+ iY)/2 on the target tensored with Z on every lower-index
/// qubit (create -> -, annihilate -> +). Mode order is the flavor-major Fock
/// order, so signs match the Fock engine exactly.
PauliSum jordan_wigner_op(int mode, bool create, int n_modes);

/// Number operator (I - Z)/2 on the target qubit.
PauliSum jordan_wigner_number(int mode, int n_modes);

/// Full lattice Hamiltonian on the 4 L^3-qubit register: kinetic hops and
/// diagonal for every nonzero hopping amplitude, plus the same-site two- and
/// three-flavor contact terms with the configured couplings. Intended for
/// term-level work and sparse bitstring application (L = 2 scale); never
/// materialized densely.
PauliSum jw_hamiltonian(const LatticeConfig& cfg);

/// Structural Pauli-term census of the encoded Hamiltonian on L^3 sites.
/// `kinetic_terms` counts the kinetic part for a generic real symmetric
/// hopping profile with all pairs coupled (the scaling-law convention:
/// 4 V(V-1) two-string hops + 4V diagonal Z + identity); `onsite_terms`
/// counts the contact-interaction strings (unit couplings); and
/// `physical_kinetic_terms` counts the kinetic part for the default
/// axis-aligned dispersion, which hops only along axes.
struct JwCensus {
    int L = 0;
    long long kinetic_terms = 0;          ///< generic symmetric profile
    long long onsite_terms = 0;           ///< contact terms, unit couplings
    long long physical_kinetic_terms = 0; ///< configured dispersion
};

JwCensus jw_census(int L);

// ---------------------------------------------------------------------------
// Qubit-resource report
// ---------------------------------------------------------------------------

/// One row per lattice size: reduced-basis dimension, the compact-encoding
/// qubit count ceil(log2 dim) (0 when dim = 1), and the one-qubit-per-mode
/// count 4 L^3. A 3 L^3 variant (one qubit per site and occupiable-flavor
/// slot under three-nucleon occupancy) circulates in qubit-count comparisons
/// and is reported alongside without endorsing either convention.
struct QubitReportRow {
    int L = 0;
    long long dim = 0;
    int n_q_gray = 0;
    int n_q_jw_mode = 0; ///< 4 L^3
    int n_q_jw_site = 0; ///< 3 L^3, comparison variant
};

std::vector<QubitReportRow> qubit_report(const std::vector<int>& l_list, const SectorSpec& sector,
                                         std::optional<double> spin_s);

/// ceil(log2 n) for n >= 1 (0 for n = 1).
int ceil_log2(std::uint64_t n);

} // namespace nuclat
