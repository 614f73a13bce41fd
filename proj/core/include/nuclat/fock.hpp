#pragma once

#include "nuclat/lattice.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nuclat {

// ---------------------------------------------------------------------------
// Single-particle modes. flavor: 0 = p-up, 1 = p-down, 2 = n-up, 3 = n-down.
// mode(flavor, site) = flavor * L^3 + site  (flavor-major).
// ---------------------------------------------------------------------------

using Mode = std::uint16_t;

inline Mode mode_of(int flavor, int site, int n_sites) {
    return static_cast<Mode>(flavor * n_sites + site);
}
inline int flavor_of(Mode m, int n_sites) { return m / n_sites; }
inline int site_of(Mode m, int n_sites) { return m % n_sites; }
inline bool is_proton(int flavor) { return flavor < 2; }
inline bool is_spin_up(int flavor) { return (flavor & 1) == 0; }

/// Occupation-number state over the 4 L^3 modes, stored as the sorted list of
/// occupied modes. Capacity suffices for every supported nucleus (n <= 4) plus
/// small toy registers used in tests.
struct FockState {
    static constexpr int kMaxOccupied = 8;

    std::array<Mode, kMaxOccupied> modes{}; // ascending; entries [0, count)
    std::uint8_t count = 0;

    bool occupied(Mode m) const {
        for (int i = 0; i < count; ++i) {
            if (modes[i] == m) return true;
            if (modes[i] > m) return false;
        }
        return false;
    }
    /// number of occupied modes strictly below m
    int rank_below(Mode m) const {
        int r = 0;
        while (r < count && modes[r] < m) ++r;
        return r;
    }
    bool operator==(const FockState& o) const {
        if (count != o.count) return false;
        for (int i = 0; i < count; ++i)
            if (modes[i] != o.modes[i]) return false;
        return true;
    }
};

/// Build from an arbitrary (unsorted, duplicate-free) mode list.
FockState make_state(std::span<const Mode> occupied);
FockState make_state(std::initializer_list<Mode> occupied);

/// Compare two states by the integer value of their occupation bitsets,
/// i.e. sum over occupied modes of 2^mode.
bool bitset_less(const FockState& a, const FockState& b);

/// Pack into one 64-bit key preserving bitset order among equal-count states.
/// Requires count <= 5 and every mode < 2048 (covers 4*L^3 modes up to L = 8).
/// Bit 3 of the result is always zero, so callers may stash a flag there.
std::uint64_t pack_key(const FockState& s);

/// Inverse of pack_key. Ignores bit 3 (the caller flag bit).
FockState unpack_key(std::uint64_t key);

struct FockHash {
    std::size_t operator()(const FockState& s) const;
};

std::string to_string(const FockState& s, int n_sites);

// ---------------------------------------------------------------------------
// Fermionic elementary operators. Signs follow the convention
// c^dag_m |...> = (-1)^(number of occupied modes below m) |... m ...>.
// ---------------------------------------------------------------------------

/// Result (state', sign) of c^dag_m |s>, or nullopt if m is already occupied.
std::optional<std::pair<FockState, int>> apply_creation(const FockState& s, Mode m);

/// Result (state', sign) of c_m |s>, or nullopt if m is empty.
std::optional<std::pair<FockState, int>> apply_annihilation(const FockState& s, Mode m);

/// (-1)^(occupied modes below m); the string factor both mappings share.
int jw_sign(const FockState& s, Mode m);

/// Relabel every occupied mode through `perm` (a full permutation of all
/// modes), resort, and return the new state together with the permutation
/// parity picked up by reordering the fermionic operators.
std::pair<FockState, int> apply_mode_permutation(const FockState& s, std::span<const Mode> perm);

// ---------------------------------------------------------------------------
// Sectors and state enumeration
// ---------------------------------------------------------------------------

struct SectorSpec {
    int n_protons = 0;
    int n_neutrons = 0;
    std::optional<int> two_sz; ///< twice the total spin projection, if fixed

    int n_particles() const { return n_protons + n_neutrons; }
    void validate(int n_sites) const; ///< throws std::invalid_argument
};

int two_sz_of(const FockState& s, int n_sites);
int proton_count_of(const FockState& s, int n_sites);
int neutron_count_of(const FockState& s, int n_sites);

/// All Fock states of the sector, ascending by occupation-bitset value.
/// Intended for small volumes; throws std::invalid_argument if the sector
/// holds more than ~2^24 states.
std::vector<FockState> enumerate_sector(const LatticeConfig& cfg, const SectorSpec& sector);

/// Stream the subset of sector states whose lowest occupied mode sits at
/// site 0. Every translation orbit contains at least one such state, which is
/// what the symmetry reduction enumerates instead of the full sector.
void for_each_pinned_state(const LatticeConfig& cfg, const SectorSpec& sector,
                           const std::function<void(const FockState&)>& fn);

// ---------------------------------------------------------------------------
// Hamiltonian action in the occupation basis
// ---------------------------------------------------------------------------

/// Number of same-site flavor pairs resp. triples, summed over sites.
double pair_count(const FockState& s, int n_sites);
double triple_count(const FockState& s, int n_sites);

/// Interaction energy c2 * pairs + c3 * triples of a basis state.
double interaction_diagonal(const FockState& s, const LatticeConfig& cfg);

struct FockTerm {
    FockState state;
    double amp;
};

/// H|s> expanded in basis states. The first term is always the diagonal
/// (kinetic diagonal plus interaction); the rest are single-particle hops
/// with fermionic signs, one per (particle, reachable site) with the target
/// mode empty. Off-diagonal targets are pairwise distinct.
std::vector<FockTerm> apply_hamiltonian(const FockState& s, const LatticeConfig& cfg,
                                        const HopTable& hops);

} // namespace nuclat
